//! Argument definitions and command dispatch for the `eulertour` binary.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use eulertour::config_model::sample_simple_eulerian;
use eulertour::naive::{acceptance_probability_exact, approximate_seeded, sample_naive};
use eulertour::report::{find_preset, run_experiment, Overrides, PRESETS};
use eulertour::rng::trial_rng;
use eulertour::verify::run_all;
use eulertour::{best_count, count_arbs_rooted, sample_tour_uniform, DegreeSequence, Error, Multigraph};
use serde_json::json;

pub const EXIT_MALFORMED: i32 = 1;
pub const EXIT_NOT_EULERIAN: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;
pub const EXIT_ATTEMPTS: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "eulertour", version, about = "Count and sample Euler tours of directed multigraphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a random simple connected graph with the given degrees.
    Generate {
        #[command(flatten)]
        degrees: DegreeArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        max_attempts: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print arborescence and Euler tour counts and the naive acceptance ratio.
    Count {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw uniform Euler tours, or raw naive-sampler outcomes with --naive.
    Sample {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long, default_value_t = 1)]
        kappa: u64,
        #[arg(long)]
        naive: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the acceptance ratio with the naive sampler.
    Estimate {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long, default_value_t = 10_000)]
        kappa: u64,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the oracle suites; exits with status 3 on any mismatch.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named experiment preset.
    Experiment {
        #[arg(long, required_unless_present = "list")]
        preset: Option<String>,
        /// List the presets and exit.
        #[arg(long)]
        list: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        max_attempts: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Output path; CSV runs with raw samples also write `<out>.samples.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// A regular degree sequence (`--n`, `--d`) or an explicit list.
#[derive(Debug, Args)]
pub struct DegreeArgs {
    #[arg(long, requires = "d", conflicts_with = "degrees")]
    pub n: Option<usize>,
    #[arg(long, requires = "n")]
    pub d: Option<usize>,
    /// Comma-separated out-degrees, e.g. 2,2,3.
    #[arg(long, value_delimiter = ',')]
    pub degrees: Option<Vec<usize>>,
}

impl DegreeArgs {
    fn sequence(&self) -> Result<Option<DegreeSequence>, Error> {
        match (&self.degrees, self.n, self.d) {
            (Some(v), _, _) => Ok(Some(DegreeSequence::new(v.clone())?)),
            (None, Some(n), Some(d)) => Ok(Some(DegreeSequence::regular(d, n)?)),
            _ => Ok(None),
        }
    }
}

/// A graph file (`-` for stdin), or degrees for a freshly generated graph.
#[derive(Debug, Args)]
pub struct GraphSource {
    #[arg(long, conflicts_with_all = ["n", "d", "degrees"])]
    pub graph: Option<PathBuf>,
    #[command(flatten)]
    pub degrees: DegreeArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_attempts: u64,
}

impl GraphSource {
    fn load(&self) -> Result<Multigraph, CliError> {
        if let Some(path) = &self.graph {
            let text = if path == Path::new("-") {
                let mut s = String::new();
                std::io::stdin().read_to_string(&mut s).map_err(CliError::io)?;
                s
            } else {
                fs::read_to_string(path).map_err(|e| CliError::malformed(format!("{}: {e}", path.display())))?
            };
            return Ok(Multigraph::parse(&text)?);
        }
        match self.degrees.sequence()? {
            Some(d) => Ok(generate(&d, self.seed, self.max_attempts)?),
            None => Err(CliError::malformed("give --graph, or --n with --d, or --degrees".into())),
        }
    }
}

fn generate(d: &DegreeSequence, seed: u64, max_attempts: u64) -> Result<Multigraph, Error> {
    Ok(sample_simple_eulerian(d, &mut trial_rng(seed, 0), max_attempts)?.graph)
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn malformed(message: String) -> Self {
        CliError {
            code: EXIT_MALFORMED,
            message,
        }
    }

    fn io(e: std::io::Error) -> Self {
        CliError::malformed(e.to_string())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotEulerian | Error::NoArborescence { .. } => EXIT_NOT_EULERIAN,
            Error::AttemptsExhausted { .. } => EXIT_ATTEMPTS,
            _ => EXIT_MALFORMED,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(CliError::io),
        None => stdout.write_all(text.as_bytes()).map_err(CliError::io),
    }
}

fn json_line(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value");
    s.push('\n');
    s
}

fn no_csv(cmd: &str, format: Format) -> Result<(), CliError> {
    if format == Format::Csv {
        return Err(CliError::malformed(format!("{cmd} has no CSV output")));
    }
    Ok(())
}

/// Runs one command, writing its primary output to `stdout` unless `--out`
/// is given.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Generate {
            degrees,
            seed,
            max_attempts,
            out,
        } => {
            let d = degrees
                .sequence()?
                .ok_or_else(|| CliError::malformed("give --n with --d, or --degrees".into()))?;
            emit(&out, &generate(&d, seed, max_attempts)?.to_text(), stdout)
        }
        Command::Count { source, format, out } => {
            no_csv("count", format)?;
            let g = source.load()?;
            let tours = best_count(&g)?;
            let arbs = count_arbs_rooted(&g, 0)?;
            let acceptance = acceptance_probability_exact(&g)?;
            let text = match format {
                Format::Json => json_line(&json!({
                    "arbs": arbs,
                    "tours": tours,
                    "acceptance": acceptance,
                })),
                _ => format!("arbs={arbs} tours={tours} acceptance={acceptance}\n"),
            };
            emit(&out, &text, stdout)
        }
        Command::Sample {
            source,
            kappa,
            naive,
            format,
            out,
        } => {
            no_csv("sample", format)?;
            let g = source.load()?;
            let mut tours = Vec::with_capacity(kappa as usize);
            for i in 0..kappa {
                let mut rng = trial_rng(source.seed, i);
                tours.push(if naive {
                    sample_naive(&g, &mut rng)?
                } else {
                    Some(sample_tour_uniform(&g, &mut rng)?)
                });
            }
            let text = match format {
                Format::Json => json_line(&json!({
                    "sampler": if naive { "naive" } else { "uniform" },
                    "tours": tours,
                })),
                _ => tours
                    .iter()
                    .map(|t| {
                        let arcs = match t {
                            Some(t) => t.arcs().iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" "),
                            None => "empty".to_string(),
                        };
                        if naive {
                            format!("naive {arcs}\n")
                        } else {
                            format!("{arcs}\n")
                        }
                    })
                    .collect(),
            };
            emit(&out, &text, stdout)
        }
        Command::Estimate {
            source,
            kappa,
            workers,
            format,
            out,
        } => {
            no_csv("estimate", format)?;
            let g = source.load()?;
            let estimate = match workers {
                Some(w) => rayon_pool(w)?.install(|| approximate_seeded(&g, kappa, source.seed))?,
                None => approximate_seeded(&g, kappa, source.seed)?,
            };
            let exact = acceptance_probability_exact(&g)?;
            let text = match format {
                Format::Json => json_line(&json!({ "estimate": estimate, "exact": exact, "kappa": kappa })),
                _ => format!(
                    "estimate={estimate} ({:.6}) exact={exact} ({:.6})\n",
                    estimate.to_f64(),
                    exact.to_f64()
                ),
            };
            emit(&out, &text, stdout)
        }
        Command::Verify { seed, format, out } => {
            no_csv("verify", format)?;
            let outcomes = run_all(seed);
            let text = match format {
                Format::Json => json_line(&serde_json::to_value(&outcomes).expect("outcomes serialize")),
                _ => outcomes
                    .iter()
                    .map(|o| {
                        let mut line = format!(
                            "{} {} cases={} failures={}\n",
                            if o.passed() { "PASS" } else { "FAIL" },
                            o.name,
                            o.cases,
                            o.failures.len()
                        );
                        for f in o.failures.iter().take(5) {
                            line.push_str(&format!("  {f}\n"));
                        }
                        line
                    })
                    .collect(),
            };
            emit(&out, &text, stdout)?;
            if outcomes.iter().all(|o| o.passed()) {
                Ok(())
            } else {
                Err(CliError {
                    code: EXIT_VERIFY_FAILED,
                    message: "verification failed".into(),
                })
            }
        }
        Command::Experiment {
            preset,
            list,
            seed,
            n,
            d,
            trials,
            max_attempts,
            workers,
            format,
            out,
        } => {
            if list {
                let text: String = PRESETS
                    .iter()
                    .map(|p| format!("{:<16} {}\n", p.name, p.description))
                    .collect();
                return emit(&None, &text, stdout);
            }
            let preset = find_preset(preset.as_deref().expect("clap enforces --preset"))?;
            let overrides = Overrides {
                d,
                n,
                trials,
                max_attempts,
            };
            let report = run_experiment(preset.name, preset.experiment.with_overrides(&overrides), seed, workers)?;
            match format {
                Format::Csv => {
                    emit(&out, &report.to_csv(), stdout)?;
                    if let (Some(path), false) = (&out, report.samples.is_empty()) {
                        let mut p = path.clone().into_os_string();
                        p.push(".samples.csv");
                        fs::write(PathBuf::from(p), report.samples_csv()).map_err(CliError::io)?;
                    }
                    Ok(())
                }
                _ => emit(&out, &report.to_json(), stdout),
            }
        }
    }
}

fn rayon_pool(workers: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::malformed(e.to_string()))
}
