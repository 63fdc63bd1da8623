//! Named experiment presets and the `report_v1` JSON / CSV output.

use serde::{Deserialize, Serialize};

use crate::count::Ratio;
use crate::error::{Error, Result};
use crate::experiments::{
    distribution_experiment, exact_configuration_moments, mc_configuration_moments, mc_simple_graph_moments,
    simulate_w, theory_moments, w_moment_reports, w_truncation_bound, DistConfig, ExactMoments, TheoryMoments,
};
use crate::graph::{fixtures, DegreeSequence};
use crate::naive::{acceptance_probability_exact, approximate_seeded};
use crate::rng::sub_seed;
use crate::stats::{Estimate, MomentReport, TargetKind};
use crate::verify::compositions;

pub const REPORT_SCHEMA: &str = "report_v1";
/// Bumped whenever a preset changes meaning.
pub const PRESET_TABLE_VERSION: u32 = 1;
pub const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "+", env!("EULERTOUR_GIT_DESCRIBE"));

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum Experiment {
    ExactArborescences { max_m: usize, max_degree: usize },
    ConfigurationMoments { d: usize, n: usize, trials: u64 },
    SimpleGraphMoments { d: usize, n: usize, graphs: u64, max_attempts: u64 },
    Distribution(DistConfig),
    W { d: usize, k_max: usize, samples: u64 },
    Naive { kappa: u64 },
}

/// Command-line overrides applied on top of a preset.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub d: Option<usize>,
    pub n: Option<usize>,
    pub trials: Option<u64>,
    pub max_attempts: Option<u64>,
}

impl Experiment {
    pub fn with_overrides(self, o: &Overrides) -> Experiment {
        use Experiment::*;
        match self {
            ExactArborescences { max_m, max_degree } => ExactArborescences {
                max_m: o.n.unwrap_or(max_m),
                max_degree: o.d.unwrap_or(max_degree),
            },
            ConfigurationMoments { d, n, trials } => ConfigurationMoments {
                d: o.d.unwrap_or(d),
                n: o.n.unwrap_or(n),
                trials: o.trials.unwrap_or(trials),
            },
            SimpleGraphMoments { d, n, graphs, max_attempts } => SimpleGraphMoments {
                d: o.d.unwrap_or(d),
                n: o.n.unwrap_or(n),
                graphs: o.trials.unwrap_or(graphs),
                max_attempts: o.max_attempts.unwrap_or(max_attempts),
            },
            Distribution(c) => Distribution(DistConfig {
                d: o.d.unwrap_or(c.d),
                n: o.n.unwrap_or(c.n),
                graphs: o.trials.unwrap_or(c.graphs),
                max_attempts: o.max_attempts.unwrap_or(c.max_attempts),
                ..c
            }),
            W { d, k_max, samples } => W {
                d: o.d.unwrap_or(d),
                k_max,
                samples: o.trials.unwrap_or(samples),
            },
            Naive { kappa } => Naive {
                kappa: o.trials.unwrap_or(kappa),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub experiment: Experiment,
}

const ATTEMPTS: u64 = 1_000_000;

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "smoke",
        description: "quick configuration-model run, d=2 n=10",
        experiment: Experiment::ConfigurationMoments { d: 2, n: 10, trials: 2_000 },
    },
    Preset {
        name: "exact-arbs-m7",
        description: "exact arborescence moments over all configurations, m <= 7, degrees <= 3",
        experiment: Experiment::ExactArborescences { max_m: 7, max_degree: 3 },
    },
    Preset {
        name: "config-d2-n50",
        description: "loops, double arcs, short cycles and weighted moments, d=2 n=50",
        experiment: Experiment::ConfigurationMoments { d: 2, n: 50, trials: 100_000 },
    },
    Preset {
        name: "config-d3-n50",
        description: "configuration-model moments, d=3 n=50",
        experiment: Experiment::ConfigurationMoments { d: 3, n: 50, trials: 20_000 },
    },
    Preset {
        name: "tours-d2-n50",
        description: "Euler-tour moments of random simple 2-in/2-out graphs, n=50",
        experiment: Experiment::SimpleGraphMoments { d: 2, n: 50, graphs: 2_000, max_attempts: ATTEMPTS },
    },
    Preset {
        name: "tours-d2-n100",
        description: "Euler-tour moments of random simple 2-in/2-out graphs, n=100",
        experiment: Experiment::SimpleGraphMoments { d: 2, n: 100, graphs: 2_000, max_attempts: ATTEMPTS },
    },
    Preset {
        name: "dist-d2-n100",
        description: "normalized tour counts against simulated W, d=2 n=100",
        experiment: Experiment::Distribution(DistConfig {
            d: 2,
            n: 100,
            graphs: 2_000,
            w_samples: 100_000,
            k_max: 12,
            max_attempts: ATTEMPTS,
        }),
    },
    Preset {
        name: "w-d2",
        description: "moments of simulated W, d=2",
        experiment: Experiment::W { d: 2, k_max: 12, samples: 100_000 },
    },
    Preset {
        name: "w-d3",
        description: "moments of simulated W, d=3",
        experiment: Experiment::W { d: 3, k_max: 12, samples: 100_000 },
    },
    Preset {
        name: "naive-fixtures",
        description: "naive sampler acceptance on the bidirected triangle and the double digon",
        experiment: Experiment::Naive { kappa: 100_000 },
    },
];

pub fn find_preset(name: &str) -> Result<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name).ok_or_else(|| {
        let names: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
        Error::InvalidInput(format!("unknown preset {name:?}; available: {}", names.join(", ")))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistSummary {
    pub ks_distance: f64,
    pub truncation_bound: f64,
    pub large_count_threshold: f64,
    pub large_count_fraction: f64,
    pub chebyshev_ratio: f64,
    pub chebyshev_ratio_theory: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub version: String,
    pub preset_table_version: u32,
    pub preset: String,
    pub seed: u64,
    pub params: Experiment,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub theory: Option<TheoryMoments>,
    pub moments: Vec<MomentReport>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub exact: Vec<ExactMoments>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub distribution: Option<DistSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
    /// Raw samples, written to CSV only.
    #[serde(skip)]
    pub samples: Vec<(String, Vec<f64>)>,
}

impl Report {
    fn new(preset: &str, seed: u64, params: Experiment) -> Self {
        Report {
            schema: REPORT_SCHEMA.to_string(),
            version: VERSION.to_string(),
            preset_table_version: PRESET_TABLE_VERSION,
            preset: preset.to_string(),
            seed,
            params,
            theory: None,
            moments: Vec::new(),
            exact: Vec::new(),
            distribution: None,
            notes: Vec::new(),
            samples: Vec::new(),
        }
    }

    /// All moment reports and exact checks agree with their targets.
    pub fn all_within_tolerance(&self) -> bool {
        self.moments.iter().all(|m| m.within_tolerance != Some(false) || m.name == "arbs_vs_displayed_limit")
            && self.exact.iter().all(ExactMoments::matches)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Report> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("bad report: {e}")))
    }

    /// One row per moment report, then one per exact check.
    pub fn to_csv(&self) -> String {
        #[derive(Serialize)]
        struct Row<'a> {
            name: &'a str,
            sample_count: u64,
            mean: f64,
            variance: f64,
            standard_error: f64,
            theory_value: Option<f64>,
            z_score: Option<f64>,
            kind: &'a str,
            allowance: f64,
            within_tolerance: Option<bool>,
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        for m in &self.moments {
            w.serialize(Row {
                name: &m.name,
                sample_count: m.sample_count,
                mean: m.mean,
                variance: m.variance,
                standard_error: m.standard_error,
                theory_value: m.theory_value,
                z_score: m.z_score,
                kind: match m.kind {
                    TargetKind::Exact => "exact",
                    TargetKind::Asymptotic => "asymptotic",
                },
                allowance: m.allowance,
                within_tolerance: m.within_tolerance,
            })
            .expect("csv row");
        }
        for e in &self.exact {
            let name = format!("exact_mean{:?}", e.degrees).replace(", ", "_");
            for (label, got, want) in [("", &e.mean, &e.theory_mean), ("_second", &e.second_moment, &e.theory_second_moment)] {
                w.serialize(Row {
                    name: &format!("{name}{label}"),
                    sample_count: 0,
                    mean: got.to_f64(),
                    variance: 0.0,
                    standard_error: 0.0,
                    theory_value: Some(want.to_f64()),
                    z_score: None,
                    kind: "exact",
                    allowance: 0.0,
                    within_tolerance: Some(got == want),
                })
                .expect("csv row");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
    }

    /// Raw samples as `series,index,value` rows; empty if there are none.
    pub fn samples_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["series", "index", "value"]).expect("csv header");
        for (series, values) in &self.samples {
            for (i, v) in values.iter().enumerate() {
                w.write_record([series.as_str(), &i.to_string(), &v.to_string()]).expect("csv row");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
    }
}

/// Runs a preset on a pool of `workers` threads (the global pool if `None`).
pub fn run_preset(name: &str, seed: u64, overrides: &Overrides, workers: Option<usize>) -> Result<Report> {
    let preset = find_preset(name)?;
    run_experiment(preset.name, preset.experiment.with_overrides(overrides), seed, workers)
}

pub fn run_experiment(label: &str, exp: Experiment, seed: u64, workers: Option<usize>) -> Result<Report> {
    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::InvalidInput(format!("cannot build worker pool: {e}")))?
            .install(|| run_in_pool(label, exp, seed)),
        None => run_in_pool(label, exp, seed),
    }
}

fn run_in_pool(label: &str, exp: Experiment, seed: u64) -> Result<Report> {
    let mut report = Report::new(label, seed, exp);
    match exp {
        Experiment::ExactArborescences { max_m, max_degree } => {
            for m in 1..=max_m {
                for d in compositions(m, max_degree) {
                    report.exact.push(exact_configuration_moments(&DegreeSequence::new(d)?)?);
                }
            }
        }
        Experiment::ConfigurationMoments { d, n, trials } => {
            let ds = DegreeSequence::regular(d, n)?;
            report.theory = Some(theory_moments(&ds));
            report.moments = mc_configuration_moments(&ds, trials, seed)?;
        }
        Experiment::SimpleGraphMoments { d, n, graphs, max_attempts } => {
            let ds = DegreeSequence::regular(d, n)?;
            report.theory = Some(theory_moments(&ds));
            let s = mc_simple_graph_moments(&ds, graphs, seed, max_attempts)?;
            report.moments = s.reports;
            report.notes = s.notes;
            report.samples.push(("normalized_tours".into(), s.normalized_tours));
            report.samples.push(("ln_tours".into(), s.ln_tours));
        }
        Experiment::Distribution(cfg) => {
            report.theory = Some(theory_moments(&DegreeSequence::regular(cfg.d, cfg.n)?));
            let r = distribution_experiment(&cfg, seed)?;
            report.moments = r.moments;
            report.notes = r.notes;
            report.distribution = Some(DistSummary {
                ks_distance: r.ks_distance,
                truncation_bound: r.truncation_bound,
                large_count_threshold: r.large_count_threshold,
                large_count_fraction: r.large_count_fraction,
                chebyshev_ratio: r.chebyshev_ratio,
                chebyshev_ratio_theory: r.chebyshev_ratio_theory,
            });
            report.samples.push(("normalized_tours".into(), r.normalized_samples));
            report.samples.push(("w".into(), r.w_samples));
        }
        Experiment::W { d, k_max, samples } => {
            let w = simulate_w(d, k_max, samples, seed)?;
            report.moments = w_moment_reports(&w, d);
            report.notes.push(format!(
                "truncation after k_max={k_max}: ln E[W^2] is off by at most {:e}",
                w_truncation_bound(d, k_max)
            ));
            report.samples.push(("w".into(), w));
        }
        Experiment::Naive { kappa } => {
            for (i, (name, g)) in [("bidirected_triangle", fixtures::bidirected_triangle()), ("double_digon", fixtures::double_digon())]
                .into_iter()
                .enumerate()
            {
                let est = approximate_seeded(&g, kappa, sub_seed(seed, i as u64))?;
                report.moments.push(binomial_report(&format!("acceptance_{name}"), &est, kappa, &acceptance_probability_exact(&g)?));
            }
        }
    }
    Ok(report)
}

fn binomial_report(name: &str, est: &Ratio, kappa: u64, exact: &Ratio) -> MomentReport {
    let p = est.to_f64();
    let variance = p * (1.0 - p);
    let estimate = Estimate {
        count: kappa,
        mean: p,
        variance,
        standard_error: (variance / kappa as f64).sqrt(),
    };
    MomentReport::new(name, estimate, Some(exact.to_f64()), TargetKind::Exact, 0.0)
}
