use clap::Parser;
use eulertour_cli::{run, Cli, EXIT_MALFORMED};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { EXIT_MALFORMED } else { 0 });
        }
    };
    let stdout = std::io::stdout();
    if let Err(e) = run(cli, &mut stdout.lock()) {
        eprintln!("error: {}", e.message);
        std::process::exit(e.code);
    }
}
