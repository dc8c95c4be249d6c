use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use hawkesq::harness::{run_command, Command, RunOptions};
use hawkesq::ErrorClass;

/// Infinite-server queue fed by a marked Hawkes process.
#[derive(Debug, Parser)]
#[command(name = "hawkesq", version)]
struct Cli {
    command: Command,
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides `settings.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Simulation budget of 100 batches x 100 000 runs.
    #[arg(long)]
    paper_exact: bool,
}

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Config => 3,
        ErrorClass::Precondition => 4,
        ErrorClass::Numeric => 5,
        ErrorClass::Io => 6,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let opts = RunOptions { seed: cli.seed, out_dir: cli.out, paper_exact: cli.paper_exact };
    match run_command(&cli.config, cli.command, &opts) {
        Ok(report) => {
            for f in &report.files {
                println!("{}", f.display());
            }
            match report.partial_failure {
                Some(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(exit_code(e.class()))
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.class()))
        }
    }
}
