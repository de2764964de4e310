use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use forge::cli::{generate, load, parse, run, GenerateOptions, RunOptions};

#[derive(Parser)]
#[command(
    name = "forge",
    version,
    about = "Frobenius and Cartier structures over finite fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the commands of a problem file.
    Run {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Treat unsupported results as failures.
        #[arg(long)]
        strict: bool,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Record per-command wall time in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Print a reproducible problem file.
    Generate {
        /// random-artinian, random-pid-torsion or elliptic-scan
        kind: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        count: usize,
        #[arg(long, default_value_t = 4)]
        max_dim: usize,
        #[arg(long)]
        p: Option<u32>,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            file,
            seed,
            strict,
            json,
            timing,
        } => {
            let problem = std::fs::read_to_string(&file)
                .map_err(|e| format!("cannot read {}: {e}", file.display()))
                .and_then(|t| parse(&t).and_then(|f| load(&f)).map_err(|e| e.to_string()));
            let problem = match problem {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(2);
                }
            };
            let report = run(
                &problem,
                &RunOptions {
                    seed,
                    strict,
                    timing,
                },
            );
            print!("{}", report.render());
            if let Some(path) = json {
                let text = serde_json::to_string_pretty(&report).expect("report serializes");
                if let Err(e) = std::fs::write(&path, text + "\n") {
                    eprintln!("cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Command::Generate {
            kind,
            seed,
            count,
            max_dim,
            p,
        } => match generate(
            &kind,
            &GenerateOptions {
                seed,
                count,
                max_dim,
                p,
            },
        ) {
            Ok(f) => {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&f).expect("problem serializes")
                );
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(2)
            }
        },
    }
}
