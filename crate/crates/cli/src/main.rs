use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use qtst_cli::{run, Overrides};

/// Ring-polymer dividing-surface scaling and HA-QTST / RPMD-TST rate runs.
#[derive(Debug, Parser)]
#[command(name = "qtst", version)]
struct Args {
    /// TOML run configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides `seed`.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Overrides `out` (default `out`).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Overrides `command`: surface-check, scaling, figure1, rate,
    /// ratio-sweep or momenta-check.
    #[arg(long, value_name = "NAME")]
    command: Option<String>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let ov = Overrides {
        config: args.config,
        seed: args.seed,
        out: args.out,
        command: args.command,
    };
    match run(&ov) {
        Ok(outcome) => {
            for p in &outcome.written {
                println!("wrote {}", p.display());
            }
            if outcome.divergence {
                eprintln!("warning: HA divergence flag set; artifacts written");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
