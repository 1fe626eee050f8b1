use clap::Parser;

use loocv_cli::args::{Cli, Command};
use loocv_cli::{cmd_path, cmd_replica, cmd_synth};

/// Worker-count override; unset or 0 leaves the default pool.
const WORKERS_ENV: &str = "LOOCV_WORKERS";

fn main() {
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        match v.parse::<usize>() {
            Ok(w) if w > 0 => {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(w)
                    .build_global()
                    .expect("worker pool not yet initialized");
            }
            _ => {
                eprintln!("bad input: {WORKERS_ENV}='{v}' is not a positive integer");
                std::process::exit(2);
            }
        }
    }

    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Path(a) => cmd_path::run(a),
        Command::Synth(a) => cmd_synth::run(a),
        Command::Replica(a) => cmd_replica::run(a),
    };
    if let Err(e) = result {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
