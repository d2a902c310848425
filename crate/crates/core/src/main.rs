use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use morsegraded::cli::{exit_code, run_command, RunConfig};

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    if let Some(n) = std::env::var("MORSEGRADED_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // ignore failure: the pool may already exist
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let out = match run_command(&cfg) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e) as u8);
        }
    };
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, out + "\n") {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        }
        None => {
            // a closed pipe (`| head`) is not an error worth reporting
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = writeln!(stdout, "{out}") {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
        }
    }
    ExitCode::SUCCESS
}
