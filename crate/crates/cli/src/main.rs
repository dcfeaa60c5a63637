//! `reluforge`: build the explicit ReLU architectures, inspect their linear
//! regions, evaluate approximation bounds, and run the depth-vs-width
//! training experiment.

mod commands;
mod util;

use clap::error::ErrorKind;
use clap::Parser;

use commands::{Cli, ExitKind};

fn main() {
    // optional cap on worker threads (default: all cores)
    if let Ok(v) = std::env::var("RELUFORGE_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                print!("{e}");
                std::process::exit(0);
            }
            _ => {
                // collapse clap's message body (flag names can sit on their
                // own lines) into a single machine-parsable line
                let rendered = e.to_string();
                let mut parts = Vec::new();
                for line in rendered.lines() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with("Usage:") {
                        break;
                    }
                    parts.push(line.strip_prefix("error: ").unwrap_or(line));
                }
                eprintln!("error: {}", parts.join(" "));
                std::process::exit(1);
            }
        },
    };
    match commands::run(cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {}", err.message);
            std::process::exit(match err.kind {
                ExitKind::Validation => 1,
                ExitKind::Runtime => 2,
            });
        }
    }
}
