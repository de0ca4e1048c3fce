use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use pibreak::cli::{exit_code, run, Command, Format, RunRequest};

/// Block-resolved dynamics of inhomogeneous collective spin ensembles.
#[derive(Parser)]
#[command(version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides [output] directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps and block evolution.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let threads = args
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
    {
        eprintln!("error: thread pool: {e}");
        return ExitCode::from(1);
    }
    let req = RunRequest {
        command: args.command,
        config: &args.config,
        out: args.out.as_deref(),
        format: args.format,
        threads,
    };
    match run(&req) {
        Ok(m) => {
            println!(
                "{}: wrote {} and manifest.json",
                m.command,
                m.outputs.join(", ")
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
