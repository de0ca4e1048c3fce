//! Config-driven experiment runner behind the `pibreak` binary.

mod commands;
pub mod config;
pub mod output;

use std::path::Path;
use std::time::Instant;

pub use config::{load_config, parse_config, Format, RunConfig};
pub use output::{Cell, Manifest, Table};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Decompose,
    EvolveExact,
    GapScan,
    Meanfield,
    PhaseDiagram,
    Spectrum,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Decompose => "decompose",
            Command::EvolveExact => "evolve-exact",
            Command::GapScan => "gap-scan",
            Command::Meanfield => "meanfield",
            Command::PhaseDiagram => "phase-diagram",
            Command::Spectrum => "spectrum",
            Command::Validate => "validate",
        }
    }
}

/// Computes the tables of one command without touching the filesystem.
pub fn compute(command: Command, cfg: &RunConfig) -> Result<(Vec<Table>, serde_json::Value)> {
    let out = match command {
        Command::Decompose => commands::decompose(cfg),
        Command::EvolveExact => commands::evolve_exact(cfg),
        Command::GapScan => commands::gap_scan(cfg),
        Command::Meanfield => commands::meanfield(cfg),
        Command::PhaseDiagram => commands::phase_diagram(cfg),
        Command::Spectrum => commands::spectrum(cfg),
        Command::Validate => commands::validate(cfg),
    }?;
    Ok((out.tables, out.summary))
}

pub struct RunRequest<'a> {
    pub command: Command,
    pub config: &'a Path,
    pub out: Option<&'a Path>,
    pub format: Option<Format>,
    pub threads: usize,
}

/// Loads the config, runs the command and writes every table plus
/// `manifest.json` into the output directory.
pub fn run(req: &RunRequest) -> Result<Manifest> {
    let start = Instant::now();
    let (cfg, text) = load_config(req.config)?;
    let out_cfg = cfg.output.clone();
    let dir = req
        .out
        .map(Path::to_path_buf)
        .or_else(|| {
            out_cfg
                .as_ref()
                .and_then(|o| o.directory.clone())
                .map(Into::into)
        })
        .unwrap_or_else(|| "pibreak-out".into());
    let format = req
        .format
        .or_else(|| out_cfg.as_ref().and_then(|o| o.format))
        .unwrap_or_default();
    let (tables, summary) = compute(req.command, &cfg)?;
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let outputs = tables
        .iter()
        .map(|t| {
            let p = t.write(&dir, format)?;
            Ok(p.file_name().expect("file").to_string_lossy().into_owned())
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = Manifest {
        command: req.command.name().to_owned(),
        version: env!("CARGO_PKG_VERSION"),
        config_path: req.config.display().to_string(),
        config_sha256: output::sha256_hex(text.as_bytes()),
        format: match format {
            Format::Csv => "csv",
            Format::Json => "json",
        },
        threads: req.threads,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        outputs,
        summary,
    };
    manifest.write(&dir)?;
    Ok(manifest)
}

/// 1 for anything traceable to the inputs, 2 for numerical failures.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        2
    } else {
        1
    }
}
