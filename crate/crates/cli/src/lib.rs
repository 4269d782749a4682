//! Command-line front end for `latticeglow`: figure presets, custom angular
//! scans written as CSV, and a self-test comparing every closed form with
//! exact Fock-space enumeration.

pub mod config;
pub mod grid;
pub mod presets;
pub mod selftest;
pub mod table;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{ArgGroup, Parser};
use latticeglow::{ModeKind, StateKind};
use thiserror::Error;

use crate::config::{parse_mode_kind, parse_state_kind, run_custom, Observable, ScanConfig};
use crate::grid::{parse_angle, GridSpec};
use crate::presets::{run_preset, Preset};

/// Environment variable capping the worker-thread count.
pub const THREADS_ENV: &str = "LATTICEGLOW_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Invalid(Vec<String>),
    #[error(transparent)]
    Model(#[from] latticeglow::Error),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: io::Error,
    },
    #[error("self-test failed")]
    SelftestFailed,
}

impl CliError {
    /// 2 for usage errors, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

fn io_err(context: impl Into<String>) -> impl FnOnce(io::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Io { context, source }
}

#[derive(Debug, Parser)]
#[command(
    name = "latticeglow",
    version,
    about = "Light scattering from ultracold atoms in optical lattices",
    long_about = "Computes amplitude, intensity, noise, quadrature and photon-number \
                  statistics of light scattered from Mott-insulator, superfluid and \
                  coherent atomic states.\n\n\
                  Without --preset or --selftest, runs a custom angular scan built from \
                  --config and the scan flags (flags win).",
    group(ArgGroup::new("scan").multiple(true).args([
        "config", "state", "big_n", "big_m", "k", "offset", "theta0", "pump", "probe",
        "beta", "observables",
    ])),
)]
pub struct Cli {
    /// Regenerate a figure's data or the cavity table.
    #[arg(long, value_enum, conflicts_with_all = ["scan", "selftest"])]
    pub preset: Option<Preset>,

    /// JSON scan configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Atomic state: mi, sf or coherent.
    #[arg(long, value_parser = parse_state_kind)]
    pub state: Option<StateKind>,

    /// Number of atoms N.
    #[arg(long = "big-n")]
    pub big_n: Option<u64>,

    /// Number of lattice sites M.
    #[arg(long = "big-m")]
    pub big_m: Option<u64>,

    /// Number of illuminated sites K (default M).
    #[arg(long)]
    pub k: Option<usize>,

    /// First illuminated site (1-based).
    #[arg(long)]
    pub offset: Option<usize>,

    /// Pump angle; accepts forms like 0.1pi or pi/4.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_angle)]
    pub theta0: Option<f64>,

    /// Pump mode kind: traveling or standing.
    #[arg(long, value_parser = parse_mode_kind)]
    pub pump: Option<ModeKind>,

    /// Probe mode kind: traveling or standing.
    #[arg(long, value_parser = parse_mode_kind)]
    pub probe: Option<ModeKind>,

    /// Homodyne phase beta.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_angle)]
    pub beta: Option<f64>,

    /// Probe-angle grid min:max:count (default -pi:pi:2001).
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<GridSpec>,

    /// Comma-separated observables: amp, intensity, noise, incoherent, quad,
    /// fourth, photon_var.
    #[arg(long, value_delimiter = ',')]
    pub observables: Option<Vec<Observable>>,

    /// Output CSV (scan; default stdout) or directory (preset; default .).
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Compare closed forms with enumeration for N = M up to the given size.
    #[arg(
        long,
        num_args = 0..=1,
        default_missing_value = "5",
        value_name = "MAX_NM",
        value_parser = clap::value_parser!(u32).range(2..=8),
        conflicts_with_all = ["scan", "grid", "out"],
    )]
    pub selftest: Option<u32>,

    /// Relative tolerance for --selftest.
    #[arg(long, requires = "selftest", default_value_t = selftest::DEFAULT_TOLERANCE)]
    pub tolerance: f64,
}

impl Cli {
    /// The configuration file (if any) with flag overrides applied.
    pub fn scan_config(&self) -> Result<ScanConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(io_err(format!("reading {}", path.display())))?;
                ScanConfig::from_json(&text)
                    .map_err(|e| CliError::Invalid(vec![format!("{}: {e}", path.display())]))?
            }
            None => ScanConfig::default(),
        };
        if let Some(v) = self.state {
            cfg.state = v;
        }
        if let Some(v) = self.big_n {
            cfg.big_n = v;
        }
        if let Some(v) = self.big_m {
            cfg.big_m = v;
        }
        if self.k.is_some() {
            cfg.k = self.k;
        }
        if let Some(v) = self.offset {
            cfg.offset = v;
        }
        if let Some(v) = self.theta0 {
            cfg.pump.theta = v;
        }
        if let Some(v) = self.pump {
            cfg.pump.kind = v;
        }
        if let Some(v) = self.probe {
            cfg.probe.kind = v;
        }
        if let Some(v) = self.beta {
            cfg.beta = v;
        }
        if let Some(v) = self.grid {
            cfg.grid = v;
        }
        if let Some(v) = &self.observables {
            cfg.observables = v.clone();
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        Ok(cfg)
    }
}

/// Applies `LATTICEGLOW_THREADS` to the global worker pool.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads = raw
        .trim()
        .parse::<usize>()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))
        })?;
    // A pool may already exist when called twice in one process.
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        log::debug!("thread pool already configured: {e}");
    }
    Ok(())
}

/// Executes a parsed command line. Normal output goes to `stdout`.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    configure_threads()?;

    if let Some(max_size) = cli.selftest {
        if cli.tolerance.is_nan() || cli.tolerance < 0.0 {
            return Err(CliError::Usage(format!(
                "--tolerance must be >= 0, got {}",
                cli.tolerance
            )));
        }
        let report = selftest::selftest(max_size, cli.tolerance)?;
        writeln!(stdout, "{report}").map_err(io_err("writing report"))?;
        return if report.passed() {
            Ok(())
        } else {
            Err(CliError::SelftestFailed)
        };
    }

    if let Some(preset) = cli.preset {
        let grid = cli.grid.unwrap_or_default();
        let violations = grid.violations();
        if !violations.is_empty() {
            return Err(CliError::Invalid(violations));
        }
        let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
        fs::create_dir_all(&dir).map_err(io_err(format!("creating {}", dir.display())))?;
        let path = dir.join(preset.file_name());
        let table = run_preset(preset, &grid)?;
        table
            .write_csv_file(&path)
            .map_err(io_err(format!("writing {}", path.display())))?;
        log::info!("{preset}: {} rows -> {}", table.rows.len(), path.display());
        return Ok(());
    }

    let cfg = cli.scan_config()?;
    let violations = cfg.violations();
    if !violations.is_empty() {
        return Err(CliError::Invalid(violations));
    }
    let table = run_custom(&cfg)?;
    match &cfg.out {
        Some(path) => table
            .write_csv_file(path)
            .map_err(io_err(format!("writing {}", path.display())))?,
        None => table.write_csv(stdout).map_err(io_err("writing CSV"))?,
    }
    Ok(())
}
