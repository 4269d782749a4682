//! Custom angular scans described by a JSON document and/or flags.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use latticeglow::observables::{incoherent_intensity, ObservableRow};
use latticeglow::{
    angular_scan, AtomState, Complex64, LatticeSpec, ModeKind, ModeSpec, ScatterModel, StateKind,
};
use serde::{Deserialize, Serialize};

use crate::grid::GridSpec;
use crate::table::{Table, Value};

/// Column groups a scan can emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Amp,
    Intensity,
    Noise,
    Incoherent,
    Quad,
    Fourth,
    PhotonVar,
}

impl Observable {
    pub const ALL: [Observable; 7] = [
        Observable::Amp,
        Observable::Intensity,
        Observable::Noise,
        Observable::Incoherent,
        Observable::Quad,
        Observable::Fourth,
        Observable::PhotonVar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::Amp => "amp",
            Observable::Intensity => "intensity",
            Observable::Noise => "noise",
            Observable::Incoherent => "incoherent",
            Observable::Quad => "quad",
            Observable::Fourth => "fourth",
            Observable::PhotonVar => "photon_var",
        }
    }

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Observable::Amp => &["amp_re", "amp_im"],
            Observable::Intensity => &["intensity"],
            Observable::Noise => &["noise"],
            Observable::Incoherent => &["incoherent"],
            Observable::Quad => &["quad_mean", "quad_var"],
            Observable::Fourth => &["fourth", "fourth_var"],
            Observable::PhotonVar => &["photon_var"],
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Observable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim().to_ascii_lowercase();
        Observable::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Observable::ALL.iter().map(|o| o.name()).collect();
                format!("unknown observable {s:?} (expected one of {})", names.join(", "))
            })
    }
}

/// Field-coupling parameters; scans default to `|C| = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    pub g0: f64,
    pub a0_re: f64,
    #[serde(default)]
    pub a0_im: f64,
    pub delta_0a: f64,
    pub kappa: f64,
    #[serde(default)]
    pub delta_01: f64,
}

impl CouplingConfig {
    pub fn model(&self) -> ScatterModel {
        ScatterModel {
            g0: self.g0,
            a0: Complex64::new(self.a0_re, self.a0_im),
            delta_0a: self.delta_0a,
            kappa: self.kappa,
            delta_01: self.delta_01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub state: StateKind,
    pub big_n: u64,
    pub big_m: u64,
    /// Illuminated sites; all `M` when absent.
    pub k: Option<usize>,
    pub offset: usize,
    pub pump: ModeSpec,
    /// The probe's `theta` is replaced by each grid angle.
    pub probe: ModeSpec,
    pub beta: f64,
    pub grid: GridSpec,
    pub observables: Vec<Observable>,
    pub coupling: Option<CouplingConfig>,
    pub out: Option<PathBuf>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            state: StateKind::Superfluid,
            big_n: 30,
            big_m: 30,
            k: None,
            offset: 1,
            pump: ModeSpec::traveling(0.0),
            probe: ModeSpec::traveling(0.0),
            beta: 0.0,
            grid: GridSpec::default(),
            observables: Observable::ALL.to_vec(),
            coupling: None,
            out: None,
        }
    }
}

impl ScanConfig {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn illuminated(&self) -> usize {
        self.k.unwrap_or(self.big_m as usize)
    }

    pub fn lattice(&self) -> LatticeSpec {
        LatticeSpec {
            sites: self.big_m as usize,
            illuminated: self.illuminated(),
            offset: self.offset,
        }
    }

    pub fn model(&self) -> ScatterModel {
        self.coupling.map_or_else(ScatterModel::unit, |c| c.model())
    }

    /// Every violated constraint, in a stable order.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Err(e) = AtomState::new(self.state, self.big_n, self.big_m) {
            out.push(e.to_string());
        }
        out.extend(self.lattice().violations());
        for (name, mode) in [("pump", &self.pump), ("probe", &self.probe)] {
            if let Err(e) = mode.validate() {
                out.push(format!("{name}: {e}"));
            }
        }
        if !self.beta.is_finite() {
            out.push(format!("beta must be finite, got {}", self.beta));
        }
        out.extend(self.grid.violations());
        if self.observables.is_empty() {
            out.push("at least one observable is required".to_string());
        }
        if let Some(c) = &self.coupling {
            if let Err(e) = c.model().validate() {
                out.push(e.to_string());
            }
        }
        out
    }

    pub fn header(&self) -> Vec<String> {
        let mut header = vec!["theta1_rad".to_string()];
        for obs in self.requested() {
            header.extend(obs.columns().iter().map(|c| c.to_string()));
        }
        header
    }

    /// Requested observables in declared order, without repeats.
    pub fn requested(&self) -> Vec<Observable> {
        let mut seen = Vec::new();
        for &o in &self.observables {
            if !seen.contains(&o) {
                seen.push(o);
            }
        }
        seen
    }
}

/// Runs a validated configuration; callers should check
/// [`ScanConfig::violations`] first for a complete report.
pub fn run_custom(config: &ScanConfig) -> latticeglow::Result<Table> {
    let state = AtomState::new(config.state, config.big_n, config.big_m)?;
    let lattice = config.lattice();
    let model = config.model();
    let grid = config.grid.points();
    let rows = angular_scan(
        &config.pump,
        &config.probe,
        &lattice,
        &state,
        &model,
        config.beta,
        &grid,
    )?;
    let requested = config.requested();
    let incoherent = if requested.contains(&Observable::Incoherent) {
        incoherent_intensity(&state, lattice.illuminated, config.pump.kind, config.probe.kind)?
    } else {
        0.0
    };

    let mut table = Table::new(config.header());
    for row in &rows {
        let mut cells = vec![Value::Real(row.theta1)];
        for &obs in &requested {
            cells.extend(observable_cells(obs, row, incoherent).into_iter().map(Value::Real));
        }
        table.push(cells);
    }
    Ok(table)
}

fn observable_cells(obs: Observable, row: &ObservableRow, incoherent: f64) -> Vec<f64> {
    match obs {
        Observable::Amp => vec![row.amp.re, row.amp.im],
        Observable::Intensity => vec![row.intensity],
        Observable::Noise => vec![row.noise_r],
        Observable::Incoherent => vec![incoherent],
        Observable::Quad => vec![row.quad_mean, row.quad_var],
        Observable::Fourth => vec![row.fourth, row.fourth_var],
        Observable::PhotonVar => vec![row.photon_var],
    }
}

/// Mode kind from a flag value.
pub fn parse_mode_kind(s: &str) -> Result<ModeKind, String> {
    s.parse::<ModeKind>().map_err(|e| e.to_string())
}

pub fn parse_state_kind(s: &str) -> Result<StateKind, String> {
    s.parse::<StateKind>().map_err(|e| e.to_string())
}
