//! Frozen parameter sets reproducing the figure data and the cavity table.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;

use clap::ValueEnum;
use latticeglow::observables::incoherent_intensity;
use latticeglow::{
    angular_scan, cavity_example, AtomState, LatticeSpec, ModeKind, ModeSpec, ObservableRow,
    Result, ScatterModel, StateKind,
};

use crate::grid::GridSpec;
use crate::table::{Table, Value};

/// Atoms and sites for the figure presets.
pub const FIGURE_ATOMS: u64 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum Preset {
    Fig2,
    Fig3a,
    Fig3b,
    Fig3c,
    Fig4,
    Fig5,
    Cavity,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::Fig2,
        Preset::Fig3a,
        Preset::Fig3b,
        Preset::Fig3c,
        Preset::Fig4,
        Preset::Fig5,
        Preset::Cavity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3a => "fig3a",
            Preset::Fig3b => "fig3b",
            Preset::Fig3c => "fig3c",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Cavity => "cavity",
        }
    }

    pub fn file_name(self) -> String {
        format!("{}.csv", self.name())
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Quadrature phases of the fourth preset, with column labels.
pub const FIG4_BETAS: [(f64, &str); 4] = [
    (0.0, "beta0"),
    (FRAC_PI_4, "beta_pi4"),
    (FRAC_PI_2, "beta_pi2"),
    (3.0 * FRAC_PI_4, "beta_3pi4"),
];

const FIGURE_STATES: [StateKind; 3] = [
    StateKind::CoherentProduct,
    StateKind::Superfluid,
    StateKind::MottInsulator,
];

fn figure_state(kind: StateKind) -> AtomState {
    AtomState::new(kind, FIGURE_ATOMS, FIGURE_ATOMS).expect("unit filling is valid for every state")
}

fn scan(
    kind: StateKind,
    k: usize,
    pump: ModeSpec,
    probe_kind: ModeKind,
    beta: f64,
    grid: &[f64],
) -> Result<Vec<ObservableRow>> {
    let lattice = LatticeSpec::new(FIGURE_ATOMS as usize, k)?;
    angular_scan(
        &pump,
        &ModeSpec::new(probe_kind, 0.0),
        &lattice,
        &figure_state(kind),
        &ScatterModel::unit(),
        beta,
        grid,
    )
}

/// Assembles named per-angle columns into a table.
fn columns_table(grid: &[f64], columns: Vec<(String, Vec<f64>)>) -> Table {
    let mut table = Table::new(
        std::iter::once("theta1_rad".to_string()).chain(columns.iter().map(|(n, _)| n.clone())),
    );
    for (i, &theta) in grid.iter().enumerate() {
        let mut row = vec![Value::Real(theta)];
        row.extend(columns.iter().map(|(_, c)| Value::Real(c[i])));
        table.push(row);
    }
    table
}

fn pick(rows: &[ObservableRow], f: impl Fn(&ObservableRow) -> f64) -> Vec<f64> {
    rows.iter().map(f).collect()
}

/// Builds the table for `preset`; the cavity table ignores `grid`.
pub fn run_preset(preset: Preset, grid: &GridSpec) -> Result<Table> {
    let points = grid.points();
    let k_all = FIGURE_ATOMS as usize;
    match preset {
        Preset::Fig2 => {
            let pump = ModeSpec::traveling(0.0);
            let t = ModeKind::Traveling;
            let coh = scan(StateKind::CoherentProduct, k_all, pump, t, 0.0, &points)?;
            let sf = scan(StateKind::Superfluid, k_all, pump, t, 0.0, &points)?;
            let mi = scan(StateKind::MottInsulator, k_all, pump, t, 0.0, &points)?;
            let sf_half = scan(StateKind::Superfluid, k_all / 2, pump, t, 0.0, &points)?;
            let inc_coh =
                incoherent_intensity(&figure_state(StateKind::CoherentProduct), k_all, t, t)?;
            let inc_mi = incoherent_intensity(&figure_state(StateKind::MottInsulator), k_all, t, t)?;
            Ok(columns_table(
                &points,
                vec![
                    ("classical".into(), pick(&mi, |r| r.amp.norm_sqr())),
                    ("incoherent_coh".into(), vec![inc_coh; points.len()]),
                    ("incoherent_mi".into(), vec![inc_mi; points.len()]),
                    ("noise_coh".into(), pick(&coh, |r| r.noise_r)),
                    ("noise_sf".into(), pick(&sf, |r| r.noise_r)),
                    ("noise_mi".into(), pick(&mi, |r| r.noise_r)),
                    ("noise_sf_k15".into(), pick(&sf_half, |r| r.noise_r)),
                ],
            ))
        }
        Preset::Fig3a | Preset::Fig3b | Preset::Fig3c => {
            let pump = match preset {
                Preset::Fig3a => ModeSpec::traveling(0.1 * PI),
                Preset::Fig3b => ModeSpec::traveling(0.0),
                _ => ModeSpec::standing(0.1 * PI),
            };
            let s = ModeKind::Standing;
            let coh = scan(StateKind::CoherentProduct, k_all, pump, s, 0.0, &points)?;
            let sf = scan(StateKind::Superfluid, k_all, pump, s, 0.0, &points)?;
            let mi = scan(StateKind::MottInsulator, k_all, pump, s, 0.0, &points)?;
            Ok(columns_table(
                &points,
                vec![
                    ("classical".into(), pick(&mi, |r| r.amp.norm_sqr())),
                    ("noise_coh".into(), pick(&coh, |r| r.noise_r)),
                    ("noise_sf".into(), pick(&sf, |r| r.noise_r)),
                    ("noise_mi".into(), pick(&mi, |r| r.noise_r)),
                ],
            ))
        }
        Preset::Fig4 => {
            let pump = ModeSpec::traveling(0.0);
            let t = ModeKind::Traveling;
            let mut columns = Vec::new();
            for kind in FIGURE_STATES {
                for (beta, label) in FIG4_BETAS {
                    let rows = scan(kind, k_all, pump, t, beta, &points)?;
                    if columns.is_empty() {
                        columns.push(("quad_classical".to_string(), pick(&rows, |r| r.quad_mean)));
                    }
                    columns.push((
                        format!("quad_var_{}_{label}", kind.short_name()),
                        pick(&rows, |r| r.quad_var),
                    ));
                }
            }
            Ok(columns_table(&points, columns))
        }
        Preset::Fig5 => {
            let pump = ModeSpec::traveling(0.0);
            let t = ModeKind::Traveling;
            let mut columns = Vec::new();
            for kind in FIGURE_STATES {
                let rows = scan(kind, k_all, pump, t, 0.0, &points)?;
                if columns.is_empty() {
                    let inc_coh = incoherent_intensity(
                        &figure_state(StateKind::CoherentProduct),
                        k_all,
                        t,
                        t,
                    )?;
                    let inc_mi =
                        incoherent_intensity(&figure_state(StateKind::MottInsulator), k_all, t, t)?;
                    columns.push(("classical".to_string(), pick(&rows, |r| r.amp.norm_sqr())));
                    columns.push(("incoherent_coh".to_string(), vec![inc_coh; points.len()]));
                    columns.push(("incoherent_mi".to_string(), vec![inc_mi; points.len()]));
                }
                columns.push((
                    format!("fourth_var_{}", kind.short_name()),
                    pick(&rows, |r| r.fourth_var),
                ));
            }
            Ok(columns_table(&points, columns))
        }
        Preset::Cavity => cavity_table(),
    }
}

/// Sizes used by the cavity table.
pub const CAVITY_SIZES: [u64; 2] = [4, 30];

fn cavity_table() -> Result<Table> {
    let mut table = Table::new([
        "state",
        "N",
        "M",
        "K",
        "amp_re",
        "amp_im",
        "intensity",
        "fourth_var",
        "selforg_intensity",
    ]);
    for n in CAVITY_SIZES {
        for kind in [StateKind::MottInsulator, StateKind::Superfluid] {
            let state = AtomState::new(kind, n, n)?;
            let ex = cavity_example(&state, n as usize)?;
            table.push(vec![
                Value::Text(kind.short_name().to_string()),
                Value::Count(n),
                Value::Count(n),
                Value::Count(n),
                Value::Real(ex.amp.re),
                Value::Real(ex.amp.im),
                Value::Real(ex.intensity),
                Value::Real(ex.fourth_var),
                Value::Real(ex.selforg_intensity),
            ]);
        }
    }
    Ok(table)
}
