//! Shared fixtures for the criterion benchmarks in `benches/`.

use std::f64::consts::PI;

use latticeglow::{AtomState, LatticeSpec, ModeSpec, StateKind};

/// Unit filling with every site illuminated.
pub fn full_lattice(kind: StateKind, sites: u64) -> (AtomState, LatticeSpec) {
    let state = AtomState::new(kind, sites, sites).expect("unit filling is valid");
    let lattice = LatticeSpec::new(sites as usize, sites as usize).expect("K = M is valid");
    (state, lattice)
}

/// `count` probe angles spanning `[-pi, pi]`.
pub fn angle_grid(count: usize) -> Vec<f64> {
    let last = (count.max(2) - 1) as f64;
    (0..count).map(|i| -PI + 2.0 * PI * i as f64 / last).collect()
}

/// Traveling pump at `theta0` with a probe of the given kind.
pub fn modes(theta0: f64, standing_probe: bool) -> (ModeSpec, ModeSpec) {
    let probe = if standing_probe {
        ModeSpec::standing(0.0)
    } else {
        ModeSpec::traveling(0.0)
    };
    (ModeSpec::traveling(theta0), probe)
}
