//! Statistics of off-resonant light scattered from ultracold bosons in a 1D
//! optical lattice.
//!
//! The scattered mode is proportional to `D = sum_i A_i n_i`, a geometry
//! weighted sum of on-site atom numbers. [`geometry`] builds the coefficients
//! `A_i`, [`states`] provides occupation moments of Mott-insulator, superfluid
//! and coherent states, and [`observables`] combines the two into intensities,
//! noise, quadratures and photon statistics. [`oracle`] computes the same
//! quantities by exhaustive enumeration of the Fock basis.

pub mod error;
pub mod geometry;
pub mod observables;
pub mod oracle;
pub mod states;

pub use error::{Error, Result};
pub use geometry::{
    closed_form_traveling_sum, coefficients, mode_function, quadrature_coefficients,
    GeometryCoefficients, LatticeSpec, ModeKind, ModeSpec,
};
pub use num_complex::Complex64;
pub use observables::{
    angular_scan, cavity_example, dispersion_shift_stats, expected_amplitude, fourth_moment,
    fourth_moment_traveling, incoherent_intensity, intensity, light_quadrature_variance,
    noise_r, photon_number_variance, quadrature_stats, CavityExample, ObservableRow,
    ScatterModel,
};
pub use oracle::{
    enumerate, oracle_d_moments, oracle_raw_moment, DMoments, OccupationDistribution,
};
pub use states::{
    falling_factorial_moment, moment_set, n_k_statistics, raw_moment, AtomState, MomentSet,
    StateKind,
};
