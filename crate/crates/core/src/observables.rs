//! Light observables built from the geometric coefficients and the occupation
//! moments: amplitude, intensity, the noise quantity `R`, homodyne quadratures,
//! the fourth moment `<D*^2 D^2>` and derived photon-number statistics.
//!
//! The scattered field is `a1 = C D` with `D = sum_i A_i n_i`. Apart from the
//! helpers that take a [`ScatterModel`], everything here is expressed in units
//! of `D` (i.e. `|C| = 1`).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{
    coefficients, diffraction_ratio, mode_function, quadrature_coefficients, GeometryCoefficients,
    LatticeSpec, ModeKind, ModeSpec,
};
use crate::oracle::{self, OccupationDistribution};
use crate::states::{moment_set, AtomState, MomentSet};

/// Negative variances closer to zero than this are rounding noise.
pub const VARIANCE_CLAMP: f64 = 1e-9;

/// Parameters of the stationary field `a1 = C D` with
/// `C = -i g0^2 a0 / (delta_0a (kappa - i delta_01))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterModel {
    pub g0: f64,
    pub a0: Complex64,
    pub delta_0a: f64,
    pub kappa: f64,
    pub delta_01: f64,
}

impl ScatterModel {
    pub fn new(g0: f64, a0: Complex64, delta_0a: f64, kappa: f64, delta_01: f64) -> Result<Self> {
        let model = Self {
            g0,
            a0,
            delta_0a,
            kappa,
            delta_01,
        };
        model.validate()?;
        Ok(model)
    }

    /// A model with `|C| = 1`, i.e. observables in units of `D`.
    pub fn unit() -> Self {
        Self {
            g0: 1.0,
            a0: Complex64::new(1.0, 0.0),
            delta_0a: 1.0,
            kappa: 1.0,
            delta_01: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kappa.is_nan() || self.kappa <= 0.0 {
            return Err(Error::InvalidModel(format!("kappa must be > 0, got {}", self.kappa)));
        }
        if self.delta_0a == 0.0 || !self.delta_0a.is_finite() {
            return Err(Error::InvalidModel(format!(
                "delta_0a must be finite and nonzero, got {}",
                self.delta_0a
            )));
        }
        Ok(())
    }

    /// The coupling constant `C`.
    pub fn coupling(&self) -> Complex64 {
        let den = self.delta_0a * Complex64::new(self.kappa, -self.delta_01);
        Complex64::new(0.0, -self.g0 * self.g0) * self.a0 / den
    }

    /// `|C|^2 = g0^4 |a0|^2 / (delta_0a^2 (kappa^2 + delta_01^2))`
    pub fn coupling_sq(&self) -> f64 {
        self.g0.powi(4) * self.a0.norm_sqr()
            / (self.delta_0a * self.delta_0a * (self.kappa * self.kappa + self.delta_01 * self.delta_01))
    }
}

impl Default for ScatterModel {
    fn default() -> Self {
        Self::unit()
    }
}

/// `<D> = n A`
pub fn expected_amplitude(coeffs: &GeometryCoefficients, moments: &MomentSet) -> Complex64 {
    coeffs.sum_a * moments.m1
}

/// `<D* D> = <n_a n_b> |A|^2 + (<n^2> - <n_a n_b>) sum |A_i|^2`
pub fn intensity(coeffs: &GeometryCoefficients, moments: &MomentSet) -> f64 {
    let pair = moments.pair();
    pair * coeffs.sum_a.norm_sqr() + (moments.m2 - pair) * coeffs.sum_abs2
}

/// `R = <D* D> - |<D>|^2`, evaluated from the fluctuation correlators so that
/// the classical part never has to be subtracted.
pub fn noise_r(coeffs: &GeometryCoefficients, moments: &MomentSet) -> f64 {
    let cov = moments.pair_covariance();
    cov * coeffs.sum_a.norm_sqr() + (moments.onsite_variance() - cov) * coeffs.sum_abs2
}

/// `R` for two traveling waves, in terms of `alpha_- ` only.
pub fn noise_r_traveling(alpha_minus: f64, k: usize, moments: &MomentSet) -> f64 {
    let cov = moments.pair_covariance();
    let s = diffraction_ratio(alpha_minus, k);
    cov * s * s + (moments.onsite_variance() - cov) * k as f64
}

/// Phase-averaging factor for spatially incoherent light.
pub fn incoherent_factor(pump: ModeKind, probe: ModeKind) -> f64 {
    match (pump, probe) {
        (ModeKind::Traveling, ModeKind::Traveling) => 1.0,
        (ModeKind::Standing, ModeKind::Standing) => 0.25,
        _ => 0.5,
    }
}

/// `<D* D>` averaged over random mode phases, `p0 K <n^2>`.
pub fn incoherent_intensity(
    state: &AtomState,
    k: usize,
    pump: ModeKind,
    probe: ModeKind,
) -> Result<f64> {
    if k == 0 || k as u64 > state.sites() {
        return Err(Error::InvalidLattice(format!(
            "K must lie in 1..={}, got {k}",
            state.sites()
        )));
    }
    let m2 = moment_set(state)?.m2;
    Ok(incoherent_factor(pump, probe) * k as f64 * m2)
}

/// Mean and variance of a Hermitian combination `sum_i w_i n_i`.
fn real_weighted_stats(weights: &[f64], moments: &MomentSet) -> (f64, f64) {
    let total: f64 = weights.iter().sum();
    let squares: f64 = weights.iter().map(|w| w * w).sum();
    let cov = moments.pair_covariance();
    let mean = moments.m1 * total;
    let var = cov * total * total + (moments.onsite_variance() - cov) * squares;
    (mean, var)
}

/// Mean and variance of the quadrature `X_beta^D`.
pub fn quadrature_stats(coeffs: &GeometryCoefficients, beta: f64, moments: &MomentSet) -> (f64, f64) {
    let (proj, _) = quadrature_coefficients(coeffs, beta);
    real_weighted_stats(&proj, moments)
}

/// Quadrature variance of the scattered field, `1/4 + |C|^2 var(X^D)`.
pub fn light_quadrature_variance(model: &ScatterModel, dvar: f64) -> f64 {
    0.25 + model.coupling_sq() * dvar
}

/// `<D*^2 D^2>` for site-symmetric states. Needs all four-site moments,
/// i.e. `M >= 4`.
pub fn fourth_moment(coeffs: &GeometryCoefficients, moments: &MomentSet) -> Result<f64> {
    let (m31, m22, m211, m1111) = moments.fourth_order()?;
    let m4 = moments.m4;

    let s = coeffs.sum_a;
    let s_abs2 = s.norm_sqr();
    let s_conj = s.conj();
    let classical = s_abs2 * s_abs2;
    let cubic = 2.0 * (coeffs.sum_abs2_a * s_conj).re;
    let doubled = 2.0 * (coeffs.sum_sq * s_conj * s_conj).re;
    let onsite_sq = coeffs.sum_abs2 * coeffs.sum_abs2;
    let doubled_sq = coeffs.sum_sq.norm_sqr();
    let mixed = s_abs2 * coeffs.sum_abs2;

    let pairs = m1111 - 2.0 * m211 + m22;
    let value = classical * m1111
        + 2.0 * cubic * (2.0 * m1111 - 3.0 * m211 + m31)
        + doubled * (m211 - m1111)
        + 2.0 * onsite_sq * pairs
        + doubled_sq * pairs
        + 4.0 * mixed * (m211 - m1111)
        + coeffs.sum_abs4 * (-6.0 * m1111 + 12.0 * m211 - 4.0 * m31 - 3.0 * m22 + m4);
    Ok(value)
}

/// `<D*^2 D^2>` for two traveling waves as a function of `alpha_-`.
pub fn fourth_moment_traveling(alpha_minus: f64, k: usize, moments: &MomentSet) -> Result<f64> {
    let (m31, m22, m211, m1111) = moments.fourth_order()?;
    let kf = k as f64;
    let s = diffraction_ratio(alpha_minus, k);
    // sin(K a) / sin(a); S^3 cos(K a/2) / cos(a/2) = S^2 T.
    let t = diffraction_ratio(2.0 * alpha_minus, k);
    let s2 = s * s;
    let pairs = m1111 - 2.0 * m211 + m22;
    Ok(s2 * s2 * m1111 + 2.0 * s2 * t * (m211 - m1111)
        - 4.0 * s2 * ((kf - 2.0) * m1111 - (kf - 3.0) * m211 - m31)
        + t * t * pairs
        + 2.0 * kf * kf * pairs
        + kf * (-6.0 * m1111 + 12.0 * m211 - 4.0 * m31 - 3.0 * m22 + moments.m4))
}

/// `(Delta n_ph)^2 = |C|^4 (<D*^2 D^2> - <D* D>^2) + |C|^2 <D* D>`
pub fn photon_number_variance(model: &ScatterModel, fourth: f64, intensity: f64) -> f64 {
    let c2 = model.coupling_sq();
    c2 * c2 * (fourth - intensity * intensity) + c2 * intensity
}

/// `<D*^2 D^2> - <D* D>^2` with rounding-level negatives clamped to zero.
pub fn intensity_variance(fourth: f64, intensity: f64) -> f64 {
    let raw = fourth - intensity * intensity;
    if raw < 0.0 && raw > -VARIANCE_CLAMP {
        log::debug!("clamping intensity variance {raw:e} to zero");
        0.0
    } else {
        raw
    }
}

/// Fourth moment from the closed form, or from exact enumeration of `state`
/// when the lattice is too small for the four-site correlator.
fn fourth_with_fallback(
    coeffs: &GeometryCoefficients,
    moments: &MomentSet,
    dist: Option<&OccupationDistribution>,
) -> Result<f64> {
    match dist {
        Some(dist) if moments.m1111.is_none() => {
            Ok(oracle::oracle_d_moments(dist, coeffs, 0.0)?.fourth)
        }
        _ => fourth_moment(coeffs, moments),
    }
}

fn small_lattice_distribution(
    state: &AtomState,
    moments: &MomentSet,
) -> Result<Option<OccupationDistribution>> {
    if moments.m1111.is_some() {
        Ok(None)
    } else {
        oracle::enumerate(state, oracle::DEFAULT_CUTOFF).map(Some)
    }
}

/// Transversally pumped cavity along the lattice axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityExample {
    pub amp: Complex64,
    pub intensity: f64,
    pub fourth_var: f64,
    /// Intensity after self-organisation into a period-doubled Mott state,
    /// where `D = N_K`.
    pub selforg_intensity: f64,
}

/// Pump orthogonal to the lattice, cavity mode along it, `d = lambda / 2`:
/// `A_m = (-1)^m` on the first `k` sites.
pub fn cavity_geometry(sites: usize, k: usize) -> Result<GeometryCoefficients> {
    let lattice = LatticeSpec::new(sites, k)?;
    coefficients(
        &ModeSpec::traveling(0.0),
        &ModeSpec::traveling(std::f64::consts::FRAC_PI_2),
        &lattice,
    )
}

pub fn cavity_example(state: &AtomState, k: usize) -> Result<CavityExample> {
    if k % 2 == 1 {
        return Err(Error::OddWindow(k));
    }
    let coeffs = cavity_geometry(state.sites() as usize, k)?;
    let moments = moment_set(state)?;
    let dist = small_lattice_distribution(state, &moments)?;
    let amp = expected_amplitude(&coeffs, &moments);
    let intensity = intensity(&coeffs, &moments);
    let fourth = fourth_with_fallback(&coeffs, &moments, dist.as_ref())?;
    let n_k = moments.m1 * k as f64;
    Ok(CavityExample {
        amp,
        intensity,
        fourth_var: intensity_variance(fourth, intensity),
        selforg_intensity: n_k * n_k,
    })
}

/// Mean and variance of the dispersion-shift operator
/// `sum_i |u_probe(x_i)|^2 n_i` over the illuminated window.
pub fn dispersion_shift_stats(
    state: &AtomState,
    probe: &ModeSpec,
    lattice: &LatticeSpec,
) -> Result<(f64, f64)> {
    probe.validate()?;
    lattice.validate()?;
    if lattice.sites as u64 != state.sites() {
        return Err(Error::InvalidLattice(format!(
            "lattice has M = {} but the state has M = {}",
            lattice.sites,
            state.sites()
        )));
    }
    let weights = dispersion_weights(probe, lattice);
    let moments = moment_set(state)?;
    Ok(real_weighted_stats(&weights, &moments))
}

/// `|u_probe(x_i)|^2` over the window.
pub fn dispersion_weights(probe: &ModeSpec, lattice: &LatticeSpec) -> Vec<f64> {
    lattice
        .window()
        .map(|m| mode_function(probe, m).norm_sqr())
        .collect()
}

/// All observables at one scattering angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableRow {
    pub theta1: f64,
    pub amp: Complex64,
    pub intensity: f64,
    pub noise_r: f64,
    pub quad_mean: f64,
    pub quad_var: f64,
    pub fourth: f64,
    /// `<D*^2 D^2> - <D* D>^2`
    pub fourth_var: f64,
    /// Photon-number variance in photon units of the scan's model.
    pub photon_var: f64,
}

/// Evaluates every observable for each probe angle in `grid`; the probe's own
/// `theta` is replaced by the grid value. Rows come back in grid order.
#[allow(clippy::too_many_arguments)]
pub fn angular_scan(
    pump: &ModeSpec,
    probe: &ModeSpec,
    lattice: &LatticeSpec,
    state: &AtomState,
    model: &ScatterModel,
    beta: f64,
    grid: &[f64],
) -> Result<Vec<ObservableRow>> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    pump.validate()?;
    probe.validate()?;
    lattice.validate()?;
    model.validate()?;
    if lattice.sites as u64 != state.sites() {
        return Err(Error::InvalidLattice(format!(
            "lattice has M = {} but the state has M = {}",
            lattice.sites,
            state.sites()
        )));
    }
    let moments = moment_set(state)?;
    let dist = small_lattice_distribution(state, &moments)?;

    grid.par_iter()
        .map(|&theta1| {
            scan_point(pump, &probe.with_theta(theta1), lattice, &moments, dist.as_ref(), model, beta)
                .map_err(|e| Error::AtAngle {
                    theta1,
                    source: Box::new(e),
                })
        })
        .collect()
}

fn scan_point(
    pump: &ModeSpec,
    probe: &ModeSpec,
    lattice: &LatticeSpec,
    moments: &MomentSet,
    dist: Option<&OccupationDistribution>,
    model: &ScatterModel,
    beta: f64,
) -> Result<ObservableRow> {
    let coeffs = coefficients(pump, probe, lattice)?;
    let intensity = intensity(&coeffs, moments);
    let (quad_mean, quad_var) = quadrature_stats(&coeffs, beta, moments);
    let fourth = fourth_with_fallback(&coeffs, moments, dist)?;
    Ok(ObservableRow {
        theta1: probe.theta,
        amp: expected_amplitude(&coeffs, moments),
        intensity,
        noise_r: noise_r(&coeffs, moments),
        quad_mean,
        quad_var,
        fourth,
        fourth_var: intensity_variance(fourth, intensity),
        photon_var: photon_number_variance(model, fourth, intensity),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{enumerate, oracle_d_moments, DEFAULT_CUTOFF};
    use std::f64::consts::FRAC_PI_2;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    fn maximum(k: usize, m: usize) -> GeometryCoefficients {
        coefficients(
            &ModeSpec::traveling(0.0),
            &ModeSpec::traveling(0.0),
            &LatticeSpec::new(m, k).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn amplitude_and_intensity_at_maximum() {
        let coeffs = maximum(30, 30);
        let mi = moment_set(&AtomState::mott(30, 30).unwrap()).unwrap();
        assert!((expected_amplitude(&coeffs, &mi) - Complex64::new(30.0, 0.0)).norm() < 1e-12);
        assert!(close(intensity(&coeffs, &mi), 900.0, 1e-12));
        let sf = moment_set(&AtomState::superfluid(30, 30).unwrap()).unwrap();
        assert!(noise_r(&coeffs, &sf).abs() < 1e-10);
    }

    #[test]
    fn amplitude_off_maximum_matches_direct_sum() {
        let pump = ModeSpec::traveling(0.0);
        let probe = ModeSpec::traveling(0.3);
        let lattice = LatticeSpec::new(30, 30).unwrap();
        let coeffs = coefficients(&pump, &probe, &lattice).unwrap();
        let direct: Complex64 = (1..=30)
            .map(|m| mode_function(&probe, m).conj() * mode_function(&pump, m))
            .sum();
        let moments = moment_set(&AtomState::mott(30, 30).unwrap()).unwrap();
        assert!((expected_amplitude(&coeffs, &moments) - direct).norm() < 1e-12);
    }

    #[test]
    fn single_site_intensity_is_m2() {
        let coeffs = GeometryCoefficients::from_real_weights(1, &[1.0]);
        let moments = moment_set(&AtomState::coherent(3, 3).unwrap()).unwrap();
        assert!(close(intensity(&coeffs, &moments), 2.0, 1e-14));
    }

    #[test]
    fn traveling_noise_matches_table() {
        let coh = moment_set(&AtomState::coherent(30, 30).unwrap()).unwrap();
        let mi = moment_set(&AtomState::mott(30, 30).unwrap()).unwrap();
        let sf = moment_set(&AtomState::superfluid(30, 30).unwrap()).unwrap();
        for i in 0..40 {
            let alpha = -3.0 + 0.17 * i as f64;
            assert!(close(noise_r_traveling(alpha, 30, &coh), 30.0, 1e-12));
            assert!(noise_r_traveling(alpha, 30, &mi).abs() < 1e-12);
            let s = diffraction_ratio(alpha, 30);
            let expected = -(30.0 / 900.0) * s * s + 30.0;
            assert!(close(noise_r_traveling(alpha, 30, &sf), expected, 1e-12));
        }
    }

    #[test]
    fn incoherent_examples() {
        let t = ModeKind::Traveling;
        let s = ModeKind::Standing;
        let mi = AtomState::mott(30, 30).unwrap();
        let coh = AtomState::coherent(30, 30).unwrap();
        assert_eq!(incoherent_intensity(&mi, 30, t, t).unwrap(), 30.0);
        assert!(close(incoherent_intensity(&coh, 30, t, t).unwrap(), 60.0, 1e-14));
        assert_eq!(incoherent_factor(t, s), 0.5);
        assert_eq!(incoherent_factor(s, t), 0.5);
        let sf = AtomState::superfluid(30, 30).unwrap();
        let tt = incoherent_intensity(&sf, 12, t, t).unwrap();
        let ss = incoherent_intensity(&sf, 12, s, s).unwrap();
        assert!(close(ss, tt / 4.0, 1e-15));
        assert!(incoherent_intensity(&sf, 31, t, t).is_err());
    }

    #[test]
    fn quadrature_examples() {
        let coeffs = GeometryCoefficients::from_real_weights(1, &[1.0, -1.0, 0.5]);
        let mi = moment_set(&AtomState::mott(3, 3).unwrap()).unwrap();
        assert!(quadrature_stats(&coeffs, 0.7, &mi).1.abs() < 1e-14);
        let coh = moment_set(&AtomState::coherent(3, 3).unwrap()).unwrap();
        let (mean, var) = quadrature_stats(&coeffs, FRAC_PI_2, &coh);
        assert!(mean.abs() < 1e-15 && var.abs() < 1e-15);
        // With real coefficients and beta = 0 the quadrature is the field itself.
        let (mean, var) = quadrature_stats(&coeffs, 0.0, &coh);
        assert!(close(mean, expected_amplitude(&coeffs, &coh).re, 1e-14));
        assert!(close(var, noise_r(&coeffs, &coh), 1e-14));
    }

    #[test]
    fn light_quadrature_examples() {
        let unit = ScatterModel::unit();
        assert_eq!(unit.coupling_sq(), 1.0);
        assert!((unit.coupling().norm() - 1.0).abs() < 1e-15);
        assert_eq!(light_quadrature_variance(&unit, 0.0), 0.25);
        assert_eq!(light_quadrature_variance(&unit, 7.5), 7.75);
        let dark = ScatterModel { g0: 0.0, ..unit };
        assert_eq!(light_quadrature_variance(&dark, 123.0), 0.25);
    }

    #[test]
    fn model_validation() {
        let unit = ScatterModel::unit();
        assert!(ScatterModel { kappa: 0.0, ..unit }.validate().is_err());
        assert!(ScatterModel { delta_0a: 0.0, ..unit }.validate().is_err());
        let model = ScatterModel::new(2.0, Complex64::new(0.0, 3.0), 4.0, 1.0, 2.0).unwrap();
        assert!(close(model.coupling().norm_sqr(), model.coupling_sq(), 1e-15));
        assert!(close(model.coupling_sq(), 16.0 * 9.0 / (16.0 * 5.0), 1e-15));
    }

    #[test]
    fn coherent_fourth_at_maximum() {
        let state = AtomState::coherent(4, 4).unwrap();
        let coeffs = maximum(4, 4);
        let moments = moment_set(&state).unwrap();
        let closed = fourth_moment(&coeffs, &moments).unwrap();
        assert!(close(closed, 756.0, 1e-12), "{closed}");
        let dist = enumerate(&state, DEFAULT_CUTOFF).unwrap();
        let oracle = oracle_d_moments(&dist, &coeffs, 0.0).unwrap().fourth;
        assert!(close(closed, oracle, 1e-9), "{closed} vs {oracle}");
    }

    #[test]
    fn traveling_fourth_matches_general_form() {
        let moments = moment_set(&AtomState::superfluid(12, 12).unwrap()).unwrap();
        let lattice = LatticeSpec::new(12, 9).unwrap();
        let pump = ModeSpec::traveling(0.2);
        for i in 0..64 {
            let probe = ModeSpec::traveling(-3.1 + 0.097 * i as f64);
            let coeffs = coefficients(&pump, &probe, &lattice).unwrap();
            let general = fourth_moment(&coeffs, &moments).unwrap();
            let reduced = fourth_moment_traveling(coeffs.alpha_minus, 9, &moments).unwrap();
            assert!(close(general, reduced, 1e-10), "{general} vs {reduced}");
        }
    }

    #[test]
    fn mott_fourth_variance_vanishes() {
        let moments = moment_set(&AtomState::mott(10, 5).unwrap()).unwrap();
        let lattice = LatticeSpec::new(5, 4).unwrap();
        for (pump, probe) in [
            (ModeSpec::traveling(0.1), ModeSpec::standing(0.9)),
            (ModeSpec::standing(0.3), ModeSpec::standing(-1.2)),
        ] {
            let coeffs = coefficients(&pump, &probe, &lattice).unwrap();
            let i = intensity(&coeffs, &moments);
            let f = fourth_moment(&coeffs, &moments).unwrap();
            assert!(intensity_variance(f, i).abs() < 1e-9 * i * i);
        }
    }

    #[test]
    fn fourth_needs_four_sites() {
        let moments = moment_set(&AtomState::superfluid(3, 3).unwrap()).unwrap();
        let coeffs = GeometryCoefficients::from_real_weights(1, &[1.0, 1.0]);
        assert!(matches!(
            fourth_moment(&coeffs, &moments),
            Err(Error::MissingMoment { .. })
        ));
    }

    #[test]
    fn clamp_only_touches_rounding_noise() {
        assert_eq!(intensity_variance(4.0 - 1e-12, 2.0), 0.0);
        assert!(intensity_variance(3.0, 2.0) < 0.0);
        assert_eq!(intensity_variance(5.0, 2.0), 1.0);
    }

    #[test]
    fn photon_variance_examples() {
        let unit = ScatterModel::unit();
        assert_eq!(photon_number_variance(&unit, 0.0, 0.0), 0.0);
        assert_eq!(photon_number_variance(&unit, 10.0, 3.0), 4.0);
        let dark = ScatterModel { g0: 0.0, ..unit };
        assert_eq!(photon_number_variance(&dark, 10.0, 3.0), 0.0);
    }

    #[test]
    fn cavity_mott() {
        for (n, k) in [(4, 4), (30, 30), (30, 12)] {
            let ex = cavity_example(&AtomState::mott(n, n).unwrap(), k).unwrap();
            assert!(ex.amp.norm() < 1e-12);
            assert!(ex.intensity.abs() < 1e-12);
            assert!(ex.fourth_var.abs() < 1e-12);
            assert_eq!(ex.selforg_intensity, (k * k) as f64);
        }
        assert_eq!(
            cavity_example(&AtomState::mott(4, 4).unwrap(), 3),
            Err(Error::OddWindow(3))
        );
    }

    #[test]
    fn cavity_superfluid() {
        let state = AtomState::superfluid(4, 4).unwrap();
        let ex = cavity_example(&state, 4).unwrap();
        assert!(ex.amp.norm() < 1e-12);
        assert!((ex.intensity - 4.0).abs() < 1e-12);
        let dist = enumerate(&state, DEFAULT_CUTOFF).unwrap();
        let d = oracle_d_moments(&dist, &cavity_geometry(4, 4).unwrap(), 0.0).unwrap();
        assert!((ex.fourth_var - (d.fourth - d.intensity * d.intensity)).abs() < 1e-12);
        // Leading order 2 N_K^2 = 32, corrections O(1/N_K).
        assert!((ex.fourth_var - 32.0).abs() / 32.0 < 0.5, "{}", ex.fourth_var);
    }

    #[test]
    fn cavity_small_lattice_uses_enumeration() {
        let ex = cavity_example(&AtomState::superfluid(2, 2).unwrap(), 2).unwrap();
        assert!((ex.intensity - 2.0).abs() < 1e-12);
        assert!(ex.fourth_var >= 0.0);
    }

    #[test]
    fn dispersion_shift_examples() {
        let probe = ModeSpec::traveling(0.4);
        let lattice = LatticeSpec::new(30, 15).unwrap();
        let (mean, var) =
            dispersion_shift_stats(&AtomState::mott(30, 30).unwrap(), &probe, &lattice).unwrap();
        assert!(close(mean, 15.0, 1e-14) && var.abs() < 1e-12);
        let (_, var) =
            dispersion_shift_stats(&AtomState::coherent(30, 30).unwrap(), &probe, &lattice).unwrap();
        assert!(close(var, 15.0, 1e-12));

        let state = AtomState::superfluid(4, 4).unwrap();
        let standing = ModeSpec::standing(0.7);
        let lattice = LatticeSpec::new(4, 4).unwrap();
        let (mean, var) = dispersion_shift_stats(&state, &standing, &lattice).unwrap();
        let w = dispersion_weights(&standing, &lattice);
        let dist = enumerate(&state, DEFAULT_CUTOFF).unwrap();
        let value = |q: &[u32]| w.iter().zip(q).map(|(w, &n)| w * n as f64).sum::<f64>();
        let om = dist.expectation(value);
        let ov = dist.expectation(|q| (value(q) - om).powi(2));
        assert!(close(mean, om, 1e-12) && close(var, ov, 1e-12), "{var} vs {ov}");
    }

    #[test]
    fn scan_columns() {
        let lattice = LatticeSpec::new(30, 30).unwrap();
        let pump = ModeSpec::traveling(0.0);
        let probe = ModeSpec::traveling(0.0);
        let grid: Vec<f64> = (0..50).map(|i| -3.0 + 0.12 * i as f64).collect();
        let unit = ScatterModel::unit();
        let coh = AtomState::coherent(30, 30).unwrap();
        for row in angular_scan(&pump, &probe, &lattice, &coh, &unit, 0.0, &grid).unwrap() {
            assert!(close(row.noise_r, 30.0, 1e-10));
            assert!(close(row.noise_r, row.intensity - row.amp.norm_sqr(), 1e-10));
        }
        let mi = AtomState::mott(30, 30).unwrap();
        for row in angular_scan(&pump, &probe, &lattice, &mi, &unit, 0.0, &grid).unwrap() {
            assert!(row.noise_r.abs() < 1e-12);
        }
        let single = angular_scan(&pump, &probe, &lattice, &mi, &unit, 0.0, &[0.5]).unwrap();
        let coeffs = coefficients(&pump, &probe.with_theta(0.5), &lattice).unwrap();
        let moments = moment_set(&mi).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].intensity, intensity(&coeffs, &moments));
        assert!(matches!(
            angular_scan(&pump, &probe, &lattice, &mi, &unit, 0.0, &[]),
            Err(Error::EmptyGrid)
        ));
        let wrong = LatticeSpec::new(20, 10).unwrap();
        assert!(angular_scan(&pump, &probe, &wrong, &mi, &unit, 0.0, &[0.0]).is_err());
    }
}
