//! Mode functions of the pump and probe beams and the per-site geometric
//! coefficients `A_i = u1*(x_i) u0(x_i)` that weight the atom-number operators
//! in the scattered-field operator `D = sum_i A_i n_i`.
//!
//! Site `m` of the lattice sits at `x_m = m d`. Every mode is a plane wave
//! characterised by its angle to the lattice normal and its ratio `d / lambda`,
//! so that `k_x d = 2 pi (d / lambda) sin(theta)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this value of `|sin(alpha / 2)|` the Dirichlet-kernel ratio is
/// replaced by its exact limit.
pub const SINGULARITY_GUARD: f64 = 1e-9;

/// Default lattice-period-to-wavelength ratio, `d = lambda / 2`.
pub const DEFAULT_WAVELENGTH_RATIO: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeKind {
    Traveling,
    Standing,
}

impl std::fmt::Display for ModeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModeKind::Traveling => f.write_str("traveling"),
            ModeKind::Standing => f.write_str("standing"),
        }
    }
}

impl std::str::FromStr for ModeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "traveling" | "travelling" | "t" => Ok(ModeKind::Traveling),
            "standing" | "s" => Ok(ModeKind::Standing),
            other => Err(Error::InvalidMode(format!(
                "unknown mode kind {other:?} (expected traveling or standing)"
            ))),
        }
    }
}

/// One plane-wave optical mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub kind: ModeKind,
    /// Angle between the wave vector and the normal to the lattice axis (rad).
    #[serde(default)]
    pub theta: f64,
    /// `d / lambda` for this mode.
    #[serde(default = "default_wavelength_ratio")]
    pub wavelength_ratio: f64,
    /// Site-independent phase (rad).
    #[serde(default)]
    pub phase: f64,
}

fn default_wavelength_ratio() -> f64 {
    DEFAULT_WAVELENGTH_RATIO
}

impl ModeSpec {
    pub fn new(kind: ModeKind, theta: f64) -> Self {
        Self {
            kind,
            theta,
            wavelength_ratio: DEFAULT_WAVELENGTH_RATIO,
            phase: 0.0,
        }
    }

    pub fn traveling(theta: f64) -> Self {
        Self::new(ModeKind::Traveling, theta)
    }

    pub fn standing(theta: f64) -> Self {
        Self::new(ModeKind::Standing, theta)
    }

    pub fn with_wavelength_ratio(mut self, ratio: f64) -> Self {
        self.wavelength_ratio = ratio;
        self
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength_ratio > 0.0 && self.wavelength_ratio.is_finite()) {
            return Err(Error::InvalidMode(format!(
                "wavelength_ratio must be finite and > 0, got {}",
                self.wavelength_ratio
            )));
        }
        if !self.theta.is_finite() {
            return Err(Error::InvalidMode(format!("theta must be finite, got {}", self.theta)));
        }
        if !self.phase.is_finite() {
            return Err(Error::InvalidMode(format!("phase must be finite, got {}", self.phase)));
        }
        Ok(())
    }

    /// Projection of the wave vector on the lattice axis times the period.
    pub fn kx_d(&self) -> f64 {
        TAU * self.wavelength_ratio * self.theta.sin()
    }
}

/// The lattice of `sites` sites, of which the contiguous block
/// `offset ..= offset + illuminated - 1` is illuminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub sites: usize,
    pub illuminated: usize,
    pub offset: usize,
}

impl LatticeSpec {
    /// Window starting at the first site.
    pub fn new(sites: usize, illuminated: usize) -> Result<Self> {
        Self::with_offset(sites, illuminated, 1)
    }

    pub fn with_offset(sites: usize, illuminated: usize, offset: usize) -> Result<Self> {
        let lattice = Self {
            sites,
            illuminated,
            offset,
        };
        lattice.validate()?;
        Ok(lattice)
    }

    /// Every violated constraint, in a fixed order.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.sites == 0 {
            out.push("M must be >= 1".to_string());
        }
        if self.illuminated == 0 {
            out.push("K must be >= 1".to_string());
        }
        if self.illuminated > self.sites {
            out.push(format!("K <= M violated (K = {}, M = {})", self.illuminated, self.sites));
        }
        if self.offset == 0 {
            out.push("offset must be >= 1".to_string());
        } else if self.offset + self.illuminated > self.sites + 1 {
            out.push(format!(
                "offset + K - 1 <= M violated (offset = {}, K = {}, M = {})",
                self.offset, self.illuminated, self.sites
            ));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidLattice(v.join("; ")))
        }
    }

    /// 1-based indices of the illuminated sites.
    pub fn window(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.illuminated
    }
}

/// Per-site coefficients `A_i` over the illuminated window and the aggregate
/// sums that enter the intensity, quadrature and fourth-moment formulas.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryCoefficients {
    /// `A_i` for the sites `offset .. offset + a.len()`.
    pub a: Vec<Complex64>,
    /// 1-based index of the site carrying `a[0]`.
    pub offset: usize,
    /// `sum A_i`
    pub sum_a: Complex64,
    /// `sum |A_i|^2`
    pub sum_abs2: f64,
    /// `sum A_i^2`
    pub sum_sq: Complex64,
    /// `sum |A_i|^2 A_i`
    pub sum_abs2_a: Complex64,
    /// `sum |A_i|^4`
    pub sum_abs4: f64,
    /// `k0x d - k1x d`
    pub alpha_minus: f64,
    /// `k0x d + k1x d`
    pub alpha_plus: f64,
}

impl GeometryCoefficients {
    /// Builds the aggregates from an explicit coefficient list.
    pub fn from_values(offset: usize, a: Vec<Complex64>, alpha_minus: f64, alpha_plus: f64) -> Self {
        let mut sum_a = Complex64::new(0.0, 0.0);
        let mut sum_abs2 = 0.0;
        let mut sum_sq = Complex64::new(0.0, 0.0);
        let mut sum_abs2_a = Complex64::new(0.0, 0.0);
        let mut sum_abs4 = 0.0;
        for &ai in &a {
            let n2 = ai.norm_sqr();
            sum_a += ai;
            sum_abs2 += n2;
            sum_sq += ai * ai;
            sum_abs2_a += ai * n2;
            sum_abs4 += n2 * n2;
        }
        Self {
            a,
            offset,
            sum_a,
            sum_abs2,
            sum_sq,
            sum_abs2_a,
            sum_abs4,
            alpha_minus,
            alpha_plus,
        }
    }

    /// Real per-site weights (e.g. `|u1|^2` for the dispersion shift).
    pub fn from_real_weights(offset: usize, weights: &[f64]) -> Self {
        let a = weights.iter().map(|&w| Complex64::new(w, 0.0)).collect();
        Self::from_values(offset, a, 0.0, 0.0)
    }

    /// Number of illuminated sites `K`.
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

/// `u(x_m)`: `exp(i(m k_x d + phi))` for traveling waves,
/// `cos(m k_x d + phi)` for standing waves.
pub fn mode_function(mode: &ModeSpec, site: usize) -> Complex64 {
    debug_assert!(site >= 1, "sites are 1-based");
    let arg = site as f64 * mode.kx_d() + mode.phase;
    match mode.kind {
        ModeKind::Traveling => Complex64::cis(arg),
        ModeKind::Standing => Complex64::new(arg.cos(), 0.0),
    }
}

/// `A_i = u_probe*(x_i) u_pump(x_i)` over the illuminated window.
pub fn coefficients(
    pump: &ModeSpec,
    probe: &ModeSpec,
    lattice: &LatticeSpec,
) -> Result<GeometryCoefficients> {
    pump.validate()?;
    probe.validate()?;
    lattice.validate()?;
    let a = lattice
        .window()
        .map(|m| mode_function(probe, m).conj() * mode_function(pump, m))
        .collect();
    let (k0, k1) = (pump.kx_d(), probe.kx_d());
    Ok(GeometryCoefficients::from_values(lattice.offset, a, k0 - k1, k0 + k1))
}

/// Low part of `2 pi`, so that `TAU + TAU_LO` carries ~32 significant digits.
const TAU_LO: f64 = 2.449_293_598_294_706_4e-16;

/// Splits `x = 2 pi l + r` with `r` in `[-pi, pi]`, keeping `r` accurate to
/// its own ulp even when `x` sits next to a multiple of `2 pi`.
fn reduce_angle(x: f64) -> (i64, f64) {
    let l = (x / TAU).round();
    let r = (-l).mul_add(TAU, x) - l * TAU_LO;
    (l as i64, r)
}

/// `sin(K x / 2) / sin(x / 2)`, with the exact limit `K (-1)^((K-1) l)` at
/// `x = 2 pi l`.
pub fn diffraction_ratio(x: f64, k: usize) -> f64 {
    let (l, r) = reduce_angle(x);
    let kf = k as f64;
    let sign = if ((k as i64 - 1) * l).rem_euclid(2) == 1 {
        -1.0
    } else {
        1.0
    };
    let den = (0.5 * r).sin();
    let ratio = if den.abs() < SINGULARITY_GUARD {
        kf * (1.0 - (kf * kf - 1.0) * r * r / 24.0)
    } else {
        (0.5 * kf * r).sin() / den
    };
    sign * ratio
}

/// `sum_{m=1..K} exp(i m alpha)` in closed form.
pub fn closed_form_traveling_sum(alpha_minus: f64, k: usize) -> Complex64 {
    // The sum is 2 pi periodic, so only the reduced angle matters.
    let (_, r) = reduce_angle(alpha_minus);
    let kf = k as f64;
    if (0.5 * r).sin().abs() < SINGULARITY_GUARD {
        // Every term is 1 at r = 0; the series keeps the guard band accurate.
        let s1 = kf * (kf + 1.0) / 2.0;
        let s2 = s1 * (2.0 * kf + 1.0) / 3.0;
        return Complex64::new(kf - 0.5 * r * r * s2, r * s1);
    }
    Complex64::cis(0.5 * (kf + 1.0) * r) * ((0.5 * kf * r).sin() / (0.5 * r).sin())
}

/// Homodyne projections `A_i^beta = Re(A_i e^{-i beta})` and their sum.
pub fn quadrature_coefficients(coeffs: &GeometryCoefficients, beta: f64) -> (Vec<f64>, f64) {
    let rot = Complex64::cis(-beta);
    let proj: Vec<f64> = coeffs.a.iter().map(|&a| (a * rot).re).collect();
    let total = proj.iter().sum();
    (proj, total)
}
