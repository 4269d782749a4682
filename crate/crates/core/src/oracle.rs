//! Brute-force ground truth in the occupation-number basis.
//!
//! Every operator of interest (`n_i`, `D = sum_i A_i n_i` and its quadratures)
//! is diagonal in the Fock basis, so its moments reduce to classical
//! expectations over the probability distribution `p(q) = |<q|Psi>|^2` of
//! occupation vectors `q = (q_1, .., q_M)`.
//!
//! Sums over the distribution are split into fixed-size chunks that are
//! reduced in parallel with compensated summation and then combined in chunk
//! order, so results do not depend on the number of worker threads.

use std::io::{self, Write};
use std::ops::{AddAssign, Range};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::GeometryCoefficients;
use crate::states::{AtomState, StateKind};

/// Largest basis `enumerate` will build.
pub const DEFAULT_BASIS_CAP: usize = 10_000_000;

/// Tail cutoff used for coherent states by the certification suites.
pub const DEFAULT_CUTOFF: f64 = 1e-15;

/// Largest admissible coherent-state cutoff.
pub const MAX_CUTOFF: f64 = 1e-6;

const CHUNK: usize = 8192;

/// Exact (or, for coherent states, tail-truncated) occupation distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupationDistribution {
    sites: usize,
    occupations: Vec<u32>,
    probabilities: Vec<f64>,
    truncation_deficit: f64,
}

impl OccupationDistribution {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// `1 - sum p`; zero for Mott and superfluid states.
    pub fn truncation_deficit(&self) -> f64 {
        self.truncation_deficit
    }

    pub fn occupation(&self, index: usize) -> &[u32] {
        &self.occupations[index * self.sites..(index + 1) * self.sites]
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.probabilities[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u32], f64)> + '_ {
        self.occupations
            .chunks_exact(self.sites)
            .zip(self.probabilities.iter().copied())
    }

    /// `sum p`, reduced deterministically.
    pub fn total_probability(&self) -> f64 {
        chunked_reduce(self.len(), |range| {
            let mut s = Sum::default();
            for i in range {
                s += self.probabilities[i];
            }
            s
        })
        .value()
    }

    /// `sum_q p(q) f(q)`, renormalised by the retained probability mass.
    pub fn expectation<F>(&self, f: F) -> f64
    where
        F: Fn(&[u32]) -> f64 + Sync,
    {
        let raw = chunked_reduce(self.len(), |range| {
            let mut s = Sum::default();
            for i in range {
                s += self.probabilities[i] * f(self.occupation(i));
            }
            s
        });
        raw.value() / (1.0 - self.truncation_deficit)
    }

    /// Dumps the distribution as `q1,..,qM,p` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let header: Vec<String> = (1..=self.sites).map(|i| format!("q{i}")).collect();
        writeln!(w, "{},p", header.join(","))?;
        for (q, p) in self.iter() {
            for x in q {
                write!(w, "{x},")?;
            }
            writeln!(w, "{p:.16e}")?;
        }
        Ok(())
    }
}

/// Reduces `f` over fixed chunks of `0..n` in parallel and combines the
/// partial results in chunk order.
/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
struct Sum {
    hi: f64,
    lo: f64,
}

impl Sum {
    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

impl AddAssign<f64> for Sum {
    fn add_assign(&mut self, x: f64) {
        let t = self.hi + x;
        if self.hi.abs() >= x.abs() {
            self.lo += (self.hi - t) + x;
        } else {
            self.lo += (x - t) + self.hi;
        }
        self.hi = t;
    }
}

impl AddAssign for Sum {
    fn add_assign(&mut self, rhs: Self) {
        *self += rhs.hi;
        *self += rhs.lo;
    }
}

fn chunked_reduce<T, F>(n: usize, f: F) -> T
where
    T: Default + AddAssign + Send,
    F: Fn(Range<usize>) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let partials: Vec<T> = (0..chunks)
        .into_par_iter()
        .map(|c| f(c * CHUNK..((c + 1) * CHUNK).min(n)))
        .collect();
    let mut total = T::default();
    for p in partials {
        total += p;
    }
    total
}

/// Number of compositions of `n` atoms into `m` ordered sites,
/// `C(n + m - 1, m - 1)`; saturates at `u128::MAX`.
pub fn sf_basis_size(n: u64, m: u64) -> u128 {
    binomial(n + m - 1, m - 1).unwrap_or(u128::MAX)
}

fn binomial(n: u64, k: u64) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = acc.checked_mul(u128::from(n - i))? / u128::from(i + 1);
    }
    Some(acc)
}

/// `ln(k!)` for `k = 0..=n`.
fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Builds the occupation distribution of `state` with the default basis cap.
pub fn enumerate(state: &AtomState, cutoff_tail: f64) -> Result<OccupationDistribution> {
    enumerate_with_cap(state, cutoff_tail, DEFAULT_BASIS_CAP)
}

pub fn enumerate_with_cap(
    state: &AtomState,
    cutoff_tail: f64,
    cap: usize,
) -> Result<OccupationDistribution> {
    match state.kind() {
        StateKind::MottInsulator => {
            let m = state.sites() as usize;
            let n = (state.atoms() / state.sites()) as u32;
            if cap < 1 {
                return Err(Error::BasisTooLarge { entries: 1, cap });
            }
            Ok(OccupationDistribution {
                sites: m,
                occupations: vec![n; m],
                probabilities: vec![1.0],
                truncation_deficit: 0.0,
            })
        }
        StateKind::Superfluid => enumerate_superfluid(state, cap),
        StateKind::CoherentProduct => enumerate_coherent(state, cutoff_tail, cap),
    }
}

fn enumerate_superfluid(state: &AtomState, cap: usize) -> Result<OccupationDistribution> {
    let n = state.atoms();
    let m = state.sites();
    let size = sf_basis_size(n, m);
    if size > cap as u128 {
        return Err(Error::BasisTooLarge { entries: size, cap });
    }
    let sites = m as usize;
    let mut occupations = Vec::with_capacity(size as usize * sites);
    let mut q = vec![0u32; sites];
    compositions(n as u32, 0, &mut q, &mut occupations);

    let exact = n + m <= 32;
    let ln_fact = ln_factorials(n as usize);
    let ln_norm = n as f64 * (m as f64).ln();
    let inv_norm = (m as f64).powi(n as i32);
    let probabilities = occupations
        .chunks_exact(sites)
        .map(|q| {
            if exact {
                // N! / (q_1! .. q_M!) as a product of binomials.
                let mut left = n;
                let mut coef: u128 = 1;
                for &qi in q {
                    coef *= binomial(left, u64::from(qi)).expect("N + M <= 32 fits in u128");
                    left -= u64::from(qi);
                }
                coef as f64 / inv_norm
            } else {
                let ln_w: f64 = ln_fact[n as usize]
                    - q.iter().map(|&qi| ln_fact[qi as usize]).sum::<f64>()
                    - ln_norm;
                ln_w.exp()
            }
        })
        .collect();

    Ok(OccupationDistribution {
        sites,
        occupations,
        probabilities,
        truncation_deficit: 0.0,
    })
}

/// Appends all compositions of `left` into `q[pos..]` in ascending
/// lexicographic order.
fn compositions(left: u32, pos: usize, q: &mut [u32], out: &mut Vec<u32>) {
    if pos + 1 == q.len() {
        q[pos] = left;
        out.extend_from_slice(q);
        return;
    }
    for v in 0..=left {
        q[pos] = v;
        compositions(left - v, pos + 1, q, out);
    }
}

/// Poisson pmf on `0..=q_max` where `q_max` is the smallest cut with
/// `P(q > q_max) <= per_site_tail`; also returns that tail mass.
fn truncated_poisson(mean: f64, per_site_tail: f64) -> (Vec<f64>, f64) {
    let horizon = (mean + 40.0 * mean.sqrt() + 60.0).ceil() as usize;
    let mut pmf = Vec::with_capacity(horizon + 1);
    let mut p = (-mean).exp();
    pmf.push(p);
    for k in 1..=horizon {
        p *= mean / k as f64;
        pmf.push(p);
    }
    // tails[q] = P(X > q), summed from the far end.
    let mut tails = vec![0.0; horizon + 1];
    let mut acc = 0.0;
    for q in (0..horizon).rev() {
        acc += pmf[q + 1];
        tails[q] = acc;
    }
    let q_max = (0..=horizon)
        .find(|&q| tails[q] <= per_site_tail)
        .unwrap_or(horizon);
    pmf.truncate(q_max + 1);
    (pmf, tails[q_max])
}

fn enumerate_coherent(
    state: &AtomState,
    cutoff_tail: f64,
    cap: usize,
) -> Result<OccupationDistribution> {
    if !(cutoff_tail > 0.0 && cutoff_tail <= MAX_CUTOFF) {
        return Err(Error::InvalidCutoff(cutoff_tail));
    }
    let sites = state.sites() as usize;
    let (pmf, tail) = truncated_poisson(state.filling(), cutoff_tail / sites as f64);
    let levels = pmf.len();
    let size = (levels as u128)
        .checked_pow(sites as u32)
        .unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(Error::BasisTooLarge { entries: size, cap });
    }
    let size = size as usize;

    let mut occupations = Vec::with_capacity(size * sites);
    let mut probabilities = Vec::with_capacity(size);
    let mut q = vec![0u32; sites];
    for _ in 0..size {
        occupations.extend_from_slice(&q);
        probabilities.push(q.iter().map(|&qi| pmf[qi as usize]).product());
        // Odometer, last site fastest.
        for slot in q.iter_mut().rev() {
            if (*slot as usize) + 1 < levels {
                *slot += 1;
                break;
            }
            *slot = 0;
        }
    }

    // 1 - (1 - tail)^M without cancellation.
    let truncation_deficit = -(sites as f64 * (-tail).ln_1p()).exp_m1();
    Ok(OccupationDistribution {
        sites,
        occupations,
        probabilities,
        truncation_deficit,
    })
}

/// Moments of `D` and of its quadrature `X_beta = Re(D e^{-i beta})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DMoments {
    /// `<D>`
    pub amp: Complex64,
    /// `<D* D>`
    pub intensity: f64,
    /// `<D*^2 D^2>`
    pub fourth: f64,
    /// `<X_beta>`
    pub quad_mean: f64,
    /// `<X_beta^2> - <X_beta>^2`
    pub quad_var: f64,
}

/// Weighted mean and centred second moment, merged with Chan's formula.
#[derive(Debug, Default, Clone, Copy)]
struct Spread {
    weight: f64,
    mean: f64,
    m2: f64,
}

impl Spread {
    /// Exact two-pass statistics of a short weighted sample.
    fn of(ps: &[f64], xs: &[f64]) -> Self {
        let weight: f64 = ps.iter().sum();
        if weight == 0.0 {
            return Self::default();
        }
        let mean = ps.iter().zip(xs).map(|(p, x)| p * x).sum::<f64>() / weight;
        let m2 = ps.iter().zip(xs).map(|(p, x)| p * (x - mean) * (x - mean)).sum();
        Self { weight, mean, m2 }
    }
}

impl AddAssign for Spread {
    fn add_assign(&mut self, rhs: Self) {
        let weight = self.weight + rhs.weight;
        if weight == 0.0 {
            return;
        }
        let delta = rhs.mean - self.mean;
        self.mean += delta * (rhs.weight / weight);
        self.m2 += rhs.m2 + delta * delta * self.weight * rhs.weight / weight;
        self.weight = weight;
    }
}

#[derive(Default)]
struct Accumulator {
    amp_re: Sum,
    amp_im: Sum,
    intensity: Sum,
    fourth: Sum,
    quad: Spread,
}

impl AddAssign for Accumulator {
    fn add_assign(&mut self, rhs: Self) {
        self.amp_re += rhs.amp_re;
        self.amp_im += rhs.amp_im;
        self.intensity += rhs.intensity;
        self.fourth += rhs.fourth;
        self.quad += rhs.quad;
    }
}

fn check_window(dist: &OccupationDistribution, coeffs: &GeometryCoefficients) -> Result<()> {
    if coeffs.offset == 0 || coeffs.offset - 1 + coeffs.len() > dist.sites {
        return Err(Error::InvalidLattice(format!(
            "coefficient window {}..{} does not fit on M = {} sites",
            coeffs.offset,
            coeffs.offset + coeffs.len(),
            dist.sites
        )));
    }
    Ok(())
}

/// Exact moments of `D` over the distribution.
pub fn oracle_d_moments(
    dist: &OccupationDistribution,
    coeffs: &GeometryCoefficients,
    beta: f64,
) -> Result<DMoments> {
    check_window(dist, coeffs)?;
    let start = coeffs.offset - 1;
    let rot = Complex64::cis(-beta);
    // contributions[i * levels + v] = A_i v, so D(q) is a sum of lookups.
    let levels = dist.occupations.iter().copied().max().unwrap_or(0) as usize + 1;
    let contributions: Vec<Complex64> = coeffs
        .a
        .iter()
        .flat_map(|&a| (0..levels).map(move |v| a * v as f64))
        .collect();
    let d_of = |q: &[u32]| -> Complex64 {
        q[start..start + coeffs.len()]
            .iter()
            .enumerate()
            .map(|(i, &qi)| contributions[i * levels + qi as usize])
            .sum()
    };

    // Short blocks are summed plainly and folded into the compensated
    // accumulators, which keeps the hot loop free of branches.
    const BLOCK: usize = 64;
    let acc = chunked_reduce(dist.len(), |range| {
        let mut acc = Accumulator::default();
        let (mut ps, mut xs) = ([0.0; BLOCK], [0.0; BLOCK]);
        let mut i = range.start;
        while i < range.end {
            let n = BLOCK.min(range.end - i);
            let (mut re, mut im, mut i2, mut i4) = (0.0, 0.0, 0.0, 0.0);
            for j in 0..n {
                let p = dist.probabilities[i + j];
                let d = d_of(dist.occupation(i + j));
                let d2 = d.norm_sqr();
                re += p * d.re;
                im += p * d.im;
                i2 += p * d2;
                i4 += p * d2 * d2;
                ps[j] = p;
                xs[j] = (d * rot).re;
            }
            acc.amp_re += re;
            acc.amp_im += im;
            acc.intensity += i2;
            acc.fourth += i4;
            acc.quad += Spread::of(&ps[..n], &xs[..n]);
            i += n;
        }
        acc
    });
    let norm = 1.0 / (1.0 - dist.truncation_deficit);

    Ok(DMoments {
        amp: Complex64::new(acc.amp_re.value(), acc.amp_im.value()) * norm,
        intensity: acc.intensity.value() * norm,
        fourth: acc.fourth.value() * norm,
        quad_mean: acc.quad.mean,
        // Variance of the renormalised distribution.
        quad_var: acc.quad.m2 / acc.quad.weight,
    })
}

/// `<prod_r n_{site_r}^{p_r}>` for distinct 1-based sites.
pub fn oracle_raw_moment(
    dist: &OccupationDistribution,
    sites: &[usize],
    powers: &[u32],
) -> Result<f64> {
    if sites.len() != powers.len() {
        return Err(Error::InvalidPowers(format!(
            "{} sites but {} powers",
            sites.len(),
            powers.len()
        )));
    }
    for (i, &s) in sites.iter().enumerate() {
        if s == 0 || s > dist.sites {
            return Err(Error::SiteOutOfRange {
                site: s,
                sites: dist.sites,
            });
        }
        if sites[..i].contains(&s) {
            return Err(Error::RepeatedSite(s));
        }
    }
    Ok(dist.expectation(|q| {
        sites
            .iter()
            .zip(powers)
            .map(|(&s, &p)| (q[s - 1] as f64).powi(p as i32))
            .product()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn superfluid_two_atoms_two_sites() {
        let dist = enumerate(&AtomState::superfluid(2, 2).unwrap(), DEFAULT_CUTOFF).unwrap();
        let got: Vec<(Vec<u32>, f64)> = dist.iter().map(|(q, p)| (q.to_vec(), p)).collect();
        assert_eq!(
            got,
            vec![(vec![0, 2], 0.25), (vec![1, 1], 0.5), (vec![2, 0], 0.25)]
        );
        assert_eq!(dist.truncation_deficit(), 0.0);
    }

    #[test]
    fn mott_is_a_single_vector() {
        let dist = enumerate(&AtomState::mott(3, 3).unwrap(), DEFAULT_CUTOFF).unwrap();
        assert_eq!(dist.len(), 1);
        assert_eq!(dist.occupation(0), &[1, 1, 1]);
        assert_eq!(dist.probability(0), 1.0);
    }

    #[test]
    fn coherent_weights_are_poisson() {
        let dist = enumerate(&AtomState::coherent(2, 2).unwrap(), 1e-12).unwrap();
        let e = (-1.0f64).exp();
        let fact = |k: u32| (1..=k).map(f64::from).product::<f64>();
        for (q, p) in dist.iter() {
            let expected = e / fact(q[0]) * e / fact(q[1]);
            assert!((p - expected).abs() <= 1e-15 * expected.max(1e-300));
        }
        assert!(dist.truncation_deficit() <= 1e-12);
        assert!(dist.truncation_deficit() > 0.0);
        assert!((dist.total_probability() + dist.truncation_deficit() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cutoff_is_validated_for_coherent_only() {
        let coh = AtomState::coherent(2, 2).unwrap();
        assert!(matches!(enumerate(&coh, 0.0), Err(Error::InvalidCutoff(_))));
        assert!(matches!(enumerate(&coh, 1e-3), Err(Error::InvalidCutoff(_))));
        assert!(enumerate(&AtomState::superfluid(2, 2).unwrap(), 0.5).is_ok());
    }

    #[test]
    fn basis_cap_is_enforced() {
        let err = enumerate_with_cap(&AtomState::superfluid(8, 8).unwrap(), DEFAULT_CUTOFF, 100)
            .unwrap_err();
        assert_eq!(err, Error::BasisTooLarge { entries: 6435, cap: 100 });
        assert!(err.to_string().contains("6435"));
        assert!(enumerate(&AtomState::superfluid(30, 30).unwrap(), DEFAULT_CUTOFF).is_err());
    }

    #[test]
    fn basis_sizes() {
        for nm in 1..=8u64 {
            let dist = enumerate(&AtomState::superfluid(nm, nm).unwrap(), DEFAULT_CUTOFF).unwrap();
            assert_eq!(dist.len() as u128, sf_basis_size(nm, nm));
        }
        assert_eq!(sf_basis_size(8, 8), 6435);
        assert_eq!(sf_basis_size(30, 30), 59_132_290_782_430_712);
    }

    #[test]
    fn lexicographic_order() {
        let dist = enumerate(&AtomState::superfluid(3, 3).unwrap(), DEFAULT_CUTOFF).unwrap();
        let vs: Vec<Vec<u32>> = dist.iter().map(|(q, _)| q.to_vec()).collect();
        let mut sorted = vs.clone();
        sorted.sort();
        assert_eq!(vs, sorted);
        let dist = enumerate(&AtomState::coherent(2, 2).unwrap(), 1e-8).unwrap();
        let vs: Vec<Vec<u32>> = dist.iter().map(|(q, _)| q.to_vec()).collect();
        let mut sorted = vs.clone();
        sorted.sort();
        assert_eq!(vs, sorted);
    }

    #[test]
    fn log_weights_match_exact_weights() {
        // N + M = 34 takes the log-factorial route.
        let dist = enumerate(&AtomState::superfluid(30, 4).unwrap(), DEFAULT_CUTOFF).unwrap();
        assert!((dist.total_probability() - 1.0).abs() < 1e-13);
        let m11 = oracle_raw_moment(&dist, &[1, 2], &[1, 1]).unwrap();
        assert!((m11 - 30.0 * 29.0 / 16.0).abs() < 1e-11);
    }

    #[test]
    fn raw_moment_examples() {
        let sf = enumerate(&AtomState::superfluid(2, 2).unwrap(), DEFAULT_CUTOFF).unwrap();
        assert_eq!(oracle_raw_moment(&sf, &[1, 2], &[1, 1]).unwrap(), 0.5);
        let mi = enumerate(&AtomState::mott(4, 2).unwrap(), DEFAULT_CUTOFF).unwrap();
        assert_eq!(oracle_raw_moment(&mi, &[1], &[4]).unwrap(), 16.0);
        // Poisson(1) fourth raw moment is the Bell number B4 = 15. The
        // truncated tail carries weight n^4, so a loose cutoff shows up here.
        let coh = enumerate(&AtomState::coherent(2, 2).unwrap(), DEFAULT_CUTOFF).unwrap();
        let b4 = oracle_raw_moment(&coh, &[1], &[4]).unwrap();
        assert!((b4 - 15.0).abs() < 1e-10, "{b4}");
        let loose = enumerate(&AtomState::coherent(2, 2).unwrap(), 1e-8).unwrap();
        let b4 = oracle_raw_moment(&loose, &[1], &[4]).unwrap();
        assert!((b4 - 15.0).abs() > 1e-10 && (b4 - 15.0).abs() < 1e-3, "{b4}");
    }

    #[test]
    fn raw_moment_rejects_bad_sites() {
        let sf = enumerate(&AtomState::superfluid(2, 2).unwrap(), DEFAULT_CUTOFF).unwrap();
        assert_eq!(
            oracle_raw_moment(&sf, &[1, 1], &[1, 1]),
            Err(Error::RepeatedSite(1))
        );
        assert!(oracle_raw_moment(&sf, &[3], &[1]).is_err());
        assert!(oracle_raw_moment(&sf, &[1], &[1, 1]).is_err());
    }

    #[test]
    fn d_moments_cavity_geometry() {
        let sf = enumerate(&AtomState::superfluid(2, 2).unwrap(), DEFAULT_CUTOFF).unwrap();
        let coeffs = GeometryCoefficients::from_real_weights(1, &[1.0, -1.0]);
        let d = oracle_d_moments(&sf, &coeffs, 0.0).unwrap();
        assert_eq!(d.intensity, 2.0);
        assert_eq!(d.amp, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn d_moments_mott_is_deterministic() {
        let mi = enumerate(&AtomState::mott(6, 3).unwrap(), DEFAULT_CUTOFF).unwrap();
        let coeffs = GeometryCoefficients::from_values(
            1,
            vec![Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.7), Complex64::new(1.0, 0.0)],
            0.0,
            0.0,
        );
        let d = oracle_d_moments(&mi, &coeffs, 0.4).unwrap();
        let d0: Complex64 = coeffs.a.iter().map(|a| a * 2.0).sum();
        assert!((d.intensity - d0.norm_sqr()).abs() < 1e-14);
        assert_eq!(d.quad_var, 0.0);
    }

    #[test]
    fn conserved_number_at_maximum() {
        let sf = enumerate(&AtomState::superfluid(4, 4).unwrap(), DEFAULT_CUTOFF).unwrap();
        let coeffs = GeometryCoefficients::from_real_weights(1, &[1.0; 4]);
        let d = oracle_d_moments(&sf, &coeffs, 0.0).unwrap();
        assert!((d.fourth - 256.0).abs() < 1e-12);
        assert!(d.quad_var.abs() < 1e-12);
    }

    #[test]
    fn window_must_fit() {
        let sf = enumerate(&AtomState::superfluid(2, 2).unwrap(), DEFAULT_CUTOFF).unwrap();
        let coeffs = GeometryCoefficients::from_real_weights(2, &[1.0, 1.0]);
        assert!(oracle_d_moments(&sf, &coeffs, 0.0).is_err());
    }

    #[test]
    fn csv_dump() {
        let sf = enumerate(&AtomState::superfluid(2, 2).unwrap(), DEFAULT_CUTOFF).unwrap();
        let mut buf = Vec::new();
        sf.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "q1,q2,p");
        assert_eq!(lines[2], "1,1,5.0000000000000000e-1");
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn reduction_is_thread_count_independent() {
        let dist = enumerate(&AtomState::coherent(3, 3).unwrap(), 1e-12).unwrap();
        let f = |q: &[u32]| (q[0] * q[1] + q[2]) as f64 / 3.0;
        let reference = dist.expectation(f);
        for threads in [1, 2, 5] {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            let v = pool.install(|| dist.expectation(f));
            assert_eq!(v.to_bits(), reference.to_bits());
        }
    }
}
