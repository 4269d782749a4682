//! Closed forms against the Fock-space oracle, as a command.

use std::f64::consts::{PI, TAU};
use std::fmt;

use latticeglow::oracle::DEFAULT_CUTOFF;
use latticeglow::{
    closed_form_traveling_sum, coefficients, enumerate, expected_amplitude, fourth_moment,
    fourth_moment_traveling, intensity, moment_set, n_k_statistics, oracle_d_moments,
    oracle_raw_moment, quadrature_stats, raw_moment, AtomState, Complex64, Error, LatticeSpec,
    ModeKind, ModeSpec, OccupationDistribution, StateKind,
};

pub const MIN_SIZE: u32 = 2;
pub const MAX_SIZE: u32 = 8;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Angles per geometry in the oracle comparisons.
const ANGLES: usize = 16;
const BETA: f64 = 0.37;

/// Values below this magnitude are compared absolutely.
const ABSOLUTE_FLOOR: f64 = 1e-2;

/// `|a - b| / max(|a|, |b|, 1e-2)`.
pub fn deviation(a: f64, b: f64) -> f64 {
    let diff = (a - b).abs();
    if diff == 0.0 {
        0.0
    } else {
        diff / a.abs().max(b.abs()).max(ABSOLUTE_FLOOR)
    }
}

/// `|a - b| <= tol max(|a|, |b|)`, or an absolute floor of `tol / 100` for
/// values that should vanish.
pub fn agree(a: f64, b: f64, tol: f64) -> bool {
    deviation(a, b) <= tol
}

#[derive(Debug, Clone, Default)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Largest [`deviation`] seen.
    pub max_deviation: f64,
    pub first_failure: Option<String>,
}

impl SuiteResult {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            ..Self::default()
        }
    }

    fn check(&mut self, tol: f64, a: f64, b: f64, context: impl FnOnce() -> String) {
        self.cases += 1;
        let dev = deviation(a, b);
        self.max_deviation = self.max_deviation.max(dev);
        if dev > tol {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(format!("{}: closed {a:e} vs oracle {b:e}", context()));
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone)]
pub struct SelftestReport {
    pub max_size: u32,
    pub tolerance: f64,
    pub suites: Vec<SuiteResult>,
    pub notes: Vec<String>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }
}

impl fmt::Display for SelftestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "selftest: N = M in {MIN_SIZE}..={}, tolerance {:e}",
            self.max_size, self.tolerance
        )?;
        writeln!(f, "{:<14} {:>8} {:>8} {:>12}  result", "suite", "cases", "failed", "max dev")?;
        for s in &self.suites {
            writeln!(
                f,
                "{:<14} {:>8} {:>8} {:>12.3e}  {}",
                s.name,
                s.cases,
                s.failures,
                s.max_deviation,
                if s.passed() { "pass" } else { "FAIL" }
            )?;
        }
        for note in &self.notes {
            writeln!(f, "note: {note}")?;
        }
        for s in &self.suites {
            if let Some(msg) = &s.first_failure {
                writeln!(f, "first failure in {}: {msg}", s.name)?;
            }
        }
        write!(f, "{}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

fn direct_sum(alpha: f64, k: usize) -> Complex64 {
    (1..=k)
        .map(|m| {
            let hi = m as f64 * alpha;
            let lo = (m as f64).mul_add(alpha, -hi);
            Complex64::cis(hi) * Complex64::cis(lo)
        })
        .sum()
}

fn geometry_suite(tol: f64) -> SuiteResult {
    let mut suite = SuiteResult::new("geometry");
    for k in 1..=64usize {
        for i in 0..64 {
            let alpha = -TAU + 2.0 * TAU * i as f64 / 63.0 + 1e-3;
            let closed = closed_form_traveling_sum(alpha, k);
            let direct = direct_sum(alpha, k);
            let ctx = || format!("closed-form sum, K = {k}, alpha = {alpha}");
            suite.check(tol, closed.re, direct.re, ctx);
            suite.check(tol, closed.im, direct.im, ctx);
        }
    }
    suite
}

fn multi_indices(max_sites: usize) -> Vec<Vec<u32>> {
    fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for order in 1..=4 {
        rec(order, order, &mut Vec::new(), &mut out);
    }
    out.retain(|p| p.len() <= max_sites);
    out
}

struct Case {
    state: AtomState,
    dist: OccupationDistribution,
}

fn cases(max_size: u32, notes: &mut Vec<String>) -> latticeglow::Result<Vec<Case>> {
    let mut out = Vec::new();
    for n in MIN_SIZE as u64..=max_size as u64 {
        for kind in StateKind::ALL {
            let state = AtomState::new(kind, n, n)?;
            match enumerate(&state, DEFAULT_CUTOFF) {
                Ok(dist) => out.push(Case { state, dist }),
                Err(Error::BasisTooLarge { entries, .. }) => notes.push(format!(
                    "skipped {kind} at N = M = {n}: basis of {entries} entries exceeds the cap"
                )),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

fn label(state: &AtomState) -> String {
    format!("{} N = M = {}", state.kind(), state.sites())
}

fn moments_suite(cases: &[Case], tol: f64) -> latticeglow::Result<SuiteResult> {
    let mut suite = SuiteResult::new("moments");
    for case in cases {
        let m = case.state.sites() as usize;
        for powers in multi_indices(m) {
            let closed = raw_moment(&case.state, &powers)?;
            let sites: Vec<usize> = (1..=powers.len()).collect();
            let exact = oracle_raw_moment(&case.dist, &sites, &powers)?;
            suite.check(tol, closed, exact, || {
                format!("{}, powers {powers:?}", label(&case.state))
            });
        }
    }
    Ok(suite)
}

fn normalisation_suite(cases: &[Case], tol: f64) -> SuiteResult {
    let mut suite = SuiteResult::new("normalisation");
    for case in cases {
        let total = case.dist.total_probability() + case.dist.truncation_deficit();
        suite.check(tol, total, 1.0, || label(&case.state));
    }
    suite
}

fn n_k_suite(cases: &[Case], tol: f64) -> latticeglow::Result<SuiteResult> {
    let mut suite = SuiteResult::new("n_k");
    for case in cases {
        let m = case.state.sites() as usize;
        for k in 1..=m {
            let (mean, var) = n_k_statistics(&case.state, k)?;
            let n_k = |q: &[u32]| q[..k].iter().map(|&x| x as f64).sum::<f64>();
            let om = case.dist.expectation(n_k);
            let ov = case.dist.expectation(|q| (n_k(q) - om).powi(2));
            let ctx = || format!("{}, K = {k}", label(&case.state));
            suite.check(tol, mean, om, ctx);
            suite.check(tol, var, ov, ctx);
        }
    }
    Ok(suite)
}

const MODE_PAIRS: [(ModeKind, ModeKind); 4] = [
    (ModeKind::Traveling, ModeKind::Traveling),
    (ModeKind::Traveling, ModeKind::Standing),
    (ModeKind::Standing, ModeKind::Traveling),
    (ModeKind::Standing, ModeKind::Standing),
];

fn angles() -> impl Iterator<Item = f64> {
    (0..ANGLES).map(|i| -PI + TAU * (i as f64 + 0.5) / ANGLES as f64)
}

fn observables_suite(cases: &[Case], tol: f64) -> latticeglow::Result<SuiteResult> {
    let mut suite = SuiteResult::new("observables");
    for case in cases {
        let m = case.state.sites() as usize;
        let moments = moment_set(&case.state)?;
        for k in 2..=m {
            let lattice = LatticeSpec::new(m, k)?;
            for (pump_kind, probe_kind) in MODE_PAIRS {
                let pump = ModeSpec::new(pump_kind, 0.1 * PI);
                for theta1 in angles() {
                    let probe = ModeSpec::new(probe_kind, theta1);
                    let coeffs = coefficients(&pump, &probe, &lattice)?;
                    let exact = oracle_d_moments(&case.dist, &coeffs, BETA)?;
                    let ctx = |what: &str| {
                        format!(
                            "{}, K = {k}, {pump_kind} pump at 0.1 pi, {probe_kind} probe at \
                             theta1 = {theta1}, beta = {BETA}, {what}",
                            label(&case.state)
                        )
                    };
                    let amp = expected_amplitude(&coeffs, &moments);
                    suite.check(tol, amp.re, exact.amp.re, || ctx("Re amp"));
                    suite.check(tol, amp.im, exact.amp.im, || ctx("Im amp"));
                    let i = intensity(&coeffs, &moments);
                    suite.check(tol, i, exact.intensity, || ctx("intensity"));
                    let (qm, qv) = quadrature_stats(&coeffs, BETA, &moments);
                    suite.check(tol, qm, exact.quad_mean, || ctx("quadrature mean"));
                    suite.check(tol, qv, exact.quad_var, || ctx("quadrature variance"));
                    if moments.m1111.is_some() {
                        let f = fourth_moment(&coeffs, &moments)?;
                        suite.check(tol, f, exact.fourth, || ctx("fourth moment"));
                    }
                }
            }
        }
    }
    Ok(suite)
}

fn traveling_suite(cases: &[Case], tol: f64) -> latticeglow::Result<SuiteResult> {
    let mut suite = SuiteResult::new("traveling");
    for case in cases {
        let m = case.state.sites() as usize;
        let moments = moment_set(&case.state)?;
        if moments.m1111.is_none() {
            continue;
        }
        for k in 1..=m {
            let lattice = LatticeSpec::new(m, k)?;
            for theta1 in angles() {
                let coeffs = coefficients(
                    &ModeSpec::traveling(0.1 * PI),
                    &ModeSpec::traveling(theta1),
                    &lattice,
                )?;
                let general = fourth_moment(&coeffs, &moments)?;
                let reduced = fourth_moment_traveling(coeffs.alpha_minus, k, &moments)?;
                suite.check(tol, reduced, general, || {
                    format!("{}, K = {k}, theta1 = {theta1}", label(&case.state))
                });
            }
        }
    }
    Ok(suite)
}

/// Runs every suite for `N = M` up to `max_size`.
pub fn selftest(max_size: u32, tolerance: f64) -> latticeglow::Result<SelftestReport> {
    assert!(
        (MIN_SIZE..=MAX_SIZE).contains(&max_size),
        "selftest size must lie in {MIN_SIZE}..={MAX_SIZE}"
    );
    let mut notes = Vec::new();
    let cases = cases(max_size, &mut notes)?;
    let suites = vec![
        geometry_suite(tolerance),
        normalisation_suite(&cases, tolerance),
        moments_suite(&cases, tolerance)?,
        n_k_suite(&cases, tolerance)?,
        observables_suite(&cases, tolerance)?,
        traveling_suite(&cases, tolerance)?,
    ];
    Ok(SelftestReport {
        max_size,
        tolerance,
        suites,
        notes,
    })
}
