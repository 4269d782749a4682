//! Occupation-number statistics of the three model atomic states.
//!
//! All three states are site-symmetric, so a multi-site moment only depends on
//! the multiset of powers attached to distinct sites. The normal-ordered
//! (falling-factorial) moments have simple closed forms:
//!
//! * Mott insulator, `n` atoms per site: `prod_r n (n-1) .. (n-p_r+1)`
//! * superfluid, `N` atoms on `M` sites: `N (N-1) .. (N-s+1) / M^s`, `s = sum_r p_r`
//! * coherent product, mean `n`: `n^s`
//!
//! Raw moments follow from `n^p = sum_j S(p, j) n(n-1)..(n-j+1)` with the
//! Stirling numbers of the second kind `S(p, j)`.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Orders tabulated in the shared Stirling table.
pub const STIRLING_TABLE_ORDER: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    #[serde(alias = "mi", alias = "mott")]
    MottInsulator,
    #[serde(alias = "sf")]
    Superfluid,
    #[serde(alias = "coh", alias = "coherent")]
    CoherentProduct,
}

impl StateKind {
    pub const ALL: [StateKind; 3] = [
        StateKind::MottInsulator,
        StateKind::Superfluid,
        StateKind::CoherentProduct,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            StateKind::MottInsulator => "mi",
            StateKind::Superfluid => "sf",
            StateKind::CoherentProduct => "coh",
        }
    }
}

impl fmt::Display for StateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl std::str::FromStr for StateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mi" | "mott" | "mott_insulator" | "mottinsulator" => Ok(StateKind::MottInsulator),
            "sf" | "superfluid" => Ok(StateKind::Superfluid),
            "coh" | "coherent" | "coherent_product" | "coherentproduct" => {
                Ok(StateKind::CoherentProduct)
            }
            other => Err(Error::InvalidState(format!(
                "unknown state {other:?} (expected mi, sf or coherent)"
            ))),
        }
    }
}

/// `N` atoms on `M` sites in one of the model states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AtomState {
    kind: StateKind,
    atoms: u64,
    sites: u64,
}

impl AtomState {
    pub fn new(kind: StateKind, atoms: u64, sites: u64) -> Result<Self> {
        if atoms == 0 {
            return Err(Error::InvalidState("N must be >= 1".into()));
        }
        if sites == 0 {
            return Err(Error::InvalidState("M must be >= 1".into()));
        }
        if kind == StateKind::MottInsulator && !atoms.is_multiple_of(sites) {
            return Err(Error::InvalidState(format!(
                "Mott insulator needs commensurate filling: N = {atoms} is not divisible by M = {sites}"
            )));
        }
        Ok(Self { kind, atoms, sites })
    }

    pub fn mott(atoms: u64, sites: u64) -> Result<Self> {
        Self::new(StateKind::MottInsulator, atoms, sites)
    }

    pub fn superfluid(atoms: u64, sites: u64) -> Result<Self> {
        Self::new(StateKind::Superfluid, atoms, sites)
    }

    pub fn coherent(atoms: u64, sites: u64) -> Result<Self> {
        Self::new(StateKind::CoherentProduct, atoms, sites)
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    /// Total atom number `N`.
    pub fn atoms(&self) -> u64 {
        self.atoms
    }

    /// Total site count `M`.
    pub fn sites(&self) -> u64 {
        self.sites
    }

    /// Mean occupation `n = N / M`.
    pub fn filling(&self) -> f64 {
        self.atoms as f64 / self.sites as f64
    }
}

impl fmt::Display for AtomState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(N={}, M={})", self.kind, self.atoms, self.sites)
    }
}

/// Stirling numbers of the second kind, `S(p, j)` for `0 <= j <= p <= order`.
#[derive(Debug, Clone)]
pub struct StirlingTable {
    rows: Vec<Vec<u128>>,
}

impl StirlingTable {
    pub fn new(order: usize) -> Self {
        let mut rows: Vec<Vec<u128>> = Vec::with_capacity(order + 1);
        rows.push(vec![1]);
        for p in 1..=order {
            let prev = &rows[p - 1];
            let mut row = vec![0u128; p + 1];
            for j in 1..=p {
                let carry = if j < p { j as u128 * prev[j] } else { 0 };
                row[j] = carry + prev[j - 1];
            }
            rows.push(row);
        }
        Self { rows }
    }

    /// The shared table up to [`STIRLING_TABLE_ORDER`].
    pub fn shared() -> &'static StirlingTable {
        static TABLE: OnceLock<StirlingTable> = OnceLock::new();
        TABLE.get_or_init(|| StirlingTable::new(STIRLING_TABLE_ORDER))
    }

    pub fn order(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn get(&self, p: usize, j: usize) -> u128 {
        if j > p {
            0
        } else {
            self.rows[p][j]
        }
    }
}

fn check_powers(state: &AtomState, powers: &[u32]) -> Result<()> {
    if powers.is_empty() {
        return Err(Error::InvalidPowers("powers list is empty".into()));
    }
    if let Some(pos) = powers.iter().position(|&p| p == 0) {
        return Err(Error::InvalidPowers(format!("power at position {pos} is zero")));
    }
    if powers.len() as u64 > state.sites {
        return Err(Error::InvalidPowers(format!(
            "{} distinct sites requested but M = {}",
            powers.len(),
            state.sites
        )));
    }
    Ok(())
}

/// `x (x-1) .. (x-p+1)` as an iterated product.
fn falling(x: u64, p: u32) -> f64 {
    if u64::from(p) > x {
        return 0.0;
    }
    (0..u64::from(p)).map(|t| (x - t) as f64).product()
}

/// `< prod_r b_r^{+p_r} b_r^{p_r} >` over distinct sites.
pub fn falling_factorial_moment(state: &AtomState, powers: &[u32]) -> Result<f64> {
    check_powers(state, powers)?;
    let s: u32 = powers.iter().sum();
    let m = state.sites as f64;
    Ok(match state.kind {
        StateKind::MottInsulator => {
            let n = state.atoms / state.sites;
            powers.iter().map(|&p| falling(n, p)).product()
        }
        StateKind::Superfluid => falling(state.atoms, s) / m.powi(s as i32),
        StateKind::CoherentProduct => (state.atoms as f64).powi(s as i32) / m.powi(s as i32),
    })
}

/// `< prod_r n_r^{p_r} >` over distinct sites.
pub fn raw_moment(state: &AtomState, powers: &[u32]) -> Result<f64> {
    check_powers(state, powers)?;
    let max_p = *powers.iter().max().unwrap() as usize;
    let local;
    let table = if max_p <= STIRLING_TABLE_ORDER {
        StirlingTable::shared()
    } else {
        local = StirlingTable::new(max_p);
        &local
    };

    // Odometer over j_r in 1..=p_r.
    let mut js: Vec<u32> = vec![1; powers.len()];
    let mut total = 0.0;
    loop {
        let weight: f64 = js
            .iter()
            .zip(powers)
            .map(|(&j, &p)| table.get(p as usize, j as usize) as f64)
            .product();
        total += weight * falling_factorial_moment(state, &js)?;

        let mut r = 0;
        loop {
            if r == js.len() {
                return Ok(total);
            }
            if js[r] < powers[r] {
                js[r] += 1;
                break;
            }
            js[r] = 1;
            r += 1;
        }
    }
}

/// Site-symmetric raw occupation moments up to total order four.
///
/// Entries that need more distinct sites than the lattice has are `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    /// `<n>`
    pub m1: f64,
    /// `<n^2>`
    pub m2: f64,
    /// `<n^4>`
    pub m4: f64,
    /// `<n_a n_b>`
    pub m11: Option<f64>,
    /// `<n_a^3 n_b>`
    pub m31: Option<f64>,
    /// `<n_a^2 n_b^2>`
    pub m22: Option<f64>,
    /// `<n_a^2 n_b n_c>`
    pub m211: Option<f64>,
    /// `<n_a n_b n_c n_d>`
    pub m1111: Option<f64>,
    sites: u64,
}

impl MomentSet {
    pub fn sites(&self) -> u64 {
        self.sites
    }

    /// `<n_a n_b>`, or zero for a single-site lattice. With `M = 1` the only
    /// admissible window is `K = 1`, where every pair term carries a vanishing
    /// geometric prefactor.
    pub fn pair(&self) -> f64 {
        self.m11.unwrap_or(0.0)
    }

    /// On-site variance `<n^2> - <n>^2`.
    pub fn onsite_variance(&self) -> f64 {
        self.m2 - self.m1 * self.m1
    }

    /// Pair covariance `<n_a n_b> - <n>^2` (zero for `M = 1`).
    pub fn pair_covariance(&self) -> f64 {
        match self.m11 {
            Some(m11) => m11 - self.m1 * self.m1,
            None => 0.0,
        }
    }

    /// The fourth-order entries `(m31, m22, m211, m1111)`, or the first one
    /// that is undefined.
    pub fn fourth_order(&self) -> Result<(f64, f64, f64, f64)> {
        let need = |v: Option<f64>, name: &'static str, needed: usize| {
            v.ok_or(Error::MissingMoment {
                name,
                sites: self.sites as usize,
                needed,
            })
        };
        Ok((
            need(self.m31, "m31", 2)?,
            need(self.m22, "m22", 2)?,
            need(self.m211, "m211", 3)?,
            need(self.m1111, "m1111", 4)?,
        ))
    }
}

/// All moments entering the intensity and fourth-moment formulas.
pub fn moment_set(state: &AtomState) -> Result<MomentSet> {
    let m = state.sites;
    let opt = |powers: &[u32]| -> Result<Option<f64>> {
        if powers.len() as u64 <= m {
            raw_moment(state, powers).map(Some)
        } else {
            Ok(None)
        }
    };
    Ok(MomentSet {
        m1: raw_moment(state, &[1])?,
        m2: raw_moment(state, &[2])?,
        m4: raw_moment(state, &[4])?,
        m11: opt(&[1, 1])?,
        m31: opt(&[3, 1])?,
        m22: opt(&[2, 2])?,
        m211: opt(&[2, 1, 1])?,
        m1111: opt(&[1, 1, 1, 1])?,
        sites: m,
    })
}

/// Mean and variance of the atom number `N_K` on `K` sites.
pub fn n_k_statistics(state: &AtomState, k: usize) -> Result<(f64, f64)> {
    if k == 0 || k as u64 > state.sites {
        return Err(Error::InvalidLattice(format!(
            "K must lie in 1..={}, got {k}",
            state.sites
        )));
    }
    let moments = moment_set(state)?;
    let kf = k as f64;
    let mean = moments.m1 * kf;
    let variance = kf * moments.onsite_variance() + kf * (kf - 1.0) * moments.pair_covariance();
    Ok((mean, variance))
}
