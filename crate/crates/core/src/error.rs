use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid mode: {0}")]
    InvalidMode(String),

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid atomic state: {0}")]
    InvalidState(String),

    #[error("invalid moment multi-index: {0}")]
    InvalidPowers(String),

    /// A multi-site moment needs more distinct sites than the lattice has.
    #[error("moment {name} is undefined for M = {sites} (needs {needed} distinct sites)")]
    MissingMoment {
        name: &'static str,
        sites: usize,
        needed: usize,
    },

    #[error("cavity example assumes an even number of illuminated sites, got K = {0}")]
    OddWindow(usize),

    #[error("invalid scatter model: {0}")]
    InvalidModel(String),

    #[error(
        "occupation basis has {entries} entries, above the cap of {cap}; \
         reduce N or M (or raise the cap)"
    )]
    BasisTooLarge { entries: u128, cap: usize },

    #[error("invalid truncation cutoff {0}: coherent states need 0 < cutoff <= 1e-6")]
    InvalidCutoff(f64),

    #[error("site {site} is out of range 1..={sites}")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("site {0} appears more than once")]
    RepeatedSite(usize),

    #[error("angular grid is empty")]
    EmptyGrid,

    #[error("at theta1 = {theta1}: {source}")]
    AtAngle { theta1: f64, source: Box<Error> },
}
