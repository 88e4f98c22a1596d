use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("branch cut hit: argument {0} lies on the excluded ray")]
    BranchCut(Complex64),

    #[error("Rayleigh cutoff: order {order} has zeta = 0 at k = {k}")]
    RayleighCutoff { order: i64, k: Complex64 },

    #[error("series truncation: tail estimate {tail:e} exceeds tolerance {tol:e}")]
    SeriesTruncation { tail: f64, tol: f64 },

    #[error("waveguide pole proximity at k = {k} (|sin k| = {sin_abs:e})")]
    WaveguidePole { k: Complex64, sin_abs: f64 },

    #[error("quadrature unresolved: entry change {change:e} between rule sizes")]
    QuadratureUnresolved { change: f64 },

    #[error("ill-conditioned block: condition number {cond:e}")]
    IllConditioned { cond: f64 },

    #[error("beta0 = {beta0} produces a singular reference matrix (cond {cond:e})")]
    SingularReference { beta0: f64, cond: f64 },

    #[error("branch ambiguity: eigenvector overlaps {0:.4} and {1:.4} are indistinguishable")]
    BranchAmbiguity(f64, f64),

    #[error("resonance overlap: seeds {0} and {1} are too close")]
    ResonanceOverlap(Complex64, Complex64),

    #[error("no convergence after {iterations} iterations (|lambda| = {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("basin escape: iterate {k} left the disc of radius {radius} around {seed}")]
    BasinEscape { k: Complex64, seed: Complex64, radius: f64 },

    #[error("region changes across the study: {0}")]
    RegionMismatch(String),

    #[error("resonant singularity: |det M| = {det:e} near k = {k}")]
    ResonantSingularity { det: f64, k: f64 },

    #[error("diagnostic unavailable: {0}")]
    DiagnosticUnavailable(String),

    #[error("no feature found in window [{0}, {1}]")]
    NoFeature(f64, f64),
}

impl Error {
    /// True for failures caused by the inputs rather than by the numerics.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::InvalidConfig(_))
    }
}
