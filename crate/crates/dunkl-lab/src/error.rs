//! Crate-wide error type.
//!
//! Every fallible operation in the library returns [`Error`]. Variants are
//! deliberately fine-grained so callers (and the command-line harness) can
//! map distinct failure modes to distinct exit paths instead of parsing
//! message strings.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The supplied root collection is not closed under its own reflections,
    /// contains parallel pairs, or is otherwise not a reduced root system.
    #[error("not a root system: {0}")]
    NotARootSystem(String),

    /// Multiplicities must be constant on each reflection-group orbit.
    #[error("multiplicity function is not invariant under the reflection group: k({root_a:?}) = {k_a} but its image {root_b:?} carries k = {k_b}")]
    NonInvariantMultiplicity {
        root_a: Vec<f64>,
        k_a: f64,
        root_b: Vec<f64>,
        k_b: f64,
    },

    /// The effective dimension m = d + sum of all multiplicities must exceed 2
    /// for the transient potential theory used here.
    #[error("effective dimension m = {m} is not > 2; the kernels and solvers here require transience")]
    MTooSmall { m: f64 },

    /// Custom root inputs must be normalized to squared length 2.
    #[error("root {root:?} has squared length {norm_sq}, expected 2 (normalize inputs first)")]
    UnnormalizedRoot { root: Vec<f64>, norm_sq: f64 },

    /// Group enumeration exceeded the element cap (guards against bogus input).
    #[error("reflection group enumeration exceeded the cap of {cap} elements")]
    GroupTooLarge { cap: usize },

    /// Finite-difference evaluation of the Dunkl Laplacian too close to a
    /// mirror hyperplane: the divided differences would be dominated by the
    /// singular coefficient.
    #[error("evaluation point is within {dist:.3e} of the hyperplane of root {root:?}; need |<root,x>| >= 10 h = {min_dist:.3e}")]
    NearHyperplane {
        root: Vec<f64>,
        dist: f64,
        min_dist: f64,
    },

    /// The radial form u'' + (m-1)/r u' is singular at r = 0; the origin limit
    /// is a separate code path.
    #[error("radial operator evaluated at r = 0; use the origin limit m * u''(0) instead")]
    ZeroRadius,

    /// The normalization-constant quadrature is only implemented through d = 3.
    #[error("normalization constant quadrature supports dimension <= 3, got d = {d}")]
    DimensionTooLarge { d: usize },

    /// Annulus bound requires 0 < t <= s.
    #[error("bad annulus radii: need 0 < t <= s, got t = {t}, s = {s}")]
    BadRadii { t: f64, s: f64 },

    /// The Green function diverges at coincident points.
    #[error("Green function at the origin diverges as the separation tends to 0 (got rho = {rho})")]
    OriginSingularity { rho: f64 },

    /// Expected exit time is only defined for starting points inside the ball.
    #[error("starting radius rho = {rho} lies outside the ball of radius {r}")]
    OutsideBall { rho: f64, r: f64 },

    /// Radial initial data must be nonnegative.
    #[error("seed value a = {a} is not physical; the monotone theory requires a >= 0")]
    NonPhysicalSeed { a: f64 },

    /// The solution stayed bounded through every attempted horizon.
    #[error("no blow-up detected out to radius {horizon}; horizon doubling exhausted")]
    HorizonTooSmall { horizon: f64 },

    /// The tail-growth fit for the nonlinearity never stabilized.
    #[error("could not classify the tail growth of the nonlinearity after {doublings} doublings")]
    UnclassifiableTail { doublings: usize },

    /// Boundary blow-up was requested but the Keller-Osserman integral
    /// diverges, so every solution extends globally and none blows up.
    #[error("no boundary blow-up exists: the Keller-Osserman integral diverges for this nonlinearity")]
    KOHoldsNoBlowup,

    /// Fixed-point iteration failed to reach the requested tolerance.
    #[error("iteration did not converge: residual {residual:.3e} after {iters} iterations (tol {tol:.3e})")]
    NoConvergence {
        residual: f64,
        iters: usize,
        tol: f64,
    },

    /// Malformed user input: config files, flag grammar, parameter ranges.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// One or more named verification checks failed.
    #[error("verification failed: {failed} of {total} checks did not pass")]
    VerificationFailed { failed: usize, total: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
