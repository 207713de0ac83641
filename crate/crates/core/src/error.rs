use alloc::string::String;

/// Errors raised by system construction and the estimators.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[allow(missing_docs)] // fields are named after what the variant message prints
pub enum NdsError {
    /// The level generator cannot produce the requested level.
    #[error("level {level} is out of range (system provides levels 0..={max})")]
    LevelOutOfRange { level: usize, max: usize },
    /// A point index past the end of a finite carrier.
    #[error("point index {index} out of range for level {level} ({len} points)")]
    PointOutOfRange { level: usize, index: usize, len: usize },
    /// Invalid construction parameters.
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    /// Contraction images of a nonautonomous IFS intersect.
    #[error("contraction images overlap at level {level}: branches {first} and {second}")]
    Overlap { level: usize, first: usize, second: usize },
    /// Probability vector does not match the alphabet.
    #[error("dimension mismatch at level {level}: expected {expected}, got {got}")]
    DimensionMismatch { level: usize, expected: usize, got: usize },
    /// No candidate family covers the target set.
    #[error("no candidate family covers the target set at eps = {eps} (depths {n_lo}..={n_hi})")]
    Infeasible { eps: f64, n_lo: usize, n_hi: usize },
    /// The bisection bracket does not contain a crossing of 1.
    #[error("bracket [{lo}, {hi}] does not straddle the crossing (log-values {at_lo}, {at_hi})")]
    BracketFailure { lo: f64, hi: f64, at_lo: f64, at_hi: f64 },
    /// A value function expected to be non-increasing increased.
    #[error("value function increased between s = {s_lo} and s = {s_hi}")]
    NonMonotone { s_lo: f64, s_hi: f64 },
    /// Weighted cover value is zero, so no Frostman measure is claimed.
    #[error("weighted cover value is zero; no Frostman measure exists")]
    Degenerate,
    /// An empty point set where a non-empty one is required.
    #[error("empty set: {0}")]
    Empty(&'static str),
    /// Operation not supported by this backend or measure kind.
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
    /// A point outside the carrier of the codomain.
    #[error("point is outside the codomain carrier")]
    OutsideCodomain,
    /// The simplex solver hit its iteration cap.
    #[error("linear program did not converge in {0} pivots")]
    LpIterationLimit(usize),
    /// The linear program is unbounded.
    #[error("linear program is unbounded")]
    LpUnbounded,
    /// The linear program is infeasible.
    #[error("linear program is infeasible")]
    LpInfeasible,
}
