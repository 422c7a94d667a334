use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("probability out of range at index {index}: {value} (must lie in [0, 1])")]
    InvalidProbability { index: usize, value: f64 },

    #[error("empty probability vector (need n >= 1)")]
    EmptyVector,

    #[error("brute-force enumeration limited to n <= {limit}, got n = {n}")]
    SizeLimit { n: usize, limit: usize },

    #[error("node count {got} under-resolves a degree-{degree} polynomial (need >= {need})")]
    UnderResolved { degree: usize, need: usize, got: usize },

    #[error("no saddle radius for k = {k}: admissible range is {min_k}..{max_k}")]
    NoSaddle { k: usize, min_k: usize, max_k: usize },

    #[error("degenerate instance: every p_j is 0 or 1, saddle machinery undefined")]
    DegenerateInstance,

    #[error("quadrature did not converge: last doubling changed the value by {rel_change:.3e} (> {limit:.1e} relative) at {nodes} nodes")]
    QuadratureNonConvergence {
        nodes: usize,
        rel_change: f64,
        limit: f64,
    },

    #[error("divergence is infinite: mass {mass:.3e} at k = {k} where the reference law vanishes")]
    InfiniteDivergence { k: usize, mass: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("extended-precision re-evaluation still overflowed or produced non-finite distances")]
    EscalationFailure,

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
