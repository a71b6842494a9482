use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("radial grid requires at least {min} points, got {actual}")]
    TooFewPoints { min: usize, actual: usize },

    #[error("invalid grid extent: x_min = {x_min}, x_max = {x_max}")]
    InvalidExtent { x_min: f64, x_max: f64 },

    #[error("sample length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("profiles live on different grids")]
    GridMismatch,

    #[error("negative wavenumber or momentum: {0}")]
    NegativeMomentum(f64),

    #[error("matching point x = {x_match} lies outside the grid [{x_min}, {x_max}]")]
    MatchOutsideGrid { x_match: f64, x_min: f64, x_max: f64 },

    #[error("radial amplitude overflow near x = {x}: parameters are unphysical")]
    Overflow { x: f64 },

    #[error("no bound state with {nodes} node(s) bracketed in [{lo}, {hi}]")]
    NoBoundState { nodes: usize, lo: f64, hi: f64 },

    #[error("converged state has {found} node(s), expected {expected}")]
    WrongNodeCount { expected: usize, found: usize },

    #[error("invalid configuration: {field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("self-consistent loop did not converge after {iterations} iterations (last residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64, residual_history: Vec<f64> },

    #[error("continuation step {step} failed: {source}")]
    Continuation {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("solution collapsed to the trivial zero state")]
    TrivialSolution,

    #[error("input solution is not converged")]
    NotConvergedInput,

    #[error("no physical-electron branch for a0 = {0} (requires a0 < 0)")]
    NonNegativeEigenvalue(f64),

    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("{0} is not implemented")]
    NotImplemented(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
