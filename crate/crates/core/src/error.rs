use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("step direction has norm {norm:e}, below the degeneracy tolerance")]
    DegenerateDirection { norm: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("the set provides no exact linear-optimization oracle")]
    ExactOracleUnavailable,

    #[error("simplex projection did not converge after {iterations} cycles (kkt residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("convex hull problem has no columns")]
    EmptyHull,

    #[error("linear functional is zero; every point of the set is a maximizer")]
    ZeroDirection,

    #[error("exact enumeration over {settings} settings exceeds the configured cap of {cap}")]
    BudgetExceeded { settings: usize, cap: usize },

    #[error("no separation: local bound {local_bound} is not below quantum value {quantum_value}")]
    NoSeparation { local_bound: f64, quantum_value: f64 },

    #[error("vector {index} has norm {norm}, expected a unit vector")]
    NonUnitVector { index: usize, norm: f64 },

    #[error("need at least {needed} usable points for a fit, found {found}")]
    InsufficientData { needed: usize, found: usize },

    #[error("visibility reached the floor {floor} without separating the quantum point")]
    Stalled { floor: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
