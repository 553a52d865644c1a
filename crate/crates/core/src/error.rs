use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("singular matrix: pivot {pivot:.3e} at column {column} below threshold {threshold:.3e}")]
    Singular {
        column: usize,
        pivot: f64,
        threshold: f64,
    },
    #[error("rank deficient: rank {rank} of {cols} columns (condition estimate {condition:.3e})")]
    RankDeficient {
        rank: usize,
        cols: usize,
        condition: f64,
    },
    #[error("root finder did not converge after {iterations} iterations (best residual {residual:.3e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        point: Vec<f64>,
    },
    #[error("time {t} outside horizon [{t0}, {tf}]")]
    OutsideHorizon { t: f64, t0: f64, tf: f64 },
    #[error("derivative order {order} above supported maximum {max}")]
    OrderTooHigh { order: usize, max: usize },
    #[error("flatness singularity: {0}")]
    FlatnessSingularity(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("junction mismatch at t = {t}: chain {chain}, order {order}, jump {jump:.3e}")]
    Discontinuous {
        t: f64,
        chain: usize,
        order: usize,
        jump: f64,
    },
    #[error("stencil underflow: {0}")]
    StencilUnderflow(String),
    #[error("missing multiplier: {0}")]
    MissingMultiplier(String),
    #[error("component not flagged free: {0}")]
    NotFree(String),
    #[error("degenerate junction times: {0}")]
    DegenerateJunctions(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("unsupported case: {0}")]
    Unsupported(String),
    #[error("all escalation steps failed: {0}")]
    EscalationFailed(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
