//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown symbol '{0}'")]
    UnknownSymbol(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown manifold '{0}'")]
    UnknownManifold(String),

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("point outside chart box")]
    OutsideChart,

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("singular metric: pivot below threshold")]
    SingularMetric,

    #[error("degenerate plane")]
    DegeneratePlane,

    #[error("scaling field must be positive on the chart")]
    NonPositiveScaling,

    #[error("fiber vector is zero where u != 0 is required")]
    ZeroFiber,

    #[error("trajectory left the chart box at t = {0}")]
    ChartExit(f64),

    #[error("non-finite state encountered during integration")]
    NonFiniteState,

    #[error("initial tangent vectors are parallel")]
    ParallelVectors,

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
