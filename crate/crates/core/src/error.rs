use thiserror::Error;

/// Errors raised while configuring or running a simulation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("time grids differ: {0}")]
    GridMismatch(String),

    #[error(
        "delay {delay} is not an integer multiple of the grid step {step}; \
         choose a step that divides the delay (e.g. TimeGrid::aligned)"
    )]
    DelayNotOnGrid { delay: f64, step: f64 },

    #[error("impulse at tau = {0} does not sit on a grid sample")]
    ImpulseOffGrid(f64),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("polarization is not transverse to the beam: {0}")]
    NonTransverse(String),

    #[error("degenerate trace: {0}")]
    DegenerateTrace(String),

    #[error("config parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}
