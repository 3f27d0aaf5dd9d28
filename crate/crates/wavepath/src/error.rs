use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid must be at least 3x3, got {nx}x{ny}")]
    GridTooSmall { nx: usize, ny: usize },
    #[error("obstacle ({x0}, {y0}, {x1}, {y1}) does not intersect the {nx}x{ny} grid")]
    ObstacleOutside {
        x0: i64,
        y0: i64,
        x1: i64,
        y1: i64,
        nx: usize,
        ny: usize,
    },
    #[error("every node of the grid is blocked")]
    AllBlocked,
    #[error("node ({x}, {y}) is outside the {nx}x{ny} grid")]
    OutOfRange { x: i64, y: i64, nx: usize, ny: usize },
    #[error("node ({x}, {y}) is blocked")]
    BlockedNode { x: usize, y: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },
    #[error("non-finite {population} state at node ({x}, {y}) in step {step}")]
    NonFinite {
        population: &'static str,
        x: usize,
        y: usize,
        step: u64,
    },
    #[error("bump lost: attractor activity summed to zero")]
    BumpLost,
    #[error("warm-up did not settle into a single connected bump ({components} components)")]
    BumpFragmented { components: usize },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerical integration itself.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. } | Error::BumpLost | Error::BumpFragmented { .. }
        )
    }
}
