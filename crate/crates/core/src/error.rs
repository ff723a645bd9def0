use alloc::boxed::Box;
use alloc::string::String;

use crate::ellipsoid::{Ellipsoid, FitReport};

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("expected {expected} joint angles, got {got}")]
    AngleCountMismatch { expected: usize, got: usize },
    #[error("decision variable {index} = {value} lies outside [{lower}, {upper}]")]
    OutOfBounds {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("point cloud is degenerate: affine rank {rank} < {dim}")]
    DegenerateCloud { rank: usize, dim: usize },
    #[error("no workspace sample survived the ground-contact filter")]
    EmptyWorkspace,
    #[error("matrix is not symmetric positive definite")]
    NotSpd,
    #[error("vector lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("chain is not a two-joint planar leg: {0}")]
    NotPlanarLeg(&'static str),
    #[error("ellipsoid fit stopped after {} iterations with gap {}", .report.iterations, .report.duality_gap)]
    MaxIterExceeded {
        ellipsoid: Box<Ellipsoid>,
        report: FitReport,
    },
}

impl Error {
    /// Numeric failures are the ones a candidate design can trigger on its own.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::DegenerateCloud { .. }
                | Error::EmptyWorkspace
                | Error::NotSpd
                | Error::MaxIterExceeded { .. }
        )
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}
