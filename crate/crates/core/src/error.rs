use std::fmt;

use thiserror::Error;

/// Worst constraint violation found while testing a potential for reducibility.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Index of the sample point where the violation is largest.
    pub point: usize,
    /// Zero-based matrix entry.
    pub row: usize,
    pub col: usize,
    /// Absolute deviation between the input and the reconstructed entry.
    pub magnitude: f64,
    /// `magnitude` divided by the largest entry magnitude at that point.
    pub relative: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "entry ({},{}) at sample {} deviates by {:.3e} (relative {:.3e})",
            self.row + 1,
            self.col + 1,
            self.point,
            self.magnitude,
            self.relative
        )
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// `row` and `col` are zero-based; the message shows them one-based.
    #[error("not Hermitian at point {point}, entry ({},{}): deviation {deviation:.3e}", .row + 1, .col + 1)]
    NotHermitian {
        point: usize,
        row: usize,
        col: usize,
        deviation: f64,
    },

    #[error("degenerate mixing angle: {0}")]
    DegenerateAngle(String),

    #[error("UnderdeterminedAngle: both V14 and V23 vanish, the mixing angle cannot be recovered")]
    UnderdeterminedAngle,

    #[error("NotReducible: {violation}")]
    NotReducible {
        violation: Violation,
        /// Largest deviation of a per-point phase estimate from the circular mean.
        phi_spread: f64,
    },

    #[error("scheme mismatch: {0}")]
    SchemeMismatch(String),

    #[error("not admissible: {0}")]
    NotAdmissible(String),

    #[error("zero-energy mode: the closed form divides by E_n = 0")]
    ZeroEnergyMode,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("eigensolver failure: {0}")]
    Eigensolver(String),

    #[error("convergence study needs at least 3 grids, got {0}")]
    TooFewGrids(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
