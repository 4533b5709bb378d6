use thiserror::Error;

/// Errors surfaced by the library's fallible operations.
#[derive(Debug, Error)]
pub enum Error {
    /// A scalar parameter is outside its admissible range.
    #[error("invalid parameter {name}: {value} ({reason})")]
    InvalidParam {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The affine operator alpha*w + beta*conj(w) is not invertible
    /// (|alpha| == |beta| collapses it onto a line).
    #[error("affine operator is degenerate: |alpha| = |beta| = {modulus}")]
    DegenerateOperator { modulus: f64 },

    /// Two fields (or a field and a sample block) live on different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(&'static str),

    /// Sample array shape does not match the grid.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Evaluation point is outside the closed unit disk radius range.
    #[error("radius {0} outside [0, 1]")]
    RadiusOutOfRange(f64),

    /// The map coefficients fail the univalence margin test.
    #[error("conformal map is not univalent on the disk: margin {margin} <= 0")]
    NonUnivalentMap { margin: f64 },

    /// The discrete system of the finite-difference oracle is singular.
    #[error("singular discrete system (zero pivot at row {row})")]
    SingularSystem { row: usize },

    /// An exact-solution family was requested with incompatible parameters.
    #[error("exact-solution family constraint violated: {0}")]
    FamilyConstraint(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
