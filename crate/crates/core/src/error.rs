//! Error type shared by all cone-geometry operations.

use thiserror::Error;

/// Errors produced by algebra construction, spectral calculus, geometry, and
/// the solvers built on top of them.
#[derive(Debug, Clone, Error)]
pub enum ConeError {
    /// Block dimensions and trace weights do not describe a valid algebra.
    #[error("invalid algebra: {reason}")]
    InvalidAlgebra { reason: String },

    /// An element's blocks do not match its algebra, or two elements from
    /// different algebras were combined.
    #[error("malformed element: {reason}")]
    MalformedElement { reason: String },

    /// A Hermitian input was required but the relative defect exceeds the
    /// tolerance.
    #[error("element is not Hermitian (relative defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    /// A positive invertible element was required but the smallest eigenvalue
    /// is at or below the positivity floor.
    #[error("element is not positive definite (min eigenvalue {min_eig:.3e})")]
    NotPositive { min_eig: f64 },

    /// An invertible element was required but the smallest singular value is
    /// at or below the positivity floor.
    #[error("element is not invertible (min singular value {sigma_min:.3e})")]
    NotInvertible { sigma_min: f64 },

    /// A spectral map was refused because the condition number exceeds the
    /// supported ceiling.
    #[error(
        "element too ill-conditioned for spectral calculus (condition number {condition:.3e})"
    )]
    IllConditioned { condition: f64 },

    /// A parameter was outside its documented domain.
    #[error("invalid parameter: {reason}")]
    InvalidParameter { reason: String },

    /// An operation that needs at least one point received an empty set.
    #[error("operation requires a non-empty set of points")]
    EmptySet,

    /// Hull expansion hit its point budget while distinct new points were
    /// still being produced.
    #[error("hull expansion exceeded its budget of {max_points} points at depth {depth}")]
    BudgetExceeded { max_points: usize, depth: usize },

    /// Group closure stopped before the multiplication table closed.
    /// `norm_growth` distinguishes divergence (products escaping every
    /// uniform bound) from a genuinely large but bounded group.
    #[error("group closure exceeded {max_order} elements (norm growth: {norm_growth})")]
    OrderExceeded { max_order: usize, norm_growth: bool },

    /// An iterative solver exhausted its iteration budget without meeting
    /// its tolerance.
    #[error("solver did not converge within {max_iter} iterations (residual {residual:.3e})")]
    NoConvergence { max_iter: usize, residual: f64 },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, ConeError>;
