//! Numerical tolerances used across the crate.
//!
//! Every constant is a contract: routines that check an inequality against one
//! of these values document which constant they use. Tests reference the same
//! constants rather than repeating literals.

/// Relative Hermitian defect allowed before an element is rejected as
/// non-Hermitian: `‖x - x*‖_F ≤ EPS_HERM * (1 + ‖x‖_F)` per block.
pub const EPS_HERM: f64 = 1e-10;

/// Smallest eigenvalue admitted for a positive invertible element. Anything
/// at or below this is treated as singular.
pub const EPS_POS: f64 = 1e-12;

/// Residual allowed in an eigendecomposition: `‖x v - λ v‖ ≤ EPS_EIG * ‖x‖`.
pub const EPS_EIG: f64 = 1e-10;

/// Condition-number ceiling for spectral maps. Beyond this the inverse square
/// root loses too many digits for downstream distance computations.
pub const KAPPA_MAX: f64 = 1e12;

/// Slack when testing spectral band membership: eigenvalues may undershoot
/// the lower edge or overshoot the upper edge by this amount.
pub const EPS_BAND: f64 = 1e-10;

/// Relative 2-norm threshold under which two cone points are considered the
/// same during hull expansion: `‖x - y‖₂ ≤ HULL_DEDUP_REL * (1 + ‖x‖₂)`.
pub const HULL_DEDUP_REL: f64 = 1e-9;

/// Relative uniform-norm threshold under which two group elements are
/// identified during closure: `‖x - y‖ ≤ GROUP_DEDUP_REL * (1 + ‖x‖)`.
pub const GROUP_DEDUP_REL: f64 = 1e-8;

/// Uniform-norm ceiling during group closure. A product exceeding this is
/// diverging, so the generated group cannot be uniformly bounded.
pub const NORM_GROWTH_LIMIT: f64 = 1e6;

/// Default convergence tolerance for the circumcenter, Karcher, and
/// unitarization solvers.
pub const DEFAULT_SOLVER_TOL: f64 = 1e-8;
