//! Trace geometry on the cone of positive invertible elements of a
//! finite-dimensional von Neumann algebra.
//!
//! The algebra is a direct sum of matrix blocks `⊕_i M_{n_i}(ℂ)` carrying a
//! faithful normalized trace. Its positive invertible elements form a
//! nonpositively curved metric space under the trace 2-norm distance
//! `d(a, b) = ‖ln(a^{-1/2} b a^{-1/2})‖₂`, with explicit geodesics
//! `t ↦ a^{1/2} (a^{-1/2} b a^{-1/2})^t a^{1/2}`. On top of that geometry the
//! crate provides geodesically convex hulls, minimal enclosing balls
//! (circumcenters), Karcher means, finite group closure, and the
//! unitarization of uniformly bounded matrix groups by conjugation with the
//! circumcenter of the orbit of the identity.

pub mod algebra;
pub mod circumcenter;
pub mod error;
pub mod geometry;
pub mod group;
pub mod hull;
pub mod karcher;
pub mod sample;
pub mod spectral;
pub mod tol;
pub mod unitarize;

pub use algebra::{
    inner, norm2, trace, uniform_norm, AlgebraElement, BlockAlgebra, BlockMatrix, Scalar,
};
pub use circumcenter::{circumcenter, default_max_iter, max_radius, EnclosingBall};
pub use error::{ConeError, Result};
pub use geometry::{congruence, distance, in_band, midpoint, Band, GeodesicSegment};
pub use group::{
    close_group, close_group_best_effort, close_group_in, orbit_of_identity, ClosureOverflow,
    GroupTable,
};
pub use hull::{hull_expand, HullApproximation, HullOptions};
pub use karcher::{karcher_mean, KarcherMean};
pub use sample::{
    sample_haar_unitary, sample_hermitian, sample_invertible, sample_positive_in_band,
};
pub use spectral::{
    exp_hermitian, hermitian_eig, positivize, spectral_map, BlockEig, PositiveElement, SpectralFn,
};
pub use unitarize::{
    certificate_residuals, unitarize, unitarize_in, unitarize_table, verify_certificate, Method,
    Residuals, UnitarizationCertificate, UnitarizeOptions,
};
