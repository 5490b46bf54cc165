//! Unitarization of uniformly bounded matrix groups.
//!
//! A group `H` of invertibles with `sup_{h ∈ H} ‖h‖ = M < ∞` acts on the
//! cone by congruence `a ↦ h a h*`, moving the orbit of the identity
//! `{h h* : h ∈ H}` inside the band `[M^{-2}, M²]`. The orbit is bounded, so
//! it has a unique circumcenter `a`; since each `h` acts isometrically
//! and permutes the orbit, uniqueness forces `h a h* = a` for every `h`.
//! Writing `s = a^{-1/2}`, the identity
//! `(s h s^{-1})(s h s^{-1})* = a^{-1/2} (h a h*) a^{-1/2} = 1`
//! shows `s h s^{-1}` is unitary: conjugation by `s` unitarizes the group.
//! Operator monotonicity of the square root puts `s` in the band
//! `[M^{-1}, M]`.
//!
//! The certificate produced here is checkable by recomputation alone: it
//! carries the center, the unitarizer, the band, and the measured residuals.

use rayon::prelude::*;

use crate::algebra::{uniform_norm, AlgebraElement};
use crate::circumcenter::circumcenter;
use crate::error::{ConeError, Result};
use crate::geometry::{congruence, distance, in_band, Band};
use crate::group::{close_group_in, orbit_of_identity, GroupTable};
use crate::karcher::karcher_mean;
use crate::spectral::PositiveElement;
use crate::tol::DEFAULT_SOLVER_TOL;

/// Which center of the orbit to use. The circumcenter is the method backed
/// by the fixed-point argument above; the Karcher mean is an alternative
/// congruence-equivariant center that agrees on symmetric orbits and serves
/// as an independent cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Circumcenter,
    Karcher,
}

/// Options for [`unitarize`].
#[derive(Debug, Clone)]
pub struct UnitarizeOptions {
    /// Solver tolerance (`0` selects [`DEFAULT_SOLVER_TOL`]).
    pub tol: f64,
    /// Solver iteration budget (`0` selects the solver default).
    pub max_iter: usize,
    /// Group closure element cap.
    pub max_order: usize,
    /// Center to compute.
    pub method: Method,
    /// Keep going with a partial closure table instead of failing; the
    /// certificate then reports `group_closed = false` and its residuals
    /// speak for themselves.
    pub allow_partial: bool,
}

impl Default for UnitarizeOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_SOLVER_TOL,
            max_iter: 0,
            max_order: 10_000,
            method: Method::Circumcenter,
            allow_partial: false,
        }
    }
}

/// Proof-carrying output of [`unitarize`]: everything needed to re-derive
/// the claim `s H s^{-1} ⊆ U(A)` is either in the certificate or
/// recomputable from the group table.
#[derive(Debug, Clone)]
pub struct UnitarizationCertificate {
    /// Center of the orbit of the identity (the congruence fixed point).
    pub center: PositiveElement,
    /// `center^{-1/2}`; conjugation by it unitarizes the group.
    pub unitarizer: PositiveElement,
    /// Band `[M^{-1}, M]` that must contain the unitarizer.
    pub band: Band,
    /// `max_h ‖(s h s^{-1})(s h s^{-1})* - 1‖` over the table.
    pub residual_unitarity: f64,
    /// `max_h d(h · center · h*, center)` over the table.
    pub residual_fixed_point: f64,
    /// Whether every orbit point lies in `[M^{-2}, M²]`.
    pub orbit_band_ok: bool,
    /// Whether the unitarizer lies in `[M^{-1}, M]`.
    pub unitarizer_band_ok: bool,
    /// Whether the center solver met its tolerance.
    pub converged: bool,
    /// Method that produced the center.
    pub method: Method,
    /// Elements discovered during closure.
    pub group_order: usize,
    /// Whether the multiplication table closed within `max_order`.
    pub group_closed: bool,
    /// Uniform bound `M` over the discovered elements.
    pub uniform_bound: f64,
    /// Iterations spent by the center solver.
    pub solver_iterations: usize,
}

/// Residuals and band checks recomputed from scratch for a given center and
/// unitarizer against a group table.
#[derive(Debug, Clone, Copy)]
pub struct Residuals {
    pub unitarity: f64,
    pub fixed_point: f64,
    pub orbit_band_ok: bool,
    pub unitarizer_band_ok: bool,
}

/// Recomputes certificate residuals by brute force: conjugate every table
/// element and measure unitarity; move the center by every element and
/// measure displacement; recheck both band memberships.
pub fn certificate_residuals(
    center: &PositiveElement,
    unitarizer: &PositiveElement,
    table: &GroupTable,
) -> Result<Residuals> {
    let s = unitarizer.element().clone();
    let s_inv = unitarizer.inv()?.element().clone();
    let one = AlgebraElement::identity(s.algebra());

    let per_element: Vec<(f64, f64)> = table
        .elements()
        .par_iter()
        .map(|h| {
            let q = &(&s * h) * &s_inv;
            let unit = uniform_norm(&(&(&q * &q.adjoint()) - &one));
            let moved = congruence(h, center)?;
            let fixed = distance(&moved, center)?;
            Ok((unit, fixed))
        })
        .collect::<Result<_>>()?;
    let unitarity = per_element.iter().map(|p| p.0).fold(0.0f64, f64::max);
    let fixed_point = per_element.iter().map(|p| p.1).fold(0.0f64, f64::max);

    let m = table.uniform_bound().max(1.0);
    let orbit_band = Band::enclosing(1.0 / (m * m), m * m)?;
    let s_band = Band::enclosing(1.0 / m, m)?;
    let orbit = orbit_of_identity(table)?;
    let orbit_band_ok = orbit.iter().all(|p| in_band(p, &orbit_band));
    let unitarizer_band_ok = in_band(unitarizer, &s_band);

    Ok(Residuals {
        unitarity,
        fixed_point,
        orbit_band_ok,
        unitarizer_band_ok,
    })
}

/// Unitarizes the group generated by `generators`.
///
/// Pipeline: close the group, collect the orbit of the identity, compute its
/// center by the chosen method, take `s = center^{-1/2}`, and measure the
/// certificate residuals by recomputation over the whole table.
///
/// Errors: [`ConeError::OrderExceeded`] when closure overflows (norm growth
/// means the group cannot be unitarized at all; an order cap may just be too
/// small), suppressed by `allow_partial`. A center solver that misses its
/// tolerance is not an error: the certificate is still emitted, with
/// `converged = false` and residuals that speak for themselves, and the
/// accept/reject threshold is left to the caller (see
/// [`verify_certificate`]).
pub fn unitarize(
    generators: &[AlgebraElement],
    options: &UnitarizeOptions,
) -> Result<UnitarizationCertificate> {
    let alg = match generators.first() {
        Some(g) => g.algebra().clone(),
        None => return Err(ConeError::EmptySet),
    };
    unitarize_in(&alg, generators, options)
}

/// [`unitarize`] with the ambient algebra given explicitly, so an empty
/// generator set is meaningful: it denotes the trivial group `{1}`, which is
/// already unitary (center 1, unitarizer 1, zero residuals).
pub fn unitarize_in(
    algebra: &std::sync::Arc<crate::algebra::BlockAlgebra>,
    generators: &[AlgebraElement],
    options: &UnitarizeOptions,
) -> Result<UnitarizationCertificate> {
    let (table, overflow) = close_group_in(algebra, generators, options.max_order)?;
    if let Some(kind) = overflow {
        if !options.allow_partial {
            return Err(ConeError::OrderExceeded {
                max_order: options.max_order,
                norm_growth: kind == crate::group::ClosureOverflow::NormGrowth,
            });
        }
    }
    unitarize_table(&table, options)
}

/// Unitarization from an already-closed (or deliberately partial) table.
pub fn unitarize_table(
    table: &GroupTable,
    options: &UnitarizeOptions,
) -> Result<UnitarizationCertificate> {
    let tol = if options.tol <= 0.0 {
        DEFAULT_SOLVER_TOL
    } else {
        options.tol
    };
    let orbit = orbit_of_identity(table)?;

    let (center, converged, solver_iterations) = match options.method {
        Method::Circumcenter => {
            let ball = circumcenter(&orbit, tol, options.max_iter)?;
            (ball.center, ball.converged, ball.iterations)
        }
        Method::Karcher => {
            let km = karcher_mean(&orbit, tol, options.max_iter)?;
            (km.mean, km.converged, km.iterations)
        }
    };

    let unitarizer = center.inv_sqrt()?;
    let m = table.uniform_bound().max(1.0);
    let band = Band::enclosing(1.0 / m, m)?;
    let res = certificate_residuals(&center, &unitarizer, table)?;

    Ok(UnitarizationCertificate {
        center,
        unitarizer,
        band,
        residual_unitarity: res.unitarity,
        residual_fixed_point: res.fixed_point,
        orbit_band_ok: res.orbit_band_ok,
        unitarizer_band_ok: res.unitarizer_band_ok,
        converged,
        method: options.method,
        group_order: table.order(),
        group_closed: table.closed(),
        uniform_bound: table.uniform_bound(),
        solver_iterations,
    })
}

/// Pure recomputation check of a certificate against a table: recomputes
/// both residuals and both band memberships from the certificate's center
/// and unitarizer, and accepts iff the residuals are at most `tol` and the
/// bands hold. Internal numerical failures count as rejection.
pub fn verify_certificate(cert: &UnitarizationCertificate, table: &GroupTable, tol: f64) -> bool {
    match certificate_residuals(&cert.center, &cert.unitarizer, table) {
        Ok(r) => {
            r.unitarity <= tol && r.fixed_point <= tol && r.orbit_band_ok && r.unitarizer_band_ok
        }
        Err(_) => false,
    }
}
