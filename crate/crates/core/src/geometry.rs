//! Nonpositively curved geometry on the cone of positive invertibles.
//!
//! Distance: `d(a, b) = ‖ln(a^{-1/2} b a^{-1/2})‖₂`.
//! Geodesic: `γ_{a,b}(t) = a^{1/2} (a^{-1/2} b a^{-1/2})^t a^{1/2}`, the
//! unique metric geodesic with `γ(0) = a`, `γ(1) = b`.
//! Both are invariant under the congruence action `a ↦ g a g*` of the
//! invertible group, and the space satisfies the semi-parallelogram law,
//! so it behaves like a complete CAT(0) space.

use crate::algebra::AlgebraElement;
use crate::error::{ConeError, Result};
use crate::spectral::{positivize, BlockEig, PositiveElement};
use crate::tol::{EPS_BAND, EPS_POS};

/// Squared distance contribution from eigenvalues `μ` of `a^{-1/2} b a^{-1/2}`:
/// `d² = Σ_i (λ_i / n_i) Σ_j ln(μ_ij)²`.
fn distance_from_relative_eig(eig: &[BlockEig], a: &PositiveElement) -> Result<f64> {
    let alg = a.algebra();
    let mut sq = 0.0;
    for ((e, &n), &w) in eig.iter().zip(alg.block_dims()).zip(alg.trace_weights()) {
        for &mu in e.values() {
            if mu.is_nan() || mu <= EPS_POS {
                return Err(ConeError::NotPositive { min_eig: mu });
            }
            let l = mu.ln();
            sq += w * l * l / n as f64;
        }
    }
    Ok(sq.sqrt())
}

/// The geodesic segment from `a` to `b`, with the spectral data of
/// `w = a^{-1/2} b a^{-1/2}` cached so that evaluation at any parameter
/// costs one spectral reassembly and two multiplications.
#[derive(Debug, Clone)]
pub struct GeodesicSegment {
    a_sqrt: AlgebraElement,
    a_inv_sqrt: AlgebraElement,
    w_eig: Vec<BlockEig>,
    start: PositiveElement,
    end: PositiveElement,
    length: f64,
}

impl GeodesicSegment {
    /// Prepares the segment `γ_{a,b}`. Fails if either endpoint is too
    /// ill-conditioned for the inverse square root.
    pub fn new(a: &PositiveElement, b: &PositiveElement) -> Result<Self> {
        assert!(
            a.algebra() == b.algebra(),
            "geodesic endpoints must share an algebra"
        );
        let a_sqrt = a.sqrt()?;
        let a_inv_sqrt = a.inv_sqrt()?;
        let w = relative_form(a_inv_sqrt.element(), b)?;
        let length = distance_from_relative_eig(w.eig(), a)?;
        Ok(Self {
            a_sqrt: a_sqrt.element().clone(),
            a_inv_sqrt: a_inv_sqrt.element().clone(),
            w_eig: w.eig().to_vec(),
            start: a.clone(),
            end: b.clone(),
            length,
        })
    }

    /// Evaluates `γ(t) = a^{1/2} w^t a^{1/2}`. Any real `t` is allowed;
    /// `t ∉ [0, 1]` extends the geodesic beyond its endpoints.
    pub fn eval(&self, t: f64) -> Result<PositiveElement> {
        if !t.is_finite() {
            return Err(ConeError::InvalidParameter {
                reason: format!("geodesic parameter must be finite, got {t}"),
            });
        }
        if t == 0.0 {
            return Ok(self.start.clone());
        }
        if t == 1.0 {
            return Ok(self.end.clone());
        }
        let alg = self.start.algebra();
        let blocks: Vec<_> = self.w_eig.iter().map(|e| e.map(|mu| mu.powf(t))).collect();
        let wt = AlgebraElement::new(std::sync::Arc::clone(alg), blocks)
            .expect("spectral map preserves block shapes");
        let g = &(&self.a_sqrt * &wt) * &self.a_sqrt;
        positivize(&g)
    }

    /// Geodesic length, equal to `distance(a, b)`.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Cached `a^{1/2}`.
    pub fn base_sqrt(&self) -> &AlgebraElement {
        &self.a_sqrt
    }

    /// Cached `a^{-1/2}`, the chart congruence at the start point.
    pub fn base_inv_sqrt(&self) -> &AlgebraElement {
        &self.a_inv_sqrt
    }

    /// Start point `γ(0)`.
    pub fn start(&self) -> &PositiveElement {
        &self.start
    }

    /// End point `γ(1)`.
    pub fn end(&self) -> &PositiveElement {
        &self.end
    }
}

/// Trace 2-norm geodesic distance `d(a, b) = ‖ln(a^{-1/2} b a^{-1/2})‖₂`,
/// computed directly from the eigenvalues of `a^{-1/2} b a^{-1/2}`.
pub fn distance(a: &PositiveElement, b: &PositiveElement) -> Result<f64> {
    assert!(
        a.algebra() == b.algebra(),
        "distance requires elements of the same algebra"
    );
    let a_inv_sqrt = a.inv_sqrt()?;
    let w = relative_form(a_inv_sqrt.element(), b)?;
    distance_from_relative_eig(w.eig(), a)
}

/// The relative form `a^{-1/2} b a^{-1/2}` given `a^{-1/2}`, factored as
/// `v* v` with `v = b^{1/2} a^{-1/2}`. The factored product is Hermitian by
/// construction; the plain triple product picks up an asymmetry of order
/// eps times the operands' condition numbers, which can breach the
/// Hermitian gate when both are ill-conditioned.
pub(crate) fn relative_form(
    a_inv_sqrt: &AlgebraElement,
    b: &PositiveElement,
) -> Result<PositiveElement> {
    let v = b.sqrt()?.element() * a_inv_sqrt;
    positivize(&(&v.adjoint() * &v))
}

/// Geodesic midpoint `γ_{a,b}(1/2)`, the unique metric midpoint.
pub fn midpoint(a: &PositiveElement, b: &PositiveElement) -> Result<PositiveElement> {
    GeodesicSegment::new(a, b)?.eval(0.5)
}

/// Congruence action `I_g(a) = g a g*` for invertible `g`; an isometry of
/// the cone that maps geodesics to geodesics.
pub fn congruence(g: &AlgebraElement, a: &PositiveElement) -> Result<PositiveElement> {
    assert!(
        g.algebra() == a.algebra(),
        "congruence requires elements of the same algebra"
    );
    let sigma_min = g.smallest_singular_value();
    if sigma_min.is_nan() || sigma_min <= EPS_POS {
        return Err(ConeError::NotInvertible { sigma_min });
    }
    // Factored as (g a^{1/2})(g a^{1/2})* rather than (g a) g*: the product
    // w w* is Hermitian by construction, while the unfactored form picks up
    // an asymmetry of order eps * cond(g)^2 that can breach the Hermitian
    // gate for ill-conditioned g.
    let w = g * a.sqrt()?.element();
    positivize(&(&w * &w.adjoint()))
}

/// A spectral band `{a : c₁ ≤ a ≤ c₂}` inside the cone. Bands are closed,
/// geodesically convex, and stable under congruence by unitaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    c1: f64,
    c2: f64,
}

impl Band {
    /// Requires `0 < c1 < c2`, both finite.
    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        if !(c1.is_finite() && c2.is_finite() && 0.0 < c1 && c1 < c2) {
            return Err(ConeError::InvalidParameter {
                reason: format!("band requires 0 < c1 < c2, got [{c1}, {c2}]"),
            });
        }
        Ok(Self { c1, c2 })
    }

    /// Band enclosing `[lo, hi]`, widened just enough to stay a valid band
    /// when `lo == hi` (e.g. the band of a unitary group, where both edges
    /// are 1).
    pub fn enclosing(lo: f64, hi: f64) -> Result<Self> {
        let (lo, hi) = (lo.min(hi), lo.max(hi));
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0) {
            return Err(ConeError::InvalidParameter {
                reason: format!("band edges must be finite and positive, got [{lo}, {hi}]"),
            });
        }
        let pad = 1e-12 * (1.0 + hi);
        if hi - lo > pad {
            Self::new(lo, hi)
        } else {
            Self::new(lo - pad, hi + pad)
        }
    }

    /// Lower edge `c1`.
    pub fn lower(&self) -> f64 {
        self.c1
    }

    /// Upper edge `c2`.
    pub fn upper(&self) -> f64 {
        self.c2
    }

    /// Diameter bound for the band: any two members are at distance at most
    /// `ln(c2/c1)`, because the eigenvalues of `a^{-1/2} b a^{-1/2}` lie in
    /// `[c1/c2, c2/c1]`.
    pub fn diameter_bound(&self) -> f64 {
        (self.c2 / self.c1).ln()
    }
}

/// Whether `a`'s spectrum lies in the band, with [`EPS_BAND`] slack at both
/// edges.
pub fn in_band(a: &PositiveElement, band: &Band) -> bool {
    a.min_eig() >= band.lower() - EPS_BAND && a.max_eig() <= band.upper() + EPS_BAND
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{norm2, uniform_norm, AlgebraElement, BlockAlgebra, Scalar};
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn m2() -> Arc<BlockAlgebra> {
        BlockAlgebra::full_matrix(2).unwrap()
    }

    fn diag(alg: &Arc<BlockAlgebra>, d: &[f64]) -> PositiveElement {
        positivize(&AlgebraElement::real_diagonal(alg, &[d.to_vec()]).unwrap()).unwrap()
    }

    #[test]
    fn distance_on_commuting_pair() {
        // d(1, diag(4, 1/4)) in M2 with weight 1:
        // d² = (ln4)²/2 + (ln(1/4))²/2 = (ln4)², so d = ln 4 ≈ 1.386294361120.
        let alg = m2();
        let one = PositiveElement::one(&alg);
        let b = diag(&alg, &[4.0, 0.25]);
        let d = distance(&one, &b).unwrap();
        assert_relative_eq!(d, 4.0f64.ln(), max_relative = 1e-13);
    }

    #[test]
    fn distance_scalar_example() {
        // d(1, e²·1) = 2 exactly, in any algebra.
        let alg = BlockAlgebra::new(vec![2, 3], vec![0.4, 0.6]).unwrap();
        let one = PositiveElement::one(&alg);
        let b = positivize(&AlgebraElement::identity(&alg).scale((2.0f64).exp())).unwrap();
        assert_relative_eq!(distance(&one, &b).unwrap(), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn distance_axioms_on_fixed_triple() {
        let alg = m2();
        let a = diag(&alg, &[1.0, 2.0]);
        let b = positivize(&AlgebraElement::from_fn(&alg, |_, i, j| match (i, j) {
            (0, 0) => Scalar::new(3.0, 0.0),
            (1, 1) => Scalar::new(1.5, 0.0),
            (0, 1) => Scalar::new(0.4, 0.2),
            (1, 0) => Scalar::new(0.4, -0.2),
            _ => unreachable!(),
        }))
        .unwrap();
        let c = diag(&alg, &[0.5, 5.0]);

        let dab = distance(&a, &b).unwrap();
        let dba = distance(&b, &a).unwrap();
        let dac = distance(&a, &c).unwrap();
        let dbc = distance(&b, &c).unwrap();
        assert_relative_eq!(dab, dba, max_relative = 1e-12);
        assert!(distance(&a, &a).unwrap() < 1e-12);
        assert!(dab > 0.0);
        assert!(dac <= dab + dbc + 1e-12, "triangle inequality");
    }

    #[test]
    fn geodesic_endpoints_and_midpoint() {
        let alg = m2();
        let a = diag(&alg, &[1.0, 4.0]);
        let b = diag(&alg, &[9.0, 1.0]);
        let seg = GeodesicSegment::new(&a, &b).unwrap();

        let g0 = seg.eval(0.0).unwrap();
        let g1 = seg.eval(1.0).unwrap();
        assert!(norm2(&(g0.element() - a.element())) < 1e-13);
        assert!(norm2(&(g1.element() - b.element())) < 1e-13);

        // Commuting case: γ(t) = diag(9^t, 4^{1-t}).
        let g_half = seg.eval(0.5).unwrap();
        let expect = diag(&alg, &[3.0, 2.0]);
        assert!(norm2(&(g_half.element() - expect.element())) < 1e-12);

        // Midpoint is equidistant and halves the length.
        let m = midpoint(&a, &b).unwrap();
        let d = distance(&a, &b).unwrap();
        assert_relative_eq!(distance(&a, &m).unwrap(), d / 2.0, max_relative = 1e-11);
        assert_relative_eq!(distance(&m, &b).unwrap(), d / 2.0, max_relative = 1e-11);
        assert_relative_eq!(seg.length(), d, max_relative = 1e-12);
    }

    #[test]
    fn geodesic_parametrization_is_constant_speed() {
        let alg = m2();
        let a = diag(&alg, &[2.0, 0.5]);
        let b = positivize(&AlgebraElement::from_fn(&alg, |_, i, j| match (i, j) {
            (0, 0) => Scalar::new(1.0, 0.0),
            (1, 1) => Scalar::new(2.0, 0.0),
            (0, 1) => Scalar::new(0.3, -0.1),
            (1, 0) => Scalar::new(0.3, 0.1),
            _ => unreachable!(),
        }))
        .unwrap();
        let seg = GeodesicSegment::new(&a, &b).unwrap();
        let d = seg.length();
        for &t in &[0.25, 0.5, 0.75] {
            let gt = seg.eval(t).unwrap();
            assert_relative_eq!(distance(&a, &gt).unwrap(), t * d, max_relative = 1e-10);
        }
    }

    #[test]
    fn congruence_is_isometric() {
        let alg = m2();
        let a = diag(&alg, &[1.0, 3.0]);
        let b = diag(&alg, &[2.0, 0.7]);
        // Invertible non-normal g.
        let g = AlgebraElement::from_fn(&alg, |_, i, j| match (i, j) {
            (0, 0) => Scalar::new(1.0, 0.5),
            (0, 1) => Scalar::new(-2.0, 0.0),
            (1, 0) => Scalar::new(0.5, 0.0),
            (1, 1) => Scalar::new(0.0, 1.0),
            _ => unreachable!(),
        });
        let ga = congruence(&g, &a).unwrap();
        let gb = congruence(&g, &b).unwrap();
        assert_relative_eq!(
            distance(&ga, &gb).unwrap(),
            distance(&a, &b).unwrap(),
            max_relative = 1e-10
        );

        // Congruence commutes with the geodesic map.
        let m = midpoint(&a, &b).unwrap();
        let gm = congruence(&g, &m).unwrap();
        let mg = midpoint(&ga, &gb).unwrap();
        assert!(norm2(&(gm.element() - mg.element())) < 1e-10);

        // Singular g rejected.
        let sing = AlgebraElement::real_diagonal(&alg, &[vec![1.0, 0.0]]).unwrap();
        assert!(matches!(
            congruence(&sing, &a),
            Err(ConeError::NotInvertible { .. })
        ));
    }

    #[test]
    fn semi_parallelogram_law_on_fixed_points() {
        // d(x, y)² + 4 d(w, z)² ≤ 2 d(w, x)² + 2 d(w, y)², z = midpoint(x, y).
        let alg = m2();
        let x = diag(&alg, &[1.0, 2.0]);
        let y = diag(&alg, &[3.0, 0.4]);
        let w = positivize(&AlgebraElement::from_fn(&alg, |_, i, j| match (i, j) {
            (0, 0) => Scalar::new(2.0, 0.0),
            (1, 1) => Scalar::new(1.0, 0.0),
            (0, 1) => Scalar::new(-0.3, 0.4),
            (1, 0) => Scalar::new(-0.3, -0.4),
            _ => unreachable!(),
        }))
        .unwrap();
        let z = midpoint(&x, &y).unwrap();
        let dxy = distance(&x, &y).unwrap();
        let dwz = distance(&w, &z).unwrap();
        let dwx = distance(&w, &x).unwrap();
        let dwy = distance(&w, &y).unwrap();
        assert!(
            dxy * dxy + 4.0 * dwz * dwz <= 2.0 * (dwx * dwx + dwy * dwy) + 1e-10,
            "semi-parallelogram law violated"
        );
    }

    #[test]
    fn band_membership_and_convexity() {
        let alg = m2();
        let band = Band::new(0.5, 3.0).unwrap();
        let a = diag(&alg, &[0.5, 3.0]);
        let b = diag(&alg, &[1.0, 2.0]);
        let outside = diag(&alg, &[0.4, 1.0]);
        assert!(in_band(&a, &band));
        assert!(in_band(&b, &band));
        assert!(!in_band(&outside, &band));

        // Geodesic stays in the band.
        let seg = GeodesicSegment::new(&a, &b).unwrap();
        for &t in &[0.1, 0.35, 0.5, 0.9] {
            assert!(in_band(&seg.eval(t).unwrap(), &band));
        }

        // Distance inside the band is at most ln(c2/c1).
        let d = distance(&a, &b).unwrap();
        assert!(d <= band.diameter_bound() + 1e-12);

        assert!(Band::new(2.0, 1.0).is_err());
        assert!(Band::new(0.0, 1.0).is_err());
        assert!(Band::new(-1.0, 1.0).is_err());

        // Degenerate enclosing band still contains its edge point.
        let deg = Band::enclosing(1.0, 1.0).unwrap();
        assert!(in_band(&PositiveElement::one(&alg), &deg));
        assert!(deg.lower() < 1.0 && deg.upper() > 1.0);
    }

    #[test]
    fn geodesic_extension_beyond_endpoints() {
        // Commuting case: γ(2) = diag(16, 1/16) from 1 to diag(4, 1/4).
        let alg = m2();
        let one = PositiveElement::one(&alg);
        let b = diag(&alg, &[4.0, 0.25]);
        let seg = GeodesicSegment::new(&one, &b).unwrap();
        let g2 = seg.eval(2.0).unwrap();
        let expect = diag(&alg, &[16.0, 1.0 / 16.0]);
        assert!(norm2(&(g2.element() - expect.element())) < 1e-11);
        assert!(uniform_norm(g2.element()) > uniform_norm(b.element()));
    }
}
