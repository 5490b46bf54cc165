//! Karcher (least-squares) means in the cone.
//!
//! The Karcher mean of `s_1, …, s_n` minimizes `Σ_i d(c, s_i)²`. Its
//! first-order condition is `Σ_i ln(c^{-1/2} s_i c^{-1/2}) = 0`, and the
//! natural fixed-point iteration exponentiates a damped multiple of the mean
//! log: `c ← c^{1/2} exp(η · (1/n) Σ_i ln(c^{-1/2} s_i c^{-1/2})) c^{1/2}`.
//! On a nonpositively curved space this contracts near the mean for η = 1;
//! the step halves `η` whenever the gradient norm fails to decrease.

use rayon::prelude::*;

use crate::algebra::{norm2, AlgebraElement};
use crate::error::{ConeError, Result};
use crate::geometry::relative_form;
use crate::spectral::{exp_hermitian, positivize, PositiveElement};

/// Result of a Karcher mean computation.
#[derive(Debug, Clone)]
pub struct KarcherMean {
    /// Best iterate found.
    pub mean: PositiveElement,
    /// Accepted iterations.
    pub iterations: usize,
    /// Final certificate value `‖Σ_i ln(c^{-1/2} s_i c^{-1/2})‖₂` (the sum,
    /// not the average, so it upper-bounds the averaged gradient).
    pub gradient_norm: f64,
    /// Whether `gradient_norm ≤ tol` was reached within the budget.
    pub converged: bool,
}

/// Sum of chart logs at `c`: `Σ_i ln(c^{-1/2} s_i c^{-1/2})`.
fn log_sum(c: &PositiveElement, points: &[PositiveElement]) -> Result<AlgebraElement> {
    let c_inv_sqrt = c.inv_sqrt()?;
    let logs: Vec<AlgebraElement> = points
        .par_iter()
        .map(|p| relative_form(c_inv_sqrt.element(), p)?.log())
        .collect::<Result<_>>()?;
    let mut sum = AlgebraElement::zero(c.algebra());
    for l in &logs {
        sum = &sum + l;
    }
    Ok(sum)
}

/// Computes the Karcher mean of `points`.
///
/// Converged means `‖Σ_i ln(c^{-1/2} s_i c^{-1/2})‖₂ ≤ tol`. `tol = 0`
/// selects [`crate::tol::DEFAULT_SOLVER_TOL`]; `max_iter = 0` selects 1000.
/// The initial iterate is the trace-normalized arithmetic mean, which is
/// already positive.
pub fn karcher_mean(points: &[PositiveElement], tol: f64, max_iter: usize) -> Result<KarcherMean> {
    if points.is_empty() {
        return Err(ConeError::EmptySet);
    }
    let tol = if tol <= 0.0 {
        crate::tol::DEFAULT_SOLVER_TOL
    } else {
        tol
    };
    let max_iter = if max_iter == 0 { 1000 } else { max_iter };
    let n = points.len() as f64;

    // Arithmetic-mean start: Hermitian, positive, and within the points'
    // spectral band.
    let mut acc = AlgebraElement::zero(points[0].algebra());
    for p in points {
        acc = &acc + p.element();
    }
    let mut c = positivize(&acc.scale(1.0 / n))?;

    let mut grad = log_sum(&c, points)?;
    let mut grad_norm = norm2(&grad);
    let mut iterations = 0;
    let mut eta = 1.0;

    while grad_norm > tol && iterations < max_iter {
        let c_sqrt = c.sqrt()?;
        let mut stepped = false;
        // Damped retry: halve η until the gradient norm decreases.
        while eta > 1e-8 {
            let e = exp_hermitian(&grad.scale(eta / n))?;
            let cand = positivize(&(&(c_sqrt.element() * e.element()) * c_sqrt.element()))?;
            let cand_grad = log_sum(&cand, points)?;
            let cand_norm = norm2(&cand_grad);
            if cand_norm < grad_norm {
                c = cand;
                grad = cand_grad;
                grad_norm = cand_norm;
                stepped = true;
                // Recover the step size gradually after a damping episode.
                eta = (eta * 2.0).min(1.0);
                break;
            }
            eta *= 0.5;
        }
        iterations += 1;
        if !stepped {
            break;
        }
    }

    Ok(KarcherMean {
        mean: c,
        iterations,
        gradient_norm: grad_norm,
        converged: grad_norm <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{AlgebraElement, BlockAlgebra, Scalar};
    use crate::geometry::{congruence, distance, in_band, midpoint, Band};
    use crate::spectral::positivize;
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn m2() -> Arc<BlockAlgebra> {
        BlockAlgebra::full_matrix(2).unwrap()
    }

    fn diag(alg: &Arc<BlockAlgebra>, d: &[f64]) -> PositiveElement {
        positivize(&AlgebraElement::real_diagonal(alg, &[d.to_vec()]).unwrap()).unwrap()
    }

    #[test]
    fn mean_of_commuting_pair_is_geometric_mean() {
        // Karcher mean of {diag(1, 4), diag(4, 1)} = diag(2, 2).
        let alg = m2();
        let a = diag(&alg, &[1.0, 4.0]);
        let b = diag(&alg, &[4.0, 1.0]);
        let km = karcher_mean(&[a.clone(), b.clone()], 1e-10, 0).unwrap();
        assert!(km.converged);
        let expect = diag(&alg, &[2.0, 2.0]);
        assert!(norm2(&(km.mean.element() - expect.element())) < 1e-9);
        // For two points the Karcher mean is the geodesic midpoint.
        let mid = midpoint(&a, &b).unwrap();
        assert!(distance(&km.mean, &mid).unwrap() < 1e-9);
    }

    #[test]
    fn mean_of_single_point_is_the_point() {
        let alg = m2();
        let a = diag(&alg, &[3.0, 0.2]);
        let km = karcher_mean(std::slice::from_ref(&a), 1e-12, 0).unwrap();
        assert!(km.converged);
        assert_eq!(km.iterations, 0);
        assert!(distance(&km.mean, &a).unwrap() < 1e-10);
    }

    #[test]
    fn gradient_certificate_is_small_at_convergence() {
        let alg = m2();
        let pts = vec![
            diag(&alg, &[1.0, 2.0]),
            positivize(&AlgebraElement::from_fn(&alg, |_, i, j| match (i, j) {
                (0, 0) => Scalar::new(2.0, 0.0),
                (1, 1) => Scalar::new(1.0, 0.0),
                (0, 1) => Scalar::new(0.5, 0.3),
                (1, 0) => Scalar::new(0.5, -0.3),
                _ => unreachable!(),
            }))
            .unwrap(),
            diag(&alg, &[0.5, 0.8]),
        ];
        let km = karcher_mean(&pts, 1e-9, 0).unwrap();
        assert!(km.converged);
        assert!(km.gradient_norm <= 1e-9);
        // Independent fixed-point check: recompute the log sum from scratch.
        let s = log_sum(&km.mean, &pts).unwrap();
        assert!(norm2(&s) <= 2e-9);
    }

    #[test]
    fn mean_stays_in_band_and_respects_congruence() {
        let alg = m2();
        let band = Band::new(0.5, 4.0).unwrap();
        let pts = vec![
            diag(&alg, &[0.5, 1.0]),
            diag(&alg, &[4.0, 2.0]),
            diag(&alg, &[1.0, 3.0]),
        ];
        let km = karcher_mean(&pts, 1e-9, 0).unwrap();
        assert!(km.converged);
        assert!(in_band(&km.mean, &band), "mean escaped the band");

        // Equivariance under unitary congruence: u pts u* has mean u c u*.
        let u = AlgebraElement::from_fn(&alg, |_, i, j| {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            match (i, j) {
                (0, 0) => Scalar::new(s, 0.0),
                (0, 1) => Scalar::new(s, 0.0),
                (1, 0) => Scalar::new(-s, 0.0),
                (1, 1) => Scalar::new(s, 0.0),
                _ => unreachable!(),
            }
        });
        let moved: Vec<PositiveElement> = pts.iter().map(|p| congruence(&u, p).unwrap()).collect();
        let km_u = karcher_mean(&moved, 1e-9, 0).unwrap();
        let expect = congruence(&u, &km.mean).unwrap();
        assert!(distance(&km_u.mean, &expect).unwrap() < 1e-7);
    }

    #[test]
    fn scalar_points_give_geometric_mean_exactly() {
        // Scalars e^x: the Karcher mean is e^{mean(x)}.
        let alg = m2();
        let xs: [f64; 4] = [0.3, -1.2, 2.0, 0.1];
        let pts: Vec<PositiveElement> = xs
            .iter()
            .map(|&x| positivize(&AlgebraElement::identity(&alg).scale(x.exp())).unwrap())
            .collect();
        let km = karcher_mean(&pts, 1e-11, 0).unwrap();
        let mean_x = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!(km.converged);
        assert_relative_eq!(km.mean.max_eig(), mean_x.exp(), epsilon = 1e-9);
        assert_relative_eq!(km.mean.min_eig(), mean_x.exp(), epsilon = 1e-9);
    }

    #[test]
    fn empty_set_rejected() {
        assert!(matches!(
            karcher_mean(&[], 1e-8, 0),
            Err(ConeError::EmptySet)
        ));
    }
}
