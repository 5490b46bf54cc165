//! Minimal enclosing balls (circumcenters) for finite sets in the cone.
//!
//! For a bounded set `S`, the function `c ↦ max_{s ∈ S} d(c, s)` is
//! geodesically convex with a unique minimizer, the circumcenter. The solver
//! runs two phases:
//!
//! 1. Farthest-point marching: `c_{k+1} = γ_{c_k, f_k}(1/(k+1))` toward the
//!    current farthest point `f_k`. Cheap, globally convergent, but only at
//!    rate `O(1/k)`.
//! 2. Tangent refinement: lift `S` into the chart `p_i = ln(c^{-1/2} s_i
//!    c^{-1/2})` (so `‖p_i‖₂ = d(c, s_i)` exactly), solve the Euclidean
//!    minimal enclosing ball there by a pairwise Frank–Wolfe method on the
//!    dual, and step `c ← c^{1/2} exp(α u) c^{1/2}` toward the ball center
//!    `u` with a line search on the true radius. At the circumcenter `u = 0`,
//!    and near it the update is exact to second order, so this phase
//!    converges fast; it is exact in one step for commuting families.
//!
//! Every iterate's radius is tracked and the best center seen wins, so the
//! reported radius sequence is non-increasing by construction.

use rayon::prelude::*;

use crate::algebra::{inner, norm2, AlgebraElement};
use crate::error::{ConeError, Result};
use crate::geometry::{relative_form, GeodesicSegment};
use crate::spectral::{exp_hermitian, positivize, PositiveElement};

/// Default iteration budget for `n` points.
pub fn default_max_iter(n: usize) -> usize {
    50 * n + 1000
}

/// Result of a circumcenter computation.
#[derive(Debug, Clone)]
pub struct EnclosingBall {
    /// Best center found.
    pub center: PositiveElement,
    /// `max_radius(center, points)`, recomputed at the end.
    pub radius: f64,
    /// Iterations spent across both phases.
    pub iterations: usize,
    /// Best-so-far radius after each iteration (non-increasing).
    pub radius_history: Vec<f64>,
    /// Whether the convergence criterion (tangent ball center within `tol`)
    /// was met before the iteration budget ran out.
    pub converged: bool,
    /// Norm of the last tangent-space ball center: the quantity compared
    /// against `tol`. Zero for trivially converged inputs.
    pub residual: f64,
}

/// Largest distance from `candidate` to any point, together with the index
/// of the first point attaining it (ties break to the smallest index).
pub fn max_radius(candidate: &PositiveElement, points: &[PositiveElement]) -> Result<(f64, usize)> {
    if points.is_empty() {
        return Err(ConeError::EmptySet);
    }
    let c_inv_sqrt = candidate.inv_sqrt()?;
    let dists: Vec<f64> = points
        .par_iter()
        .map(|p| chart_distance(&c_inv_sqrt, p).map(|(d, _)| d))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, &d) in dists.iter().enumerate() {
        if d > dists[best] {
            best = i;
        }
    }
    Ok((dists[best], best))
}

/// Distance from the base point of `c^{-1/2}` to `p`, together with the
/// chart image `ln(c^{-1/2} p c^{-1/2})` whose trace norm is that distance.
fn chart_distance(
    c_inv_sqrt: &PositiveElement,
    p: &PositiveElement,
) -> Result<(f64, AlgebraElement)> {
    let log = relative_form(c_inv_sqrt.element(), p)?.log()?;
    Ok((norm2(&log), log))
}

/// Solution of the dual minimal enclosing ball problem on the simplex.
struct MebWeights {
    weights: Vec<f64>,
    /// Final duality gap `max_i ‖p_i - p̄‖² - φ(w)`, clamped at zero.
    gap: f64,
}

/// Maximizes `φ(w) = Σ w_i G_ii - wᵀ G w` over the probability simplex by
/// pairwise Frank–Wolfe steps (shift mass from the lowest-scoring support
/// vertex to the highest-scoring vertex, with the exact line-search step).
/// The maximizer's barycenter `Σ w_i p_i` is the enclosing ball center and
/// `φ(w*)` its squared radius; the duality gap bounds the suboptimality.
fn simplex_meb(gram: &[Vec<f64>], max_iter: usize) -> MebWeights {
    let m = gram.len();
    if m == 1 {
        return MebWeights {
            weights: vec![1.0],
            gap: 0.0,
        };
    }
    let scale = gram
        .iter()
        .enumerate()
        .map(|(i, row)| row[i])
        .fold(0.0f64, f64::max);
    let gap_tol = 1e-15 * (1.0 + scale);

    let mut w = vec![1.0 / m as f64; m];
    // gw[i] = (G w)_i.
    let mut gw: Vec<f64> = gram
        .iter()
        .map(|row| row.iter().zip(&w).map(|(g, wi)| g * wi).sum())
        .collect();
    let mut gap = f64::INFINITY;

    for it in 0..max_iter {
        if it % 256 == 255 {
            // Refresh against floating-point drift from incremental updates.
            for (i, row) in gram.iter().enumerate() {
                gw[i] = row.iter().zip(&w).map(|(g, wi)| g * wi).sum();
            }
        }
        let wgw: f64 = w.iter().zip(&gw).map(|(wi, g)| wi * g).sum();
        let phi: f64 = w
            .iter()
            .enumerate()
            .map(|(i, wi)| wi * gram[i][i])
            .sum::<f64>()
            - wgw;

        // score_i = G_ii - 2 (Gw)_i = ‖p_i - p̄‖² - wᵀGw: same argmax/argmin.
        let mut s = 0;
        let mut v = usize::MAX;
        for i in 0..m {
            let sc = gram[i][i] - 2.0 * gw[i];
            if sc > gram[s][s] - 2.0 * gw[s] {
                s = i;
            }
            if w[i] > 0.0 && (v == usize::MAX || sc < gram[v][v] - 2.0 * gw[v]) {
                v = i;
            }
        }
        let max_dist_sq = gram[s][s] - 2.0 * gw[s] + wgw;
        gap = max_dist_sq - phi;
        if gap <= gap_tol || s == v {
            break;
        }
        let slope = (gram[s][s] - 2.0 * gw[s]) - (gram[v][v] - 2.0 * gw[v]);
        let curv = gram[s][s] - 2.0 * gram[s][v] + gram[v][v];
        if slope <= 0.0 || curv <= 0.0 {
            break;
        }
        let step = (slope / (2.0 * curv)).min(w[v]);
        if step <= 0.0 {
            break;
        }
        w[s] += step;
        w[v] -= step;
        if w[v] < 1e-18 {
            w[v] = 0.0;
        }
        for i in 0..m {
            gw[i] += step * (gram[i][s] - gram[i][v]);
        }
    }
    MebWeights {
        weights: w,
        gap: gap.max(0.0),
    }
}

/// Computes the circumcenter (center of the minimal enclosing ball) of
/// `points`.
///
/// `tol` is the convergence tolerance on the tangent-space ball center
/// (`0` selects the crate default, [`crate::tol::DEFAULT_SOLVER_TOL`]);
/// `max_iter = 0` selects [`default_max_iter`]. The returned ball always
/// carries the best center seen, its exactly recomputed radius, and a
/// non-increasing radius history; `converged` reports whether the tolerance
/// was met.
pub fn circumcenter(
    points: &[PositiveElement],
    tol: f64,
    max_iter: usize,
) -> Result<EnclosingBall> {
    if points.is_empty() {
        return Err(ConeError::EmptySet);
    }
    let tol = if tol <= 0.0 {
        crate::tol::DEFAULT_SOLVER_TOL
    } else {
        tol
    };
    let n = points.len();
    let max_iter = if max_iter == 0 {
        default_max_iter(n)
    } else {
        max_iter
    };

    let mut center = points[0].clone();
    let (r0, far0) = max_radius(&center, points)?;
    let mut best_center = center.clone();
    let mut best_r = r0;
    let mut history = vec![r0];
    let mut iterations = 0;
    let mut converged = r0 == 0.0 || n == 1;
    let mut residual = if converged { 0.0 } else { f64::INFINITY };

    // Phase 1: farthest-point marching with steps 1/2, 1/3, …
    if !converged {
        let mut far = far0;
        let mut r = r0;
        let rounds = (2 * n + 20).min(max_iter / 2);
        for k in 1..=rounds {
            let seg = GeodesicSegment::new(&center, &points[far])?;
            center = seg.eval(1.0 / (k as f64 + 1.0))?;
            iterations += 1;
            let (r_new, far_new) = max_radius(&center, points)?;
            r = r_new;
            far = far_new;
            if r < best_r {
                best_r = r;
                best_center = center.clone();
            }
            history.push(best_r);
        }
        let _ = r;
    }

    // Phase 2: tangent minimal-enclosing-ball refinement from the best
    // phase-1 iterate.
    if !converged {
        center = best_center.clone();
        while iterations < max_iter {
            let c_inv_sqrt = center.inv_sqrt()?;
            let charts: Vec<(f64, AlgebraElement)> = points
                .par_iter()
                .map(|p| chart_distance(&c_inv_sqrt, p))
                .collect::<Result<_>>()?;
            let cur_r = charts.iter().map(|(d, _)| *d).fold(0.0f64, f64::max);
            if cur_r < best_r {
                best_r = cur_r;
                best_center = center.clone();
            }

            let gram: Vec<Vec<f64>> = charts
                .par_iter()
                .map(|(_, pi)| {
                    charts
                        .iter()
                        .map(|(_, pj)| inner(pi, pj).re)
                        .collect::<Vec<f64>>()
                })
                .collect();
            let meb = simplex_meb(&gram, 50 * n + 2000);

            let mut u = AlgebraElement::zero(center.algebra());
            for ((_, p), &wi) in charts.iter().zip(&meb.weights) {
                if wi > 0.0 {
                    u = &u + &p.scale(wi);
                }
            }
            let u_norm = norm2(&u);
            residual = u_norm;
            iterations += 1;
            history.push(best_r);

            // Converged when the model ball center vanishes and the dual gap
            // certifies the model solve itself (center error ≤ √gap).
            if u_norm <= tol && meb.gap <= tol.max(1e-12) {
                converged = true;
                // Prefer the converged iterate when it ties the best radius.
                if cur_r <= best_r {
                    best_center = center.clone();
                }
                break;
            }

            let c_sqrt = center.sqrt()?;
            let step = |alpha: f64| -> Result<PositiveElement> {
                let e = exp_hermitian(&u.scale(alpha))?;
                positivize(&(&(c_sqrt.element() * e.element()) * c_sqrt.element()))
            };

            if u_norm <= 1e-6 * (1.0 + cur_r) {
                // Quadratic regime: the full tangent step is accurate and the
                // radius change is below line-search resolution.
                center = step(1.0)?;
                continue;
            }

            // Line search: every point at the current max distance recedes at
            // rate at least ‖u‖²/r along u, so require a fraction of that.
            let slope = 0.1 * u_norm * u_norm / cur_r.max(u_norm);
            let mut alpha = 1.0;
            let mut accepted = None;
            for _ in 0..40 {
                let cand = step(alpha)?;
                let (r_cand, _) = max_radius(&cand, points)?;
                if r_cand <= cur_r - alpha * slope {
                    accepted = Some(cand);
                    break;
                }
                alpha *= 0.5;
            }
            match accepted {
                Some(c) => center = c,
                // No descent at any step size: the iterate is at the solver's
                // numerical floor.
                None => break,
            }
        }
    }

    let (radius, _) = max_radius(&best_center, points)?;
    Ok(EnclosingBall {
        center: best_center,
        radius,
        iterations,
        radius_history: history,
        converged,
        residual,
    })
}
