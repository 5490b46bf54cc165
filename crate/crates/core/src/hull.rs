//! Iterative approximation of geodesically convex hulls.
//!
//! Starting from a finite set `X₁`, each generation adjoins geodesic samples
//! between pairs of the accumulated set:
//! `X_{n+1} = X_n ∪ {γ_{a,b}(t) : a, b ∈ X_n, t ∈ grid}`.
//! The union of all generations is dense in the closed geodesic convex hull
//! as depth and grid refine. Growth is quartic-ish in practice, so the
//! expansion works against an explicit point budget.

use rayon::prelude::*;

use crate::algebra::norm2;
use crate::error::{ConeError, Result};
use crate::geometry::GeodesicSegment;
use crate::spectral::PositiveElement;
use crate::tol::HULL_DEDUP_REL;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Controls for [`hull_expand`].
#[derive(Debug, Clone)]
pub struct HullOptions {
    /// Number of generations to produce beyond the input (depth ≥ 1 keeps
    /// just the input; each extra generation adjoins new samples).
    pub depth: usize,
    /// Number of sample parameters per pair, spread evenly over `[0, 1]`
    /// (endpoints included, so `samples_per_pair ≥ 2`).
    pub samples_per_pair: usize,
    /// Hard cap on the total number of distinct points kept.
    pub max_points: usize,
    /// Seed for the deterministic pair subsampling used when a full
    /// generation would overshoot the evaluation budget.
    pub seed: u64,
}

impl Default for HullOptions {
    fn default() -> Self {
        Self {
            depth: 3,
            samples_per_pair: 5,
            max_points: 5000,
            seed: 0,
        }
    }
}

/// Result of a hull expansion: every generation in order, `generations[0]`
/// being the deduplicated input.
#[derive(Debug, Clone)]
pub struct HullApproximation {
    generations: Vec<Vec<PositiveElement>>,
    depth: usize,
    samples_per_pair: usize,
}

impl HullApproximation {
    /// All generations; each one contains its predecessor as a prefix.
    pub fn generations(&self) -> &[Vec<PositiveElement>] {
        &self.generations
    }

    /// The final, largest generation.
    pub fn points(&self) -> &[PositiveElement] {
        self.generations
            .last()
            .expect("hull approximation has at least one generation")
    }

    /// Requested depth.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Requested samples per pair.
    pub fn samples_per_pair(&self) -> usize {
        self.samples_per_pair
    }
}

fn is_duplicate(x: &PositiveElement, x_norm: f64, kept: &[(PositiveElement, f64)]) -> bool {
    let tol = HULL_DEDUP_REL * (1.0 + x_norm);
    kept.iter().any(|(y, y_norm)| {
        // Norm pre-filter: ‖x - y‖₂ ≥ |‖x‖₂ - ‖y‖₂|.
        (x_norm - y_norm).abs() <= tol && norm2(&(x.element() - y.element())) <= tol
    })
}

/// Expands the geodesic convex hull approximation of `points`.
///
/// Each generation samples geodesics between all pairs of the current set at
/// an even parameter grid, deduplicating within a relative trace-norm
/// tolerance. If a generation would evaluate more segments than the budget
/// allows, a deterministic seeded subsample of pairs is used instead. The
/// expansion fails with [`ConeError::BudgetExceeded`] only when `max_points`
/// distinct points have been kept and further distinct points are still
/// appearing.
pub fn hull_expand(points: &[PositiveElement], opts: &HullOptions) -> Result<HullApproximation> {
    if points.is_empty() {
        return Err(ConeError::EmptySet);
    }
    if opts.depth == 0 {
        return Err(ConeError::InvalidParameter {
            reason: "hull depth must be at least 1".into(),
        });
    }
    if opts.samples_per_pair < 2 {
        return Err(ConeError::InvalidParameter {
            reason: "hull needs at least 2 samples per pair (the endpoints)".into(),
        });
    }
    if opts.max_points < points.len() {
        return Err(ConeError::InvalidParameter {
            reason: format!(
                "max_points {} is smaller than the input set {}",
                opts.max_points,
                points.len()
            ),
        });
    }
    let alg = points[0].algebra();
    assert!(
        points.iter().all(|p| p.algebra() == alg),
        "hull points must share an algebra"
    );

    // Interior grid: endpoints of every segment are already members.
    let grid: Vec<f64> = (1..opts.samples_per_pair - 1)
        .map(|j| j as f64 / (opts.samples_per_pair - 1) as f64)
        .collect();

    let mut kept: Vec<(PositiveElement, f64)> = Vec::new();
    for p in points {
        let n = norm2(p.element());
        if !is_duplicate(p, n, &kept) {
            kept.push((p.clone(), n));
        }
    }

    let mut generations = vec![kept.iter().map(|(p, _)| p.clone()).collect::<Vec<_>>()];
    let mut rng = ChaCha12Rng::seed_from_u64(opts.seed);

    for gen in 1..opts.depth {
        if grid.is_empty() {
            // Only endpoints requested: every generation repeats the input.
            generations.push(generations[gen - 1].clone());
            continue;
        }
        let n = kept.len();
        let total_pairs = n * (n - 1) / 2;
        let headroom = opts.max_points - kept.len();
        // Evaluate enough candidates to detect overflow past the cap, but
        // not unboundedly more than could ever be kept.
        let pair_budget = ((4 * headroom + 64) / grid.len().max(1)).max(16);

        let pairs: Vec<(usize, usize)> = if total_pairs <= pair_budget {
            (0..n)
                .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                .collect()
        } else {
            // Seeded subsample (with replacement; duplicates are cheap
            // because candidate dedup handles repeats).
            (0..pair_budget)
                .map(|_| {
                    let i = rng.random_range(0..n);
                    let mut j = rng.random_range(0..n - 1);
                    if j >= i {
                        j += 1;
                    }
                    (i.min(j), i.max(j))
                })
                .collect()
        };

        let candidates: Vec<PositiveElement> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let seg = GeodesicSegment::new(&kept[i].0, &kept[j].0)?;
                grid.iter()
                    .map(|&t| seg.eval(t))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<Vec<_>>>>()?
            .into_iter()
            .flatten()
            .collect();

        for c in candidates {
            let cn = norm2(c.element());
            if is_duplicate(&c, cn, &kept) {
                continue;
            }
            if kept.len() >= opts.max_points {
                return Err(ConeError::BudgetExceeded {
                    max_points: opts.max_points,
                    depth: gen + 1,
                });
            }
            kept.push((c, cn));
        }
        generations.push(kept.iter().map(|(p, _)| p.clone()).collect());
    }

    Ok(HullApproximation {
        generations,
        depth: opts.depth,
        samples_per_pair: opts.samples_per_pair,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{AlgebraElement, BlockAlgebra};
    use crate::geometry::{distance, in_band, Band};
    use crate::spectral::positivize;
    use std::sync::Arc;

    fn diag(alg: &Arc<BlockAlgebra>, d: &[f64]) -> PositiveElement {
        positivize(&AlgebraElement::real_diagonal(alg, &[d.to_vec()]).unwrap()).unwrap()
    }

    #[test]
    fn first_generation_is_input() {
        let alg = BlockAlgebra::full_matrix(2).unwrap();
        let pts = vec![diag(&alg, &[1.0, 1.0]), diag(&alg, &[4.0, 0.25])];
        let hull = hull_expand(
            &pts,
            &HullOptions {
                depth: 1,
                ..HullOptions::default()
            },
        )
        .unwrap();
        assert_eq!(hull.generations().len(), 1);
        assert_eq!(hull.points().len(), 2);
        for (h, p) in hull.points().iter().zip(&pts) {
            assert!(norm2(&(h.element() - p.element())) == 0.0);
        }
    }

    #[test]
    fn generations_are_monotone_and_stay_in_band() {
        let alg = BlockAlgebra::full_matrix(2).unwrap();
        let band = Band::new(0.25, 4.0).unwrap();
        let pts = vec![
            diag(&alg, &[4.0, 0.25]),
            diag(&alg, &[0.25, 4.0]),
            diag(&alg, &[1.0, 1.0]),
        ];
        let hull = hull_expand(
            &pts,
            &HullOptions {
                depth: 3,
                samples_per_pair: 5,
                max_points: 5000,
                seed: 0,
            },
        )
        .unwrap();
        assert_eq!(hull.generations().len(), 3);
        for w in hull.generations().windows(2) {
            assert!(w[0].len() <= w[1].len());
            // Prefix property: earlier generations are literal prefixes.
            for (a, b) in w[0].iter().zip(&w[1]) {
                assert!(norm2(&(a.element() - b.element())) == 0.0);
            }
        }
        for p in hull.points() {
            assert!(in_band(p, &band), "hull point escaped the band");
        }
        // Depth 2 must at least contain the three pairwise midpoints.
        assert!(hull.generations()[1].len() >= 6);
    }

    #[test]
    fn dedup_collapses_coincident_points() {
        let alg = BlockAlgebra::full_matrix(2).unwrap();
        let a = diag(&alg, &[2.0, 0.5]);
        let pts = vec![a.clone(), a.clone(), a];
        let hull = hull_expand(&pts, &HullOptions::default()).unwrap();
        // A single point generates nothing new at any depth.
        assert_eq!(hull.points().len(), 1);
    }

    #[test]
    fn collinear_points_add_nothing() {
        // Points already on one geodesic: hull closure adds only points on
        // the same segment; with the default grid the midpoints coincide
        // with existing samples at matching parameters.
        let alg = BlockAlgebra::full_matrix(2).unwrap();
        let a = diag(&alg, &[1.0, 1.0]);
        let b = diag(&alg, &[16.0, 1.0]);
        let seg = GeodesicSegment::new(&a, &b).unwrap();
        let pts: Vec<PositiveElement> = [0.0, 0.25, 0.5, 0.75, 1.0]
            .iter()
            .map(|&t| seg.eval(t).unwrap())
            .collect();
        let hull = hull_expand(
            &pts,
            &HullOptions {
                depth: 2,
                samples_per_pair: 3,
                max_points: 1000,
                seed: 0,
            },
        )
        .unwrap();
        // Midpoints of grid-adjacent samples land halfway between existing
        // parameters (0.125 etc.), so growth is bounded by the pair count,
        // and every new point still lies on the segment: check distance
        // additivity d(a, x) + d(x, b) = d(a, b).
        let d = distance(&a, &b).unwrap();
        for x in hull.points() {
            let s = distance(&a, x).unwrap() + distance(x, &b).unwrap();
            assert!((s - d).abs() < 1e-9, "hull left the geodesic segment");
        }
    }

    #[test]
    fn budget_overflow_reported() {
        let alg = BlockAlgebra::full_matrix(2).unwrap();
        let pts = vec![
            diag(&alg, &[4.0, 0.25]),
            diag(&alg, &[0.25, 4.0]),
            diag(&alg, &[1.0, 0.5]),
        ];
        let err = hull_expand(
            &pts,
            &HullOptions {
                depth: 4,
                samples_per_pair: 9,
                max_points: 8,
                seed: 7,
            },
        )
        .unwrap_err();
        assert!(matches!(
            err,
            ConeError::BudgetExceeded { max_points: 8, .. }
        ));
    }

    #[test]
    fn rejects_bad_options() {
        let alg = BlockAlgebra::full_matrix(2).unwrap();
        let pts = vec![diag(&alg, &[1.0, 1.0])];
        assert!(matches!(
            hull_expand(&[], &HullOptions::default()),
            Err(ConeError::EmptySet)
        ));
        assert!(hull_expand(
            &pts,
            &HullOptions {
                depth: 0,
                ..HullOptions::default()
            }
        )
        .is_err());
        assert!(hull_expand(
            &pts,
            &HullOptions {
                samples_per_pair: 1,
                ..HullOptions::default()
            }
        )
        .is_err());
    }
}
