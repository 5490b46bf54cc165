//! Seeded random generators for elements of a block algebra.
//!
//! All samplers take an explicit RNG so that callers control determinism;
//! pairing them with `ChaCha12Rng::seed_from_u64` gives identical streams on
//! every platform.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::algebra::{AlgebraElement, BlockAlgebra, BlockMatrix, Scalar};
use crate::error::Result;
use crate::geometry::Band;
use crate::spectral::{positivize, PositiveElement};

fn gaussian(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Square complex Ginibre matrix: i.i.d. standard complex Gaussian entries.
fn ginibre(dim: usize, rng: &mut impl Rng) -> BlockMatrix {
    BlockMatrix::from_fn(dim, dim, |_, _| Scalar::new(gaussian(rng), gaussian(rng)))
}

/// Hermitian element with Gaussian entries scaled by `scale`.
pub fn sample_hermitian(
    algebra: &Arc<BlockAlgebra>,
    scale: f64,
    rng: &mut impl Rng,
) -> AlgebraElement {
    let blocks: Vec<BlockMatrix> = algebra
        .block_dims()
        .iter()
        .map(|&n| {
            let g = ginibre(n, rng);
            (&g + g.adjoint()).map(|z| z * Scalar::new(0.5 * scale, 0.0))
        })
        .collect();
    AlgebraElement::new(Arc::clone(algebra), blocks)
        .expect("sampled blocks match the algebra by construction")
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the R diagonal's
/// phases absorbed into Q, per block.
pub fn sample_haar_unitary(algebra: &Arc<BlockAlgebra>, rng: &mut impl Rng) -> AlgebraElement {
    let blocks: Vec<BlockMatrix> = algebra
        .block_dims()
        .iter()
        .map(|&n| {
            let qr = ginibre(n, rng).qr();
            let r = qr.r();
            let mut q = qr.q();
            for j in 0..n {
                let d = r[(j, j)];
                let phase = if d.norm() > 0.0 {
                    d / Scalar::new(d.norm(), 0.0)
                } else {
                    Scalar::new(1.0, 0.0)
                };
                for i in 0..n {
                    q[(i, j)] *= phase;
                }
            }
            q
        })
        .collect();
    AlgebraElement::new(Arc::clone(algebra), blocks)
        .expect("sampled blocks match the algebra by construction")
}

/// Positive element with spectrum inside `band`: per block `Q e^D Q*` with
/// Haar `Q` and eigenvalues log-uniform over the band.
pub fn sample_positive_in_band(
    algebra: &Arc<BlockAlgebra>,
    band: &Band,
    rng: &mut impl Rng,
) -> Result<PositiveElement> {
    let (lo, hi) = (band.lower().ln(), band.upper().ln());
    let q = sample_haar_unitary(algebra, rng);
    let blocks: Vec<BlockMatrix> = algebra
        .block_dims()
        .iter()
        .zip(q.blocks())
        .map(|(&n, qb)| {
            let diag = BlockMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    Scalar::new(rng.random_range(lo..=hi).exp(), 0.0)
                } else {
                    Scalar::new(0.0, 0.0)
                }
            });
            qb * diag * qb.adjoint()
        })
        .collect();
    positivize(&AlgebraElement::new(Arc::clone(algebra), blocks)?)
}

/// Invertible element `U Σ V*` with Haar `U, V` and singular values
/// log-uniform over `[1/√max_cond, √max_cond]`, so the condition number is
/// at most `max_cond`.
pub fn sample_invertible(
    algebra: &Arc<BlockAlgebra>,
    max_cond: f64,
    rng: &mut impl Rng,
) -> AlgebraElement {
    let half = max_cond.max(1.0).sqrt().ln();
    let u = sample_haar_unitary(algebra, rng);
    let v = sample_haar_unitary(algebra, rng);
    let blocks: Vec<BlockMatrix> = algebra
        .block_dims()
        .iter()
        .zip(u.blocks().iter().zip(v.blocks()))
        .map(|(&n, (ub, vb))| {
            let sigma = BlockMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    Scalar::new(rng.random_range(-half..=half).exp(), 0.0)
                } else {
                    Scalar::new(0.0, 0.0)
                }
            });
            ub * sigma * vb.adjoint()
        })
        .collect();
    AlgebraElement::new(Arc::clone(algebra), blocks)
        .expect("sampled blocks match the algebra by construction")
}
