//! Finite-dimensional algebras with a faithful normalized trace.
//!
//! An algebra here is a direct sum of full complex matrix blocks
//! `M_{n_1} ⊕ … ⊕ M_{n_k}` together with positive trace weights `λ_i`
//! summing to one. The trace of an element is `Σ_i λ_i · tr(x_i) / n_i`,
//! which is faithful, normalized (`τ(1) = 1`), and tracial. All norms and
//! geometry in this crate are induced by that trace.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::{Complex, DMatrix};

use crate::error::{ConeError, Result};
use crate::tol::EPS_HERM;

/// Complex scalar used for all matrix entries.
pub type Scalar = Complex<f64>;

/// Dense complex matrix holding one block of an element.
pub type BlockMatrix = DMatrix<Scalar>;

/// Weight sums may deviate from 1 by at most this before the algebra is
/// rejected.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// A direct sum of matrix blocks with a faithful normalized trace.
///
/// Immutable once constructed; elements hold it behind an [`Arc`] so that
/// shape checks reduce to pointer comparisons plus structural equality.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockAlgebra {
    block_dims: Vec<usize>,
    trace_weights: Vec<f64>,
}

impl BlockAlgebra {
    /// Builds an algebra from block dimensions and trace weights.
    ///
    /// Requirements: at least one block, every dimension ≥ 1, every weight
    /// strictly positive and finite, and `|Σ λ_i - 1| ≤ WEIGHT_SUM_TOL`.
    pub fn new(block_dims: Vec<usize>, trace_weights: Vec<f64>) -> Result<Arc<Self>> {
        if block_dims.is_empty() {
            return Err(ConeError::InvalidAlgebra {
                reason: "algebra needs at least one block".into(),
            });
        }
        if block_dims.len() != trace_weights.len() {
            return Err(ConeError::InvalidAlgebra {
                reason: format!(
                    "{} block dimensions but {} trace weights",
                    block_dims.len(),
                    trace_weights.len()
                ),
            });
        }
        if let Some(&d) = block_dims.iter().find(|&&d| d == 0) {
            return Err(ConeError::InvalidAlgebra {
                reason: format!("block dimension must be at least 1, got {d}"),
            });
        }
        if trace_weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(ConeError::InvalidAlgebra {
                reason: "trace weights must be finite and strictly positive".into(),
            });
        }
        let sum: f64 = trace_weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(ConeError::InvalidAlgebra {
                reason: format!("trace weights sum to {sum:.17}, expected 1"),
            });
        }
        Ok(Arc::new(Self {
            block_dims,
            trace_weights,
        }))
    }

    /// Single full matrix block `M_n` with trace weight 1.
    pub fn full_matrix(dim: usize) -> Result<Arc<Self>> {
        Self::new(vec![dim], vec![1.0])
    }

    /// Block dimensions `n_1, …, n_k`.
    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    /// Trace weights `λ_1, …, λ_k`.
    pub fn trace_weights(&self) -> &[f64] {
        &self.trace_weights
    }

    /// Number of blocks.
    pub fn num_blocks(&self) -> usize {
        self.block_dims.len()
    }

    /// Total dimension `Σ n_i` of the underlying Hilbert space.
    pub fn total_dim(&self) -> usize {
        self.block_dims.iter().sum()
    }

    /// `min_i λ_i / n_i`: the faithfulness constant relating the uniform
    /// norm to the trace norm, `‖x‖₂ ≥ sqrt(min_i λ_i/n_i) · ‖x‖`.
    pub fn min_weight_ratio(&self) -> f64 {
        self.block_dims
            .iter()
            .zip(&self.trace_weights)
            .map(|(&n, &w)| w / n as f64)
            .fold(f64::INFINITY, f64::min)
    }
}

/// An element of a [`BlockAlgebra`]: one dense complex matrix per block.
#[derive(Clone)]
pub struct AlgebraElement {
    algebra: Arc<BlockAlgebra>,
    blocks: Vec<BlockMatrix>,
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlgebraElement")
            .field("dims", &self.algebra.block_dims())
            .field("blocks", &self.blocks)
            .finish()
    }
}

impl AlgebraElement {
    /// Wraps per-block matrices, checking that each is square with the
    /// algebra's dimension.
    pub fn new(algebra: Arc<BlockAlgebra>, blocks: Vec<BlockMatrix>) -> Result<Self> {
        if blocks.len() != algebra.num_blocks() {
            return Err(ConeError::MalformedElement {
                reason: format!(
                    "{} blocks supplied for an algebra with {}",
                    blocks.len(),
                    algebra.num_blocks()
                ),
            });
        }
        for (i, (m, &n)) in blocks.iter().zip(algebra.block_dims()).enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(ConeError::MalformedElement {
                    reason: format!("block {i} is {}x{}, expected {n}x{n}", m.nrows(), m.ncols()),
                });
            }
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(ConeError::MalformedElement {
                    reason: format!("block {i} contains a non-finite entry"),
                });
            }
        }
        Ok(Self { algebra, blocks })
    }

    /// The multiplicative identity.
    pub fn identity(algebra: &Arc<BlockAlgebra>) -> Self {
        let blocks = algebra
            .block_dims()
            .iter()
            .map(|&n| BlockMatrix::identity(n, n))
            .collect();
        Self {
            algebra: Arc::clone(algebra),
            blocks,
        }
    }

    /// The additive identity.
    pub fn zero(algebra: &Arc<BlockAlgebra>) -> Self {
        let blocks = algebra
            .block_dims()
            .iter()
            .map(|&n| BlockMatrix::zeros(n, n))
            .collect();
        Self {
            algebra: Arc::clone(algebra),
            blocks,
        }
    }

    /// Builds an element entrywise: `f(block, row, col)`.
    pub fn from_fn(
        algebra: &Arc<BlockAlgebra>,
        mut f: impl FnMut(usize, usize, usize) -> Scalar,
    ) -> Self {
        let blocks = algebra
            .block_dims()
            .iter()
            .enumerate()
            .map(|(b, &n)| BlockMatrix::from_fn(n, n, |i, j| f(b, i, j)))
            .collect();
        Self {
            algebra: Arc::clone(algebra),
            blocks,
        }
    }

    /// Diagonal element with the given real entries per block.
    pub fn real_diagonal(algebra: &Arc<BlockAlgebra>, entries: &[Vec<f64>]) -> Result<Self> {
        if entries.len() != algebra.num_blocks()
            || entries
                .iter()
                .zip(algebra.block_dims())
                .any(|(e, &n)| e.len() != n)
        {
            return Err(ConeError::MalformedElement {
                reason: "diagonal entries do not match block dimensions".into(),
            });
        }
        Ok(Self::from_fn(algebra, |b, i, j| {
            if i == j {
                Scalar::new(entries[b][i], 0.0)
            } else {
                Scalar::new(0.0, 0.0)
            }
        }))
    }

    /// The algebra this element belongs to.
    pub fn algebra(&self) -> &Arc<BlockAlgebra> {
        &self.algebra
    }

    /// All blocks in order.
    pub fn blocks(&self) -> &[BlockMatrix] {
        &self.blocks
    }

    /// One block.
    pub fn block(&self, i: usize) -> &BlockMatrix {
        &self.blocks[i]
    }

    /// Consumes the element, yielding its blocks.
    pub fn into_blocks(self) -> Vec<BlockMatrix> {
        self.blocks
    }

    /// Adjoint `x*` (conjugate transpose per block).
    pub fn adjoint(&self) -> Self {
        Self {
            algebra: Arc::clone(&self.algebra),
            blocks: self.blocks.iter().map(|m| m.adjoint()).collect(),
        }
    }

    /// Real scalar multiple.
    pub fn scale(&self, s: f64) -> Self {
        self.scale_complex(Scalar::new(s, 0.0))
    }

    /// Complex scalar multiple.
    pub fn scale_complex(&self, s: Scalar) -> Self {
        Self {
            algebra: Arc::clone(&self.algebra),
            blocks: self.blocks.iter().map(|m| m.map(|z| z * s)).collect(),
        }
    }

    /// Hermitian part `(x + x*) / 2`.
    pub fn symmetrized(&self) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|m| (m + m.adjoint()).map(|z| z * 0.5))
            .collect();
        Self {
            algebra: Arc::clone(&self.algebra),
            blocks,
        }
    }

    /// Largest relative Hermitian defect over blocks:
    /// `max_i ‖x_i - x_i*‖_F / (1 + ‖x_i‖_F)`.
    pub fn hermitian_defect(&self) -> f64 {
        self.blocks
            .iter()
            .map(|m| (m - m.adjoint()).norm() / (1.0 + m.norm()))
            .fold(0.0, f64::max)
    }

    /// Whether the element is Hermitian within [`EPS_HERM`].
    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= EPS_HERM
    }

    /// Smallest singular value over the whole element (min over blocks).
    pub fn smallest_singular_value(&self) -> f64 {
        self.blocks
            .iter()
            .map(|m| {
                m.clone()
                    .svd(false, false)
                    .singular_values
                    .iter()
                    .copied()
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn check_same_algebra(&self, other: &Self, op: &str) {
        assert!(
            Arc::ptr_eq(&self.algebra, &other.algebra) || self.algebra == other.algebra,
            "{op} requires elements of the same algebra"
        );
    }
}

/// Normalized trace `τ(x) = Σ_i λ_i · tr(x_i) / n_i`.
pub fn trace(x: &AlgebraElement) -> Scalar {
    let alg = x.algebra();
    let mut acc = Scalar::new(0.0, 0.0);
    for ((m, &n), &w) in x
        .blocks()
        .iter()
        .zip(alg.block_dims())
        .zip(alg.trace_weights())
    {
        let tr: Scalar = (0..n).map(|i| m[(i, i)]).sum();
        acc += tr * Scalar::new(w / n as f64, 0.0);
    }
    acc
}

/// Trace inner product `⟨x, y⟩ = τ(x* y)`, sesquilinear in the first slot.
pub fn inner(x: &AlgebraElement, y: &AlgebraElement) -> Scalar {
    x.check_same_algebra(y, "inner");
    let alg = x.algebra();
    let mut acc = Scalar::new(0.0, 0.0);
    for (((a, b), &n), &w) in x
        .blocks()
        .iter()
        .zip(y.blocks())
        .zip(alg.block_dims())
        .zip(alg.trace_weights())
    {
        // tr(a* b) = Σ_{ij} conj(a_ij) b_ij, avoiding the explicit product.
        let tr: Scalar = a.iter().zip(b.iter()).map(|(p, q)| p.conj() * q).sum();
        acc += tr * Scalar::new(w / n as f64, 0.0);
    }
    acc
}

/// Trace 2-norm `‖x‖₂ = τ(x* x)^{1/2} = (Σ_i λ_i ‖x_i‖_F² / n_i)^{1/2}`.
pub fn norm2(x: &AlgebraElement) -> f64 {
    let alg = x.algebra();
    let sq: f64 = x
        .blocks()
        .iter()
        .zip(alg.block_dims())
        .zip(alg.trace_weights())
        .map(|((m, &n), &w)| w * m.norm_squared() / n as f64)
        .sum();
    sq.sqrt()
}

/// Uniform (operator) norm: the largest singular value over all blocks.
pub fn uniform_norm(x: &AlgebraElement) -> f64 {
    x.blocks()
        .iter()
        .map(|m| {
            m.clone()
                .svd(false, false)
                .singular_values
                .iter()
                .copied()
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.check_same_algebra(rhs, "add");
        AlgebraElement {
            algebra: Arc::clone(&self.algebra),
            blocks: self
                .blocks
                .iter()
                .zip(&rhs.blocks)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.check_same_algebra(rhs, "sub");
        AlgebraElement {
            algebra: Arc::clone(&self.algebra),
            blocks: self
                .blocks
                .iter()
                .zip(&rhs.blocks)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.scale(-1.0)
    }
}

impl Mul for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.check_same_algebra(rhs, "mul");
        AlgebraElement {
            algebra: Arc::clone(&self.algebra),
            blocks: self
                .blocks
                .iter()
                .zip(&rhs.blocks)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn two_block() -> Arc<BlockAlgebra> {
        BlockAlgebra::new(vec![2, 1], vec![0.75, 0.25]).unwrap()
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(BlockAlgebra::new(vec![2], vec![0.5]).is_err());
        assert!(BlockAlgebra::new(vec![2, 2], vec![0.5, 0.5 + 1e-9]).is_err());
        assert!(BlockAlgebra::new(vec![], vec![]).is_err());
        assert!(BlockAlgebra::new(vec![0], vec![1.0]).is_err());
        assert!(BlockAlgebra::new(vec![2, 2], vec![1.5, -0.5]).is_err());
        // Exactly at the tolerance boundary is accepted.
        assert!(BlockAlgebra::new(vec![2, 2], vec![0.5, 0.5]).is_ok());
    }

    #[test]
    fn trace_is_normalized_and_tracial() {
        let alg = two_block();
        let one = AlgebraElement::identity(&alg);
        let t = trace(&one);
        assert_relative_eq!(t.re, 1.0, max_relative = 1e-15);
        assert_relative_eq!(t.im, 0.0, epsilon = 1e-15);

        // τ(xy) = τ(yx) on random-ish fixed elements.
        let x = AlgebraElement::from_fn(&alg, |b, i, j| {
            Scalar::new((b + i) as f64 + 0.3, (j as f64) - 0.7)
        });
        let y = AlgebraElement::from_fn(&alg, |b, i, j| {
            Scalar::new((i * j) as f64 - 0.2, (b as f64) + 0.1)
        });
        let xy = trace(&(&x * &y));
        let yx = trace(&(&y * &x));
        assert_relative_eq!(xy.re, yx.re, max_relative = 1e-12);
        assert_relative_eq!(xy.im, yx.im, max_relative = 1e-12);
    }

    #[test]
    fn norm2_matches_inner() {
        let alg = two_block();
        let x = AlgebraElement::from_fn(&alg, |b, i, j| {
            Scalar::new(1.0 + (b * 7 + i * 3 + j) as f64, (i as f64) - (j as f64))
        });
        let n = norm2(&x);
        let ip = inner(&x, &x);
        assert_relative_eq!(n * n, ip.re, max_relative = 1e-13);
        assert!(ip.im.abs() < 1e-13);
    }

    #[test]
    fn norm2_of_projection_uses_weights() {
        // p = 1 ⊕ 0 in M2 ⊕ M1 with weights (3/4, 1/4):
        // ‖p‖₂² = 3/4 · 2/2 = 3/4.
        let alg = two_block();
        let p = AlgebraElement::from_fn(&alg, |b, i, j| {
            if b == 0 && i == j {
                Scalar::new(1.0, 0.0)
            } else {
                Scalar::new(0.0, 0.0)
            }
        });
        assert_relative_eq!(norm2(&p), (0.75f64).sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn uniform_norm_is_max_singular_value() {
        let alg = two_block();
        // diag(3, -1) ⊕ (2): uniform norm 3 regardless of weights.
        let x = AlgebraElement::real_diagonal(&alg, &[vec![3.0, -1.0], vec![2.0]]).unwrap();
        assert_relative_eq!(uniform_norm(&x), 3.0, max_relative = 1e-12);
        // Faithfulness bound: ‖x‖₂ ≥ sqrt(min λ/n) ‖x‖.
        let c = alg.min_weight_ratio().sqrt();
        assert!(norm2(&x) + 1e-12 >= c * uniform_norm(&x));
    }

    #[test]
    fn adjoint_and_symmetrize() {
        let alg = BlockAlgebra::full_matrix(2).unwrap();
        let x = AlgebraElement::from_fn(&alg, |_, i, j| Scalar::new(i as f64, j as f64 + 1.0));
        let s = x.symmetrized();
        assert!(s.is_hermitian());
        assert!(norm2(&(&s - &s.adjoint())) < 1e-14);
        // ‖x*‖₂ = ‖x‖₂.
        assert_relative_eq!(norm2(&x.adjoint()), norm2(&x), max_relative = 1e-14);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let alg = two_block();
        let bad = vec![BlockMatrix::identity(2, 2), BlockMatrix::identity(2, 2)];
        assert!(matches!(
            AlgebraElement::new(Arc::clone(&alg), bad),
            Err(ConeError::MalformedElement { .. })
        ));
    }
}
