//! Spectral calculus for Hermitian and positive invertible elements.
//!
//! Eigendecompositions are computed once per element and cached inside
//! [`PositiveElement`], so spectral maps (powers, log, square roots) reuse
//! the same unitary diagonalization instead of re-factorizing.

use std::sync::Arc;

use nalgebra::linalg::SymmetricEigen;
use nalgebra::DVector;

use crate::algebra::{norm2, AlgebraElement, BlockAlgebra, BlockMatrix, Scalar};
use crate::error::{ConeError, Result};
use crate::tol::{EPS_EIG, EPS_HERM, EPS_POS, KAPPA_MAX};

/// Eigendecomposition of one Hermitian block: real eigenvalues in ascending
/// order and a unitary whose columns are the matching eigenvectors.
#[derive(Debug, Clone)]
pub struct BlockEig {
    values: Vec<f64>,
    vectors: BlockMatrix,
}

impl BlockEig {
    /// Eigenvalues in ascending order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Unitary of eigenvectors (column `j` pairs with `values[j]`).
    pub fn vectors(&self) -> &BlockMatrix {
        &self.vectors
    }

    /// Reassembles `Σ_j f(λ_j) v_j v_j*`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> BlockMatrix {
        let d = DVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&l| Scalar::new(f(l), 0.0)),
        );
        // V diag(f(λ)) V*: scale columns, then multiply by V*.
        let mut scaled = self.vectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            let s = d[j];
            for z in col.iter_mut() {
                *z *= s;
            }
        }
        &scaled * self.vectors.adjoint()
    }
}

fn eig_hermitian_block(m: &BlockMatrix) -> Result<BlockEig> {
    let n = m.nrows();
    let se = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&j| se.eigenvalues[j]).collect();
    let vectors = BlockMatrix::from_fn(n, n, |i, j| se.eigenvectors[(i, order[j])]);

    // Residual check: ‖m v_j - λ_j v_j‖ ≤ EPS_EIG · ‖m‖ per eigenpair.
    let scale = m.norm().max(1.0);
    for (j, &l) in values.iter().enumerate() {
        let v = vectors.column(j);
        let resid = (m * v - v * Scalar::new(l, 0.0)).norm();
        if resid > EPS_EIG * scale {
            return Err(ConeError::InvalidParameter {
                reason: format!("eigendecomposition residual {resid:.3e} exceeds tolerance"),
            });
        }
    }
    Ok(BlockEig { values, vectors })
}

/// Eigendecomposition of a Hermitian element, one [`BlockEig`] per block.
///
/// Fails with [`ConeError::NotHermitian`] if the relative defect exceeds
/// [`EPS_HERM`]; inside the tolerance the Hermitian part is decomposed so
/// results are exactly Hermitian downstream.
pub fn hermitian_eig(x: &AlgebraElement) -> Result<Vec<BlockEig>> {
    let defect = x.hermitian_defect();
    if defect > EPS_HERM {
        return Err(ConeError::NotHermitian { defect });
    }
    x.symmetrized()
        .blocks()
        .iter()
        .map(eig_hermitian_block)
        .collect()
}

/// A positive invertible element together with its cached eigendecomposition.
///
/// Invariants: the element is Hermitian within [`EPS_HERM`], every eigenvalue
/// exceeds [`EPS_POS`], and `eig` diagonalizes the stored element.
#[derive(Debug, Clone)]
pub struct PositiveElement {
    element: AlgebraElement,
    eig: Vec<BlockEig>,
    min_eig: f64,
    max_eig: f64,
}

impl PositiveElement {
    /// The identity of the algebra as a positive element.
    pub fn one(algebra: &Arc<BlockAlgebra>) -> Self {
        let element = AlgebraElement::identity(algebra);
        let eig = algebra
            .block_dims()
            .iter()
            .map(|&n| BlockEig {
                values: vec![1.0; n],
                vectors: BlockMatrix::identity(n, n),
            })
            .collect();
        Self {
            element,
            eig,
            min_eig: 1.0,
            max_eig: 1.0,
        }
    }

    fn from_eig(algebra: &Arc<BlockAlgebra>, eig: Vec<BlockEig>) -> Self {
        let blocks: Vec<BlockMatrix> = eig.iter().map(|e| e.map(|l| l)).collect();
        let element = AlgebraElement::new(Arc::clone(algebra), blocks)
            .expect("eigendecomposition preserves block shapes");
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for e in &eig {
            for &l in e.values() {
                lo = lo.min(l);
                hi = hi.max(l);
            }
        }
        Self {
            element: element.symmetrized(),
            eig,
            min_eig: lo,
            max_eig: hi,
        }
    }

    /// The underlying element.
    pub fn element(&self) -> &AlgebraElement {
        &self.element
    }

    /// The algebra this element belongs to.
    pub fn algebra(&self) -> &Arc<BlockAlgebra> {
        self.element.algebra()
    }

    /// Cached eigendecomposition, one entry per block.
    pub fn eig(&self) -> &[BlockEig] {
        &self.eig
    }

    /// Smallest eigenvalue across blocks.
    pub fn min_eig(&self) -> f64 {
        self.min_eig
    }

    /// Largest eigenvalue across blocks.
    pub fn max_eig(&self) -> f64 {
        self.max_eig
    }

    /// Condition number `max_eig / min_eig`.
    pub fn condition_number(&self) -> f64 {
        self.max_eig / self.min_eig
    }

    fn check_conditioning(&self) -> Result<()> {
        let k = self.condition_number();
        if !k.is_finite() || k > KAPPA_MAX {
            return Err(ConeError::IllConditioned { condition: k });
        }
        Ok(())
    }

    /// Applies a strictly positive monotone function to the spectrum,
    /// reusing the cached eigenvectors. `increasing` states whether `f`
    /// preserves or reverses the eigenvalue order.
    fn map_positive(&self, f: impl Fn(f64) -> f64 + Copy, increasing: bool) -> Self {
        let eig: Vec<BlockEig> = self
            .eig
            .iter()
            .map(|e| {
                let mut values: Vec<f64> = e.values().iter().map(|&l| f(l)).collect();
                let n = values.len();
                let vectors = if increasing {
                    e.vectors().clone()
                } else {
                    values.reverse();
                    BlockMatrix::from_fn(n, n, |i, j| e.vectors()[(i, n - 1 - j)])
                };
                BlockEig { values, vectors }
            })
            .collect();
        Self::from_eig(self.algebra(), eig)
    }

    /// Real power `a^t`.
    pub fn powf(&self, t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(ConeError::InvalidParameter {
                reason: format!("power exponent must be finite, got {t}"),
            });
        }
        self.check_conditioning()?;
        if t == 0.0 {
            return Ok(Self::one(self.algebra()));
        }
        Ok(self.map_positive(|l| l.powf(t), t > 0.0))
    }

    /// Square root `a^{1/2}`.
    pub fn sqrt(&self) -> Result<Self> {
        self.check_conditioning()?;
        Ok(self.map_positive(f64::sqrt, true))
    }

    /// Inverse square root `a^{-1/2}`.
    pub fn inv_sqrt(&self) -> Result<Self> {
        self.check_conditioning()?;
        Ok(self.map_positive(|l| 1.0 / l.sqrt(), false))
    }

    /// Inverse `a^{-1}`.
    pub fn inv(&self) -> Result<Self> {
        self.check_conditioning()?;
        Ok(self.map_positive(|l| 1.0 / l, false))
    }

    /// Logarithm `ln a`, a Hermitian (not necessarily positive) element.
    pub fn log(&self) -> Result<AlgebraElement> {
        self.check_conditioning()?;
        let blocks = self.eig.iter().map(|e| e.map(f64::ln)).collect();
        Ok(AlgebraElement::new(Arc::clone(self.algebra()), blocks)
            .expect("spectral map preserves block shapes")
            .symmetrized())
    }

    /// Trace-norm distance of the spectrum from the identity's, used by
    /// band checks and tests: `(min_eig, max_eig)` as a pair.
    pub fn spectral_range(&self) -> (f64, f64) {
        (self.min_eig, self.max_eig)
    }
}

/// Checks Hermitianness and strict positivity, then caches the
/// eigendecomposition. This is the only entry point into the positive cone
/// for general elements.
pub fn positivize(x: &AlgebraElement) -> Result<PositiveElement> {
    let eig = hermitian_eig(x)?;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for e in &eig {
        for &l in e.values() {
            lo = lo.min(l);
            hi = hi.max(l);
        }
    }
    if lo.is_nan() || lo <= EPS_POS {
        return Err(ConeError::NotPositive { min_eig: lo });
    }
    Ok(PositiveElement {
        element: x.symmetrized(),
        eig,
        min_eig: lo,
        max_eig: hi,
    })
}

/// Named spectral maps on positive invertible elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralFn {
    /// `a ↦ a^t`.
    Power(f64),
    /// `a ↦ ln a`.
    Log,
    /// `a ↦ exp a`.
    Exp,
    /// `a ↦ a^{1/2}`.
    Sqrt,
    /// `a ↦ a^{-1/2}`.
    InvSqrt,
}

/// Applies a named spectral map, returning a plain element (`Log` leaves the
/// cone; the rest stay inside it).
pub fn spectral_map(a: &PositiveElement, f: SpectralFn) -> Result<AlgebraElement> {
    match f {
        SpectralFn::Power(t) => Ok(a.powf(t)?.element().clone()),
        SpectralFn::Log => a.log(),
        SpectralFn::Exp => {
            a.check_conditioning()?;
            Ok(a.map_positive(f64::exp, true).element().clone())
        }
        SpectralFn::Sqrt => Ok(a.sqrt()?.element().clone()),
        SpectralFn::InvSqrt => Ok(a.inv_sqrt()?.element().clone()),
    }
}

/// Exponential of a Hermitian element, always positive invertible.
pub fn exp_hermitian(x: &AlgebraElement) -> Result<PositiveElement> {
    let eig = hermitian_eig(x)?;
    let mapped: Vec<BlockEig> = eig
        .into_iter()
        .map(|e| BlockEig {
            values: e.values.iter().map(|&l| l.exp()).collect(),
            vectors: e.vectors,
        })
        .collect();
    let pe = PositiveElement::from_eig(x.algebra(), mapped);
    if pe.min_eig.is_nan() || pe.min_eig <= EPS_POS || !pe.max_eig.is_finite() {
        return Err(ConeError::InvalidParameter {
            reason: format!(
                "exponential left the representable cone (spectrum [{:.3e}, {:.3e}])",
                pe.min_eig, pe.max_eig
            ),
        });
    }
    Ok(pe)
}

/// Diagnostic for tests: largest reconstruction error
/// `‖x - V diag(λ) V*‖₂ / (1 + ‖x‖₂)` of a cached decomposition.
pub fn reconstruction_defect(p: &PositiveElement) -> f64 {
    let rebuilt_blocks: Vec<BlockMatrix> = p.eig().iter().map(|e| e.map(|l| l)).collect();
    let rebuilt = AlgebraElement::new(Arc::clone(p.algebra()), rebuilt_blocks).unwrap();
    norm2(&(&rebuilt - p.element())) / (1.0 + norm2(p.element()))
}
