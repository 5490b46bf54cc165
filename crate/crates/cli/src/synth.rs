//! Instance synthesis with hidden ground truth: a finite unitary group is
//! represented blockwise, disguised by a per-block Haar basis change, and
//! published as generators `g u g^{-1}` for a hidden invertible conjugator
//! `g`. The conjugator goes into a sidecar document for debugging only; the
//! solver never reads it.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;
use tracecone::{sample_haar_unitary, AlgebraElement, BlockAlgebra, BlockMatrix, Scalar};

use crate::instance::{encode_element, ElementBlocks, InstanceDoc, Role};
use crate::{CliError, CliResult};

pub const TRUTH_SCHEMA: u32 = 1;

/// Group family of a synthesized instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Cyclic group of order `k`: one generator with `k`-th-root-of-unity
    /// spectrum.
    Cyclic(u32),
    /// Dihedral group of order `2k`: a rotation of order `k` and a
    /// reflection, in 2-dimensional slots.
    Dihedral(u32),
    /// Symmetric group on `k` letters via permutation matrices: order `k!`.
    Perm(u32),
    /// Haar-rotated unitary of exact order `n` (a cyclic group with randomly
    /// assigned root-of-unity exponents).
    RandomUnitaryOrder(u32),
}

impl Family {
    /// Exact order of the generated group.
    pub fn expected_order(self) -> u64 {
        match self {
            Family::Cyclic(k) => u64::from(k),
            Family::Dihedral(k) => 2 * u64::from(k),
            Family::Perm(k) => (1..=u64::from(k)).product(),
            Family::RandomUnitaryOrder(n) => u64::from(n),
        }
    }

    pub fn label(self) -> String {
        match self {
            Family::Cyclic(k) => format!("cyclic-{k}"),
            Family::Dihedral(k) => format!("dihedral-{k}"),
            Family::Perm(k) => format!("perm-{k}"),
            Family::RandomUnitaryOrder(n) => format!("random-unitary-order-{n}"),
        }
    }
}

/// Parses a family label: `cyclic-12`, `dihedral-8`, `perm-3`, or
/// `random-unitary-order-48`.
pub fn parse_family(text: &str) -> CliResult<Family> {
    let bad = || {
        CliError::input(format!(
            "unknown group family {text:?} (expected cyclic-k, dihedral-k, perm-k, \
             or random-unitary-order-n)"
        ))
    };
    let (stem, num) = text.rsplit_once('-').ok_or_else(bad)?;
    let k: u32 = num.parse().map_err(|_| bad())?;
    match stem {
        "cyclic" => {
            if k == 0 {
                return Err(CliError::input("cyclic order must be at least 1"));
            }
            Ok(Family::Cyclic(k))
        }
        "dihedral" => {
            if k == 0 {
                return Err(CliError::input("dihedral parameter must be at least 1"));
            }
            Ok(Family::Dihedral(k))
        }
        "perm" => {
            if !(2..=6).contains(&k) {
                return Err(CliError::input(
                    "perm-k supports k in 2..=6 (closure order k! stays tractable)",
                ));
            }
            Ok(Family::Perm(k))
        }
        "random-unitary-order" => {
            if k == 0 {
                return Err(CliError::input("unitary order must be at least 1"));
            }
            Ok(Family::RandomUnitaryOrder(k))
        }
        _ => Err(bad()),
    }
}

/// Parses `--blocks`: comma-separated `dim` or `dim:weight` entries, e.g.
/// `2`, `2,3`, `2:0.4,3:0.6`. Weights are either given for every block or
/// for none (equal split). Explicit weights must sum to 1 within 1e-9.
pub fn parse_blocks(text: &str) -> CliResult<(Vec<usize>, Vec<f64>)> {
    let mut dims = Vec::new();
    let mut weights: Vec<Option<f64>> = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            return Err(CliError::input("empty block entry in --blocks"));
        }
        let (dim_text, weight) = match part.split_once(':') {
            Some((d, w)) => {
                let w: f64 = w
                    .parse()
                    .map_err(|_| CliError::input(format!("bad block weight {w:?}")))?;
                (d, Some(w))
            }
            None => (part, None),
        };
        let dim: usize = dim_text
            .parse()
            .map_err(|_| CliError::input(format!("bad block dimension {dim_text:?}")))?;
        if dim == 0 {
            return Err(CliError::input("block dimensions must be at least 1"));
        }
        dims.push(dim);
        weights.push(weight);
    }
    let explicit = weights.iter().filter(|w| w.is_some()).count();
    let weights: Vec<f64> = if explicit == 0 {
        vec![1.0 / dims.len() as f64; dims.len()]
    } else if explicit == weights.len() {
        let ws: Vec<f64> = weights.into_iter().map(|w| w.unwrap()).collect();
        if ws.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(CliError::input(
                "trace not normalized: weights must be positive",
            ));
        }
        let sum: f64 = ws.iter().sum();
        if (sum - 1.0).abs() > crate::instance::WEIGHT_SUM_SLACK {
            return Err(CliError::input(format!(
                "trace not normalized: weights sum to {sum:.12}, expected 1"
            )));
        }
        ws.iter().map(|w| w / sum).collect()
    } else {
        return Err(CliError::input(
            "--blocks must give weights for all blocks or for none",
        ));
    };
    Ok((dims, weights))
}

/// Sidecar document recording the hidden truth of a synthesized instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TruthDoc {
    pub schema: u32,
    pub family: String,
    pub cond: f64,
    pub seed: u64,
    pub expected_order: u64,
    pub conjugator: ElementBlocks,
    pub conjugator_inverse: ElementBlocks,
    pub conjugator_condition: f64,
    pub base_generators: BTreeMap<String, ElementBlocks>,
}

impl TruthDoc {
    pub fn write(&self, path: &Path) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::internal(format!("truth serialization failed: {e}")))?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read truth {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::input(format!("malformed truth {}: {e}", path.display())))
    }
}

pub struct SynthParams {
    pub dims: Vec<usize>,
    pub weights: Vec<f64>,
    pub family: Family,
    pub cond: f64,
    pub seed: u64,
}

/// Unitary generators of the family, disguised by one shared per-block Haar
/// basis change (shared so the group relations survive conjugation).
pub fn build_base_generators(
    algebra: &Arc<BlockAlgebra>,
    family: Family,
    rng: &mut impl Rng,
) -> CliResult<Vec<AlgebraElement>> {
    let raw = match family {
        Family::Cyclic(k) | Family::RandomUnitaryOrder(k) => {
            vec![cyclic_generator(algebra, k, rng)?]
        }
        Family::Dihedral(k) => dihedral_generators(algebra, k, rng)?,
        Family::Perm(k) => perm_generators(algebra, k)?,
    };
    let q = sample_haar_unitary(algebra, rng);
    let q_adj = q.adjoint();
    Ok(raw.iter().map(|u| &(&q * u) * &q_adj).collect())
}

/// Diagonal of `k`-th roots of unity. The first slot is pinned to the
/// primitive root so the generator has order exactly `k`, and the first
/// block of dimension ≥ 2 gets spectrum `{ω, 1, …}` so the generator is
/// never a scalar there (a scalar would commute with the hidden conjugator
/// and publish an undisguised instance).
fn cyclic_generator(
    algebra: &Arc<BlockAlgebra>,
    k: u32,
    rng: &mut impl Rng,
) -> CliResult<AlgebraElement> {
    let wide = algebra.block_dims().iter().position(|&d| d >= 2);
    let blocks: Vec<BlockMatrix> = algebra
        .block_dims()
        .iter()
        .enumerate()
        .map(|(b, &dim)| {
            BlockMatrix::from_fn(dim, dim, |i, j| {
                if i != j {
                    return Scalar::new(0.0, 0.0);
                }
                let e = if (b == 0 || Some(b) == wide) && i == 0 {
                    1
                } else if Some(b) == wide && i == 1 {
                    0
                } else {
                    rng.random_range(0..k)
                };
                Scalar::from_polar(1.0, std::f64::consts::TAU * f64::from(e) / f64::from(k))
            })
        })
        .collect();
    AlgebraElement::new(Arc::clone(algebra), blocks).map_err(CliError::from)
}

/// Rotation `r` (order `k`) and reflection `s`, assembled from 2-dimensional
/// slots with sign slots on odd leftovers. Relations `r^k = s² = 1`,
/// `s r s = r^{-1}` hold slotwise; the first 2-dimensional slot carries the
/// primitive rotation so the group is exactly dihedral of order `2k`.
fn dihedral_generators(
    algebra: &Arc<BlockAlgebra>,
    k: u32,
    rng: &mut impl Rng,
) -> CliResult<Vec<AlgebraElement>> {
    if !algebra.block_dims().iter().any(|&d| d >= 2) {
        return Err(CliError::input(
            "dihedral families need a block of dimension at least 2",
        ));
    }
    let mut first_slot = true;
    let mut r_blocks = Vec::new();
    let mut s_blocks = Vec::new();
    for &dim in algebra.block_dims() {
        let mut r = BlockMatrix::identity(dim, dim);
        let mut s = BlockMatrix::identity(dim, dim);
        for slot in 0..dim / 2 {
            let base = 2 * slot;
            let c = if first_slot || k == 1 {
                u32::from(k > 1)
            } else {
                rng.random_range(1..k)
            };
            first_slot = false;
            let theta = std::f64::consts::TAU * f64::from(c) / f64::from(k);
            r[(base, base)] = Scalar::new(theta.cos(), 0.0);
            r[(base, base + 1)] = Scalar::new(-theta.sin(), 0.0);
            r[(base + 1, base)] = Scalar::new(theta.sin(), 0.0);
            r[(base + 1, base + 1)] = Scalar::new(theta.cos(), 0.0);
            s[(base + 1, base + 1)] = Scalar::new(-1.0, 0.0);
        }
        if dim % 2 == 1 {
            // A 1-dimensional slot: the rotation must be trivial there; the
            // reflection may carry either sign.
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            s[(dim - 1, dim - 1)] = Scalar::new(sign, 0.0);
        }
        r_blocks.push(r);
        s_blocks.push(s);
    }
    Ok(vec![
        AlgebraElement::new(Arc::clone(algebra), r_blocks)?,
        AlgebraElement::new(Arc::clone(algebra), s_blocks)?,
    ])
}

/// Transposition (0 1) and the full cycle (0 1 … k−1) as permutation
/// matrices, padded by the identity; blocks smaller than `k` carry the
/// trivial representation.
fn perm_generators(algebra: &Arc<BlockAlgebra>, k: u32) -> CliResult<Vec<AlgebraElement>> {
    let k = k as usize;
    if !algebra.block_dims().iter().any(|&d| d >= k) {
        return Err(CliError::input(format!(
            "perm-{k} needs a block of dimension at least {k}"
        )));
    }
    let perm_matrix = |dim: usize, sigma: &dyn Fn(usize) -> usize| {
        let mut m = BlockMatrix::zeros(dim, dim);
        for j in 0..dim {
            let i = if j < k { sigma(j) } else { j };
            m[(i, j)] = Scalar::new(1.0, 0.0);
        }
        m
    };
    let transposition: Vec<BlockMatrix> = algebra
        .block_dims()
        .iter()
        .map(|&dim| {
            if dim >= k {
                perm_matrix(dim, &|j| {
                    if j == 0 {
                        1
                    } else if j == 1 {
                        0
                    } else {
                        j
                    }
                })
            } else {
                BlockMatrix::identity(dim, dim)
            }
        })
        .collect();
    let cycle: Vec<BlockMatrix> = algebra
        .block_dims()
        .iter()
        .map(|&dim| {
            if dim >= k {
                perm_matrix(dim, &|j| (j + 1) % k)
            } else {
                BlockMatrix::identity(dim, dim)
            }
        })
        .collect();
    Ok(vec![
        AlgebraElement::new(Arc::clone(algebra), transposition)?,
        AlgebraElement::new(Arc::clone(algebra), cycle)?,
    ])
}

/// Hidden conjugator `g = U Σ V*` with Haar `U, V` and singular values
/// log-uniform in `[1/cond, cond]`, together with its exactly assembled
/// inverse `V Σ^{-1} U*` and realized condition number. `cond = 1` yields
/// the identity, so the published generators stay unitary.
pub fn sample_conjugator(
    algebra: &Arc<BlockAlgebra>,
    cond: f64,
    rng: &mut impl Rng,
) -> CliResult<(AlgebraElement, AlgebraElement, f64)> {
    if !(cond.is_finite() && cond >= 1.0) {
        return Err(CliError::input("--cond must be a finite number >= 1"));
    }
    if cond <= 1.0 + 1e-12 {
        let one = AlgebraElement::identity(algebra);
        return Ok((one.clone(), one, 1.0));
    }
    let u = sample_haar_unitary(algebra, rng);
    let v = sample_haar_unitary(algebra, rng);
    let half = cond.ln();
    let mut sig_min = f64::INFINITY;
    let mut sig_max = 0.0f64;
    let mut g_blocks = Vec::new();
    let mut ginv_blocks = Vec::new();
    for ((&dim, ub), vb) in algebra.block_dims().iter().zip(u.blocks()).zip(v.blocks()) {
        let sigmas: Vec<f64> = (0..dim)
            .map(|_| rng.random_range(-half..=half).exp())
            .collect();
        for &s in &sigmas {
            sig_min = sig_min.min(s);
            sig_max = sig_max.max(s);
        }
        let diag = BlockMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                Scalar::new(sigmas[i], 0.0)
            } else {
                Scalar::new(0.0, 0.0)
            }
        });
        let diag_inv = BlockMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                Scalar::new(1.0 / sigmas[i], 0.0)
            } else {
                Scalar::new(0.0, 0.0)
            }
        });
        g_blocks.push(ub * &diag * vb.adjoint());
        ginv_blocks.push(vb * &diag_inv * ub.adjoint());
    }
    let g = AlgebraElement::new(Arc::clone(algebra), g_blocks)?;
    let g_inv = AlgebraElement::new(Arc::clone(algebra), ginv_blocks)?;
    Ok((g, g_inv, sig_max / sig_min))
}

/// Builds the instance and its truth sidecar: base unitaries `u_i`,
/// published generators `h_i = g u_i g^{-1}`.
pub fn synthesize(params: &SynthParams) -> CliResult<(InstanceDoc, TruthDoc)> {
    let algebra =
        BlockAlgebra::new(params.dims.clone(), params.weights.clone()).map_err(CliError::from)?;
    let mut rng = ChaCha12Rng::seed_from_u64(params.seed);

    let base = build_base_generators(&algebra, params.family, &mut rng)?;
    let (g, g_inv, realized_cond) = sample_conjugator(&algebra, params.cond, &mut rng)?;

    let mut instance = InstanceDoc::new(&algebra);
    let mut base_generators = BTreeMap::new();
    for (i, u) in base.iter().enumerate() {
        let h = &(&g * u) * &g_inv;
        let name = format!("h{i}");
        instance.insert(name.clone(), Role::Generator, &h);
        // Keyed by the published name so truth entries line up with the
        // instance elements they disguise.
        base_generators.insert(name, encode_element(u));
    }

    let truth = TruthDoc {
        schema: TRUTH_SCHEMA,
        family: params.family.label(),
        cond: params.cond,
        seed: params.seed,
        expected_order: params.family.expected_order(),
        conjugator: encode_element(&g),
        conjugator_inverse: encode_element(&g_inv),
        conjugator_condition: realized_cond,
        base_generators,
    };
    Ok((instance, truth))
}
