//! Instance documents: the on-disk form of a block algebra plus named,
//! role-tagged elements. Matrices are row-major, one list per block, each
//! complex entry a `[re, im]` pair. JSON floats use the shortest
//! representation that parses back to the identical bit pattern, so a
//! write/read round trip reproduces every matrix exactly.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;
use tracecone::{AlgebraElement, BlockAlgebra, BlockMatrix, Scalar};

use crate::{CliError, CliResult};

pub const INSTANCE_SCHEMA: u32 = 1;

/// Weight sums within this slack of 1 are renormalized exactly; anything
/// further off is rejected as "trace not normalized".
pub const WEIGHT_SUM_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockSpec {
    pub dim: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub blocks: Vec<BlockSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Generator,
    Point,
    Candidate,
}

/// Row-major complex blocks: `blocks[b][row][col] = [re, im]`.
pub type ElementBlocks = Vec<Vec<Vec<[f64; 2]>>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElementSpec {
    pub role: Role,
    pub blocks: ElementBlocks,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub schema: u32,
    pub algebra: AlgebraSpec,
    pub elements: BTreeMap<String, ElementSpec>,
}

impl InstanceDoc {
    pub fn new(algebra: &Arc<BlockAlgebra>) -> Self {
        let blocks = algebra
            .block_dims()
            .iter()
            .zip(algebra.trace_weights())
            .map(|(&dim, &weight)| BlockSpec { dim, weight })
            .collect();
        InstanceDoc {
            schema: INSTANCE_SCHEMA,
            algebra: AlgebraSpec { blocks },
            elements: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, name: impl Into<String>, role: Role, element: &AlgebraElement) {
        self.elements.insert(
            name.into(),
            ElementSpec {
                role,
                blocks: encode_element(element),
            },
        );
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::input(format!("cannot read instance {}: {e}", path.display()))
        })?;
        let doc: InstanceDoc = serde_json::from_str(&text)
            .map_err(|e| CliError::input(format!("malformed instance {}: {e}", path.display())))?;
        if doc.schema != INSTANCE_SCHEMA {
            return Err(CliError::input(format!(
                "unsupported instance schema {} (expected {INSTANCE_SCHEMA})",
                doc.schema
            )));
        }
        Ok(doc)
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::internal(format!("serialization failed: {e}")))?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    /// Validates and builds the algebra. Weights must be positive and sum to
    /// 1 within [`WEIGHT_SUM_SLACK`]; the tiny residual is renormalized away
    /// so the core's exact normalization invariant holds.
    pub fn to_algebra(&self) -> CliResult<Arc<BlockAlgebra>> {
        if self.algebra.blocks.is_empty() {
            return Err(CliError::input("instance algebra has no blocks"));
        }
        let dims: Vec<usize> = self.algebra.blocks.iter().map(|b| b.dim).collect();
        let weights: Vec<f64> = self.algebra.blocks.iter().map(|b| b.weight).collect();
        if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(CliError::input(
                "trace not normalized: weights must be positive",
            ));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_SLACK {
            return Err(CliError::input(format!(
                "trace not normalized: weights sum to {sum:.12}, expected 1"
            )));
        }
        let renormalized: Vec<f64> = weights.iter().map(|w| w / sum).collect();
        BlockAlgebra::new(dims, renormalized).map_err(CliError::from)
    }

    /// Looks up one named element and materializes it in `algebra`.
    pub fn element(&self, algebra: &Arc<BlockAlgebra>, name: &str) -> CliResult<AlgebraElement> {
        let spec = self
            .elements
            .get(name)
            .ok_or_else(|| CliError::input(format!("no element named {name:?} in instance")))?;
        decode_element(algebra, &spec.blocks)
            .map_err(|e| CliError::input(format!("element {name:?}: {}", e.message)))
    }

    /// All elements carrying `role`, in name order (deterministic).
    pub fn elements_with_role(
        &self,
        algebra: &Arc<BlockAlgebra>,
        role: Role,
    ) -> CliResult<Vec<(String, AlgebraElement)>> {
        self.elements
            .iter()
            .filter(|(_, spec)| spec.role == role)
            .map(|(name, spec)| {
                let x = decode_element(algebra, &spec.blocks)
                    .map_err(|e| CliError::input(format!("element {name:?}: {}", e.message)))?;
                Ok((name.clone(), x))
            })
            .collect()
    }
}

pub fn encode_element(x: &AlgebraElement) -> ElementBlocks {
    x.blocks()
        .iter()
        .map(|m| {
            (0..m.nrows())
                .map(|i| {
                    (0..m.ncols())
                        .map(|j| [m[(i, j)].re, m[(i, j)].im])
                        .collect()
                })
                .collect()
        })
        .collect()
}

pub fn decode_element(
    algebra: &Arc<BlockAlgebra>,
    blocks: &ElementBlocks,
) -> CliResult<AlgebraElement> {
    let dims = algebra.block_dims();
    if blocks.len() != dims.len() {
        return Err(CliError::input(format!(
            "element has {} blocks, algebra has {}",
            blocks.len(),
            dims.len()
        )));
    }
    let mut mats: Vec<BlockMatrix> = Vec::with_capacity(dims.len());
    for (b, (rows, &dim)) in blocks.iter().zip(dims).enumerate() {
        if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
            return Err(CliError::input(format!(
                "block {b} is not {dim}x{dim} row-major"
            )));
        }
        mats.push(BlockMatrix::from_fn(dim, dim, |i, j| {
            Scalar::new(rows[i][j][0], rows[i][j][1])
        }));
    }
    AlgebraElement::new(Arc::clone(algebra), mats).map_err(CliError::from)
}
