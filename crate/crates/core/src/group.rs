//! Closure of finitely generated matrix groups and the orbit of the
//! identity in the cone.
//!
//! Closure is breadth-first: starting from the identity, multiply by every
//! generator and generator inverse, deduplicating in the uniform norm. The
//! walk stops when no new elements appear (a finite group), when the element
//! cap is hit, or when a product's uniform norm escapes every reasonable
//! bound, which certifies that the generated group is not uniformly bounded.

use crate::algebra::{uniform_norm, AlgebraElement, BlockAlgebra, BlockMatrix};
use crate::error::{ConeError, Result};
use crate::geometry::congruence;
use crate::spectral::PositiveElement;
use crate::tol::{EPS_POS, GROUP_DEDUP_REL, NORM_GROWTH_LIMIT};
use std::sync::Arc;

/// A finite multiplication-closed set of invertible elements.
#[derive(Debug, Clone)]
pub struct GroupTable {
    elements: Vec<AlgebraElement>,
    uniform_bound: f64,
    closed: bool,
    generator_indices: Vec<usize>,
}

impl GroupTable {
    /// All elements; index 0 is always the identity.
    pub fn elements(&self) -> &[AlgebraElement] {
        &self.elements
    }

    /// Number of elements discovered.
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// `max_h ‖h‖` over the discovered elements (the uniform bound `M` when
    /// the table is closed).
    pub fn uniform_bound(&self) -> f64 {
        self.uniform_bound
    }

    /// Whether the multiplication table closed before any cap was hit.
    pub fn closed(&self) -> bool {
        self.closed
    }

    /// Index of each generator inside `elements`, in input order.
    pub fn generator_indices(&self) -> &[usize] {
        &self.generator_indices
    }

    /// The group generated by nothing: `{1}` with uniform bound 1.
    pub fn trivial(algebra: &Arc<BlockAlgebra>) -> Self {
        GroupTable {
            elements: vec![AlgebraElement::identity(algebra)],
            uniform_bound: 1.0,
            closed: true,
            generator_indices: Vec::new(),
        }
    }
}

/// Why a closure walk stopped early.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureOverflow {
    /// A product's uniform norm exceeded [`NORM_GROWTH_LIMIT`]: the group is
    /// not uniformly bounded.
    NormGrowth,
    /// The element cap was reached with products still undiscovered.
    OrderCap,
}

fn uniform_distance(x: &AlgebraElement, y: &AlgebraElement) -> f64 {
    uniform_norm(&(x - y))
}

/// Membership test under the closure dedup rule:
/// `‖x - y‖ ≤ GROUP_DEDUP_REL · (1 + ‖x‖)`.
fn find_element(x: &AlgebraElement, x_norm: f64, elements: &[AlgebraElement]) -> Option<usize> {
    let tol = GROUP_DEDUP_REL * (1.0 + x_norm);
    elements.iter().position(|y| uniform_distance(x, y) <= tol)
}

fn block_inverse(x: &AlgebraElement) -> Result<AlgebraElement> {
    let sigma_min = x.smallest_singular_value();
    if sigma_min.is_nan() || sigma_min <= EPS_POS {
        return Err(ConeError::NotInvertible { sigma_min });
    }
    let blocks: Vec<BlockMatrix> = x
        .blocks()
        .iter()
        .map(|m| {
            m.clone()
                .try_inverse()
                .ok_or(ConeError::NotInvertible { sigma_min })
        })
        .collect::<Result<_>>()?;
    AlgebraElement::new(Arc::clone(x.algebra()), blocks)
}

/// Breadth-first closure that never fails on overflow: it returns whatever
/// was discovered plus the reason the walk stopped, if any. The strict
/// variant [`close_group`] wraps this.
pub fn close_group_best_effort(
    generators: &[AlgebraElement],
    max_order: usize,
) -> Result<(GroupTable, Option<ClosureOverflow>)> {
    if max_order == 0 {
        return Err(ConeError::InvalidParameter {
            reason: "max_order must be at least 1".into(),
        });
    }
    let alg = match generators.first() {
        Some(g) => g.algebra().clone(),
        None => {
            return Err(ConeError::EmptySet);
        }
    };
    assert!(
        generators.iter().all(|g| g.algebra() == &alg),
        "generators must share an algebra"
    );

    // Multipliers: generators and their inverses, deduplicated.
    let mut multipliers: Vec<AlgebraElement> = Vec::new();
    for g in generators {
        let inv = block_inverse(g)?;
        for m in [g.clone(), inv] {
            let n = uniform_norm(&m);
            if n > NORM_GROWTH_LIMIT {
                return Ok((
                    GroupTable {
                        elements: vec![AlgebraElement::identity(&alg)],
                        uniform_bound: 1.0,
                        closed: false,
                        generator_indices: Vec::new(),
                    },
                    Some(ClosureOverflow::NormGrowth),
                ));
            }
            if find_element(&m, n, &multipliers).is_none() {
                multipliers.push(m);
            }
        }
    }

    let mut elements = vec![AlgebraElement::identity(&alg)];
    let mut norms = vec![1.0f64];
    let mut frontier = 0usize;
    let mut overflow = None;

    'walk: while frontier < elements.len() {
        let current = elements[frontier].clone();
        frontier += 1;
        for m in &multipliers {
            let product = &current * m;
            let n = uniform_norm(&product);
            if n > NORM_GROWTH_LIMIT {
                overflow = Some(ClosureOverflow::NormGrowth);
                break 'walk;
            }
            if find_element(&product, n, &elements).is_some() {
                continue;
            }
            if elements.len() >= max_order {
                overflow = Some(ClosureOverflow::OrderCap);
                break 'walk;
            }
            elements.push(product);
            norms.push(n);
        }
    }

    let closed = overflow.is_none();
    let uniform_bound = norms.iter().copied().fold(0.0f64, f64::max);
    let generator_indices = generators
        .iter()
        .map(|g| {
            let n = uniform_norm(g);
            find_element(g, n, &elements).unwrap_or(usize::MAX)
        })
        .collect();
    Ok((
        GroupTable {
            elements,
            uniform_bound,
            closed,
            generator_indices,
        },
        overflow,
    ))
}

/// Closes the group generated by `generators` (and their inverses) under
/// multiplication.
///
/// Fails with [`ConeError::OrderExceeded`] when the walk stops early;
/// `norm_growth` in that error distinguishes unbounded growth from a group
/// that is merely larger than `max_order`.
pub fn close_group(generators: &[AlgebraElement], max_order: usize) -> Result<GroupTable> {
    let (table, overflow) = close_group_best_effort(generators, max_order)?;
    match overflow {
        None => Ok(table),
        Some(kind) => Err(ConeError::OrderExceeded {
            max_order,
            norm_growth: kind == ClosureOverflow::NormGrowth,
        }),
    }
}

/// Closure with the ambient algebra given explicitly, so an empty generator
/// set is meaningful: it yields the trivial group `{1}`. With generators
/// present this matches [`close_group_best_effort`].
pub fn close_group_in(
    algebra: &Arc<BlockAlgebra>,
    generators: &[AlgebraElement],
    max_order: usize,
) -> Result<(GroupTable, Option<ClosureOverflow>)> {
    if generators.is_empty() {
        if max_order == 0 {
            return Err(ConeError::InvalidParameter {
                reason: "max_order must be at least 1".into(),
            });
        }
        return Ok((GroupTable::trivial(algebra), None));
    }
    assert!(
        generators.iter().all(|g| g.algebra() == algebra),
        "generators must live in the given algebra"
    );
    close_group_best_effort(generators, max_order)
}

/// Orbit of the identity under the congruence action of the table:
/// `{h h* : h in the table}`, deduplicated in the uniform norm. Every orbit
/// point is positive invertible, and for a table with uniform bound `M` the
/// orbit lies in the band `[M^{-2}, M²]`.
pub fn orbit_of_identity(table: &GroupTable) -> Result<Vec<PositiveElement>> {
    let alg = table.elements()[0].algebra();
    let one = PositiveElement::one(alg);
    let mut orbit: Vec<PositiveElement> = Vec::new();
    for h in table.elements() {
        let p = congruence(h, &one)?;
        let n = uniform_norm(p.element());
        let tol = GROUP_DEDUP_REL * (1.0 + n);
        let dup = orbit
            .iter()
            .any(|q| uniform_distance(p.element(), q.element()) <= tol);
        if !dup {
            orbit.push(p);
        }
    }
    Ok(orbit)
}
