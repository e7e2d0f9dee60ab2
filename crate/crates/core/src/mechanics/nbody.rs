//! Verdict queries for the planar n-body problem on the reduced manifold.
//!
//! After fixing a nonzero angular momentum and reducing by translations and
//! rotations, the phase space has dimension `4n - 6` and the reduced
//! Hamiltonian is a fiberwise quadratic on a bundle over
//! `R_+ x CP(n-2) \ collisions`; every non-degenerate critical point has
//! index at most `2n - 4`, strictly below half the dimension. These
//! scenarios are verdict-only: no complex model is built.

use crate::morserules::{CriticalPointRecord, LevelPassQuery};

use super::MechanicsError;

/// A level pass on the reduced planar n-body manifold: a single critical
/// point of the maximal admissible index `2n - 4`, or the symmetric pair
/// related by the reflection symmetry.
pub fn nbody_query(n: usize, symmetric_pair: bool) -> Result<LevelPassQuery, MechanicsError> {
    if n < 2 {
        return Err(MechanicsError::TooFewBodies(n));
    }
    let m = 4 * n - 6;
    let index = 2 * n - 4;
    let count = if symmetric_pair { 2 } else { 1 };
    Ok(LevelPassQuery::new(
        m,
        vec![CriticalPointRecord::new(0.0, index).with_count(count)],
    ))
}
