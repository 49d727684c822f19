//! Exact integer linear algebra: matrices, Smith normal form, affine
//! lattices, and finitely presented `Z`-modules.

mod lattice;
mod matrix;
mod snf;

pub use lattice::{solve_linear, AffineLattice};
pub use matrix::{vec_from_strings, vec_to_strings, IntMatrix};
pub use snf::{smith_normal_form, SmithDecomposition};

use num_bigint::BigInt;
use num_traits::Zero;

/// The module `M(A) = Z^n / A·Z^m`, given by its relation matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModulePresentation {
    /// Ambient rank `n` (number of module generators).
    pub ambient_rank: usize,
    /// `n×m` matrix whose columns are the relations.
    pub relation_matrix: IntMatrix,
}

impl ModulePresentation {
    pub fn new(relation_matrix: IntMatrix) -> Self {
        ModulePresentation {
            ambient_rank: relation_matrix.rows(),
            relation_matrix,
        }
    }
}

/// Maximal free quotient of `M(A)`.
///
/// Returns the free rank together with a `rank×n` projection matrix `P`
/// realizing `Z^n → Z^rank`: `P` kills every relation, and descends to the
/// quotient of `M(A)` by its torsion submodule.
pub fn max_free_quotient(p: &ModulePresentation) -> (usize, IntMatrix) {
    let n = p.ambient_rank;
    let snf = smith_normal_form(&p.relation_matrix);
    // Invariant factors padded to the ambient rank: generators beyond the
    // diagonal carry no relation at all.
    let free_indices: Vec<usize> = (0..n)
        .filter(|&i| {
            snf.invariant_factors
                .get(i)
                .map_or(true, |f| f.is_zero())
        })
        .collect();
    let rank = free_indices.len();
    let mut proj = IntMatrix::zero(rank, n);
    for (r, &i) in free_indices.iter().enumerate() {
        for j in 0..n {
            proj[(r, j)] = snf.u[(i, j)].clone();
        }
    }
    debug_assert!(proj.mul(&p.relation_matrix).is_zero());
    (rank, proj)
}

/// A section of the projection from [`max_free_quotient`]: a `n×rank` matrix
/// `S` with `P·S = I`. Columns are read off the inverse of the Smith `U`.
pub fn max_free_quotient_with_section(
    p: &ModulePresentation,
) -> (usize, IntMatrix, IntMatrix) {
    let n = p.ambient_rank;
    let snf = smith_normal_form(&p.relation_matrix);
    let free_indices: Vec<usize> = (0..n)
        .filter(|&i| {
            snf.invariant_factors
                .get(i)
                .map_or(true, |f| f.is_zero())
        })
        .collect();
    let rank = free_indices.len();
    let mut proj = IntMatrix::zero(rank, n);
    let mut section = IntMatrix::zero(n, rank);
    for (r, &i) in free_indices.iter().enumerate() {
        for j in 0..n {
            proj[(r, j)] = snf.u[(i, j)].clone();
            section[(j, r)] = snf.u_inv[(j, i)].clone();
        }
    }
    debug_assert!(proj.mul(&section).is_identity());
    (rank, proj, section)
}

/// Divisibility-ordered torsion coefficients of `M(A)`: the invariant
/// factors that are neither zero nor one.
pub fn torsion_coefficients(p: &ModulePresentation) -> Vec<BigInt> {
    use num_traits::One;
    smith_normal_form(&p.relation_matrix)
        .invariant_factors
        .into_iter()
        .filter(|f| !f.is_zero() && !f.is_one())
        .collect()
}
