//! Affine sublattices of `Z^N` and exact linear-system solving.
//!
//! An [`AffineLattice`] is either empty or a coset `span_Z(X) + b`. Cosets
//! are kept in a canonical form — the basis is the Hermite echelon basis of
//! the span and the offset is reduced against it — so structural equality
//! coincides with equality as point sets.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::IntMatrix;
use super::snf::smith_normal_form;

/// Canonical Hermite echelon basis for the row span of `rows`.
///
/// Returned rows have strictly increasing pivot columns, positive pivots,
/// and every entry above a pivot lies in `[0, pivot)`. The result depends
/// only on the span, not on the generating set handed in.
pub(crate) fn hermite_row_basis(width: usize, rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let mut work: Vec<Vec<BigInt>> = rows
        .into_iter()
        .inspect(|r| assert_eq!(r.len(), width, "row width mismatch"))
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    let mut basis: Vec<Vec<BigInt>> = Vec::new();
    for col in 0..width {
        // Run the gcd of all leading entries in this column into one row.
        loop {
            let mut min_idx: Option<usize> = None;
            for (idx, r) in work.iter().enumerate() {
                if r[col].is_zero() {
                    continue;
                }
                match min_idx {
                    None => min_idx = Some(idx),
                    Some(m) => {
                        if r[col].abs() < work[m][col].abs() {
                            min_idx = Some(idx);
                        }
                    }
                }
            }
            let Some(p) = min_idx else { break };
            let pivot_row = work.swap_remove(p);
            let mut all_cleared = true;
            for r in work.iter_mut() {
                if r[col].is_zero() {
                    continue;
                }
                let q = div_round(&r[col], &pivot_row[col]);
                for (a, b) in r.iter_mut().zip(&pivot_row) {
                    *a -= &q * b;
                }
                if !r[col].is_zero() {
                    all_cleared = false;
                }
            }
            let pivot_is_final = all_cleared;
            work.push(pivot_row);
            if pivot_is_final {
                let mut pr = work.pop().unwrap();
                if pr[col].is_negative() {
                    for x in pr.iter_mut() {
                        *x = -std::mem::take(x);
                    }
                }
                basis.push(pr);
                work.retain(|r| r.iter().any(|x| !x.is_zero()));
                break;
            }
            // Otherwise loop: the remainders are smaller, keep reducing.
        }
    }
    // Reduce entries above each pivot into [0, pivot).
    for j in 0..basis.len() {
        let cj = basis[j].iter().position(|x| !x.is_zero()).unwrap();
        let p = basis[j][cj].clone();
        for i in 0..j {
            let q = basis[i][cj].div_floor(&p);
            if q.is_zero() {
                continue;
            }
            let row_j = basis[j].clone();
            for (a, b) in basis[i].iter_mut().zip(&row_j) {
                *a -= &q * b;
            }
        }
    }
    basis
}

fn div_round(a: &BigInt, p: &BigInt) -> BigInt {
    let pa = p.abs();
    let (mut q, r) = a.div_mod_floor(&pa);
    if BigInt::from(2) * &r > pa {
        q += 1;
    }
    if p.is_negative() {
        -q
    } else {
        q
    }
}

/// A coset `span_Z(basis) + offset` in `Z^N`, or `Empty`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AffineLattice {
    Empty {
        ambient_dim: usize,
    },
    Coset {
        ambient_dim: usize,
        /// Hermite echelon basis of the span; each inner vector is one basis
        /// vector, and the list may be empty (a single point).
        basis: Vec<Vec<BigInt>>,
        /// Offset reduced against the basis.
        offset: Vec<BigInt>,
    },
}

impl AffineLattice {
    pub fn empty(ambient_dim: usize) -> Self {
        AffineLattice::Empty { ambient_dim }
    }

    /// The single point `b`.
    pub fn point(b: Vec<BigInt>) -> Self {
        AffineLattice::coset(b.len(), vec![], b)
    }

    /// All of `Z^n`.
    pub fn full(n: usize) -> Self {
        let gens = (0..n)
            .map(|i| {
                let mut v = vec![BigInt::zero(); n];
                v[i] = BigInt::from(1);
                v
            })
            .collect();
        AffineLattice::coset(n, gens, vec![BigInt::zero(); n])
    }

    /// Canonicalize `span(gens) + offset`.
    pub fn coset(ambient_dim: usize, gens: Vec<Vec<BigInt>>, offset: Vec<BigInt>) -> Self {
        assert_eq!(offset.len(), ambient_dim, "offset dimension mismatch");
        let basis = hermite_row_basis(ambient_dim, gens);
        let offset = reduce_against(&basis, offset);
        AffineLattice::Coset {
            ambient_dim,
            basis,
            offset,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            AffineLattice::Empty { ambient_dim } | AffineLattice::Coset { ambient_dim, .. } => {
                *ambient_dim
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, AffineLattice::Empty { .. })
    }

    /// Rank of the translation lattice (`None` when empty).
    pub fn rank(&self) -> Option<usize> {
        match self {
            AffineLattice::Empty { .. } => None,
            AffineLattice::Coset { basis, .. } => Some(basis.len()),
        }
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        match self {
            AffineLattice::Empty { .. } => &[],
            AffineLattice::Coset { basis, .. } => basis,
        }
    }

    pub fn offset(&self) -> Option<&[BigInt]> {
        match self {
            AffineLattice::Empty { .. } => None,
            AffineLattice::Coset { offset, .. } => Some(offset),
        }
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        match self {
            AffineLattice::Empty { .. } => false,
            AffineLattice::Coset {
                ambient_dim,
                basis,
                offset,
            } => {
                assert_eq!(x.len(), *ambient_dim, "point dimension mismatch");
                let mut v: Vec<BigInt> =
                    x.iter().zip(offset).map(|(a, b)| a - b).collect();
                for row in basis {
                    let c = row.iter().position(|e| !e.is_zero()).unwrap();
                    let (q, r) = v[c].div_mod_floor(&row[c]);
                    if !r.is_zero() {
                        return false;
                    }
                    for (a, b) in v.iter_mut().zip(row) {
                        *a -= &q * b;
                    }
                }
                v.iter().all(|e| e.is_zero())
            }
        }
    }

    /// Intersection of two cosets in the same ambient space.
    ///
    /// Solves `offset1 + B1·s = offset2 + B2·t` for `(s, t)` and pushes the
    /// solution set forward through `s ↦ offset1 + B1·s`.
    pub fn intersect(&self, other: &AffineLattice) -> AffineLattice {
        let n = self.ambient_dim();
        assert_eq!(n, other.ambient_dim(), "ambient dimension mismatch");
        let (AffineLattice::Coset { basis: b1, offset: o1, .. },
             AffineLattice::Coset { basis: b2, offset: o2, .. }) = (self, other)
        else {
            return AffineLattice::empty(n);
        };
        // Columns: first the s-coordinates, then the t-coordinates.
        let cols1: Vec<Vec<BigInt>> = b1.to_vec();
        let cols2: Vec<Vec<BigInt>> = b2.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        let mut columns = cols1;
        columns.extend(cols2);
        let m = IntMatrix::from_columns(n, &columns);
        let rhs: Vec<BigInt> = o2.iter().zip(o1).map(|(a, b)| a - b).collect();
        let sol = solve_linear(&m, &rhs);
        // Map (s, t) ↦ offset1 + B1·s.
        let k1 = b1.len();
        let proj = |st: &[BigInt]| -> Vec<BigInt> {
            let mut out = o1.clone();
            for (i, coeff) in st.iter().take(k1).enumerate() {
                for (a, b) in out.iter_mut().zip(&b1[i]) {
                    *a += coeff * b;
                }
            }
            out
        };
        match sol {
            AffineLattice::Empty { .. } => AffineLattice::empty(n),
            AffineLattice::Coset { basis, offset, .. } => {
                let new_offset = proj(&offset);
                let new_gens: Vec<Vec<BigInt>> = basis
                    .iter()
                    .map(|v| {
                        // Homogeneous part: drop the offset contribution.
                        let img = proj(v);
                        img.iter().zip(o1).map(|(a, b)| a - b).collect()
                    })
                    .collect();
                let result = AffineLattice::coset(n, new_gens, new_offset);
                debug_assert!(result
                    .offset()
                    .map_or(true, |o| self.contains(o) && other.contains(o)));
                result
            }
        }
    }

    /// Image of `self` under the affine map `x ↦ M·x + c`.
    pub fn affine_image(&self, m: &IntMatrix, c: &[BigInt]) -> AffineLattice {
        assert_eq!(m.cols(), self.ambient_dim(), "map domain mismatch");
        assert_eq!(m.rows(), c.len(), "map codomain mismatch");
        match self {
            AffineLattice::Empty { .. } => AffineLattice::empty(m.rows()),
            AffineLattice::Coset { basis, offset, .. } => {
                let mut new_offset = m.mul_vec(offset);
                for (a, b) in new_offset.iter_mut().zip(c) {
                    *a += b;
                }
                let gens: Vec<Vec<BigInt>> = basis.iter().map(|v| m.mul_vec(v)).collect();
                AffineLattice::coset(m.rows(), gens, new_offset)
            }
        }
    }
}

fn reduce_against(basis: &[Vec<BigInt>], mut v: Vec<BigInt>) -> Vec<BigInt> {
    for row in basis {
        let c = row.iter().position(|e| !e.is_zero()).unwrap();
        let q = v[c].div_floor(&row[c]);
        if q.is_zero() {
            continue;
        }
        for (a, b) in v.iter_mut().zip(row) {
            *a -= &q * b;
        }
    }
    v
}

/// Solution set `{x : A·x = b}` as an affine lattice in `Z^cols`.
///
/// Via `U·A·V = D` the system becomes `D·y = U·b` with `x = V·y`, which is
/// solvable coordinate by coordinate.
pub fn solve_linear(a: &IntMatrix, b: &[BigInt]) -> AffineLattice {
    assert_eq!(a.rows(), b.len(), "right-hand side dimension mismatch");
    let m = a.cols();
    let snf = smith_normal_form(a);
    let c = snf.u.mul_vec(b);
    let k = snf.invariant_factors.len();
    let mut y = vec![BigInt::zero(); m];
    for i in 0..a.rows() {
        if i < k && !snf.invariant_factors[i].is_zero() {
            let d = &snf.invariant_factors[i];
            let (q, r) = c[i].div_mod_floor(d);
            if !r.is_zero() {
                return AffineLattice::empty(m);
            }
            y[i] = q;
        } else if !c[i].is_zero() {
            // Zero row of D with nonzero right-hand side.
            return AffineLattice::empty(m);
        }
    }
    let free: Vec<usize> = (0..m)
        .filter(|&j| j >= k || snf.invariant_factors[j].is_zero())
        .collect();
    let offset = snf.v.mul_vec(&y);
    let gens: Vec<Vec<BigInt>> = free.iter().map(|&j| snf.v.column(j)).collect();
    let result = AffineLattice::coset(m, gens, offset);
    // Substitution check: offset and offset+basis vectors satisfy the system.
    if let AffineLattice::Coset { basis, offset, .. } = &result {
        assert_eq!(a.mul_vec(offset), b, "solver produced a non-solution");
        for v in basis {
            let shifted: Vec<BigInt> = offset.iter().zip(v).map(|(o, d)| o + d).collect();
            assert_eq!(a.mul_vec(&shifted), b, "basis vector leaves the solution set");
        }
    }
    result
}
