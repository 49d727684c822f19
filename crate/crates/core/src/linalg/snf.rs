//! Smith normal form over `Z`.
//!
//! For an integer matrix `A` this computes unimodular `U`, `V` with
//! `U * A * V = D` diagonal, the diagonal nonnegative and forming a
//! divisibility chain `d1 | d2 | ...` with zeros trailing. The inverses of
//! `U` and `V` are tracked alongside, because callers routinely need to pull
//! basis vectors back through the coordinate change.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

/// Result of [`smith_normal_form`]: `u * a * v = d`.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
    /// Diagonal of `d`, length `min(rows, cols)`; nonnegative, each entry
    /// divides the next, zeros at the end.
    pub invariant_factors: Vec<BigInt>,
}

impl SmithDecomposition {
    /// Number of nonzero invariant factors.
    pub fn rank(&self) -> usize {
        self.invariant_factors
            .iter()
            .filter(|x| !x.is_zero())
            .count()
    }

    /// Invariant factors with trailing zeros removed.
    pub fn nonzero_invariant_factors(&self) -> Vec<BigInt> {
        self.invariant_factors
            .iter()
            .filter(|x| !x.is_zero())
            .cloned()
            .collect()
    }

    /// Full consistency check against the original matrix.
    pub fn verify(&self, a: &IntMatrix) -> bool {
        if self.u.mul(a).mul(&self.v) != self.d {
            return false;
        }
        if !self.u.mul(&self.u_inv).is_identity() || !self.v.mul(&self.v_inv).is_identity() {
            return false;
        }
        if !self.u.determinant().abs().is_one() || !self.v.determinant().abs().is_one() {
            return false;
        }
        let n = self.invariant_factors.len();
        for i in 0..n {
            let f = &self.invariant_factors[i];
            if f.is_negative() || self.d[(i, i)] != *f {
                return false;
            }
            if i + 1 < n {
                let g = &self.invariant_factors[i + 1];
                if f.is_zero() {
                    if !g.is_zero() {
                        return false;
                    }
                } else if !(g % f).is_zero() {
                    return false;
                }
            }
        }
        // Off-diagonal entries of d must vanish.
        for i in 0..self.d.rows() {
            for j in 0..self.d.cols() {
                if i != j && !self.d[(i, j)].is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

/// Elementary-operation bookkeeping: every operation applied to `d` is
/// mirrored on `u`/`v` and inverted on `u_inv`/`v_inv`, so `u*a*v = d`,
/// `u*u_inv = 1`, `v*v_inv = 1` hold at every step.
struct Worker {
    d: IntMatrix,
    u: IntMatrix,
    v: IntMatrix,
    u_inv: IntMatrix,
    v_inv: IntMatrix,
}

impl Worker {
    fn new(a: &IntMatrix) -> Self {
        Worker {
            d: a.clone(),
            u: IntMatrix::identity(a.rows()),
            v: IntMatrix::identity(a.cols()),
            u_inv: IntMatrix::identity(a.rows()),
            v_inv: IntMatrix::identity(a.cols()),
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.d.cols() {
            let t = self.d[(i, c)].clone();
            self.d[(i, c)] = self.d[(j, c)].clone();
            self.d[(j, c)] = t;
        }
        for c in 0..self.u.cols() {
            let t = self.u[(i, c)].clone();
            self.u[(i, c)] = self.u[(j, c)].clone();
            self.u[(j, c)] = t;
        }
        for r in 0..self.u_inv.rows() {
            let t = self.u_inv[(r, i)].clone();
            self.u_inv[(r, i)] = self.u_inv[(r, j)].clone();
            self.u_inv[(r, j)] = t;
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.d.rows() {
            let t = self.d[(r, i)].clone();
            self.d[(r, i)] = self.d[(r, j)].clone();
            self.d[(r, j)] = t;
        }
        for r in 0..self.v.rows() {
            let t = self.v[(r, i)].clone();
            self.v[(r, i)] = self.v[(r, j)].clone();
            self.v[(r, j)] = t;
        }
        for c in 0..self.v_inv.cols() {
            let t = self.v_inv[(i, c)].clone();
            self.v_inv[(i, c)] = self.v_inv[(j, c)].clone();
            self.v_inv[(j, c)] = t;
        }
    }

    /// row i += c * row j
    fn add_row(&mut self, i: usize, j: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for k in 0..self.d.cols() {
            let t = c * &self.d[(j, k)];
            self.d[(i, k)] += t;
        }
        for k in 0..self.u.cols() {
            let t = c * &self.u[(j, k)];
            self.u[(i, k)] += t;
        }
        for r in 0..self.u_inv.rows() {
            let t = c * &self.u_inv[(r, i)];
            self.u_inv[(r, j)] -= t;
        }
    }

    /// col i += c * col j
    fn add_col(&mut self, i: usize, j: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for k in 0..self.d.rows() {
            let t = c * &self.d[(k, j)];
            self.d[(k, i)] += t;
        }
        for r in 0..self.v.rows() {
            let t = c * &self.v[(r, j)];
            self.v[(r, i)] += t;
        }
        for k in 0..self.v_inv.cols() {
            let t = c * &self.v_inv[(i, k)];
            self.v_inv[(j, k)] -= t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for k in 0..self.d.cols() {
            self.d[(i, k)] = -std::mem::take(&mut self.d[(i, k)]);
        }
        for k in 0..self.u.cols() {
            self.u[(i, k)] = -std::mem::take(&mut self.u[(i, k)]);
        }
        for r in 0..self.u_inv.rows() {
            self.u_inv[(r, i)] = -std::mem::take(&mut self.u_inv[(r, i)]);
        }
    }

    /// Smallest-magnitude nonzero entry of the trailing submatrix starting at
    /// `(k, k)`; ties broken by lowest row, then lowest column.
    fn select_pivot(&self, k: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        let mut best_abs = BigInt::zero();
        for i in k..self.d.rows() {
            for j in k..self.d.cols() {
                let e = &self.d[(i, j)];
                if e.is_zero() {
                    continue;
                }
                let a = e.abs();
                if best.is_none() || a < best_abs {
                    best = Some((i, j));
                    best_abs = a;
                }
            }
        }
        best
    }

    /// Clear row k and column k (except the pivot), re-selecting the pivot
    /// whenever a division leaves a smaller remainder behind.
    fn eliminate(&mut self, k: usize) -> bool {
        let Some((pi, pj)) = self.select_pivot(k) else {
            return false; // trailing submatrix is zero
        };
        self.swap_rows(k, pi);
        self.swap_cols(k, pj);
        loop {
            let mut clean = true;
            for i in k + 1..self.d.rows() {
                if self.d[(i, k)].is_zero() {
                    continue;
                }
                let q = nearest_quotient(&self.d[(i, k)], &self.d[(k, k)]);
                self.add_row(i, k, &-q);
                if !self.d[(i, k)].is_zero() {
                    // Remainder is strictly smaller than the pivot: promote it.
                    self.swap_rows(k, i);
                    clean = false;
                    break;
                }
            }
            if !clean {
                continue;
            }
            for j in k + 1..self.d.cols() {
                if self.d[(k, j)].is_zero() {
                    continue;
                }
                let q = nearest_quotient(&self.d[(k, j)], &self.d[(k, k)]);
                self.add_col(j, k, &-q);
                if !self.d[(k, j)].is_zero() {
                    self.swap_cols(k, j);
                    clean = false;
                    break;
                }
            }
            if clean {
                return true;
            }
        }
    }

    /// Replace diagonal entries `(a, b)` at `(i, i)`, `(i+1, i+1)` by
    /// `(gcd(a, b), ±lcm(a, b))`, also moving a zero at `i` past a nonzero
    /// at `i+1`. Only rows/columns `i`, `i+1` are touched.
    fn fix_pair(&mut self, i: usize) {
        let one = BigInt::one();
        self.add_row(i, i + 1, &one); // row i becomes (a, b)
        loop {
            if self.d[(i, i + 1)].is_zero() {
                break;
            }
            if self.d[(i, i)].is_zero() {
                self.swap_cols(i, i + 1);
                continue;
            }
            let q = nearest_quotient(&self.d[(i, i + 1)], &self.d[(i, i)]);
            self.add_col(i + 1, i, &-q);
            if !self.d[(i, i + 1)].is_zero() {
                self.swap_cols(i, i + 1);
            }
        }
        // (i+1, i) stayed in the ideal generated by the old b, so the new
        // pivot g = gcd(a, b) divides it exactly.
        let u = self.d[(i + 1, i)].clone();
        if !u.is_zero() {
            let g = self.d[(i, i)].clone();
            let q = &u / &g;
            self.add_row(i + 1, i, &-q);
        }
    }
}

/// Quotient `q` minimizing `|a - q*p|` (so the remainder is at most `|p|/2`).
fn nearest_quotient(a: &BigInt, p: &BigInt) -> BigInt {
    assert!(!p.is_zero());
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

/// Compute the Smith normal form of `a`.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let mut w = Worker::new(a);
    let n = a.rows().min(a.cols());
    for k in 0..n {
        if !w.eliminate(k) {
            break;
        }
    }
    // Enforce the divisibility chain (and push zeros to the end).
    loop {
        let mut changed = false;
        for i in 0..n.saturating_sub(1) {
            let a_i = w.d[(i, i)].clone();
            let b_i = w.d[(i + 1, i + 1)].clone();
            let violates = if a_i.is_zero() {
                !b_i.is_zero()
            } else {
                !(&b_i % &a_i).is_zero()
            };
            if violates {
                w.fix_pair(i);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    for i in 0..n {
        if w.d[(i, i)].is_negative() {
            w.negate_row(i);
        }
    }
    let invariant_factors = (0..n).map(|i| w.d[(i, i)].clone()).collect();
    let result = SmithDecomposition {
        u: w.u,
        d: w.d,
        v: w.v,
        u_inv: w.u_inv,
        v_inv: w.v_inv,
        invariant_factors,
    };
    debug_assert!(result.verify(a), "inconsistent Smith decomposition");
    result
}
