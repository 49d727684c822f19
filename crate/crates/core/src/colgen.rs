//! Decision procedures on integer lattices and module maps.
//!
//! The central question, in its one-dimensional form: given finitely many
//! vectors `X ⊂ Z^N` and an offset `b`, does the affine lattice
//! `span_Z(X) + b` contain a point whose entries generate `Z` (gcd 1)?
//! [`decide_unimodular_point_1d`] settles it exactly by reducing `X` to
//! Smith form and walking a case analysis on the transformed offset; every
//! "yes" carries a concrete point as a witness.
//!
//! [`decide_epi_extension_free`] answers the module-level variant: does an
//! epimorphism onto `Z^d` exist that extends along an inclusion of finitely
//! presented modules? [`brute_force_unimodular_oracle`] is a deliberately
//! naive boxed search kept around as an independent cross-check.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    max_free_quotient_with_section, smith_normal_form, solve_linear, vec_from_strings,
    vec_to_strings, IntMatrix, ModulePresentation,
};
use crate::par;

/// Gcd of a slice of integers (0 for the empty slice), always nonnegative.
pub fn entries_gcd(entries: &[BigInt]) -> BigInt {
    entries
        .iter()
        .fold(BigInt::zero(), |acc, e| acc.gcd(e))
}

/// An instance of the lattice-point question: `span_Z(vectors) + offset`
/// inside `Z^ambient`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CgInstanceJson", into = "CgInstanceJson")]
pub struct CgInstance {
    ambient: usize,
    vectors: Vec<Vec<BigInt>>,
    offset: Vec<BigInt>,
}

#[derive(Serialize, Deserialize)]
struct CgInstanceJson {
    ambient: usize,
    vectors: Vec<Vec<String>>,
    offset: Vec<String>,
}

impl TryFrom<CgInstanceJson> for CgInstance {
    type Error = String;

    fn try_from(j: CgInstanceJson) -> Result<Self, String> {
        let vectors = j
            .vectors
            .iter()
            .map(|v| vec_from_strings(v))
            .collect::<Result<Vec<_>, _>>()?;
        let offset = vec_from_strings(&j.offset)?;
        CgInstance::new(j.ambient, vectors, offset)
    }
}

impl From<CgInstance> for CgInstanceJson {
    fn from(inst: CgInstance) -> Self {
        CgInstanceJson {
            ambient: inst.ambient,
            vectors: inst.vectors.iter().map(|v| vec_to_strings(v)).collect(),
            offset: vec_to_strings(&inst.offset),
        }
    }
}

impl CgInstance {
    pub fn new(
        ambient: usize,
        vectors: Vec<Vec<BigInt>>,
        offset: Vec<BigInt>,
    ) -> Result<Self, String> {
        if offset.len() != ambient {
            return Err(format!(
                "offset has {} entries, ambient dimension is {ambient}",
                offset.len()
            ));
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != ambient {
                return Err(format!(
                    "vector {i} has {} entries, ambient dimension is {ambient}",
                    v.len()
                ));
            }
        }
        Ok(CgInstance {
            ambient,
            vectors,
            offset,
        })
    }

    pub fn from_i64(ambient: usize, vectors: &[&[i64]], offset: &[i64]) -> Self {
        CgInstance::new(
            ambient,
            vectors
                .iter()
                .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
            offset.iter().map(|&x| BigInt::from(x)).collect(),
        )
        .unwrap()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn vectors(&self) -> &[Vec<BigInt>] {
        &self.vectors
    }

    pub fn offset(&self) -> &[BigInt] {
        &self.offset
    }

    /// Matrix whose columns are the spanning vectors.
    fn span_matrix(&self) -> IntMatrix {
        IntMatrix::from_columns(self.ambient, &self.vectors)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnimodularAnswer {
    Yes { witness: Vec<BigInt> },
    No,
}

impl UnimodularAnswer {
    pub fn is_yes(&self) -> bool {
        matches!(self, UnimodularAnswer::Yes { .. })
    }
}

/// Does `span_Z(X) + b` contain a point with entry gcd 1?
///
/// Reduce the span matrix to Smith form `U·A·V = diag(α₁ | α₂ | …)`; the
/// entry gcd of a vector is unchanged under the unimodular `U`, so the
/// question transfers to the diagonal instance with offset `b' = U·b`,
/// where each coordinate `i ≤ k` can be shifted by multiples of `αᵢ` and
/// the rest are frozen. The case analysis below finds a point or proves a
/// common divisor; witnesses are pulled back through `U⁻¹` and their gcd
/// is re-verified before returning.
pub fn decide_unimodular_point_1d(inst: &CgInstance) -> UnimodularAnswer {
    let a = inst.span_matrix();
    let snf = smith_normal_form(&a);
    let bp = snf.u.mul_vec(inst.offset());
    let alphas = &snf.invariant_factors;

    let transformed = decide_diagonal(alphas, &bp);
    match transformed {
        None => UnimodularAnswer::No,
        Some(vp) => {
            let witness = snf.u_inv.mul_vec(&vp);
            assert!(
                entries_gcd(&witness).is_one(),
                "witness gcd must be 1 by construction"
            );
            debug_assert!(
                {
                    let shifted: Vec<BigInt> = witness
                        .iter()
                        .zip(inst.offset())
                        .map(|(w, b)| w - b)
                        .collect();
                    !solve_linear(&a, &shifted).is_empty()
                },
                "witness must lie on the affine lattice"
            );
            UnimodularAnswer::Yes { witness }
        }
    }
}

/// Case analysis for the diagonalized instance; returns a point of the
/// transformed lattice with entry gcd 1, or `None` when every lattice
/// point has a common divisor.
fn decide_diagonal(alphas: &[BigInt], bp: &[BigInt]) -> Option<Vec<BigInt>> {
    let n = bp.len();
    let c = entries_gcd(bp);
    if c.is_one() {
        // The offset itself already works.
        return Some(bp.to_vec());
    }
    let alpha1 = alphas.first().cloned().unwrap_or_else(BigInt::zero);
    if c.is_zero() {
        // b' = 0: every reachable entry is a multiple of α₁, so the only
        // hope is α₁ = 1.
        if alpha1.is_one() {
            let mut v = vec![BigInt::zero(); n];
            v[0] = BigInt::one();
            return Some(v);
        }
        return None;
    }
    // c ≥ 2 from here. Anything reachable is divisible by gcd(α₁, c)
    // (α₁ divides every αᵢ), so that gcd must be 1 — this also rules out
    // α₁ = 0.
    if !alpha1.gcd(&c).is_one() {
        return None;
    }
    let rest: Vec<BigInt> = bp[1..].iter().filter(|e| !e.is_zero()).cloned().collect();
    if !rest.is_empty() {
        // Shift only the first coordinate until it is coprime to the
        // frozen nonzero tail; zero entries elsewhere cannot hurt the gcd.
        let x = gcd_shift_witness(&alpha1, &bp[0], &rest);
        let mut v = bp.to_vec();
        v[0] += &alpha1 * x;
        return Some(v);
    }
    // b' = (±c, 0, …, 0). If a second diagonal entry exists, plant it as
    // a tail coordinate and shift coordinate one to be coprime to it.
    if let Some(alpha2) = alphas.get(1).filter(|a| !a.is_zero()) {
        let x = gcd_shift_witness(&alpha1, &bp[0], std::slice::from_ref(alpha2));
        let mut v = vec![BigInt::zero(); n];
        v[0] = &bp[0] + &alpha1 * x;
        v[1] = alpha2.clone();
        return Some(v);
    }
    // Only the first coordinate is live: a gcd-1 point means driving it to
    // ±1, which needs b'₁ ≡ ±1 (mod α₁).
    for target in [BigInt::one(), -BigInt::one()] {
        if (&target - &bp[0]).mod_floor(&alpha1).is_zero() {
            let mut v = vec![BigInt::zero(); n];
            v[0] = target;
            return Some(v);
        }
    }
    None
}

/// Smallest `x` in the order `0, 1, −1, 2, −2, …` with
/// `gcd(α₁·x + b₁, rest…) = 1`.
///
/// Such an `x` exists whenever `gcd(α₁, b₁, rest…) = 1` and some entry of
/// `rest` is nonzero; both preconditions are enforced.
pub fn gcd_shift_witness(alpha1: &BigInt, b1: &BigInt, rest: &[BigInt]) -> BigInt {
    let whole = rest
        .iter()
        .fold(alpha1.gcd(b1), |acc, e| acc.gcd(e));
    assert!(
        whole.is_one(),
        "gcd_shift_witness needs overall gcd 1, got {whole}"
    );
    assert!(
        rest.iter().any(|e| !e.is_zero()),
        "gcd_shift_witness needs a nonzero tail entry"
    );
    for x in expanding_search() {
        let candidate = alpha1 * &x + b1;
        let g = rest.iter().fold(candidate.abs(), |acc, e| acc.gcd(e));
        if g.is_one() {
            return x;
        }
    }
    unreachable!("the search is infinite")
}

/// `0, 1, −1, 2, −2, …`
fn expanding_search() -> impl Iterator<Item = BigInt> {
    std::iter::once(BigInt::zero()).chain((1u64..).flat_map(|k| {
        [BigInt::from(k), -BigInt::from(k)]
    }))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtensionError {
    #[error(
        "inclusion matrix does not induce a module map: column {column} of κ·relations falls outside the target relation lattice"
    )]
    IllDefinedInclusion { column: usize },
    #[error("inclusion matrix is {rows}×{cols}, expected {expected_rows}×{expected_cols}")]
    Shape {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtensionAnswer {
    /// `psi` is the epimorphism on the source module, `psi_tilde` its
    /// extension over the inclusion (as matrices on ambient coordinates,
    /// with `psi = psi_tilde · κ` exactly).
    Yes { psi: IntMatrix, psi_tilde: IntMatrix },
    No,
}

/// Does some epimorphism `M(A₁) → Z^d` extend to `M(A₂)` along `κ`?
///
/// Both modules are replaced by their maximal free quotients (any map to
/// `Z^d` kills torsion), `κ` descends to a matrix between them, and the
/// Smith form of that matrix answers the question: an extendable
/// epimorphism exists iff at least `d` invariant factors equal 1. On yes,
/// the first `d` rows of the left transform give the extension.
pub fn decide_epi_extension_free(
    a1: &ModulePresentation,
    a2: &ModulePresentation,
    kappa: &IntMatrix,
    d: usize,
) -> Result<ExtensionAnswer, ExtensionError> {
    let (n1, n2) = (a1.ambient_rank, a2.ambient_rank);
    if kappa.rows() != n2 || kappa.cols() != n1 {
        return Err(ExtensionError::Shape {
            rows: kappa.rows(),
            cols: kappa.cols(),
            expected_rows: n2,
            expected_cols: n1,
        });
    }
    // κ must send relations of the source into the relation lattice of the
    // target, otherwise it does not define a map of modules.
    let pushed = kappa.mul(&a1.relation_matrix);
    for j in 0..pushed.cols() {
        let col = pushed.column(j);
        if solve_linear(&a2.relation_matrix, &col).is_empty() {
            return Err(ExtensionError::IllDefinedInclusion { column: j });
        }
    }

    let (_, _, s1) = max_free_quotient_with_section(a1);
    let (r2, p2, _) = max_free_quotient_with_section(a2);
    let reduced = p2.mul(kappa).mul(&s1);
    let snf = smith_normal_form(&reduced);
    let units = snf
        .invariant_factors
        .iter()
        .filter(|f| f.is_one())
        .count();
    if units < d {
        return Ok(ExtensionAnswer::No);
    }
    // Top d rows of U: on the image submodule the composite acts as
    // diag(α₁…α_d)∘(unimodular), and α₁ = … = α_d = 1, so it is onto Z^d.
    let rows: Vec<Vec<BigInt>> = (0..d)
        .map(|i| (0..r2).map(|j| snf.u[(i, j)].clone()).collect())
        .collect();
    let top = IntMatrix::from_rows(d, r2, rows);
    let psi_tilde = top.mul(&p2);
    let psi = psi_tilde.mul(kappa);
    Ok(ExtensionAnswer::Yes { psi, psi_tilde })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleAnswer {
    Yes { witness: Vec<BigInt> },
    Unknown,
}

impl OracleAnswer {
    pub fn is_yes(&self) -> bool {
        matches!(self, OracleAnswer::Yes { .. })
    }
}

/// Exhaustive boxed search for a gcd-1 point: coefficients range over
/// `[−box, box]` in the order `0, 1, −1, …` per coordinate. Entirely
/// independent of the Smith-form machinery — this is the cross-check
/// oracle. Parallelizes over the first coefficient when the `parallel`
/// feature is on; the reported witness is the same either way.
pub fn brute_force_unimodular_oracle(inst: &CgInstance, box_radius: u32) -> OracleAnswer {
    oracle_dispatch(inst, box_radius, true)
}

/// Sequential twin of [`brute_force_unimodular_oracle`] for benchmarks.
pub fn brute_force_unimodular_oracle_seq(inst: &CgInstance, box_radius: u32) -> OracleAnswer {
    oracle_dispatch(inst, box_radius, false)
}

fn oracle_dispatch(inst: &CgInstance, box_radius: u32, parallel: bool) -> OracleAnswer {
    // Fast integer path when everything fits; arbitrary precision kept as
    // the fallback so the oracle stays total.
    let fits = |v: &BigInt| num_traits::ToPrimitive::to_i128(v).is_some();
    let answer = if inst.offset.iter().all(fits)
        && inst.vectors.iter().all(|v| v.iter().all(fits))
    {
        use num_traits::ToPrimitive;
        let vectors: Vec<Vec<i128>> = inst
            .vectors
            .iter()
            .map(|v| v.iter().map(|e| e.to_i128().unwrap()).collect())
            .collect();
        let offset: Vec<i128> = inst.offset.iter().map(|e| e.to_i128().unwrap()).collect();
        oracle_search(&vectors, &offset, box_radius, parallel)
            .map(|w| w.into_iter().map(BigInt::from).collect())
    } else {
        oracle_search(&inst.vectors, &inst.offset, box_radius, parallel)
    };
    match answer {
        Some(witness) => OracleAnswer::Yes { witness },
        None => OracleAnswer::Unknown,
    }
}

trait OracleInt: Integer + Clone + Send + Sync {
    fn from_i64(x: i64) -> Self;
}

impl OracleInt for i128 {
    fn from_i64(x: i64) -> Self {
        x as i128
    }
}

impl OracleInt for BigInt {
    fn from_i64(x: i64) -> Self {
        BigInt::from(x)
    }
}

fn oracle_search<T: OracleInt + 'static>(
    vectors: &[Vec<T>],
    offset: &[T],
    box_radius: u32,
    parallel: bool,
) -> Option<Vec<T>> {
    let order: Vec<i64> = {
        let mut o = vec![0i64];
        for k in 1..=i64::from(box_radius) {
            o.push(k);
            o.push(-k);
        }
        o
    };
    fn gcd_is_one<T: OracleInt>(v: &[T]) -> bool {
        let mut acc = T::zero();
        for e in v {
            acc = acc.gcd(e);
            if acc == T::one() {
                return true;
            }
        }
        acc == T::one()
    }
    fn descend<T: OracleInt>(
        vectors: &[Vec<T>],
        order: &[i64],
        level: usize,
        acc: &[T],
    ) -> Option<Vec<T>> {
        if level == vectors.len() {
            return gcd_is_one(acc).then(|| acc.to_vec());
        }
        for &x in order {
            let shifted: Vec<T> = acc
                .iter()
                .zip(&vectors[level])
                .map(|(a, v)| a.clone() + T::from_i64(x) * v.clone())
                .collect();
            if let Some(w) = descend(vectors, order, level + 1, &shifted) {
                return Some(w);
            }
        }
        None
    }
    if vectors.is_empty() {
        return gcd_is_one(offset).then(|| offset.to_vec());
    }
    if !parallel {
        return descend(vectors, &order, 0, offset);
    }
    let first = vectors[0].clone();
    let tail: Vec<Vec<T>> = vectors[1..].to_vec();
    let offset = offset.to_vec();
    let order_clone = order.clone();
    par::find_map_first(order.clone(), move |x| {
        let shifted: Vec<T> = offset
            .iter()
            .zip(&first)
            .map(|(a, v)| a.clone() + T::from_i64(x) * v.clone())
            .collect();
        descend(&tail, &order_clone, 0, &shifted)
    })
}
