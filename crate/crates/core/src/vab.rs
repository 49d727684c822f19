//! Free-abelian-by-finite extension data and the search that recovers it
//! from a presentation.
//!
//! [`VabData`] packages a finite group `F`, a rank `d`, a conjugation
//! action `C: F → GL_d(Z)`, and a normalized 2-cocycle `c: F×F → Z^d`.
//! Together these determine an extension group `E` with underlying set
//! `Z^d × F` and multiplication [`ext_multiply`]; `Z^d` sits inside `E` as
//! a normal subgroup with quotient `F`, and `σ(g) = (0, g)` is the
//! canonical (set-theoretic) section of the quotient map.
//!
//! Given a homomorphism `φ` from a presented group onto `F`, candidate
//! lifts into `E` that agree with `φ` on the `F`-coordinate are
//! parametrized by one `Z^d` vector per generator. The relator conditions
//! on such lifts are inhomogeneous *linear* equations, so the lift space
//! is an affine lattice ([`assemble_homlike_system`]); evaluating a lift
//! on any fixed word is an affine map of the parameters
//! ([`word_eval_affine`]), which is what [`restrict_to_kernel`] pushes a
//! lift lattice through.
//!
//! Going the other way, [`vab_structure`] searches a presented group for
//! this shape: it walks finite quotients in increasing order, checks that
//! the kernel of each epimorphism is free abelian (commutativity of the
//! Schreier generators is settled by the dovetailed [`word_problem`]),
//! and reads the action and cocycle off Reidemeister rewriting. The
//! search is resource-bounded and reports `not found` — never a
//! mathematical "no" — when its bounds run out.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::finite::{enumerate_epis, enumerate_homs, groups_of_order, FiniteGroup, FiniteHom};
use crate::linalg::{
    smith_normal_form, solve_linear, vec_from_strings, vec_to_strings, AffineLattice, IntMatrix,
};
use crate::rewriting::{kernel_presentation, rewrite_in_kernel};
use crate::words::{GenSym, Presentation, Word};

/// Extension data: a finite group acting on `Z^dim` together with a
/// normalized 2-cocycle.
///
/// The constructor checks shapes only; whether the data satisfies the
/// extension laws (unimodular action, action a homomorphism, cocycle
/// identity, normalization) is a separate question answered by
/// [`verify_vab`], so deliberately broken data can be represented and
/// tested.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "VabDataJson", into = "VabDataJson")]
pub struct VabData {
    group: FiniteGroup,
    dim: usize,
    action: Vec<IntMatrix>,
    cocycle: Vec<Vec<Vec<BigInt>>>,
}

impl VabData {
    /// Wraps the raw pieces, checking dimensions only.
    pub fn new(
        group: FiniteGroup,
        dim: usize,
        action: Vec<IntMatrix>,
        cocycle: Vec<Vec<Vec<BigInt>>>,
    ) -> Self {
        let n = group.order();
        assert_eq!(action.len(), n, "one action matrix per group element");
        for m in &action {
            assert_eq!(
                (m.rows(), m.cols()),
                (dim, dim),
                "action matrices must be {dim}x{dim}"
            );
        }
        assert_eq!(cocycle.len(), n, "cocycle table must be |F| x |F|");
        for row in &cocycle {
            assert_eq!(row.len(), n, "cocycle table must be |F| x |F|");
            for v in row {
                assert_eq!(v.len(), dim, "cocycle values live in Z^{dim}");
            }
        }
        VabData {
            group,
            dim,
            action,
            cocycle,
        }
    }

    /// Data of the direct product `Z^dim × group`: every element acts as
    /// the identity and the cocycle vanishes.
    pub fn direct(group: FiniteGroup, dim: usize) -> Self {
        let n = group.order();
        let action = vec![IntMatrix::identity(dim); n];
        let cocycle = vec![vec![vec![BigInt::zero(); dim]; n]; n];
        VabData::new(group, dim, action, cocycle)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    /// Rank of the translation subgroup.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Action matrix of the element with index `g`.
    pub fn action(&self, g: usize) -> &IntMatrix {
        &self.action[g]
    }

    /// Cocycle value attached to the pair `(g, h)`.
    pub fn cocycle(&self, g: usize, h: usize) -> &[BigInt] {
        &self.cocycle[g][h]
    }
}

#[derive(Serialize, Deserialize)]
struct VabDataJson {
    group: FiniteGroup,
    d: usize,
    action: Vec<IntMatrix>,
    cocycle: Vec<Vec<Vec<String>>>,
}

impl TryFrom<VabDataJson> for VabData {
    type Error = String;

    fn try_from(j: VabDataJson) -> Result<Self, String> {
        let n = j.group.order();
        if j.action.len() != n {
            return Err(format!(
                "expected {n} action matrices, found {}",
                j.action.len()
            ));
        }
        for m in &j.action {
            if m.rows() != j.d || m.cols() != j.d {
                return Err(format!(
                    "action matrices must be {d}x{d}, found {r}x{c}",
                    d = j.d,
                    r = m.rows(),
                    c = m.cols()
                ));
            }
        }
        if j.cocycle.len() != n || j.cocycle.iter().any(|row| row.len() != n) {
            return Err(format!("cocycle table must be {n}x{n}"));
        }
        let mut cocycle = Vec::with_capacity(n);
        for row in &j.cocycle {
            let mut out = Vec::with_capacity(n);
            for v in row {
                if v.len() != j.d {
                    return Err(format!("cocycle values must have {} entries", j.d));
                }
                out.push(vec_from_strings(v)?);
            }
            cocycle.push(out);
        }
        Ok(VabData::new(j.group, j.d, j.action, cocycle))
    }
}

impl From<VabData> for VabDataJson {
    fn from(l: VabData) -> Self {
        VabDataJson {
            group: l.group,
            d: l.dim,
            action: l.action,
            cocycle: l
                .cocycle
                .iter()
                .map(|row| row.iter().map(|v| vec_to_strings(v)).collect())
                .collect(),
        }
    }
}

/// Checks every extension law on the data: the action matrices are
/// unimodular, send the identity to the identity matrix, and multiply
/// like the group; the cocycle is normalized (`c[e|e] = 0`) and satisfies
/// the 2-cocycle identity on all `|F|³` triples.
pub fn verify_vab(l: &VabData) -> bool {
    let g = l.group();
    let n = g.order();
    let e = g.identity();
    if !l.action(e).is_identity() {
        return false;
    }
    if !(0..n).all(|x| l.action(x).is_unimodular()) {
        return false;
    }
    for x in 0..n {
        for y in 0..n {
            if l.action(x).mul(l.action(y)) != *l.action(g.mul(x, y)) {
                return false;
            }
        }
    }
    if !l.cocycle(e, e).iter().all(|c| c.is_zero()) {
        return false;
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                // C(x)·c[y|z] − c[xy|z] + c[x|yz] − c[x|y] = 0
                let mut lhs = l.action(x).mul_vec(l.cocycle(y, z));
                lhs = vec_sub(&lhs, l.cocycle(g.mul(x, y), z));
                lhs = vec_add(&lhs, l.cocycle(x, g.mul(y, z)));
                lhs = vec_sub(&lhs, l.cocycle(x, y));
                if !lhs.iter().all(|c| c.is_zero()) {
                    return false;
                }
            }
        }
    }
    true
}

/// An element `(v, g)` of the extension group described by a [`VabData`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtElement {
    /// Translation part in `Z^d`.
    pub vec: Vec<BigInt>,
    /// Index of the finite part in the group's element list.
    pub fin: usize,
}

/// The identity `(0, e)`.
pub fn ext_identity(l: &VabData) -> ExtElement {
    ExtElement {
        vec: vec![BigInt::zero(); l.dim()],
        fin: l.group().identity(),
    }
}

/// The canonical section `σ(g) = (0, g)` of the quotient map onto `F`.
pub fn ext_section(l: &VabData, g: usize) -> ExtElement {
    ExtElement {
        vec: vec![BigInt::zero(); l.dim()],
        fin: g,
    }
}

/// `(v, g)·(w, h) = (v + C(g)·w + c[g|h], gh)`.
pub fn ext_multiply(l: &VabData, x: &ExtElement, y: &ExtElement) -> ExtElement {
    let g = l.group();
    let mut vec = vec_add(&x.vec, &l.action(x.fin).mul_vec(&y.vec));
    vec = vec_add(&vec, l.cocycle(x.fin, y.fin));
    ExtElement {
        vec,
        fin: g.mul(x.fin, y.fin),
    }
}

/// `(v, g)⁻¹ = (−C(g⁻¹)·(v + c[g|g⁻¹]), g⁻¹)`.
pub fn ext_inverse(l: &VabData, x: &ExtElement) -> ExtElement {
    let g = l.group();
    let gi = g.inv(x.fin);
    let shifted = vec_add(&x.vec, l.cocycle(x.fin, gi));
    ExtElement {
        vec: vec_neg(&l.action(gi).mul_vec(&shifted)),
        fin: gi,
    }
}

/// Evaluates a word through per-generator images, folding [`ext_multiply`]
/// and [`ext_inverse`] over its letters.
pub fn ext_eval(
    l: &VabData,
    p: &Presentation,
    images: &[ExtElement],
    w: &Word,
) -> ExtElement {
    assert_eq!(
        images.len(),
        p.generators().len(),
        "one image per generator"
    );
    let mut acc = ext_identity(l);
    for letter in w.letters() {
        let i = p
            .index_of(&letter.sym)
            .expect("word uses a generator missing from the presentation");
        let factor = if letter.inverse {
            ext_inverse(l, &images[i])
        } else {
            images[i].clone()
        };
        acc = ext_multiply(l, &acc, &factor);
    }
    acc
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VabError {
    /// The word maps to a nonidentity element of the finite quotient, so
    /// its lift evaluation does not land in the translation subgroup.
    #[error("word maps to nonidentity element {image} of the finite quotient")]
    OutsideKernel { image: usize },
}

/// The affine lattice of lifts of `hom` into the extension group of `l`.
///
/// A lift assigns each generator `s` the element `σ(hom(s))·(x_s, e)`,
/// one free vector `x_s ∈ Z^d` per generator; the returned lattice (over
/// the stacked coordinates, generator-major) consists of exactly those
/// assignments under which every relator evaluates to the identity. Each
/// relator whose finite image is the identity contributes `d` linear
/// equations; a relator with nonidentity image makes the lattice empty
/// outright.
///
/// Requires a symmetric presentation (all relators positive), which the
/// letterwise expansion below assumes.
pub fn assemble_homlike_system(
    l: &VabData,
    p: &Presentation,
    hom: &FiniteHom,
) -> AffineLattice {
    assert!(
        p.is_symmetric(),
        "lift systems are only assembled over symmetric presentations"
    );
    let g = l.group();
    let d = l.dim();
    let ngens = p.generators().len();
    assert_eq!(hom.images.len(), ngens, "image count must match generators");
    assert!(
        hom.images.iter().all(|&x| x < g.order()),
        "images must index into the target group"
    );
    let ambient = ngens * d;
    if p.relators().is_empty() {
        return AffineLattice::full(ambient);
    }
    let mut stacked = IntMatrix::zero(0, ambient);
    let mut rhs = Vec::new();
    for r in p.relators() {
        let mut m = IntMatrix::zero(d, ambient);
        let mut acc = ext_identity(l);
        let mut cur = g.identity();
        for letter in r.letters() {
            debug_assert!(!letter.inverse, "symmetric relators are positive");
            let i = p.index_of(&letter.sym).expect("relator letter is a generator");
            let fs = hom.images[i];
            cur = g.mul(cur, fs);
            // The letter at this position contributes the action of the
            // whole prefix (itself included) to its generator's block.
            add_block(&mut m, i, d, l.action(cur), false);
            acc = ext_multiply(l, &acc, &ext_section(l, fs));
        }
        if acc.fin != g.identity() {
            return AffineLattice::empty(ambient);
        }
        stacked = stacked.vstack(&m);
        rhs.extend(vec_neg(&acc.vec));
    }
    solve_linear(&stacked, &rhs)
}

/// The affine map `f ↦ ψ_f(w)`: evaluating the lift parametrized by the
/// stacked vector `f` on the word `w` equals `M·f + c₀` for the returned
/// `(M, c₀)`.
///
/// Unlike [`assemble_homlike_system`] this accepts arbitrary words,
/// inverse letters included, but `w` must map to the identity of the
/// finite quotient — otherwise the value has a nontrivial finite part and
/// no such affine form exists.
pub fn word_eval_affine(
    l: &VabData,
    p: &Presentation,
    hom: &FiniteHom,
    w: &Word,
) -> Result<(IntMatrix, Vec<BigInt>), VabError> {
    let g = l.group();
    let d = l.dim();
    let ngens = p.generators().len();
    assert_eq!(hom.images.len(), ngens, "image count must match generators");
    let mut m = IntMatrix::zero(d, ngens * d);
    let mut c0 = vec![BigInt::zero(); d];
    let mut cur = g.identity();
    for letter in w.letters() {
        let i = p
            .index_of(&letter.sym)
            .expect("word uses a generator missing from the presentation");
        let fs = hom.images[i];
        if !letter.inverse {
            c0 = vec_add(&c0, l.cocycle(cur, fs));
            cur = g.mul(cur, fs);
            add_block(&mut m, i, d, l.action(cur), false);
        } else {
            let fs_inv = g.inv(fs);
            let next = g.mul(cur, fs_inv);
            add_block(&mut m, i, d, l.action(cur), true);
            // Inverting a lifted generator drags in the section's own
            // defect σ(fs)·σ(fs⁻¹) ≠ e alongside the pair cocycle.
            let defect = l.action(next).mul_vec(l.cocycle(fs, fs_inv));
            c0 = vec_add(&vec_sub(&c0, &defect), l.cocycle(cur, fs_inv));
            cur = next;
        }
    }
    if cur != g.identity() {
        return Err(VabError::OutsideKernel { image: cur });
    }
    Ok((m, c0))
}

/// Stacks [`word_eval_affine`] over a family of kernel words: the rows of
/// `(M, c)` list the `d` coordinates of each word's value in turn, so a
/// parameter vector `f` is sent to all values at once by `M·f + c`.
pub fn kernel_value_map(
    l: &VabData,
    p: &Presentation,
    hom: &FiniteHom,
    gens: &[Word],
) -> Result<(IntMatrix, Vec<BigInt>), VabError> {
    let mut m = IntMatrix::zero(0, p.generators().len() * l.dim());
    let mut c = Vec::new();
    for w in gens {
        let (mw, cw) = word_eval_affine(l, p, hom, w)?;
        m = m.vstack(&mw);
        c.extend(cw);
    }
    Ok((m, c))
}

/// Pushes a lattice of lifts through the evaluation map on the given
/// kernel words: the result is the set of value tuples `(ψ_f(t))_t`
/// realized by lifts `f` in the lattice.
pub fn restrict_to_kernel(
    l: &VabData,
    p: &Presentation,
    hom: &FiniteHom,
    lifts: &AffineLattice,
    gens: &[Word],
) -> Result<AffineLattice, VabError> {
    let (m, c) = kernel_value_map(l, p, hom, gens)?;
    Ok(lifts.affine_image(&m, &c))
}

/// Resource bounds for [`word_problem`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WordProblemConfig {
    /// Cap on relator insertions attempted while searching for a proof of
    /// triviality.
    pub max_relator_products: usize,
    /// Largest order of finite quotient searched for a witness of
    /// nontriviality.
    pub max_quotient_order: usize,
}

impl Default for WordProblemConfig {
    fn default() -> Self {
        WordProblemConfig {
            max_relator_products: 100_000,
            max_quotient_order: 12,
        }
    }
}

/// Outcome of the bounded word-problem search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WordVerdict {
    /// The word was rewritten to the empty word by relator insertions —
    /// a proof that it represents the identity.
    Trivial,
    /// A finite quotient maps the word to a nonidentity element (the
    /// smallest such order is reported), or the presentation has no
    /// relators at all, where a nonempty reduced word is never trivial.
    Nontrivial { quotient_order: Option<usize> },
    /// Both bounds ran out without a proof either way.
    Inconclusive,
}

/// Bounded two-sided word-problem search.
///
/// The trivial side does breadth-first search over freely reduced words,
/// inserting a relator or an inverse relator at every position; reaching
/// the empty word proves the input trivial. The nontrivial side maps the
/// word through every homomorphism into every finite group of order
/// `1..=max_quotient_order`; any nonidentity image proves it nontrivial.
/// The two sides are dovetailed so that the insertion budget spent before
/// quotient order `k` doubles with `k` — small quotient witnesses are
/// found after only a sliver of the insertion budget, while genuinely
/// trivial words still get the whole budget eventually.
pub fn word_problem(p: &Presentation, w: &Word, config: &WordProblemConfig) -> WordVerdict {
    if w.is_empty() {
        return WordVerdict::Trivial;
    }
    let moves = relator_moves(p);
    if moves.is_empty() {
        // No relators: the group is free on its generators, and a
        // nonempty reduced word is never the identity of a free group.
        return WordVerdict::Nontrivial {
            quotient_order: None,
        };
    }
    let mut search = TrivialSearch::new(moves, w);
    let budget = config.max_relator_products;
    for k in 1..=config.max_quotient_order {
        match search.advance(trivial_budget_before(k, config)) {
            SearchStep::FoundIdentity => return WordVerdict::Trivial,
            SearchStep::DeadEnd | SearchStep::BudgetReached => {}
        }
        for g in groups_of_order(k).iter() {
            for hom in enumerate_homs(p, g) {
                if hom.eval(p, g, w) != g.identity() {
                    return WordVerdict::Nontrivial {
                        quotient_order: Some(k),
                    };
                }
            }
        }
    }
    match search.advance(budget) {
        SearchStep::FoundIdentity => WordVerdict::Trivial,
        SearchStep::DeadEnd | SearchStep::BudgetReached => WordVerdict::Inconclusive,
    }
}

/// Cumulative insertion budget allowed before quotients of order `k` are
/// tried: geometric in `k`, with a small floor so early rounds make any
/// progress at all, and never more than the configured total.
fn trivial_budget_before(k: usize, config: &WordProblemConfig) -> usize {
    let shift = (config.max_quotient_order + 1 - k).min(63);
    (config.max_relator_products >> shift)
        .max(64)
        .min(config.max_relator_products)
}

fn relator_moves(p: &Presentation) -> Vec<Word> {
    let mut moves: Vec<Word> = Vec::new();
    for r in p.relators() {
        if r.is_empty() {
            continue;
        }
        for m in [r.clone(), r.inverse()] {
            if !moves.contains(&m) {
                moves.push(m);
            }
        }
    }
    moves
}

struct TrivialSearch {
    moves: Vec<Word>,
    queue: VecDeque<Word>,
    visited: HashSet<Word>,
    products: usize,
    found: bool,
}

enum SearchStep {
    FoundIdentity,
    /// Every word reachable by insertions has been visited. Not treated
    /// as a verdict: the caller falls back on the quotient side.
    DeadEnd,
    BudgetReached,
}

impl TrivialSearch {
    fn new(moves: Vec<Word>, w: &Word) -> Self {
        let mut visited = HashSet::new();
        visited.insert(w.clone());
        TrivialSearch {
            moves,
            queue: VecDeque::from([w.clone()]),
            visited,
            products: 0,
            found: false,
        }
    }

    /// Runs until the cumulative insertion count reaches `target` (a
    /// node's children are always generated together, so the count may
    /// overshoot by one node's branching).
    fn advance(&mut self, target: usize) -> SearchStep {
        if self.found {
            return SearchStep::FoundIdentity;
        }
        while self.products < target {
            let Some(current) = self.queue.pop_front() else {
                return SearchStep::DeadEnd;
            };
            for m in &self.moves {
                for pos in 0..=current.len() {
                    self.products += 1;
                    let child = splice(&current, m, pos);
                    if child.is_empty() {
                        self.found = true;
                        return SearchStep::FoundIdentity;
                    }
                    if self.visited.insert(child.clone()) {
                        self.queue.push_back(child);
                    }
                }
            }
        }
        SearchStep::BudgetReached
    }
}

/// Inserts `ins` into `w` before position `pos` and freely reduces.
fn splice(w: &Word, ins: &Word, pos: usize) -> Word {
    let letters = w.letters();
    Word::from_letters(
        letters[..pos]
            .iter()
            .cloned()
            .chain(ins.letters().iter().cloned())
            .chain(letters[pos..].iter().cloned()),
    )
}

/// A successful structure recovery: extension data, the epimorphism onto
/// its finite group, and words (over the input presentation's
/// generators) realizing the translation basis.
#[derive(Clone, Debug)]
pub struct VabStructure {
    pub data: VabData,
    pub hom: FiniteHom,
    pub basis_words: Vec<Word>,
}

/// Result of [`vab_structure`]: either recovered data or a bounded
/// failure, with one diagnostic per candidate that had to be abandoned on
/// an inconclusive word-problem answer.
#[derive(Clone, Debug)]
pub enum StructureSearch {
    Found(Box<VabStructure>),
    NotFound { diagnostics: Vec<String> },
}

/// Searches for free-abelian-by-finite structure on the group presented
/// by `p`.
///
/// Finite groups are enumerated in increasing order up to `max_order`;
/// for each, the epimorphisms from `p` are tried in image-tuple order.
/// Per candidate the kernel's Schreier generators are computed, their
/// pairwise commutativity is settled by [`word_problem`] (a nontrivial
/// commutator discards the candidate; an inconclusive one abandons it
/// with a diagnostic), the kernel's abelianization is checked to be free,
/// and the action and cocycle are read off by rewriting conjugates of the
/// basis into kernel coordinates. Candidates are examined strictly in
/// order and the first success is returned, so the result is
/// deterministic; the heavy lifting inside each candidate (homomorphism
/// enumeration) is already parallel.
pub fn vab_structure(
    p: &Presentation,
    max_order: usize,
    wp: &WordProblemConfig,
) -> StructureSearch {
    let mut diagnostics = Vec::new();
    for order in 1..=max_order {
        for (gi, g) in groups_of_order(order).iter().enumerate() {
            for (ei, hom) in enumerate_epis(p, g).into_iter().enumerate() {
                match examine_candidate(p, g, &hom, wp) {
                    CandidateOutcome::Found(s) => return StructureSearch::Found(s),
                    CandidateOutcome::Discarded => {}
                    CandidateOutcome::Aborted(msg) => diagnostics.push(format!(
                        "order {order}, group {gi}, epimorphism {ei}: {msg}"
                    )),
                }
            }
        }
    }
    StructureSearch::NotFound { diagnostics }
}

enum CandidateOutcome {
    Found(Box<VabStructure>),
    Discarded,
    Aborted(String),
}

fn examine_candidate(
    p: &Presentation,
    g: &FiniteGroup,
    hom: &FiniteHom,
    wp: &WordProblemConfig,
) -> CandidateOutcome {
    let kp = kernel_presentation(p, g, hom).expect("epimorphisms are surjective");
    let k = kp.inclusion.len();

    // The kernel is abelian iff its generators commute pairwise; each
    // commutator is decided as a word of the ambient presentation.
    for i in 0..k {
        for j in i + 1..k {
            let comm = kp.inclusion[i].1.commutator(&kp.inclusion[j].1);
            match word_problem(p, &comm, wp) {
                WordVerdict::Trivial => {}
                WordVerdict::Nontrivial { .. } => return CandidateOutcome::Discarded,
                WordVerdict::Inconclusive => {
                    return CandidateOutcome::Aborted(format!(
                        "cannot decide whether kernel generators {} = {} and {} = {} \
                         commute within the configured word-problem bounds",
                        kp.inclusion[i].0.as_str(),
                        kp.inclusion[i].1,
                        kp.inclusion[j].0.as_str(),
                        kp.inclusion[j].1,
                    ))
                }
            }
        }
    }

    // Freeness: the abelianized kernel must have no torsion. Its Smith
    // form also hands us a basis — the generators beyond the diagonal
    // rank, read through U⁻¹.
    let snf = smith_normal_form(&kp.raw.abelianization_matrix());
    if snf.nonzero_invariant_factors().iter().any(|f| !f.is_one()) {
        return CandidateOutcome::Discarded;
    }
    let rank = snf.rank();
    let d = k - rank;

    // Coordinates of a kernel element: rewrite into Schreier generators,
    // abelianize, change basis by U, keep the free positions.
    let coords = |w: &Word| -> Vec<BigInt> {
        let tau = rewrite_in_kernel(&kp.transversal, w)
            .expect("conjugates of kernel elements stay in the kernel");
        let mut x = vec![BigInt::zero(); k];
        for letter in tau.letters() {
            let idx = kp
                .raw
                .index_of(&letter.sym)
                .expect("rewritten word uses kernel generators");
            if letter.inverse {
                x[idx] -= 1;
            } else {
                x[idx] += 1;
            }
        }
        let y = snf.u.mul_vec(&x);
        y[rank..k].to_vec()
    };

    let mut basis_words = Vec::with_capacity(d);
    for col in rank..k {
        let mut w = Word::empty();
        for row in 0..k {
            let e = snf.u_inv[(row, col)]
                .to_i64()
                .expect("basis exponent fits in i64");
            if e != 0 {
                w = w.concat(&word_pow(&kp.inclusion[row].1, e));
            }
        }
        basis_words.push(w);
    }
    if cfg!(debug_assertions) {
        for (j, b) in basis_words.iter().enumerate() {
            let mut expected = vec![BigInt::zero(); d];
            expected[j] = BigInt::one();
            debug_assert_eq!(coords(b), expected, "basis words carry unit coordinates");
        }
    }

    let n = g.order();
    let mut action = Vec::with_capacity(n);
    for x in 0..n {
        let rep = kp.transversal.rep(x).clone();
        let cols: Vec<Vec<BigInt>> = basis_words
            .iter()
            .map(|b| coords(&rep.conjugate(b)))
            .collect();
        action.push(IntMatrix::from_columns(d, &cols));
    }
    let mut cocycle = Vec::with_capacity(n);
    for x in 0..n {
        let mut row = Vec::with_capacity(n);
        for y in 0..n {
            let w = kp
                .transversal
                .rep(x)
                .concat(kp.transversal.rep(y))
                .concat(&kp.transversal.rep(g.mul(x, y)).inverse());
            row.push(coords(&w));
        }
        cocycle.push(row);
    }

    let data = VabData::new(g.clone(), d, action, cocycle);
    assert!(
        verify_vab(&data),
        "assembled extension data must satisfy the extension laws"
    );
    CandidateOutcome::Found(Box::new(VabStructure {
        data,
        hom: hom.clone(),
        basis_words,
    }))
}

/// A presentation of the extension group determined by the data: one
/// generator per translation basis vector (`z1..zd`), one per nonidentity
/// finite element (`u<index>`), with commuting translations, the action
/// as conjugation relators, and products of section lifts corrected by
/// the cocycle.
pub fn extension_presentation(l: &VabData) -> Presentation {
    let d = l.dim();
    let g = l.group();
    let n = g.order();
    let e = g.identity();
    let z: Vec<GenSym> = (0..d).map(|i| GenSym::new(&format!("z{}", i + 1))).collect();
    let mut lifts: Vec<Option<GenSym>> = vec![None; n];
    let mut gens: Vec<GenSym> = z.clone();
    for (x, lift) in lifts.iter_mut().enumerate() {
        if x != e {
            let s = GenSym::new(&format!("u{x}"));
            *lift = Some(s.clone());
            gens.push(s);
        }
    }
    let lift_word = |x: usize| -> Word {
        match &lifts[x] {
            Some(s) => Word::generator(s.clone()),
            None => Word::empty(),
        }
    };
    let z_word = |v: &[BigInt]| -> Word {
        let mut w = Word::empty();
        for (i, c) in v.iter().enumerate() {
            let c = c.to_i64().expect("translation exponent fits in i64");
            if c != 0 {
                w = w.concat(&Word::power(z[i].clone(), c));
            }
        }
        w
    };
    let mut relators = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            relators
                .push(Word::generator(z[i].clone()).commutator(&Word::generator(z[j].clone())));
        }
    }
    for x in 0..n {
        if x == e {
            continue;
        }
        let u = lift_word(x);
        for i in 0..d {
            let col: Vec<BigInt> = (0..d).map(|r| l.action(x)[(r, i)].clone()).collect();
            relators.push(
                u.conjugate(&Word::generator(z[i].clone()))
                    .concat(&z_word(&col).inverse()),
            );
        }
        for y in 0..n {
            if y == e {
                continue;
            }
            let rhs = z_word(l.cocycle(x, y)).concat(&lift_word(g.mul(x, y)));
            relators.push(u.concat(&lift_word(y)).concat(&rhs.inverse()));
        }
    }
    Presentation::new(gens, relators)
}

pub(crate) fn word_pow(w: &Word, e: i64) -> Word {
    let base = if e < 0 { w.inverse() } else { w.clone() };
    let mut out = Word::empty();
    for _ in 0..e.unsigned_abs() {
        out = out.concat(&base);
    }
    out
}

fn add_block(m: &mut IntMatrix, block: usize, d: usize, c: &IntMatrix, negate: bool) {
    for r in 0..d {
        for j in 0..d {
            let col = block * d + j;
            if negate {
                m[(r, col)] -= &c[(r, j)];
            } else {
                m[(r, col)] += &c[(r, j)];
            }
        }
    }
}

fn vec_add(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn vec_sub(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn vec_neg(a: &[BigInt]) -> Vec<BigInt> {
    a.iter().map(|x| -x).collect()
}
