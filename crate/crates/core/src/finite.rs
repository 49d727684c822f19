//! Finite groups as multiplication tables.
//!
//! A [`FiniteGroup`] is a Cayley table over indices `0..order` with element
//! labels attached; the group axioms are verified at construction, so every
//! value of the type is a genuine group. On top of that sit subgroup
//! closure, enumeration of (epi)morphisms from a finitely presented group,
//! and a bounded enumeration of isomorphism types of finite groups.
//!
//! Everything here is exact and deterministic: enumerations emit a fixed
//! order even when they parallelize internally.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::par;
use crate::words::{Presentation, Word};

/// Violation found while validating a multiplication table.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("element list is empty")]
    Empty,
    #[error("duplicate element label {label:?}")]
    DuplicateLabel { label: String },
    #[error("table has {got} rows, expected {expected}")]
    RowCount { got: usize, expected: usize },
    #[error("table row {row} has {got} entries, expected {expected}")]
    RowLength { row: usize, got: usize, expected: usize },
    #[error("table entry at ({row}, {col}) is {value}, out of range")]
    EntryRange { row: usize, col: usize, value: usize },
    #[error("identity index {identity} is out of range")]
    IdentityRange { identity: usize },
    #[error("identity law fails for element {elem}")]
    IdentityLaw { elem: usize },
    #[error("associativity fails at ({a}, {b}, {c})")]
    Associativity { a: usize, b: usize, c: usize },
    #[error("element {elem} has no two-sided inverse")]
    NoInverse { elem: usize },
}

/// A finite group given by its multiplication table.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "FiniteGroupJson", into = "FiniteGroupJson")]
pub struct FiniteGroup {
    labels: Vec<String>,
    identity: usize,
    table: Vec<Vec<usize>>,
    inverses: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct FiniteGroupJson {
    elements: Vec<String>,
    identity: usize,
    table: Vec<Vec<usize>>,
}

impl TryFrom<FiniteGroupJson> for FiniteGroup {
    type Error = GroupError;

    fn try_from(j: FiniteGroupJson) -> Result<Self, GroupError> {
        FiniteGroup::new(j.elements, j.identity, j.table)
    }
}

impl From<FiniteGroup> for FiniteGroupJson {
    fn from(g: FiniteGroup) -> Self {
        FiniteGroupJson {
            elements: g.labels,
            identity: g.identity,
            table: g.table,
        }
    }
}

impl FiniteGroup {
    /// Validate a table against all group axioms. Each failure mode gets
    /// its own error so callers (and CLI users) see which axiom broke.
    pub fn new(
        labels: Vec<String>,
        identity: usize,
        table: Vec<Vec<usize>>,
    ) -> Result<Self, GroupError> {
        let n = labels.len();
        if n == 0 {
            return Err(GroupError::Empty);
        }
        let mut seen = HashMap::new();
        for l in &labels {
            if seen.insert(l.clone(), ()).is_some() {
                return Err(GroupError::DuplicateLabel { label: l.clone() });
            }
        }
        if table.len() != n {
            return Err(GroupError::RowCount {
                got: table.len(),
                expected: n,
            });
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::RowLength {
                    row: i,
                    got: row.len(),
                    expected: n,
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(GroupError::EntryRange {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
            }
        }
        if identity >= n {
            return Err(GroupError::IdentityRange { identity });
        }
        for x in 0..n {
            if table[identity][x] != x || table[x][identity] != x {
                return Err(GroupError::IdentityLaw { elem: x });
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = table[a][b];
                for c in 0..n {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(GroupError::Associativity { a, b, c });
                    }
                }
            }
        }
        let mut inverses = vec![usize::MAX; n];
        for a in 0..n {
            match (0..n).find(|&b| table[a][b] == identity && table[b][a] == identity) {
                Some(b) => inverses[a] = b,
                None => return Err(GroupError::NoInverse { elem: a }),
            }
        }
        Ok(FiniteGroup {
            labels,
            identity,
            table,
            inverses,
        })
    }

    /// Cyclic group of order `n`, elements labeled by residues.
    pub fn cyclic(n: usize) -> FiniteGroup {
        assert!(n >= 1);
        let labels = (0..n).map(|i| i.to_string()).collect();
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        FiniteGroup::new(labels, 0, table).expect("cyclic table is a group")
    }

    pub fn trivial() -> FiniteGroup {
        FiniteGroup::cyclic(1)
    }

    /// Direct product; element `(a, b)` sits at index `a * |H| + b`.
    pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> FiniteGroup {
        let (n, m) = (g.order(), h.order());
        let mut labels = Vec::with_capacity(n * m);
        for a in 0..n {
            for b in 0..m {
                labels.push(format!("({},{})", g.labels[a], h.labels[b]));
            }
        }
        let mut table = vec![vec![0usize; n * m]; n * m];
        for a in 0..n {
            for b in 0..m {
                for c in 0..n {
                    for d in 0..m {
                        table[a * m + b][c * m + d] = g.table[a][c] * m + h.table[b][d];
                    }
                }
            }
        }
        let identity = g.identity * m + h.identity;
        FiniteGroup::new(labels, identity, table).expect("product table is a group")
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn pow(&self, a: usize, k: i64) -> usize {
        let base = if k < 0 { self.inv(a) } else { a };
        let mut acc = self.identity;
        for _ in 0..k.unsigned_abs() {
            acc = self.mul(acc, base);
        }
        acc
    }

    /// Order of the element `a`.
    pub fn element_order(&self, a: usize) -> usize {
        let mut acc = a;
        let mut k = 1;
        while acc != self.identity {
            acc = self.mul(acc, a);
            k += 1;
        }
        k
    }

    /// Multiset of element orders, sorted ascending. Isomorphism invariant.
    fn order_profile(&self) -> Vec<usize> {
        let mut orders: Vec<usize> = (0..self.order()).map(|a| self.element_order(a)).collect();
        orders.sort_unstable();
        orders
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.table[a][b] == self.table[b][a]))
    }
}

/// Subgroup generated by `seed`, as a sorted list of element indices.
/// Always contains the identity; closed under products and inverses.
pub fn subgroup_closure(g: &FiniteGroup, seed: &[usize]) -> Vec<usize> {
    let n = g.order();
    let mut member = vec![false; n];
    member[g.identity()] = true;
    let mut queue: Vec<usize> = vec![g.identity()];
    for &s in seed {
        assert!(s < n, "seed element {s} out of range");
        if !member[s] {
            member[s] = true;
            queue.push(s);
        }
    }
    // Products alone suffice for closure in a finite group (powers reach
    // the inverse), but products of *known* members must keep flowing
    // until nothing new appears.
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        for y in 0..n {
            if member[y] {
                for z in [g.mul(x, y), g.mul(y, x)] {
                    if !member[z] {
                        member[z] = true;
                        queue.push(z);
                    }
                }
            }
        }
    }
    (0..n).filter(|&i| member[i]).collect()
}

/// A homomorphism from a finitely presented group into a finite group,
/// stored as the image of each generator (indexed as in the presentation).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteHom {
    pub images: Vec<usize>,
    pub surjective: bool,
}

impl FiniteHom {
    /// Evaluate a word over the presentation's generators.
    pub fn eval(&self, p: &Presentation, g: &FiniteGroup, w: &Word) -> usize {
        let mut acc = g.identity();
        for l in w.letters() {
            let i = p
                .index_of(&l.sym)
                .expect("word uses a generator outside the presentation");
            let img = if l.inverse {
                g.inv(self.images[i])
            } else {
                self.images[i]
            };
            acc = g.mul(acc, img);
        }
        acc
    }
}

struct HomSearch {
    /// Relators as `(generator index, inverted)` letter lists.
    relators: Vec<Vec<(usize, bool)>>,
    /// `by_depth[k]`: relators whose highest generator index is `k`; they
    /// become checkable once generators `0..=k` have images.
    by_depth: Vec<Vec<usize>>,
}

impl HomSearch {
    fn new(p: &Presentation) -> Self {
        let ngens = p.generators().len();
        let mut relators = Vec::new();
        let mut by_depth = vec![Vec::new(); ngens];
        for (ri, r) in p.relators().iter().enumerate() {
            let letters: Vec<(usize, bool)> = r
                .letters()
                .iter()
                .map(|l| (p.index_of(&l.sym).unwrap(), l.inverse))
                .collect();
            if let Some(max) = letters.iter().map(|&(i, _)| i).max() {
                by_depth[max].push(ri);
            }
            // Relators with no letters are freely trivial and hold under
            // every assignment; they need no slot.
            relators.push(letters);
        }
        HomSearch { relators, by_depth }
    }

    fn relator_holds(&self, g: &FiniteGroup, images: &[usize], ri: usize) -> bool {
        let mut acc = g.identity();
        for &(i, inv) in &self.relators[ri] {
            let img = if inv { g.inv(images[i]) } else { images[i] };
            acc = g.mul(acc, img);
        }
        acc == g.identity()
    }

    fn descend(&self, g: &FiniteGroup, images: &mut Vec<usize>, ngens: usize, out: &mut Vec<FiniteHom>) {
        if images.len() == ngens {
            let closure = subgroup_closure(g, images);
            out.push(FiniteHom {
                images: images.clone(),
                surjective: closure.len() == g.order(),
            });
            return;
        }
        let depth = images.len();
        for v in 0..g.order() {
            images.push(v);
            if self.by_depth[depth]
                .iter()
                .all(|&ri| self.relator_holds(g, images, ri))
            {
                self.descend(g, images, ngens, out);
            }
            images.pop();
        }
    }
}

/// All homomorphisms `P → G`, in lexicographic order of their image-index
/// tuples. Parallelizes over the first generator's image when the
/// `parallel` feature is enabled; the output order is identical either way.
pub fn enumerate_homs(p: &Presentation, g: &FiniteGroup) -> Vec<FiniteHom> {
    let ngens = p.generators().len();
    let search = HomSearch::new(p);
    if ngens == 0 {
        let mut out = Vec::new();
        search.descend(g, &mut Vec::new(), 0, &mut out);
        return out;
    }
    let branches = par::map_ordered((0..g.order()).collect(), |v| {
        let mut out = Vec::new();
        let mut images = vec![v];
        if search.by_depth[0]
            .iter()
            .all(|&ri| search.relator_holds(g, &images, ri))
        {
            search.descend(g, &mut images, ngens, &mut out);
        }
        out
    });
    branches.into_iter().flatten().collect()
}

/// Sequential twin of [`enumerate_homs`]; kept separate so the two can be
/// benchmarked against each other.
pub fn enumerate_homs_seq(p: &Presentation, g: &FiniteGroup) -> Vec<FiniteHom> {
    let ngens = p.generators().len();
    let search = HomSearch::new(p);
    let mut out = Vec::new();
    search.descend(g, &mut Vec::new(), ngens, &mut out);
    out
}

/// The surjective members of [`enumerate_homs`], same relative order.
pub fn enumerate_epis(p: &Presentation, g: &FiniteGroup) -> Vec<FiniteHom> {
    enumerate_homs(p, g).into_iter().filter(|h| h.surjective).collect()
}

/// Is there a bijective, table-preserving map `G → H`? Decided by
/// backtracking over images of a generating sequence of `G`.
pub fn are_isomorphic(g: &FiniteGroup, h: &FiniteGroup) -> bool {
    if g.order() != h.order() {
        return false;
    }
    if g.order_profile() != h.order_profile() {
        return false;
    }
    // Greedy generating sequence: walk the elements, keeping those not yet
    // generated by the earlier picks.
    let mut gens: Vec<usize> = Vec::new();
    let mut closure = subgroup_closure(g, &gens);
    for x in 0..g.order() {
        if closure.len() == g.order() {
            break;
        }
        if !closure.contains(&x) {
            gens.push(x);
            closure = subgroup_closure(g, &gens);
        }
    }
    let orders: Vec<usize> = gens.iter().map(|&x| g.element_order(x)).collect();
    let mut images = Vec::new();
    try_images(g, h, &gens, &orders, &mut images)
}

fn try_images(
    g: &FiniteGroup,
    h: &FiniteGroup,
    gens: &[usize],
    orders: &[usize],
    images: &mut Vec<usize>,
) -> bool {
    if images.len() == gens.len() {
        return extends_to_isomorphism(g, h, gens, images);
    }
    let want = orders[images.len()];
    for v in 0..h.order() {
        if h.element_order(v) == want {
            images.push(v);
            if try_images(g, h, gens, orders, images) {
                images.pop();
                return true;
            }
            images.pop();
        }
    }
    false
}

/// Try to extend `gens[i] ↦ images[i]` to a full isomorphism: spell every
/// element of `G` as (element already mapped)·generator via a breadth-first
/// sweep, transport the spelling to `H`, then verify the whole table.
fn extends_to_isomorphism(
    g: &FiniteGroup,
    h: &FiniteGroup,
    gens: &[usize],
    images: &[usize],
) -> bool {
    let n = g.order();
    let mut map = vec![usize::MAX; n];
    map[g.identity()] = h.identity();
    let mut queue = vec![g.identity()];
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        for (&gi, &hi) in gens.iter().zip(images) {
            let y = g.mul(x, gi);
            let fy = h.mul(map[x], hi);
            if map[y] == usize::MAX {
                map[y] = fy;
                queue.push(y);
            } else if map[y] != fy {
                return false;
            }
        }
    }
    if map.contains(&usize::MAX) {
        return false; // images fail to generate H's mirror of G
    }
    let mut hit = vec![false; n];
    for &v in &map {
        if hit[v] {
            return false;
        }
        hit[v] = true;
    }
    (0..n).all(|a| (0..n).all(|b| map[g.mul(a, b)] == h.mul(map[a], map[b])))
}

/// One representative per isomorphism type, orders ascending, then in the
/// deterministic order the table search emits. Each order's list is
/// computed on first use and cached process-wide.
pub fn enumerate_finite_groups(max_order: usize) -> impl Iterator<Item = FiniteGroup> {
    (1..=max_order).flat_map(|n| {
        let groups = groups_of_order(n);
        (0..groups.len()).map(move |i| groups[i].clone())
    })
}

static GROUP_CACHE: OnceLock<Mutex<BTreeMap<usize, Arc<Vec<FiniteGroup>>>>> = OnceLock::new();

/// Isomorphism-type representatives of order exactly `n` (cached).
pub fn groups_of_order(n: usize) -> Arc<Vec<FiniteGroup>> {
    assert!(n >= 1);
    let cache = GROUP_CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    if let Some(found) = cache.lock().unwrap().get(&n) {
        return Arc::clone(found);
    }
    let computed = Arc::new(generate_groups_of_order(n));
    let mut guard = cache.lock().unwrap();
    Arc::clone(guard.entry(n).or_insert(computed))
}

/// Backtracking construction of all Cayley tables on `{0, …, n−1}` with
/// identity 0, pruned by the Latin-square property and by associativity as
/// soon as a triple becomes fully determined, then deduplicated up to
/// isomorphism (bucketed by element-order profile first).
fn generate_groups_of_order(n: usize) -> Vec<FiniteGroup> {
    const EMPTY: usize = usize::MAX;
    let mut table = vec![vec![EMPTY; n]; n];
    for x in 0..n {
        table[0][x] = x;
        table[x][0] = x;
    }
    let mut row_used = vec![0u32; n];
    let mut col_used = vec![0u32; n];
    for x in 0..n {
        // Row x holds x (at column 0); column x holds x (at row 0); row 0
        // and column 0 are already complete.
        row_used[x] = 1 << x;
        col_used[x] = 1 << x;
        row_used[0] |= 1 << x;
        col_used[0] |= 1 << x;
    }
    let cells: Vec<(usize, usize)> = (1..n)
        .flat_map(|i| (1..n).map(move |j| (i, j)))
        .collect();
    let mut reps: Vec<FiniteGroup> = Vec::new();
    let mut buckets: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();

    fn assoc_ok(t: &[Vec<usize>], n: usize, i: usize, j: usize) -> bool {
        const EMPTY: usize = usize::MAX;
        // Only triples that touch the fresh entry t[i][j] can have become
        // fully determined; check each of the four roles it can play.
        let v = t[i][j];
        for c in 0..n {
            // (a,b) = (i,j): compare (ij)c with i(jc)
            if t[v][c] != EMPTY && t[j][c] != EMPTY && t[i][t[j][c]] != EMPTY
                && t[v][c] != t[i][t[j][c]]
            {
                return false;
            }
            // (b,c) = (i,j): compare (ai)j with a(ij)
            if t[c][i] != EMPTY && t[t[c][i]][j] != EMPTY && t[c][v] != EMPTY
                && t[t[c][i]][j] != t[c][v]
            {
                return false;
            }
        }
        for a in 0..n {
            for b in 0..n {
                if t[a][b] == i {
                    // (ab)j with ab = i: compare with a(bj)
                    if t[b][j] != EMPTY && t[a][t[b][j]] != EMPTY && v != t[a][t[b][j]] {
                        return false;
                    }
                } else if t[a][b] == j && t[i][a] != EMPTY {
                    // i(ab) with ab = j: compare with (ia)b
                    let ia = t[i][a];
                    if t[ia][b] != EMPTY && t[ia][b] != v {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn search(
        n: usize,
        cells: &[(usize, usize)],
        pos: usize,
        table: &mut Vec<Vec<usize>>,
        row_used: &mut Vec<u32>,
        col_used: &mut Vec<u32>,
        reps: &mut Vec<FiniteGroup>,
        buckets: &mut HashMap<Vec<usize>, Vec<usize>>,
    ) {
        if pos == cells.len() {
            let labels = (0..n)
                .map(|i| if i == 0 { "e".into() } else { format!("g{i}") })
                .collect();
            let g = FiniteGroup::new(labels, 0, table.clone())
                .expect("search output satisfies the group axioms");
            let profile = g.order_profile();
            let bucket = buckets.entry(profile).or_default();
            if !bucket.iter().any(|&k| are_isomorphic(&reps[k], &g)) {
                bucket.push(reps.len());
                reps.push(g);
            }
            return;
        }
        let (i, j) = cells[pos];
        for v in 0..n {
            let bit = 1u32 << v;
            if row_used[i] & bit != 0 || col_used[j] & bit != 0 {
                continue;
            }
            table[i][j] = v;
            row_used[i] |= bit;
            col_used[j] |= bit;
            if assoc_ok(table, n, i, j) {
                search(n, cells, pos + 1, table, row_used, col_used, reps, buckets);
            }
            table[i][j] = usize::MAX;
            row_used[i] &= !bit;
            col_used[j] &= !bit;
        }
    }

    if n == 1 {
        return vec![FiniteGroup::trivial()];
    }
    search(
        n,
        &cells,
        0,
        &mut table,
        &mut row_used,
        &mut col_used,
        &mut reps,
        &mut buckets,
    );
    reps
}
