//! Finite-index kernels: coset transversals, Schreier generators, and
//! Reidemeister rewriting.
//!
//! Given a surjection `φ` from a finitely presented group onto a finite
//! group, [`SchreierTransversal`] fixes a shortlex-minimal, prefix-closed
//! system of coset representatives. From it we read off a generating set of
//! `ker φ` ([`kernel_generators`]), rewrite kernel elements over those
//! generators ([`rewrite_in_kernel`]), and assemble a finite presentation
//! of the kernel ([`kernel_presentation`]).

use std::collections::BTreeMap;

use thiserror::Error;

use crate::finite::{subgroup_closure, FiniteGroup, FiniteHom};
use crate::words::{GenSym, Letter, Presentation, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewritingError {
    #[error("homomorphism is not surjective, images generate a subgroup of size {closure} of {order}")]
    NotSurjective { closure: usize, order: usize },
    #[error("word lies outside the kernel: its image is element {image}, not the identity")]
    OutsideKernel { image: usize },
}

/// Shortlex Schreier transversal for `ker φ`, with the Schreier generator
/// table attached.
///
/// Representatives are positive words (the image of each generator, not its
/// inverse, walks the coset graph); surjectivity onto a finite group makes
/// every coset reachable that way. Breadth-first search with generators
/// tried in presentation order yields the shortlex-minimal representative
/// of every coset, and the set is prefix-closed.
#[derive(Clone, Debug)]
pub struct SchreierTransversal {
    presentation: Presentation,
    group: FiniteGroup,
    images: Vec<usize>,
    reps: Vec<Word>,
    discovery: Vec<usize>,
    kg_index: Vec<Vec<Option<usize>>>,
    kg_labels: Vec<GenSym>,
    kg_words: Vec<Word>,
}

/// Build the transversal for `φ: ⟨P⟩ → G` given by `hom`. Rejects
/// non-surjective homomorphisms (the flag on `hom` is not trusted; the
/// image subgroup is recomputed).
pub fn schreier_transversal(
    p: &Presentation,
    g: &FiniteGroup,
    hom: &FiniteHom,
) -> Result<SchreierTransversal, RewritingError> {
    let closure = subgroup_closure(g, &hom.images);
    if closure.len() != g.order() {
        return Err(RewritingError::NotSurjective {
            closure: closure.len(),
            order: g.order(),
        });
    }
    let n = g.order();
    let ngens = p.generators().len();
    let mut reps: Vec<Option<Word>> = vec![None; n];
    reps[g.identity()] = Some(Word::empty());
    let mut discovery = vec![g.identity()];
    let mut tree = vec![vec![false; ngens]; n];
    let mut head = 0;
    while head < discovery.len() {
        let f = discovery[head];
        head += 1;
        for (i, s) in p.generators().iter().enumerate() {
            let fs = g.mul(f, hom.images[i]);
            if reps[fs].is_none() {
                let extended = reps[f]
                    .as_ref()
                    .unwrap()
                    .concat(&Word::generator(s.clone()));
                reps[fs] = Some(extended);
                tree[f][i] = true;
                discovery.push(fs);
            }
        }
    }
    let reps: Vec<Word> = reps
        .into_iter()
        .map(|r| r.expect("surjectivity reaches every coset"))
        .collect();

    // Schreier generators: σ(f)·s·σ(f·φ(s))⁻¹ over non-tree edges, in
    // discovery order of f, then presentation order of s. For a shortlex
    // transversal these words are never freely trivial, but the guard
    // stays as a safety net.
    let mut kg_index = vec![vec![None; ngens]; n];
    let mut kg_labels = Vec::new();
    let mut kg_words = Vec::new();
    for &f in &discovery {
        for (i, s) in p.generators().iter().enumerate() {
            if tree[f][i] {
                continue;
            }
            let fs = g.mul(f, hom.images[i]);
            let word = reps[f]
                .concat(&Word::generator(s.clone()))
                .concat(&reps[fs].inverse());
            if word.is_empty() {
                continue;
            }
            kg_index[f][i] = Some(kg_labels.len());
            kg_labels.push(GenSym::new(&format!("t{}", kg_labels.len() + 1)));
            kg_words.push(word);
        }
    }

    Ok(SchreierTransversal {
        presentation: p.clone(),
        group: g.clone(),
        images: hom.images.clone(),
        reps,
        discovery,
        kg_index,
        kg_labels,
        kg_words,
    })
}

impl SchreierTransversal {
    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Representative word of the coset of the group element `f`.
    pub fn rep(&self, f: usize) -> &Word {
        &self.reps[f]
    }

    pub fn rep_count(&self) -> usize {
        self.reps.len()
    }

    /// Group elements in breadth-first discovery order (identity first).
    pub fn discovery_order(&self) -> &[usize] {
        &self.discovery
    }

    /// Image in the finite group of an arbitrary word over the generators.
    pub fn image_of(&self, w: &Word) -> usize {
        let mut acc = self.group.identity();
        for l in w.letters() {
            let i = self
                .presentation
                .index_of(&l.sym)
                .expect("word over foreign generators");
            let img = if l.inverse {
                self.group.inv(self.images[i])
            } else {
                self.images[i]
            };
            acc = self.group.mul(acc, img);
        }
        acc
    }

    /// `c(w)`: the representative of the coset hit by `w`.
    pub fn canonical(&self, w: &Word) -> &Word {
        &self.reps[self.image_of(w)]
    }
}

/// The labeled Schreier generators of `ker φ`: freely nontrivial words
/// `σ(f)·s·(c(σ(f)s))⁻¹`, labeled `t1, t2, …` in the order produced.
pub fn kernel_generators(t: &SchreierTransversal) -> Vec<(GenSym, Word)> {
    t.kg_labels
        .iter()
        .cloned()
        .zip(t.kg_words.iter().cloned())
        .collect()
}

/// Reidemeister rewriting: express a kernel element over the Schreier
/// generator labels. Fails if `w` does not map to the identity.
pub fn rewrite_in_kernel(t: &SchreierTransversal, w: &Word) -> Result<Word, RewritingError> {
    let image = t.image_of(w);
    if image != t.group.identity() {
        return Err(RewritingError::OutsideKernel { image });
    }
    let mut letters: Vec<Letter> = Vec::new();
    let mut coset = t.group.identity();
    for l in w.letters() {
        let i = t.presentation.index_of(&l.sym).unwrap();
        if !l.inverse {
            // Letter s read at prefix coset f contributes the generator of
            // the edge (f, s); tree edges contribute nothing.
            if let Some(k) = t.kg_index[coset][i] {
                letters.push(Letter::new(t.kg_labels[k].clone(), false));
            }
            coset = t.group.mul(coset, t.images[i]);
        } else {
            // Letter s⁻¹ at prefix coset f walks the edge (f·φ(s)⁻¹, s)
            // backwards.
            let back = t.group.mul(coset, t.group.inv(t.images[i]));
            if let Some(k) = t.kg_index[back][i] {
                letters.push(Letter::new(t.kg_labels[k].clone(), true));
            }
            coset = back;
        }
    }
    Ok(Word::from_letters(letters))
}

/// A finite presentation of `ker φ` together with the inclusion back into
/// the ambient group.
#[derive(Clone, Debug)]
pub struct KernelPresentation {
    pub transversal: SchreierTransversal,
    /// Presentation over the labels `t1, …` with the rewritten conjugated
    /// relators, before any symmetrization.
    pub raw: Presentation,
    /// Symmetrized form of `raw`.
    pub symmetric: Presentation,
    /// Each kernel generator as a word over the ambient generators.
    pub inclusion: Vec<(GenSym, Word)>,
}

/// Present `ker φ`: generators are the Schreier generators; relators are
/// the Reidemeister rewritings of `σ(f)·r·σ(f)⁻¹` over all cosets `f` (in
/// discovery order) and relators `r` (in presentation order). The
/// `symmetric` field delegates the final symmetrization to
/// [`Presentation::symmetrize`].
pub fn kernel_presentation(
    p: &Presentation,
    g: &FiniteGroup,
    hom: &FiniteHom,
) -> Result<KernelPresentation, RewritingError> {
    let t = schreier_transversal(p, g, hom)?;
    let mut relators = Vec::new();
    for &f in t.discovery_order() {
        for r in p.relators() {
            let conj = t.rep(f).conjugate(r);
            let rewritten =
                rewrite_in_kernel(&t, &conj).expect("conjugated relator lies in the kernel");
            relators.push(rewritten);
        }
    }
    let raw = Presentation::new(t.kg_labels.clone(), relators);
    let symmetric = raw.symmetrize();
    let inclusion = kernel_generators(&t);
    Ok(KernelPresentation {
        transversal: t,
        raw,
        symmetric,
        inclusion,
    })
}

impl KernelPresentation {
    /// Inclusion map as JSON: `{"t1": "a a", ...}`.
    pub fn inclusion_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (label, word) in &self.inclusion {
            map.insert(
                label.as_str().to_owned(),
                serde_json::Value::String(word.to_string()),
            );
        }
        serde_json::Value::Object(map)
    }

    /// Expand a word over the kernel generators into ambient letters.
    pub fn expand(&self, w: &Word) -> Word {
        let table: BTreeMap<&GenSym, &Word> =
            self.inclusion.iter().map(|(l, w)| (l, w)).collect();
        let mut out = Word::empty();
        for l in w.letters() {
            let body = table[&l.sym];
            out = if l.inverse {
                out.concat(&body.inverse())
            } else {
                out.concat(body)
            };
        }
        out
    }
}
