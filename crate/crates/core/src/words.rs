//! Free words and finite group presentations.
//!
//! Words are kept freely reduced at all times. A presentation carries a
//! `symmetric` flag: a presentation is *symmetric* when every relator is a
//! positive word and every generator `s` has a partner `s'` such that `s s'`
//! or `s' s` appears among the relators (so `s'` represents the inverse of
//! `s`). Several downstream constructions require symmetric input, and
//! [`Presentation::symmetrize`] converts any presentation into an isomorphic
//! symmetric one.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

use crate::linalg::IntMatrix;

/// Interned generator name. Cloning is cheap; ordering and hashing follow
/// the underlying string.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenSym(Arc<str>);

impl GenSym {
    pub fn new(name: &str) -> Self {
        GenSym(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for GenSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for GenSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl From<&str> for GenSym {
    fn from(s: &str) -> Self {
        GenSym::new(s)
    }
}

/// One letter of a word: a generator or its formal inverse.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Letter {
    pub sym: GenSym,
    pub inverse: bool,
}

impl Letter {
    pub fn new(sym: GenSym, inverse: bool) -> Self {
        Letter { sym, inverse }
    }

    pub fn inverted(&self) -> Letter {
        Letter {
            sym: self.sym.clone(),
            inverse: !self.inverse,
        }
    }

    fn cancels(&self, other: &Letter) -> bool {
        self.sym == other.sym && self.inverse != other.inverse
    }
}

/// A freely reduced word over generator symbols.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    /// Build a word, freely reducing adjacent cancelling pairs.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut stack: Vec<Letter> = Vec::new();
        for l in letters {
            match stack.last() {
                Some(top) if top.cancels(&l) => {
                    stack.pop();
                }
                _ => stack.push(l),
            }
        }
        Word { letters: stack }
    }

    pub fn generator(sym: GenSym) -> Self {
        Word {
            letters: vec![Letter::new(sym, false)],
        }
    }

    /// `sym` raised to the (possibly negative) power `k`.
    pub fn power(sym: GenSym, k: i64) -> Self {
        let letter = Letter::new(sym, k < 0);
        Word {
            letters: std::iter::repeat_n(letter, k.unsigned_abs() as usize).collect(),
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// True when no letter is inverted.
    pub fn is_positive(&self) -> bool {
        self.letters.iter().all(|l| !l.inverse)
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::from_letters(self.letters.iter().chain(&other.letters).cloned())
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(Letter::inverted).collect(),
        }
    }

    /// `self * other * self^{-1}`.
    pub fn conjugate(&self, other: &Word) -> Word {
        self.concat(other).concat(&self.inverse())
    }

    /// Commutator `[self, other] = self * other * self^{-1} * other^{-1}`.
    pub fn commutator(&self, other: &Word) -> Word {
        self.concat(other)
            .concat(&self.inverse())
            .concat(&other.inverse())
    }

    /// Net exponent of `sym` in this word.
    pub fn exponent_sum(&self, sym: &GenSym) -> BigInt {
        let mut total = 0i64;
        for l in &self.letters {
            if &l.sym == sym {
                total += if l.inverse { -1 } else { 1 };
            }
        }
        BigInt::from(total)
    }
}

impl fmt::Display for Word {
    /// Space-separated letters, inverses as `name^-1`; the empty word shows
    /// as an empty string.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if l.inverse {
                write!(f, "{}^-1", l.sym)?;
            } else {
                write!(f, "{}", l.sym)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

/// Parse error for the presentation text format and for words.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A finite presentation `⟨ S | R ⟩`.
#[derive(Clone, PartialEq, Eq)]
pub struct Presentation {
    generators: Vec<GenSym>,
    relators: Vec<Word>,
    symmetric: bool,
    index: HashMap<GenSym, usize>,
}

impl Presentation {
    /// Construct and validate. Panics on malformed input (duplicate or
    /// non-identifier generator names, undeclared symbols in relators);
    /// parse from text for recoverable errors.
    pub fn new(generators: Vec<GenSym>, relators: Vec<Word>) -> Self {
        let mut index = HashMap::new();
        for (i, g) in generators.iter().enumerate() {
            assert!(
                is_identifier(g.as_str()),
                "generator name {:?} is not an identifier",
                g.as_str()
            );
            let prev = index.insert(g.clone(), i);
            assert!(prev.is_none(), "duplicate generator {:?}", g.as_str());
        }
        for r in &relators {
            for l in r.letters() {
                assert!(
                    index.contains_key(&l.sym),
                    "relator uses undeclared generator {:?}",
                    l.sym.as_str()
                );
            }
        }
        let symmetric = check_symmetric(&generators, &relators);
        Presentation {
            generators,
            relators,
            symmetric,
            index,
        }
    }

    pub fn generators(&self) -> &[GenSym] {
        &self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Whether the symmetric-presentation invariants hold.
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn index_of(&self, sym: &GenSym) -> Option<usize> {
        self.index.get(sym).copied()
    }

    /// Parse the line-based text format:
    ///
    /// ```text
    /// # comment
    /// gens: a, b
    /// rel: a b a b^-1
    /// rel: a^4
    /// ```
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut generators: Option<Vec<GenSym>> = None;
        let mut gen_set: HashMap<GenSym, usize> = HashMap::new();
        let mut relators: Vec<Word> = Vec::new();
        for (lineno0, raw) in text.lines().enumerate() {
            let lineno = lineno0 + 1;
            let line = raw.trim_end();
            let trimmed = line.trim_start();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let indent = line.len() - trimmed.len();
            if let Some(rest) = trimmed.strip_prefix("gens:") {
                if generators.is_some() {
                    return Err(ParseError::new(lineno, indent + 1, "duplicate gens: line"));
                }
                let mut gens = Vec::new();
                let base_col = indent + "gens:".len();
                let mut col = base_col;
                for part in rest.split(',') {
                    let name = part.trim();
                    let name_col = col + 1 + (part.len() - part.trim_start().len());
                    col += part.len() + 1;
                    if name.is_empty() {
                        if rest.trim().is_empty() && gens.is_empty() {
                            break; // `gens:` with no generators: legal empty alphabet
                        }
                        return Err(ParseError::new(lineno, name_col, "empty generator name"));
                    }
                    if !is_identifier(name) {
                        return Err(ParseError::new(
                            lineno,
                            name_col,
                            format!("invalid generator name {name:?}"),
                        ));
                    }
                    let sym = GenSym::new(name);
                    if gen_set.insert(sym.clone(), gens.len()).is_some() {
                        return Err(ParseError::new(
                            lineno,
                            name_col,
                            format!("duplicate generator {name:?}"),
                        ));
                    }
                    gens.push(sym);
                }
                generators = Some(gens);
            } else if let Some(rest) = trimmed.strip_prefix("rel:") {
                if generators.is_none() {
                    return Err(ParseError::new(
                        lineno,
                        indent + 1,
                        "rel: line before gens: line",
                    ));
                }
                let base_col = indent + "rel:".len();
                let word = parse_word_in(rest, lineno, base_col, |name| {
                    gen_set.contains_key(&GenSym::new(name))
                })?;
                relators.push(word);
            } else {
                return Err(ParseError::new(
                    lineno,
                    indent + 1,
                    format!("expected `gens:`, `rel:` or comment, found {trimmed:?}"),
                ));
            }
        }
        let generators =
            generators.ok_or_else(|| ParseError::new(1, 1, "missing gens: line"))?;
        Ok(Presentation::new(generators, relators))
    }

    /// Parse a word over this presentation's generators.
    pub fn parse_word(&self, text: &str) -> Result<Word, ParseError> {
        parse_word_in(text, 1, 0, |name| {
            self.index.contains_key(&GenSym::new(name))
        })
    }

    /// Render in the text format accepted by [`Presentation::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::from("gens: ");
        out.push_str(
            &self
                .generators
                .iter()
                .map(|g| g.as_str().to_owned())
                .collect::<Vec<_>>()
                .join(", "),
        );
        out.push('\n');
        for r in &self.relators {
            out.push_str("rel: ");
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }

    /// Symmetric presentation of the same group.
    ///
    /// Each generator `s` splits into `s_p` (for `s`) and `s_m` (for
    /// `s^{-1}`); the relators are the inverse pairs `s_p s_m` followed by
    /// the letterwise-positive rewritings of the original relators. The map
    /// `s ↦ s_p` induces an isomorphism.
    pub fn symmetrize(&self) -> Presentation {
        let mut plus = Vec::with_capacity(self.generators.len());
        let mut minus = Vec::with_capacity(self.generators.len());
        let mut new_gens = Vec::with_capacity(2 * self.generators.len());
        for g in &self.generators {
            let p = GenSym::new(&format!("{}_p", g.as_str()));
            let m = GenSym::new(&format!("{}_m", g.as_str()));
            plus.push(p.clone());
            minus.push(m.clone());
            new_gens.push(p);
            new_gens.push(m);
        }
        let mut new_rels = Vec::new();
        for (p, m) in plus.iter().zip(&minus) {
            new_rels.push(Word::from_letters(vec![
                Letter::new(p.clone(), false),
                Letter::new(m.clone(), false),
            ]));
        }
        for r in &self.relators {
            let rewritten = Word::from_letters(r.letters().iter().map(|l| {
                let i = self.index[&l.sym];
                let sym = if l.inverse {
                    minus[i].clone()
                } else {
                    plus[i].clone()
                };
                Letter::new(sym, false)
            }));
            new_rels.push(rewritten);
        }
        let out = Presentation::new(new_gens, new_rels);
        debug_assert!(out.symmetric, "symmetrize produced a non-symmetric result");
        out
    }

    /// `|S| × |R|` matrix of exponent sums; presents the abelianization.
    pub fn abelianization_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zero(self.generators.len(), self.relators.len());
        for (j, r) in self.relators.iter().enumerate() {
            for l in r.letters() {
                let i = self.index[&l.sym];
                if l.inverse {
                    m[(i, j)] -= 1;
                } else {
                    m[(i, j)] += 1;
                }
            }
        }
        m
    }
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨")?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, " | ")?;
        for (i, r) in self.relators.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "⟩")
    }
}

/// Does `(generators, relators)` satisfy the symmetric-presentation
/// invariants? Every relator positive, and every generator has an inverse
/// partner witnessed by a two-letter relator.
fn check_symmetric(generators: &[GenSym], relators: &[Word]) -> bool {
    if !relators.iter().all(Word::is_positive) {
        return false;
    }
    generators.iter().all(|s| {
        generators.iter().any(|t| {
            relators.iter().any(|r| {
                let ls = r.letters();
                ls.len() == 2
                    && ((ls[0].sym == *s && ls[1].sym == *t)
                        || (ls[0].sym == *t && ls[1].sym == *s))
            })
        })
    })
}

/// Parse a whitespace-separated word; `is_known` filters legal names.
/// `base_col` is the 0-based column where `text` starts inside its line.
fn parse_word_in(
    text: &str,
    line: usize,
    base_col: usize,
    is_known: impl Fn(&str) -> bool,
) -> Result<Word, ParseError> {
    let mut letters: Vec<Letter> = Vec::new();
    let mut rest = text;
    let mut offset = 0usize;
    loop {
        let skipped = rest.len() - rest.trim_start().len();
        offset += skipped;
        rest = rest.trim_start();
        if rest.is_empty() {
            break;
        }
        let end = rest
            .find(char::is_whitespace)
            .unwrap_or(rest.len());
        let token = &rest[..end];
        let col = base_col + offset + 1;
        let (name, exp) = match token.split_once('^') {
            None => (token, 1i64),
            Some((name, exp_str)) => {
                let exp: i64 = exp_str.parse().map_err(|_| {
                    ParseError::new(
                        line,
                        col + name.len() + 1,
                        format!("invalid exponent {exp_str:?}"),
                    )
                })?;
                if exp == 0 {
                    return Err(ParseError::new(
                        line,
                        col + name.len() + 1,
                        "exponent must be nonzero",
                    ));
                }
                (name, exp)
            }
        };
        if !is_identifier(name) {
            return Err(ParseError::new(
                line,
                col,
                format!("invalid generator name {name:?}"),
            ));
        }
        if !is_known(name) {
            return Err(ParseError::new(
                line,
                col,
                format!("undeclared generator {name:?}"),
            ));
        }
        let letter = Letter::new(GenSym::new(name), exp < 0);
        for _ in 0..exp.unsigned_abs() {
            letters.push(letter.clone());
        }
        offset += end;
        rest = &rest[end..];
    }
    Ok(Word::from_letters(letters))
}
