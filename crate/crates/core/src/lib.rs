//! Decision procedures for epimorphisms from finitely presented groups onto
//! virtually cyclic groups and onto products of the form `Z^d x F` with `F`
//! finite.
//!
//! The pipeline runs, roughly bottom-up:
//!
//! * [`words`] — free words, presentations, the text format, symmetrization;
//! * [`finite`] — finite groups as multiplication tables, homomorphism and
//!   group enumeration;
//! * [`linalg`] — exact integer linear algebra: Smith normal form, affine
//!   lattices, finitely presented `Z`-modules;
//! * [`rewriting`] — coset transversals and finite-index subgroup
//!   presentations;
//! * [`colgen`] — existence of lattice points with coprime entries, and
//!   extension of epimorphisms onto `Z^d` along module maps;
//! * [`vab`] — crystallographic-style data `(F, d, action, cocycle)` for
//!   groups that are finite-by-free-abelian, and its reconstruction from a
//!   presentation;
//! * [`decide`] — the two top-level decision procedures.
//!
//! The `parallel` feature (on by default) routes a few hot enumeration loops
//! through rayon; results are identical to the sequential fallback.

pub mod colgen;
pub mod decide;
pub mod finite;
pub mod linalg;
mod par;
pub mod rewriting;
pub mod vab;
pub mod words;
