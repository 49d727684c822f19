//! Thin dispatch layer between rayon and plain iteration.
//!
//! Every public operation of this crate is deterministic; the helpers here
//! preserve input order (or first-in-order semantics for searches), so the
//! `parallel` feature changes wall-clock time only, never results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, collecting results in input order.
#[cfg(feature = "parallel")]
pub(crate) fn map_ordered<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_ordered<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

/// Apply `f` to each item and return the first `Some` in input order.
///
/// With rayon this is `find_map_first`: later items may be inspected
/// speculatively, but the returned value is the same one a sequential scan
/// would produce.
#[cfg(feature = "parallel")]
pub(crate) fn find_map_first<T, U, F>(items: Vec<T>, f: F) -> Option<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> Option<U> + Sync + Send,
{
    items.into_par_iter().find_map_first(f)
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn find_map_first<T, U, F>(items: Vec<T>, f: F) -> Option<U>
where
    F: Fn(T) -> Option<U>,
{
    items.into_iter().find_map(f)
}
