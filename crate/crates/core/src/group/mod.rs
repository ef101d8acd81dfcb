//! Exact group arithmetic: specs, backends, generating sets and subgroups.

mod element;
mod freenil;
mod genset;
mod handle;
mod schreier;
mod spec;

pub use element::Element;
pub use freenil::TruncatedAlgebra;
pub use genset::{symmetrize, GeneratingSet, SubgroupOracle};
pub use handle::{order_cap, unitriangular_element, GroupHandle, DEFAULT_ORDER_CAP};
pub use schreier::{reidemeister_schreier, SchreierData};
pub use spec::{GroupSpec, SymFpVariant};

pub(crate) use handle::permutation_is_even;

/// Deterministic injective byte encoding of an element.
pub fn canonical_encode(g: &Element) -> Vec<u8> {
    g.canonical_bytes()
}
