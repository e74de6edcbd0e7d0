//! F-automatic subsets of `Z^d`.
//!
//! Digit expansions `[x_0 x_1 ... x_m]_F = x_0 + F x_1 + ... + F^m x_m` over a
//! spanning set of digits, automata reading such expansions least significant
//! digit first, compilation of F-sets (points, F-cycles, invariant subgroups)
//! into those automata, sparseness of regular languages, and zero sets of
//! linear recurrences over function fields of characteristic `p`.

pub mod error;
pub mod fset;
pub mod automata;
pub mod group;
pub mod json;
pub mod sml;
pub mod spanning;
pub mod sparse;

pub use error::{Error, Result};
pub use group::{Endomorphism, GroupElement, Lattice};
pub use spanning::{SpanningSet, Word};
pub use automata::{Alphabet, Dfa};
