//! Critical exponents of strongly separated free-group representations into
//! `SL(2, R)` and `SL(3, R)`, estimated through thermodynamic formalism on
//! geodesic codings.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod automaton;
pub mod pants;
pub mod pressure;
pub mod prox;
pub mod rep;
pub mod weyl;

pub use automaton::{builtin_f2_abc, builtin_f2_standard, GraphJson, GroupWord, LabeledGraph, Letter};
pub use pants::{holonomy, shear_family, FGParams, PantsHolonomy};
pub use pressure::{PressureResult, BLOCK_BUDGET};
pub use prox::{GroupMatrix, SquareMatrix};
pub use rep::{ExponentReport, Representation, RepresentationJson, SeparationCertificate, ThurstonEstimate};
pub use weyl::{CartanVector, Functional, FunctionalSpec};
