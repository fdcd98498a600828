//! A workbench for a polymorphic session π-calculus and a linear System F.
//!
//! The crate provides, for both calculi: parsers and printers, type checkers
//! producing replayable derivations, operational semantics (a labelled
//! transition system with structural congruence on the process side, full
//! β-reduction with commuting conversions on the term side), the two
//! mutually inverse encodings between the calculi together with their
//! value-passing and higher-order extensions, the initial-algebra /
//! final-coalgebra constructions with the natural-number and stream example
//! suites, and a theorem harness that checks the operational correspondence,
//! inverse and normalisation properties over a corpus at desk scale.

pub mod names;
pub mod types;
pub mod ast;
pub mod algebra;
pub mod bisim;
pub mod congruence;
pub mod encode;
pub mod extred;
pub mod fsem;
pub mod ftyping;
pub mod lts;
pub mod judgment;
pub mod parse;
pub mod pityping;
pub mod print;

pub use ast::{Process, Term};
pub use names::{Name, NameGen};
pub use types::Ty;
