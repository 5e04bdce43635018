//! Core library for first-order constructor term rewriting systems.
//!
//! Provides the term algebra, program representation, deterministic and
//! non-deterministic memoized evaluation, the product path ordering, Max-Poly
//! interpretations over the nonnegative rationals, and set-valued
//! constructor-preserving interpretations.
//!
//! The crate is `no_std` (with `alloc`); parsing, file formats and the CLI
//! live in the companion `crtk` crate.

#![no_std]

extern crate alloc;

pub mod consfree;
pub mod engine;
mod fxhash;
pub mod maxpoly;
pub mod ppo;
pub mod program;
pub mod term;

pub use program::{Mode, Program, Rule, Signature, Symbol, SymbolId, SymbolKind};
pub use term::{Substitution, Term, TermOrder};
