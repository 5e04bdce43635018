//! Toolkit for first-order constructor term rewriting systems: certificate
//! checking (path-ordering termination, Max-Poly and set-valued
//! interpretations), deterministic and non-deterministic memoized
//! evaluation, and a differential acceptance corpus.

pub mod acceptance;
pub mod cli;
pub mod fixtures;
pub mod oracle;
pub mod parse;
