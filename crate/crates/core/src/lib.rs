//! Computational toolkit for the toric degeneration of full flag manifolds to their
//! Gelfand-Cetlin toric varieties, and for the concentration of holomorphic sections onto
//! Bohr-Sommerfeld fibers.

// Negated comparisons are used deliberately so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod flag;
pub mod flow;
pub mod lab;
pub mod polytope;
pub mod toric;

pub use error::{Error, Result};
