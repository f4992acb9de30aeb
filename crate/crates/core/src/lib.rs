//! Generating sets of powers of finite algebras.
//!
//! A finite algebra either has polynomially generated powers (PGP) or
//! exponentially generated powers (EGP). This crate computes the objects
//! needed to tell the two apart at desk scale:
//!
//! * [`algebra`]: operation tables, parsing and evaluation.
//! * [`tuples`] and [`closure`]: extensional subsets of `A^n` and the
//!   generated subpower `<X>` as a worklist fixed point.
//! * [`criteria`]: the idempotent decision procedure via αβ-projectivity,
//!   bounded `D_{A,m}` and switchability checks, and generating-set growth.
//! * [`witnesses`]: nice relations, the σ relation of arity `2n+k`,
//!   non-preservation counterexamples, the counting lower bound and
//!   bounded blocker search.
//! * [`cli`]: the command-line front end.

pub mod algebra;
pub mod cli;
pub mod closure;
pub mod corpus;
pub mod criteria;
mod error;
pub mod limits;
pub mod tuples;
pub mod witnesses;

pub use algebra::{parse_algebra, Algebra, Element, OperationTable};
pub use closure::{apply_pointwise, closure, closure_with, d_tuples, is_full, Subpower};
pub use error::{Error, Result};
pub use limits::Limits;
pub use tuples::TupleSet;
