//! Exact, desk-scale computation of Gowers uniformity norms, restricted
//! arithmetic-progression counts, singular loci and Birch sets of homogeneous
//! polynomial maps `P: F_p^n -> F_p^R`, and greedy construction of linear
//! subspaces inside homogeneous varieties.
//!
//! Every quantity is computed by exhaustive enumeration over `F_p^n` (or
//! tuples of its points) within an explicit budget. Parallel sums use a fixed
//! reduction order, so results do not depend on the worker count.

pub mod apcount;
pub mod cli;
pub mod error;
pub mod exec;
pub mod ffcore;
pub mod gowers;
pub mod polymap;
pub mod report;
pub mod subspace;
pub mod suite;
pub mod variety;

pub use error::{Error, Result};
pub use exec::Exec;
