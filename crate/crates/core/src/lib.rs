//! Exact Ekedahl-Oort invariants in characteristic `p`.
//!
//! All arithmetic is exact over a user-chosen `F_{p^k}` with `p^k ≤ 2^20`.
//!
//! - [`field`]: finite fields and their elements.
//! - [`semilinear`]: matrices, Frobenius twists and subspaces.
//! - [`curves`]: hyperelliptic curves and Hasse-Witt matrices.
//! - [`dieudonne`]: mod-`p` Dieudonne modules, canonical filtrations and final types.
//! - [`eo_comb`]: final types, Young diagrams and rank partitions.
//! - [`stable`]: dual graphs of stable curves and their invariants.
//! - [`cli`]: the command functions behind the `eo` binary.
//!
//! The `examples/` directory has one runnable program per capability.

pub mod eo_comb;
pub mod field;
pub mod semilinear;
pub mod curves;
pub mod dieudonne;
pub mod stable;
pub mod cli;
