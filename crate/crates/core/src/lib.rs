//! Local and global solubility of diagonal Thue equations `ax^k + by^k = 1`
//! and Fermat equations `ax^k + by^k + cz^k = 0`.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: exact integer and modular primitives (primality, Jacobi
//!   symbols, k-th power residues, p-adic unit powers).
//! * [`localsolve`]: decision procedures over the reals and every `Z_p`,
//!   producing replayable Hensel witnesses and solubility certificates.
//! * [`families`]: prime pairs and triples whose equations are everywhere
//!   locally soluble by construction.
//! * [`globalsearch`]: bounded integer solution search, solution-major
//!   counting, coefficient lattices and abc quality.
//! * [`census`]: counts of locally and globally soluble equations up to a
//!   coefficient height, plus CSV/JSON export.
//!
//! Sweeps run on rayon when the `parallel` feature is enabled (the default);
//! without it every [`Parallelism`] setting degrades to a sequential loop.

pub mod arith;
pub mod census;
mod error;
pub mod families;
pub mod globalsearch;
pub mod localsolve;
mod par;

pub use error::{Error, Result};
pub use par::Parallelism;

/// Version string embedded in every exported artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
