//! Sequentially generated qudit states and their temporal counterparts.
//!
//! Any open-boundary matrix product state whose bond dimension does not
//! exceed the local dimension can be prepared by a staircase of two-qudit
//! unitaries. Every gate of that staircase followed by a projective
//! measurement is equivalent to a generalized measurement on a single
//! carrier, so the joint statistics of local measurements on the whole chain
//! are reproduced by a sequence of instruments acting on one qudit.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: dense complex linear algebra (Kronecker products,
//!   one-sided Jacobi SVD, isometry completion) and register helpers.
//! - [`mps`]: matrix product states, Schmidt ranks and the generation
//!   staircase.
//! - [`spatial`]: the exact Born-rule oracle on the full state.
//! - [`temporal`]: instruments derived from generation unitaries, the
//!   single-carrier chain simulator and the projective-qubit factorization.
//! - [`lattice`]: two-dimensional lattices mapped onto slice carriers.
//! - [`mbqc`]: one-way computing driven by a repeated 1D-cluster gate.
//!
//! Data-parallel inner loops (branch enumeration, setting sweeps) go through
//! [`par::Exec`]. With the default `parallel` feature they run on rayon;
//! without it everything is sequential.

pub mod config;
pub mod error;
pub mod lattice;
pub mod mbqc;
pub mod mps;
pub mod numerics;
pub mod par;
pub mod random;
pub mod spatial;
pub mod temporal;

pub use config::Tolerances;
pub use error::{Error, Result};
pub use numerics::{CMatrix, C64};
pub use par::Exec;
