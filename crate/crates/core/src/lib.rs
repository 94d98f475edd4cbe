//! Solver core for the time-fractional Klein-Kramers equation on the unit
//! square.
//!
//! Time is discretised with backward-Euler convolution quadrature (CQ) and
//! phase space with a local discontinuous Galerkin (LDG) method on uniform
//! rectangular meshes using tensor Legendre modes.
//!
//! The crate is `no_std` (it needs `alloc`) and performs no IO. File formats,
//! the command line and parallel study orchestration live in `fkk-cli`.
//!
//! ```
//! use fkk_core::{problems, study};
//!
//! let problem = problems::example2(0.5).unwrap();
//! let run = fkk_core::ldg::run(&problem, 4, 1, 0.05, 1.0).unwrap();
//! let err = study::l2_error_exact(run.last(), |x, v| problem.exact_at(x, v, 1.0).unwrap());
//! assert!(err < 0.2);
//! ```
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod basis;
pub mod cq;
mod error;
pub mod field;
pub mod ldg;
pub mod mesh;
pub mod problems;
pub mod projection;
pub mod quadrature;
pub mod sparse;
pub mod study;

pub use basis::{legendre_eval, Basis};
pub use cq::{history_combination, CqWeights};
pub use error::{Error, Result};
pub use field::{DgField, FieldLayout};
pub use ldg::{LdgSystem, Trajectory};
pub use mesh::Mesh2D;
pub use problems::{DataTransfer, ProblemId, ProblemSpec};
pub use quadrature::{gauss_rule, QuadRule};
pub use study::ConvergenceTable;
