//! Robust recoverable 0-1 optimization with budgeted polyhedral cost
//! uncertainty: exact evaluation of a first-stage solution by constraint
//! generation, lower and upper bounds on the optimum, brute-force oracles,
//! and the LP/MIP kernels underneath.

pub mod bounds;
pub mod cutloop;
pub mod error;
pub mod experiment;
pub mod fixtures;
pub mod lp;
pub mod mip;
pub mod model;
pub mod oracle;
pub mod problems;
pub mod solvers;

pub use error::{Error, Result};
