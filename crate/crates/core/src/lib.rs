//! Exact ED degrees and homotopy-continuation critical points for weighted
//! structured low-rank approximation.

pub mod chow;
pub mod eddegree;
pub mod error;
pub mod polyarith;
pub mod structured;
pub mod solver;
pub mod systems;

pub use error::{Error, Result};
