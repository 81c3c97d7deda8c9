//! Pure parsimony xor haplotyping: models, reductions, exact and heuristic
//! solvers, and graph realization.

pub mod bench;
pub mod bitlin;
pub mod error;
pub mod fpt;
pub mod generate;
pub mod graphreal;
pub mod heuristic;
pub mod io;
pub mod model;
pub mod oracle;
pub mod poly;
pub mod reduce;

pub use error::{Error, Result};
