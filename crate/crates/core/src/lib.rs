//! Weight characterizations of iterated Hardy-type inequalities, with an
//! independent brute-force estimator of the best constants.

pub mod constants;
pub mod discretize;
pub mod error;
pub mod measure;
pub mod oracle;
pub mod problem;
pub mod report;
mod serde_util;

pub use error::{Error, Result};
pub use problem::{ExponentSet, ProblemSpec, Weights};
