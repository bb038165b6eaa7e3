//! Discretizing sequences of `W` and the geometric-sequence estimates.

pub mod lemmas;
pub mod sequence;

pub use lemmas::{
    check_dyadic_summation, check_geometric_equivalences, check_interval_equivalences, GeometricSeq,
    MonotoneFn, RatioReport,
};
pub use sequence::{build_discretizing_sequence, check_w_hypothesis, DiscretizingSequence};
