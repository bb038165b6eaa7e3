//! Weights, quadrature and the basic weight functionals `W` and `V_p`.

pub mod functional;
pub mod interval;
pub mod mesh;
pub mod quad;
pub mod weight;

pub use functional::{ess_sup, ess_sup_with_breaks, tail_w, v_p};
pub use interval::IntervalSpec;
pub use mesh::{Mesh, MeshPlan};
pub use quad::{integrate, integrate_with_breaks, GaussRule, Integral, QuadSettings};
pub use weight::{eval_weight, Piece, WeightExpr};
