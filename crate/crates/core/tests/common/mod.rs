#![allow(dead_code)]

use hardy_cert::measure::{IntervalSpec, WeightExpr};
use hardy_cert::{ExponentSet, ProblemSpec, Weights};

pub struct SuiteSpec {
    pub label: String,
    pub spec: ProblemSpec,
}

fn power_spec(p: f64, q: f64, r: f64, beta: f64, alphas: [f64; 3]) -> ProblemSpec {
    ProblemSpec::new(
        IntervalSpec::new(0.0, 1.0).unwrap(),
        ExponentSet::new(p, q, r, beta).unwrap(),
        Weights {
            u: WeightExpr::power(1.0, alphas[0]),
            v: WeightExpr::power(1.0, alphas[1]),
            w: WeightExpr::power(1.0, alphas[2]),
        },
    )
    .unwrap()
}

/// Twelve power-weight problems on (0, 1), three per regime.
pub fn power_suite(beta: f64) -> Vec<SuiteSpec> {
    let h = -0.5;
    let rows: [((f64, f64, f64), [f64; 3]); 12] = [
        ((1.0, 1.0, 1.0), [h, 0.0, 1.0]),
        ((2.0, 3.0, 2.0), [0.0, h, h]),
        ((1.0, 2.0, 3.0), [1.0, h, 0.0]),
        ((2.0, 2.0, 1.0), [h, 0.0, 1.0]),
        ((3.0, 3.0, 2.0), [0.0, 1.0, h]),
        ((2.0, 3.0, 1.0), [1.0, h, 0.0]),
        ((2.0, 1.0, 2.0), [h, h, 0.0]),
        ((3.0, 2.0, 3.0), [0.0, 1.0, 1.0]),
        ((2.0, 1.0, 3.0), [1.0, 0.0, h]),
        ((2.0, 1.0, 1.0), [h, 0.0, h]),
        ((3.0, 2.0, 1.0), [1.0, 1.0, 0.0]),
        ((3.0, 1.0, 2.0), [0.0, h, 1.0]),
    ];
    rows.iter()
        .map(|&((p, q, r), a)| SuiteSpec {
            label: format!("p={p} q={q} r={r} u=t^{} v=t^{} w=t^{}", a[0], a[1], a[2]),
            spec: power_spec(p, q, r, beta, a),
        })
        .collect()
}
