//! Seeded random inputs for the geometric-sequence equivalences.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;

use crate::discretize::{
    build_discretizing_sequence, check_dyadic_summation, check_geometric_equivalences,
    check_interval_equivalences, GeometricSeq, MonotoneFn, RatioReport,
};
use crate::error::Result;
use crate::measure::WeightExpr;
use crate::problem::ProblemSpec;

/// Ratio bound of every random geometric sequence.
pub const LEMMA_RATIO: f64 = 0.5;
/// Level cap for the dyadic family; deeper levels approach the floating
/// resolution of finite endpoints.
pub const LEMMA_LEVELS: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaTrial {
    pub trial: usize,
    pub kind: &'static str,
    pub alpha: f64,
    pub report: RatioReport,
}

fn geometric(rng: &mut Xoshiro256PlusPlus, len: usize) -> Result<GeometricSeq> {
    let mut t = (rng.random::<f64>() * 4.0 - 2.0).exp();
    let mut terms = Vec::with_capacity(len);
    for _ in 0..len {
        terms.push(t);
        t *= 0.05 + (LEMMA_RATIO - 0.05) * rng.random::<f64>();
    }
    GeometricSeq::new(0, terms, LEMMA_RATIO)
}

fn alpha(rng: &mut Xoshiro256PlusPlus) -> f64 {
    (0.25f64.ln() + rng.random::<f64>() * (3.0f64 / 0.25).ln()).exp()
}

/// Three families per trial: sequence forms, interval forms, and the
/// dyadic summation along the discretizing sequence of `spec`'s `w`.
pub fn lemma_checks(spec: &ProblemSpec, trials: usize, seed: u64) -> Result<Vec<LemmaTrial>> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let w = &spec.weights.w;
    let seq = build_discretizing_sequence(w, &spec.interval, spec.k_max.min(LEMMA_LEVELS), &spec.quad)?;
    let mut out = Vec::with_capacity(3 * trials);
    for trial in 0..trials {
        let len = 2 + (rng.random::<f64>() * 10.0) as usize;
        let tau = geometric(&mut rng, len)?;
        let a: Vec<f64> = (0..len)
            .map(|_| if rng.random::<f64>() < 0.2 { 0.0 } else { rng.random::<f64>() })
            .collect();
        let al = alpha(&mut rng);
        out.push(LemmaTrial {
            trial,
            kind: "sequence",
            alpha: al,
            report: check_geometric_equivalences(&tau, &a, al)?,
        });

        let tau = geometric(&mut rng, len)?;
        let mut x = 0.05 + rng.random::<f64>();
        let mut points = vec![x];
        for _ in 0..len {
            x += 0.05 + rng.random::<f64>();
            points.push(x);
        }
        let g = WeightExpr::power(0.5 + rng.random::<f64>(), rng.random::<f64>() * 2.0 - 0.5);
        let mut s = 0.0;
        let sigma: Vec<f64> = (0..len)
            .map(|_| {
                s += 0.1 + rng.random::<f64>();
                s
            })
            .collect();
        let al = alpha(&mut rng);
        let use_sigma = rng.random::<f64>() < 0.5;
        out.push(LemmaTrial {
            trial,
            kind: "interval",
            alpha: al,
            report: check_interval_equivalences(&tau, &points, &g, al, use_sigma.then_some(&sigma[..]), &spec.quad)?,
        });

        let levels = seq.len();
        let start = seq.levels[(rng.random::<f64>() * (levels.saturating_sub(2)).min(6) as f64) as usize];
        let c = 0.5 + rng.random::<f64>();
        let h = match (rng.random::<f64>() * 4.0) as usize {
            0 => MonotoneFn::Constant(c),
            1 => {
                let j = 1 + (rng.random::<f64>() * (levels - 1) as f64) as usize;
                let at = seq.points[j.min(levels - 1)];
                MonotoneFn::Step {
                    at,
                    low: c,
                    high: c * (1.0 + 4.0 * rng.random::<f64>()),
                }
            }
            2 => MonotoneFn::Power {
                c,
                gamma: 2.0 * rng.random::<f64>(),
                t0: seq.points[0],
            },
            _ => MonotoneFn::TailPower {
                c,
                gamma: -2.0 * rng.random::<f64>(),
            },
        };
        let al = alpha(&mut rng);
        out.push(LemmaTrial {
            trial,
            kind: "dyadic",
            alpha: al,
            report: check_dyadic_summation(w, &seq, start, al, &h, &spec.quad)?,
        });
    }
    Ok(out)
}
