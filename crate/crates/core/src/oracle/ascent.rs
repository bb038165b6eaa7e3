//! Log-space ascent shared by all oracles.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;

/// Value and partial derivatives of a log-ratio.
pub(crate) struct Grad {
    pub value: f64,
    pub d: Vec<f64>,
    /// Derivative of the log of the left-hand side alone, when the objective
    /// supports a fixed-point step.
    pub lhs: Option<Vec<f64>>,
}

/// A scale-invariant log-ratio over nonnegative vectors.
pub(crate) trait Objective: Sync {
    fn dim(&self) -> usize;
    /// Coordinates that may carry mass.
    fn allowed(&self, i: usize) -> bool;
    /// Log of the ratio; `-inf` when the left-hand side vanishes.
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Grad;
    /// Candidate from the stationarity condition, if the objective has one.
    fn power_step(&self, _x: &[f64], _grad: &Grad) -> Option<Vec<f64>> {
        None
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct AscentOptions {
    pub max_iter: usize,
    /// Stop once converged and a step gains less than this (relative).
    pub stop: f64,
    /// Background level added to the spike start.
    pub floor: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Ascent {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub trace: Vec<(usize, f64)>,
}

const QUIET_GAIN: f64 = 1e-3;

fn normalize(mut x: Vec<f64>) -> Vec<f64> {
    let m = x.iter().copied().fold(0.0, f64::max);
    if m > 0.0 && m.is_finite() {
        for v in &mut x {
            *v /= m;
        }
    }
    x
}

pub(crate) fn ascend<O: Objective>(obj: &O, x0: &[f64], opts: &AscentOptions) -> Ascent {
    let n = obj.dim();
    let mut x: Vec<f64> = (0..n).map(|i| if obj.allowed(i) { x0[i].max(0.0) } else { 0.0 }).collect();
    x = normalize(x);
    let mut grad = obj.gradient(&x);
    let mut val = grad.value;
    let mut trace = vec![(0, val.exp())];
    if !val.is_finite() {
        return Ascent { x, value: val, converged: false, trace };
    }
    let mut eta = 1.0f64;
    let mut quiet = 0;
    let mut converged = false;
    for it in 1..=opts.max_iter {
        let mut next: Option<(Vec<f64>, f64)> = None;
        if let Some(y) = obj.power_step(&x, &grad) {
            let vy = obj.value(&y);
            if vy > val {
                next = Some((y, vy));
            }
        }
        if next.is_none() {
            let g: Vec<f64> = (0..n)
                .map(|i| {
                    let gi = x[i] * grad.d[i];
                    if x[i] > 0.0 && gi.is_finite() {
                        gi
                    } else {
                        0.0
                    }
                })
                .collect();
            let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if gmax > 0.0 {
                while eta > 1e-12 {
                    let y: Vec<f64> = (0..n).map(|i| x[i] * (eta * g[i] / gmax).exp()).collect();
                    let vy = obj.value(&y);
                    if vy > val {
                        next = Some((y, vy));
                        eta = (eta * 2.0).min(8.0);
                        break;
                    }
                    eta *= 0.5;
                }
            }
        }
        let Some((y, vy)) = next else {
            converged = true;
            break;
        };
        let gain = (vy - val).exp_m1();
        x = normalize(y);
        grad = obj.gradient(&x);
        val = grad.value;
        trace.push((it, val.exp()));
        quiet = if gain < QUIET_GAIN { quiet + 1 } else { 0 };
        converged = quiet >= 3;
        if converged && gain < opts.stop {
            break;
        }
    }
    Ascent { x, value: val, converged, trace }
}

/// Spike scan, then ascent from the best spike and from every start; the
/// best result wins, ties going to the earliest start.
pub(crate) fn search<O: Objective>(obj: &O, random: &[Vec<f64>], opts: &AscentOptions) -> Ascent {
    let n = obj.dim();
    let spikes: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            if !obj.allowed(i) {
                return f64::NEG_INFINITY;
            }
            let mut x = vec![0.0; n];
            x[i] = 1.0;
            obj.value(&x)
        })
        .collect();
    let mut best_i = 0;
    for (i, &v) in spikes.iter().enumerate() {
        if v > spikes[best_i] {
            best_i = i;
        }
    }
    let mut spike = vec![0.0; n];
    spike[best_i] = 1.0;
    let mut starts = Vec::with_capacity(random.len() + 1);
    let mut seeded: Vec<f64> = (0..n).map(|i| if obj.allowed(i) { opts.floor } else { 0.0 }).collect();
    seeded[best_i] = 1.0;
    starts.push(seeded);
    starts.extend(random.iter().cloned());
    let runs: Vec<Ascent> = starts.par_iter().map(|x0| ascend(obj, x0, opts)).collect();

    let mut best = Ascent {
        x: spike,
        value: spikes[best_i],
        converged: runs[0].converged,
        trace: vec![(0, spikes[best_i].exp())],
    };
    for run in runs {
        if run.value > best.value {
            best = run;
        }
    }
    best
}

/// Seeded starting points: smooth bumps and rough uniform draws alternate.
pub(crate) fn random_starts(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            if k % 2 == 0 && n > 1 {
                let c = rng.random::<f64>() * n as f64;
                let width = (n as f64).powf(rng.random::<f64>());
                (0..n)
                    .map(|i| {
                        let z = (i as f64 + 0.5 - c) / width;
                        (-z * z).exp() + 1e-3 * rng.random::<f64>()
                    })
                    .collect()
            } else {
                (0..n).map(|_| 0.01 + rng.random::<f64>()).collect()
            }
        })
        .collect()
}
