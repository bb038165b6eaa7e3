//! Finite-sequence ratios of the discrete embedding and Hardy inequalities.

use super::ascent::{Grad, Objective};
use crate::constants::SeqWeights;

/// `(sum a^q v^q)^{1/q} / (sum a^p w^p)^{1/p}`, in logs.
pub(crate) struct Embedding<'a> {
    pub sw: &'a SeqWeights,
    pub p: f64,
    pub q: f64,
}

impl Embedding<'_> {
    fn sums(&self, x: &[f64]) -> (f64, f64) {
        let mut top = 0.0;
        let mut bottom = 0.0;
        for k in 0..x.len() {
            if x[k] > 0.0 {
                top += (x[k] * self.sw.a[k]).powf(self.q);
                bottom += (x[k] * self.sw.b[k]).powf(self.p);
            }
        }
        (top, bottom)
    }
}

fn log_ratio(top: f64, bottom: f64, p: f64, q: f64) -> f64 {
    if top <= 0.0 {
        return f64::NEG_INFINITY;
    }
    top.ln() / q - bottom.ln() / p
}

impl Objective for Embedding<'_> {
    fn dim(&self) -> usize {
        self.sw.len()
    }

    fn allowed(&self, i: usize) -> bool {
        self.sw.a[i] > 0.0
    }

    fn value(&self, x: &[f64]) -> f64 {
        let (t, b) = self.sums(x);
        log_ratio(t, b, self.p, self.q)
    }

    fn gradient(&self, x: &[f64]) -> Grad {
        let (t, b) = self.sums(x);
        let value = log_ratio(t, b, self.p, self.q);
        let d = (0..x.len())
            .map(|k| {
                if x[k] <= 0.0 || !value.is_finite() {
                    return 0.0;
                }
                let up = self.sw.a[k].powf(self.q) * x[k].powf(self.q - 1.0) / t;
                let down = self.sw.b[k].powf(self.p) * x[k].powf(self.p - 1.0) / b;
                up - down
            })
            .collect();
        Grad { value, d, lhs: None }
    }
}

/// `(sum_k (sum_{i<=k} x_i b_i)^q a_k)^{1/q} / (sum x^p)^{1/p}`, in logs.
pub(crate) struct Hardy<'a> {
    pub sw: &'a SeqWeights,
    pub p: f64,
    pub q: f64,
}

impl Hardy<'_> {
    fn partials(&self, x: &[f64]) -> Vec<f64> {
        let mut acc = 0.0;
        x.iter()
            .zip(&self.sw.b)
            .map(|(xi, bi)| {
                acc += xi * bi;
                acc
            })
            .collect()
    }

    fn sums(&self, s: &[f64], x: &[f64]) -> (f64, f64) {
        let top = s
            .iter()
            .zip(&self.sw.a)
            .map(|(&sk, &ak)| if sk > 0.0 { sk.powf(self.q) * ak } else { 0.0 })
            .sum();
        let bottom = x.iter().map(|&xi| if xi > 0.0 { xi.powf(self.p) } else { 0.0 }).sum();
        (top, bottom)
    }
}

impl Objective for Hardy<'_> {
    fn dim(&self) -> usize {
        self.sw.len()
    }

    fn allowed(&self, i: usize) -> bool {
        self.sw.b[i] > 0.0
    }

    fn value(&self, x: &[f64]) -> f64 {
        let s = self.partials(x);
        let (t, b) = self.sums(&s, x);
        log_ratio(t, b, self.p, self.q)
    }

    fn gradient(&self, x: &[f64]) -> Grad {
        let n = x.len();
        let s = self.partials(x);
        let (t, b) = self.sums(&s, x);
        let value = log_ratio(t, b, self.p, self.q);
        let mut d = vec![0.0; n];
        if value.is_finite() {
            let mut suffix = 0.0;
            for i in (0..n).rev() {
                if s[i] > 0.0 {
                    suffix += self.sw.a[i] * s[i].powf(self.q - 1.0);
                }
                if x[i] > 0.0 {
                    d[i] = self.sw.b[i] * suffix / t - x[i].powf(self.p - 1.0) / b;
                }
            }
        }
        Grad { value, d, lhs: None }
    }
}
