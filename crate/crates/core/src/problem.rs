use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{IntervalSpec, QuadSettings, WeightExpr};

/// Exponents `p, q, r` and the auxiliary parameter `beta < 1`.
///
/// `p < 1` is representable: the monotone inequality admits it, and the main
/// inequality turns it into a degenerate verdict instead of a parse failure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentSet {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub beta: f64,
}

impl ExponentSet {
    pub fn new(p: f64, q: f64, r: f64, beta: f64) -> Result<Self> {
        let e = ExponentSet { p, q, r, beta };
        e.check()?;
        Ok(e)
    }

    pub fn check(&self) -> Result<()> {
        for (name, val) in [("p", self.p), ("q", self.q), ("r", self.r)] {
            if !(val > 0.0 && val.is_finite()) {
                return Err(Error::Range(format!("{name} must be a positive finite number, got {val}")));
            }
        }
        if !(self.beta < 1.0) || !self.beta.is_finite() {
            return Err(Error::Range(format!("beta must be < 1, got {}", self.beta)));
        }
        Ok(())
    }

    /// The main inequality needs `p >= 1`.
    pub fn require_main(&self) -> Result<()> {
        if self.p < 1.0 {
            return Err(Error::TrivialRegime { p: self.p });
        }
        Ok(())
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        ExponentSet::new(self.p, self.q, self.r, beta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Weights {
    pub u: WeightExpr,
    pub v: WeightExpr,
    pub w: WeightExpr,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemSpec {
    pub interval: IntervalSpec,
    pub exponents: ExponentSet,
    pub weights: Weights,
    pub quad: QuadSettings,
    pub k_max: usize,
}

pub const DEFAULT_K_MAX: usize = 60;

impl ProblemSpec {
    pub fn new(interval: IntervalSpec, exponents: ExponentSet, weights: Weights) -> Result<Self> {
        let spec = ProblemSpec {
            interval,
            exponents,
            weights,
            quad: QuadSettings::default(),
            k_max: DEFAULT_K_MAX,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Constant weights `u = v = w = 1` on `(0, 1)`.
    pub fn unit(p: f64, q: f64, r: f64, beta: f64) -> Result<Self> {
        ProblemSpec::new(
            IntervalSpec::new(0.0, 1.0)?,
            ExponentSet::new(p, q, r, beta)?,
            Weights {
                u: WeightExpr::constant(1.0),
                v: WeightExpr::constant(1.0),
                w: WeightExpr::constant(1.0),
            },
        )
    }

    pub fn validate(&self) -> Result<()> {
        self.interval.check()?;
        self.exponents.check()?;
        self.quad.validate()?;
        if !(8..=200).contains(&self.k_max) {
            return Err(Error::Range(format!("k_max must lie in [8, 200], got {}", self.k_max)));
        }
        if !self.weights.u.is_zero() {
            self.weights.u.validate(&self.interval)?;
        }
        self.weights.v.validate(&self.interval)?;
        self.weights.w.validate(&self.interval)?;
        Ok(())
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        let mut s = self.clone();
        s.exponents = self.exponents.with_beta(beta)?;
        Ok(s)
    }

    pub fn with_weights(&self, u: WeightExpr, v: WeightExpr, w: WeightExpr) -> Self {
        let mut s = self.clone();
        s.weights = Weights { u, v, w };
        s
    }

    pub fn scale_u(&self, lambda: f64) -> Self {
        let mut s = self.clone();
        s.weights.u = s.weights.u.scaled(lambda);
        s
    }

    pub fn scale_v(&self, lambda: f64) -> Self {
        let mut s = self.clone();
        s.weights.v = s.weights.v.scaled(lambda);
        s
    }

    pub fn scale_w(&self, lambda: f64) -> Self {
        let mut s = self.clone();
        s.weights.w = s.weights.w.scaled(lambda);
        s
    }

    /// Union of breakpoints of all three weights.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.weights.u.breakpoints();
        b.extend(self.weights.v.breakpoints());
        b.extend(self.weights.w.breakpoints());
        b.retain(|&t| self.interval.contains_open(t));
        b.sort_by(|x, y| x.total_cmp(y));
        b.dedup();
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_bounds() {
        assert!(ExponentSet::new(1.0, 1.0, 1.0, 0.0).is_ok());
        assert!(matches!(
            ExponentSet::new(1.0, 1.0, 1.0, 1.5),
            Err(Error::Range(m)) if m.contains("beta must be < 1")
        ));
        assert!(ExponentSet::new(1.0, 0.0, 1.0, 0.0).is_err());
        let low = ExponentSet::new(0.5, 1.0, 1.0, 0.0).unwrap();
        assert!(matches!(low.require_main(), Err(Error::TrivialRegime { .. })));
    }

    #[test]
    fn scaling_touches_one_weight() {
        let s = ProblemSpec::unit(1.0, 1.0, 1.0, 0.0).unwrap();
        let t = s.scale_w(3.0);
        assert_eq!(t.weights.w.value(0.5), 3.0);
        assert_eq!(t.weights.u.value(0.5), 1.0);
    }
}
