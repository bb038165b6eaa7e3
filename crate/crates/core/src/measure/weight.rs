use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::interval::IntervalSpec;

/// One piece of a piecewise weight: `expr` applies on `(lo, hi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Piece {
    #[serde(with = "crate::serde_util::ext_real")]
    pub lo: f64,
    #[serde(with = "crate::serde_util::ext_real")]
    pub hi: f64,
    pub expr: WeightExpr,
}

/// Symbolic weight descriptor. All forms are piecewise continuous, which is
/// what makes the essential supremum computable as an ordinary supremum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightExpr {
    /// `c * t^alpha`
    Power { c: f64, alpha: f64 },
    /// `c * exp(lambda * t)`
    ExpScale { c: f64, lambda: f64 },
    /// `c * |t - t0|^alpha`
    ShiftedPower { c: f64, alpha: f64, t0: f64 },
    Piecewise(Vec<Piece>),
    Product(Vec<WeightExpr>),
}

impl WeightExpr {
    pub fn constant(c: f64) -> Self {
        WeightExpr::Power { c, alpha: 0.0 }
    }

    pub fn power(c: f64, alpha: f64) -> Self {
        WeightExpr::Power { c, alpha }
    }

    /// The zero weight; admitted only as `u`, where it makes every constant
    /// vanish.
    pub fn zero() -> Self {
        WeightExpr::Power { c: 0.0, alpha: 0.0 }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, WeightExpr::Power { c, alpha } if *c == 0.0 && *alpha == 0.0)
    }

    pub fn exp_scale(c: f64, lambda: f64) -> Self {
        WeightExpr::ExpScale { c, lambda }
    }

    /// Raw pointwise value. Returns NaN outside the domain of a piecewise
    /// descriptor; callers on hot paths validate the descriptor once instead
    /// of checking every evaluation.
    pub fn value(&self, t: f64) -> f64 {
        match self {
            WeightExpr::Power { c, alpha } => {
                if *alpha == 0.0 {
                    *c
                } else {
                    c * t.powf(*alpha)
                }
            }
            WeightExpr::ExpScale { c, lambda } => c * (lambda * t).exp(),
            WeightExpr::ShiftedPower { c, alpha, t0 } => c * (t - t0).abs().powf(*alpha),
            WeightExpr::Piecewise(pieces) => match locate_piece(pieces, t) {
                Some(p) => p.expr.value(t),
                None => f64::NAN,
            },
            WeightExpr::Product(factors) => factors.iter().map(|f| f.value(t)).product(),
        }
    }

    /// Checked evaluation.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::OutOfDomain { t });
        }
        if let WeightExpr::Piecewise(pieces) = self {
            if locate_piece(pieces, t).is_none() {
                return Err(Error::OutOfDomain { t });
            }
        }
        let v = self.value(t);
        if v.is_nan() {
            return Err(Error::OutOfDomain { t });
        }
        if v <= 0.0 || !v.is_finite() {
            return Err(Error::NonPositive { t, value: v });
        }
        Ok(v)
    }

    /// Points where the descriptor may be non-smooth: piece boundaries and
    /// centres of shifted powers.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_breakpoints(&mut out);
        out.retain(|x| x.is_finite());
        out.sort_by(|a, b| a.total_cmp(b));
        out.dedup();
        out
    }

    fn collect_breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            WeightExpr::Power { .. } | WeightExpr::ExpScale { .. } => {}
            WeightExpr::ShiftedPower { t0, .. } => out.push(*t0),
            WeightExpr::Piecewise(pieces) => {
                for p in pieces {
                    out.push(p.lo);
                    out.push(p.hi);
                    p.expr.collect_breakpoints(out);
                }
            }
            WeightExpr::Product(factors) => {
                for f in factors {
                    f.collect_breakpoints(out);
                }
            }
        }
    }

    /// `lambda * self`, folded into the leading coefficient.
    pub fn scaled(&self, lambda: f64) -> WeightExpr {
        match self {
            WeightExpr::Power { c, alpha } => WeightExpr::Power {
                c: c * lambda,
                alpha: *alpha,
            },
            WeightExpr::ExpScale { c, lambda: l } => WeightExpr::ExpScale {
                c: c * lambda,
                lambda: *l,
            },
            WeightExpr::ShiftedPower { c, alpha, t0 } => WeightExpr::ShiftedPower {
                c: c * lambda,
                alpha: *alpha,
                t0: *t0,
            },
            WeightExpr::Piecewise(pieces) => WeightExpr::Piecewise(
                pieces
                    .iter()
                    .map(|p| Piece {
                        lo: p.lo,
                        hi: p.hi,
                        expr: p.expr.scaled(lambda),
                    })
                    .collect(),
            ),
            WeightExpr::Product(factors) => {
                let mut fs = factors.clone();
                match fs.first_mut() {
                    Some(first) => *first = first.scaled(lambda),
                    None => fs.push(WeightExpr::constant(lambda)),
                }
                WeightExpr::Product(fs)
            }
        }
    }

    /// Structural validation against an interval: coefficients finite,
    /// pieces tiling the interval, and positivity at a set of probe points.
    pub fn validate(&self, interval: &IntervalSpec) -> Result<()> {
        self.validate_structure(interval.a, interval.b)?;
        for i in 1..64 {
            let t = interval.from_unit(i as f64 / 64.0);
            if self.breakpoints().contains(&t) {
                continue;
            }
            self.eval(t)?;
        }
        Ok(())
    }

    fn validate_structure(&self, lo: f64, hi: f64) -> Result<()> {
        match self {
            WeightExpr::Power { c, alpha } | WeightExpr::ShiftedPower { c, alpha, .. } => {
                if !c.is_finite() || *c <= 0.0 || !alpha.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "power weight needs c > 0 and finite alpha, got c = {c}, alpha = {alpha}"
                    )));
                }
                if let WeightExpr::Power { alpha, .. } = self {
                    if *alpha != 0.0 && lo < 0.0 {
                        return Err(Error::InvalidArgument(format!(
                            "t^{alpha} is not positive on an interval reaching {lo} < 0"
                        )));
                    }
                }
            }
            WeightExpr::ExpScale { c, lambda } => {
                if !c.is_finite() || *c <= 0.0 || !lambda.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "exponential weight needs c > 0 and finite lambda, got c = {c}, lambda = {lambda}"
                    )));
                }
            }
            WeightExpr::Piecewise(pieces) => {
                if pieces.is_empty() {
                    return Err(Error::InvalidArgument("piecewise weight with no pieces".into()));
                }
                if pieces[0].lo != lo || pieces[pieces.len() - 1].hi != hi {
                    return Err(Error::InvalidArgument(format!(
                        "pieces must tile ({lo}, {hi}) exactly"
                    )));
                }
                for w in pieces.windows(2) {
                    if w[0].hi != w[1].lo {
                        return Err(Error::InvalidArgument(format!(
                            "gap or overlap between pieces at {} / {}",
                            w[0].hi, w[1].lo
                        )));
                    }
                }
                for p in pieces {
                    if !(p.lo < p.hi) {
                        return Err(Error::InvalidArgument(format!(
                            "empty piece ({}, {})",
                            p.lo, p.hi
                        )));
                    }
                    p.expr.validate_structure(p.lo, p.hi)?;
                }
            }
            WeightExpr::Product(factors) => {
                if factors.is_empty() {
                    return Err(Error::InvalidArgument("empty product weight".into()));
                }
                for f in factors {
                    f.validate_structure(lo, hi)?;
                }
            }
        }
        Ok(())
    }
}

fn locate_piece(pieces: &[Piece], t: f64) -> Option<&Piece> {
    let last = pieces.len().checked_sub(1)?;
    pieces
        .iter()
        .enumerate()
        .find(|(i, p)| p.lo <= t && (t < p.hi || (*i == last && t <= p.hi)))
        .map(|(_, p)| p)
}

/// Checked point evaluation of a weight descriptor.
pub fn eval_weight(expr: &WeightExpr, t: f64) -> Result<f64> {
    expr.eval(t)
}
