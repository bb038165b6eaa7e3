use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An interval `(a, b)` with `-inf <= a < b <= inf`.
///
/// Every interval carries a monotone bijection onto `(0, 1)`: affine when
/// both ends are finite, `t = a + s/(1-s)` towards `+inf`, and the mirrored
/// map towards `-inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalSpec {
    #[serde(with = "crate::serde_util::ext_real")]
    pub a: f64,
    #[serde(with = "crate::serde_util::ext_real")]
    pub b: f64,
}

impl IntervalSpec {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let iv = IntervalSpec { a, b };
        iv.check()?;
        Ok(iv)
    }

    pub fn check(&self) -> Result<()> {
        if self.a.is_nan() || self.b.is_nan() || !(self.a < self.b) {
            return Err(Error::Range(format!(
                "interval needs a < b, got ({}, {})",
                self.a, self.b
            )));
        }
        if self.a == f64::INFINITY || self.b == f64::NEG_INFINITY {
            return Err(Error::Range("interval endpoints are reversed".into()));
        }
        Ok(())
    }

    pub fn is_bounded(&self) -> bool {
        self.a.is_finite() && self.b.is_finite()
    }

    pub fn contains_open(&self, t: f64) -> bool {
        self.a < t && t < self.b
    }

    /// Unit coordinate `s in [0, 1]` of the point `t`.
    pub fn to_unit(&self, t: f64) -> f64 {
        unit_coordinate(self.a, self.b, t)
    }

    /// Inverse of [`IntervalSpec::to_unit`].
    pub fn from_unit(&self, s: f64) -> f64 {
        from_unit_coordinate(self.a, self.b, s)
    }
}

pub(crate) fn unit_coordinate(a: f64, b: f64, t: f64) -> f64 {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => {
            if t <= a {
                0.0
            } else if t >= b {
                1.0
            } else {
                ((t - a) / (b - a)).clamp(0.0, 1.0)
            }
        }
        (true, false) => {
            if t == f64::INFINITY {
                1.0
            } else {
                let d = (t - a).max(0.0);
                d / (1.0 + d)
            }
        }
        (false, true) => {
            if t == f64::NEG_INFINITY {
                0.0
            } else {
                let d = (b - t).max(0.0);
                1.0 / (1.0 + d)
            }
        }
        (false, false) => {
            if t == f64::NEG_INFINITY {
                0.0
            } else if t == f64::INFINITY {
                1.0
            } else {
                // root in (0, 1) of t s^2 + (2 - t) s - 1 = 0
                (2.0 / (2.0 - t + (t * t + 4.0).sqrt())).clamp(0.0, 1.0)
            }
        }
    }
}

pub(crate) fn from_unit_coordinate(a: f64, b: f64, s: f64) -> f64 {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => {
            if s <= 0.0 {
                a
            } else if s >= 1.0 {
                b
            } else {
                let t = a + s * (b - a);
                t.clamp(a, b)
            }
        }
        (true, false) => {
            if s >= 1.0 {
                f64::INFINITY
            } else {
                a + s / (1.0 - s)
            }
        }
        (false, true) => {
            if s <= 0.0 {
                f64::NEG_INFINITY
            } else {
                b - (1.0 - s) / s
            }
        }
        (false, false) => {
            if s <= 0.0 {
                f64::NEG_INFINITY
            } else if s >= 1.0 {
                f64::INFINITY
            } else {
                (2.0 * s - 1.0) / (s * (1.0 - s))
            }
        }
    }
}

/// Jacobian `dt/ds` of [`from_unit_coordinate`].
pub(crate) fn unit_jacobian(a: f64, b: f64, s: f64) -> f64 {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => b - a,
        (true, false) => 1.0 / ((1.0 - s) * (1.0 - s)),
        (false, true) => 1.0 / (s * s),
        (false, false) => 1.0 / (s * s) + 1.0 / ((1.0 - s) * (1.0 - s)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_map_round_trips() {
        let cases = [
            (0.0, 1.0),
            (0.0, f64::INFINITY),
            (f64::NEG_INFINITY, 2.0),
            (f64::NEG_INFINITY, f64::INFINITY),
        ];
        for (a, b) in cases {
            for &s in &[0.01, 0.2, 0.5, 0.77, 0.99] {
                let t = from_unit_coordinate(a, b, s);
                let back = unit_coordinate(a, b, t);
                assert!((back - s).abs() < 1e-12, "({a},{b}) s={s} t={t} back={back}");
            }
        }
    }

    #[test]
    fn rejects_reversed() {
        assert!(IntervalSpec::new(1.0, 0.0).is_err());
        assert!(IntervalSpec::new(0.0, 0.0).is_err());
        assert!(IntervalSpec::new(f64::NEG_INFINITY, f64::INFINITY).is_ok());
    }
}
