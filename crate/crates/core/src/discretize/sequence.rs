use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::interval::IntervalSpec;
use crate::measure::quad::{integrate_with_breaks, QuadSettings};
use crate::measure::weight::WeightExpr;

/// Relative accuracy of `W(x_k) 2^k`.
pub const LEVEL_TOL: f64 = 1e-9;

/// Unit-coordinate resolution below which a level is not resolved.
const UNIT_RESOLUTION: f64 = 1e-13;

/// Points `x_k` with `W(x_k) = 2^{-k}`, built by bisection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscretizingSequence {
    /// Start index; `None` stands for `-inf`.
    #[serde(rename = "N")]
    pub n: Option<i64>,
    pub levels: Vec<i64>,
    #[serde(serialize_with = "crate::serde_util::ext_real_vec::serialize")]
    pub points: Vec<f64>,
    #[serde(rename = "W_values", serialize_with = "crate::serde_util::ext_real_vec::serialize")]
    pub w_values: Vec<f64>,
    /// Last level that was constructed.
    #[serde(rename = "K")]
    pub k: i64,
    pub truncated: bool,
    pub truncation: Vec<String>,
}

impl DiscretizingSequence {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index into `points` of level `k`.
    pub fn index_of(&self, k: i64) -> Option<usize> {
        let first = *self.levels.first()?;
        let i = usize::try_from(k - first).ok()?;
        (i < self.levels.len()).then_some(i)
    }

    pub fn point(&self, k: i64) -> Option<f64> {
        self.index_of(k).map(|i| self.points[i])
    }
}

/// Tail integral used during bisection: relative tolerance only, so that a
/// rescaled weight produces rescaled values with identical refinement.
pub(crate) struct TailEvaluator<'a> {
    w: &'a WeightExpr,
    breaks: Vec<f64>,
    b: f64,
    settings: QuadSettings,
}

impl<'a> TailEvaluator<'a> {
    pub(crate) fn new(w: &'a WeightExpr, interval: &IntervalSpec, settings: &QuadSettings) -> Self {
        let mut settings = settings.tightened(1e4);
        settings.abs_tol = f64::MIN_POSITIVE;
        TailEvaluator {
            w,
            breaks: w.breakpoints(),
            b: interval.b,
            settings,
        }
    }

    pub(crate) fn at(&self, x: f64) -> Result<f64> {
        if x >= self.b {
            return Ok(0.0);
        }
        match integrate_with_breaks(|t| self.w.value(t), x, self.b, &self.breaks, &self.settings) {
            Ok(i) if i.value.is_finite() => Ok(i.value),
            Ok(_) | Err(Error::Divergent { .. }) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    }
}

/// Checks `0 < W(t) < inf` on a set of interior probe points.
pub fn check_w_hypothesis(w: &WeightExpr, interval: &IntervalSpec, settings: &QuadSettings) -> Result<()> {
    let tail = TailEvaluator::new(w, interval, settings);
    for j in 1..16 {
        let x = interval.from_unit(j as f64 / 16.0);
        let val = tail.at(x)?;
        if !val.is_finite() {
            return Err(Error::DegenerateW(format!("W({x}) is infinite")));
        }
        if val <= 0.0 {
            return Err(Error::DegenerateW(format!("W({x}) = 0")));
        }
    }
    Ok(())
}

/// Dyadic level points of `W / scale`: `x_k` with `W(x_k) = scale 2^{-k}`.
#[derive(Debug, Clone)]
pub(crate) struct LevelPoints {
    pub levels: Vec<i64>,
    pub points: Vec<f64>,
    pub values: Vec<f64>,
    pub truncation: Vec<String>,
}

/// Solves `W(x) = target` by bisection in the unit coordinate on
/// `(s_lo, s_hi)`, where `W(s_lo) > target > W(s_hi)`. Returns `None` when
/// the level cannot be resolved in floating point.
fn solve_level(
    tail: &TailEvaluator,
    interval: &IntervalSpec,
    target: f64,
    k: i64,
    mut s_lo: f64,
    mut s_hi: f64,
    tol: f64,
) -> Result<Option<(f64, f64)>> {
    let mut w_lo = f64::INFINITY;
    let mut w_hi = 0.0;
    for _ in 0..200 {
        let s = 0.5 * (s_lo + s_hi);
        if s <= s_lo || s >= s_hi {
            return Ok(None);
        }
        let x = interval.from_unit(s);
        if !interval.contains_open(x) {
            return Ok(None);
        }
        let wx = tail.at(x)?;
        if wx.is_nan() || wx > w_lo || wx < w_hi {
            return Err(Error::BisectionFailure {
                k,
                reason: format!("W is not monotone near x = {x}"),
            });
        }
        if (wx / target - 1.0).abs() <= tol {
            return Ok(Some((x, wx)));
        }
        if wx > target {
            s_lo = s;
            w_lo = wx;
        } else {
            s_hi = s;
            w_hi = wx;
        }
        if s_hi - s_lo <= f64::EPSILON * s_hi.max(1e-300) {
            return Ok(None);
        }
    }
    Ok(None)
}

/// Levels `k_start < k <= k_max` to the right of a start point, and, when the
/// start is interior, levels `k >= -k_left` down towards `a`.
pub(crate) fn level_points(
    w: &WeightExpr,
    interval: &IntervalSpec,
    scale: f64,
    start: (i64, f64, f64),
    k_max: i64,
    k_left: Option<i64>,
    tol: f64,
    settings: &QuadSettings,
) -> Result<LevelPoints> {
    let tail = TailEvaluator::new(w, interval, settings);
    let (k0, x0, w0) = start;
    let mut truncation = Vec::new();

    let mut left: Vec<(i64, f64, f64)> = Vec::new();
    if let Some(k_min) = k_left {
        let mut s_hi = interval.to_unit(x0);
        let mut k = k0 - 1;
        loop {
            if k < k_min {
                truncation.push(format!("left truncation at level {}", k + 1));
                break;
            }
            let target = scale * 2f64.powi(-k as i32);
            match solve_level(&tail, interval, target, k, 0.0, s_hi, tol)? {
                Some((x, wx)) if interval.to_unit(x) > UNIT_RESOLUTION => {
                    s_hi = interval.to_unit(x);
                    left.push((k, x, wx));
                }
                _ => {
                    truncation.push(format!(
                        "left truncation at level {}: x_k - a below resolution",
                        k + 1
                    ));
                        break;
                }
            }
            k -= 1;
        }
    }
    left.reverse();

    let mut levels: Vec<i64> = left.iter().map(|l| l.0).collect();
    let mut points: Vec<f64> = left.iter().map(|l| l.1).collect();
    let mut values: Vec<f64> = left.iter().map(|l| l.2).collect();
    levels.push(k0);
    points.push(x0);
    values.push(w0);

    let mut s_lo = interval.to_unit(x0);
    for k in (k0 + 1)..=k_max {
        let target = scale * 2f64.powi(-k as i32);
        match solve_level(&tail, interval, target, k, s_lo, 1.0, tol)? {
            Some((x, wx)) => {
                s_lo = interval.to_unit(x);
                levels.push(k);
                points.push(x);
                values.push(wx);
            }
            None => {
                truncation.push(format!(
                    "right truncation at level {}: level {k} not resolvable in double precision",
                    k - 1
                ));
                break;
            }
        }
    }
    if levels.last() == Some(&k_max) {
        truncation.push(format!("right truncation at K_max = {k_max}"));
    }
    Ok(LevelPoints {
        levels,
        points,
        values,
        truncation,
    })
}

/// `N = floor(-log2 W(a+))`, snapped to the nearest integer when within
/// `1e-9`; `None` when `W(a+) = inf`.
pub(crate) fn start_index(w_a: f64) -> Option<i64> {
    if !w_a.is_finite() {
        return None;
    }
    let l = -w_a.log2();
    let r = l.round();
    if (l - r).abs() <= 1e-9 {
        Some(r as i64)
    } else {
        Some(l.floor() as i64)
    }
}

/// Builds the discretizing sequence of `W`, truncated at level `k_max`.
pub fn build_discretizing_sequence(
    w: &WeightExpr,
    interval: &IntervalSpec,
    k_max: usize,
    settings: &QuadSettings,
) -> Result<DiscretizingSequence> {
    check_w_hypothesis(w, interval, settings)?;
    let tail = TailEvaluator::new(w, interval, settings);
    let k_max = k_max as i64;
    let w_a = if interval.a.is_finite() {
        tail.at(interval.a)?
    } else {
        f64::INFINITY
    };
    let n = start_index(w_a);
    let pts = match n {
        Some(n) => level_points(w, interval, 1.0, (n, interval.a, w_a), k_max.max(n + 1), None, LEVEL_TOL, settings)?,
        None => {
            // anchor an interior level, then walk left towards `a`
            let mid = interval.from_unit(0.5);
            let w_mid = tail.at(mid)?;
            let k_mid = (-w_mid.log2()).ceil() as i64;
            let target = 2f64.powi(-k_mid as i32);
            let (x, wx) = solve_level(&tail, interval, target, k_mid, 0.0, 1.0, LEVEL_TOL)?.ok_or(
                Error::BisectionFailure {
                    k: k_mid,
                    reason: "interior level not resolvable".into(),
                },
            )?;
            level_points(w, interval, 1.0, (k_mid, x, wx), k_max.max(k_mid + 1), Some(-k_max), LEVEL_TOL, settings)?
        }
    };
    let truncated = !pts.truncation.is_empty();
    Ok(DiscretizingSequence {
        n,
        k: *pts.levels.last().unwrap_or(&0),
        levels: pts.levels,
        points: pts.points,
        w_values: pts.values,
        truncated,
        truncation: pts.truncation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s() -> QuadSettings {
        QuadSettings::default()
    }

    #[test]
    fn constant_weight_on_unit_interval() {
        let iv = IntervalSpec::new(0.0, 1.0).unwrap();
        let seq = build_discretizing_sequence(&WeightExpr::constant(1.0), &iv, 60, &s()).unwrap();
        assert_eq!(seq.n, Some(0));
        assert_eq!(seq.points[0], 0.0);
        for (k, x) in seq.levels.iter().zip(&seq.points).skip(1) {
            let expect = 1.0 - 2f64.powi(-*k as i32);
            assert!((x - expect).abs() <= 2e-9 * 2f64.powi(-*k as i32) + 4.0 * f64::EPSILON, "k={k}");
        }
        assert!(seq.truncated);
        assert!(seq.k >= 20);
    }

    #[test]
    fn exponential_weight_on_half_line() {
        let iv = IntervalSpec::new(0.0, f64::INFINITY).unwrap();
        let seq = build_discretizing_sequence(&WeightExpr::exp_scale(1.0, -1.0), &iv, 40, &s()).unwrap();
        assert_eq!(seq.n, Some(0));
        assert_eq!(seq.k, 40);
        for (k, x) in seq.levels.iter().zip(&seq.points).skip(1) {
            assert!((x - *k as f64 * std::f64::consts::LN_2).abs() < 1e-8, "k={k} x={x}");
        }
    }

    #[test]
    fn linear_weight_matches_closed_form_inverse() {
        let iv = IntervalSpec::new(0.0, 1.0).unwrap();
        let seq = build_discretizing_sequence(&WeightExpr::power(2.0, 1.0), &iv, 60, &s()).unwrap();
        assert_eq!(seq.n, Some(0));
        for (k, x) in seq.levels.iter().zip(&seq.points).skip(1) {
            let expect = (1.0 - 2f64.powi(-*k as i32)).sqrt();
            assert!((x - expect).abs() < 1e-8 * 2f64.powi(-*k as i32) + 1e-15, "k={k}");
        }
    }

    #[test]
    fn unbounded_tail_gives_minus_infinity_start() {
        let iv = IntervalSpec::new(0.0, 1.0).unwrap();
        let seq = build_discretizing_sequence(&WeightExpr::power(1.0, -2.0), &iv, 30, &s()).unwrap();
        assert_eq!(seq.n, None);
        assert!(seq.levels[0] < -10);
        assert!(seq.truncation.iter().any(|t| t.starts_with("left")));
        for w in seq.points.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn start_index_snaps() {
        assert_eq!(start_index(1.0), Some(0));
        assert_eq!(start_index(0.75), Some(0));
        assert_eq!(start_index(3.0), Some(-2));
        assert_eq!(start_index(0.25 * (1.0 + 1e-12)), Some(2));
        assert_eq!(start_index(f64::INFINITY), None);
    }

    #[test]
    fn infinite_total_mass_is_degenerate() {
        let iv = IntervalSpec::new(0.0, f64::INFINITY).unwrap();
        assert!(matches!(
            build_discretizing_sequence(&WeightExpr::constant(1.0), &iv, 20, &s()),
            Err(Error::DegenerateW(_))
        ));
    }
}
