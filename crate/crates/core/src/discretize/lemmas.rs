//! Two-sided checks of the sup/sum interchange estimates for geometrically
//! decreasing weights. Each check reports both sides and the explicit
//! constants `lower <= LHS/RHS <= upper` implied by the ratio bound.

use serde::Serialize;

use crate::discretize::sequence::DiscretizingSequence;
use crate::error::{Error, Result};
use crate::measure::functional::ess_sup_with_breaks;
use crate::measure::quad::{integrate_with_breaks, QuadSettings};
use crate::measure::weight::WeightExpr;

/// Relative slack applied to the explicit constants.
const SLACK: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometricSeq {
    pub start: i64,
    pub terms: Vec<f64>,
    pub ratio_bound: f64,
}

impl GeometricSeq {
    pub fn new(start: i64, terms: Vec<f64>, ratio_bound: f64) -> Result<Self> {
        if !(ratio_bound > 0.0 && ratio_bound < 1.0) {
            return Err(Error::Range(format!("ratio bound must lie in (0, 1), got {ratio_bound}")));
        }
        if terms.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
            return Err(Error::InvalidArgument("geometric sequence terms must be positive".into()));
        }
        let seq = GeometricSeq {
            start,
            terms,
            ratio_bound,
        };
        if seq.observed_ratio() > ratio_bound * (1.0 + 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "sequence ratio {} exceeds the bound {ratio_bound}",
                seq.observed_ratio()
            )));
        }
        Ok(seq)
    }

    /// `2^{-k}` for `k = start .. start + len`.
    pub fn dyadic(start: i64, len: usize) -> Self {
        let terms = (0..len).map(|j| 2f64.powi(-((start + j as i64) as i32))).collect();
        GeometricSeq {
            start,
            terms,
            ratio_bound: 0.5,
        }
    }

    pub fn observed_ratio(&self) -> f64 {
        self.terms
            .windows(2)
            .map(|w| w[1] / w[0])
            .fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceRatio {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub lower: f64,
    pub upper: f64,
    pub holds: bool,
}

impl EquivalenceRatio {
    fn new(name: &str, lhs: f64, rhs: f64, lower: f64, upper: f64) -> Self {
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs == 0.0 {
            1.0
        } else {
            f64::INFINITY
        };
        let holds = lhs >= lower * rhs * (1.0 - SLACK) - f64::MIN_POSITIVE
            && lhs <= upper * rhs * (1.0 + SLACK) + f64::MIN_POSITIVE;
        EquivalenceRatio {
            name: name.to_string(),
            lhs,
            rhs,
            ratio,
            lower,
            upper,
            holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub entries: Vec<EquivalenceRatio>,
}

impl RatioReport {
    pub fn all_hold(&self) -> bool {
        self.entries.iter().all(|e| e.holds)
    }

    pub fn get(&self, name: &str) -> Option<&EquivalenceRatio> {
        self.entries.iter().find(|e| e.name == name)
    }
}

/// Upper constant of `sup_k tau_k sum_{i<=k} a_i <= c sup_k tau_k a_k`.
pub fn sup_sum_constant(rho: f64) -> f64 {
    1.0 / (1.0 - rho)
}

/// Upper constant of `sum_k tau_k (sum_{i<=k} a_i)^alpha <= c sum_k tau_k a_k^alpha`.
pub fn sum_sum_constant(rho: f64, alpha: f64) -> f64 {
    if alpha <= 1.0 {
        1.0 / (1.0 - rho)
    } else {
        let delta = 1.0 / (2.0 * (alpha - 1.0));
        (1.0 - rho.powf(delta)).powf(1.0 - alpha) / (1.0 - rho.sqrt())
    }
}

/// Upper constant of `sum_k tau_k sup_{i<=k} a_i <= c sum_k tau_k a_k`.
pub fn sum_sup_constant(rho: f64) -> f64 {
    1.0 / (1.0 - rho)
}

/// Upper constant of the three-index supremum estimate.
pub fn three_sup_constant(rho: f64, alpha: f64) -> f64 {
    (1.0 - rho.powf(1.0 / alpha)).powf(-alpha)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Range(format!("alpha must be positive, got {alpha}")));
    }
    Ok(())
}

/// The three sequence estimates (sup-sum), (sum-sum), (sum-sup).
pub fn check_geometric_equivalences(tau: &GeometricSeq, a: &[f64], alpha: f64) -> Result<RatioReport> {
    check_alpha(alpha)?;
    if tau.len() != a.len() {
        return Err(Error::IndexMismatch {
            left: tau.len(),
            right: a.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptyRange);
    }
    if a.iter().any(|&x| !(x >= 0.0)) {
        return Err(Error::InvalidArgument("sequence a must be non-negative".into()));
    }
    let rho = tau.ratio_bound;
    let mut partial = 0.0;
    let mut run_max: f64 = 0.0;
    let (mut ss_l, mut ss_r) = (0.0f64, 0.0f64);
    let (mut sum_l, mut sum_r) = (0.0, 0.0);
    let (mut sup_l, mut sup_r) = (0.0, 0.0);
    for (t, &ak) in tau.terms.iter().zip(a) {
        partial += ak;
        run_max = run_max.max(ak);
        ss_l = ss_l.max(t * partial);
        ss_r = ss_r.max(t * ak);
        sum_l += t * partial.powf(alpha);
        sum_r += t * ak.powf(alpha);
        sup_l += t * run_max;
        sup_r += t * ak;
    }
    Ok(RatioReport {
        entries: vec![
            EquivalenceRatio::new("sup-sum", ss_l, ss_r, 1.0, sup_sum_constant(rho)),
            EquivalenceRatio::new("sum-sum", sum_l, sum_r, 1.0, sum_sum_constant(rho, alpha)),
            EquivalenceRatio::new("sum-sup", sup_l, sup_r, 1.0, sum_sup_constant(rho)),
        ],
    })
}

/// Interval forms: (dec-sup-sum), (dec-sum-sum), (dec-sum-sup),
/// (3-sup-equiv) and (3-sum-equiv) over the cells of `points`.
///
/// `tau` is indexed by the cells `(x_{k-1}, x_k)`; `sigma`, when given, by
/// the left end of each cell and must be non-decreasing (default `1`).
pub fn check_interval_equivalences(
    tau: &GeometricSeq,
    points: &[f64],
    g: &WeightExpr,
    alpha: f64,
    sigma: Option<&[f64]>,
    settings: &QuadSettings,
) -> Result<RatioReport> {
    check_alpha(alpha)?;
    if points.len() < 2 {
        return Err(Error::EmptyRange);
    }
    let cells = points.len() - 1;
    if tau.len() != cells {
        return Err(Error::IndexMismatch {
            left: tau.len(),
            right: cells,
        });
    }
    let ones = vec![1.0; cells];
    let sigma = sigma.unwrap_or(&ones);
    if sigma.len() != cells {
        return Err(Error::IndexMismatch {
            left: sigma.len(),
            right: cells,
        });
    }
    if sigma.windows(2).any(|s| s[1] < s[0]) || sigma.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::InvalidArgument("sigma must be positive and non-decreasing".into()));
    }
    let breaks = g.breakpoints();
    let mut ints = Vec::with_capacity(cells);
    let mut sups = Vec::with_capacity(cells);
    for c in points.windows(2) {
        ints.push(integrate_with_breaks(|t| g.value(t), c[0], c[1], &breaks, settings)?.value);
        sups.push(ess_sup_with_breaks(|t| g.value(t), c[0], c[1], &breaks, settings)?);
    }
    let rho = tau.ratio_bound;
    let t = &tau.terms;

    let mut cum = 0.0;
    let mut run_sup: f64 = 0.0;
    let (mut dss_l, mut dss_r) = (0.0f64, 0.0f64);
    let (mut dsum_l, mut dsum_r) = (0.0, 0.0);
    let (mut dsup_l, mut dsup_r) = (0.0, 0.0);
    let (mut s3_l, mut s3_r) = (0.0f64, 0.0f64);
    let (mut m3_l, mut m3_r) = (0.0, 0.0);
    for k in 0..cells {
        cum += ints[k];
        run_sup = run_sup.max(sups[k]);
        dss_l = dss_l.max(t[k] * cum);
        dss_r = dss_r.max(t[k] * ints[k]);
        dsum_l += t[k] * cum.powf(alpha);
        dsum_r += t[k] * ints[k].powf(alpha);
        dsup_l += t[k] * run_sup;
        dsup_r += t[k] * sups[k];
        // sup over the left index i of (int_{x_i}^{x_k} g)^alpha sigma_i
        let mut inner: f64 = 0.0;
        let mut tail = 0.0;
        for i in (0..=k).rev() {
            tail += ints[i];
            inner = inner.max(tail.powf(alpha) * sigma[i]);
        }
        let local = ints[k].powf(alpha) * sigma[k];
        s3_l = s3_l.max(t[k] * inner);
        s3_r = s3_r.max(t[k] * local);
        m3_l += t[k] * inner;
        m3_r += t[k] * local;
    }
    Ok(RatioReport {
        entries: vec![
            EquivalenceRatio::new("dec-sup-sum", dss_l, dss_r, 1.0, sup_sum_constant(rho)),
            EquivalenceRatio::new("dec-sum-sum", dsum_l, dsum_r, 1.0, sum_sum_constant(rho, alpha)),
            EquivalenceRatio::new("dec-sum-sup", dsup_l, dsup_r, 1.0, sum_sup_constant(rho)),
            EquivalenceRatio::new("3-sup-equiv", s3_l, s3_r, 1.0, three_sup_constant(rho, alpha)),
            EquivalenceRatio::new("3-sum-equiv", m3_l, m3_r, 1.0, sum_sum_constant(rho, alpha)),
        ],
    })
}

/// Non-decreasing test functions for the dyadic summation estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum MonotoneFn {
    Constant(f64),
    /// `low` before `at`, `high` from `at` on.
    Step { at: f64, low: f64, high: f64 },
    /// `c (t - t0)^gamma`, `gamma >= 0`, for `t > t0`.
    Power { c: f64, gamma: f64, t0: f64 },
    /// `c W(t)^gamma`, `gamma <= 0`.
    TailPower { c: f64, gamma: f64 },
}

impl MonotoneFn {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            MonotoneFn::Constant(c) => c >= 0.0,
            MonotoneFn::Step { low, high, .. } => low >= 0.0 && high >= low,
            MonotoneFn::Power { c, gamma, .. } => c >= 0.0 && gamma >= 0.0,
            MonotoneFn::TailPower { c, gamma } => c >= 0.0 && gamma <= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("{self:?} is not non-negative and non-decreasing")))
        }
    }

    /// Value at `t` where `W(t) = tail`.
    pub fn eval(&self, t: f64, tail: f64) -> f64 {
        match *self {
            MonotoneFn::Constant(c) => c,
            MonotoneFn::Step { at, low, high } => {
                if t < at {
                    low
                } else {
                    high
                }
            }
            MonotoneFn::Power { c, gamma, t0 } => c * (t - t0).max(0.0).powf(gamma),
            MonotoneFn::TailPower { c, gamma } => c * tail.powf(gamma),
        }
    }

    fn breaks(&self) -> Vec<f64> {
        match *self {
            MonotoneFn::Step { at, .. } => vec![at],
            MonotoneFn::Power { t0, .. } => vec![t0],
            _ => Vec::new(),
        }
    }
}

/// (int.equiv) and (sup.equiv) on the levels `n < k <= K` of a discretizing
/// sequence. The integral runs over `[x_n, x_K]`, so its lower estimate drops
/// the last sum term; both estimates use the exact cell masses of `W^alpha`.
pub fn check_dyadic_summation(
    w: &WeightExpr,
    seq: &DiscretizingSequence,
    n: i64,
    alpha: f64,
    h: &MonotoneFn,
    settings: &QuadSettings,
) -> Result<RatioReport> {
    check_alpha(alpha)?;
    h.validate()?;
    let start = seq.index_of(n).ok_or(Error::EmptyRange)?;
    if start + 1 >= seq.len() {
        return Err(Error::EmptyRange);
    }
    let mut wbreaks = w.breakpoints();
    wbreaks.extend(h.breaks());
    let inner_settings = settings.tightened(10.0);
    let mut lhs_int = 0.0;
    let mut lhs_sup: f64 = 0.0;
    let mut rhs_int = 0.0;
    let mut rhs_sup: f64 = 0.0;
    let mut last_term = 0.0;
    for j in (start + 1)..seq.len() {
        let (lo, hi) = (seq.points[j - 1], seq.points[j]);
        let w_hi = seq.w_values[j];
        let tail_at = |t: f64| -> f64 {
            if t >= hi {
                return w_hi;
            }
            w_hi + integrate_with_breaks(|s| w.value(s), t, hi, &wbreaks, &inner_settings)
                .map(|i| i.value)
                .unwrap_or(f64::NAN)
        };
        let integrand = |t: f64| {
            let tw = tail_at(t);
            tw.powf(alpha - 1.0) * w.value(t) * h.eval(t, tw)
        };
        lhs_int += integrate_with_breaks(integrand, lo, hi, &wbreaks, settings)?.value;
        let sup_fn = |t: f64| {
            let tw = tail_at(t);
            tw.powf(alpha) * h.eval(t, tw)
        };
        lhs_sup = lhs_sup.max(ess_sup_with_breaks(sup_fn, lo, hi, &wbreaks, settings)?);
        let k = seq.levels[j];
        let term = 2f64.powf(-(k as f64) * alpha) * h.eval(hi, w_hi);
        rhs_int += term;
        rhs_sup = rhs_sup.max(term);
        last_term = term;
    }
    let up = (2f64.powf(alpha) - 1.0) / alpha;
    let low = (1.0 - 2f64.powf(-alpha)) / alpha;
    let lower_eff = if rhs_int > 0.0 {
        low * (rhs_int - last_term) / rhs_int
    } else {
        low
    };
    Ok(RatioReport {
        entries: vec![
            EquivalenceRatio::new("int.equiv", lhs_int, rhs_int, lower_eff, up),
            EquivalenceRatio::new("sup.equiv", lhs_sup, rhs_sup, 1.0, 2f64.powf(alpha)),
        ],
    })
}
