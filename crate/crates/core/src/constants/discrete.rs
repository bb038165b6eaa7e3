//! Discrete constants: the embedding and Hardy inequalities for finite
//! sequences, and the dyadic characterization of the main inequality.

use serde::Serialize;

use super::continuous::{parabola_peak, ConstantsSettings};
use super::tables::{mul0, pow0, sequence_anchors, Tables, VMode};
use super::CaseTag;
use crate::discretize::DiscretizingSequence;
use crate::error::{Error, Result};
use crate::measure::functional::golden_max;
use crate::measure::quad::{integrate, QuadSettings};
use crate::measure::{v_p, WeightExpr};
use crate::problem::ProblemSpec;

/// Two weight sequences on the index range `start..start + len`. For the
/// embedding inequality `a = v_k`, `b = w_k`; for the Hardy inequality they
/// are `a_k, b_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeqWeights {
    pub start: i64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl SeqWeights {
    pub fn new(start: i64, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::IndexMismatch {
                left: a.len(),
                right: b.len(),
            });
        }
        if a.is_empty() {
            return Err(Error::EmptyRange);
        }
        if a.iter().chain(&b).any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::InvalidArgument("sequence weights must be finite and non-negative".into()));
        }
        Ok(SeqWeights { start, a, b })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DiscreteName {
    L1,
    L2,
    H1,
    H2,
    H3,
    H4,
    A1,
    A2,
    A3,
    A4,
    B1,
    B2,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteConstant {
    pub name: DiscreteName,
    #[serde(with = "crate::serde_util::ext_real")]
    pub value: f64,
    /// The constant equals the best constant, not just up to factors.
    pub exact: bool,
    #[serde(with = "crate::serde_util::ext_real")]
    pub error: f64,
}

/// `L_1 = sup v/w` for `p <= q`, `L_2 = ||v/w||_{pq/(p-q)}` for `p > q`.
pub fn embedding_constant(sw: &SeqWeights, p: f64, q: f64) -> Result<DiscreteConstant> {
    check_pq(p, q)?;
    if sw.b.iter().any(|&w| w <= 0.0) {
        return Err(Error::InvalidArgument("embedding weights w_k must be positive".into()));
    }
    let ratios = sw.a.iter().zip(&sw.b).map(|(v, w)| v / w);
    let (name, value) = if p <= q {
        (DiscreteName::L1, ratios.fold(0.0, f64::max))
    } else {
        let s = p * q / (p - q);
        (DiscreteName::L2, ratios.map(|x| x.powf(s)).sum::<f64>().powf(1.0 / s))
    };
    Ok(DiscreteConstant {
        name,
        value,
        exact: true,
        error: 0.0,
    })
}

/// `H_1..H_4` for `(sum_k (sum_{i<=k} x_i b_i)^q a_k)^{1/q} <= C ||x||_p`.
pub fn discrete_hardy_constant(sw: &SeqWeights, p: f64, q: f64) -> Result<DiscreteConstant> {
    check_pq(p, q)?;
    let n = sw.len();
    let mut tail = vec![0.0; n];
    let mut acc = 0.0;
    for k in (0..n).rev() {
        acc += sw.a[k];
        tail[k] = acc;
    }
    let (name, value) = match CaseTag::discrete_hardy(p, q) {
        CaseTag::I => (
            DiscreteName::H1,
            (0..n).map(|k| mul0(tail[k].powf(1.0 / q), sw.b[k])).fold(0.0, f64::max),
        ),
        CaseTag::II => {
            let e = q * p / (p - q);
            let mut run: f64 = 0.0;
            let mut s = 0.0;
            for k in 0..n {
                run = run.max(sw.b[k]);
                s += sw.a[k] * tail[k].powf(q / (p - q)) * pow0(run, e);
            }
            (DiscreteName::H2, pow0(s, (p - q) / (p * q)))
        }
        CaseTag::III => {
            let pp = p / (p - 1.0);
            let mut cum = 0.0;
            let mut s = 0.0;
            for k in 0..n {
                cum += pow0(sw.b[k], pp);
                s += sw.a[k] * tail[k].powf(q / (p - q)) * pow0(cum, q * (p - 1.0) / (p - q));
            }
            (DiscreteName::H3, pow0(s, (p - q) / (p * q)))
        }
        CaseTag::IV => {
            let pp = p / (p - 1.0);
            let mut cum = 0.0;
            let mut best: f64 = 0.0;
            for k in 0..n {
                cum += pow0(sw.b[k], pp);
                best = best.max(tail[k].powf(1.0 / q) * pow0(cum, (p - 1.0) / p));
            }
            (DiscreteName::H4, best)
        }
    };
    Ok(DiscreteConstant {
        name,
        value,
        exact: false,
        error: 0.0,
    })
}

fn check_pq(p: f64, q: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite() && q > 0.0 && q.is_finite()) {
        return Err(Error::Range(format!("p and q must be positive and finite, got p = {p}, q = {q}")));
    }
    Ok(())
}

/// Characterizing expression of the weighted Hardy constant on one cell,
/// evaluated by adaptive quadrature: the supremum form for `p <= q`, the
/// integral form for `q < p`.
pub fn local_hardy_b(
    u: &WeightExpr,
    v: &WeightExpr,
    p: f64,
    q: f64,
    cell: (f64, f64),
    settings: &QuadSettings,
) -> Result<f64> {
    if p < 1.0 {
        return Err(Error::TrivialRegime { p });
    }
    check_pq(p, q)?;
    let (lo, hi) = cell;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!("cell ({lo}, {hi}) must be finite and non-empty")));
    }
    if u.is_zero() {
        return Ok(0.0);
    }
    let tail_u = |t: f64| -> Result<f64> {
        match integrate(|s| u.value(s), t, hi, settings) {
            Ok(i) => Ok(i.value),
            Err(Error::Divergent { .. }) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    };
    if p <= q {
        let g = |t: f64| -> Result<f64> { Ok(mul0(pow0(tail_u(t)?, 1.0 / q), v_p(v, p, lo, t, settings)?)) };
        let mut pts: Vec<f64> = (1..128).map(|i| lo + (hi - lo) * i as f64 / 128.0).collect();
        for k in 8..48 {
            let d = (hi - lo) * 2f64.powi(-k);
            pts.push(lo + d);
            pts.push(hi - d);
        }
        pts.sort_by(|a, b| a.total_cmp(b));
        let mut vals = Vec::with_capacity(pts.len());
        for &t in &pts {
            let val = g(t)?;
            if val == f64::INFINITY {
                return Ok(f64::INFINITY);
            }
            vals.push(val);
        }
        let (imax, vmax) = vals
            .iter()
            .enumerate()
            .fold((0, 0.0), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        let a = if imax == 0 { lo } else { pts[imax - 1] };
        let b = if imax + 1 == pts.len() { hi } else { pts[imax + 1] };
        let refined = golden_max(&|t: f64| g(t).unwrap_or(0.0), a, b, 1e-9 * (b - a) / (1.0 + a.abs().max(b.abs())));
        Ok(vmax.max(refined))
    } else {
        let e4 = q / (p - q);
        let e5 = p * q / (p - q);
        let failure = std::cell::Cell::new(None);
        let f = |t: f64| {
            let tu = tail_u(t);
            let vp = v_p(v, p, lo, t, settings);
            match (tu, vp) {
                (Ok(a), Ok(b)) => mul0(pow0(a, e4) * u.value(t), pow0(b, e5)),
                (Err(e), _) | (_, Err(e)) => {
                    failure.set(Some(e));
                    0.0
                }
            }
        };
        let val = match integrate(f, lo, hi, settings) {
            Ok(i) => i.value,
            Err(Error::Divergent { .. }) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        if let Some(e) = failure.take() {
            return Err(e);
        }
        Ok(pow0(val, (p - q) / (p * q)))
    }
}

/// One dyadic cell `[x_{k-1}, x_k]` of the characterization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteRow {
    pub k: i64,
    pub x: f64,
    #[serde(rename = "W", with = "crate::serde_util::ext_real")]
    pub w: f64,
    /// Local Hardy expression `B(x_{k-1}, x_k)` with the inner weight.
    #[serde(with = "crate::serde_util::ext_real")]
    pub b_local: f64,
    /// `V_p(x_{k-1}, x_k)`.
    #[serde(with = "crate::serde_util::ext_real")]
    pub v_local: f64,
    /// `V_p(a, x_k)`.
    #[serde(with = "crate::serde_util::ext_real")]
    pub v_a: f64,
    /// `int_{x_k}^{x_{k+1}} W^{beta q/r} u`; absent on the last point.
    #[serde(with = "crate::serde_util::ext_real_opt")]
    pub u_next: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteReport {
    pub regime: CaseTag,
    pub constants: Vec<DiscreteConstant>,
    #[serde(with = "crate::serde_util::ext_real")]
    pub value: f64,
    #[serde(with = "crate::serde_util::ext_real")]
    pub error: f64,
    /// For `p = 1`: `sup_k tail_k^{1/r} V_1(x_{k-1}, x_k)`, which equals `B1`
    /// after interchanging the suprema.
    #[serde(with = "crate::serde_util::ext_real_opt")]
    pub b1_local_form: Option<f64>,
    pub table: Vec<DiscreteRow>,
    pub truncation: Vec<String>,
}

impl DiscreteReport {
    pub fn get(&self, name: DiscreteName) -> Option<&DiscreteConstant> {
        self.constants.iter().find(|c| c.name == name)
    }
}

/// Geometric bound on the omitted tail of a series from its last two terms.
fn geometric_tail(terms: &[f64]) -> f64 {
    match terms {
        [.., t1, t2] if *t1 > 0.0 && t2.is_finite() => {
            let rho = t2 / t1;
            if rho < 1.0 {
                t2 * rho / (1.0 - rho)
            } else {
                *t2
            }
        }
        [.., t] if t.is_finite() => *t,
        _ => 0.0,
    }
}

/// `(sum s_k^e)^{1/e}` with the tail estimate, or `sup s_k` when `e` is `None`.
fn norm_with_tail(terms: &[f64], e: Option<f64>) -> (f64, f64) {
    match e {
        None => (terms.iter().copied().fold(0.0, f64::max), 0.0),
        Some(e) => {
            let powered: Vec<f64> = terms.iter().map(|&s| pow0(s, e)).collect();
            let sum: f64 = powered.iter().sum();
            let tail = geometric_tail(&powered);
            let val = pow0(sum, 1.0 / e);
            let err = if val.is_finite() { pow0(sum + tail, 1.0 / e) - val } else { 0.0 };
            (val, err)
        }
    }
}

/// `A_1..A_4` and `B_1, B_2` over the discretizing sequence, and their
/// regime combination.
pub fn discrete_characterization(
    spec: &ProblemSpec,
    seq: &DiscretizingSequence,
    settings: &ConstantsSettings,
) -> Result<DiscreteReport> {
    spec.validate()?;
    let e = spec.exponents;
    e.require_main()?;
    if seq.len() < 2 {
        return Err(Error::EmptyRange);
    }
    let (p, q, r, beta) = (e.p, e.q, e.r, e.beta);
    let wts = &spec.weights;
    let anchors = sequence_anchors(seq);
    let t = Tables::build(
        spec.interval,
        (&wts.u, &wts.v, &wts.w),
        beta * q / r,
        beta,
        VMode::Power(p),
        &anchors,
        &settings.plan,
        &spec.quad,
    )?;
    let regime = CaseTag::main(p, q, r);
    let gn = t.gn();
    let m = t.mesh.anchors.len();

    let mut rows = Vec::with_capacity(m);
    for a in 1..m {
        let (k, ib) = t.mesh.anchors[a];
        let ia = t.mesh.anchors[a - 1].1;
        let u_end = t.ub[ib];
        let mut acc = 0.0;
        let mut b_local;
        if p <= q {
            // sup_t (U(x_k) - U(t))^{1/q} V_p(x_{k-1}, t) over bounds and nodes
            let mut xs = Vec::new();
            let mut ls = Vec::new();
            let mut inf = false;
            for i in ia..ib {
                let vb = t.local_finish(t.local_add(acc, t.local_start(i)));
                xs.push(t.mesh.bounds[i]);
                ls.push(log_term(u_end - t.ub[i], vb, 1.0 / q, &mut inf));
                for g in 0..gn {
                    let j = i * gn + g;
                    let vn = t.local_finish(t.local_add(acc, t.local_node(j)));
                    xs.push(t.node(j));
                    ls.push(log_term(u_end - t.un[j], vn, 1.0 / q, &mut inf));
                }
                acc = t.local_add(acc, t.local_cell(i));
            }
            b_local = if inf {
                f64::INFINITY
            } else {
                let (imax, best) = ls
                    .iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
                let mut best = best;
                if imax > 0 && imax + 1 < ls.len() {
                    best = best.max(parabola_peak(
                        (xs[imax - 1], ls[imax - 1]),
                        (xs[imax], best),
                        (xs[imax + 1], ls[imax + 1]),
                    ));
                }
                best.exp()
            };
        } else {
            let e4 = q / (p - q);
            let e5 = p * q / (p - q);
            let mut s = 0.0;
            for i in ia..ib {
                for g in 0..gn {
                    let j = i * gn + g;
                    let vn = t.local_finish(t.local_add(acc, t.local_node(j)));
                    s += t.weight(j) * mul0(pow0(u_end - t.un[j], e4) * t.phi[j], pow0(vn, e5));
                }
                acc = t.local_add(acc, t.local_cell(i));
            }
            b_local = pow0(s, (p - q) / (p * q));
        }
        if b_local.is_nan() {
            b_local = 0.0;
        }
        let u_next = if a + 1 < m {
            Some(t.ub[t.mesh.anchors[a + 1].1] - u_end)
        } else {
            None
        };
        rows.push(DiscreteRow {
            k,
            x: t.mesh.bounds[ib],
            w: seq.w_values[a],
            b_local,
            v_local: t.local_finish(acc),
            v_a: t.va_b[ib],
            u_next,
        });
    }

    // A: l^inf or l^{pr/(p-r)} norm of 2^{-k(1-beta)/r} B(x_{k-1}, x_k)
    let s: Vec<f64> = rows
        .iter()
        .map(|row| mul0(2f64.powf(-(row.k as f64) * (1.0 - beta) / r), row.b_local))
        .collect();
    let a_exp = if p <= r { None } else { Some(p * r / (p - r)) };
    let (a_val, a_err) = norm_with_tail(&s, a_exp);
    let a_name = match regime {
        CaseTag::I => DiscreteName::A1,
        CaseTag::II => DiscreteName::A2,
        CaseTag::III => DiscreteName::A3,
        CaseTag::IV => DiscreteName::A4,
    };

    // B: tails of c_i = 2^{-i(1-beta)} U_i^{r/q}
    let c: Vec<f64> = rows
        .iter()
        .map(|row| match row.u_next {
            Some(u) => 2f64.powf(-(row.k as f64) * (1.0 - beta)) * pow0(u, r / q),
            None => 0.0,
        })
        .collect();
    let mut tails = vec![0.0; c.len()];
    let mut acc = geometric_tail(&c[..c.len().saturating_sub(1)]);
    let c_tail = acc;
    for i in (0..c.len()).rev() {
        acc += c[i];
        tails[i] = acc;
    }
    let (b_name, b_val, b_err) = if p <= r {
        let val = rows
            .iter()
            .zip(&tails)
            .map(|(row, &tl)| mul0(pow0(tl, 1.0 / r), row.v_a))
            .fold(0.0, f64::max);
        let without = rows
            .iter()
            .zip(&tails)
            .map(|(row, &tl)| mul0(pow0(tl - c_tail, 1.0 / r), row.v_a))
            .fold(0.0, f64::max);
        (DiscreteName::B1, val, (val - without).abs())
    } else {
        let terms: Vec<f64> = rows
            .iter()
            .zip(&c)
            .zip(&tails)
            .map(|((row, &ci), &tl)| mul0(ci * pow0(tl, r / (p - r)), pow0(row.v_a, p * r / (p - r))))
            .collect();
        let sum: f64 = terms.iter().sum();
        let ex = (p - r) / (p * r);
        let val = pow0(sum, ex);
        let err = if val.is_finite() { pow0(sum + geometric_tail(&terms), ex) - val } else { 0.0 };
        (DiscreteName::B2, val, err)
    };
    let b1_local_form = if p == 1.0 {
        Some(
            rows.iter()
                .zip(&tails)
                .map(|(row, &tl)| mul0(pow0(tl, 1.0 / r), row.v_local))
                .fold(0.0, f64::max),
        )
    } else {
        None
    };

    let constants = vec![
        DiscreteConstant {
            name: a_name,
            value: a_val,
            exact: false,
            error: a_err,
        },
        DiscreteConstant {
            name: b_name,
            value: b_val,
            exact: false,
            error: b_err,
        },
    ];
    Ok(DiscreteReport {
        regime,
        value: a_val + b_val,
        error: a_err + b_err,
        constants,
        b1_local_form,
        table: rows,
        truncation: t.notes.clone(),
    })
}

/// `ln(d^e V)`, flagging `V = inf` against `d > 0`.
fn log_term(d: f64, v: f64, e: f64, inf: &mut bool) -> f64 {
    if d <= 0.0 || v <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if v == f64::INFINITY {
        *inf = true;
    }
    e * d.ln() + v.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::build_discretizing_sequence;
    use crate::measure::IntervalSpec;
    use crate::problem::{ExponentSet, Weights};

    fn sw(a: &[f64], b: &[f64]) -> SeqWeights {
        SeqWeights::new(0, a.to_vec(), b.to_vec()).unwrap()
    }

    #[test]
    fn embedding_examples() {
        let c = embedding_constant(&sw(&[1.0, 2.0], &[1.0, 1.0]), 1.0, 2.0).unwrap();
        assert_eq!((c.name, c.value, c.exact), (DiscreteName::L1, 2.0, true));
        let c = embedding_constant(&sw(&[0.3, 0.7, 1.1], &[0.3, 0.7, 1.1]), 2.0, 3.0).unwrap();
        assert!((c.value - 1.0).abs() < 1e-15);
        let c = embedding_constant(&sw(&[1.0, 1.0], &[1.0, 1.0]), 2.0, 1.0).unwrap();
        assert_eq!(c.name, DiscreteName::L2);
        assert!((c.value - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn hardy_examples() {
        let c = discrete_hardy_constant(&sw(&[1.0; 3], &[1.0; 3]), 1.0, 1.0).unwrap();
        assert_eq!((c.name, c.value), (DiscreteName::H1, 3.0));
        for (p, q) in [(1.0, 1.0), (0.5, 0.25), (2.0, 1.0), (2.0, 3.0)] {
            let c = discrete_hardy_constant(&sw(&[1.0, 2.0, 0.5], &[0.0; 3]), p, q).unwrap();
            assert_eq!(c.value, 0.0, "{:?}", c.name);
        }
        // H3 for a = (1,0,0), b = (0,0,1), p = 2, q = 1: only k = 0 has a_k > 0,
        // and the partial sum of b^2 there is 0
        let c = discrete_hardy_constant(&sw(&[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]), 2.0, 1.0).unwrap();
        assert_eq!(c.name, DiscreteName::H3);
        assert_eq!(c.value, 0.0);
        // single term: a^{1/q} b in every regime
        for (p, q) in [(1.0, 2.0), (0.5, 0.25), (2.0, 1.0), (2.0, 3.0)] {
            let c = discrete_hardy_constant(&sw(&[4.0], &[3.0]), p, q).unwrap();
            assert!((c.value - 4f64.powf(1.0 / q) * 3.0).abs() < 1e-12, "{:?}", c.name);
        }
        assert!(matches!(SeqWeights::new(0, vec![], vec![]), Err(Error::EmptyRange)));
        assert!(matches!(
            SeqWeights::new(0, vec![1.0], vec![]),
            Err(Error::IndexMismatch { .. })
        ));
    }

    #[test]
    fn local_hardy_examples() {
        let one = WeightExpr::constant(1.0);
        let s = QuadSettings::default();
        let b = local_hardy_b(&one, &one, 1.0, 1.0, (0.0, 1.0), &s).unwrap();
        assert!((b - 1.0).abs() < 1e-9, "{b}");
        let b = local_hardy_b(&WeightExpr::zero(), &one, 2.0, 1.0, (0.0, 1.0), &s).unwrap();
        assert_eq!(b, 0.0);
        // (int_0^1 (1-t) t dt)^{1/2}
        let b = local_hardy_b(&one, &one, 2.0, 1.0, (0.0, 1.0), &s).unwrap();
        assert!((b - (1.0f64 / 6.0).sqrt()).abs() < 1e-9, "{b}");
    }

    fn trivial() -> ProblemSpec {
        ProblemSpec::unit(1.0, 1.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn trivial_characterization() {
        let spec = trivial();
        let seq = build_discretizing_sequence(&spec.weights.w, &spec.interval, 40, &spec.quad).unwrap();
        let rep = discrete_characterization(&spec, &seq, &ConstantsSettings::default()).unwrap();
        // A1 = sup_k 2^{-2k} = 1/4, B1 = sum_{i>=1} 2^{-2i-1} = 1/6
        let a1 = rep.get(DiscreteName::A1).unwrap().value;
        let b1 = rep.get(DiscreteName::B1).unwrap().value;
        assert!((a1 - 0.25).abs() < 1e-8, "{a1}");
        assert!((b1 - 1.0 / 6.0).abs() < 1e-8, "{b1}");
        assert!((rep.value - 5.0 / 12.0).abs() < 1e-8);
        assert_eq!(rep.b1_local_form, Some(b1));
    }

    #[test]
    fn zero_u_vanishes() {
        let spec = trivial().with_weights(WeightExpr::zero(), WeightExpr::constant(1.0), WeightExpr::constant(1.0));
        let seq = build_discretizing_sequence(&spec.weights.w, &spec.interval, 40, &spec.quad).unwrap();
        let rep = discrete_characterization(&spec, &seq, &ConstantsSettings::default()).unwrap();
        assert!(rep.constants.iter().all(|c| c.value == 0.0));
    }

    #[test]
    fn local_expressions_match_adaptive_route() {
        let spec = ProblemSpec::new(
            IntervalSpec::new(0.0, 1.0).unwrap(),
            ExponentSet::new(2.0, 1.0, 1.0, 0.0).unwrap(),
            Weights {
                u: WeightExpr::power(1.0, 0.5),
                v: WeightExpr::power(1.0, -0.5),
                w: WeightExpr::constant(1.0),
            },
        )
        .unwrap();
        for (p, q) in [(2.0, 1.0), (2.0, 3.0), (1.0, 2.0)] {
            let mut s = spec.clone();
            s.exponents = ExponentSet::new(p, q, 1.0, 0.0).unwrap();
            let seq = build_discretizing_sequence(&s.weights.w, &s.interval, 40, &s.quad).unwrap();
            let rep = discrete_characterization(&s, &seq, &ConstantsSettings::default()).unwrap();
            for row in rep.table.iter().take(6) {
                let lo = seq.point(row.k - 1).unwrap();
                let b = local_hardy_b(&s.weights.u, &s.weights.v, p, q, (lo, row.x), &s.quad).unwrap();
                assert!(((row.b_local - b) / b).abs() < 1e-5, "p={p} q={q} k={}: {} vs {b}", row.k, row.b_local);
            }
        }
    }

    #[test]
    fn scaling_w_shifts_levels() {
        let spec = ProblemSpec::new(
            IntervalSpec::new(0.0, 1.0).unwrap(),
            ExponentSet::new(2.0, 1.0, 3.0, 0.0).unwrap(),
            Weights {
                u: WeightExpr::power(1.0, 0.5),
                v: WeightExpr::constant(1.0),
                w: WeightExpr::power(1.0, 1.0),
            },
        )
        .unwrap();
        let base_seq = build_discretizing_sequence(&spec.weights.w, &spec.interval, 60, &spec.quad).unwrap();
        let base = discrete_characterization(&spec, &base_seq, &ConstantsSettings::default()).unwrap();
        let scaled = spec.scale_w(4.0);
        let seq = build_discretizing_sequence(&scaled.weights.w, &scaled.interval, 60, &scaled.quad).unwrap();
        let rep = discrete_characterization(&scaled, &seq, &ConstantsSettings::default()).unwrap();
        for (a, b) in base.constants.iter().zip(&rep.constants) {
            let want = 4f64.powf(1.0 / 3.0) * a.value;
            assert!(((b.value - want) / want).abs() < 1e-6, "{:?}: {} vs {want}", a.name, b.value);
        }
    }
}
