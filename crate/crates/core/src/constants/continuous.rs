//! The functionals `C_1..C_5` of the main inequality and `calC_1..calC_5` of
//! the monotone one.
//!
//! All five are evaluated on one mesh aligned with the dyadic levels of `W`.
//! Outer suprema are taken over the cell bounds and refined by golden-section
//! search inside the best pair of cells; outer integrals use the Gauss nodes.
//! The monotone constants reuse the main evaluator with `p' = 1`,
//! `q' = 1/p`, `r' = q/p` and the dual weight `(int_x^b v)^{-1}`, then take
//! the `1/p`-th power.

use rayon::prelude::*;
use serde::Serialize;

use super::tables::{mul0, normalized_anchors, pow0, Anchors, Tables, VData, VMode};
use super::{CaseTag, ConstantName, ConstantValue};
use crate::error::{Error, Result};
use crate::measure::functional::golden_max;
use crate::measure::MeshPlan;
use crate::problem::ProblemSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantsSettings {
    pub plan: MeshPlan,
    /// Recompute on a mesh with half the subdivisions and report the
    /// difference as the error estimate.
    pub error_estimate: bool,
}

impl Default for ConstantsSettings {
    fn default() -> Self {
        ConstantsSettings {
            plan: MeshPlan::default(),
            error_estimate: true,
        }
    }
}

impl ConstantsSettings {
    fn coarse(&self) -> MeshPlan {
        MeshPlan {
            subdivisions: (self.plan.subdivisions / 2).max(1),
            ..self.plan
        }
    }
}

/// Exponents in the form of the main inequality.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Exps {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl Exps {
    pub fn defined(&self, i: u8) -> bool {
        match i {
            1 => true,
            2 | 3 => self.r < self.p,
            4 => self.q < self.p,
            5 => self.r < self.p && self.q < self.p,
            _ => false,
        }
    }
}

pub(crate) struct Engine<'t, 'a> {
    pub t: &'t Tables<'a>,
    pub e: Exps,
}

impl<'t, 'a> Engine<'t, 'a> {
    fn psi_o(&self, j: usize) -> f64 {
        self.t.wn[j].powf(-self.t.beta) * self.t.wv[j]
    }

    fn psi_o_at(&self, i: usize, x: f64) -> f64 {
        self.t.w_at(i, x).powf(-self.t.beta) * self.t.w.value(x)
    }

    fn omega(&self, j: usize) -> f64 {
        let Exps { p, r, .. } = self.e;
        self.t.wn[j].powf((1.0 - self.t.beta) * p / (p - r) - 1.0) * self.t.wv[j]
    }

    /// `int_x^{t_{i+1}} W^{-beta} w (U(s) - U(x))^{r/q} ds`.
    fn phi1_partial(&self, i: usize, x: f64) -> f64 {
        let e = self.e.r / self.e.q;
        let hi = self.t.mesh.bounds[i + 1];
        let h = hi - x;
        let rule = &self.t.mesh.rule;
        (0..rule.len())
            .map(|g| {
                let s = x + h * rule.nodes[g];
                h * rule.weights[g] * self.psi_o_at(i, s) * pow0(self.t.seg_phi(i, x, s), e)
            })
            .sum()
    }

    /// Nodes from `from` on, against base value `u0`.
    fn phi1_tail(&self, from: usize, u0: f64) -> f64 {
        let e = self.e.r / self.e.q;
        (from..self.t.wn.len())
            .map(|j| self.t.weight(j) * self.psi_o(j) * pow0(self.t.un[j] - u0, e))
            .sum()
    }

    fn phi1_bounds(&self) -> Vec<f64> {
        let gn = self.t.gn();
        (0..self.t.ub.len())
            .into_par_iter()
            .map(|i| self.phi1_tail(i * gn, self.t.ub[i]))
            .collect()
    }

    fn phi1_nodes(&self) -> Vec<f64> {
        let gn = self.t.gn();
        (0..self.t.un.len())
            .into_par_iter()
            .map(|j| {
                let i = j / gn;
                self.phi1_partial(i, self.t.node(j)) + self.phi1_tail((i + 1) * gn, self.t.un[j])
            })
            .collect()
    }

    fn phi1_at(&self, x: f64) -> f64 {
        let i = self.t.mesh.cell_of(x);
        let ux = self.t.u_at(i, x);
        self.phi1_partial(i, x) + self.phi1_tail((i + 1) * self.t.gn(), ux)
    }

    fn i4_exps(&self) -> (f64, f64) {
        let Exps { p, q, .. } = self.e;
        (q / (p - q), p * q / (p - q))
    }

    /// Nodes before `upto`, against the value `ux = U(x)`.
    fn i4_head(&self, upto: usize, ux: f64) -> f64 {
        let (e4, e5) = self.i4_exps();
        let mut acc = 0.0;
        for j in 0..upto {
            let d = ux - self.t.un[j];
            if d <= 0.0 {
                continue;
            }
            acc += self.t.weight(j) * mul0(d.powf(e4) * self.t.phi[j], pow0(self.t.va_n[j], e5));
            if acc.is_infinite() {
                return acc;
            }
        }
        acc
    }

    /// `int_{t_i}^x (U(x) - U(s))^{q/(p-q)} W^gamma u V(a, s)^{pq/(p-q)} ds`.
    fn i4_partial(&self, i: usize, x: f64) -> f64 {
        let (e4, e5) = self.i4_exps();
        let lo = self.t.mesh.bounds[i];
        let h = x - lo;
        if h <= 0.0 {
            return 0.0;
        }
        let rule = &self.t.mesh.rule;
        (0..rule.len())
            .map(|g| {
                let s = lo + h * rule.nodes[g];
                let d = self.t.seg_phi(i, s, x);
                h * rule.weights[g] * mul0(pow0(d, e4) * self.t.phi_at(i, s), pow0(self.t.va_at(i, s), e5))
            })
            .sum()
    }

    fn i4_bounds(&self) -> Vec<f64> {
        let gn = self.t.gn();
        (0..self.t.ub.len())
            .into_par_iter()
            .map(|i| self.i4_head(i * gn, self.t.ub[i]))
            .collect()
    }

    fn i4_nodes(&self) -> Vec<f64> {
        let gn = self.t.gn();
        (0..self.t.un.len())
            .into_par_iter()
            .map(|j| {
                let i = j / gn;
                self.i4_head(i * gn, self.t.un[j]) + self.i4_partial(i, self.t.node(j))
            })
            .collect()
    }

    fn i4_at(&self, x: f64) -> f64 {
        let i = self.t.mesh.cell_of(x);
        self.i4_head(i * self.t.gn(), self.t.u_at(i, x)) + self.i4_partial(i, x)
    }

    /// `sup_{t < x} (U(x) - U(t))^a V(a, t)^b` at every node `x`, over all
    /// earlier bounds and nodes.
    fn sup_inner(&self, a: f64, b: f64) -> Vec<f64> {
        let gn = self.t.gn();
        let n = self.t.mesh.n_cells();
        let mut mu = Vec::with_capacity(n * (gn + 1) + 1);
        let mut lv = Vec::with_capacity(n * (gn + 1) + 1);
        let mut mx = Vec::with_capacity(n * (gn + 1) + 1);
        for i in 0..n {
            mu.push(self.t.ub[i]);
            lv.push(self.t.va_b[i].ln());
            mx.push(self.t.mesh.bounds[i]);
            for g in 0..gn {
                mu.push(self.t.un[i * gn + g]);
                lv.push(self.t.va_n[i * gn + g].ln());
                mx.push(self.t.mesh.node(i, g));
            }
        }
        (0..n * gn)
            .into_par_iter()
            .map(|j| {
                let idx = (j / gn) * (gn + 1) + 1 + j % gn;
                let uj = self.t.un[j];
                let val = |m: usize| {
                    let d = uj - mu[m];
                    if d <= 0.0 || lv[m] == f64::NEG_INFINITY {
                        f64::NEG_INFINITY
                    } else {
                        a * d.ln() + b * lv[m]
                    }
                };
                let mut best = f64::NEG_INFINITY;
                let mut arg = 0;
                for m in 0..idx {
                    if lv[m] == f64::INFINITY && uj > mu[m] {
                        return f64::INFINITY;
                    }
                    let v = val(m);
                    if v > best {
                        best = v;
                        arg = m;
                    }
                }
                if arg > 0 && arg + 1 < idx {
                    best = best.max(parabola_peak(
                        (mx[arg - 1], val(arg - 1)),
                        (mx[arg], best),
                        (mx[arg + 1], val(arg + 1)),
                    ));
                }
                best.exp()
            })
            .collect()
    }

    /// Maximum over bound values, refined inside the neighbouring cells.
    fn refine_sup<F: Fn(f64) -> f64 + Sync>(&self, vals: &[f64], f: F) -> f64 {
        let mut imax = 0;
        for (i, &v) in vals.iter().enumerate() {
            if v.is_nan() {
                continue;
            }
            if v == f64::INFINITY {
                return f64::INFINITY;
            }
            if v > vals[imax] || vals[imax].is_nan() {
                imax = i;
            }
        }
        let vmax = if vals[imax].is_nan() { 0.0 } else { vals[imax] };
        let b = &self.t.mesh.bounds;
        let lo = b[imax.saturating_sub(1)];
        let hi = b[(imax + 1).min(b.len() - 1)];
        if !(hi > lo) {
            return vmax;
        }
        let g = |x: f64| {
            if x > lo && x < hi {
                let v = f(x);
                if v.is_nan() {
                    0.0
                } else {
                    v
                }
            } else {
                0.0
            }
        };
        let tol = 1e-7 * (hi - lo) / (1.0 + lo.abs().max(hi.abs()));
        vmax.max(golden_max(&g, lo, hi, tol))
    }

    pub fn value(&self, idx: u8) -> f64 {
        let Exps { p, q, r } = self.e;
        let beta = self.t.beta;
        match idx {
            1 => {
                let phi1 = self.phi1_bounds();
                let vals: Vec<f64> = phi1
                    .iter()
                    .zip(&self.t.va_b)
                    .map(|(&f, &v)| mul0(pow0(f, 1.0 / r), v))
                    .collect();
                self.refine_sup(&vals, |x| {
                    let i = self.t.mesh.cell_of(x);
                    mul0(pow0(self.phi1_at(x), 1.0 / r), self.t.va_at(i, x))
                })
            }
            2 => {
                let s = self.sup_inner(r * p / (q * (p - r)), p * r / (p - r));
                let mut acc = 0.0;
                for (j, sj) in s.iter().enumerate() {
                    acc += self.t.weight(j) * mul0(self.omega(j), *sj);
                }
                pow0(acc, (p - r) / (p * r))
            }
            3 => {
                let s = self.sup_inner(r / q, p * r / (p - r));
                if s.iter().any(|x| x.is_infinite()) {
                    return f64::INFINITY;
                }
                let phi1 = self.phi1_nodes();
                let mut acc = 0.0;
                for j in 0..s.len() {
                    acc += self.t.weight(j) * mul0(pow0(phi1[j], r / (p - r)) * self.psi_o(j), s[j]);
                }
                pow0(acc, (p - r) / (p * r))
            }
            4 => {
                let ex = (p - q) / (p * q);
                let i4 = self.i4_bounds();
                let vals: Vec<f64> = i4
                    .iter()
                    .zip(&self.t.wb)
                    .map(|(&v, &w)| w.powf((1.0 - beta) / r) * pow0(v, ex))
                    .collect();
                self.refine_sup(&vals, |x| {
                    let i = self.t.mesh.cell_of(x);
                    self.t.w_at(i, x).powf((1.0 - beta) / r) * pow0(self.i4_at(x), ex)
                })
            }
            5 => {
                let i4 = self.i4_nodes();
                let ex = r * (p - q) / (q * (p - r));
                let mut acc = 0.0;
                for (j, v) in i4.iter().enumerate() {
                    acc += self.t.weight(j) * self.omega(j) * pow0(*v, ex);
                }
                pow0(acc, (p - r) / (p * r))
            }
            _ => f64::NAN,
        }
    }
}

/// Vertex value of the parabola through three points, when it is concave
/// with the vertex between the outer two; otherwise `-inf`.
pub(crate) fn parabola_peak(l: (f64, f64), m: (f64, f64), r: (f64, f64)) -> f64 {
    if !(l.1.is_finite() && m.1.is_finite() && r.1.is_finite()) {
        return f64::NEG_INFINITY;
    }
    let d1 = (m.1 - l.1) / (m.0 - l.0);
    let d2 = (r.1 - m.1) / (r.0 - m.0);
    let c = (d2 - d1) / (r.0 - l.0);
    if !(c < 0.0) {
        return f64::NEG_INFINITY;
    }
    // f(x) = m.1 + s (x - m.0) + c (x - m.0)^2
    let s = d1 + c * (m.0 - l.0);
    let x = m.0 - s / (2.0 * c);
    if !(x > l.0 && x < r.0) {
        return f64::NEG_INFINITY;
    }
    m.1 - s * s / (4.0 * c)
}

/// Which inequality a report characterizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Main,
    Monotone,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantReport {
    pub problem: Problem,
    pub regime: CaseTag,
    #[serde(with = "crate::serde_util::ext_real")]
    pub beta: f64,
    /// Names summed into `value`.
    pub combination: Vec<ConstantName>,
    #[serde(with = "crate::serde_util::ext_real")]
    pub value: f64,
    #[serde(with = "crate::serde_util::ext_real")]
    pub error: f64,
    pub finite: bool,
    pub constants: Vec<ConstantValue>,
    pub notes: Vec<String>,
}

impl ConstantReport {
    pub fn get(&self, name: ConstantName) -> Option<&ConstantValue> {
        self.constants.iter().find(|c| c.name == name)
    }
}

struct Setup {
    exps: Exps,
    gamma: f64,
    mode: VMode,
    power: f64,
}

fn setup(spec: &ProblemSpec, problem: Problem) -> Result<Setup> {
    spec.validate()?;
    let e = spec.exponents;
    Ok(match problem {
        Problem::Main => {
            e.require_main()?;
            Setup {
                exps: Exps { p: e.p, q: e.q, r: e.r },
                gamma: e.beta * e.q / e.r,
                mode: VMode::Power(e.p),
                power: 1.0,
            }
        }
        Problem::Monotone => Setup {
            exps: Exps {
                p: 1.0,
                q: 1.0 / e.p,
                r: e.q / e.p,
            },
            gamma: e.beta / e.q,
            mode: VMode::InverseTail,
            power: 1.0 / e.p,
        },
    })
}

fn evaluate(
    spec: &ProblemSpec,
    problem: Problem,
    indices: &[u8],
    settings: &ConstantsSettings,
) -> Result<(Vec<ConstantValue>, Vec<String>)> {
    let s = setup(spec, problem)?;
    let name = |i| match problem {
        Problem::Main => ConstantName::C(i),
        Problem::Monotone => ConstantName::CalC(i),
    };
    for &i in indices {
        if !s.exps.defined(i) {
            return Err(Error::InvalidArgument(format!(
                "{} is undefined for these exponents",
                name(i).label()
            )));
        }
    }
    let w = &spec.weights;
    let anchors: Anchors = normalized_anchors(&w.w, &spec.interval, spec.k_max, &spec.quad)?;
    let build = |plan: &MeshPlan| {
        Tables::build(
            spec.interval,
            (&w.u, &w.v, &w.w),
            s.gamma,
            spec.exponents.beta,
            s.mode,
            &anchors,
            plan,
            &spec.quad,
        )
    };
    let fine = build(&settings.plan)?;
    let coarse = if settings.error_estimate { Some(build(&settings.coarse())?) } else { None };
    let mut notes = fine.notes.clone();
    if let VData::Tail { tail_b, .. } = &fine.vdata {
        if tail_b[0].is_infinite() {
            notes.push("tail divergent: int_x^b v = inf, the calC constants vanish".into());
        }
    }
    let out = indices
        .iter()
        .map(|&i| {
            let v = Engine { t: &fine, e: s.exps }.value(i).powf(s.power);
            let err = match &coarse {
                Some(c) if v.is_finite() => {
                    let vc = Engine { t: c, e: s.exps }.value(i).powf(s.power);
                    if vc.is_finite() {
                        (v - vc).abs()
                    } else {
                        f64::INFINITY
                    }
                }
                _ => 0.0,
            };
            ConstantValue::new(name(i), v, err)
        })
        .collect();
    Ok((out, notes))
}

/// One of `C_1..C_5`.
pub fn compute_c(index: u8, spec: &ProblemSpec, settings: &ConstantsSettings) -> Result<ConstantValue> {
    Ok(evaluate(spec, Problem::Main, &[index], settings)?.0.remove(0))
}

/// One of `calC_1..calC_5`.
pub fn compute_calc(index: u8, spec: &ProblemSpec, settings: &ConstantsSettings) -> Result<ConstantValue> {
    Ok(evaluate(spec, Problem::Monotone, &[index], settings)?.0.remove(0))
}

fn characterize(spec: &ProblemSpec, problem: Problem, settings: &ConstantsSettings) -> Result<ConstantReport> {
    let s = setup(spec, problem)?;
    let e = spec.exponents;
    let regime = match problem {
        Problem::Main => CaseTag::main(e.p, e.q, e.r),
        Problem::Monotone => CaseTag::monotone(e.p, e.q),
    };
    let indices: Vec<u8> = (1..=5).filter(|&i| s.exps.defined(i)).collect();
    let (constants, mut notes) = evaluate(spec, problem, &indices, settings)?;
    let combination: Vec<ConstantName> = regime
        .combination()
        .iter()
        .filter(|&&i| i > 0)
        .map(|&i| match problem {
            Problem::Main => ConstantName::C(i),
            Problem::Monotone => ConstantName::CalC(i),
        })
        .collect();
    let mut value = 0.0;
    let mut error = 0.0;
    for n in &combination {
        let c = constants.iter().find(|c| c.name == *n).expect("combination member computed");
        value += c.value;
        error += c.quadrature_error;
    }
    if problem == Problem::Monotone && regime == CaseTag::III {
        notes.push("case iii: finiteness condition read as calC1 < inf".into());
    }
    Ok(ConstantReport {
        problem,
        regime,
        beta: e.beta,
        combination,
        value,
        error,
        finite: value.is_finite(),
        constants,
        notes,
    })
}

/// Regime dispatch and constant combination for the main inequality.
pub fn characterize_main(spec: &ProblemSpec, settings: &ConstantsSettings) -> Result<ConstantReport> {
    characterize(spec, Problem::Main, settings)
}

/// Regime dispatch and constant combination for nondecreasing functions.
pub fn characterize_monotone(spec: &ProblemSpec, settings: &ConstantsSettings) -> Result<ConstantReport> {
    characterize(spec, Problem::Monotone, settings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{IntervalSpec, WeightExpr};
    use crate::problem::{ExponentSet, Weights};

    fn quick() -> ConstantsSettings {
        ConstantsSettings {
            error_estimate: false,
            ..Default::default()
        }
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn trivial_spec() {
        let spec = ProblemSpec::unit(1.0, 1.0, 1.0, 0.0).unwrap();
        let c1 = compute_c(1, &spec, &ConstantsSettings::default()).unwrap();
        assert!(rel(c1.value, 0.5) < 1e-6, "{c1:?}");
        assert!(c1.quadrature_error < 1e-6);
        let k1 = compute_calc(1, &spec, &quick()).unwrap();
        assert!(rel(k1.value, 0.5) < 1e-6, "{k1:?}");
    }

    #[test]
    fn closed_forms_on_unit_interval() {
        let spec = ProblemSpec::unit(2.0, 2.0, 2.0, 0.0).unwrap();
        let c1 = compute_c(1, &spec, &quick()).unwrap().value;
        // V_2(0,x) = sqrt(x), Phi1(x) = (1-x)^2/2, maximum at x = 1/3
        let want = (0.5f64).sqrt() * (2.0f64 / 3.0) * (1.0f64 / 3.0).sqrt();
        assert!(rel(c1, want) < 1e-6, "{c1} vs {want}");
        // C4 with p = 2, q = 1, r = 2: I4(x) = int_0^x (x-t) t dt = x^3/6,
        // C4 = sup (1-x)^{1/2} (x^3/6)^{1/2} at x = 3/4
        let spec = ProblemSpec::unit(2.0, 1.0, 2.0, 0.0).unwrap();
        let c4 = compute_c(4, &spec, &quick()).unwrap().value;
        let want = (0.25f64 * 0.421875 / 6.0).sqrt();
        assert!(rel(c4, want) < 1e-6, "{c4} vs {want}");
    }

    #[test]
    fn integral_constants_closed_form() {
        // u = v = w = 1, p = 2, q = 2, r = 1 (case ii), beta = 0:
        // C2 = (int_0^1 (1-x) sup_t (x-t) t dx)^{1/2} = (int (1-x) x^2/4)^{1/2}
        let spec = ProblemSpec::unit(2.0, 2.0, 1.0, 0.0).unwrap();
        let c2 = compute_c(2, &spec, &quick()).unwrap().value;
        let want = (1.0f64 / 48.0).sqrt();
        assert!(rel(c2, want) < 1e-4, "{c2} vs {want}");
        // C5 with p = 2, q = r = 1: I4 = x^3/6, C5 = (int (1-x) x^3/6)^{1/2}
        let spec = ProblemSpec::unit(2.0, 1.0, 1.0, 0.0).unwrap();
        let c5 = compute_c(5, &spec, &quick()).unwrap().value;
        let want = (1.0f64 / 120.0).sqrt();
        assert!(rel(c5, want) < 1e-6, "{c5} vs {want}");
    }

    fn riemann_c1_inverse_v() -> f64 {
        // v = 1/t, p = q = r = 2, u = w = 1: V_2(0,x) = x/sqrt(2),
        // Phi1(x) = int_x^1 (t-x)^2... with r/q = 1: (1-x)^2/2
        let n = 1 << 20;
        let mut best: f64 = 0.0;
        for k in 0..n {
            let x = (k as f64 + 0.5) / n as f64;
            let phi1 = (1.0 - x) * (1.0 - x) / 2.0;
            best = best.max(phi1.sqrt() * x / 2f64.sqrt());
        }
        best
    }

    #[test]
    fn inverse_power_v_against_fine_grid() {
        let spec = ProblemSpec::new(
            IntervalSpec::new(0.0, 1.0).unwrap(),
            ExponentSet::new(2.0, 2.0, 2.0, 0.0).unwrap(),
            Weights {
                u: WeightExpr::constant(1.0),
                v: WeightExpr::power(1.0, -1.0),
                w: WeightExpr::constant(1.0),
            },
        )
        .unwrap();
        let c1 = compute_c(1, &spec, &quick()).unwrap().value;
        let want = riemann_c1_inverse_v();
        assert!(rel(c1, want) < 1e-6, "{c1} vs {want}");
    }

    #[test]
    fn homogeneity_in_w_and_v() {
        let spec = ProblemSpec::new(
            IntervalSpec::new(0.0, 1.0).unwrap(),
            ExponentSet::new(2.0, 1.0, 3.0, 0.0).unwrap(),
            Weights {
                u: WeightExpr::power(1.0, 0.5),
                v: WeightExpr::power(1.0, -0.5),
                w: WeightExpr::power(1.0, 1.0),
            },
        )
        .unwrap();
        let base = characterize_main(&spec, &quick()).unwrap();
        let lam: f64 = 3.7;
        let sw = characterize_main(&spec.scale_w(lam), &quick()).unwrap();
        let sv = characterize_main(&spec.scale_v(lam), &quick()).unwrap();
        for c in &base.constants {
            let a = sw.get(c.name).unwrap().value;
            assert!(rel(a, lam.powf(1.0 / 3.0) * c.value) < 1e-10, "{:?}: {a} vs {}", c.name, c.value);
            let b = sv.get(c.name).unwrap().value;
            assert!(rel(b, lam.powf(-0.5) * c.value) < 1e-10, "{:?}", c.name);
        }
    }

    #[test]
    fn monotone_scaling_in_v() {
        let spec = ProblemSpec::unit(1.0, 1.0, 1.0, 0.0).unwrap();
        let a = compute_calc(1, &spec, &quick()).unwrap().value;
        let b = compute_calc(1, &spec.scale_v(5.0), &quick()).unwrap().value;
        assert!(rel(b, a / 5.0) < 1e-10);
    }

    #[test]
    fn dispatch_and_trivial_regime() {
        let spec = ProblemSpec::unit(2.0, 3.0, 4.0, 0.0).unwrap();
        let rep = characterize_main(&spec, &quick()).unwrap();
        assert_eq!(rep.regime, CaseTag::I);
        assert_eq!(rep.combination, vec![ConstantName::C(1)]);
        assert_eq!(rep.constants.len(), 1);
        let spec = ProblemSpec::unit(2.0, 3.0, 1.0, 0.0).unwrap();
        let rep = characterize_main(&spec, &quick()).unwrap();
        assert_eq!(rep.combination, vec![ConstantName::C(2), ConstantName::C(3)]);
        assert!(rep.finite);
        let spec = ProblemSpec::unit(0.5, 1.0, 1.0, 0.0).unwrap();
        assert!(matches!(characterize_main(&spec, &quick()), Err(Error::TrivialRegime { .. })));
        assert!(characterize_monotone(&spec, &quick()).is_ok());
        assert!(compute_c(4, &ProblemSpec::unit(1.0, 1.0, 1.0, 0.0).unwrap(), &quick()).is_err());
    }

    #[test]
    fn singular_dual_weight_is_infinite() {
        // p = 1 with v = t: 1/v unbounded at 0, so V_1(0, x) = inf
        let spec = ProblemSpec::unit(1.0, 1.0, 1.0, 0.0)
            .unwrap()
            .with_weights(WeightExpr::constant(1.0), WeightExpr::power(1.0, 1.0), WeightExpr::constant(1.0));
        let c1 = compute_c(1, &spec, &quick()).unwrap();
        assert!(!c1.finite);
        // p = 2 with v = t: int_0^x t^{-1} dt = inf
        let spec = ProblemSpec::unit(2.0, 2.0, 2.0, 0.0)
            .unwrap()
            .with_weights(WeightExpr::constant(1.0), WeightExpr::power(1.0, 1.0), WeightExpr::constant(1.0));
        assert!(!compute_c(1, &spec, &quick()).unwrap().finite);
    }
}
