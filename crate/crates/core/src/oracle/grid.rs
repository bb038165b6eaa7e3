//! Piecewise-constant candidates on a graded grid and the nested ratio
//! evaluated by cumulative tables, with its reverse-mode gradient.

use super::ascent::{Grad, Objective};
use crate::constants::tables::{divergent_to_inf, mul0, normalized_anchors};
use crate::discretize::sequence::TailEvaluator;
use crate::error::{Error, Result};
use crate::measure::quad::integrate_with_breaks;
use crate::measure::{GaussRule, Mesh, MeshPlan};
use crate::problem::ProblemSpec;

const GAUSS: usize = 4;
const END_GRADING: usize = 20;
const BREAK_GRADING: usize = 8;
/// Smallest relative gap between consecutive anchors of the grid.
const MIN_GAP: f64 = 1e-9;

/// What the right-hand side integrates per cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Dual {
    /// `int_cell v`.
    Plain,
    /// `int_cell v`, the last cell extended to `b` (nondecreasing candidates
    /// keep their last value up to `b`).
    Extended,
    /// `int_cell int_x^b v dx`.
    Tail,
}

/// Graded grid aligned with the normalized dyadic levels of `W`, with about
/// `n_cells` cells.
pub(crate) fn oracle_grid(spec: &ProblemSpec, n_cells: usize) -> Result<(Vec<f64>, Vec<String>)> {
    let anchors = normalized_anchors(&spec.weights.w, &spec.interval, spec.k_max, &spec.quad)?;
    if anchors.points.len() < 2 {
        return Err(Error::DegenerateW("fewer than two dyadic levels".into()));
    }
    // levels closer than the grid can resolve carry no usable cells
    let mut points = vec![anchors.points[0]];
    for &(k, x) in &anchors.points[1..] {
        let prev = points[points.len() - 1].1;
        if x - prev >= MIN_GAP * x.abs().max(1.0) {
            points.push((k, x));
        }
    }
    let mut notes = anchors.truncation;
    if points.len() < anchors.points.len() {
        let (k, x) = points[points.len() - 1];
        notes.push(format!("oracle grid stops at level {k} (x = {x:.12e}): finer levels are below resolution"));
    }
    if points.len() < 2 {
        return Err(Error::DegenerateW("fewer than two resolvable dyadic levels".into()));
    }
    let breaks = spec.breakpoints();
    let end = if anchors.regular_left { END_GRADING } else { 0 };
    let fixed = end + 2 * BREAK_GRADING * breaks.len();
    let sub = (n_cells.saturating_sub(fixed) / (points.len() - 1)).max(1);
    let plan = MeshPlan {
        subdivisions: sub,
        gauss: 1,
        end_grading: end,
        break_grading: BREAK_GRADING,
    };
    let mesh = Mesh::build(&points, anchors.regular_left, &breaks, &plan)?;
    Ok((mesh.bounds, notes))
}

#[inline]
fn pw(x: f64, e: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if e == 1.0 {
        x
    } else {
        x.powf(e)
    }
}

/// `d/dx x^e`, capped at zero where it blows up.
#[inline]
fn dpw(x: f64, e: f64) -> f64 {
    if e == 1.0 {
        1.0
    } else if x <= 0.0 {
        0.0
    } else {
        e * x.powf(e - 1.0)
    }
}

pub(crate) struct GridModel {
    pub grid: Vec<f64>,
    rule: GaussRule,
    u: Vec<f64>,
    w: Vec<f64>,
    pub v_cell: Vec<f64>,
    w_tail: f64,
}

struct Pass {
    f_node: Vec<f64>,
    g_node: Vec<f64>,
    g_end: f64,
    lhs: f64,
    rhs: f64,
}

impl GridModel {
    pub fn new(spec: &ProblemSpec, grid: Vec<f64>, dual: Dual) -> Result<GridModel> {
        let iv = spec.interval;
        if grid.len() < 2 {
            return Err(Error::InvalidArgument("a grid needs at least one cell".into()));
        }
        if grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|p| !(p[0] < p[1])) {
            return Err(Error::InvalidArgument("grid must be finite and strictly increasing".into()));
        }
        if grid[0] < iv.a {
            return Err(Error::OutOfDomain { t: grid[0] });
        }
        if grid[grid.len() - 1] > iv.b {
            return Err(Error::OutOfDomain { t: grid[grid.len() - 1] });
        }
        let n = grid.len() - 1;
        let wt = &spec.weights;
        let end = grid[n];
        let w_tail = TailEvaluator::new(&wt.w, &iv, &spec.quad).at(end)?;
        if !w_tail.is_finite() {
            return Err(Error::DegenerateW(format!("W({end}) is infinite")));
        }
        let rule = GaussRule::new(GAUSS);
        let mut u = Vec::with_capacity(n * GAUSS);
        let mut w = Vec::with_capacity(n * GAUSS);
        for i in 0..n {
            let h = grid[i + 1] - grid[i];
            for &xi in &rule.nodes {
                let t = grid[i] + h * xi;
                u.push(wt.u.value(t));
                w.push(wt.w.value(t));
            }
        }
        let breaks = wt.v.breakpoints();
        let v = |t: f64| wt.v.value(t);
        let cell = |lo: f64, hi: f64| divergent_to_inf(integrate_with_breaks(v, lo, hi, &breaks, &spec.quad));
        let mut v_cell = Vec::with_capacity(n);
        match dual {
            Dual::Plain | Dual::Extended => {
                for i in 0..n {
                    v_cell.push(cell(grid[i], grid[i + 1])?);
                }
                if dual == Dual::Extended {
                    v_cell[n - 1] += cell(end, iv.b)?;
                }
            }
            Dual::Tail => {
                // int_cell int_x^b v = h * V(t_{i+1}) + int_cell (t - t_i) v(t) dt
                let mut right = cell(end, iv.b)?;
                v_cell.resize(n, 0.0);
                for i in (0..n).rev() {
                    let (lo, hi) = (grid[i], grid[i + 1]);
                    let inner =
                        divergent_to_inf(integrate_with_breaks(|t| (t - lo) * v(t), lo, hi, &breaks, &spec.quad))?;
                    v_cell[i] = mul0(hi - lo, right) + inner;
                    right += cell(lo, hi)?;
                }
            }
        }
        Ok(GridModel {
            grid,
            rule,
            u,
            w,
            v_cell,
            w_tail,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.grid.len() - 1
    }

    fn forward(&self, e: &Exps, integrate: bool, f: &[f64]) -> Pass {
        let n = self.n_cells();
        let gn = GAUSS;
        let rho = e.r / e.q;
        let mut f_node = vec![0.0; n * gn];
        let mut g_node = vec![0.0; n * gn];
        let mut q = [0.0; GAUSS];
        let (mut fb, mut gb) = (0.0, 0.0);
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        for i in 0..n {
            let h = self.grid[i + 1] - self.grid[i];
            if f[i] > 0.0 {
                rhs += mul0(pw(f[i], e.p), self.v_cell[i]);
            }
            for g in 0..gn {
                let fv = if integrate { fb + f[i] * h * self.rule.nodes[g] } else { f[i] };
                f_node[i * gn + g] = fv;
                q[g] = mul0(pw(fv, e.q), self.u[i * gn + g]);
            }
            let mut cell = 0.0;
            for g in 0..gn {
                let mut acc = 0.0;
                for k in 0..gn {
                    acc += self.rule.partial[g][k] * q[k];
                }
                let gv = gb + h * acc;
                g_node[i * gn + g] = gv;
                cell += self.rule.weights[g] * mul0(self.w[i * gn + g], pw(gv, rho));
            }
            lhs += h * cell;
            let mut inc = 0.0;
            for k in 0..gn {
                inc += self.rule.weights[k] * q[k];
            }
            gb += h * inc;
            if integrate {
                fb += f[i] * h;
            }
        }
        lhs += mul0(pw(gb, rho), self.w_tail);
        Pass {
            f_node,
            g_node,
            g_end: gb,
            lhs,
            rhs,
        }
    }

    fn log_ratio(pass: &Pass, e: &Exps) -> f64 {
        if pass.lhs <= 0.0 || !pass.rhs.is_finite() || pass.lhs.is_nan() {
            return f64::NEG_INFINITY;
        }
        pass.lhs.ln() / e.r - pass.rhs.ln() / e.p
    }

    pub fn value(&self, e: &Exps, integrate: bool, f: &[f64]) -> f64 {
        Self::log_ratio(&self.forward(e, integrate, f), e)
    }

    /// Log-ratio, its gradient in `f`, and the gradient of the log of the
    /// left-hand side alone.
    pub fn gradient(&self, e: &Exps, integrate: bool, f: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
        let n = self.n_cells();
        let gn = GAUSS;
        let pass = self.forward(e, integrate, f);
        let value = Self::log_ratio(&pass, e);
        if !value.is_finite() {
            return (value, vec![0.0; n], vec![0.0; n]);
        }
        let rho = e.r / e.q;
        let mut dl = vec![0.0; n];
        let mut s = mul0(dpw(pass.g_end, rho), self.w_tail);
        let mut t = 0.0;
        let mut gbar = [0.0; GAUSS];
        for i in (0..n).rev() {
            let h = self.grid[i + 1] - self.grid[i];
            let mut sum_gbar = 0.0;
            for g in 0..gn {
                let j = i * gn + g;
                gbar[g] = h * self.rule.weights[g] * mul0(self.w[j], dpw(pass.g_node[j], rho));
                sum_gbar += gbar[g];
            }
            let mut direct = 0.0;
            let mut sum_fbar = 0.0;
            for k in 0..gn {
                let j = i * gn + k;
                let mut qbar = self.rule.weights[k] * s;
                for g in 0..gn {
                    qbar += gbar[g] * self.rule.partial[g][k];
                }
                qbar *= h;
                let fbar = mul0(qbar, mul0(dpw(pass.f_node[j], e.q), self.u[j]));
                if integrate {
                    direct += fbar * h * self.rule.nodes[k];
                } else {
                    direct += fbar;
                }
                sum_fbar += fbar;
            }
            dl[i] = if integrate { direct + h * t } else { direct };
            s += sum_gbar;
            t += sum_fbar;
        }
        let scale = 1.0 / (e.r * pass.lhs);
        let mut d = Vec::with_capacity(n);
        for i in 0..n {
            dl[i] *= scale;
            let pen = if f[i] > 0.0 {
                mul0(dpw(f[i], e.p), self.v_cell[i]) / (e.p * pass.rhs)
            } else {
                0.0
            };
            d.push(dl[i] - pen);
        }
        (value, d, dl)
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Exps {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

/// The nested ratio as an objective; with `increments` the variables are
/// the jumps of a nondecreasing step function, and `outer` raises the ratio
/// to a power.
pub(crate) struct GridObjective<'a> {
    pub model: &'a GridModel,
    pub e: Exps,
    pub integrate: bool,
    pub increments: bool,
    pub outer: f64,
    allowed: Vec<bool>,
}

impl<'a> GridObjective<'a> {
    pub fn new(model: &'a GridModel, e: Exps, integrate: bool, increments: bool, outer: f64) -> Self {
        let n = model.n_cells();
        let allowed = if increments {
            // a jump at j lifts every later cell
            let mut ok = vec![true; n];
            let mut blocked = false;
            for i in (0..n).rev() {
                blocked |= !model.v_cell[i].is_finite();
                ok[i] = !blocked;
            }
            ok
        } else {
            model.v_cell.iter().map(|v| v.is_finite() && *v > 0.0).collect()
        };
        GridObjective {
            model,
            e,
            integrate,
            increments,
            outer,
            allowed,
        }
    }

    pub fn function(&self, x: &[f64]) -> Vec<f64> {
        if !self.increments {
            return x.to_vec();
        }
        let mut acc = 0.0;
        x.iter()
            .map(|d| {
                acc += d;
                acc
            })
            .collect()
    }
}

impl Objective for GridObjective<'_> {
    fn dim(&self) -> usize {
        self.model.n_cells()
    }

    fn allowed(&self, i: usize) -> bool {
        self.allowed[i]
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.outer * self.model.value(&self.e, self.integrate, &self.function(x))
    }

    fn gradient(&self, x: &[f64]) -> Grad {
        let (value, mut d, dl) = self.model.gradient(&self.e, self.integrate, &self.function(x));
        if self.increments {
            let mut acc = 0.0;
            for v in d.iter_mut().rev() {
                acc += *v;
                *v = acc;
            }
        }
        for v in &mut d {
            *v *= self.outer;
        }
        let lhs = (!self.increments && self.e.p > 1.0).then_some(dl);
        Grad {
            value: self.outer * value,
            d,
            lhs,
        }
    }

    fn power_step(&self, _x: &[f64], grad: &Grad) -> Option<Vec<f64>> {
        let lhs = grad.lhs.as_ref()?;
        let k = 1.0 / (self.e.p - 1.0);
        let logs: Vec<f64> = lhs
            .iter()
            .zip(&self.model.v_cell)
            .enumerate()
            .map(|(i, (&l, &v))| {
                if self.allowed[i] && l > 0.0 && v > 0.0 {
                    k * (l.ln() - v.ln())
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !top.is_finite() {
            return None;
        }
        Some(logs.iter().map(|l| (l - top).exp()).collect())
    }
}
