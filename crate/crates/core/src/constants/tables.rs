//! Cumulative tables on a shared mesh: `W`, the inner integral
//! `U = int W^gamma u`, and the dual weight `V(a, .)`, at cell bounds and at
//! Gauss nodes, plus partial-cell evaluators for points between nodes.

use crate::discretize::sequence::{level_points, TailEvaluator};
use crate::error::{Error, Result};
use crate::measure::functional::ess_sup_with_breaks;
use crate::measure::quad::{integrate_with_breaks, QuadSettings};
use crate::measure::{IntervalSpec, Mesh, MeshPlan, WeightExpr};

/// Accuracy of the mesh anchors; looser than the discretizing sequence so
/// that levels reach further into the tail in double precision.
pub(crate) const ANCHOR_TOL: f64 = 1e-6;

/// Levels explored towards `a` when `W(a+) = inf`.
pub(crate) const LEFT_LEVELS: i64 = 40;

/// How the dual weight `V(a, x)` is formed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum VMode {
    /// `V_p(a, x)` of the weight `v`.
    Power(f64),
    /// `1 / int_x^b v`.
    InverseTail,
}

#[derive(Debug, Clone)]
pub(crate) enum VData {
    /// `Psi = int v^{-1/(p-1)}`: cumulative from `a` at bounds, per cell,
    /// and from each cell's left bound to its nodes; `V = Psi^{(p-1)/p}`.
    Integral {
        psi_b: Vec<f64>,
        cell: Vec<f64>,
        node_part: Vec<f64>,
        exponent: f64,
    },
    /// Cell suprema of `1/v` and the running maximum inside each cell.
    /// `start` is the right limit at each cell's left bound.
    Sup {
        head: f64,
        start: Vec<f64>,
        cell_max: Vec<f64>,
        node_run: Vec<f64>,
    },
    /// `int_x^b v` at bounds and nodes.
    Tail { tail_b: Vec<f64> },
}

/// Normalized anchors `W(x_k) = W_ref 2^{-k}`; invariant under `w -> lambda w`.
#[derive(Debug, Clone)]
pub(crate) struct Anchors {
    pub points: Vec<(i64, f64)>,
    pub regular_left: bool,
    pub w_last: f64,
    pub truncation: Vec<String>,
}

pub(crate) fn normalized_anchors(
    w: &WeightExpr,
    interval: &IntervalSpec,
    k_max: usize,
    settings: &QuadSettings,
) -> Result<Anchors> {
    let tail = TailEvaluator::new(w, interval, settings);
    let w_a = if interval.a.is_finite() { tail.at(interval.a)? } else { f64::INFINITY };
    let pts = if w_a.is_finite() {
        level_points(w, interval, w_a, (0, interval.a, w_a), k_max as i64, None, ANCHOR_TOL, settings)?
    } else {
        let mid = interval.from_unit(0.5);
        let w_mid = tail.at(mid)?;
        if !w_mid.is_finite() || w_mid <= 0.0 {
            return Err(Error::DegenerateW(format!("W({mid}) = {w_mid}")));
        }
        level_points(w, interval, w_mid, (0, mid, w_mid), k_max as i64, Some(-LEFT_LEVELS), ANCHOR_TOL, settings)?
    };
    Ok(Anchors {
        points: pts.levels.iter().copied().zip(pts.points.iter().copied()).collect(),
        regular_left: w_a.is_finite(),
        w_last: *pts.values.last().unwrap_or(&0.0),
        truncation: pts.truncation,
    })
}

/// Exact anchors of the discretizing sequence `W(x_k) = 2^{-k}`.
pub(crate) fn sequence_anchors(
    seq: &crate::discretize::DiscretizingSequence,
) -> Anchors {
    Anchors {
        points: seq.levels.iter().copied().zip(seq.points.iter().copied()).collect(),
        regular_left: seq.n.is_some(),
        w_last: *seq.w_values.last().unwrap_or(&0.0),
        truncation: seq.truncation.clone(),
    }
}

pub(crate) struct Tables<'a> {
    pub mesh: Mesh,
    pub u: &'a WeightExpr,
    pub v: &'a WeightExpr,
    pub w: &'a WeightExpr,
    pub gamma: f64,
    pub beta: f64,
    pub mode: VMode,
    /// `W` at bounds and nodes.
    pub wb: Vec<f64>,
    pub wn: Vec<f64>,
    /// `w` at nodes.
    pub wv: Vec<f64>,
    /// `W^gamma u` at nodes.
    pub phi: Vec<f64>,
    /// `U` from the first bound, at bounds and nodes.
    pub ub: Vec<f64>,
    pub un: Vec<f64>,
    pub vdata: VData,
    /// `V(a, .)` at bounds and nodes.
    pub va_b: Vec<f64>,
    pub va_n: Vec<f64>,
    pub notes: Vec<String>,
}

impl<'a> Tables<'a> {
    #[allow(clippy::too_many_arguments)]
    pub fn build(
        interval: IntervalSpec,
        weights: (&'a WeightExpr, &'a WeightExpr, &'a WeightExpr),
        gamma: f64,
        beta: f64,
        mode: VMode,
        anchors: &Anchors,
        plan: &MeshPlan,
        settings: &QuadSettings,
    ) -> Result<Tables<'a>> {
        let (u, v, w) = weights;
        let mut breaks = u.breakpoints();
        breaks.extend(v.breakpoints());
        breaks.extend(w.breakpoints());
        breaks.retain(|&t| interval.contains_open(t));
        breaks.sort_by(|a, b| a.total_cmp(b));
        breaks.dedup();
        let mesh = Mesh::build(&anchors.points, anchors.regular_left, &breaks, plan)?;
        let n = mesh.n_cells();
        let gn = mesh.rule.len();
        let mut notes = anchors.truncation.clone();

        let mut wv = vec![0.0; n * gn];
        let mut uv = vec![0.0; n * gn];
        for i in 0..n {
            for g in 0..gn {
                let t = mesh.node(i, g);
                wv[i * gn + g] = w.value(t);
                uv[i * gn + g] = u.value(t);
            }
        }
        if wv.iter().any(|x| !(x.is_finite() && *x > 0.0)) || uv.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::InvalidArgument("weights must be positive and finite on the mesh".into()));
        }

        // W from the right: start at the last anchor's exact value
        let mut wb = vec![0.0; n + 1];
        wb[n] = anchors.w_last;
        let mut wn = vec![0.0; n * gn];
        for i in (0..n).rev() {
            let h = mesh.width(i);
            let mut cell = 0.0;
            for g in 0..gn {
                cell += mesh.rule.weights[g] * wv[i * gn + g];
            }
            wb[i] = wb[i + 1] + h * cell;
            for g in 0..gn {
                let mut part = 0.0;
                for gp in 0..gn {
                    part += (mesh.rule.weights[gp] - mesh.rule.partial[g][gp]) * wv[i * gn + gp];
                }
                wn[i * gn + g] = wb[i + 1] + h * part;
            }
        }
        if !interval.b.is_finite() || anchors.w_last > 0.0 {
            notes.push(format!(
                "tail beyond x = {:.6e} (W = {:.3e}) not meshed",
                mesh.hi(),
                anchors.w_last
            ));
        }

        let phi: Vec<f64> = wn.iter().zip(&uv).map(|(wt, ut)| wt.powf(gamma) * ut).collect();
        let (ub, un) = cumulate(&mesh, &phi, 0.0);

        let special = special_cells(&mesh, &v.breakpoints(), anchors.regular_left);
        let head_open = !anchors.regular_left;
        let (vdata, va_b, va_n) = match mode {
            VMode::Power(p) if p > 1.0 => {
                let e = -1.0 / (p - 1.0);
                let psi: Vec<f64> = (0..n * gn)
                    .map(|j| v.value(mesh.node(j / gn, j % gn)).powf(e))
                    .collect();
                let head = if head_open {
                    divergent_to_inf(integrate_with_breaks(
                        |t| v.value(t).powf(e),
                        interval.a,
                        mesh.lo(),
                        &v.breakpoints(),
                        settings,
                    ))?
                } else {
                    0.0
                };
                let mut cell = vec![0.0; n];
                let mut node_part = vec![0.0; n * gn];
                for i in 0..n {
                    let h = mesh.width(i);
                    cell[i] = h * (0..gn).map(|g| mesh.rule.weights[g] * psi[i * gn + g]).sum::<f64>();
                    for g in 0..gn {
                        node_part[i * gn + g] =
                            h * (0..gn).map(|gp| mesh.rule.partial[g][gp] * psi[i * gn + gp]).sum::<f64>();
                    }
                }
                // cells touching singular points: adaptive, divergence becomes +inf
                for &(i, sing_left) in &special {
                    let val = divergent_to_inf(integrate_with_breaks(
                        |t| v.value(t).powf(e),
                        mesh.bounds[i],
                        mesh.bounds[i + 1],
                        &[],
                        settings,
                    ))?;
                    cell[i] = val;
                    if val.is_infinite() && sing_left {
                        for x in node_part[i * gn..(i + 1) * gn].iter_mut() {
                            *x = f64::INFINITY;
                        }
                    }
                }
                let mut psi_b = vec![head; n + 1];
                let mut psi_n = vec![0.0; n * gn];
                for i in 0..n {
                    for g in 0..gn {
                        psi_n[i * gn + g] = psi_b[i] + node_part[i * gn + g];
                    }
                    psi_b[i + 1] = psi_b[i] + cell[i];
                }
                let ex = (p - 1.0) / p;
                let va_b = psi_b.iter().map(|x| x.powf(ex)).collect();
                let va_n = psi_n.iter().map(|x| x.powf(ex)).collect();
                (
                    VData::Integral {
                        psi_b,
                        cell,
                        node_part,
                        exponent: ex,
                    },
                    va_b,
                    va_n,
                )
            }
            VMode::Power(_) => {
                let vb = v.breakpoints();
                let head = if head_open {
                    ess_sup_with_breaks(|t| 1.0 / v.value(t), interval.a, mesh.lo(), &vb, settings)?
                } else {
                    0.0
                };
                let mut cell_max = vec![0.0; n];
                let mut node_run = vec![0.0; n * gn];
                let mut start = vec![0.0; n];
                for i in 0..n {
                    let (lo, hi) = (mesh.bounds[i], mesh.bounds[i + 1]);
                    let h = hi - lo;
                    if special.iter().any(|s| s.0 == i) {
                        for g in 0..gn {
                            node_run[i * gn + g] =
                                ess_sup_with_breaks(|t| 1.0 / v.value(t), lo, mesh.node(i, g), &vb, settings)?;
                        }
                        cell_max[i] = ess_sup_with_breaks(|t| 1.0 / v.value(t), lo, hi, &vb, settings)?;
                        start[i] = node_run[i * gn];
                    } else {
                        start[i] = 1.0 / v.value(lo + 1e-9 * h);
                        let mut run = start[i];
                        for g in 0..gn {
                            run = run.max(1.0 / v.value(mesh.node(i, g)));
                            node_run[i * gn + g] = run;
                        }
                        cell_max[i] = run.max(1.0 / v.value(hi - 1e-9 * h));
                    }
                }
                let mut va_b = vec![0.0; n + 1];
                let mut va_n = vec![0.0; n * gn];
                // bounds carry the right limit V(a, t_i+)
                let mut run = head;
                for i in 0..n {
                    va_b[i] = run.max(start[i]);
                    for g in 0..gn {
                        va_n[i * gn + g] = run.max(node_run[i * gn + g]);
                    }
                    run = run.max(cell_max[i]);
                }
                va_b[n] = run;
                (
                    VData::Sup {
                        head,
                        start,
                        cell_max,
                        node_run,
                    },
                    va_b,
                    va_n,
                )
            }
            VMode::InverseTail => {
                let last = divergent_to_inf(integrate_with_breaks(
                    |t| v.value(t),
                    mesh.hi(),
                    interval.b,
                    &v.breakpoints(),
                    settings,
                ))?;
                let vals: Vec<f64> = (0..n * gn).map(|j| v.value(mesh.node(j / gn, j % gn))).collect();
                let mut tail_b = vec![0.0; n + 1];
                let mut tail_n = vec![0.0; n * gn];
                tail_b[n] = last;
                for i in (0..n).rev() {
                    let h = mesh.width(i);
                    let spec = special.iter().find(|s| s.0 == i);
                    let cell = match spec {
                        Some(_) => divergent_to_inf(integrate_with_breaks(
                            |t| v.value(t),
                            mesh.bounds[i],
                            mesh.bounds[i + 1],
                            &[],
                            settings,
                        ))?,
                        None => h * (0..gn).map(|g| mesh.rule.weights[g] * vals[i * gn + g]).sum::<f64>(),
                    };
                    tail_b[i] = tail_b[i + 1] + cell;
                    for g in 0..gn {
                        let mut part = 0.0;
                        for gp in 0..gn {
                            part += (mesh.rule.weights[gp] - mesh.rule.partial[g][gp]) * vals[i * gn + gp];
                        }
                        let singular_right = matches!(spec, Some(&(_, false))) && cell.is_infinite();
                        tail_n[i * gn + g] = if singular_right {
                            f64::INFINITY
                        } else {
                            tail_b[i + 1] + h * part
                        };
                    }
                }
                let va_b = tail_b.iter().map(|x| 1.0 / x).collect();
                let va_n = tail_n.iter().map(|x| 1.0 / x).collect();
                (VData::Tail { tail_b }, va_b, va_n)
            }
        };

        Ok(Tables {
            mesh,
            u,
            v,
            w,
            gamma,
            beta,
            mode,
            wb,
            wn,
            wv,
            phi,
            ub,
            un,
            vdata,
            va_b,
            va_n,
            notes,
        })
    }

    pub fn gn(&self) -> usize {
        self.mesh.rule.len()
    }

    /// `h_i W_g` for node `j`.
    pub fn weight(&self, j: usize) -> f64 {
        let gn = self.gn();
        self.mesh.width(j / gn) * self.mesh.rule.weights[j % gn]
    }

    pub fn node(&self, j: usize) -> f64 {
        let gn = self.gn();
        self.mesh.node(j / gn, j % gn)
    }

    /// Gauss points and weights mapped onto `[x, y]`.
    fn sub_rule(&self, x: f64, y: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = y - x;
        self.mesh
            .rule
            .nodes
            .iter()
            .zip(&self.mesh.rule.weights)
            .map(move |(s, wt)| (x + h * s, h * wt))
    }

    /// `W(x)` for `x` in cell `i`.
    pub fn w_at(&self, i: usize, x: f64) -> f64 {
        let hi = self.mesh.bounds[i + 1];
        if x >= hi {
            return self.wb[i + 1];
        }
        self.wb[i + 1] + self.sub_rule(x, hi).map(|(t, wt)| wt * self.w.value(t)).sum::<f64>()
    }

    pub fn phi_at(&self, i: usize, x: f64) -> f64 {
        self.w_at(i, x).powf(self.gamma) * self.u.value(x)
    }

    /// `int_x^y W^gamma u` inside cell `i`.
    pub fn seg_phi(&self, i: usize, x: f64, y: f64) -> f64 {
        if y <= x {
            return 0.0;
        }
        self.sub_rule(x, y).map(|(t, wt)| wt * self.phi_at(i, t)).sum()
    }

    pub fn u_at(&self, i: usize, x: f64) -> f64 {
        self.ub[i] + self.seg_phi(i, self.mesh.bounds[i], x)
    }

    /// `V(a, x)` for `x` in cell `i`.
    pub fn va_at(&self, i: usize, x: f64) -> f64 {
        let lo = self.mesh.bounds[i];
        let hi = self.mesh.bounds[i + 1];
        match &self.vdata {
            VData::Integral {
                psi_b,
                node_part,
                exponent,
                ..
            } => {
                if psi_b[i].is_infinite() || node_part[i * self.gn()].is_infinite() {
                    return f64::INFINITY;
                }
                let e = match self.mode {
                    VMode::Power(p) => -1.0 / (p - 1.0),
                    VMode::InverseTail => unreachable!(),
                };
                let part: f64 = self.sub_rule(lo, x).map(|(t, wt)| wt * self.v.value(t).powf(e)).sum();
                (psi_b[i] + part).powf(*exponent)
            }
            VData::Sup {
                head,
                start,
                cell_max,
                node_run,
            } => {
                let mut run = cell_max[..i].iter().fold(head.max(start[i]), |m, &c| m.max(c));
                let gn = self.gn();
                for g in 0..gn {
                    if self.mesh.node(i, g) <= x {
                        run = run.max(node_run[i * gn + g]);
                    }
                }
                run.max(1.0 / self.v.value(x))
            }
            VData::Tail { tail_b, .. } => {
                let part: f64 = self.sub_rule(x, hi).map(|(t, wt)| wt * self.v.value(t)).sum();
                1.0 / (tail_b[i + 1] + part)
            }
        }
    }
}

impl Tables<'_> {
    /// `V_p` restricted to cell `i`: its integral or supremum part.
    pub fn local_cell(&self, i: usize) -> f64 {
        match &self.vdata {
            VData::Integral { cell, .. } => cell[i],
            VData::Sup { cell_max, .. } => cell_max[i],
            VData::Tail { .. } => f64::NAN,
        }
    }

    /// Right limit at the left bound of cell `i`, from that bound.
    pub fn local_start(&self, i: usize) -> f64 {
        match &self.vdata {
            VData::Sup { start, .. } => start[i],
            _ => 0.0,
        }
    }

    /// Part of node `j` from the left bound of its cell.
    pub fn local_node(&self, j: usize) -> f64 {
        match &self.vdata {
            VData::Integral { node_part, .. } => node_part[j],
            VData::Sup { node_run, .. } => node_run[j],
            VData::Tail { .. } => f64::NAN,
        }
    }

    pub fn local_add(&self, acc: f64, x: f64) -> f64 {
        match &self.vdata {
            VData::Integral { .. } => acc + x,
            _ => acc.max(x),
        }
    }

    pub fn local_finish(&self, acc: f64) -> f64 {
        match &self.vdata {
            VData::Integral { exponent, .. } => acc.powf(*exponent),
            _ => acc,
        }
    }
}

/// Cumulative sums from the first bound: `(at bounds, at nodes)`.
pub(crate) fn cumulate(mesh: &Mesh, vals: &[f64], start: f64) -> (Vec<f64>, Vec<f64>) {
    let n = mesh.n_cells();
    let gn = mesh.rule.len();
    let mut b = vec![0.0; n + 1];
    let mut nd = vec![0.0; n * gn];
    b[0] = start;
    for i in 0..n {
        let h = mesh.width(i);
        for g in 0..gn {
            let mut part = 0.0;
            for gp in 0..gn {
                part += mesh.rule.partial[g][gp] * vals[i * gn + gp];
            }
            nd[i * gn + g] = b[i] + h * part;
        }
        let cell: f64 = (0..gn).map(|g| mesh.rule.weights[g] * vals[i * gn + g]).sum();
        b[i + 1] = b[i] + h * cell;
    }
    (b, nd)
}

/// Cells with a possible singularity at one end: `(cell, singular end is left)`.
fn special_cells(mesh: &Mesh, breaks: &[f64], regular_left: bool) -> Vec<(usize, bool)> {
    let mut out = Vec::new();
    if regular_left {
        out.push((0, true));
    }
    for &c in breaks {
        let i = mesh.bounds.partition_point(|&t| t < c);
        if i < mesh.bounds.len() && mesh.bounds[i] == c {
            if i > 0 {
                out.push((i - 1, false));
            }
            if i < mesh.n_cells() {
                out.push((i, true));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

pub(crate) fn divergent_to_inf(r: Result<crate::measure::Integral>) -> Result<f64> {
    match r {
        Ok(i) if i.value.is_finite() => Ok(i.value),
        Ok(_) | Err(Error::Divergent { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// `a * b` with `0 * inf = 0`.
pub(crate) fn mul0(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

/// `x^e` with `0^e = 0` for `e > 0`, `inf^e = inf`.
pub(crate) fn pow0(x: f64, e: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x.powf(e)
    }
}
