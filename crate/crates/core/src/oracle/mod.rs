//! Brute-force estimates of best constants by ratio maximization.
//!
//! Continuous candidates are piecewise constant on a grid graded along the
//! dyadic levels of `W`; discrete candidates are finite sequences. Every
//! search is a spike scan followed by log-space ascent from the best spike
//! and from seeded random starts. Estimates are lower bounds by
//! construction.

mod ascent;
mod grid;
mod sequence;

use serde::Serialize;

use ascent::{ascend, random_starts, search, Ascent, AscentOptions, Objective};
use grid::{oracle_grid, Dual, Exps, GridModel, GridObjective};
use sequence::{Embedding, Hardy};

use crate::constants::SeqWeights;
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;

/// Relative disagreement tolerated between the two monotone searches.
pub const MONOTONE_AGREEMENT: f64 = 0.05;

const GRID_OPTS: AscentOptions = AscentOptions {
    max_iter: 200,
    stop: 1e-7,
    floor: 1e-3,
};

const REFINE_OPTS: AscentOptions = AscentOptions {
    max_iter: 100,
    stop: 1e-7,
    floor: 1e-3,
};

const SEQ_OPTS: AscentOptions = AscentOptions {
    max_iter: 20_000,
    stop: 1e-14,
    floor: 1e-2,
};

/// Longest ranges accepted by the discrete searches.
pub const MAX_EMBEDDING_LEN: usize = 16;
pub const MAX_HARDY_LEN: usize = 12;

/// Piecewise constant function: `values[i]` on `[grid[i], grid[i + 1])`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<GridFunction> {
        if grid.len() != values.len() + 1 {
            return Err(Error::IndexMismatch {
                left: grid.len(),
                right: values.len() + 1,
            });
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidArgument("grid function values must be finite and nonnegative".into()));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn constant(grid: Vec<f64>, c: f64) -> Result<GridFunction> {
        let n = grid.len().saturating_sub(1);
        GridFunction::new(grid, vec![c; n])
    }

    fn check_nonzero(&self) -> Result<()> {
        if self.values.iter().all(|&v| v == 0.0) {
            return Err(Error::ZeroFunction);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Argmax {
    Grid(GridFunction),
    Sequence(Vec<f64>),
}

/// How the maximizing candidate is to be replayed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parametrization {
    /// [`ratio_main`] of the grid function.
    Main,
    /// [`ratio_monotone`] of a nondecreasing step function.
    Step,
    /// [`ratio_substitution`] of the density `h`.
    Substitution,
    /// [`ratio_embedding`].
    Embedding,
    /// [`ratio_hardy`].
    Hardy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    #[serde(with = "crate::serde_util::ext_real")]
    pub estimate: f64,
    pub argmax: Argmax,
    pub parametrization: Parametrization,
    pub n_cells: usize,
    pub restarts: usize,
    pub seed: u64,
    pub converged: bool,
    pub trace: Vec<(usize, f64)>,
    /// Estimate of the other monotone parametrization.
    #[serde(with = "crate::serde_util::ext_real_opt")]
    pub alternative: Option<f64>,
    pub notes: Vec<String>,
}

impl OracleResult {
    /// Recomputes the ratio of the argmax from scratch.
    pub fn replay(&self, spec: Option<&ProblemSpec>, sw: Option<(&SeqWeights, f64, f64)>) -> Result<f64> {
        let missing = || Error::InvalidArgument("replay needs the problem it was computed for".into());
        match (&self.argmax, self.parametrization) {
            (Argmax::Grid(f), Parametrization::Main) => ratio_main(f, spec.ok_or_else(missing)?),
            (Argmax::Grid(f), Parametrization::Step) => ratio_monotone(f, spec.ok_or_else(missing)?),
            (Argmax::Grid(h), Parametrization::Substitution) => ratio_substitution(h, spec.ok_or_else(missing)?),
            (Argmax::Sequence(x), Parametrization::Embedding) => {
                let (s, p, q) = sw.ok_or_else(missing)?;
                ratio_embedding(x, s, p, q)
            }
            (Argmax::Sequence(x), Parametrization::Hardy) => {
                let (s, p, q) = sw.ok_or_else(missing)?;
                ratio_hardy(x, s, p, q)
            }
            _ => Err(Error::InvalidArgument("argmax does not match its parametrization".into())),
        }
    }
}

fn estimate_of(log_value: f64) -> f64 {
    if log_value == f64::NEG_INFINITY {
        0.0
    } else {
        log_value.exp()
    }
}

fn main_exps(spec: &ProblemSpec) -> Exps {
    let e = spec.exponents;
    Exps { p: e.p, q: e.q, r: e.r }
}

fn step_exps(spec: &ProblemSpec) -> Exps {
    let e = spec.exponents;
    Exps { p: e.p, q: 1.0, r: e.q }
}

fn substitution_exps(spec: &ProblemSpec) -> Exps {
    let e = spec.exponents;
    Exps {
        p: 1.0,
        q: 1.0 / e.p,
        r: e.q / e.p,
    }
}

/// `(int (int_a^x (int_a^t f)^q u dt)^{r/q} w dx)^{1/r} / (int f^p v)^{1/p}`;
/// `f` vanishes outside its grid.
pub fn ratio_main(f: &GridFunction, spec: &ProblemSpec) -> Result<f64> {
    f.check_nonzero()?;
    let model = GridModel::new(spec, f.grid.clone(), Dual::Plain)?;
    let obj = GridObjective::new(&model, main_exps(spec), true, false, 1.0);
    Ok(estimate_of(obj.value(&f.values)))
}

/// `(int (int_a^x f u)^q w)^{1/q} / (int f^p v)^{1/p}` for a nondecreasing
/// step function, continued by its last value up to `b`.
pub fn ratio_monotone(f: &GridFunction, spec: &ProblemSpec) -> Result<f64> {
    f.check_nonzero()?;
    if f.values.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("candidate is not nondecreasing".into()));
    }
    let model = GridModel::new(spec, f.grid.clone(), Dual::Extended)?;
    let obj = GridObjective::new(&model, step_exps(spec), false, false, 1.0);
    Ok(estimate_of(obj.value(&f.values)))
}

/// The monotone ratio of `f = (int_a^x h)^{1/p}`, with the right-hand side
/// written as `int h(x) int_x^b v`.
pub fn ratio_substitution(h: &GridFunction, spec: &ProblemSpec) -> Result<f64> {
    h.check_nonzero()?;
    let model = GridModel::new(spec, h.grid.clone(), Dual::Tail)?;
    let obj = GridObjective::new(&model, substitution_exps(spec), true, false, 1.0 / spec.exponents.p);
    Ok(estimate_of(obj.value(&h.values)))
}

fn check_sequence(x: &[f64], sw: &SeqWeights) -> Result<()> {
    if x.len() != sw.len() {
        return Err(Error::IndexMismatch {
            left: x.len(),
            right: sw.len(),
        });
    }
    if x.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidArgument("sequence must be finite and nonnegative".into()));
    }
    if x.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroFunction);
    }
    Ok(())
}

/// `(sum x^q a^q)^{1/q} / (sum x^p b^p)^{1/p}` with `a = v_k`, `b = w_k`.
pub fn ratio_embedding(x: &[f64], sw: &SeqWeights, p: f64, q: f64) -> Result<f64> {
    check_sequence(x, sw)?;
    Ok(estimate_of(Embedding { sw, p, q }.value(x)))
}

/// `(sum_k (sum_{i<=k} x_i b_i)^q a_k)^{1/q} / (sum x^p)^{1/p}`.
pub fn ratio_hardy(x: &[f64], sw: &SeqWeights, p: f64, q: f64) -> Result<f64> {
    check_sequence(x, sw)?;
    Ok(estimate_of(Hardy { sw, p, q }.value(x)))
}

fn check_cells(n_cells: usize) -> Result<()> {
    if n_cells < 64 {
        return Err(Error::InvalidArgument(format!("n_cells must be at least 64, got {n_cells}")));
    }
    Ok(())
}

fn zero_weight_result(grid: Vec<f64>, parametrization: Parametrization, restarts: usize, seed: u64) -> OracleResult {
    let n = grid.len() - 1;
    let mut values = vec![0.0; n];
    values[0] = 1.0;
    OracleResult {
        estimate: 0.0,
        argmax: Argmax::Grid(GridFunction { grid, values }),
        parametrization,
        n_cells: n,
        restarts,
        seed,
        converged: true,
        trace: Vec::new(),
        alternative: None,
        notes: vec!["u vanishes identically: every ratio is zero".into()],
    }
}

/// Splits the cells carrying half of the right-hand side mass, and their
/// neighbours, into four.
fn refine(model: &GridModel, f: &[f64], p: f64) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = f.len();
    let mass: Vec<f64> = (0..n)
        .map(|i| if f[i] > 0.0 { f[i].powf(p) * model.v_cell[i] } else { 0.0 })
        .collect();
    let total: f64 = mass.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return None;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| mass[j].total_cmp(&mass[i]).then(i.cmp(&j)));
    let mut marked = vec![false; n];
    let mut acc = 0.0;
    for &i in &order {
        if acc >= 0.5 * total {
            break;
        }
        acc += mass[i];
        for j in i.saturating_sub(1)..(i + 2).min(n) {
            marked[j] = true;
        }
    }
    if marked.iter().filter(|&&m| m).count() > n / 8 {
        return None;
    }
    let g = &model.grid;
    let mut grid = vec![g[0]];
    let mut values = Vec::new();
    for i in 0..n {
        let parts = if marked[i] { 4 } else { 1 };
        for m in 1..=parts {
            let t = if m == parts { g[i + 1] } else { g[i] + (g[i + 1] - g[i]) * m as f64 / parts as f64 };
            grid.push(t);
            values.push(f[i]);
        }
    }
    Some((grid, values))
}

/// Best constant of the main inequality over piecewise constant functions.
pub fn maximize_ratio_main(spec: &ProblemSpec, n_cells: usize, restarts: usize, seed: u64) -> Result<OracleResult> {
    check_cells(n_cells)?;
    spec.exponents.require_main()?;
    let (grid, truncation) = oracle_grid(spec, n_cells)?;
    if spec.weights.u.is_zero() {
        return Ok(zero_weight_result(grid, Parametrization::Main, restarts, seed));
    }
    let e = main_exps(spec);
    let model = GridModel::new(spec, grid, Dual::Plain)?;
    let obj = GridObjective::new(&model, e, true, false, 1.0);
    let starts = random_starts(obj.dim(), restarts, seed);
    let mut best = search(&obj, &starts, &GRID_OPTS);
    let mut best_grid = model.grid.clone();
    let mut notes = truncation;

    if best.value.is_finite() {
        if let Some((grid2, f2)) = refine(&model, &best.x, e.p) {
            let model2 = GridModel::new(spec, grid2, Dual::Plain)?;
            let obj2 = GridObjective::new(&model2, e, true, false, 1.0);
            let run = ascend(&obj2, &f2, &REFINE_OPTS);
            if run.value > best.value {
                notes.push(format!(
                    "local refinement to {} cells raised the estimate by {:.3e}",
                    model2.n_cells(),
                    (run.value - best.value).exp_m1()
                ));
                let offset = best.trace.last().map_or(0, |t| t.0);
                let mut trace = best.trace;
                trace.extend(run.trace.iter().skip(1).map(|&(i, v)| (offset + i, v)));
                best = Ascent { trace, ..run };
                best_grid = model2.grid.clone();
            }
        }
    }
    let f = GridFunction {
        grid: best_grid,
        values: best.x,
    };
    let estimate = ratio_main(&f, spec).unwrap_or(0.0);
    Ok(OracleResult {
        estimate,
        n_cells: f.values.len(),
        argmax: Argmax::Grid(f),
        parametrization: Parametrization::Main,
        restarts,
        seed,
        converged: best.converged,
        trace: best.trace,
        alternative: None,
        notes,
    })
}

/// Best constant of the inequality restricted to nondecreasing functions,
/// searched over step functions and over the substitution
/// `f = (int_a^x h)^{1/p}`.
pub fn maximize_ratio_monotone(spec: &ProblemSpec, n_cells: usize, restarts: usize, seed: u64) -> Result<OracleResult> {
    check_cells(n_cells)?;
    let (grid, truncation) = oracle_grid(spec, n_cells)?;
    if spec.weights.u.is_zero() {
        return Ok(zero_weight_result(grid, Parametrization::Step, restarts, seed));
    }
    let p = spec.exponents.p;
    let model_a = GridModel::new(spec, grid.clone(), Dual::Extended)?;
    let obj_a = GridObjective::new(&model_a, step_exps(spec), false, true, 1.0);
    let model_b = GridModel::new(spec, grid, Dual::Tail)?;
    let obj_b = GridObjective::new(&model_b, substitution_exps(spec), true, false, 1.0 / p);
    let starts = random_starts(obj_a.dim(), restarts, seed);
    let (run_a, run_b) = rayon::join(
        || search(&obj_a, &starts, &GRID_OPTS),
        || search(&obj_b, &starts, &GRID_OPTS),
    );

    let step = GridFunction {
        grid: model_a.grid.clone(),
        values: obj_a.function(&run_a.x),
    };
    let subst = GridFunction {
        grid: model_b.grid.clone(),
        values: run_b.x.clone(),
    };
    let est_a = if run_a.value.is_finite() { ratio_monotone(&step, spec)? } else { 0.0 };
    let est_b = if run_b.value.is_finite() { ratio_substitution(&subst, spec)? } else { 0.0 };
    let top = est_a.max(est_b);
    if top > 0.0 && top.is_finite() && (est_a - est_b).abs() > MONOTONE_AGREEMENT * top {
        return Err(Error::InconsistentParametrizations {
            step: est_a,
            substitution: est_b,
        });
    }
    let (estimate, f, parametrization, run, alternative) = if est_a >= est_b {
        (est_a, step, Parametrization::Step, run_a, est_b)
    } else {
        (est_b, subst, Parametrization::Substitution, run_b, est_a)
    };
    Ok(OracleResult {
        estimate,
        n_cells: f.values.len(),
        argmax: Argmax::Grid(f),
        parametrization,
        restarts,
        seed,
        converged: run.converged,
        trace: run.trace,
        alternative: Some(alternative),
        notes: truncation,
    })
}

fn sequence_result(run: Ascent, parametrization: Parametrization, restarts: usize, seed: u64, estimate: f64) -> OracleResult {
    OracleResult {
        estimate,
        n_cells: run.x.len(),
        argmax: Argmax::Sequence(run.x),
        parametrization,
        restarts,
        seed,
        converged: run.converged,
        trace: run.trace,
        alternative: None,
        notes: Vec::new(),
    }
}

/// Best constant of `(sum x^q v^q)^{1/q} <= C (sum x^p w^p)^{1/p}`.
pub fn maximize_discrete_embedding(sw: &SeqWeights, p: f64, q: f64, restarts: usize, seed: u64) -> Result<OracleResult> {
    if sw.is_empty() {
        return Err(Error::EmptyRange);
    }
    if sw.len() > MAX_EMBEDDING_LEN {
        return Err(Error::InvalidArgument(format!(
            "range length {} exceeds {MAX_EMBEDDING_LEN}",
            sw.len()
        )));
    }
    let obj = Embedding { sw, p, q };
    let run = search(&obj, &random_starts(sw.len(), restarts, seed), &SEQ_OPTS);
    let estimate = estimate_of(obj.value(&run.x));
    Ok(sequence_result(run, Parametrization::Embedding, restarts, seed, estimate))
}

/// Best constant of the discrete Hardy inequality with weights `a_k, b_k`.
pub fn maximize_discrete_hardy(sw: &SeqWeights, p: f64, q: f64, restarts: usize, seed: u64) -> Result<OracleResult> {
    if sw.is_empty() {
        return Err(Error::EmptyRange);
    }
    if sw.len() > MAX_HARDY_LEN {
        return Err(Error::InvalidArgument(format!("range length {} exceeds {MAX_HARDY_LEN}", sw.len())));
    }
    let obj = Hardy { sw, p, q };
    let run = search(&obj, &random_starts(sw.len(), restarts, seed), &SEQ_OPTS);
    let estimate = estimate_of(obj.value(&run.x));
    Ok(sequence_result(run, Parametrization::Hardy, restarts, seed, estimate))
}
