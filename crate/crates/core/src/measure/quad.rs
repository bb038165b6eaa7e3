//! Quadrature kernels: a fixed Gauss–Kronrod 7/15 pair driven by adaptive
//! bisection, graded dyadic refinement towards both endpoints, and the
//! substitution `t = a + s/(1-s)` for infinite endpoints.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::interval::{from_unit_coordinate, unit_coordinate, unit_jacobian};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: usize,
    pub sup_grid: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        QuadSettings {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_depth: 48,
            sup_grid: 4096,
        }
    }
}

impl QuadSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::Range("quadrature tolerances must be positive".into()));
        }
        if self.max_depth < 8 {
            return Err(Error::Range("max_depth must be at least 8".into()));
        }
        if self.sup_grid < 16 {
            return Err(Error::Range("sup_grid must be at least 16".into()));
        }
        Ok(())
    }

    /// Same settings with both tolerances tightened by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        QuadSettings {
            rel_tol: self.rel_tol / factor,
            abs_tol: self.abs_tol / factor,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One Gauss–Kronrod 15-point evaluation: `(kronrod, |kronrod - gauss|)`.
fn gk15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive bisection of a finite, regular piece.
fn adaptive_piece<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_depth: usize,
) -> Result<Integral> {
    let mut stack = vec![(lo, hi, 0usize)];
    let (whole, _) = gk15(f, lo, hi);
    let scale = whole.abs();
    let mut value = 0.0;
    let mut error = 0.0;
    let width = hi - lo;
    while let Some((l, r, depth)) = stack.pop() {
        let (k, e) = gk15(f, l, r);
        if !k.is_finite() {
            return Err(Error::Divergent { x: lo, y: hi });
        }
        let local_abs = abs_tol * ((r - l) / width).max(f64::EPSILON);
        let accept = e <= rel_tol * scale.max(k.abs()) || e <= local_abs;
        let m = 0.5 * (l + r);
        if accept || m <= l || m >= r {
            value += k;
            error += e;
            continue;
        }
        if depth >= max_depth {
            return Err(Error::DepthExceeded {
                x: lo,
                y: hi,
                depth: max_depth,
            });
        }
        stack.push((m, r, depth + 1));
        stack.push((l, m, depth + 1));
    }
    Ok(Integral { value, error })
}

/// Dyadic sum of pieces `[e + L 2^{-k-1}, e + L 2^{-k}]` approaching the
/// endpoint `e` from `m`. The ratio of consecutive pieces is used both to
/// extrapolate the geometric tail and to detect non-integrable growth, which
/// must persist down to the deepest level to count as divergence.
fn graded_towards<F: Fn(f64) -> f64>(
    f: &F,
    e: f64,
    m: f64,
    settings: &QuadSettings,
) -> Result<Integral> {
    let len = m - e;
    let mut total = 0.0;
    let mut error = 0.0;
    let mut terms: Vec<f64> = Vec::with_capacity(settings.max_depth + 1);
    let mut ratios: Vec<f64> = Vec::with_capacity(settings.max_depth + 1);
    let mut sign = 1.0;
    let mut resolved_out = false;
    let local_tol = settings.rel_tol * 0.25;
    for k in 0..=settings.max_depth {
        let outer = e + len / 2f64.powi(k as i32);
        let inner = e + len / 2f64.powi(k as i32 + 1);
        if inner == outer || inner == e {
            resolved_out = true;
            break;
        }
        let (lo, hi) = if len > 0.0 { (inner, outer) } else { (outer, inner) };
        let piece = adaptive_piece(f, lo, hi, local_tol, settings.abs_tol, 40)?;
        let t = piece.value.abs();
        sign = if piece.value < 0.0 { -1.0 } else { 1.0 };
        total += piece.value;
        error += piece.error;
        terms.push(t);
        if k < 3 {
            continue;
        }
        let prev = terms[k - 1];
        if t == 0.0 && prev == 0.0 && terms[k - 2] == 0.0 {
            return Ok(Integral { value: total, error });
        }
        if prev == 0.0 {
            continue;
        }
        let rho = t / prev;
        ratios.push(rho);
        if rho >= 1.0 - 1e-3 {
            continue;
        }
        let tail = t * rho / (1.0 - rho);
        let target = (settings.rel_tol * total.abs()).max(settings.abs_tol);
        if tail <= 0.25 * target {
            return Ok(Integral {
                value: total + sign * tail,
                error: error + tail,
            });
        }
        if ratios.len() >= 3 {
            let rho_prev = ratios[ratios.len() - 2];
            let drift = tail * (rho - rho_prev).abs() / (1.0 - rho);
            if drift <= 0.25 * target && (rho_prev - rho).abs() <= 0.05 * rho {
                // power-law decay: the geometric tail is the extrapolation
                return Ok(Integral {
                    value: total + sign * tail,
                    error: error + drift,
                });
            }
            if let Some((tail, err)) = converging_tail(t, &ratios) {
                if err <= 0.25 * target {
                    return Ok(Integral {
                        value: total + sign * tail,
                        error: error + err,
                    });
                }
            }
        }
    }
    let last = &ratios[ratios.len().saturating_sub(8)..];
    if !last.is_empty() && last.iter().all(|&r| r >= 1.0 - 1e-3) {
        return Err(Error::Divergent { x: e, y: m });
    }
    match (terms.last(), ratios.last()) {
        (Some(&t), Some(&rho)) if rho < 1.0 - 1e-3 => {
            let tail = t * rho / (1.0 - rho);
            let target = (settings.rel_tol * total.abs()).max(settings.abs_tol);
            if tail <= 100.0 * target || resolved_out {
                Ok(Integral {
                    value: total + sign * tail,
                    error: error + tail,
                })
            } else {
                Err(Error::DepthExceeded {
                    x: e,
                    y: m,
                    depth: settings.max_depth,
                })
            }
        }
        _ => Ok(Integral { value: total, error }),
    }
}

/// Tail `t sum_j prod_{i<=j} rho_{k+i}` when the piece ratios themselves
/// converge geometrically, `rho_j = rho_inf + A c^j`; the error estimate is
/// driven by the drift of `c`.
fn converging_tail(t: f64, ratios: &[f64]) -> Option<(f64, f64)> {
    let n = ratios.len();
    if n < 4 {
        return None;
    }
    let d1 = ratios[n - 1] - ratios[n - 2];
    let d2 = ratios[n - 2] - ratios[n - 3];
    let d3 = ratios[n - 3] - ratios[n - 4];
    if d1 == 0.0 || d2 == 0.0 || d3 == 0.0 {
        return None;
    }
    let c = d1 / d2;
    let c_prev = d2 / d3;
    if !(c > 0.0 && c < 0.9) || (c - c_prev).abs() > 0.2 {
        return None;
    }
    let rho_k = ratios[n - 1];
    let rho_inf = rho_k + d1 * c / (1.0 - c);
    if !(rho_inf > 0.0 && rho_inf < 1.0 - 1e-3) {
        return None;
    }
    let mut tail = 0.0;
    let mut term = t;
    let mut dev = rho_k - rho_inf;
    for _ in 0..2000 {
        dev *= c;
        term *= rho_inf + dev;
        tail += term;
        if term <= tail * 1e-17 {
            break;
        }
    }
    let simple = t * rho_k / (1.0 - rho_k);
    let err = (tail - simple).abs() * (c - c_prev).abs() / (1.0 - c) + tail * 1e-15;
    Some((tail, err))
}

/// Integral over a finite interval with graded refinement at both ends.
fn integrate_finite<F: Fn(f64) -> f64>(
    f: &F,
    x: f64,
    y: f64,
    settings: &QuadSettings,
) -> Result<Integral> {
    let m = 0.5 * (x + y);
    let left = graded_towards(f, x, m, settings).map_err(|e| relabel(e, x, y))?;
    let right = graded_towards(f, y, m, settings).map_err(|e| relabel(e, x, y))?;
    Ok(Integral {
        value: left.value + right.value,
        error: left.error + right.error,
    })
}

fn relabel(e: Error, x: f64, y: f64) -> Error {
    match e {
        Error::Divergent { .. } => Error::Divergent { x, y },
        Error::DepthExceeded { depth, .. } => Error::DepthExceeded { x, y, depth },
        other => other,
    }
}

/// Adaptive integral of `f` over `(x, y)`, either end possibly infinite.
///
/// Integrable power-type endpoint singularities (exponent > -1) are handled
/// by the graded refinement; non-integrable ones return [`Error::Divergent`].
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    x: f64,
    y: f64,
    settings: &QuadSettings,
) -> Result<Integral> {
    if x.is_nan() || y.is_nan() || x > y {
        return Err(Error::InvalidArgument(format!(
            "integration bounds must satisfy x <= y, got ({x}, {y})"
        )));
    }
    if x == y {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
        });
    }
    if x.is_finite() && y.is_finite() {
        return integrate_finite(&f, x, y, settings);
    }
    let g = |s: f64| {
        let t = from_unit_coordinate(x, y, s);
        if !t.is_finite() {
            return 0.0;
        }
        f(t) * unit_jacobian(x, y, s)
    };
    integrate_finite(&g, 0.0, 1.0, settings).map_err(|e| relabel(e, x, y))
}

/// [`integrate`] split at the given interior breakpoints, so that each
/// sub-integral sees at most endpoint singularities.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    x: f64,
    y: f64,
    breaks: &[f64],
    settings: &QuadSettings,
) -> Result<Integral> {
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&t| x < t && t < y).collect();
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup();
    let mut lo = x;
    let mut acc = Integral {
        value: 0.0,
        error: 0.0,
    };
    for hi in cuts.into_iter().chain(std::iter::once(y)) {
        let part = integrate(&f, lo, hi, settings)?;
        acc.value += part.value;
        acc.error += part.error;
        lo = hi;
    }
    Ok(acc)
}

/// Unit coordinate of `t` inside `(x, y)`; re-exported for bisection on
/// possibly unbounded brackets.
pub fn unit_of(x: f64, y: f64, t: f64) -> f64 {
    unit_coordinate(x, y, t)
}

pub fn point_of(x: f64, y: f64, s: f64) -> f64 {
    from_unit_coordinate(x, y, s)
}

/// Gauss–Legendre rule on `[0, 1]` together with its integration matrix
/// `S[g][h] = int_0^{xi_g} l_h(s) ds`, where `l_h` are the Lagrange basis
/// polynomials on the nodes. `S` turns node values into partial integrals.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub partial: Vec<Vec<f64>>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            // Chebyshev-like initial guess, Newton on P_n
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, z);
            dp = if d != 0.0 { d } else { dp };
            // map [-1, 1] -> [0, 1], ascending order
            nodes[n - 1 - i] = 0.5 * (1.0 + z);
            weights[n - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
        }
        let mut partial = vec![vec![0.0; n]; n];
        for g in 0..n {
            for h in 0..n {
                let mut acc = 0.0;
                for m in 0..n {
                    acc += weights[m] * lagrange(&nodes, h, nodes[g] * nodes[m]);
                }
                partial[g][h] = nodes[g] * acc;
            }
        }
        GaussRule {
            nodes,
            weights,
            partial,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

fn lagrange(nodes: &[f64], h: usize, x: f64) -> f64 {
    let mut v = 1.0;
    for (j, &xj) in nodes.iter().enumerate() {
        if j != h {
            v *= (x - xj) / (nodes[h] - xj);
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s() -> QuadSettings {
        QuadSettings::default()
    }

    #[test]
    fn closed_forms() {
        let one = integrate(|_| 1.0, 0.0, 1.0, &s()).unwrap();
        assert!((one.value - 1.0).abs() < 1e-8);
        let sing = integrate(|t: f64| t.powf(-0.5), 0.0, 1.0, &s()).unwrap();
        assert!((sing.value - 2.0).abs() < 1e-6, "{}", sing.value);
        let exp = integrate(|t: f64| (-t).exp(), 0.0, f64::INFINITY, &s()).unwrap();
        assert!((exp.value - 1.0).abs() < 1e-6, "{}", exp.value);
        let left = integrate(|t: f64| t.exp(), f64::NEG_INFINITY, 0.0, &s()).unwrap();
        assert!((left.value - 1.0).abs() < 1e-6);
        let gauss = integrate(
            |t: f64| (-t * t).exp(),
            f64::NEG_INFINITY,
            f64::INFINITY,
            &s(),
        )
        .unwrap();
        assert!((gauss.value - std::f64::consts::PI.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn singular_at_right_end() {
        let v = integrate(|t: f64| (1.0 - t).powf(-0.75), 0.0, 1.0, &s()).unwrap();
        assert!((v.value - 4.0).abs() < 1e-5, "{}", v.value);
    }

    #[test]
    fn divergence_is_detected() {
        assert!(matches!(
            integrate(|t: f64| 1.0 / t, 0.0, 1.0, &s()),
            Err(Error::Divergent { .. })
        ));
        assert!(matches!(
            integrate(|t: f64| t.powi(-2), 0.0, 1.0, &s()),
            Err(Error::Divergent { .. })
        ));
        assert!(matches!(
            integrate(|_| 1.0, 0.0, f64::INFINITY, &s()),
            Err(Error::Divergent { .. })
        ));
    }

    #[test]
    fn breaks_handle_jumps() {
        let f = |t: f64| if t < 0.3 { 1.0 } else { 5.0 };
        let v = integrate_with_breaks(f, 0.0, 1.0, &[0.3], &s()).unwrap();
        assert!((v.value - (0.3 + 3.5)).abs() < 1e-10);
    }

    #[test]
    fn gauss_rule_integrates_polynomials() {
        let rule = GaussRule::new(6);
        let sum: f64 = rule.weights.iter().sum();
        assert!((sum - 1.0).abs() < 1e-14);
        // int_0^1 s^5 = 1/6
        let v: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| w * x.powi(5))
            .sum();
        assert!((v - 1.0 / 6.0).abs() < 1e-14);
        // partial integrals of s^2: xi^3 / 3
        for g in 0..rule.len() {
            let p: f64 = (0..rule.len())
                .map(|h| rule.partial[g][h] * rule.nodes[h].powi(2))
                .sum();
            assert!((p - rule.nodes[g].powi(3) / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn depth_zero_interval() {
        assert_eq!(integrate(|_| 1.0, 0.5, 0.5, &s()).unwrap().value, 0.0);
        assert!(integrate(|_| 1.0, 0.6, 0.5, &s()).is_err());
    }
}
