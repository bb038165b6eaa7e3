use crate::error::{Error, Result};
use crate::measure::interval::{from_unit_coordinate, IntervalSpec};
use crate::measure::quad::{integrate_with_breaks, QuadSettings};
use crate::measure::weight::WeightExpr;

/// `W(x) = int_x^b w`.
pub fn tail_w(w: &WeightExpr, interval: &IntervalSpec, x: f64, settings: &QuadSettings) -> Result<f64> {
    if !(interval.a <= x && x < interval.b) {
        return Err(Error::OutOfDomain { t: x });
    }
    let val = integrate_with_breaks(|t| w.value(t), x, interval.b, &w.breakpoints(), settings)?.value;
    if !val.is_finite() {
        return Err(Error::Divergent { x, y: interval.b });
    }
    if val <= 0.0 {
        return Err(Error::DegenerateW(format!("W({x}) = {val}")));
    }
    Ok(val)
}

/// `V_p(x, y)`: `(int_x^y v^{-1/(p-1)})^{(p-1)/p}` for `p > 1` and
/// `ess sup_{(x,y)} 1/v` for `p = 1`. Divergence is reported as `+inf`.
pub fn v_p(v: &WeightExpr, p: f64, x: f64, y: f64, settings: &QuadSettings) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Range(format!("V_p needs p >= 1, got {p}")));
    }
    if x > y {
        return Err(Error::InvalidArgument(format!("V_p needs x <= y, got ({x}, {y})")));
    }
    if x == y {
        return Ok(0.0);
    }
    let breaks = v.breakpoints();
    if p == 1.0 {
        return ess_sup_with_breaks(|t| 1.0 / v.value(t), x, y, &breaks, settings);
    }
    let e = -1.0 / (p - 1.0);
    match integrate_with_breaks(|t| v.value(t).powf(e), x, y, &breaks, settings) {
        Ok(i) if i.value.is_finite() => Ok(i.value.powf((p - 1.0) / p)),
        Ok(_) | Err(Error::Divergent { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// Supremum of a piecewise-continuous function over `(x, y)`.
///
/// A dyadic grid in the unit coordinate is doubled until the maximum moves
/// by less than `1e-6` relative (or `sup_grid` points are reached), then the
/// best grid cell is refined by golden-section search. Both endpoints are
/// probed along `e + L 2^{-k}`; geometric growth along a probe is read as an
/// unbounded function and returns `+inf`.
pub fn ess_sup<F: Fn(f64) -> f64>(f: F, x: f64, y: f64, settings: &QuadSettings) -> Result<f64> {
    ess_sup_with_breaks(f, x, y, &[], settings)
}

/// [`ess_sup`] taken piecewise between the given breakpoints.
pub fn ess_sup_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    x: f64,
    y: f64,
    breaks: &[f64],
    settings: &QuadSettings,
) -> Result<f64> {
    if x.is_nan() || y.is_nan() || x >= y {
        return Err(Error::InvalidArgument(format!("ess sup over empty range ({x}, {y})")));
    }
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&t| x < t && t < y).collect();
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup();
    let mut best = f64::NEG_INFINITY;
    let mut lo = x;
    for hi in cuts.into_iter().chain(std::iter::once(y)) {
        best = best.max(sup_piece(&f, lo, hi, settings)?);
        if best == f64::INFINITY {
            break;
        }
        lo = hi;
    }
    Ok(best)
}

fn sup_piece<F: Fn(f64) -> f64>(f: &F, x: f64, y: f64, settings: &QuadSettings) -> Result<f64> {
    let at = |s: f64| {
        let v = f(from_unit_coordinate(x, y, s));
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };

    let mut best = f64::NEG_INFINITY;
    for probe in [endpoint_probe(&at, 0.0, 1.0), endpoint_probe(&at, 1.0, -1.0)] {
        if probe == f64::INFINITY {
            return Ok(f64::INFINITY);
        }
        best = best.max(probe);
    }

    let mut n = 16usize;
    let mut values: Vec<f64> = (1..n).map(|j| at(j as f64 / n as f64)).collect();
    let mut grid_max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut last_change = f64::INFINITY;
    while 2 * n <= settings.sup_grid.max(16) {
        let mut next = Vec::with_capacity(2 * n - 1);
        for j in 1..2 * n {
            if j % 2 == 0 {
                next.push(values[j / 2 - 1]);
            } else {
                next.push(at(j as f64 / (2 * n) as f64));
            }
        }
        n *= 2;
        values = next;
        let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        last_change = rel_change(grid_max, m);
        grid_max = m;
        if last_change < 1e-6 && n >= 64 {
            break;
        }
    }
    if grid_max == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    if last_change > 1e-3 && n >= settings.sup_grid {
        return Err(Error::DepthExceeded {
            x,
            y,
            depth: settings.sup_grid,
        });
    }

    let (jmax, _) = values
        .iter()
        .enumerate()
        .fold((0usize, f64::NEG_INFINITY), |acc, (j, &v)| if v > acc.1 { (j, v) } else { acc });
    let s_lo = jmax as f64 / n as f64;
    let s_hi = (jmax + 2) as f64 / n as f64;
    let refined = golden_max(&at, s_lo, s_hi, 1e-12);
    Ok(best.max(grid_max).max(refined))
}

fn rel_change(old: f64, new: f64) -> f64 {
    if old == new {
        return 0.0;
    }
    let scale = old.abs().max(new.abs());
    if scale == 0.0 || !scale.is_finite() {
        return f64::INFINITY;
    }
    (new - old).abs() / scale
}

/// Values along `s = e + dir 2^{-k}`; returns `+inf` if the sequence keeps
/// growing geometrically, else its maximum.
fn endpoint_probe<F: Fn(f64) -> f64>(at: &F, e: f64, dir: f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    let mut prev = f64::NAN;
    let mut growth_run = 0;
    for k in 4..=60 {
        let s = e + dir * 2f64.powi(-k);
        if s <= 0.0 || s >= 1.0 {
            break;
        }
        let v = at(s);
        if v == f64::INFINITY {
            return f64::INFINITY;
        }
        if prev > 0.0 && v > prev * 1.05 {
            growth_run += 1;
        } else {
            growth_run = 0;
        }
        if growth_run >= 20 {
            return f64::INFINITY;
        }
        best = best.max(v);
        prev = v;
    }
    best
}

/// Golden-section search for the maximum of `g` on `[lo, hi]`.
pub(crate) fn golden_max<F: Fn(f64) -> f64>(g: &F, lo: f64, hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = g(c);
    let mut fd = g(d);
    let mut best = fc.max(fd);
    for _ in 0..200 {
        if (b - a).abs() <= tol * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = g(c);
            best = best.max(fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = g(d);
            best = best.max(fd);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::weight::Piece;

    fn s() -> QuadSettings {
        QuadSettings::default()
    }

    #[test]
    fn tail_examples() {
        let unit = IntervalSpec::new(0.0, 1.0).unwrap();
        let one = WeightExpr::constant(1.0);
        assert!((tail_w(&one, &unit, 0.5, &s()).unwrap() - 0.5).abs() < 1e-12);
        let half_line = IntervalSpec::new(0.0, f64::INFINITY).unwrap();
        let e = WeightExpr::exp_scale(1.0, -1.0);
        assert!((tail_w(&e, &half_line, 0.0, &s()).unwrap() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn tail_of_inverse_square_blows_up_towards_zero() {
        let unit = IntervalSpec::new(0.0, 1.0).unwrap();
        let w = WeightExpr::power(1.0, -2.0);
        let mut prev = 0.0;
        for k in 1..=6 {
            let x = 10f64.powi(-k);
            let val = tail_w(&w, &unit, x, &s()).unwrap();
            assert!((val - (1.0 / x - 1.0)).abs() < 1e-6 * val);
            assert!(val > prev);
            prev = val;
        }
        assert!(tail_w(&w, &unit, 0.0, &s()).is_err());
    }

    #[test]
    fn v_p_examples() {
        let one = WeightExpr::constant(1.0);
        assert!((v_p(&one, 2.0, 0.0, 0.25, &s()).unwrap() - 0.5).abs() < 1e-10);
        assert!((v_p(&one, 1.0, 0.0, 1.0, &s()).unwrap() - 1.0).abs() < 1e-12);
        let t = WeightExpr::power(1.0, 1.0);
        assert_eq!(v_p(&t, 2.0, 0.0, 1.0, &s()).unwrap(), f64::INFINITY);
        assert_eq!(v_p(&t, 1.0, 0.0, 1.0, &s()).unwrap(), f64::INFINITY);
        let inv = WeightExpr::power(1.0, -1.0);
        let expect = 0.5f64.sqrt();
        assert!((v_p(&inv, 2.0, 0.0, 1.0, &s()).unwrap() - expect).abs() < 1e-8);
    }

    #[test]
    fn sup_examples() {
        assert!((ess_sup(|_| 3.0, 0.0, 1.0, &s()).unwrap() - 3.0).abs() < 1e-15);
        let par = ess_sup(|t| t * (1.0 - t), 0.0, 1.0, &s()).unwrap();
        assert!((par - 0.25).abs() < 1e-6);
        let tent = ess_sup(|t: f64| t.min(1.0 - t), 0.0, 1.0, &s()).unwrap();
        assert!((tent - 0.5).abs() < 1e-6);
        let off = ess_sup(|t: f64| -(t - 0.3141).powi(2), 0.0, 1.0, &s()).unwrap();
        assert!(off.abs() < 1e-10);
    }

    #[test]
    fn sup_of_piecewise_inverse() {
        let v = WeightExpr::Piecewise(vec![
            Piece {
                lo: 0.0,
                hi: 0.5,
                expr: WeightExpr::constant(4.0),
            },
            Piece {
                lo: 0.5,
                hi: 1.0,
                expr: WeightExpr::constant(0.5),
            },
        ]);
        assert!((v_p(&v, 1.0, 0.0, 0.4, &s()).unwrap() - 0.25).abs() < 1e-15);
        assert!((v_p(&v, 1.0, 0.0, 1.0, &s()).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn sup_on_half_line() {
        let v = ess_sup(|t: f64| t * (-t).exp(), 0.0, f64::INFINITY, &s()).unwrap();
        assert!((v - (-1f64).exp()).abs() < 1e-9);
        assert_eq!(
            ess_sup(|t: f64| 1.0 / t, 0.0, 1.0, &s()).unwrap(),
            f64::INFINITY
        );
    }
}
