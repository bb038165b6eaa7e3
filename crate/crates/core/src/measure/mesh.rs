use crate::error::{Error, Result};
use crate::measure::quad::GaussRule;

/// Resolution parameters of a [`Mesh`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshPlan {
    /// Uniform sub-cells per anchor cell.
    pub subdivisions: usize,
    /// Gauss–Legendre nodes per cell.
    pub gauss: usize,
    /// Geometric levels towards a regular left endpoint.
    pub end_grading: usize,
    /// Geometric levels on each side of an interior breakpoint.
    pub break_grading: usize,
}

impl Default for MeshPlan {
    fn default() -> Self {
        MeshPlan {
            subdivisions: 8,
            gauss: 6,
            end_grading: 40,
            break_grading: 24,
        }
    }
}

/// Finite cells `[t_i, t_{i+1}]` aligned with a set of anchor points, each
/// carrying the same Gauss rule.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub bounds: Vec<f64>,
    pub rule: GaussRule,
    /// `(level, bound index)` of every anchor.
    pub anchors: Vec<(i64, usize)>,
}

impl Mesh {
    /// Builds cells between consecutive anchors. With `regular_left` the
    /// first anchor is a finite endpoint where the weights may be singular,
    /// and the first anchor cell is graded geometrically towards it.
    pub fn build(
        anchors: &[(i64, f64)],
        regular_left: bool,
        breaks: &[f64],
        plan: &MeshPlan,
    ) -> Result<Mesh> {
        if anchors.len() < 2 {
            return Err(Error::InvalidArgument("a mesh needs at least two anchors".into()));
        }
        if plan.subdivisions == 0 || plan.gauss == 0 {
            return Err(Error::InvalidArgument("mesh resolution must be positive".into()));
        }
        for w in anchors.windows(2) {
            if !(w[0].1 < w[1].1) || !w[1].1.is_finite() || !w[0].1.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "anchors must be finite and increasing, got {} then {}",
                    w[0].1, w[1].1
                )));
            }
        }
        let mut bounds = Vec::new();
        for (j, w) in anchors.windows(2).enumerate() {
            let (lo, hi) = (w[0].1, w[1].1);
            let len = hi - lo;
            if j == 0 && regular_left {
                bounds.push(lo);
                for g in (1..=plan.end_grading).rev() {
                    bounds.push(lo + len * 2f64.powi(-(g as i32)));
                }
                let start = lo + 0.5 * len;
                for m in 1..plan.subdivisions {
                    bounds.push(start + 0.5 * len * m as f64 / plan.subdivisions as f64);
                }
            } else {
                for m in 0..plan.subdivisions {
                    bounds.push(lo + len * m as f64 / plan.subdivisions as f64);
                }
            }
        }
        bounds.push(anchors[anchors.len() - 1].1);
        let first = bounds[0];
        let last = bounds[bounds.len() - 1];

        let mut extra = Vec::new();
        for &c in breaks {
            if !(first < c && c < last) {
                continue;
            }
            let lo = bounds.iter().copied().filter(|&t| t < c).fold(first, f64::max);
            let hi = bounds.iter().copied().filter(|&t| t > c).fold(last, f64::min);
            extra.push(c);
            for l in 1..=plan.break_grading {
                let f = 2f64.powi(-(l as i32));
                extra.push(c - (c - lo) * f);
                extra.push(c + (hi - c) * f);
            }
        }
        bounds.extend(extra);
        bounds.sort_by(|a, b| a.total_cmp(b));
        let mut clean: Vec<f64> = Vec::with_capacity(bounds.len());
        for t in bounds {
            match clean.last() {
                Some(&prev) if t - prev <= 4.0 * f64::EPSILON * prev.abs().max(t.abs()).max(f64::MIN_POSITIVE) => {}
                _ => clean.push(t),
            }
        }
        // keep exact anchor values even if a graded point landed next to one
        let mut anchor_idx = Vec::with_capacity(anchors.len());
        for &(k, x) in anchors {
            let i = clean.partition_point(|&t| t < x);
            let i = if i < clean.len() && clean[i] == x {
                i
            } else if i > 0 && (x - clean[i - 1]).abs() <= 4.0 * f64::EPSILON * x.abs() {
                clean[i - 1] = x;
                i - 1
            } else if i < clean.len() {
                clean[i] = x;
                i
            } else {
                return Err(Error::InvalidArgument(format!("anchor {x} lost while building mesh")));
            };
            anchor_idx.push((k, i));
        }
        Ok(Mesh {
            bounds: clean,
            rule: GaussRule::new(plan.gauss),
            anchors: anchor_idx,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.bounds.len() - 1
    }

    pub fn n_nodes(&self) -> usize {
        self.n_cells() * self.rule.len()
    }

    pub fn width(&self, i: usize) -> f64 {
        self.bounds[i + 1] - self.bounds[i]
    }

    pub fn node(&self, i: usize, g: usize) -> f64 {
        self.bounds[i] + self.width(i) * self.rule.nodes[g]
    }

    pub fn lo(&self) -> f64 {
        self.bounds[0]
    }

    pub fn hi(&self) -> f64 {
        self.bounds[self.bounds.len() - 1]
    }

    /// Cell containing `x`, clamped to the mesh.
    pub fn cell_of(&self, x: f64) -> usize {
        let i = self.bounds.partition_point(|&t| t <= x);
        i.saturating_sub(1).min(self.n_cells() - 1)
    }

    /// Bound index of anchor level `k`.
    pub fn anchor(&self, k: i64) -> Option<usize> {
        self.anchors.iter().find(|a| a.0 == k).map(|a| a.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchors_are_bounds() {
        let anchors: Vec<(i64, f64)> = (0..6).map(|k| (k, 1.0 - 2f64.powi(-(k as i32)))).collect();
        let mesh = Mesh::build(&anchors, true, &[0.3], &MeshPlan::default()).unwrap();
        for &(k, x) in &anchors {
            let i = mesh.anchor(k).unwrap();
            assert_eq!(mesh.bounds[i], x);
        }
        for w in mesh.bounds.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert!(mesh.bounds.contains(&0.3));
        assert_eq!(mesh.lo(), 0.0);
        assert!(mesh.width(0) < 1e-11);
    }

    #[test]
    fn cell_lookup() {
        let anchors = [(0, 0.0), (1, 1.0)];
        let plan = MeshPlan {
            subdivisions: 4,
            gauss: 3,
            end_grading: 0,
            break_grading: 0,
        };
        let mesh = Mesh::build(&anchors, false, &[], &plan).unwrap();
        assert_eq!(mesh.n_cells(), 4);
        assert_eq!(mesh.cell_of(0.3), 1);
        assert_eq!(mesh.cell_of(1.0), 3);
        assert_eq!(mesh.cell_of(-1.0), 0);
    }
}
