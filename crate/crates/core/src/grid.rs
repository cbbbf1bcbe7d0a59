//! Endpoint-avoiding sample grids and the grid-function carrier used by the
//! operator layer.
//!
//! Grids are composite Gauss-Legendre panel grids: every node lies strictly
//! inside the interval, which matters because the densities κ_β blow up at
//! the endpoints. A [`GridFunction`] is node samples plus an optional
//! closed-form tag; when the tag is present, evaluation off the nodes uses
//! the closed form exactly instead of interpolation.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quad;

/// Composite Gauss-Legendre grid on (a, b), optionally split at interior
/// breakpoints so interpolation stencils never straddle a known kink.
#[derive(Debug, Clone)]
pub struct Grid {
    a: f64,
    b: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// Interior breakpoints; stencils are confined between consecutive ones.
    breaks: Vec<f64>,
}

impl Grid {
    /// Uniform composite Gauss-Legendre grid: `panels` panels of
    /// `points_per_panel` nodes each.
    pub fn gauss_legendre(a: f64, b: f64, panels: usize, points_per_panel: usize) -> Result<Grid> {
        Self::with_breakpoints(a, b, &[], panels, points_per_panel)
    }

    /// Composite grid from explicit sections: each (lo, hi, panels) triple
    /// contributes that many uniform panels. Sections must be contiguous
    /// and increasing; their boundaries become interpolation breakpoints.
    pub fn from_sections(sections: &[(f64, f64, usize)], points_per_panel: usize) -> Result<Grid> {
        if sections.is_empty() {
            return Err(Error::InvalidInput("no sections".into()));
        }
        for w in sections.windows(2) {
            if (w[0].1 - w[1].0).abs() > 1e-12 {
                return Err(Error::InvalidInput("sections must be contiguous".into()));
            }
        }
        let a = sections[0].0;
        let b = sections.last().unwrap().1;
        if !(a < b) {
            return Err(Error::InvalidInput("need increasing sections".into()));
        }
        let (gl_x, gl_w) = quad::gauss_legendre(points_per_panel);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for &(lo, hi, panels) in sections {
            if !(lo < hi) || panels == 0 {
                return Err(Error::InvalidInput("bad section".into()));
            }
            let h = (hi - lo) / panels as f64;
            for p in 0..panels {
                let pa = lo + p as f64 * h;
                let mid = pa + 0.5 * h;
                for (x, w) in gl_x.iter().zip(gl_w.iter()) {
                    nodes.push(mid + 0.5 * h * x);
                    weights.push(0.5 * h * w);
                }
            }
        }
        if nodes.len() < 8 {
            return Err(Error::InvalidInput("grid needs at least 8 nodes".into()));
        }
        let breaks = sections[..sections.len() - 1]
            .iter()
            .map(|s| s.1)
            .collect();
        Ok(Grid {
            a,
            b,
            nodes,
            weights,
            breaks,
        })
    }

    /// Composite grid whose panel boundaries include the given interior
    /// breakpoints. Each section between breakpoints gets a share of the
    /// panels proportional to its width (at least one).
    pub fn with_breakpoints(
        a: f64,
        b: f64,
        breakpoints: &[f64],
        panels: usize,
        points_per_panel: usize,
    ) -> Result<Grid> {
        if !(a < b) {
            return Err(Error::InvalidInput(format!("need a < b, got ({a}, {b})")));
        }
        if panels * points_per_panel < 8 {
            return Err(Error::InvalidInput("grid needs at least 8 nodes".into()));
        }
        let mut breaks: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|&x| x > a && x < b)
            .collect();
        breaks.sort_by(|p, q| p.partial_cmp(q).unwrap());
        breaks.dedup();

        let (gl_x, gl_w) = quad::gauss_legendre(points_per_panel);
        let mut nodes = Vec::with_capacity(panels * points_per_panel);
        let mut weights = Vec::with_capacity(panels * points_per_panel);
        let mut edges = vec![a];
        edges.extend_from_slice(&breaks);
        edges.push(b);
        let total = b - a;
        for sec in edges.windows(2) {
            let (lo, hi) = (sec[0], sec[1]);
            let share = (((hi - lo) / total) * panels as f64).round().max(1.0) as usize;
            let h = (hi - lo) / share as f64;
            for p in 0..share {
                let pa = lo + p as f64 * h;
                let mid = pa + 0.5 * h;
                for (x, w) in gl_x.iter().zip(gl_w.iter()) {
                    nodes.push(mid + 0.5 * h * x);
                    weights.push(0.5 * h * w);
                }
            }
        }
        Ok(Grid {
            a,
            b,
            nodes,
            weights,
            breaks,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// True when the interval is symmetric about 0 (the τ-side case, where
    /// interpolation is preconditioned against the κ₁ edge blowup).
    pub fn is_symmetric(&self) -> bool {
        (self.a + self.b).abs() < 1e-14 * self.b.abs().max(1.0)
    }

    /// Stencil bounds for interpolation around `x`: indices of the section
    /// (between breakpoints) containing x.
    fn section_range(&self, x: f64) -> (usize, usize) {
        let mut lo_val = self.a;
        let mut hi_val = self.b;
        for &br in &self.breaks {
            if x < br {
                hi_val = br;
                break;
            }
            lo_val = br;
        }
        let lo = self.nodes.partition_point(|&n| n < lo_val);
        let hi = self.nodes.partition_point(|&n| n < hi_val);
        (lo, hi.max(lo + 1).min(self.len()))
    }
}

/// Analytically known functions carried alongside node samples so that
/// operator series can evaluate them exactly at arbitrary arguments.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedForm {
    /// λ₁(x) = 1/(1+x), the Gauss-map invariant density.
    Lambda1,
    /// κ_α(x) = α/(α²-x²).
    Kappa { alpha: f64 },
    /// κ₁(x) = 1/(1-x²), the infinite-mass invariant density of τ₁.
    Kappa1,
    /// The critical half-line density: 1/(1+t) on (0,1], -1/(t(1+t)) beyond.
    CriticalF0,
    /// 1 on [lo, hi], 0 elsewhere.
    Indicator { lo: f64, hi: f64 },
    /// x^k.
    Monomial { k: u32 },
}

impl ClosedForm {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            ClosedForm::Lambda1 => 1.0 / (1.0 + x),
            ClosedForm::Kappa { alpha } => alpha / (alpha * alpha - x * x),
            ClosedForm::Kappa1 => 1.0 / (1.0 - x * x),
            ClosedForm::CriticalF0 => {
                if x <= 0.0 {
                    0.0
                } else if x <= 1.0 {
                    1.0 / (1.0 + x)
                } else {
                    -1.0 / (x * (1.0 + x))
                }
            }
            ClosedForm::Indicator { lo, hi } => {
                if x >= lo && x <= hi {
                    1.0
                } else {
                    0.0
                }
            }
            ClosedForm::Monomial { k } => x.powi(k as i32),
        }
    }
}

/// Node samples on a grid, with an optional closed-form tag.
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: Arc<Grid>,
    values: Vec<f64>,
    form: Option<ClosedForm>,
}

impl GridFunction {
    pub fn from_values(grid: Arc<Grid>, values: Vec<f64>) -> Result<GridFunction> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "value count {} != node count {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(GridFunction {
            grid,
            values,
            form: None,
        })
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> f64) -> GridFunction {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        GridFunction {
            grid,
            values,
            form: None,
        }
    }

    pub fn from_form(grid: Arc<Grid>, form: ClosedForm) -> GridFunction {
        let values = grid.nodes().iter().map(|&x| form.eval(x)).collect();
        GridFunction {
            grid,
            values,
            form: Some(form),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn form(&self) -> Option<&ClosedForm> {
        self.form.as_ref()
    }

    /// Checks the closed-form/value agreement invariant (relative 1e-12).
    pub fn validate(&self) -> Result<()> {
        if let Some(form) = &self.form {
            for (&x, &v) in self.grid.nodes().iter().zip(&self.values) {
                let e = form.eval(x);
                if (v - e).abs() > 1e-12 * e.abs().max(1.0) {
                    return Err(Error::InvalidInput(format!(
                        "closed-form mismatch at x={x}: stored {v}, form {e}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Evaluates at an arbitrary point: closed form when tagged, otherwise
    /// cubic Lagrange interpolation on the 4 nearest nodes.
    ///
    /// On symmetric intervals the interpolation works on f·(b²-x²) and
    /// divides afterwards, which keeps κ₁-type edge growth representable.
    pub fn eval(&self, x: f64) -> f64 {
        if let Some(form) = &self.form {
            return form.eval(x);
        }
        self.interpolate(x)
    }

    fn edge_weight(&self, x: f64) -> f64 {
        // (x-a)(b-x), only used on symmetric grids.
        (x - self.grid.a) * (self.grid.b - x)
    }

    pub fn interpolate(&self, x: f64) -> f64 {
        let g = &self.grid;
        let precondition = g.is_symmetric();
        let (lo, hi) = g.section_range(x);
        let n = hi - lo;
        if n == 0 {
            return 0.0;
        }
        if n < 4 {
            // Degenerate tiny section: nearest node.
            let mut best = lo;
            for i in lo..hi {
                if (g.nodes[i] - x).abs() < (g.nodes[best] - x).abs() {
                    best = i;
                }
            }
            return self.values[best];
        }
        let pos = g.nodes[lo..hi].partition_point(|&nx| nx < x) + lo;
        let start = pos.saturating_sub(2).clamp(lo, hi - 4);
        let xs = &g.nodes[start..start + 4];
        let mut acc = 0.0;
        for i in 0..4 {
            let yi = if precondition {
                self.values[start + i] * self.edge_weight(xs[i])
            } else {
                self.values[start + i]
            };
            let mut l = yi;
            for j in 0..4 {
                if j != i {
                    l *= (x - xs[j]) / (xs[i] - xs[j]);
                }
            }
            acc += l;
        }
        if precondition {
            let w = self.edge_weight(x);
            if w.abs() < 1e-300 {
                return 0.0;
            }
            acc / w
        } else {
            acc
        }
    }

    /// ∫ f over the grid interval using the panel weights.
    pub fn integral(&self) -> f64 {
        self.values
            .iter()
            .zip(self.grid.weights())
            .map(|(v, w)| v * w)
            .sum()
    }

    /// ∫ |f| over the grid interval using the panel weights.
    pub fn l1_grid(&self) -> f64 {
        self.values
            .iter()
            .zip(self.grid.weights())
            .map(|(v, w)| v.abs() * w)
            .sum()
    }

    /// sup |f| over the nodes.
    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Leave-one-out interpolation error estimate, sampled over interior
    /// nodes. Used to flag degraded inter-iterate resampling.
    pub fn interp_error_estimate(&self) -> f64 {
        let n = self.grid.len();
        if n < 8 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        let step = (n / 64).max(1);
        let mut i = 4;
        while i + 4 < n {
            let x = self.grid.nodes[i];
            // Cubic through neighbors i-2, i-1, i+1, i+2.
            let idx = [i - 2, i - 1, i + 1, i + 2];
            let precondition = self.grid.is_symmetric();
            let mut acc = 0.0;
            for (a, &ia) in idx.iter().enumerate() {
                let mut l = if precondition {
                    self.values[ia] * self.edge_weight(self.grid.nodes[ia])
                } else {
                    self.values[ia]
                };
                for (b, &ib) in idx.iter().enumerate() {
                    if a != b {
                        l *= (x - self.grid.nodes[ib])
                            / (self.grid.nodes[ia] - self.grid.nodes[ib]);
                    }
                }
                acc += l;
            }
            let predicted = if precondition {
                acc / self.edge_weight(x)
            } else {
                acc
            };
            worst = worst.max((predicted - self.values[i]).abs());
            i += step;
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_grid() -> Arc<Grid> {
        Arc::new(Grid::gauss_legendre(0.0, 1.0, 32, 8).unwrap())
    }

    #[test]
    fn nodes_strictly_inside_and_increasing() {
        let g = Grid::gauss_legendre(-1.0, 1.0, 48, 10).unwrap();
        assert!(g.nodes().first().unwrap() > &-1.0);
        assert!(g.nodes().last().unwrap() < &1.0);
        assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(g.len() >= 8);
    }

    #[test]
    fn rejects_tiny_grid() {
        assert!(Grid::gauss_legendre(0.0, 1.0, 1, 4).is_err());
        assert!(Grid::gauss_legendre(1.0, 0.0, 8, 8).is_err());
    }

    #[test]
    fn weights_integrate_lambda1_to_log2() {
        let g = unit_grid();
        let f = GridFunction::from_form(g, ClosedForm::Lambda1);
        assert!((f.integral() - std::f64::consts::LN_2).abs() < 1e-13);
    }

    #[test]
    fn closed_form_validation() {
        let g = unit_grid();
        let f = GridFunction::from_form(g.clone(), ClosedForm::Monomial { k: 3 });
        f.validate().unwrap();
        let mut vals = f.values().to_vec();
        vals[7] += 1e-6;
        let broken = GridFunction {
            grid: g,
            values: vals,
            form: Some(ClosedForm::Monomial { k: 3 }),
        };
        assert!(broken.validate().is_err());
    }

    #[test]
    fn interpolation_accuracy_smooth() {
        let g = unit_grid();
        let f = GridFunction::from_fn(g, |x| (3.0 * x).sin());
        for i in 0..100 {
            let x = 0.005 + 0.0099 * i as f64;
            let err = (f.eval(x) - (3.0 * x).sin()).abs();
            assert!(err < 5e-8, "x={x} err={err:.3e}");
        }
    }

    #[test]
    fn symmetric_interpolation_handles_kappa_growth() {
        let g = Arc::new(Grid::gauss_legendre(-1.0, 1.0, 128, 8).unwrap());
        let f = GridFunction::from_fn(g, |x| 1.0 / (1.0 - x * x));
        for &x in &[0.0, 0.5, 0.9, 0.99, 0.999] {
            let got = f.interpolate(x);
            let want = 1.0 / (1.0 - x * x);
            assert!(
                (got - want).abs() < 1e-6 * want.abs(),
                "x={x}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn breakpoint_grid_respects_kink() {
        let g = Arc::new(Grid::with_breakpoints(0.0, 3.0, &[1.0], 60, 8).unwrap());
        let f = GridFunction::from_fn(g, |x| if x <= 1.0 { 1.0 / (1.0 + x) } else { -x });
        assert!((f.eval(0.999) - 1.0 / 1.999).abs() < 1e-8);
        assert!((f.eval(1.001) - (-1.001)).abs() < 1e-8);
    }

    proptest! {
        #[test]
        fn closed_forms_sample_consistently(x in 0.01f64..0.99) {
            let g = unit_grid();
            let f = GridFunction::from_form(g, ClosedForm::Lambda1);
            let direct = 1.0 / (1.0 + x);
            prop_assert!((f.eval(x) - direct).abs() < 1e-12);
        }

        #[test]
        fn interp_matches_linear_functions(x in -0.95f64..0.95) {
            let g = Arc::new(Grid::gauss_legendre(-1.0, 1.0, 16, 8).unwrap());
            let f = GridFunction::from_fn(g, |t| 2.0 * t + 1.0);
            prop_assert!((f.eval(x) - (2.0 * x + 1.0)).abs() < 1e-9);
        }
    }
}
