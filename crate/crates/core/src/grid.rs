//! Radial grids and the quadrature, interpolation and transform rules built on them.
//!
//! Every rule here is derived from one local model: on the interval
//! `[x_i, x_{i+1}]` a sampled function is replaced by the cubic through the
//! four nearest nodes (`x_{i-1} .. x_{i+2}`, shifted inwards at the ends).
//! Integrating that cubic gives a rule that is exact for cubics on any node
//! set and fourth order on smooth integrands. Running sums of the same panel
//! contributions give the prefix and suffix integrals used by the potential.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest grid the solvers accept.
pub const MIN_POINTS: usize = 100;

/// Default smallest node of the origin-clustered grid.
pub const DEFAULT_X_MIN: f64 = 1.0e-4;

/// Node placement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridScheme {
    /// Equal spacing, first node at `x_max / n`.
    Uniform,
    /// Geometric spacing from [`DEFAULT_X_MIN`], dense where the radial
    /// equations carry their `1/x` terms.
    LogDenseOrigin,
}

impl std::str::FromStr for GridScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(GridScheme::Uniform),
            "log-dense-origin" => Ok(GridScheme::LogDenseOrigin),
            _ => Err(Error::InvalidConfig { field: "scheme", reason: format!("unknown grid scheme `{s}`") }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Panel {
    /// First node of the four-point interpolation stencil.
    start: usize,
    /// Integral over the panel of each stencil Lagrange basis polynomial.
    weights: [f64; 4],
}

/// Discretization of the dimensionless radius with quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    points: Vec<f64>,
    weights: Vec<f64>,
    panels: Vec<Panel>,
}

/// Builds a grid with the default origin cut-off.
pub fn build_grid(n_points: usize, x_max: f64, scheme: GridScheme) -> Result<RadialGrid> {
    if !(x_max > 1.0) || !x_max.is_finite() {
        return Err(Error::InvalidExtent { x_min: 0.0, x_max });
    }
    match scheme {
        GridScheme::Uniform => RadialGrid::uniform(n_points, x_max / n_points as f64, x_max),
        GridScheme::LogDenseOrigin => RadialGrid::log_dense_origin(n_points, DEFAULT_X_MIN, x_max),
    }
}

impl RadialGrid {
    pub fn uniform(n_points: usize, x_min: f64, x_max: f64) -> Result<Self> {
        check_extent(n_points, x_min, x_max)?;
        let h = (x_max - x_min) / (n_points - 1) as f64;
        let mut points: Vec<f64> = (0..n_points).map(|i| x_min + i as f64 * h).collect();
        points[n_points - 1] = x_max;
        Self::from_points(points)
    }

    pub fn log_dense_origin(n_points: usize, x_min: f64, x_max: f64) -> Result<Self> {
        check_extent(n_points, x_min, x_max)?;
        let ratio = (x_max / x_min).ln();
        let last = (n_points - 1) as f64;
        let mut points: Vec<f64> = (0..n_points).map(|i| x_min * (ratio * i as f64 / last).exp()).collect();
        points[0] = x_min;
        points[n_points - 1] = x_max;
        Self::from_points(points)
    }

    /// Grid on arbitrary strictly increasing positive nodes.
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.len() < 4 {
            return Err(Error::TooFewPoints { min: 4, actual: points.len() });
        }
        let ordered = points[0] > 0.0 && points.windows(2).all(|w| w[1] > w[0]) && points.iter().all(|x| x.is_finite());
        if !ordered {
            return Err(Error::InvalidExtent { x_min: points[0], x_max: points[points.len() - 1] });
        }
        let panels = build_panels(&points);
        let mut weights = vec![0.0; points.len()];
        for p in &panels {
            for (k, w) in p.weights.iter().enumerate() {
                weights[p.start + k] += w;
            }
        }
        Ok(Self { points, weights, panels })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn x_min(&self) -> f64 {
        self.points[0]
    }

    pub fn x_max(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Index of the node closest to `x`.
    pub fn nearest_index(&self, x: f64) -> usize {
        let i = self.interval_of(x);
        if (x - self.points[i]).abs() <= (self.points[i + 1] - x).abs() {
            i
        } else {
            i + 1
        }
    }

    /// Index `i` of the interval `[x_i, x_{i+1}]` containing `x` (clamped).
    pub fn interval_of(&self, x: f64) -> usize {
        let n = self.points.len();
        match self.points.partition_point(|&p| p <= x) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        }
    }

    pub(crate) fn check_len(&self, samples: &[f64]) -> Result<()> {
        if samples.len() != self.points.len() {
            return Err(Error::LengthMismatch { expected: self.points.len(), actual: samples.len() });
        }
        Ok(())
    }

    fn panel_integral(&self, i: usize, samples: &[f64]) -> f64 {
        let p = &self.panels[i];
        p.weights.iter().zip(&samples[p.start..p.start + 4]).map(|(w, f)| w * f).sum()
    }

    /// Running integral from `x_min`: entry `j` is the integral over `[x_min, x_j]`.
    pub fn cumulative_from_origin(&self, samples: &[f64]) -> Result<Vec<f64>> {
        self.check_len(samples)?;
        let mut out = vec![0.0; samples.len()];
        for i in 0..self.panels.len() {
            out[i + 1] = out[i] + self.panel_integral(i, samples);
        }
        Ok(out)
    }

    /// Running integral to `x_max`: entry `j` is the integral over `[x_j, x_max]`.
    pub fn cumulative_to_end(&self, samples: &[f64]) -> Result<Vec<f64>> {
        self.check_len(samples)?;
        let mut out = vec![0.0; samples.len()];
        for i in (0..self.panels.len()).rev() {
            out[i] = out[i + 1] + self.panel_integral(i, samples);
        }
        Ok(out)
    }

    /// Local cubic interpolation of nodal samples.
    pub fn interpolate(&self, samples: &[f64], x: f64) -> f64 {
        let i = self.interval_of(x);
        let start = self.panels[i].start;
        let nodes = &self.points[start..start + 4];
        lagrange_basis(nodes, x).iter().zip(&samples[start..start + 4]).map(|(l, f)| l * f).sum()
    }

    /// Nodal first derivative from five-point stencils (fourth order).
    pub fn derivative(&self, samples: &[f64]) -> Result<Vec<f64>> {
        self.check_len(samples)?;
        let n = self.points.len();
        let width = 5.min(n);
        Ok((0..n)
            .map(|j| {
                let start = j.saturating_sub(width / 2).min(n - width);
                let nodes = &self.points[start..start + width];
                let w = fornberg_first_derivative(self.points[j], nodes);
                w.iter().zip(&samples[start..start + width]).map(|(w, f)| w * f).sum()
            })
            .collect())
    }

    /// `integral x * density(x) * sin(t x) dx`, each panel integrating its
    /// local cubic of `x * density` against the kernel.
    pub fn sine_transform(&self, density: &[f64], t: f64) -> Result<f64> {
        self.check_len(density)?;
        if t < 0.0 || t.is_nan() {
            return Err(Error::NegativeMomentum(t));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        let g: Vec<f64> = self.points.iter().zip(density).map(|(x, d)| x * d).collect();
        Ok(self.kernel_integral(&g, |x| (t * x).sin(), t))
    }

    /// Integral of the local-cubic interpolant of `g` times an oscillating
    /// kernel with angular frequency `omega`, resolving each panel's phase.
    pub(crate) fn kernel_integral(&self, g: &[f64], kernel: impl Fn(f64) -> f64, omega: f64) -> f64 {
        let mut total = 0.0;
        for (i, p) in self.panels.iter().enumerate() {
            let (a, b) = (self.points[i], self.points[i + 1]);
            let nodes = &self.points[p.start..p.start + 4];
            let vals = &g[p.start..p.start + 4];
            let pieces = ((omega * (b - a)) / 1.5).ceil().max(1.0) as usize;
            let h = (b - a) / pieces as f64;
            for k in 0..pieces {
                let lo = a + k as f64 * h;
                for (xg, wg) in GAUSS8.iter() {
                    let x = lo + 0.5 * h * (1.0 + xg);
                    let cubic: f64 = lagrange_basis(nodes, x).iter().zip(vals).map(|(l, f)| l * f).sum();
                    total += 0.5 * h * wg * cubic * kernel(x);
                }
            }
        }
        total
    }
}

/// Composite quadrature of nodal samples.
pub fn integrate(grid: &RadialGrid, samples: &[f64]) -> Result<f64> {
    grid.check_len(samples)?;
    Ok(grid.weights.iter().zip(samples).map(|(w, f)| w * f).sum())
}

/// See [`RadialGrid::sine_transform`].
pub fn sine_transform(grid: &RadialGrid, density: &[f64], t: f64) -> Result<f64> {
    grid.sine_transform(density, t)
}

fn check_extent(n_points: usize, x_min: f64, x_max: f64) -> Result<()> {
    if n_points < MIN_POINTS {
        return Err(Error::TooFewPoints { min: MIN_POINTS, actual: n_points });
    }
    if !(x_min > 0.0) || !(x_max > x_min) || !x_max.is_finite() {
        return Err(Error::InvalidExtent { x_min, x_max });
    }
    Ok(())
}

fn build_panels(points: &[f64]) -> Vec<Panel> {
    let n = points.len();
    let gauss = [-1.0 / 3f64.sqrt(), 1.0 / 3f64.sqrt()];
    (0..n - 1)
        .map(|i| {
            let start = i.saturating_sub(1).min(n - 4);
            let nodes = &points[start..start + 4];
            let (a, b) = (points[i], points[i + 1]);
            let half = 0.5 * (b - a);
            let mut weights = [0.0; 4];
            for g in gauss {
                let basis = lagrange_basis(nodes, a + half * (1.0 + g));
                for k in 0..4 {
                    weights[k] += half * basis[k];
                }
            }
            Panel { start, weights }
        })
        .collect()
}

fn lagrange_basis(nodes: &[f64], x: f64) -> [f64; 4] {
    let mut out = [1.0; 4];
    for k in 0..4 {
        for m in 0..4 {
            if m != k {
                out[k] *= (x - nodes[m]) / (nodes[k] - nodes[m]);
            }
        }
    }
    out
}

/// First-derivative weights at `x0` for arbitrary nodes (Fornberg 1988).
fn fornberg_first_derivative(x0: f64, nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    // c[j][k]: weight of node j for the k-th derivative, k = 0, 1.
    let mut c = vec![[0.0f64; 2]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|w| w[1]).collect()
}

/// Eight-point Gauss-Legendre nodes and weights on `[-1, 1]`.
pub(crate) const GAUSS8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
];

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Adaptive Simpson on a closure; independent of the grid rules.
    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        #[allow(clippy::too_many_arguments)]
        fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
        let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        rec(f, a, b, fa, fm, fb, whole, tol, 50)
    }

    fn sampled(grid: &RadialGrid, f: impl Fn(f64) -> f64) -> Vec<f64> {
        grid.points().iter().map(|&x| f(x)).collect()
    }

    #[test]
    fn uniform_grid_layout() {
        let g = build_grid(1000, 30.0, GridScheme::Uniform).unwrap();
        assert_eq!(g.len(), 1000);
        assert!(g.x_min() > 0.0);
        assert_relative_eq!(g.points()[1] - g.points()[0], 29.97 / 999.0, max_relative = 1e-12);
        assert_relative_eq!(g.x_min(), 0.03, max_relative = 1e-12);
        assert_eq!(g.x_max(), 30.0);
    }

    #[test]
    fn log_grid_is_dense_near_origin() {
        let g = build_grid(100, 25.0, GridScheme::LogDenseOrigin).unwrap();
        let p = g.points();
        assert!(p[1] - p[0] < p[99] - p[98]);
        assert_eq!(g.x_min(), DEFAULT_X_MIN);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(build_grid(99, 30.0, GridScheme::Uniform), Err(Error::TooFewPoints { .. })));
        assert!(build_grid(1000, -1.0, GridScheme::LogDenseOrigin).is_err());
        assert!(build_grid(1000, 0.5, GridScheme::Uniform).is_err());
        let g = build_grid(100, 25.0, GridScheme::Uniform).unwrap();
        assert!(matches!(integrate(&g, &[1.0; 3]), Err(Error::LengthMismatch { .. })));
        assert!(matches!(g.sine_transform(&vec![1.0; 100], -1.0), Err(Error::NegativeMomentum(_))));
    }

    #[test]
    fn constant_integrates_to_extent() {
        for scheme in [GridScheme::Uniform, GridScheme::LogDenseOrigin] {
            let g = build_grid(4000, 30.0, scheme).unwrap();
            let s = integrate(&g, &vec![1.0; g.len()]).unwrap();
            assert_relative_eq!(s, g.x_max() - g.x_min(), max_relative = 1e-10);
        }
    }

    #[test]
    fn linear_function_on_uniform_grid() {
        let g = build_grid(1000, 30.0, GridScheme::Uniform).unwrap();
        let s = integrate(&g, &sampled(&g, |x| x)).unwrap();
        assert_relative_eq!(s, (30.0f64.powi(2) - 0.03f64.powi(2)) / 2.0, max_relative = 1e-8);
    }

    #[test]
    fn exponential_and_zero() {
        let g = build_grid(4000, 30.0, GridScheme::LogDenseOrigin).unwrap();
        let zero = integrate(&g, &vec![0.0; g.len()]).unwrap();
        assert_eq!(zero, 0.0);

        let g = RadialGrid::log_dense_origin(4000, 1e-3, 30.0).unwrap();
        let s = integrate(&g, &sampled(&g, |x| (-x).exp())).unwrap();
        let exact = (-1e-3f64).exp() - (-30.0f64).exp();
        assert!((s - exact).abs() < 1e-6);
        assert!((s - 0.999).abs() < 1e-6);
    }

    #[test]
    fn sinc_matches_adaptive_oracle() {
        let g = RadialGrid::log_dense_origin(4000, 1e-3, 30.0).unwrap();
        let s = integrate(&g, &sampled(&g, |x| x.sin() / x)).unwrap();
        let oracle = adaptive_simpson(&|x: f64| x.sin() / x, 1e-3, 30.0, 1e-13);
        assert!((s - oracle).abs() < 1e-6, "{s} vs {oracle}");
    }

    #[test]
    fn cubic_exact_on_irregular_nodes() {
        let mut pts = Vec::new();
        let mut x = 0.01;
        for i in 0..150 {
            pts.push(x);
            x += 0.01 + 0.2 * ((i * 7919) % 13) as f64 / 13.0;
        }
        let g = RadialGrid::from_points(pts).unwrap();
        let (a, b) = (g.x_min(), g.x_max());
        let f = |x: f64| 2.0 - 3.0 * x + 0.5 * x * x - 0.01 * x * x * x;
        let anti = |x: f64| 2.0 * x - 1.5 * x * x + x.powi(3) / 6.0 - 0.0025 * x.powi(4);
        let s = integrate(&g, &sampled(&g, f)).unwrap();
        assert_relative_eq!(s, anti(b) - anti(a), max_relative = 1e-12);

        let prefix = g.cumulative_from_origin(&sampled(&g, f)).unwrap();
        let suffix = g.cumulative_to_end(&sampled(&g, f)).unwrap();
        for j in [0, 17, 80, 149] {
            let x = g.points()[j];
            assert_relative_eq!(prefix[j], anti(x) - anti(a), epsilon = 1e-9, max_relative = 1e-11);
            assert_relative_eq!(suffix[j], anti(b) - anti(x), epsilon = 1e-9, max_relative = 1e-11);
        }
    }

    #[test]
    fn refinement_shows_fourth_order() {
        let exact = |a: f64, b: f64| (-a).exp() - (-b).exp();
        let err = |n: usize| {
            let g = RadialGrid::uniform(n, 0.5, 20.5).unwrap();
            (integrate(&g, &sampled(&g, |x| (-x).exp())).unwrap() - exact(0.5, 20.5)).abs()
        };
        // 2n - 1 nodes halves the spacing exactly.
        let (e1, e2) = (err(801), err(1601));
        let order = (e1 / e2).log2();
        assert!(order > 3.9, "observed order {order}");
    }

    #[test]
    fn derivative_and_interpolation() {
        let g = build_grid(2000, 30.0, GridScheme::LogDenseOrigin).unwrap();
        let f = sampled(&g, |x| (-x).exp() * x);
        let d = g.derivative(&f).unwrap();
        for (x, dv) in g.points().iter().zip(&d).step_by(97) {
            assert!((dv - (1.0 - x) * (-x).exp()).abs() < 1e-7, "x = {x}");
        }
        let y = g.interpolate(&f, 1.2345);
        assert!((y - 1.2345 * (-1.2345f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn sine_transform_laplace_oracle() {
        let g = build_grid(4000, 30.0, GridScheme::LogDenseOrigin).unwrap();
        let density = sampled(&g, |x| (-x).exp() / x);
        assert_eq!(g.sine_transform(&density, 0.0).unwrap(), 0.0);
        for t in [0.1, 0.7, 1.0, 3.0, 12.0, 60.0] {
            let s = g.sine_transform(&density, t).unwrap();
            assert!((s - t / (1.0 + t * t)).abs() < 1e-6, "t = {t}: {s}");
        }
    }
}
