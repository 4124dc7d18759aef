//! Log-uniform radial grids and trapezoid quadrature in the variable `s = ln t`.
//!
//! With `t = e^s` every integral `∫ f(t) dt` becomes `∫ f(e^s) e^s ds`, and power
//! weights `t^γ` turn into exponentials in `s`, which the uniform trapezoid rule
//! handles at second order over many decades.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Log-uniform nodes on `[r_min, r_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    r_min: f64,
    r_max: f64,
    log_step: f64,
    nodes: Vec<f64>,
}

impl RadialGrid {
    /// Default truncation of the half-line.
    pub const DEFAULT_R_MIN: f64 = 1e-6;
    pub const DEFAULT_R_MAX: f64 = 1e6;
    pub const DEFAULT_NODES: usize = 1 << 14;

    pub fn new(r_min: f64, r_max: f64, n_nodes: usize) -> Result<Self> {
        if !(r_min.is_finite() && r_max.is_finite() && r_min > 0.0 && r_min < r_max) {
            return Err(Error::InvalidInput(format!(
                "grid needs 0 < r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        if n_nodes < 2 {
            return Err(Error::InvalidInput(format!(
                "grid needs at least 2 nodes, got {n_nodes}"
            )));
        }
        let (lo, hi) = (r_min.ln(), r_max.ln());
        let log_step = (hi - lo) / (n_nodes - 1) as f64;
        let mut nodes: Vec<f64> = (0..n_nodes)
            .map(|i| (lo + i as f64 * log_step).exp())
            .collect();
        nodes[0] = r_min;
        nodes[n_nodes - 1] = r_max;
        Ok(Self {
            r_min,
            r_max,
            log_step,
            nodes,
        })
    }

    /// `[1e-6, 1e6]` with `2^14` nodes.
    pub fn default_grid() -> Self {
        Self::new(
            Self::DEFAULT_R_MIN,
            Self::DEFAULT_R_MAX,
            Self::DEFAULT_NODES,
        )
        .expect("default grid is valid")
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn log_step(&self) -> f64 {
        self.log_step
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

    /// Total length of the grid in the log variable.
    pub fn log_length(&self) -> f64 {
        (self.r_max / self.r_min).ln()
    }

    /// The same grid with every node multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.r_min * factor, self.r_max * factor, self.len())
    }

    /// Samples `f` at the nodes.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> RadialFunction {
        RadialFunction {
            grid: self.clone(),
            values: self.nodes.iter().map(|&t| f(t)).collect(),
        }
    }

    /// Trapezoid weights for `∫ f(t) t^power dt` over the grid.
    fn weight(&self, i: usize, power: f64) -> f64 {
        let end = i == 0 || i + 1 == self.nodes.len();
        let w = self.log_step * self.nodes[i].powf(power + 1.0);
        if end {
            0.5 * w
        } else {
            w
        }
    }

    /// `∫_{r_min}^{r_max} f(t) t^power dt` for values `f` on the grid.
    pub fn integrate(&self, values: &[f64], power: f64) -> f64 {
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if v == 0.0 {
                    0.0
                } else {
                    v * self.weight(i, power)
                }
            })
            .sum()
    }
}

/// Function values on a [`RadialGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialFunction {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
}

impl RadialFunction {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!(
                "non-finite value {} at node t = {}",
                values[i],
                grid.nodes()[i]
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: &RadialGrid) -> Self {
        Self {
            values: vec![0.0; grid.len()],
            grid: grid.clone(),
        }
    }

    /// Pointwise product with `t^power`.
    pub fn times_power(&self, power: f64) -> Self {
        let values = self
            .values
            .iter()
            .zip(self.grid.nodes())
            .map(|(&v, &t)| if v == 0.0 { 0.0 } else { v * t.powf(power) })
            .collect();
        Self {
            grid: self.grid.clone(),
            values,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

/// `F(t_i) ≈ ∫_{r_min}^{t_i} u(t) dt`; mass below `r_min` is taken as zero.
pub fn cumulative_integral(u: &RadialFunction) -> RadialFunction {
    let h = u.grid.log_step();
    let t = u.grid.nodes();
    let mut out = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..t.len() {
        acc += 0.5 * h * (u.values[i - 1] * t[i - 1] + u.values[i] * t[i]);
        out.push(acc);
    }
    RadialFunction {
        grid: u.grid.clone(),
        values: out,
    }
}

/// `T(t_i) ≈ ∫_{t_i}^{r_max} u(t) dt`; mass above `r_max` is taken as zero.
pub fn tail_integral(u: &RadialFunction) -> RadialFunction {
    let h = u.grid.log_step();
    let t = u.grid.nodes();
    let n = t.len();
    let mut out = vec![0.0; n];
    let mut acc = 0.0;
    for i in (0..n - 1).rev() {
        acc += 0.5 * h * (u.values[i] * t[i] + u.values[i + 1] * t[i + 1]);
        out[i] = acc;
    }
    RadialFunction {
        grid: u.grid.clone(),
        values: out,
    }
}

/// `(∫ |f(t)|^q t^weight_exponent dt)^{1/q}` over the grid.
pub fn weighted_lq_norm(f: &RadialFunction, weight_exponent: f64, q: f64) -> Result<f64> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "norm exponent q = {q} must be >= 1"
        )));
    }
    let powered: Vec<f64> = f.values.iter().map(|v| v.abs().powf(q)).collect();
    let integral = f.grid.integrate(&powered, weight_exponent);
    if !integral.is_finite() {
        let t = f.grid.nodes();
        let first = powered[0] * t[0].powf(weight_exponent + 1.0);
        let end = if first.is_finite() {
            f.grid.r_max()
        } else {
            f.grid.r_min()
        };
        return Err(Error::Numeric(format!(
            "weighted norm diverges (weight t^{weight_exponent}, q = {q}) near t = {end}"
        )));
    }
    Ok(integral.powf(1.0 / q))
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (`n >= 2`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "Gauss–Legendre rule needs at least two nodes");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Newton on P_n from the Tricomi initial guess.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite Gauss–Legendre integral of `f` over `[a, b]`, split at `breaks`.
///
/// A piece starting at zero is refined geometrically toward the origin so that
/// integrable endpoint singularities like `r^{Q-1}` with `Q < 1` are resolved.
pub fn integrate_pieces(f: impl Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64]) -> f64 {
    let (gx, gw) = gauss_legendre(12);
    let panel = |lo: f64, hi: f64| -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        gx.iter()
            .zip(&gw)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    };
    let mut cuts: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|&c| c > a && c < b))
        .chain(std::iter::once(b))
        .collect();
    cuts.sort_by(|x, y| x.total_cmp(y));
    cuts.dedup();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if lo == 0.0 {
            let mut upper = hi;
            for _ in 0..80 {
                let lower = 0.5 * upper;
                total += panel(lower, upper);
                upper = lower;
            }
        } else {
            let pieces = 48;
            let step = (hi - lo) / pieces as f64;
            for k in 0..pieces {
                total += panel(lo + k as f64 * step, lo + (k + 1) as f64 * step);
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_endpoints_and_log_spacing() {
        let g = RadialGrid::new(1e-4, 1e3, 1001).unwrap();
        assert_eq!(g.nodes()[0], 1e-4);
        assert_eq!(*g.nodes().last().unwrap(), 1e3);
        for w in g.nodes().windows(2) {
            let d = w[1].ln() - w[0].ln();
            assert_relative_eq!(d, g.log_step(), max_relative = 1e-10);
        }
    }

    #[test]
    fn grid_rejects_bad_ranges() {
        assert!(RadialGrid::new(0.0, 1.0, 10).is_err());
        assert!(RadialGrid::new(2.0, 1.0, 10).is_err());
        assert!(RadialGrid::new(1.0, 2.0, 1).is_err());
    }

    #[test]
    fn cumulative_of_zero_is_zero() {
        let g = RadialGrid::new(1e-3, 1e3, 100).unwrap();
        let c = cumulative_integral(&RadialFunction::zeros(&g));
        assert!(c.values.iter().all(|&v| v == 0.0));
        let t = tail_integral(&RadialFunction::zeros(&g));
        assert!(t.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn cumulative_of_constant_on_unit_interval() {
        let g = RadialGrid::new(1.0, 2.0, 1 << 14).unwrap();
        let u = g.sample(|_| 1.0);
        let c = cumulative_integral(&u);
        assert!((c.values.last().unwrap() - 1.0).abs() < 1e-6);
        let t = tail_integral(&u);
        assert!((t.values[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn cumulative_of_inverse_sqrt() {
        let g = RadialGrid::new(1e-4, 1.0, 1 << 14).unwrap();
        let u = g.sample(|t| t.powf(-0.5));
        let exact = 2.0 * (1.0 - 1e-2);
        let c = cumulative_integral(&u);
        assert_relative_eq!(*c.values.last().unwrap(), exact, max_relative = 1e-6);
        let t = tail_integral(&u);
        assert_relative_eq!(t.values[0], exact, max_relative = 1e-6);
    }

    #[test]
    fn tail_mirrors_cumulative() {
        let g = RadialGrid::new(1e-3, 10.0, 2000).unwrap();
        let u = g.sample(|t| (-t).exp() * t.sqrt());
        let c = cumulative_integral(&u);
        let t = tail_integral(&u);
        let total = *c.values.last().unwrap();
        for i in (0..g.len()).step_by(97) {
            assert_relative_eq!(c.values[i] + t.values[i], total, max_relative = 1e-12);
        }
    }

    #[test]
    fn weighted_norm_examples() {
        let g = RadialGrid::new(1.0, std::f64::consts::E, 4001).unwrap();
        assert_relative_eq!(
            weighted_lq_norm(&g.sample(|_| 1.0), -1.0, 1.0).unwrap(),
            1.0,
            max_relative = 1e-12
        );
        let g = RadialGrid::new(0.5, 2.0, 1 << 14).unwrap();
        let exact = ((8.0 - 0.125) / 3.0f64).sqrt();
        assert_relative_eq!(
            weighted_lq_norm(&g.sample(|t| t), 0.0, 2.0).unwrap(),
            exact,
            max_relative = 1e-8
        );
        assert_eq!(
            weighted_lq_norm(&RadialFunction::zeros(&g), 3.0, 2.0).unwrap(),
            0.0
        );
        assert!(weighted_lq_norm(&g.sample(|t| t), 0.0, 0.5).is_err());
    }

    #[test]
    fn weighted_norm_reports_divergence() {
        let g = RadialGrid::new(1e-300, 1.0, 100).unwrap();
        let err = weighted_lq_norm(&g.sample(|_| 1.0), -40.0, 2.0).unwrap_err();
        assert!(matches!(err, Error::Numeric(_)));
    }

    #[test]
    fn second_order_convergence_for_powers() {
        for s in [-0.9, 0.0, 1.0] {
            let (a, b): (f64, f64) = (0.01, 5.0);
            let exact = (b.powf(s + 1.0) - a.powf(s + 1.0)) / (s + 1.0);
            let err = |n: usize| {
                let g = RadialGrid::new(a, b, n).unwrap();
                (cumulative_integral(&g.sample(|t| t.powf(s))).values[n - 1] - exact).abs()
            };
            let (e1, e2) = (err(201), err(401));
            let order = (e1 / e2).log2();
            assert!((order - 2.0).abs() < 0.1, "s = {s}: observed order {order}");
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(12);
        let ws: f64 = w.iter().sum();
        assert_relative_eq!(ws, 2.0, max_relative = 1e-14);
        let m22: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(22)).sum();
        assert_relative_eq!(m22, 2.0 / 23.0, max_relative = 1e-12);
    }

    #[test]
    fn piecewise_integral_handles_breaks_and_origin() {
        let v = integrate_pieces(|r| if r < 1.0 { r * r } else { 0.0 }, 0.0, 3.0, &[1.0]);
        assert_relative_eq!(v, 1.0 / 3.0, max_relative = 1e-12);
        let v = integrate_pieces(|r| r.powf(-0.5), 0.0, 1.0, &[]);
        assert_relative_eq!(v, 2.0, max_relative = 1e-9);
    }
}
