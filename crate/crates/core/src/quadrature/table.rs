//! Sampled monotone maps, their inverses, and cumulative integrals.

use std::sync::Arc;

use super::gauss_kronrod::{integrate, QuadTol};
use super::momentum::RealFn;
use super::roots::brent;
use crate::error::{Error, Result};

/// A sampled function `y(x)` on strictly increasing nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Tabulated {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        if x.len() < 2 {
            return Err(Error::TooFewSamples { needed: 2, got: x.len() });
        }
        for (i, w) in x.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(Error::NonMonotone { index: i + 1 });
            }
        }
        Ok(Tabulated { x, y })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Monotone piecewise-cubic (Fritsch-Carlson) interpolation; constant
    /// extrapolation of the end slopes outside the table.
    pub fn interpolate(&self, t: f64) -> f64 {
        let (x, y) = (&self.x, &self.y);
        let n = x.len();
        let j = x.partition_point(|&v| v <= t).clamp(1, n - 1) - 1;
        let d = pchip_slopes(x, y, j);
        let h = x[j + 1] - x[j];
        let s = (t - x[j]) / h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s),
            s * (1.0 - s) * (1.0 - s),
            s * s * (3.0 - 2.0 * s),
            s * s * (s - 1.0),
        );
        h00 * y[j] + h10 * h * d.0 + h01 * y[j + 1] + h11 * h * d.1
    }
}

fn secant(x: &[f64], y: &[f64], i: usize) -> f64 {
    (y[i + 1] - y[i]) / (x[i + 1] - x[i])
}

fn node_slope(x: &[f64], y: &[f64], i: usize) -> f64 {
    let n = x.len();
    if n == 2 {
        return secant(x, y, 0);
    }
    if i == 0 || i == n - 1 {
        // three-point one-sided estimate, limited to keep monotonicity
        let (a, b) = if i == 0 { (0, 1) } else { (n - 2, n - 3) };
        let (h0, h1) = (x[a + 1] - x[a], x[b + 1] - x[b]);
        let (d0, d1) = (secant(x, y, a), secant(x, y, b));
        let mut d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if d.signum() != d0.signum() {
            d = 0.0;
        } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
            d = 3.0 * d0;
        }
        return d;
    }
    let (d0, d1) = (secant(x, y, i - 1), secant(x, y, i));
    if d0 * d1 <= 0.0 {
        return 0.0;
    }
    let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
    let (w1, w2) = (2.0 * h1 + h0, h1 + 2.0 * h0);
    (w1 + w2) / (w1 / d0 + w2 / d1)
}

fn pchip_slopes(x: &[f64], y: &[f64], j: usize) -> (f64, f64) {
    (node_slope(x, y, j), node_slope(x, y, j + 1))
}

/// A strictly monotone table, optionally backed by the exact function it
/// samples (used to refine inverses).
#[derive(Clone)]
pub struct MonotoneTable {
    table: Tabulated,
    exact: Option<RealFn>,
}

impl std::fmt::Debug for MonotoneTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MonotoneTable")
            .field("len", &self.table.len())
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

impl MonotoneTable {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let table = Tabulated::new(x, y)?;
        let up = table.y[1] > table.y[0];
        for (i, w) in table.y.windows(2).enumerate() {
            if !w[0].is_finite() || !w[1].is_finite() || (w[1] > w[0]) != up || w[1] == w[0] {
                return Err(Error::NonMonotone { index: i + 1 });
            }
        }
        Ok(MonotoneTable { table, exact: None })
    }

    /// Samples `f` at `x` and keeps `f` for refinement.
    pub fn from_fn<F>(f: F, x: Vec<f64>) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let y = x.iter().map(|&t| f(t)).collect();
        let mut t = MonotoneTable::new(x, y)?;
        t.exact = Some(Arc::new(f));
        Ok(t)
    }

    pub fn with_exact(mut self, f: RealFn) -> Self {
        self.exact = Some(f);
        self
    }

    pub fn table(&self) -> &Tabulated {
        &self.table
    }

    pub fn increasing(&self) -> bool {
        self.table.y[1] > self.table.y[0]
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.exact {
            Some(f) => f(x),
            None => self.table.interpolate(x),
        }
    }
}

/// Inverse of a [`MonotoneTable`]: the swapped table plus, when the forward
/// function is known, bracketed root refinement on it.
#[derive(Debug, Clone)]
pub struct InverseTable {
    forward: MonotoneTable,
    inverse: Tabulated,
    tol: f64,
}

pub fn invert_monotone(table: &MonotoneTable, target_tol: f64) -> Result<InverseTable> {
    let t = table.table();
    let (mut y, mut x) = (t.y.clone(), t.x.clone());
    if !table.increasing() {
        y.reverse();
        x.reverse();
    }
    Ok(InverseTable {
        forward: table.clone(),
        inverse: Tabulated::new(y, x)?,
        tol: target_tol,
    })
}

impl InverseTable {
    pub fn table(&self) -> &Tabulated {
        &self.inverse
    }

    /// `f⁻¹(y)`. Fails outside the tabulated range.
    pub fn eval(&self, y: f64) -> Result<f64> {
        let ys = &self.inverse.x;
        let xs = &self.inverse.y;
        let (lo, hi) = (ys[0], ys[ys.len() - 1]);
        if !(y >= lo && y <= hi) {
            return Err(Error::OutOfDomain {
                what: "value",
                value: y,
                domain: format!("[{lo}, {hi}]"),
            });
        }
        let guess = self.inverse.interpolate(y);
        let Some(f) = &self.forward.exact else {
            return Ok(guess);
        };
        let j = ys.partition_point(|&v| v <= y).clamp(1, ys.len() - 1) - 1;
        let (a, b) = (xs[j].min(xs[j + 1]), xs[j].max(xs[j + 1]));
        let xtol = 0.01 * self.tol;
        let x = brent(|t| f(t) - y, a, b, xtol, 200)?;
        Ok(x)
    }
}

/// Cumulative integral `x -> ∫_{x_anchor}^x f` tabulated on nodes.
///
/// Node values are accumulated outward from the anchor; a failed panel
/// poisons every node beyond it with NaN. Evaluation integrates from the
/// nearest node lying between the anchor and `x`.
#[derive(Clone)]
pub(crate) struct Cumulative {
    f: RealFn,
    nodes: Vec<f64>,
    values: Vec<f64>,
    anchor: usize,
    tol: QuadTol,
}

impl Cumulative {
    pub(crate) fn build(f: RealFn, nodes: Vec<f64>, anchor: usize, tol: QuadTol) -> Self {
        let n = nodes.len();
        let mut values = vec![f64::NAN; n];
        values[anchor] = 0.0;
        let step = |a: f64, b: f64| integrate(|t| f(t), a, b, tol).map(|r| r.value).unwrap_or(f64::NAN);
        for i in anchor + 1..n {
            if values[i - 1].is_finite() {
                values[i] = values[i - 1] + step(nodes[i - 1], nodes[i]);
            }
        }
        for i in (0..anchor).rev() {
            if values[i + 1].is_finite() {
                values[i] = values[i + 1] + step(nodes[i + 1], nodes[i]);
            }
        }
        Cumulative {
            f,
            nodes,
            values,
            anchor,
            tol,
        }
    }

    /// Builds on a uniform grid of `panels` panels over `[lo, hi]` with the
    /// anchor inserted as an extra node.
    pub(crate) fn uniform(f: RealFn, lo: f64, hi: f64, panels: usize, anchor: f64, tol: QuadTol) -> Self {
        let h = (hi - lo) / panels as f64;
        let mut nodes: Vec<f64> = (0..=panels)
            .map(|i| if i == panels { hi } else { lo + h * i as f64 })
            .collect();
        let pos = nodes.partition_point(|&n| n < anchor);
        if nodes.get(pos) != Some(&anchor) {
            nodes.insert(pos, anchor);
        }
        Cumulative::build(f, nodes, pos, tol)
    }

    pub(crate) fn values(&self) -> &[f64] {
        &self.values
    }

    fn start_node(&self, x: f64) -> usize {
        let a = self.anchor;
        if x >= self.nodes[a] {
            let p = self.nodes.partition_point(|&n| n <= x);
            (p.max(1) - 1).max(a)
        } else {
            self.nodes.partition_point(|&n| n < x).min(a)
        }
    }

    pub(crate) fn eval(&self, x: f64) -> f64 {
        if !x.is_finite() {
            return f64::NAN;
        }
        let k = self.start_node(x);
        let base = self.values[k];
        if !base.is_finite() || x == self.nodes[k] {
            return base;
        }
        base + integrate(|t| (self.f)(t), self.nodes[k], x, self.tol).map_or(f64::NAN, |r| r.value)
    }

    /// Integral from node `k` to `x` added to the node value (no search).
    fn eval_from(&self, k: usize, x: f64) -> f64 {
        if x == self.nodes[k] {
            return self.values[k];
        }
        self.values[k] + integrate(|t| (self.f)(t), self.nodes[k], x, self.tol).map_or(f64::NAN, |r| r.value)
    }

    /// Finite range of the tabulated values.
    pub(crate) fn finite_range(&self) -> Option<(f64, f64)> {
        let fin: Vec<f64> = self.values.iter().copied().filter(|v| v.is_finite()).collect();
        if fin.is_empty() {
            return None;
        }
        let lo = fin.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = fin.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some((lo, hi))
    }

    /// Solves `eval(x) = target` for a monotone integrand, refining with
    /// Brent on the integral itself. `xtol` bounds the bracket width and
    /// `ytol` the accepted residual.
    pub(crate) fn invert(&self, target: f64, xtol: f64, ytol: f64) -> Result<f64> {
        let v = &self.values;
        let n = v.len();
        let mut bracket = None;
        for j in 0..n - 1 {
            let (a, b) = (v[j], v[j + 1]);
            if a.is_finite() && b.is_finite() && (a - target) * (b - target) <= 0.0 {
                bracket = Some(j);
                break;
            }
        }
        let Some(j) = bracket else {
            if let Some(x) = self.invert_past_edge(target, xtol, ytol) {
                return x;
            }
            let (lo, hi) = self.finite_range().unwrap_or((f64::NAN, f64::NAN));
            return Err(Error::OutOfDomain {
                what: "arc length",
                value: target,
                domain: format!("[{lo}, {hi}]"),
            });
        };
        if v[j] == target {
            return Ok(self.nodes[j]);
        }
        if v[j + 1] == target {
            return Ok(self.nodes[j + 1]);
        }
        // integrate from the node closer to the anchor
        let k = if j < self.anchor { j + 1 } else { j };
        let g = |x: f64| self.eval_from(k, x) - target;
        let x = brent(g, self.nodes[j], self.nodes[j + 1], xtol, 200)?;
        let r = g(x).abs();
        if !(r <= ytol) {
            return Err(Error::InversionFailed { residual: r, target: ytol });
        }
        Ok(x)
    }

    /// Targets beyond the last finite node next to a failed (divergent)
    /// panel: walk toward the failed node until the target is bracketed.
    fn invert_past_edge(&self, target: f64, xtol: f64, ytol: f64) -> Option<Result<f64>> {
        let v = &self.values;
        let n = v.len();
        for k in 0..n {
            if !v[k].is_finite() {
                continue;
            }
            for bad in [k.checked_sub(1), (k + 1 < n).then_some(k + 1)].into_iter().flatten() {
                // only the side pointing away from the anchor can diverge
                if v[bad].is_finite() || (bad < k) != (k <= self.anchor) {
                    continue;
                }
                let side = if bad < k { -1.0 } else { 1.0 };
                let inward = if k > 0 && k + 1 < n { v[k] - v[(k as isize - side as isize) as usize] } else { 0.0 };
                if !(inward * (target - v[k]) > 0.0) {
                    continue;
                }
                let g = |x: f64| self.eval_from(k, x) - target;
                let (x0, x1) = (self.nodes[k], self.nodes[bad]);
                let mut prev = x0;
                for e in 1..=60 {
                    let x = x1 + (x0 - x1) * 0.5f64.powi(e);
                    let gx = g(x);
                    if !gx.is_finite() {
                        break;
                    }
                    if gx * g(prev) <= 0.0 {
                        let out = brent(g, prev, x, xtol, 200).and_then(|x| {
                            let r = g(x).abs();
                            if r <= ytol {
                                Ok(x)
                            } else {
                                Err(Error::InversionFailed { residual: r, target: ytol })
                            }
                        });
                        return Some(out);
                    }
                    prev = x;
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples::linspace;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_table_inverts_to_identity() {
        let x = linspace(-1.0, 1.0, 11);
        let t = MonotoneTable::new(x.clone(), x.clone()).unwrap();
        let inv = invert_monotone(&t, 1e-10).unwrap();
        for &y in &[-1.0, -0.33, 0.0, 0.71, 1.0] {
            assert_abs_diff_eq!(inv.eval(y).unwrap(), y, epsilon = 1e-15);
        }
    }

    #[test]
    fn constant_momentum_arc_inverts_to_hyperbola() {
        // s(ρ) = sqrt(ρ² + c²) inverts to ρ(s) = sqrt(s² - c²)
        let c = 1.0;
        let rho = linspace(0.0, 5.0, 64);
        let t = MonotoneTable::from_fn(move |r: f64| (r * r + c * c).sqrt(), rho).unwrap();
        let inv = invert_monotone(&t, 1e-12).unwrap();
        for &s in &[1.0, 1.2, 2.5, 26f64.sqrt()] {
            assert_abs_diff_eq!(inv.eval(s).unwrap(), (s * s - c * c).sqrt(), epsilon = 1e-10);
        }
    }

    #[test]
    fn arcsinh_table_inverts_to_sinh() {
        let mu = 0.7f64;
        let rho = linspace(0.0, 8.0, 40);
        let t = MonotoneTable::from_fn(move |r: f64| (r + mu).asinh(), rho).unwrap();
        let inv = invert_monotone(&t, 1e-12).unwrap();
        for &s in &[mu.asinh(), 1.0, 2.0, 2.7] {
            assert_abs_diff_eq!(inv.eval(s).unwrap(), s.sinh() - mu, epsilon = 1e-11);
        }
    }

    #[test]
    fn pchip_inverse_without_exact_function_is_close() {
        let x = linspace(0.0, 2.0, 400);
        let y = x.iter().map(|t: &f64| t.exp()).collect();
        let inv = invert_monotone(&MonotoneTable::new(x, y).unwrap(), 1e-6).unwrap();
        assert_abs_diff_eq!(inv.eval(3.0).unwrap(), 3f64.ln(), epsilon = 1e-6);
    }

    #[test]
    fn decreasing_tables_invert() {
        let x = linspace(0.0, 1.0, 20);
        let t = MonotoneTable::from_fn(|t: f64| -t * t * t - t, x).unwrap();
        let inv = invert_monotone(&t, 1e-12).unwrap();
        assert_abs_diff_eq!(inv.eval(-0.625).unwrap(), 0.5, epsilon = 1e-11);
    }

    #[test]
    fn non_monotone_table_is_rejected() {
        let x = vec![0.0, 1.0, 2.0];
        assert!(matches!(
            MonotoneTable::new(x, vec![0.0, 1.0, 0.5]),
            Err(Error::NonMonotone { index: 2 })
        ));
    }

    #[test]
    fn out_of_range_inverse_is_an_error() {
        let x = linspace(0.0, 1.0, 5);
        let inv = invert_monotone(&MonotoneTable::new(x.clone(), x).unwrap(), 1e-10).unwrap();
        assert!(inv.eval(1.5).is_err());
    }

    #[test]
    fn cumulative_integral_and_inverse() {
        let f: RealFn = Arc::new(|t: f64| t.cosh());
        let c = Cumulative::uniform(f, -2.0, 3.0, 50, 0.3, QuadTol::new(1e-13, 1e-14));
        for &x in &[-2.0, -0.77, 0.3, 1.0, 3.0] {
            assert_abs_diff_eq!(c.eval(x), x.sinh() - 0.3f64.sinh(), epsilon = 1e-12);
        }
        let x = c.invert(2.0, 1e-15, 1e-12).unwrap();
        assert_abs_diff_eq!(x, (2.0 + 0.3f64.sinh()).asinh(), epsilon = 1e-12);
    }

    #[test]
    fn cumulative_stops_at_divergence() {
        let f: RealFn = Arc::new(|t: f64| 1.0 / t);
        let c = Cumulative::uniform(f, -1.0, 2.0, 30, 1.0, QuadTol::new(1e-12, 1e-13));
        assert!(c.eval(-0.5).is_nan());
        assert_abs_diff_eq!(c.eval(0.25), 0.25f64.ln(), epsilon = 1e-10);
    }
}
