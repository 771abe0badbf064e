//! Sampled unit-speed curves and finite-difference differentiation.

use crate::error::{Error, Result};
use crate::plane::{curvature_null, CausalSign, PlanePoint, Vec2};

/// Arc-length samples of a spacelike or timelike curve.
///
/// Positions are kept both in rectangular `(x, y)` and null `(u, v)`
/// coordinates; derivative estimates always use the null pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSamples {
    s: Vec<f64>,
    points: Vec<PlanePoint>,
    uv: Vec<(f64, f64)>,
    epsilon: CausalSign,
    kappa: Option<Vec<f64>>,
    kappa_derivatives: Option<(Vec<f64>, Vec<f64>)>,
    aux: Option<Vec<f64>>,
}

fn check_s(s: &[f64]) -> Result<()> {
    for (i, w) in s.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::NonMonotone { index: i + 1 });
        }
    }
    if let Some(i) = s.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index: i });
    }
    Ok(())
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch { expected, got });
    }
    Ok(())
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

impl CurveSamples {
    pub fn from_xy(s: Vec<f64>, points: Vec<PlanePoint>, epsilon: CausalSign) -> Result<Self> {
        check_s(&s)?;
        check_len(s.len(), points.len())?;
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFinite { index: i });
        }
        let uv = points.iter().map(|p| (p.u(), p.v())).collect();
        Ok(CurveSamples {
            s,
            points,
            uv,
            epsilon,
            kappa: None,
            kappa_derivatives: None,
            aux: None,
        })
    }

    pub fn from_uv(s: Vec<f64>, u: Vec<f64>, v: Vec<f64>, epsilon: CausalSign) -> Result<Self> {
        check_s(&s)?;
        check_len(s.len(), u.len())?;
        check_len(s.len(), v.len())?;
        check_finite(&u)?;
        check_finite(&v)?;
        let uv: Vec<(f64, f64)> = u.into_iter().zip(v).collect();
        let points = uv.iter().map(|&(u, v)| Vec2::from_uv(u, v)).collect();
        Ok(CurveSamples {
            s,
            points,
            uv,
            epsilon,
            kappa: None,
            kappa_derivatives: None,
            aux: None,
        })
    }

    /// Builds samples from stored rectangular and null columns (as read back
    /// from a file). The two must agree to rounding.
    pub fn from_parts(
        s: Vec<f64>,
        points: Vec<PlanePoint>,
        uv: Vec<(f64, f64)>,
        epsilon: CausalSign,
    ) -> Result<Self> {
        check_s(&s)?;
        check_len(s.len(), points.len())?;
        check_len(s.len(), uv.len())?;
        for (i, (p, &(u, v))) in points.iter().zip(&uv).enumerate() {
            let scale = 1.0 + p.x.abs() + p.y.abs();
            if !(p.is_finite() && u.is_finite() && v.is_finite())
                || (p.u() - u).abs() > 1e-12 * scale
                || (p.v() - v).abs() > 1e-12 * scale
            {
                return Err(Error::NonFinite { index: i });
            }
        }
        Ok(CurveSamples {
            s,
            points,
            uv,
            epsilon,
            kappa: None,
            kappa_derivatives: None,
            aux: None,
        })
    }

    pub fn with_kappa(mut self, kappa: Vec<f64>) -> Result<Self> {
        check_len(self.s.len(), kappa.len())?;
        check_finite(&kappa)?;
        self.kappa = Some(kappa);
        Ok(self)
    }

    /// Attaches exact first and second arc-length derivatives of κ.
    pub fn with_kappa_derivatives(mut self, kd: Vec<f64>, kdd: Vec<f64>) -> Result<Self> {
        check_len(self.s.len(), kd.len())?;
        check_len(self.s.len(), kdd.len())?;
        check_finite(&kd)?;
        check_finite(&kdd)?;
        self.kappa_derivatives = Some((kd, kdd));
        Ok(self)
    }

    /// Attaches an auxiliary parameter column (e.g. the `t` of an AUX_T family).
    pub fn with_aux(mut self, aux: Vec<f64>) -> Result<Self> {
        check_len(self.s.len(), aux.len())?;
        self.aux = Some(aux);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn points(&self) -> &[PlanePoint] {
        &self.points
    }

    pub fn uv(&self) -> &[(f64, f64)] {
        &self.uv
    }

    pub fn u(&self) -> Vec<f64> {
        self.uv.iter().map(|p| p.0).collect()
    }

    pub fn v(&self) -> Vec<f64> {
        self.uv.iter().map(|p| p.1).collect()
    }

    pub fn epsilon(&self) -> CausalSign {
        self.epsilon
    }

    pub fn kappa(&self) -> Option<&[f64]> {
        self.kappa.as_deref()
    }

    pub fn kappa_derivatives(&self) -> Option<(&[f64], &[f64])> {
        self.kappa_derivatives
            .as_ref()
            .map(|(a, b)| (a.as_slice(), b.as_slice()))
    }

    pub fn aux(&self) -> Option<&[f64]> {
        self.aux.as_deref()
    }

    /// Lorentzian pseudodistance from the origin at every sample.
    pub fn rho(&self) -> Vec<f64> {
        self.uv.iter().map(|&(u, v)| (u * v).abs().sqrt()).collect()
    }

    fn with_geometry(&self, s: Vec<f64>, uv: Vec<(f64, f64)>, epsilon: CausalSign) -> Self {
        let points = uv.iter().map(|&(u, v)| Vec2::from_uv(u, v)).collect();
        CurveSamples {
            s,
            points,
            uv,
            epsilon,
            kappa: self.kappa.clone(),
            kappa_derivatives: self.kappa_derivatives.clone(),
            aux: self.aux.clone(),
        }
    }

    /// Applies the ν-orthochrone transformation; curvature is unchanged.
    pub fn orthochrone(&self, nu: f64) -> Self {
        let (ep, em) = (nu.exp(), (-nu).exp());
        let uv = self.uv.iter().map(|&(u, v)| (ep * u, em * v)).collect();
        self.with_geometry(self.s.clone(), uv, self.epsilon)
    }

    /// `(x, y) -> (y, x)`: spacelike and timelike exchange, κ is kept.
    pub fn swap_xy(&self) -> Self {
        let uv = self.uv.iter().map(|&(u, v)| (u, -v)).collect();
        self.with_geometry(self.s.clone(), uv, self.epsilon.flip())
    }

    /// `(u, v) -> (-u, v)`: spacelike and timelike exchange, κ is kept.
    pub fn negate_u(&self) -> Self {
        let uv = self.uv.iter().map(|&(u, v)| (-u, v)).collect();
        self.with_geometry(self.s.clone(), uv, self.epsilon.flip())
    }

    /// Point reflection `(x, y) -> (-x, -y)`.
    pub fn reflect(&self) -> Self {
        let uv = self.uv.iter().map(|&(u, v)| (-u, -v)).collect();
        self.with_geometry(self.s.clone(), uv, self.epsilon)
    }

    pub fn translate(&self, du: f64, dv: f64) -> Self {
        let uv = self.uv.iter().map(|&(u, v)| (u + du, v + dv)).collect();
        self.with_geometry(self.s.clone(), uv, self.epsilon)
    }

    /// Dilation by `k > 0`: lengths scale by `k`, curvature by `1/k`.
    pub fn dilate(&self, k: f64) -> Self {
        let uv = self.uv.iter().map(|&(u, v)| (k * u, k * v)).collect();
        let s = self.s.iter().map(|s| k * s).collect();
        let mut out = self.with_geometry(s, uv, self.epsilon);
        if let Some(kap) = &mut out.kappa {
            kap.iter_mut().for_each(|x| *x /= k);
        }
        if let Some((kd, kdd)) = &mut out.kappa_derivatives {
            kd.iter_mut().for_each(|x| *x /= k * k);
            kdd.iter_mut().for_each(|x| *x /= k * k * k);
        }
        out
    }

    /// Shifts the arc-length parameter.
    pub fn shift_s(&self, ds: f64) -> Self {
        let mut out = self.clone();
        out.s.iter_mut().for_each(|s| *s += ds);
        out
    }
}

/// Finite-difference weights for derivatives `0..=m` at `z` from nodes `x`.
fn fornberg(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// First- and second-derivative stencils on a (possibly nonuniform) grid.
///
/// Interior points use a centred window of `width` nodes; the ends fall
/// back to one-sided windows of the same width.
#[derive(Debug, Clone)]
pub struct Stencils {
    start: Vec<usize>,
    d1: Vec<Vec<f64>>,
    d2: Vec<Vec<f64>>,
    width: usize,
}

impl Stencils {
    pub fn new(s: &[f64], width: usize) -> Result<Self> {
        let width = width.max(3);
        if s.len() < width {
            return Err(Error::TooFewSamples {
                needed: width,
                got: s.len(),
            });
        }
        check_s(s)?;
        let n = s.len();
        let half = width / 2;
        let mut start = Vec::with_capacity(n);
        let mut d1 = Vec::with_capacity(n);
        let mut d2 = Vec::with_capacity(n);
        for i in 0..n {
            let lo = i.saturating_sub(half).min(n - width);
            // centre the nodes on s_i to keep the weights well conditioned
            let x: Vec<f64> = s[lo..lo + width].iter().map(|&sj| sj - s[i]).collect();
            let c = fornberg(0.0, &x, 2);
            start.push(lo);
            d1.push(c[1].clone());
            d2.push(c[2].clone());
        }
        Ok(Stencils {
            start,
            d1,
            d2,
            width,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn first(&self, f: &[f64]) -> Vec<f64> {
        self.apply(f, &self.d1)
    }

    pub fn second(&self, f: &[f64]) -> Vec<f64> {
        self.apply(f, &self.d2)
    }

    fn apply(&self, f: &[f64], w: &[Vec<f64>]) -> Vec<f64> {
        self.start
            .iter()
            .zip(w)
            .map(|(&lo, w)| w.iter().zip(&f[lo..lo + self.width]).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// First and second derivatives of sampled values.
pub fn differentiate(s: &[f64], f: &[f64], width: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    check_len(s.len(), f.len())?;
    let st = Stencils::new(s, width)?;
    Ok((st.first(f), st.second(f)))
}

/// Velocity and acceleration of a sampled curve in null coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullJet {
    pub ud: f64,
    pub vd: f64,
    pub udd: f64,
    pub vdd: f64,
}

impl NullJet {
    /// `g(γ', γ') = u' v'`.
    pub fn speed_sq(&self) -> f64 {
        self.ud * self.vd
    }

    pub fn curvature(&self, epsilon: CausalSign) -> f64 {
        curvature_null(epsilon.value(), self.ud, self.vd, self.udd, self.vdd)
    }
}

pub fn null_jets(samples: &CurveSamples, width: usize) -> Result<Vec<NullJet>> {
    let st = Stencils::new(samples.s(), width)?;
    let (u, v) = (samples.u(), samples.v());
    let (ud, udd) = (st.first(&u), st.second(&u));
    let (vd, vdd) = (st.first(&v), st.second(&v));
    Ok((0..samples.len())
        .map(|i| NullJet {
            ud: ud[i],
            vd: vd[i],
            udd: udd[i],
            vdd: vdd[i],
        })
        .collect())
}

/// Default stencil width for curvature estimates.
pub const DEFAULT_STENCIL: usize = 5;

/// Finite-difference curvature `ε (ẍẏ − ẋÿ)` at every sample (5-point stencils).
pub fn numeric_curvature(samples: &CurveSamples) -> Result<Vec<f64>> {
    numeric_curvature_with(samples, DEFAULT_STENCIL)
}

pub fn numeric_curvature_with(samples: &CurveSamples, width: usize) -> Result<Vec<f64>> {
    let eps = samples.epsilon();
    Ok(null_jets(samples, width)?
        .iter()
        .map(|j| j.curvature(eps))
        .collect())
}

/// Evenly spaced values on `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let h = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { b } else { a + h * i as f64 })
        .collect()
}

/// Geometrically spaced values on `[a, b]`; both ends must share a sign.
pub fn geomspace(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if !(a * b > 0.0) {
        return Err(Error::InvalidParameter {
            name: "s_range".into(),
            value: a,
            reason: "geometric spacing needs both ends of one sign".into(),
        });
    }
    let (la, lb) = (a.abs().ln(), b.abs().ln());
    let sg = a.signum();
    Ok(linspace(la, lb, n)
        .into_iter()
        .enumerate()
        .map(|(i, l)| {
            if i == 0 {
                a
            } else if i + 1 == n {
                b
            } else {
                sg * l.exp()
            }
        })
        .collect())
}
