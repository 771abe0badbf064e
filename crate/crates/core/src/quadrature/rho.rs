//! The ρ pipeline: `ds = ρ dρ / sqrt(R)`, `dν = K ds / ρ²`, with
//! `R = K(ρ)² + σρ²` and σ = ε·branch.

use std::sync::Arc;

use super::domain::{domain_scan, EndpointKind, Interval};
use super::gauss_kronrod::QuadTol;
use super::momentum::{RealFn, Variable};
use super::table::{Cumulative, MonotoneTable, Tabulated};
use super::{choose_interval, SolveRequest};
use crate::error::{Error, Result};
use crate::plane::{Branch, CausalSign, Side};
use crate::samples::{linspace, CurveSamples};

const PANELS: usize = 1024;
const DEFAULT_WINDOW: (f64, f64) = (0.0, 10.0);

#[derive(Debug, Clone, Copy, PartialEq)]
enum ChartKind {
    Plain,
    /// ρ = a + τ²
    Lo,
    /// ρ = b - (T - τ)²
    Hi,
    /// ρ = a + (b - a) sin²τ, τ ∈ [0, π/2]
    Both,
}

/// Substitution removing inverse-square-root singularities at the ends.
#[derive(Debug, Clone, Copy)]
struct Chart {
    kind: ChartKind,
    a: f64,
    b: f64,
    t: f64,
}

impl Chart {
    fn new(a: f64, b: f64, lo_sub: bool, hi_sub: bool) -> Self {
        let (kind, t) = match (lo_sub, hi_sub) {
            (false, false) => (ChartKind::Plain, b - a),
            (true, false) => (ChartKind::Lo, (b - a).sqrt()),
            (false, true) => (ChartKind::Hi, (b - a).sqrt()),
            (true, true) => (ChartKind::Both, std::f64::consts::FRAC_PI_2),
        };
        Chart { kind, a, b, t }
    }

    fn rho(&self, tau: f64) -> f64 {
        match self.kind {
            ChartKind::Plain => self.a + tau,
            ChartKind::Lo => self.a + tau * tau,
            ChartKind::Hi => {
                let d = self.t - tau;
                self.b - d * d
            }
            ChartKind::Both => {
                let sn = tau.sin();
                self.a + (self.b - self.a) * sn * sn
            }
        }
    }

    fn drho(&self, tau: f64) -> f64 {
        match self.kind {
            ChartKind::Plain => 1.0,
            ChartKind::Lo => 2.0 * tau,
            ChartKind::Hi => 2.0 * (self.t - tau),
            ChartKind::Both => (self.b - self.a) * (2.0 * tau).sin(),
        }
    }

    fn tau(&self, rho: f64) -> f64 {
        let r = rho.clamp(self.a, self.b);
        let tau = match self.kind {
            ChartKind::Plain => r - self.a,
            ChartKind::Lo => (r - self.a).sqrt(),
            ChartKind::Hi => self.t - (self.b - r).sqrt(),
            ChartKind::Both => ((r - self.a) / (self.b - self.a)).sqrt().asin(),
        };
        tau.clamp(0.0, self.t)
    }
}

/// Quadratic in `d²` through `f` at `d = te, 2te, 3te`; replaces an even
/// integrand next to a simple zero where the radicand loses digits.
#[derive(Debug, Clone, Copy)]
struct EvenFit {
    te: f64,
    x: [f64; 3],
    y: [f64; 3],
}

impl EvenFit {
    fn new(f: impl Fn(f64) -> f64, te: f64) -> Self {
        let mut x = [0.0; 3];
        let mut y = [0.0; 3];
        for i in 0..3 {
            let d = te * (i + 1) as f64;
            x[i] = d * d;
            y[i] = f(d);
        }
        EvenFit { te, x, y }
    }

    fn eval(&self, d: f64) -> f64 {
        let z = d * d;
        let [x0, x1, x2] = self.x;
        self.y[0] * (z - x1) * (z - x2) / ((x0 - x1) * (x0 - x2))
            + self.y[1] * (z - x0) * (z - x2) / ((x1 - x0) * (x1 - x2))
            + self.y[2] * (z - x0) * (z - x1) / ((x2 - x0) * (x2 - x1))
    }
}

fn chart_integrand(
    chart: Chart,
    k: RealFn,
    sigma: f64,
    for_nu: bool,
    fit_lo: bool,
    fit_hi: bool,
) -> RealFn {
    let raw = move |tau: f64| {
        let rho = chart.rho(tau);
        let kv = k(rho);
        let r = kv * kv + sigma * rho * rho;
        let rp = chart.drho(tau);
        if for_nu {
            kv * rp / (rho * r.sqrt())
        } else {
            rho * rp / r.sqrt()
        }
    };
    let te = (1e-3 * chart.t).min(0.25 * chart.t);
    let lo = fit_lo.then(|| EvenFit::new(&raw, te));
    let hi = fit_hi.then(|| EvenFit::new(|d| raw(chart.t - d), te));
    Arc::new(move |tau: f64| {
        if let Some(f) = &lo {
            if tau < f.te {
                return f.eval(tau);
            }
        }
        if let Some(f) = &hi {
            let d = chart.t - tau;
            if d < f.te {
                return f.eval(d);
            }
        }
        raw(tau)
    })
}

/// Arc length and orthochrone angle along one validity interval.
///
/// `s = 0` at the lower end ρ = a. Across a turning point (simple zero of
/// the radicand) the curve continues by reflection: `ρ(-s) = ρ(s)` below a
/// lower one and `ρ(2S - s) = ρ(s)` above an upper one, where `S` is the
/// arc length of the whole interval.
#[derive(Clone)]
pub struct ArcTable {
    interval: Interval,
    chart: Chart,
    s_cum: Cumulative,
    nu_cum: Cumulative,
    s_total: f64,
    nu_lo: f64,
    nu_hi: f64,
    inversion_tol: f64,
    k: RealFn,
    kappa: Option<RealFn>,
    epsilon: CausalSign,
    branch: Branch,
    sign: Side,
}

impl std::fmt::Debug for ArcTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ArcTable")
            .field("interval", &self.interval)
            .field("s_total", &self.s_total)
            .finish()
    }
}

fn nu_anchor(request: &SolveRequest, interval: &Interval, window: (f64, f64)) -> Result<f64> {
    if let Some(a) = request.anchor {
        if !interval.contains(a) {
            return Err(Error::OutOfDomain {
                what: "anchor",
                value: a,
                domain: format!("[{}, {}]", interval.lo, interval.hi),
            });
        }
        return Ok(a);
    }
    if interval.lo_kind == EndpointKind::SimpleZero && window.0 == interval.lo {
        return Ok(interval.lo);
    }
    if interval.hi_kind == EndpointKind::SimpleZero && window.1 == interval.hi {
        return Ok(interval.hi);
    }
    Ok(0.5 * (window.0 + window.1))
}

/// Range of ρ the default samples are drawn from: the interval within the
/// sampling window, with an origin end pulled in by the guard fraction.
fn sample_window(request: &SolveRequest, interval: &Interval) -> (f64, f64) {
    let (wl, wh) = request.sampling.window.unwrap_or(DEFAULT_WINDOW);
    let (mut lo, mut hi) = (interval.lo.max(wl), interval.hi.min(wh));
    if !(lo < hi) {
        lo = interval.lo;
        hi = interval.hi;
    }
    let g = request.sampling.guard * (hi - lo);
    if lo == interval.lo && interval.lo_kind == EndpointKind::Origin {
        lo += g;
    }
    (lo, hi)
}

/// Tabulates `s(ρ)` and `ν(ρ)` on `interval`.
pub fn arc_from_rho(request: &SolveRequest, interval: Interval) -> Result<ArcTable> {
    if request.momentum.variable != Variable::Rho {
        return Err(Error::InvalidParameter {
            name: "variable".into(),
            value: f64::NAN,
            reason: "the rho pipeline needs a momentum of rho".into(),
        });
    }
    for (kind, at) in [(interval.lo_kind, interval.lo), (interval.hi_kind, interval.hi)] {
        if kind == EndpointKind::DoubleZero {
            return Err(Error::NonIntegrable { location: at });
        }
    }
    if !(interval.lo >= 0.0 && interval.lo < interval.hi) {
        return Err(Error::EmptyDomain {
            lo: interval.lo,
            hi: interval.hi,
        });
    }
    let lo_sub = matches!(interval.lo_kind, EndpointKind::Origin | EndpointKind::SimpleZero);
    let hi_sub = interval.hi_kind == EndpointKind::SimpleZero;
    let chart = Chart::new(interval.lo, interval.hi, lo_sub, hi_sub);
    let sigma = request.radicand_sign();
    let k = request.momentum.k.clone();
    let fit_lo = interval.lo_kind == EndpointKind::SimpleZero;
    let tol = QuadTol::new(request.tolerances.integral, 1e-13);

    let fs = chart_integrand(chart, k.clone(), sigma, false, fit_lo, hi_sub);
    let fnu = chart_integrand(chart, k.clone(), sigma, true, fit_lo, hi_sub);
    let nodes = linspace(0.0, chart.t, PANELS + 1);
    let s_cum = Cumulative::build(fs, nodes.clone(), 0, tol);
    let s_total = s_cum.values()[PANELS];
    if !s_total.is_finite() {
        return Err(Error::QuadratureFailed {
            a: interval.lo,
            b: interval.hi,
            tol: tol.abs,
        });
    }

    let window = sample_window(request, &interval);
    let anchor_rho = nu_anchor(request, &interval, window)?;
    let nu_cum = Cumulative::uniform(fnu, 0.0, chart.t, PANELS, chart.tau(anchor_rho), tol);
    let nu_lo = if lo_sub && interval.lo_kind == EndpointKind::Origin {
        f64::NAN
    } else {
        nu_cum.eval(0.0)
    };
    let nu_hi = nu_cum.eval(chart.t);
    Ok(ArcTable {
        interval,
        chart,
        s_cum,
        nu_cum,
        s_total,
        nu_lo,
        nu_hi,
        inversion_tol: request.tolerances.inversion,
        k,
        kappa: request.momentum.kappa.clone(),
        epsilon: request.epsilon,
        branch: request.branch,
        sign: request.sign,
    })
}

impl ArcTable {
    pub fn interval(&self) -> Interval {
        self.interval
    }

    /// Arc length from ρ = a to ρ = b.
    pub fn total_length(&self) -> f64 {
        self.s_total
    }

    pub fn lo_turning(&self) -> bool {
        self.interval.lo_kind == EndpointKind::SimpleZero
    }

    pub fn hi_turning(&self) -> bool {
        self.interval.hi_kind == EndpointKind::SimpleZero
    }

    /// Arc-length range the table can produce, reflections included.
    pub fn natural_range(&self) -> (f64, f64) {
        let lo = if self.lo_turning() { -self.s_total } else { 0.0 };
        let hi = if self.hi_turning() {
            2.0 * self.s_total
        } else {
            self.s_total
        };
        (lo, hi)
    }

    /// `s(ρ)` on the first sweep (`0 <= s <= S`).
    pub fn s_of_rho(&self, rho: f64) -> f64 {
        self.s_cum.eval(self.chart.tau(rho))
    }

    /// `ν(ρ)` on the first sweep.
    pub fn nu_of_rho(&self, rho: f64) -> f64 {
        self.nu_cum.eval(self.chart.tau(rho))
    }

    fn tau_of_s(&self, s: f64) -> Result<f64> {
        let xtol = 1e-14 * self.chart.t;
        self.s_cum.invert(s, xtol, self.inversion_tol)
    }

    fn fold(&self, s: f64) -> Result<(f64, i8)> {
        let (lo, hi) = self.natural_range();
        let slack = 1e-12 * (1.0 + self.s_total.abs());
        if !(s >= lo - slack && s <= hi + slack) {
            return Err(Error::OutOfDomain {
                what: "arc length",
                value: s,
                domain: format!("[{lo}, {hi}]"),
            });
        }
        if s < 0.0 {
            Ok(((-s).min(self.s_total), -1))
        } else if s > self.s_total {
            Ok(((2.0 * self.s_total - s).max(0.0), 1))
        } else {
            Ok((s, 0))
        }
    }

    /// `(ρ, ν)` at arc length `s`, reflections included.
    pub fn state(&self, s: f64) -> Result<(f64, f64)> {
        let (s1, side) = self.fold(s)?;
        let tau = self.tau_of_s(s1)?;
        let rho = self.chart.rho(tau);
        let nu = self.nu_cum.eval(tau);
        let nu = match side {
            -1 => 2.0 * self.nu_lo - nu,
            1 => 2.0 * self.nu_hi - nu,
            _ => nu,
        };
        Ok((rho, nu))
    }

    pub fn rho_of_s(&self, s: f64) -> Result<f64> {
        self.state(s).map(|p| p.0)
    }

    /// The first sweep as a monotone `ρ -> s` table refined by the integral.
    pub fn table(&self, count: usize) -> Result<MonotoneTable> {
        let rho: Vec<f64> = linspace(0.0, self.chart.t, count.max(2))
            .into_iter()
            .map(|t| self.chart.rho(t))
            .collect();
        let me = self.clone();
        let exact: RealFn = Arc::new(move |r| me.s_of_rho(r));
        let s: Vec<f64> = rho.iter().map(|&r| exact(r)).collect();
        Ok(MonotoneTable::new(rho, s)?.with_exact(exact))
    }

    fn kappa_of_rho(&self, rho: f64) -> f64 {
        match &self.kappa {
            Some(f) => f(rho),
            None => {
                let h = 1e-3 * rho.abs().max(1e-2);
                let k = &self.k;
                (k(rho - 2.0 * h) - 8.0 * k(rho - h) + 8.0 * k(rho + h) - k(rho + 2.0 * h)) / (12.0 * h * rho)
            }
        }
    }
}

/// ν at each requested arc length.
pub fn nu_from_s(arc: &ArcTable, s: &[f64]) -> Result<Tabulated> {
    let mut nu = Vec::with_capacity(s.len());
    for &si in s {
        let (rho, n) = arc.state(si)?;
        if !(rho > 0.0) || !n.is_finite() {
            return Err(Error::SingularRange { location: si });
        }
        nu.push(n);
    }
    Tabulated::new(s.to_vec(), nu)
}

/// Output of the ρ pipeline with its intermediate columns.
#[derive(Debug, Clone)]
pub struct RhoSolution {
    pub samples: CurveSamples,
    pub interval: Interval,
    pub s_range: (f64, f64),
    pub rho: Vec<f64>,
    pub nu: Vec<f64>,
    pub total_length: f64,
    pub arc: ArcTable,
}

fn default_s_range(arc: &ArcTable, window: (f64, f64)) -> (f64, f64) {
    let iv = arc.interval;
    let lo_turn = arc.lo_turning() && window.0 == iv.lo;
    let hi_turn = arc.hi_turning() && window.1 == iv.hi;
    let st = arc.s_total;
    let s_lo = if window.0 == iv.lo { 0.0 } else { arc.s_of_rho(window.0) };
    let s_hi = if window.1 == iv.hi { st } else { arc.s_of_rho(window.1) };
    match (lo_turn, hi_turn) {
        (true, true) => (-st, 2.0 * st),
        (true, false) => (-s_hi, s_hi),
        (false, true) => (s_lo, 2.0 * st - s_lo),
        (false, false) => (s_lo, s_hi),
    }
}

pub fn solve_kappa_rho(request: &SolveRequest) -> Result<CurveSamples> {
    solve_kappa_rho_detailed(request).map(|s| s.samples)
}

pub fn solve_kappa_rho_detailed(request: &SolveRequest) -> Result<RhoSolution> {
    request.validate()?;
    let intervals = domain_scan(request)?;
    let window = request.sampling.window.unwrap_or(DEFAULT_WINDOW);
    let interval = choose_interval(&intervals, request.domain_hint, window)?;
    let arc = arc_from_rho(request, interval)?;
    let sw = sample_window(request, &interval);
    if request.momentum.kappa.is_some() {
        let probe = linspace(sw.0, sw.1, 17);
        request.momentum.check_consistency(request.epsilon, &probe[1..16])?;
    }
    let s_range = request.sampling.s_range.unwrap_or_else(|| default_s_range(&arc, sw));
    let s = request.sampling.grid(s_range.0, s_range.1)?;
    let nu = nu_from_s(&arc, &s)?.y;
    let mut rho = Vec::with_capacity(s.len());
    for &si in &s {
        rho.push(arc.rho_of_s(si)?);
    }
    let sg = arc.sign.value();
    let br = arc.branch.value();
    let u: Vec<f64> = rho.iter().zip(&nu).map(|(r, n)| sg * r * n.exp()).collect();
    let v: Vec<f64> = rho.iter().zip(&nu).map(|(r, n)| sg * br * r * (-n).exp()).collect();
    let kappa = rho.iter().map(|&r| arc.kappa_of_rho(r)).collect();
    let samples = CurveSamples::from_uv(s.clone(), u, v, arc.epsilon)?.with_kappa(kappa)?;
    Ok(RhoSolution {
        samples,
        interval,
        s_range,
        rho,
        nu,
        total_length: arc.s_total,
        arc,
    })
}

/// Radii of the constant-ρ solutions: double zeros of the radicand, where
/// `K(ρ₀)² = ρ₀²` and the curve is a pseudocircle about the origin.
pub fn equilibria(request: &SolveRequest) -> Result<Vec<f64>> {
    let intervals = match domain_scan(request) {
        Ok(iv) => iv,
        Err(Error::EmptyDomain { .. }) => Vec::new(),
        Err(e) => return Err(e),
    };
    let mut out: Vec<f64> = Vec::new();
    for iv in intervals {
        for (kind, at) in [(iv.lo_kind, iv.lo), (iv.hi_kind, iv.hi)] {
            if kind == EndpointKind::DoubleZero && !out.iter().any(|&r| (r - at).abs() < 1e-6 * (1.0 + at)) {
                out.push(at);
            }
        }
    }
    Ok(out)
}

/// The pseudocircle `ρ ≡ ρ₀`, `ν = K(ρ₀) s / ρ₀²`.
pub fn emit_equilibrium(request: &SolveRequest, rho0: f64) -> Result<CurveSamples> {
    request.validate()?;
    if !(rho0 > 0.0) {
        return Err(Error::InvalidParameter {
            name: "rho0".into(),
            value: rho0,
            reason: "radius must be positive".into(),
        });
    }
    let sigma = request.radicand_sign();
    let kv = request.momentum.eval(rho0);
    let resid = (kv * kv + sigma * rho0 * rho0).abs() / (rho0 * rho0);
    if sigma > 0.0 || resid > 1e-8 {
        return Err(Error::InvalidParameter {
            name: "rho0".into(),
            value: rho0,
            reason: "not a constant solution for this momentum, sign and branch".into(),
        });
    }
    let nud = kv / (rho0 * rho0);
    let (lo, hi) = request.sampling.s_range.unwrap_or((-2.0 * rho0, 2.0 * rho0));
    let s = request.sampling.grid(lo, hi)?;
    let sg = request.sign.value();
    let br = request.branch.value();
    let u = s.iter().map(|&t| sg * rho0 * (nud * t).exp()).collect();
    let v = s.iter().map(|&t| sg * br * rho0 * (-nud * t).exp()).collect();
    let kappa = vec![request.momentum.kappa_at(rho0, request.epsilon); s.len()];
    CurveSamples::from_uv(s, u, v, request.epsilon)?.with_kappa(kappa)
}
