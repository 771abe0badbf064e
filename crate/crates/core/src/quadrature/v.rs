//! The v pipeline: `ds = ε K dv`, `du = ε K² dv`.

use std::sync::Arc;

use super::domain::{domain_scan, EndpointKind, Interval};
use super::gauss_kronrod::QuadTol;
use super::momentum::{RealFn, Variable};
use super::table::Cumulative;
use super::{choose_interval, SolveRequest};
use crate::error::{Error, Result};
use crate::samples::CurveSamples;

const PANELS: usize = 1024;
const DEFAULT_WINDOW: (f64, f64) = (-4.0, 4.0);

/// Output of the v pipeline with its intermediate columns.
#[derive(Debug, Clone)]
pub struct VSolution {
    pub samples: CurveSamples,
    pub interval: Interval,
    pub s_range: (f64, f64),
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// Value of v where s = 0 and u = 0.
    pub anchor: f64,
}

fn is_trimmed(kind: EndpointKind) -> bool {
    matches!(kind, EndpointKind::Pole | EndpointKind::Zero)
}

fn sample_window(request: &SolveRequest, iv: &Interval) -> (f64, f64) {
    let (wl, wh) = request.sampling.window.unwrap_or(DEFAULT_WINDOW);
    let (mut lo, mut hi) = (iv.lo.max(wl), iv.hi.min(wh));
    if !(lo < hi) {
        lo = iv.lo;
        hi = iv.hi;
    }
    let g = request.sampling.guard * (hi - lo);
    if lo == iv.lo && is_trimmed(iv.lo_kind) {
        lo += g;
    }
    if hi == iv.hi && is_trimmed(iv.hi_kind) {
        hi -= g;
    }
    (lo, hi)
}

pub fn solve_kappa_v(request: &SolveRequest) -> Result<CurveSamples> {
    solve_kappa_v_detailed(request).map(|s| s.samples)
}

pub fn solve_kappa_v_detailed(request: &SolveRequest) -> Result<VSolution> {
    request.validate()?;
    if request.momentum.variable != Variable::V {
        return Err(Error::InvalidParameter {
            name: "variable".into(),
            value: f64::NAN,
            reason: "the v pipeline needs a momentum of v".into(),
        });
    }
    let intervals = domain_scan(request)?;
    if let Some(h) = request.domain_hint {
        for iv in &intervals {
            for (kind, at) in [(iv.lo_kind, iv.lo), (iv.hi_kind, iv.hi)] {
                if at > h.lo && at < h.hi {
                    match kind {
                        EndpointKind::Zero => return Err(Error::MomentumZeroCrossing { location: at }),
                        EndpointKind::Pole | EndpointKind::Regular => {
                            return Err(Error::SingularRange { location: at })
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    let window = request.sampling.window.unwrap_or(DEFAULT_WINDOW);
    let interval = choose_interval(&intervals, request.domain_hint, window)?;
    let sw = sample_window(request, &interval);
    if request.momentum.kappa.is_some() {
        let probe: Vec<f64> = (1..16).map(|i| sw.0 + (sw.1 - sw.0) * i as f64 / 16.0).collect();
        request.momentum.check_consistency(request.epsilon, &probe)?;
    }
    let anchor = match request.anchor {
        Some(a) if interval.contains(a) => a,
        Some(a) => {
            return Err(Error::OutOfDomain {
                what: "anchor",
                value: a,
                domain: format!("[{}, {}]", interval.lo, interval.hi),
            })
        }
        None => 0.5 * (sw.0 + sw.1),
    };

    let eps = request.epsilon.value();
    let k = request.momentum.k.clone();
    let tol = QuadTol::new(request.tolerances.integral, 1e-13);
    let ks = k.clone();
    let fs: RealFn = Arc::new(move |v| eps * ks(v));
    let ku = k.clone();
    let fu: RealFn = Arc::new(move |v| {
        let q = ku(v);
        eps * q * q
    });
    let s_cum = Cumulative::uniform(fs, interval.lo, interval.hi, PANELS, anchor, tol);
    let u_cum = Cumulative::uniform(fu, interval.lo, interval.hi, PANELS, anchor, tol);

    let s_range = match request.sampling.s_range {
        Some(r) => r,
        None => {
            let (a, b) = (s_cum.eval(sw.0), s_cum.eval(sw.1));
            if !(a.is_finite() && b.is_finite()) {
                return Err(Error::QuadratureFailed {
                    a: sw.0,
                    b: sw.1,
                    tol: tol.abs,
                });
            }
            (a.min(b), a.max(b))
        }
    };
    let s = request.sampling.grid(s_range.0, s_range.1)?;
    let xtol = 1e-15 * (interval.hi - interval.lo).abs().max(1.0);
    let mut v = Vec::with_capacity(s.len());
    let mut u = Vec::with_capacity(s.len());
    for &si in &s {
        let vi = s_cum.invert(si, xtol, request.tolerances.inversion)?;
        let ui = u_cum.eval(vi);
        if !ui.is_finite() {
            return Err(Error::SingularRange { location: si });
        }
        v.push(vi);
        u.push(ui);
    }
    let kappa = v.iter().map(|&x| request.momentum.kappa_at(x, request.epsilon)).collect();
    let samples = CurveSamples::from_uv(s, u.clone(), v.clone(), request.epsilon)?.with_kappa(kappa)?;
    Ok(VSolution {
        samples,
        interval,
        s_range,
        u,
        v,
        anchor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane::CausalSign;
    use crate::quadrature::MomentumSpec;
    use crate::samples::{null_jets, numeric_curvature};
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_momentum_gives_a_line() {
        for eps in [CausalSign::Spacelike, CausalSign::Timelike] {
            let c = 2.0;
            let e = eps.value();
            let r = SolveRequest::new(MomentumSpec::v(move |_| -e / c, c), eps);
            let sol = solve_kappa_v_detailed(&r).unwrap();
            for i in 0..sol.v.len() {
                let s = sol.samples.s()[i];
                assert_abs_diff_eq!(sol.v[i] - sol.anchor, -c * s, epsilon = 1e-10);
                assert_abs_diff_eq!(sol.u[i], -e * s / c, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn pseudocircle_in_null_coordinates() {
        // κ = k0, K = -ε/(c + k0 v): v = (e^{-k0 s} - c)/k0, u = -ε e^{k0 s}/k0
        let (k0, c) = (0.5, 0.3);
        for eps in [CausalSign::Spacelike, CausalSign::Timelike] {
            let e = eps.value();
            let m = MomentumSpec::v(move |v| -e / (c + k0 * v), c).with_kappa(move |_| k0);
            let sol = solve_kappa_v_detailed(&SolveRequest::new(m, eps)).unwrap();
            // align: s = 0 at v_ref, so the closed-form s is s + s0 with v(s0) = anchor
            let s0 = -((c + k0 * sol.anchor).ln()) / k0;
            let u0 = -e * (k0 * s0).exp() / k0;
            for i in (0..sol.v.len()).step_by(31) {
                let sp = sol.samples.s()[i] + s0;
                assert_abs_diff_eq!(sol.v[i], ((-k0 * sp).exp() - c) / k0, epsilon = 1e-9);
                assert_abs_diff_eq!(sol.u[i] + u0, -e * (k0 * sp).exp() / k0, epsilon = 1e-9);
            }
            let kn = numeric_curvature(&sol.samples).unwrap();
            for &q in &kn[2..kn.len() - 2] {
                assert_abs_diff_eq!(q, k0, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn elastic_zero_constant() {
        // κ = 2v, c = 0: v = 1/s, u = -ε s³/3
        let eps = CausalSign::Spacelike;
        let m = MomentumSpec::v(|v| -1.0 / (v * v), 0.0).with_kappa(|v| 2.0 * v);
        let sol = solve_kappa_v_detailed(&SolveRequest::new(m, eps).with_count(4000)).unwrap();
        assert_eq!(sol.interval.lo_kind, EndpointKind::Pole);
        let s_at = |v: f64| 1.0 / v;
        let sh = s_at(sol.anchor);
        for i in (0..sol.v.len()).step_by(17) {
            let sp = sol.samples.s()[i] + sh;
            assert_abs_diff_eq!(sol.v[i], 1.0 / sp, epsilon = 1e-9 * (1.0 + 1.0 / sp));
            assert_abs_diff_eq!(sol.u[i] - sh.powi(3) / 3.0, -sp.powi(3) / 3.0, epsilon = 1e-8 * (1.0 + sp.powi(3)));
        }
        // v = 1/s is steep near the pole end; skip the usual 2% band
        let jets = null_jets(&sol.samples, 5).unwrap();
        for j in &jets[80..jets.len() - 80] {
            assert!((j.speed_sq() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_crossing_inside_hint_is_reported() {
        let r = SolveRequest::new(MomentumSpec::v(|v| v, 0.0), CausalSign::Spacelike).with_hint(-1.0, 1.0);
        assert!(matches!(solve_kappa_v(&r), Err(Error::MomentumZeroCrossing { .. })));
    }

    #[test]
    fn out_of_range_s_is_rejected() {
        // K = -1/(1 + v²): total arc length over all v is finite
        let r = SolveRequest::new(MomentumSpec::v(|v| -1.0 / (1.0 + v * v), 1.0), CausalSign::Spacelike)
            .with_s_range(-10.0, 10.0);
        assert!(matches!(solve_kappa_v(&r), Err(Error::OutOfDomain { .. })));
    }
}
