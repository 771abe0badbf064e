use std::f64::consts::PI;
use std::sync::Arc;

use super::{ClosedForm, FamilyDescriptor, FamilyId, Parameterization};
use crate::error::{Error, Result};
use crate::quadrature::roots::brent;
use crate::quadrature::{Interval, MomentumSpec, RealFn, Spacing};

/// Null coordinates and curvature of a family member at one parameter value.
#[derive(Debug, Clone, Copy)]
pub(crate) struct State {
    pub u: f64,
    pub v: f64,
    pub kappa: f64,
    /// Exact `(κ', κ'')` in arc length.
    pub jets: Option<(f64, f64)>,
}

type StateFn = Arc<dyn Fn(f64) -> State + Send + Sync>;

fn invalid(name: &str, value: f64, reason: &str) -> Error {
    Error::InvalidParameter {
        name: name.to_string(),
        value,
        reason: reason.to_string(),
    }
}

fn all_reals() -> Interval {
    Interval::new(f64::NEG_INFINITY, f64::INFINITY)
}

fn arc_form(
    desc: &FamilyDescriptor,
    domain: Interval,
    range: (f64, f64),
    momentum: MomentumSpec,
    intrinsic: Option<RealFn>,
    state: StateFn,
) -> ClosedForm {
    ClosedForm {
        parameterization: Parameterization::ArcLength,
        domain,
        default_range: range,
        spacing: Spacing::Uniform,
        momentum,
        intrinsic_kappa: intrinsic,
        epsilon: desc.epsilon,
        state,
        ds: None,
        s_closed: None,
    }
}

/// State from pseudopolar coordinates in the descriptor's wedge.
fn polar_state(desc: &FamilyDescriptor, rho_nu: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static, kappa: impl Fn(f64) -> f64 + Send + Sync + 'static) -> StateFn {
    let sg = desc.sign.value();
    let br = desc.branch.value();
    Arc::new(move |x| {
        let (rho, nu) = rho_nu(x);
        State {
            u: sg * rho * nu.exp(),
            v: sg * br * rho * (-nu).exp(),
            kappa: kappa(rho),
            jets: None,
        }
    })
}

pub(crate) fn build(desc: &FamilyDescriptor) -> Result<ClosedForm> {
    match desc.id {
        FamilyId::Geodesic => geodesic(desc),
        FamilyId::PseudocircleOrigin => pseudocircle_origin(desc),
        FamilyId::PseudocircleV => pseudocircle_v(desc),
        FamilyId::Norwich => norwich(desc),
        FamilyId::SturmExtended => sturm(desc),
        FamilyId::Sinusoidal => sinusoidal(desc),
        FamilyId::Elastic => elastic(desc),
        FamilyId::Enneper => enneper(desc),
        FamilyId::EnneperC => enneper_c(desc),
        FamilyId::GrimReaper => grim_reaper(desc),
        FamilyId::ExpC => exp_c(desc),
    }
}

fn geodesic(desc: &FamilyDescriptor) -> Result<ClosedForm> {
    let phi0 = desc.param("phi0")?;
    let sg = desc.sign.value();
    let e = desc.epsilon.value();
    let (ep, em) = (phi0.exp(), (-phi0).exp());
    // spacelike (sinh φ0 s, cosh φ0 s), timelike (cosh φ0 s, sinh φ0 s)
    let state: StateFn = Arc::new(move |s| State {
        u: sg * ep * s,
        v: sg * e * em * s,
        kappa: 0.0,
        jets: Some((0.0, 0.0)),
    });
    let m = MomentumSpec::rho(|_| 0.0, 0.0).with_kappa(|_| 0.0);
    Ok(arc_form(desc, all_reals(), (-1.0, 1.0), m, Some(Arc::new(|_| 0.0)), state))
}

fn pseudocircle_origin(desc: &FamilyDescriptor) -> Result<ClosedForm> {
    let k0 = desc.param("k0")?;
    if !(k0 > 0.0) {
        return Err(invalid("k0", k0, "must be positive"));
    }
    let plus = desc.sigma() > 0.0;
    // σ = +1 passes through the origin; the signed sinh keeps it smooth there
    let state = polar_state(
        desc,
        move |s| {
            let rho = if plus { (k0 * s).sinh() } else { (k0 * s).cosh() } / k0;
            (rho, k0 * s)
        },
        move |_| 2.0 * k0,
    );
    let m = MomentumSpec::rho(move |r| k0 * r * r, 0.0).with_kappa(move |_| 2.0 * k0);
    Ok(arc_form(
        desc,
        all_reals(),
        (-3.0 / k0, 3.0 / k0),
        m,
        Some(Arc::new(move |_| 2.0 * k0)),
        state,
    ))
}

fn pseudocircle_v(desc: &FamilyDescriptor) -> Result<ClosedForm> {
    let (k0, c) = (desc.param("k0")?, desc.param("c")?);
    if !(k0 > 0.0) {
        return Err(invalid("k0", k0, "must be positive"));
    }
    let e = desc.epsilon.value();
    let state: StateFn = Arc::new(move |s| State {
        u: -e * (k0 * s).exp() / k0,
        v: ((-k0 * s).exp() - c) / k0,
        kappa: k0,
        jets: Some((0.0, 0.0)),
    });
    let m = MomentumSpec::v(move |v| -e / (c + k0 * v), c).with_kappa(move |_| k0);
    Ok(arc_form(
        desc,
        all_reals(),
        (-2.0 / k0, 2.0 / k0),
        m,
        Some(Arc::new(move |_| k0)),
        state,
    ))
}

fn norwich(desc: &FamilyDescriptor) -> Result<ClosedForm> {
    let c = desc.param("c")?;
    if !(c > 0.0) {
        return Err(invalid("c", c, "must be positive"));
    }
    let plus = desc.sigma() > 0.0;
    let r2 = std::f64::consts::SQRT_2;
    let a1 = 1f64.asinh();
    let rho: RealFn = if plus {
        Arc::new(move |t: f64| 0.5 * c * ((r2 * t).sinh() - 1.0))
    } else {
        Arc::new(move |t: f64| 0.5 * c * (1.0 - t * t))
    };
    let nu = move |t: f64| {
        if plus {
            t + ((0.5 * (r2 * t - a1)).sinh() / (0.5 * (r2 * t + a1)).cosh()).ln()
        } else {
            t - 2.0 * t.atanh()
        }
    };
    let s_closed: RealFn = if plus {
        Arc::new(move |t: f64| 0.5 * c * ((r2 * t).cosh() / r2 - t))
    } else {
        Arc::new(move |t: f64| 0.5 * c * (t - t * t * t / 3.0))
    };
    let (domain, range) = if plus {
        let t0 = a1 / r2;
        (Interval::new(t0, f64::INFINITY), (t0 + 0.2, t0 + 1.0))
    } else {
        (Interval::new(-1.0, 1.0), (-0.8, 0.8))
    };
    let rr = rho.clone();
    let state = polar_state(desc, move |t| (rr(t), nu(t)), |r| 1.0 / r);
    let kc = if plus { c } else { -c };
    let m = MomentumSpec::rho(move |r| r + kc, kc).with_kappa(|r| 1.0 / r);
    Ok(ClosedForm {
        parameterization: Parameterization::AuxT,
        domain,
        default_range: range,
        spacing: Spacing::Uniform,
        momentum: m,
        intrinsic_kappa: None,
        epsilon: desc.epsilon,
        state,
        ds: Some(rho),
        s_closed: Some(s_closed),
    })
}

/// ρ(s), ν(s) and the natural domain for `κ = 2 + μ/ρ`.
fn sturm_unit(mu: f64, plus: bool) -> (Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>, Interval, (f64, f64)) {
    if plus {
        let eta = mu.asinh();
        let th = eta.tanh();
        let f = move |s: f64| {
            let rho = s.sinh() - mu;
            let nu = s + th * ((0.5 * (s - eta)).sinh() / (0.5 * (s + eta)).cosh()).ln();
            (rho, nu)
        };
        return (Arc::new(f), Interval::new(eta, f64::INFINITY), (eta + 0.2, eta + 3.0));
    }
    if mu == 1.0 {
        let f = |s: f64| (s.cosh() - 1.0, s - 1.0 / (0.5 * s).tanh());
        (Arc::new(f), Interval::new(0.0, f64::INFINITY), (0.5, 3.5))
    } else if mu > 1.0 {
        let d = mu.acosh();
        let cd = 1.0 / d.tanh();
        let f = move |s: f64| {
            let nu = s + cd * ((0.5 * (s - d)).sinh() / (0.5 * (s + d)).sinh()).ln();
            (s.cosh() - mu, nu)
        };
        (Arc::new(f), Interval::new(d, f64::INFINITY), (d + 0.2, d + 3.0))
    } else if mu == -1.0 {
        let f = |s: f64| (s.cosh() + 1.0, s - (0.5 * s).tanh());
        (Arc::new(f), all_reals(), (-3.0, 3.0))
    } else if mu < -1.0 {
        let t = (-mu).acosh();
        let ct = 1.0 / t.tanh();
        let f = move |s: f64| {
            let nu = s + ct * ((0.5 * (s - t)).cosh() / (0.5 * (s + t)).cosh()).ln();
            (s.cosh() - mu, nu)
        };
        (Arc::new(f), all_reals(), (-3.0, 3.0))
    } else {
        let a = mu.acos();
        let (k, cot2) = (1.0 / a.tan(), 1.0 / (0.5 * a).tan());
        let f = move |s: f64| (s.cosh() - mu, s + 2.0 * k * (cot2 * (0.5 * s).tanh()).atan());
        (Arc::new(f), all_reals(), (-3.0, 3.0))
    }
}

fn sturm(desc: &FamilyDescriptor) -> Result<ClosedForm> {
    let (mu, lam) = (desc.param("mu")?, desc.param("lambda")?);
    if mu == 0.0 {
        return Err(invalid("mu", mu, "must be nonzero"));
    }
    if !(lam > 0.0) {
        return Err(invalid("lambda", lam, "must be positive"));
    }
    let (unit, dom, range) = sturm_unit(mu, desc.sigma() > 0.0);
    // the λ member is the λ = 1 curve shrunk by 1/λ
    let u2 = unit.clone();
    let state = polar_state(
        desc,
        move |s| {
            let (r, n) = u2(lam * s);
            (r / lam, n)
        },
        move |r| 2.0 * lam + mu / r,
    );
    let intrinsic: RealFn = Arc::new(move |s| lam * (2.0 + mu / unit(lam * s).0));
    let m = MomentumSpec::rho(move |r| lam * r * r + mu * r, 0.0).with_kappa(move |r| 2.0 * lam + mu / r);
    Ok(arc_form(
        desc,
        Interval::new(dom.lo / lam, dom.hi / lam),
        (range.0 / lam, range.1 / lam),
        m,
        Some(intrinsic),
        state,
    ))
}

fn sinusoidal(desc: &FamilyDescriptor) -> Result<ClosedForm> {
    let (n, lam) = (desc.param("n")?, desc.param("lambda")?);
    if n == 0.0 || n == -1.0 {
        return Err(invalid("n", n, "must not be 0 or -1"));
    }
    if lam == 0.0 {
        return Err(invalid("lambda", lam, "must be nonzero"));
    }
    let plus = desc.sigma() > 0.0;
    let rho = move |nu: f64| {
        let q = if plus {
            (n + 1.0) * (n * nu).sinh() / lam
        } else {
            (n + 1.0).abs() * (n * nu).cosh() / lam.abs()
        };
        q.powf(1.0 / n)
    };
    // ρ varies like a power 1/n of the ν-window, so narrow it for small |n|
    let w = n.abs().min(1.0) / n.abs();
    let (domain, range) = if plus {
        let g = ((n + 1.0) * n * lam).signum();
        let (a, b) = (0.3 / n.abs(), 0.3 / n.abs() + 0.9 * w);
        if g > 0.0 {
            (Interval::new(0.0, f64::INFINITY), (a, b))
        } else {
            (Interval::new(f64::NEG_INFINITY, 0.0), (-b, -a))
        }
    } else {
        (all_reals(), (-1.2 * w, 1.2 * w))
    };
    let state = polar_state(desc, move |nu| (rho(nu), nu), move |r| lam * r.powf(n - 1.0));
    // dν/ds = K/ρ², so ds/dν = ρ²/K = (n+1) ρ^{1-n} / λ
    let ds: RealFn = Arc::new(move |nu| (n + 1.0) * rho(nu).powf(1.0 - n) / lam);
    let m = MomentumSpec::rho(move |r| lam * r.powf(n + 1.0) / (n + 1.0), 0.0)
        .with_kappa(move |r| lam * r.powf(n - 1.0));
    Ok(ClosedForm {
        parameterization: Parameterization::AuxT,
        domain,
        default_range: range,
        spacing: Spacing::Uniform,
        momentum: m,
        intrinsic_kappa: None,
        epsilon: desc.epsilon,
        state,
        ds: Some(ds),
        s_closed: None,
    })
}

fn elastic(desc: &FamilyDescriptor) -> Result<ClosedForm> {
    let (c, a, b) = (desc.param("c")?, desc.param("a")?, desc.param("b")?);
    if !(a > 0.0) {
        return Err(invalid("a", a, "must be positive"));
    }
    let e = desc.epsilon.value();
    let k = (0.5 * a).sqrt();
    let shift = b / a;
    // (u, v, κ, κ', κ'') of the κ = 2v curve
    let base: Arc<dyn Fn(f64) -> [f64; 5] + Send + Sync> = if c == 0.0 {
        Arc::new(move |s: f64| {
            let u = -e * s * s * s / 3.0;
            [u, 1.0 / s, 2.0 / s, -2.0 / (s * s), 4.0 / (s * s * s)]
        })
    } else if c > 0.0 {
        let r = c.sqrt();
        Arc::new(move |s: f64| {
            let t = (r * s).tan();
            let sec2 = 1.0 + t * t;
            let u = -(e / c) * (0.5 * s + (2.0 * r * s).sin() / (4.0 * r));
            [u, -r * t, -2.0 * r * t, -2.0 * c * sec2, -4.0 * c * r * sec2 * t]
        })
    } else {
        let m = (-c).sqrt();
        Arc::new(move |s: f64| {
            let ct = 1.0 / (m * s).tanh();
            let csch2 = ct * ct - 1.0;
            let u = (e / c) * (-0.5 * s + (2.0 * m * s).sinh() / (4.0 * m));
            [u, m * ct, 2.0 * m * ct, -2.0 * m * m * csch2, 4.0 * m * m * m * csch2 * ct]
        })
    };
    let (dom, range) = if c == 0.0 {
        (Interval::new(0.0, f64::INFINITY), (0.5, 5.0))
    } else if c > 0.0 {
        let h = PI / (2.0 * c.sqrt());
        (Interval::new(-h, h), (-0.8 * h, 0.8 * h))
    } else {
        let m = (-c).sqrt();
        (Interval::new(0.0, f64::INFINITY), (0.3 / m, 3.0 / m))
    };
    let b2 = base.clone();
    // shrink by 1/k, then translate v so that κ = a v + b
    let state: StateFn = Arc::new(move |s| {
        let [u, v, kap, kd, kdd] = b2(k * s);
        State {
            u: u / k,
            v: v / k - shift,
            kappa: k * kap,
            jets: Some((k * k * kd, k * k * k * kdd)),
        }
    });
    let intrinsic: RealFn = Arc::new(move |s| k * base(k * s)[2]);
    let m = MomentumSpec::v(
        move |v| {
            let w = k * (v + shift);
            -e / (w * w + c)
        },
        c,
    )
    .with_kappa(move |v| a * v + b);
    Ok(arc_form(
        desc,
        Interval::new(dom.lo / k, dom.hi / k),
        (range.0 / k, range.1 / k),
        m,
        Some(intrinsic),
        state,
    ))
}

fn enneper(desc: &FamilyDescriptor) -> Result<ClosedForm> {
    let a = desc.param("a")?;
    if !(a > 0.0) {
        return Err(invalid("a", a, "must be positive"));
    }
    let e = desc.epsilon.value();
    // base curve v = sqrt(2s), u = ε v³/3, dilated by a
    let state: StateFn = Arc::new(move |s| {
        let sb = s / a;
        let v = (2.0 * sb).sqrt();
        State {
            u: a * e * v * v * v / 3.0,
            v: a * v,
            kappa: 1.0 / (2.0 * sb * a),
            jets: None,
        }
    });
    let m = MomentumSpec::v(move |v| e * v / a, 0.0).with_kappa(move |v| a / (v * v));
    Ok(arc_form(
        desc,
        Interval::new(0.0, f64::INFINITY),
        (0.2 * a, 4.0 * a),
        m,
        Some(Arc::new(|s| 0.5 / s)),
        state,
    ))
}

/// Solves `w + ln w = target` for `w > 0`.
fn log_linear_root(target: f64) -> Result<f64> {
    let (lo, hi) = if target <= 1.0 {
        ((target - 1.0).exp(), target.exp())
    } else {
        ((target - target.ln()).max(1.0), target)
    };
    let f = |w: f64| w + w.ln() - target;
    if f(lo) == 0.0 {
        return Ok(lo);
    }
    if f(hi) == 0.0 {
        return Ok(hi);
    }
    brent(f, lo, hi, 1e-16 * hi, 200)
}

fn enneper_c(desc: &FamilyDescriptor) -> Result<ClosedForm> {
    let c = desc.param("c")?;
    if c == 0.0 {
        return Err(invalid("c", c, "must be nonzero"));
    }
    let e = desc.epsilon.value();
    let c2 = c * c;
    // w = c v - 1 > 0 and s = -(w + 1 + ln w)/c²
    let state: StateFn = Arc::new(move |s| {
        let w = log_linear_root(-c2 * s - 1.0).unwrap_or(f64::NAN);
        let v = (w + 1.0) / c;
        State {
            u: e / (c2 * c) * (w - 1.0 / w + 2.0 * w.ln()),
            v,
            kappa: 1.0 / (v * v),
            jets: None,
        }
    });
    let s_of_w = |w: f64| -(w + 1.0 + w.ln()) / c2;
    let m = MomentumSpec::v(move |v| -e * v / (c * v - 1.0), c).with_kappa(|v| 1.0 / (v * v));
    Ok(arc_form(desc, all_reals(), (s_of_w(4.0), s_of_w(0.5)), m, None, state))
}

fn grim_reaper(desc: &FamilyDescriptor) -> Result<ClosedForm> {
    let a = desc.param("a")?;
    if !(a > 0.0) {
        return Err(invalid("a", a, "must be positive"));
    }
    let e = desc.epsilon.value();
    let la = a.ln();
    let state: StateFn = Arc::new(move |s| State {
        u: -0.5 * e * s * s,
        v: -s.ln() - la,
        kappa: 1.0 / s,
        jets: Some((-1.0 / (s * s), 2.0 / (s * s * s))),
    });
    let m = MomentumSpec::v(move |v| -e * (-v).exp() / a, 0.0).with_kappa(move |v| a * v.exp());
    let mut cf = arc_form(
        desc,
        Interval::new(0.0, f64::INFINITY),
        (0.1, 10.0),
        m,
        Some(Arc::new(|s| 1.0 / s)),
        state,
    );
    cf.spacing = Spacing::Geometric;
    Ok(cf)
}

fn exp_c(desc: &FamilyDescriptor) -> Result<ClosedForm> {
    let c = desc.param("c")?;
    if c == 0.0 {
        return Err(invalid("c", c, "must be nonzero"));
    }
    let e = desc.epsilon.value();
    let state: StateFn = Arc::new(move |s| {
        let kap = c / (c * s).exp_m1();
        State {
            u: -(e / c) * (s + (-c * s).exp() / c),
            v: kap.ln(),
            kappa: kap,
            jets: None,
        }
    });
    let m = MomentumSpec::v(move |v| -e / (v.exp() + c), c).with_kappa(|v| v.exp());
    // κ ~ 1/s near 0, as for the grim reaper
    let mut cf = arc_form(
        desc,
        Interval::new(0.0, f64::INFINITY),
        (0.1 / c.abs(), 3.0 / c.abs()),
        m,
        Some(Arc::new(move |s| c / (c * s).exp_m1())),
        state,
    );
    cf.spacing = Spacing::Geometric;
    Ok(cf)
}
