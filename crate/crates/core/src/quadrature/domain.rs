use super::momentum::Variable;
use super::roots::{bisect_predicate, golden_min};
use super::SolveRequest;
use crate::error::{Error, Result};

/// What bounds an interval end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EndpointKind {
    /// An ordinary point: a user clip, or the edge of where `K` is defined.
    Regular,
    /// The edge of the scan window.
    Window,
    /// ρ = 0 (the light cone through the origin).
    Origin,
    /// Simple zero of the radicand; a turning point of ρ.
    SimpleZero,
    /// Double zero of the radicand; arc length diverges logarithmically.
    DoubleZero,
    /// `|K(v)|` blows up.
    Pole,
    /// `K(v)` vanishes.
    Zero,
}

impl EndpointKind {
    pub fn is_singular(self) -> bool {
        !matches!(self, EndpointKind::Regular | EndpointKind::Window)
    }
}

/// A maximal validity interval of ρ or v.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_singular: bool,
    pub hi_singular: bool,
    pub lo_kind: EndpointKind,
    pub hi_kind: EndpointKind,
}

impl Interval {
    /// An interval with two regular ends.
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval::with_kinds(lo, hi, EndpointKind::Regular, EndpointKind::Regular)
    }

    pub fn with_kinds(lo: f64, hi: f64, lo_kind: EndpointKind, hi_kind: EndpointKind) -> Self {
        Interval {
            lo,
            hi,
            lo_singular: lo_kind.is_singular(),
            hi_singular: hi_kind.is_singular(),
            lo_kind,
            hi_kind,
        }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// Intersection with `[lo, hi]`. Ends that move become regular.
    pub fn clip(&self, lo: f64, hi: f64) -> Option<Interval> {
        let (a, b) = (self.lo.max(lo), self.hi.min(hi));
        if !(a < b) {
            return None;
        }
        let lk = if a > self.lo { EndpointKind::Regular } else { self.lo_kind };
        let hk = if b < self.hi { EndpointKind::Regular } else { self.hi_kind };
        Some(Interval::with_kinds(a, b, lk, hk))
    }
}

/// Where `domain_scan` looks and how densely.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanWindow {
    pub lo: f64,
    pub hi: f64,
    pub probes: usize,
}

impl ScanWindow {
    pub fn new(lo: f64, hi: f64, probes: usize) -> Self {
        ScanWindow { lo, hi, probes }
    }

    /// ρ ∈ (0, 50] or v ∈ [-50, 50], 4096 probes.
    pub fn default_for(variable: Variable) -> Self {
        match variable {
            Variable::Rho => ScanWindow::new(0.0, 50.0, 4096),
            Variable::V => ScanWindow::new(-50.0, 50.0, 4096),
        }
    }
}

/// Finds the maximal intervals where the pipeline integrand is defined.
///
/// ρ case: `K(ρ)² + σρ² > 0` with σ = ε·branch. v case: `K(v)` finite,
/// nonzero and of one sign. Boundaries are refined by bisection to full
/// precision and classified.
pub fn domain_scan(request: &SolveRequest) -> Result<Vec<Interval>> {
    let w = request.scan_window();
    if !(w.lo < w.hi) || w.probes < 8 {
        return Err(Error::InvalidParameter {
            name: "scan window".into(),
            value: w.hi - w.lo,
            reason: "needs lo < hi and at least 8 probes".into(),
        });
    }
    let out = match request.momentum.variable {
        Variable::Rho => scan_rho(request, w),
        Variable::V => scan_v(request, w),
    };
    if out.is_empty() {
        return Err(Error::EmptyDomain { lo: w.lo, hi: w.hi });
    }
    Ok(out)
}

fn probes(w: ScanWindow, open_lo: bool) -> Vec<f64> {
    let n = w.probes;
    let start = usize::from(open_lo);
    (start..=n)
        .map(|i| if i == n { w.hi } else { w.lo + (w.hi - w.lo) * i as f64 / n as f64 })
        .collect()
}

/// Splits probe indices into maximal runs where `ok` holds and the
/// label agrees.
fn runs(ok: &[Option<i8>]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < ok.len() {
        if let Some(label) = ok[i] {
            let start = i;
            while i + 1 < ok.len() && ok[i + 1] == Some(label) {
                i += 1;
            }
            out.push((start, i));
        }
        i += 1;
    }
    out
}

fn scan_rho(request: &SolveRequest, w: ScanWindow) -> Vec<Interval> {
    let k = request.momentum.k.clone();
    let sigma = request.radicand_sign();
    let radicand = move |r: f64| {
        let kv = k(r);
        kv * kv + sigma * r * r
    };
    let valid = |r: f64| {
        let q = radicand(r);
        q.is_finite() && q > 0.0
    };
    let open_lo = w.lo <= 0.0;
    let xs = probes(w, open_lo);
    let rs: Vec<f64> = xs.iter().map(|&x| radicand(x)).collect();
    let ok: Vec<Option<i8>> = rs
        .iter()
        .map(|&q| (q.is_finite() && q > 0.0).then_some(1))
        .collect();

    // classify a boundary at `r` whose admissible side is in direction `dir`
    let classify = |r: f64, dir: f64, outside: f64| -> EndpointKind {
        if outside.is_nan() {
            return EndpointKind::Regular;
        }
        let h = 1e-6 * r.abs().max(1.0);
        let q1 = radicand(r + dir * h);
        let q2 = radicand(r + 2.0 * dir * h);
        if !(q1.is_finite() && q2.is_finite()) || q1 <= 0.0 {
            return EndpointKind::Regular;
        }
        if q2 / q1 < 3.0 {
            EndpointKind::SimpleZero
        } else {
            EndpointKind::DoubleZero
        }
    };

    let mut out = Vec::new();
    for (i0, i1) in runs(&ok) {
        // lower end
        let (lo, lo_kind) = if i0 == 0 {
            if open_lo {
                let p1 = xs[0];
                let mut found = None;
                let mut prev = p1;
                for e in 1..=12 {
                    let q = p1 * 10f64.powi(-e);
                    if !valid(q) {
                        let b = bisect_predicate(valid, q, prev);
                        found = Some((b, classify(b, 1.0, radicand(q))));
                        break;
                    }
                    prev = q;
                }
                found.unwrap_or((0.0, EndpointKind::Origin))
            } else {
                (w.lo, EndpointKind::Window)
            }
        } else {
            let b = bisect_predicate(valid, xs[i0 - 1], xs[i0]);
            (b, classify(b, 1.0, rs[i0 - 1]))
        };
        let (hi, hi_kind) = if i1 == xs.len() - 1 {
            (w.hi, EndpointKind::Window)
        } else {
            let b = bisect_predicate(valid, xs[i1 + 1], xs[i1]);
            (b, classify(b, -1.0, rs[i1 + 1]))
        };

        // touching double zeros hidden between probes
        let mut cuts: Vec<(f64, EndpointKind, f64, EndpointKind)> = Vec::new();
        for i in i0 + 1..i1 {
            if !(rs[i] <= rs[i - 1] && rs[i] <= rs[i + 1] && (rs[i] < rs[i - 1] || rs[i] < rs[i + 1])) {
                continue;
            }
            let (xm, qm) = golden_min(&radicand, xs[i - 1], xs[i + 1], 1e-13 * xs[i].abs().max(1.0));
            let scale = rs[i - 1].max(rs[i + 1]);
            if qm.abs() <= 1e-8 * scale {
                // the minimum is flat to ~sqrt(eps); bisect on the slope instead
                let h = 1e-5 * xm.abs().max(1.0);
                let slope_up = |x: f64| radicand(x + h) > radicand(x - h);
                let xm = bisect_predicate(slope_up, xs[i - 1], xs[i + 1]);
                cuts.push((xm, EndpointKind::DoubleZero, xm, EndpointKind::DoubleZero));
            } else if qm < 0.0 {
                let l = bisect_predicate(valid, xm, xs[i - 1]);
                let r = bisect_predicate(valid, xm, xs[i + 1]);
                cuts.push((l, EndpointKind::SimpleZero, r, EndpointKind::SimpleZero));
            }
        }
        let mut a = (lo, lo_kind);
        for (l, lk, r, rk) in cuts {
            if l > a.0 {
                out.push(Interval::with_kinds(a.0, l, a.1, lk));
            }
            a = (r, rk);
        }
        if hi > a.0 {
            out.push(Interval::with_kinds(a.0, hi, a.1, hi_kind));
        }
    }
    out
}

fn scan_v(request: &SolveRequest, w: ScanWindow) -> Vec<Interval> {
    let k = request.momentum.k.clone();
    let label = |x: f64| -> Option<i8> {
        let q = k(x);
        (q.is_finite() && q != 0.0).then_some(if q > 0.0 { 1 } else { -1 })
    };
    let xs = probes(w, false);
    let ok: Vec<Option<i8>> = xs.iter().map(|&x| label(x)).collect();

    let classify = |r: f64, dir: f64, outside: f64| -> EndpointKind {
        if outside.is_nan() {
            return EndpointKind::Regular;
        }
        let h = 1e-6 * r.abs().max(1.0);
        let near = k(r + dir * h).abs();
        let far = k(r + 4.0 * dir * h).abs();
        if near > far {
            EndpointKind::Pole
        } else {
            EndpointKind::Zero
        }
    };

    let mut out = Vec::new();
    for (i0, i1) in runs(&ok) {
        let lab = ok[i0];
        let inside = |x: f64| label(x) == lab;
        let (lo, lo_kind) = if i0 == 0 {
            (w.lo, EndpointKind::Window)
        } else {
            let b = bisect_predicate(inside, xs[i0 - 1], xs[i0]);
            (b, classify(b, 1.0, k(xs[i0 - 1])))
        };
        let (hi, hi_kind) = if i1 == xs.len() - 1 {
            (w.hi, EndpointKind::Window)
        } else {
            let b = bisect_predicate(inside, xs[i1 + 1], xs[i1]);
            (b, classify(b, -1.0, k(xs[i1 + 1])))
        };
        if hi > lo {
            out.push(Interval::with_kinds(lo, hi, lo_kind, hi_kind));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane::{Branch, CausalSign};
    use crate::quadrature::MomentumSpec;

    fn req(m: MomentumSpec, eps: CausalSign, branch: Branch) -> SolveRequest {
        SolveRequest::new(m, eps).with_branch(branch)
    }

    #[test]
    fn half_square_momentum_is_admissible_everywhere() {
        let r = req(MomentumSpec::rho(|r| r * r / 2.0, 0.0), CausalSign::Spacelike, Branch::Plus);
        let iv = domain_scan(&r).unwrap();
        assert_eq!(iv.len(), 1);
        assert_eq!(iv[0].lo, 0.0);
        assert_eq!(iv[0].lo_kind, EndpointKind::Origin);
        assert!(iv[0].lo_singular);
        assert_eq!(iv[0].hi, 50.0);
        assert!(!iv[0].hi_singular);
    }

    #[test]
    fn constant_momentum_minus_branch_stops_at_c() {
        let c = 1.3;
        let r = req(MomentumSpec::rho(move |_| c, c), CausalSign::Spacelike, Branch::Minus);
        let iv = domain_scan(&r).unwrap();
        assert_eq!(iv.len(), 1);
        assert_eq!(iv[0].lo_kind, EndpointKind::Origin);
        assert_eq!(iv[0].hi_kind, EndpointKind::SimpleZero);
        assert!((iv[0].hi - c).abs() < 1e-14);
    }

    #[test]
    fn sturm_momentum_with_large_mu_is_admissible_on_whole_window() {
        // (ρ + cosh δ)² - 1 > 0 for every ρ > 0 once cosh δ >= 1
        let mu = 1f64.cosh();
        let r = req(MomentumSpec::rho(move |r| r * r + mu * r, 0.0), CausalSign::Timelike, Branch::Plus);
        let iv = domain_scan(&r).unwrap();
        assert_eq!(iv.len(), 1);
        assert_eq!((iv[0].lo, iv[0].hi), (0.0, 50.0));
    }

    #[test]
    fn sturm_momentum_small_mu_has_turning_point() {
        let mu = -0.5;
        let r = req(MomentumSpec::rho(move |r| r * r + mu * r, 0.0), CausalSign::Timelike, Branch::Plus);
        let iv = domain_scan(&r).unwrap();
        assert_eq!(iv.len(), 1);
        assert!((iv[0].lo - (1.0 - mu)).abs() < 1e-13);
        assert_eq!(iv[0].lo_kind, EndpointKind::SimpleZero);
    }

    #[test]
    fn touching_double_zero_splits_interval() {
        let (mu, r0) = (0.0, 0.5);
        let c = r0 * r0;
        let r = req(
            MomentumSpec::rho(move |r| r * r + mu * r + c, c),
            CausalSign::Timelike,
            Branch::Plus,
        );
        let iv = domain_scan(&r).unwrap();
        assert_eq!(iv.len(), 2, "{iv:?}");
        assert_eq!(iv[0].hi_kind, EndpointKind::DoubleZero);
        assert_eq!(iv[1].lo_kind, EndpointKind::DoubleZero);
        assert!((iv[0].hi - r0).abs() < 1e-6);
    }

    #[test]
    fn v_scan_finds_pole_and_zero() {
        // K = -v/(v - 1): zero at 0, pole at 1
        let r = req(MomentumSpec::v(|v| -v / (v - 1.0), 0.0), CausalSign::Spacelike, Branch::Plus);
        let iv = domain_scan(&r).unwrap();
        assert_eq!(iv.len(), 3);
        assert_eq!(iv[0].hi_kind, EndpointKind::Zero);
        assert_eq!(iv[1].lo_kind, EndpointKind::Zero);
        assert_eq!(iv[1].hi_kind, EndpointKind::Pole);
        assert!((iv[1].hi - 1.0).abs() < 1e-12);
        assert_eq!(iv[2].lo_kind, EndpointKind::Pole);
        assert_eq!(iv[2].hi_kind, EndpointKind::Window);
    }

    #[test]
    fn empty_domain_is_an_error() {
        let r = req(MomentumSpec::rho(|_| 0.0, 0.0), CausalSign::Spacelike, Branch::Minus);
        assert!(matches!(domain_scan(&r), Err(Error::EmptyDomain { .. })));
    }
}
