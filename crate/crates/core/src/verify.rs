//! Executable invariant checks over [`CurveSamples`].
//!
//! Every check yields a [`CheckReport`]. Residuals are mixed
//! absolute/relative: the raw mismatch divided by `max(1, scale)`, where
//! `scale` is the magnitude of the quantity being matched (or, for the
//! elastica identities, the sum of the magnitudes of their terms). Samples
//! within the guard band at either end are skipped.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::roots::golden_min;
use crate::quadrature::{MomentumSpec, Variable};
use crate::samples::{differentiate, null_jets, numeric_curvature_with, CurveSamples, NullJet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub max_residual: f64,
    pub threshold: f64,
    pub pass: bool,
    /// Arc length where the largest residual occurred.
    pub worst_s: f64,
}

impl CheckReport {
    pub fn new(check_id: impl Into<String>, max_residual: f64, threshold: f64, worst_s: f64) -> Self {
        CheckReport {
            check_id: check_id.into(),
            max_residual,
            threshold,
            pass: max_residual <= threshold,
            worst_s,
        }
    }

    /// `id,residual,threshold,pass,worst_s`.
    pub fn to_record(&self) -> String {
        format!(
            "{},{:.6e},{:.6e},{},{:.16e}",
            self.check_id, self.max_residual, self.threshold, self.pass, self.worst_s
        )
    }
}

impl FromStr for CheckReport {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter {
            name: "report record".into(),
            value: f64::NAN,
            reason: format!("cannot parse `{line}`"),
        };
        let f: Vec<&str> = line.trim().split(',').collect();
        if f.len() != 5 {
            return Err(bad());
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
        let report = CheckReport {
            check_id: f[0].to_string(),
            max_residual: num(f[1])?,
            threshold: num(f[2])?,
            pass: f[3].parse().map_err(|_| bad())?,
            worst_s: num(f[4])?,
        };
        Ok(report)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: residual {:.3e} (threshold {:.1e}) at s = {:.6}",
            if self.pass { "PASS" } else { "FAIL" },
            self.check_id,
            self.max_residual,
            self.threshold,
            self.worst_s
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckConfig {
    /// Threshold for every check except the elastica energy.
    pub threshold: f64,
    /// Threshold on the drift of the elastica energy.
    pub energy_threshold: f64,
    /// Fraction of the samples skipped at each end (at least 2 samples).
    pub guard: f64,
    /// Stencil width for first/second derivatives of the position.
    pub stencil: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            threshold: 1e-6,
            energy_threshold: 1e-8,
            guard: 0.02,
            stencil: 5,
        }
    }
}

impl CheckConfig {
    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn with_guard(mut self, guard: f64) -> Self {
        self.guard = guard;
        self
    }

    fn band(&self, n: usize) -> std::ops::Range<usize> {
        let g = ((self.guard * n as f64).round() as usize).max(2);
        if 2 * g >= n {
            return 0..0;
        }
        g..n - g
    }
}

/// Which coordinate a curvature law is a function of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    OfRho,
    OfV,
}

impl From<Variable> for Law {
    fn from(v: Variable) -> Self {
        match v {
            Variable::Rho => Law::OfRho,
            Variable::V => Law::OfV,
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    let r = (a - b).abs() / b.abs().max(1.0);
    if r.is_nan() {
        f64::INFINITY
    } else {
        r
    }
}

/// Largest residual over the guard band and where it occurs.
fn worst(s: &[f64], range: std::ops::Range<usize>, mut residual: impl FnMut(usize) -> f64) -> (f64, f64) {
    let mut out = (0.0, f64::NAN);
    for i in range {
        let r = residual(i);
        if !(r <= out.0) {
            out = (r, s[i]);
        }
    }
    out
}

fn jets(samples: &CurveSamples, cfg: &CheckConfig) -> Result<Vec<NullJet>> {
    if samples.len() < 5 {
        return Err(Error::TooFewSamples {
            needed: 5,
            got: samples.len(),
        });
    }
    null_jets(samples, cfg.stencil)
}

pub fn check_unit_speed(samples: &CurveSamples) -> Result<CheckReport> {
    check_unit_speed_with(samples, &CheckConfig::default())
}

/// `|g(γ', γ') − ε|` from finite-difference tangents.
pub fn check_unit_speed_with(samples: &CurveSamples, cfg: &CheckConfig) -> Result<CheckReport> {
    let j = jets(samples, cfg)?;
    let e = samples.epsilon().value();
    let (r, at) = worst(samples.s(), cfg.band(j.len()), |i| rel(j[i].speed_sq(), e));
    Ok(CheckReport::new("unit_speed", r, cfg.threshold, at))
}

pub fn check_curvature_law(samples: &CurveSamples, law: Law, kappa: &dyn Fn(f64) -> f64) -> Result<CheckReport> {
    check_curvature_law_with(samples, law, kappa, &CheckConfig::default())
}

/// Numeric curvature against `κ(ρ)` or `κ(v)` evaluated on the samples.
pub fn check_curvature_law_with(
    samples: &CurveSamples,
    law: Law,
    kappa: &dyn Fn(f64) -> f64,
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    jets(samples, cfg)?;
    let kn = numeric_curvature_with(samples, cfg.stencil)?;
    let x = match law {
        Law::OfRho => samples.rho(),
        Law::OfV => samples.v(),
    };
    let (r, at) = worst(samples.s(), cfg.band(kn.len()), |i| rel(kn[i], kappa(x[i])));
    let id = match law {
        Law::OfRho => "curvature_law_rho",
        Law::OfV => "curvature_law_v",
    };
    Ok(CheckReport::new(id, r, cfg.threshold, at))
}

pub fn check_momentum(samples: &CurveSamples, momentum: &MomentumSpec) -> Result<CheckReport> {
    check_momentum_with(samples, momentum, &CheckConfig::default())
}

/// `ρ² ν' = K(ρ)` or `u' = K(v)` along the samples.
pub fn check_momentum_with(samples: &CurveSamples, momentum: &MomentumSpec, cfg: &CheckConfig) -> Result<CheckReport> {
    let j = jets(samples, cfg)?;
    let uv = samples.uv();
    let rho = samples.rho();
    let (r, at, id) = match momentum.variable {
        Variable::Rho => {
            // ρ² ν' = sgn(uv) (u' v − u v') / 2 on every wedge
            let (r, at) = worst(samples.s(), cfg.band(j.len()), |i| {
                let (u, v) = uv[i];
                let l = (u * v).signum() * 0.5 * (j[i].ud * v - u * j[i].vd);
                rel(l, momentum.eval(rho[i]))
            });
            (r, at, "momentum_rho")
        }
        Variable::V => {
            let (r, at) = worst(samples.s(), cfg.band(j.len()), |i| rel(j[i].ud, momentum.eval(uv[i].1)));
            (r, at, "momentum_v")
        }
    };
    Ok(CheckReport::new(id, r, cfg.threshold, at))
}

/// Reports for the elastica equation and its energy integral.
#[derive(Debug, Clone, PartialEq)]
pub struct ElasticaReports {
    pub equation: CheckReport,
    pub energy: CheckReport,
    /// Whether exact κ derivatives attached to the samples were used.
    pub analytic: bool,
}

impl ElasticaReports {
    pub fn pass(&self) -> bool {
        self.equation.pass && self.energy.pass
    }
}

pub fn check_elastica(samples: &CurveSamples, sigma: f64, energy: f64) -> Result<ElasticaReports> {
    check_elastica_with(samples, sigma, energy, &CheckConfig::default())
}

/// `2κ'' − κ³ − σκ = 0` and `κ'² − κ⁴/4 − σκ²/2 = E`.
///
/// Uses exact κ derivatives when the samples carry them; otherwise
/// differentiates the κ column (or the numeric curvature) with 7-point
/// stencils and relaxes both thresholds tenfold.
pub fn check_elastica_with(
    samples: &CurveSamples,
    sigma: f64,
    energy: f64,
    cfg: &CheckConfig,
) -> Result<ElasticaReports> {
    let s = samples.s();
    if s.len() < 7 {
        return Err(Error::TooFewSamples {
            needed: 7,
            got: s.len(),
        });
    }
    let (k, kd, kdd, analytic) = match (samples.kappa(), samples.kappa_derivatives()) {
        (Some(k), Some((kd, kdd))) => (k.to_vec(), kd.to_vec(), kdd.to_vec(), true),
        (kappa, _) => {
            let k = match kappa {
                Some(k) => k.to_vec(),
                None => numeric_curvature_with(samples, 7)?,
            };
            let (kd, kdd) = differentiate(s, &k, 7)?;
            (k, kd, kdd, false)
        }
    };
    let relax = if analytic { 1.0 } else { 10.0 };
    let band = cfg.band(s.len());
    let (re, ae) = worst(s, band.clone(), |i| {
        let terms = [2.0 * kdd[i], k[i].powi(3), sigma * k[i]];
        let scale = terms.iter().map(|t| t.abs()).sum::<f64>().max(1.0);
        (terms[0] - terms[1] - terms[2]).abs() / scale
    });
    let (rn, an) = worst(s, band, |i| {
        let terms = [kd[i] * kd[i], 0.25 * k[i].powi(4), 0.5 * sigma * k[i] * k[i], energy];
        let scale = terms.iter().map(|t| t.abs()).sum::<f64>().max(1.0);
        (terms[0] - terms[1] - terms[2] - terms[3]).abs() / scale
    });
    Ok(ElasticaReports {
        equation: CheckReport::new("elastica_equation", re, relax * cfg.threshold, ae),
        energy: CheckReport::new("elastica_energy", rn, relax * cfg.energy_threshold, an),
        analytic,
    })
}

pub fn check_soliton(samples: &CurveSamples) -> Result<CheckReport> {
    check_soliton_with(samples, &CheckConfig::default())
}

/// `κ = g((1, 1), N)` with `N = (y', x')`, i.e. `κ = x' − y' = −v'`.
pub fn check_soliton_with(samples: &CurveSamples, cfg: &CheckConfig) -> Result<CheckReport> {
    let j = jets(samples, cfg)?;
    let e = samples.epsilon();
    let (r, at) = worst(samples.s(), cfg.band(j.len()), |i| rel(j[i].curvature(e), -j[i].vd));
    Ok(CheckReport::new("soliton", r, cfg.threshold, at))
}

/// Six-point Lagrange interpolation on a sorted grid.
fn lagrange6(x: &[f64], y: &[f64], t: f64) -> f64 {
    let n = x.len();
    let m = n.min(6);
    let j = x.partition_point(|&v| v <= t).saturating_sub(1);
    let lo = j.saturating_sub(m / 2 - 1).min(n - m);
    let mut sum = 0.0;
    for a in lo..lo + m {
        let mut w = 1.0;
        for b in lo..lo + m {
            if a != b {
                w *= (t - x[b]) / (x[a] - x[b]);
            }
        }
        sum += w * y[a];
    }
    sum
}

struct Trace {
    s: Vec<f64>,
    k: Vec<f64>,
}

impl Trace {
    fn new(samples: &CurveSamples, cfg: &CheckConfig) -> Result<Self> {
        let k = match samples.kappa() {
            Some(k) => k.to_vec(),
            None => {
                jets(samples, cfg)?;
                numeric_curvature_with(samples, cfg.stencil)?
            }
        };
        let band = cfg.band(k.len());
        if band.len() < 6 {
            return Err(Error::TooFewSamples {
                needed: 6,
                got: band.len(),
            });
        }
        Ok(Trace {
            s: samples.s()[band.clone()].to_vec(),
            k: k[band].to_vec(),
        })
    }

    fn lo(&self) -> f64 {
        self.s[0]
    }

    fn hi(&self) -> f64 {
        self.s[self.s.len() - 1]
    }

    /// Largest mismatch of `other(t)` against `self(t + shift)` where the
    /// shifted point lies inside `self`.
    fn mismatch(&self, other: &Trace, shift: f64) -> (f64, f64) {
        let mut out = (0.0, f64::NAN);
        for (&t, &k) in other.s.iter().zip(&other.k) {
            let x = t + shift;
            if x < self.lo() || x > self.hi() {
                continue;
            }
            let r = rel(lagrange6(&self.s, &self.k, x), k);
            if !(r <= out.0) {
                out = (r, t);
            }
        }
        out
    }
}

pub fn compare_intrinsic(a: &CurveSamples, b: &CurveSamples) -> Result<CheckReport> {
    compare_intrinsic_with(a, b, &CheckConfig::default())
}

/// Minimizes over shifts Δ the largest `|κ_a(s + Δ) − κ_b(s)|` on the
/// overlap, measured symmetrically from both sample sets. Uses the κ column
/// when present and the numeric curvature otherwise. Shifts are limited to
/// those leaving an overlap of at least half the shorter range; the
/// reported `worst_s` is in `b`'s arc length and the optimal shift is not
/// part of the report (see [`best_shift`]).
pub fn compare_intrinsic_with(a: &CurveSamples, b: &CurveSamples, cfg: &CheckConfig) -> Result<CheckReport> {
    let (r, _, at) = best_shift(a, b, cfg)?;
    Ok(CheckReport::new("compare_intrinsic", r, cfg.threshold, at))
}

/// `(residual, shift, worst_s)` of the best alignment of `a` onto `b`.
pub fn best_shift(a: &CurveSamples, b: &CurveSamples, cfg: &CheckConfig) -> Result<(f64, f64, f64)> {
    let ta = Trace::new(a, cfg)?;
    let tb = Trace::new(b, cfg)?;
    let m = 0.5 * (ta.hi() - ta.lo()).min(tb.hi() - tb.lo());
    let (lo, hi) = (ta.lo() - tb.hi() + m, ta.hi() - tb.lo() - m);
    if !(lo <= hi) || !(m > 0.0) {
        return Err(Error::NoOverlap);
    }
    let objective = |d: f64| {
        let (r1, w1) = ta.mismatch(&tb, d);
        let (r2, w2) = tb.mismatch(&ta, -d);
        if r1 >= r2 {
            (r1, w1)
        } else {
            (r2, w2 - d)
        }
    };
    const COARSE: usize = 400;
    let step = (hi - lo) / COARSE as f64;
    let mut best = (f64::INFINITY, lo);
    for i in 0..=COARSE {
        let d = lo + step * i as f64;
        let r = objective(d).0;
        if r < best.0 {
            best = (r, d);
        }
    }
    if step > 0.0 {
        let (a0, b0) = ((best.1 - step).max(lo), (best.1 + step).min(hi));
        let (d, r) = golden_min(|d| objective(d).0, a0, b0, 1e-12 * (1.0 + best.1.abs()));
        if r < best.0 {
            best = (r, d);
        }
    }
    let (r, at) = objective(best.1);
    Ok((r, best.1, at))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{elastic_constants, sample_family, FamilyDescriptor, FamilyId};
    use crate::plane::{Branch, CausalSign};
    use crate::samples::linspace;

    fn family(id: FamilyId, eps: CausalSign) -> FamilyDescriptor {
        FamilyDescriptor::new(id, eps)
    }

    #[test]
    fn record_round_trip() {
        let r = CheckReport::new("unit_speed", 3.25e-9, 1e-6, -0.125);
        let line = r.to_record();
        assert_eq!(line, "unit_speed,3.250000e-9,1.000000e-6,true,-1.2500000000000000e-1");
        assert_eq!(line.parse::<CheckReport>().unwrap(), r);
        assert!("a,b".parse::<CheckReport>().is_err());
    }

    #[test]
    fn unit_speed_examples() {
        let g = sample_family(&family(FamilyId::Geodesic, CausalSign::Spacelike), 64, None).unwrap();
        assert!(check_unit_speed(&g).unwrap().max_residual < 1e-14);
        let pc = sample_family(&family(FamilyId::PseudocircleOrigin, CausalSign::Spacelike), 512, None).unwrap();
        assert!(check_unit_speed(&pc).unwrap().pass);
        // the parabola (t, t²) is not unit speed
        let t = linspace(0.0, 1.0, 100);
        let pts = t.iter().map(|&t| crate::plane::Vec2::new(t, t * t)).collect();
        let par = CurveSamples::from_xy(t, pts, CausalSign::Spacelike).unwrap();
        assert!(!check_unit_speed(&par).unwrap().pass);
    }

    #[test]
    fn curvature_law_examples() {
        let nw = sample_family(&family(FamilyId::Norwich, CausalSign::Spacelike), 512, None).unwrap();
        assert!(check_curvature_law(&nw, Law::OfRho, &|r| 1.0 / r).unwrap().pass);
        let gr = sample_family(&family(FamilyId::GrimReaper, CausalSign::Spacelike), 512, None).unwrap();
        assert!(check_curvature_law(&gr, Law::OfV, &|v| v.exp()).unwrap().pass);
        let pc = sample_family(&family(FamilyId::PseudocircleOrigin, CausalSign::Spacelike), 512, None).unwrap();
        assert!(!check_curvature_law(&pc, Law::OfRho, &|r| r).unwrap().pass);
    }

    #[test]
    fn momentum_examples() {
        let d = family(FamilyId::PseudocircleOrigin, CausalSign::Spacelike);
        let pc = sample_family(&d, 512, None).unwrap();
        let m = MomentumSpec::rho(|r| r * r / 2.0, 0.0);
        assert!(check_momentum(&pc, &m).unwrap().pass);
        for eps in [CausalSign::Spacelike, CausalSign::Timelike] {
            let e = eps.value();
            let en = sample_family(&family(FamilyId::Enneper, eps), 512, None).unwrap();
            assert!(check_momentum(&en, &MomentumSpec::v(move |v| e * v, 0.0)).unwrap().pass);
            assert!(!check_momentum(&en, &MomentumSpec::v(move |v| -e * v, 0.0)).unwrap().pass);
        }
    }

    #[test]
    fn momentum_on_every_wedge() {
        for eps in [CausalSign::Spacelike, CausalSign::Timelike] {
            for br in [Branch::Plus, Branch::Minus] {
                let d = family(FamilyId::SturmExtended, eps).with("mu", 0.5).with_branch(br);
                let out = sample_family(&d, 512, None).unwrap();
                let m = crate::catalog::momentum(&d).unwrap();
                let r = check_momentum(&out, &m).unwrap();
                assert!(r.pass, "{r}");
            }
        }
    }

    #[test]
    fn elastica_examples() {
        for c in [0.0, 1.0, -1.0] {
            let d = family(FamilyId::Elastic, CausalSign::Spacelike).with("c", c);
            let (sigma, energy) = elastic_constants(&d).unwrap();
            let out = sample_family(&d, 512, None).unwrap();
            let r = check_elastica(&out, sigma, energy).unwrap();
            assert!(r.analytic && r.pass(), "{} / {}", r.equation, r.energy);
            assert!(!check_elastica(&out, sigma + 1.0, energy).unwrap().pass());
        }
    }

    #[test]
    fn elastica_by_finite_differences() {
        let d = family(FamilyId::Elastic, CausalSign::Timelike).with("c", 1.0);
        let out = sample_family(&d, 512, None).unwrap();
        let stripped = CurveSamples::from_uv(out.s().to_vec(), out.u(), out.v(), out.epsilon())
            .unwrap()
            .with_kappa(out.kappa().unwrap().to_vec())
            .unwrap();
        let r = check_elastica(&stripped, 4.0, 4.0).unwrap();
        assert!(!r.analytic);
        assert!(r.pass(), "{} / {}", r.equation, r.energy);
    }

    #[test]
    fn soliton_examples() {
        for eps in [CausalSign::Spacelike, CausalSign::Timelike] {
            let gr = sample_family(&family(FamilyId::GrimReaper, eps), 512, None).unwrap();
            assert!(check_soliton(&gr).unwrap().pass);
        }
        let el = sample_family(&family(FamilyId::Elastic, CausalSign::Spacelike).with("c", 0.0), 512, None).unwrap();
        assert!(!check_soliton(&el).unwrap().pass);
    }

    #[test]
    fn compare_finds_the_shift() {
        let d = family(FamilyId::SturmExtended, CausalSign::Spacelike)
            .with("mu", 1.0)
            .with_branch(Branch::Minus);
        let a = sample_family(&d, 512, None).unwrap();
        let b = a.shift_s(0.37);
        let (r, shift, _) = best_shift(&a, &b, &CheckConfig::default()).unwrap();
        assert!(r < 1e-9, "{r:e}");
        assert!((shift + 0.37).abs() < 1e-6, "{shift}");
        let other = sample_family(&d.clone().with("mu", -1.0), 512, None).unwrap();
        assert!(!compare_intrinsic(&a, &other).unwrap().pass);
        assert!(!compare_intrinsic(&other, &a).unwrap().pass);
        assert!(compare_intrinsic(&a, &a).unwrap().pass);
    }

    #[test]
    fn compare_fails_for_segments_with_different_curvature_values() {
        // both pieces of κ = 1/s, but no shift lines up [0.1, 0.2] with [1, 10]
        let d = family(FamilyId::GrimReaper, CausalSign::Spacelike);
        let a = sample_family(&d, 64, Some((0.1, 0.2))).unwrap();
        let b = sample_family(&d, 64, Some((1.0, 10.0))).unwrap();
        assert!(!compare_intrinsic(&a, &b).unwrap().pass);
    }
}
