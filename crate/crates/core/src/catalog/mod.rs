//! Closed-form families used as ground truth for the quadrature pipelines.
//!
//! A [`FamilyDescriptor`] names a family, its parameters and the causal
//! character / pseudopolar wedge of the member. [`closed_form`] turns it
//! into a [`ClosedForm`]; [`evaluate_family`] and [`sample_family`] emit
//! unit-speed [`CurveSamples`].

mod families;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::{Branch, CausalSign, PlanePoint, Side, Vec2};
use crate::quadrature::gauss_kronrod::{integrate, QuadTol};
use crate::quadrature::{Interval, MomentumSpec, RealFn, Spacing, Variable};
use crate::samples::{geomspace, linspace, CurveSamples};

pub(crate) use families::State;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyId {
    Geodesic,
    PseudocircleOrigin,
    PseudocircleV,
    Norwich,
    SturmExtended,
    Sinusoidal,
    Elastic,
    Enneper,
    EnneperC,
    GrimReaper,
    ExpC,
}

/// One entry of a family's parameter schema.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    pub constraint: &'static str,
    pub doc: &'static str,
}

const fn param(name: &'static str, default: f64, constraint: &'static str, doc: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        default,
        constraint,
        doc,
    }
}

impl FamilyId {
    pub const ALL: [FamilyId; 11] = [
        FamilyId::Geodesic,
        FamilyId::PseudocircleOrigin,
        FamilyId::PseudocircleV,
        FamilyId::Norwich,
        FamilyId::SturmExtended,
        FamilyId::Sinusoidal,
        FamilyId::Elastic,
        FamilyId::Enneper,
        FamilyId::EnneperC,
        FamilyId::GrimReaper,
        FamilyId::ExpC,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::Geodesic => "geodesic",
            FamilyId::PseudocircleOrigin => "pseudocircle_origin",
            FamilyId::PseudocircleV => "pseudocircle_v",
            FamilyId::Norwich => "norwich",
            FamilyId::SturmExtended => "sturm_extended",
            FamilyId::Sinusoidal => "sinusoidal",
            FamilyId::Elastic => "elastic",
            FamilyId::Enneper => "enneper",
            FamilyId::EnneperC => "enneper_c",
            FamilyId::GrimReaper => "grim_reaper",
            FamilyId::ExpC => "exp_c",
        }
    }

    pub fn variable(self) -> Variable {
        match self {
            FamilyId::Geodesic
            | FamilyId::PseudocircleOrigin
            | FamilyId::Norwich
            | FamilyId::SturmExtended
            | FamilyId::Sinusoidal => Variable::Rho,
            _ => Variable::V,
        }
    }

    pub fn parameterization(self) -> Parameterization {
        match self {
            FamilyId::Norwich | FamilyId::Sinusoidal => Parameterization::AuxT,
            _ => Parameterization::ArcLength,
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            FamilyId::Geodesic => "straight line through the origin, kappa = 0",
            FamilyId::PseudocircleOrigin => "pseudocircle through the origin, K = k0 rho^2, kappa = 2 k0",
            FamilyId::PseudocircleV => "pseudocircle with K(v) = -eps/(c + k0 v), kappa = k0",
            FamilyId::Norwich => "radius of curvature equals pseudodistance, kappa = 1/rho",
            FamilyId::SturmExtended => "kappa = 2 lambda + mu/rho, K = lambda rho^2 + mu rho",
            FamilyId::Sinusoidal => "sinusoidal spiral, kappa = lambda rho^(n-1)",
            FamilyId::Elastic => "elastica with kappa(v) = a v + b",
            FamilyId::Enneper => "Enneper generatrix, kappa(v) = a/v^2, u = eps v^3/3",
            FamilyId::EnneperC => "kappa(v) = 1/v^2 with K = -eps v/(c v - 1)",
            FamilyId::GrimReaper => "grim reaper, kappa(v) = a e^v",
            FamilyId::ExpC => "kappa(v) = e^v with K = -eps/(e^v + c)",
        }
    }

    pub fn params(self) -> &'static [ParamSpec] {
        const GEODESIC: &[ParamSpec] = &[param("phi0", 0.0, "any", "hyperbolic angle of the direction")];
        const PC_ORIGIN: &[ParamSpec] = &[param("k0", 0.5, "> 0", "half the curvature")];
        const PC_V: &[ParamSpec] = &[
            param("k0", 1.0, "> 0", "curvature"),
            param("c", 0.0, "any", "integration constant"),
        ];
        const NORWICH: &[ParamSpec] = &[param("c", 1.0, "> 0", "integration constant (homothety factor)")];
        const STURM: &[ParamSpec] = &[
            param("mu", 1.0, "!= 0", "coefficient of 1/rho"),
            param("lambda", 1.0, "> 0", "dilation pre-scaling"),
        ];
        const SINUSOIDAL: &[ParamSpec] = &[
            param("n", 2.0, "not 0 or -1", "exponent"),
            param("lambda", 3.0, "!= 0", "coefficient"),
        ];
        const ELASTIC: &[ParamSpec] = &[
            param("c", 1.0, "any", "integration constant; tension 4c"),
            param("a", 2.0, "> 0", "slope of kappa(v)"),
            param("b", 0.0, "any", "offset of kappa(v)"),
        ];
        const ENNEPER: &[ParamSpec] = &[param("a", 1.0, "> 0", "dilation pre-scaling")];
        const C_NONZERO: &[ParamSpec] = &[param("c", 1.0, "!= 0", "integration constant")];
        const GRIM: &[ParamSpec] = &[param("a", 1.0, "> 0", "kappa(v) = a e^v")];
        match self {
            FamilyId::Geodesic => GEODESIC,
            FamilyId::PseudocircleOrigin => PC_ORIGIN,
            FamilyId::PseudocircleV => PC_V,
            FamilyId::Norwich => NORWICH,
            FamilyId::SturmExtended => STURM,
            FamilyId::Sinusoidal => SINUSOIDAL,
            FamilyId::Elastic => ELASTIC,
            FamilyId::Enneper => ENNEPER,
            FamilyId::EnneperC | FamilyId::ExpC => C_NONZERO,
            FamilyId::GrimReaper => GRIM,
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        FamilyId::ALL
            .into_iter()
            .find(|f| f.name() == key)
            .ok_or_else(|| Error::InvalidParameter {
                name: format!("family `{s}`"),
                value: f64::NAN,
                reason: "unknown family".into(),
            })
    }
}

/// How a family's closed form is parametrized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameterization {
    ArcLength,
    /// An auxiliary parameter (Norwich `t`, sinusoidal `ν`); arc length is
    /// recovered by quadrature.
    AuxT,
}

/// A family member: identifier, parameters, causal sign and wedge.
///
/// For ρ families `branch` and `sign` select the pseudopolar wedge and the
/// closed form used is the one of radicand sign `ε·branch`. V families
/// ignore both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyDescriptor {
    pub id: FamilyId,
    pub params: BTreeMap<String, f64>,
    pub epsilon: CausalSign,
    pub branch: Branch,
    pub sign: Side,
}

impl FamilyDescriptor {
    pub fn new(id: FamilyId, epsilon: CausalSign) -> Self {
        FamilyDescriptor {
            id,
            params: BTreeMap::new(),
            epsilon,
            branch: Branch::Plus,
            sign: Side::Pos,
        }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = branch;
        self
    }

    pub fn with_sign(mut self, sign: Side) -> Self {
        self.sign = sign;
        self
    }

    /// Parameter value, falling back to the schema default.
    pub fn param(&self, name: &str) -> Result<f64> {
        if let Some(&v) = self.params.get(name) {
            return Ok(v);
        }
        self.id
            .params()
            .iter()
            .find(|p| p.name == name)
            .map(|p| p.default)
            .ok_or_else(|| Error::InvalidParameter {
                name: name.to_string(),
                value: f64::NAN,
                reason: format!("not a parameter of {}", self.id),
            })
    }

    /// Radicand sign `ε·branch`; selects between the two closed forms of a
    /// ρ family.
    pub fn sigma(&self) -> f64 {
        self.epsilon.value() * self.branch.value()
    }

    /// Rejects unknown names and non-finite values; family-specific domains
    /// are checked when the closed form is built.
    pub fn validate(&self) -> Result<()> {
        for (k, &v) in &self.params {
            if !self.id.params().iter().any(|p| p.name == k) {
                return Err(Error::InvalidParameter {
                    name: k.clone(),
                    value: v,
                    reason: format!("not a parameter of {}", self.id),
                });
            }
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name: k.clone(),
                    value: v,
                    reason: "must be finite".into(),
                });
            }
        }
        Ok(())
    }
}

/// The closed form of one family member.
///
/// The native parameter `x` is arc length for [`Parameterization::ArcLength`]
/// families and the auxiliary parameter otherwise.
#[derive(Clone)]
pub struct ClosedForm {
    pub parameterization: Parameterization,
    /// Admissible values of the native parameter.
    pub domain: Interval,
    /// Native range sampled by default.
    pub default_range: (f64, f64),
    pub spacing: Spacing,
    pub momentum: MomentumSpec,
    /// `κ(s)`, absent for pseudopolar-only families.
    pub intrinsic_kappa: Option<RealFn>,
    pub epsilon: CausalSign,
    state: Arc<dyn Fn(f64) -> State + Send + Sync>,
    /// `ds/dx` for auxiliary parametrizations.
    ds: Option<RealFn>,
    /// Closed-form arc length at the auxiliary parameter, if known.
    s_closed: Option<RealFn>,
}

impl fmt::Debug for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClosedForm")
            .field("parameterization", &self.parameterization)
            .field("domain", &self.domain)
            .field("default_range", &self.default_range)
            .field("momentum", &self.momentum)
            .finish()
    }
}

impl ClosedForm {
    fn check(&self, x: f64) -> Result<()> {
        let d = &self.domain;
        if !(x > d.lo && x < d.hi) {
            return Err(Error::OutOfDomain {
                what: "family parameter",
                value: x,
                domain: format!("({}, {})", d.lo, d.hi),
            });
        }
        Ok(())
    }

    pub fn position(&self, x: f64) -> Result<PlanePoint> {
        self.check(x)?;
        let st = (self.state)(x);
        Ok(Vec2::from_uv(st.u, st.v))
    }

    /// Curvature at native parameter `x`.
    pub fn kappa(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok((self.state)(x).kappa)
    }

    /// `ds/dx` (1 for arc-length families).
    pub fn speed(&self, x: f64) -> f64 {
        self.ds.as_ref().map_or(1.0, |f| f(x))
    }

    /// Arc length at `x` from the family's own closed form, when it has one.
    pub fn closed_arc_length(&self, x: f64) -> Option<f64> {
        match self.parameterization {
            Parameterization::ArcLength => Some(x),
            Parameterization::AuxT => self.s_closed.as_ref().map(|f| f(x)),
        }
    }
}

pub fn closed_form(desc: &FamilyDescriptor) -> Result<ClosedForm> {
    desc.validate()?;
    families::build(desc)
}

pub fn momentum(desc: &FamilyDescriptor) -> Result<MomentumSpec> {
    Ok(closed_form(desc)?.momentum)
}

/// Native-parameter range sampled by default.
pub fn default_range(desc: &FamilyDescriptor) -> Result<(f64, f64)> {
    Ok(closed_form(desc)?.default_range)
}

/// `κ(s)` in closed form together with its domain of arc length.
#[derive(Clone)]
pub struct IntrinsicEquation {
    pub kappa: RealFn,
    pub domain: Interval,
}

impl fmt::Debug for IntrinsicEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IntrinsicEquation").field("domain", &self.domain).finish()
    }
}

impl IntrinsicEquation {
    pub fn eval(&self, s: f64) -> f64 {
        (self.kappa)(s)
    }
}

pub fn intrinsic_equation(desc: &FamilyDescriptor) -> Result<IntrinsicEquation> {
    let cf = closed_form(desc)?;
    match (cf.intrinsic_kappa, cf.parameterization) {
        (Some(kappa), Parameterization::ArcLength) => Ok(IntrinsicEquation {
            kappa,
            domain: cf.domain,
        }),
        _ => Err(Error::PseudopolarOnly(desc.id.name())),
    }
}

/// Tension and energy `(σ, E)` of an elastic member.
pub fn elastic_constants(desc: &FamilyDescriptor) -> Result<(f64, f64)> {
    if desc.id != FamilyId::Elastic {
        return Err(Error::InvalidParameter {
            name: "family".into(),
            value: f64::NAN,
            reason: format!("{} is not an elastic family", desc.id),
        });
    }
    let (c, a) = (desc.param("c")?, desc.param("a")?);
    let k2 = a / 2.0;
    Ok((4.0 * c * k2, 4.0 * c * c * k2 * k2))
}

/// Residual of the pseudopolar relation of the sinusoidal spirals.
///
/// `Plus` is the relation of radicand sign +1
/// (`λρⁿ − (n+1) sinh nν`), `Minus` that of radicand sign −1
/// (`λρⁿ − sgn(λ)|n+1| cosh nν`).
pub fn sinusoidal_relation(n: f64, lambda: f64, branch: Branch) -> impl Fn(f64, f64) -> f64 {
    move |rho: f64, nu: f64| match branch {
        Branch::Plus => lambda * rho.powf(n) - (n + 1.0) * (n * nu).sinh(),
        Branch::Minus => lambda * rho.powf(n) - lambda.signum() * (n + 1.0).abs() * (n * nu).cosh(),
    }
}

fn build_samples(cf: &ClosedForm, s: Vec<f64>, x: Vec<f64>) -> Result<CurveSamples> {
    let states: Vec<State> = x.iter().map(|&t| (cf.state)(t)).collect();
    let u = states.iter().map(|q| q.u).collect();
    let v = states.iter().map(|q| q.v).collect();
    let kappa = states.iter().map(|q| q.kappa).collect();
    let mut out = CurveSamples::from_uv(s, u, v, cf.epsilon)?.with_kappa(kappa)?;
    if states.iter().all(|q| q.jets.is_some()) {
        let (kd, kdd) = states.iter().map(|q| q.jets.unwrap()).unzip();
        out = out.with_kappa_derivatives(kd, kdd)?;
    }
    if cf.parameterization == Parameterization::AuxT {
        out = out.with_aux(x)?;
    }
    Ok(out)
}

const AUX_TOL: QuadTol = QuadTol {
    abs: 1e-14,
    rel: 1e-14,
    max_panels: 2000,
};

/// Samples at the given native parameter values.
///
/// Auxiliary parameters are converted to arc length by quadrature of
/// `ds/dx`, anchored at the closed-form arc length of the first value when
/// the family has one (0 otherwise). The output is ordered by arc length.
pub fn evaluate_family(desc: &FamilyDescriptor, t_values: &[f64]) -> Result<CurveSamples> {
    let cf = closed_form(desc)?;
    for &t in t_values {
        cf.check(t)?;
    }
    match (&cf.ds, cf.parameterization) {
        (Some(ds), Parameterization::AuxT) => {
            let Some(&t0) = t_values.first() else {
                return Err(Error::TooFewSamples { needed: 1, got: 0 });
            };
            let mut s = Vec::with_capacity(t_values.len());
            let mut acc = cf.s_closed.as_ref().map_or(0.0, |f| f(t0));
            s.push(acc);
            for w in t_values.windows(2) {
                acc += integrate(|t| ds(t), w[0], w[1], AUX_TOL)?.value;
                s.push(acc);
            }
            let mut x = t_values.to_vec();
            if s.len() > 1 && s[1] < s[0] {
                s.reverse();
                x.reverse();
            }
            build_samples(&cf, s, x)
        }
        _ => build_samples(&cf, t_values.to_vec(), t_values.to_vec()),
    }
}

/// `count` samples over a native range (the family default when `None`),
/// uniform in arc length unless the family prefers geometric spacing.
pub fn sample_family(desc: &FamilyDescriptor, count: usize, range: Option<(f64, f64)>) -> Result<CurveSamples> {
    let cf = closed_form(desc)?;
    let (lo, hi) = range.unwrap_or(cf.default_range);
    if !(lo < hi) {
        return Err(Error::EmptyDomain { lo, hi });
    }
    if count < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: count });
    }
    cf.check(lo)?;
    cf.check(hi)?;
    let Some(ds) = cf.ds.clone() else {
        let s = match cf.spacing {
            Spacing::Uniform => linspace(lo, hi, count),
            Spacing::Geometric => geomspace(lo, hi, count)?,
        };
        return build_samples(&cf, s.clone(), s);
    };
    // arc length as a cumulative table in the auxiliary parameter
    let s0 = cf.s_closed.as_ref().map_or(0.0, |f| f(lo));
    let cum = crate::quadrature::Cumulative::uniform(ds, lo, hi, 256, lo, AUX_TOL);
    let (a, b) = (s0, s0 + cum.eval(hi));
    let (sa, sb) = (a.min(b), a.max(b));
    let s = linspace(sa, sb, count);
    let xtol = 1e-15 * (hi - lo).abs().max(1.0);
    let mut x = Vec::with_capacity(count);
    for (i, &si) in s.iter().enumerate() {
        // the ends are known exactly
        let xi = if si == a {
            lo
        } else if si == b {
            hi
        } else if i == 0 || i == count - 1 {
            if (si - a).abs() < (si - b).abs() {
                lo
            } else {
                hi
            }
        } else {
            cum.invert(si - s0, xtol, 1e-12 * (1.0 + si.abs()))?
        };
        x.push(xi);
    }
    build_samples(&cf, s, x)
}

/// A fixed set of members spanning every family and regime.
pub fn reference_instances() -> Vec<FamilyDescriptor> {
    use Branch::{Minus, Plus};
    use CausalSign::{Spacelike as S, Timelike as T};
    let d = FamilyDescriptor::new;
    let mut out = vec![
        d(FamilyId::Geodesic, S),
        d(FamilyId::Geodesic, T).with("phi0", 0.7),
        d(FamilyId::PseudocircleOrigin, S),
        d(FamilyId::PseudocircleOrigin, S).with_branch(Minus),
        d(FamilyId::PseudocircleV, S).with("k0", 0.5).with("c", 0.3),
        d(FamilyId::PseudocircleV, T).with("k0", 0.5).with("c", 0.3),
        d(FamilyId::Norwich, S),
        d(FamilyId::Norwich, S).with_branch(Minus),
        d(FamilyId::Norwich, T).with("c", 2.0),
    ];
    for mu in [-2.0, -1.0, -0.5, (0.75 * std::f64::consts::PI).cos(), 1.0, 1f64.cosh()] {
        out.push(d(FamilyId::SturmExtended, S).with("mu", mu).with_branch(Minus));
    }
    out.push(d(FamilyId::SturmExtended, S).with("mu", 1.0));
    out.push(d(FamilyId::SturmExtended, T).with("mu", -0.5).with("lambda", 2.0));
    for (n, lam, br) in [
        (2.0, 3.0, Plus),
        (0.5, 1.5, Plus),
        (1.0, 2.0, Plus),
        (-2.0, -1.0, Plus),
        (-0.5, 0.5, Plus),
        (-2.0, -1.0, Minus),
        (2.0, 3.0, Minus),
    ] {
        out.push(d(FamilyId::Sinusoidal, S).with("n", n).with("lambda", lam).with_branch(br));
    }
    for c in [0.0, 1.0, -1.0] {
        out.push(d(FamilyId::Elastic, S).with("c", c));
        out.push(d(FamilyId::Elastic, T).with("c", c));
    }
    out.push(d(FamilyId::Elastic, S).with("c", 2.0).with("a", 4.0).with("b", 1.0));
    out.push(d(FamilyId::Enneper, S));
    out.push(d(FamilyId::Enneper, T).with("a", 2.0));
    for c in [1.0, -1.0] {
        out.push(d(FamilyId::EnneperC, S).with("c", c));
        out.push(d(FamilyId::ExpC, S).with("c", c));
    }
    out.push(d(FamilyId::EnneperC, T));
    out.push(d(FamilyId::GrimReaper, S));
    out.push(d(FamilyId::GrimReaper, T).with("a", 2.0));
    out.push(d(FamilyId::ExpC, T).with("c", 0.5));
    out
}

#[cfg(test)]
mod tests;
