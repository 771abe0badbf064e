use std::fmt;
use std::sync::Arc;

use super::gauss_kronrod::QuadTol;
use super::table::Cumulative;
use crate::error::{Error, Result};
use crate::plane::CausalSign;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Which coordinate the curvature law depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    Rho,
    V,
}

impl Variable {
    pub fn name(self) -> &'static str {
        match self {
            Variable::Rho => "rho",
            Variable::V => "v",
        }
    }
}

/// A geometric momentum `K` of ρ (angular) or of v (linear).
///
/// `c` records the integration constant that was folded into `K`; the
/// optional `kappa` is the curvature law `K` was built from.
#[derive(Clone)]
pub struct MomentumSpec {
    pub variable: Variable,
    pub k: RealFn,
    pub c: f64,
    pub kappa: Option<RealFn>,
}

impl fmt::Debug for MomentumSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MomentumSpec")
            .field("variable", &self.variable)
            .field("c", &self.c)
            .field("has_kappa", &self.kappa.is_some())
            .finish()
    }
}

impl MomentumSpec {
    pub fn rho<F>(k: F, c: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        MomentumSpec {
            variable: Variable::Rho,
            k: Arc::new(k),
            c,
            kappa: None,
        }
    }

    pub fn v<F>(k: F, c: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        MomentumSpec {
            variable: Variable::V,
            k: Arc::new(k),
            c,
            kappa: None,
        }
    }

    pub fn with_kappa<F>(mut self, kappa: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.kappa = Some(Arc::new(kappa));
        self
    }

    /// Builds `K` from a curvature law by numerical antidifferentiation.
    ///
    /// ρ case: `K(ρ) = c + ∫_anchor^ρ t κ(t) dt`.
    /// v case: `-ε / K(v) = c + ∫_anchor^v κ(t) dt`.
    /// The primitive is tabulated on `window`; beyond a non-integrable
    /// point (as seen from the anchor) `K` evaluates to NaN.
    pub fn from_kappa(
        variable: Variable,
        kappa: RealFn,
        c: f64,
        anchor: f64,
        epsilon: CausalSign,
        window: (f64, f64),
    ) -> Result<Self> {
        if !c.is_finite() || !anchor.is_finite() {
            return Err(Error::InvalidParameter {
                name: "c".into(),
                value: c,
                reason: "integration constant and anchor must be finite".into(),
            });
        }
        let integrand: RealFn = match variable {
            Variable::Rho => {
                let kap = kappa.clone();
                Arc::new(move |t: f64| t * kap(t))
            }
            Variable::V => kappa.clone(),
        };
        let (lo, hi) = (window.0.min(anchor), window.1.max(anchor));
        let prim = Arc::new(Cumulative::uniform(integrand, lo, hi, 2048, anchor, QuadTol::new(1e-13, 1e-14)));
        let eps = epsilon.value();
        let k: RealFn = match variable {
            Variable::Rho => Arc::new(move |r: f64| c + prim.eval(r)),
            Variable::V => Arc::new(move |v: f64| -eps / (c + prim.eval(v))),
        };
        Ok(MomentumSpec {
            variable,
            k,
            c,
            kappa: Some(kappa),
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.k)(x)
    }

    /// dK/dx by Ridders' extrapolation of central differences.
    pub fn derivative(&self, x: f64) -> f64 {
        ridders(|t| (self.k)(t), x, 1e-3 * x.abs().max(1e-2))
    }

    /// The curvature law: the attached κ when present, else recovered from
    /// `K` (`κ = K'/ρ`, or `κ = ε K'/K²`).
    pub fn kappa_at(&self, x: f64, epsilon: CausalSign) -> f64 {
        if let Some(k) = &self.kappa {
            return k(x);
        }
        let kd = self.derivative(x);
        match self.variable {
            Variable::Rho => kd / x,
            Variable::V => {
                let k = self.eval(x);
                epsilon.value() * kd / (k * k)
            }
        }
    }

    /// Largest mismatch between `dK` and the attached curvature law on the
    /// given points, relative to `1 + |κ-term|`. Zero when no law is attached.
    pub fn consistency_residual(&self, epsilon: CausalSign, points: &[f64]) -> (f64, f64) {
        let Some(kappa) = &self.kappa else {
            return (0.0, f64::NAN);
        };
        let mut worst = (0.0, f64::NAN);
        for &x in points {
            let k = self.eval(x);
            if !k.is_finite() || k == 0.0 {
                continue;
            }
            let (lhs, rhs) = match self.variable {
                Variable::Rho => (self.derivative(x), x * kappa(x)),
                Variable::V => (epsilon.value() * self.derivative(x) / (k * k), kappa(x)),
            };
            if !(lhs.is_finite() && rhs.is_finite()) {
                continue;
            }
            let r = (lhs - rhs).abs() / (1.0 + rhs.abs());
            if r > worst.0 {
                worst = (r, x);
            }
        }
        worst
    }

    pub(crate) fn check_consistency(&self, epsilon: CausalSign, points: &[f64]) -> Result<()> {
        let (r, at) = self.consistency_residual(epsilon, points);
        if r > 1e-6 {
            return Err(Error::InconsistentMomentum { residual: r, at });
        }
        Ok(())
    }
}

/// Ridders' method: central differences at shrinking steps combined in a
/// Neville tableau, stopping once the error estimate starts to grow.
fn ridders(f: impl Fn(f64) -> f64, x: f64, h0: f64) -> f64 {
    const N: usize = 10;
    const CON: f64 = 1.4;
    const CON2: f64 = CON * CON;
    let mut a = [[0.0f64; N]; N];
    let mut h = h0;
    a[0][0] = (f(x + h) - f(x - h)) / (2.0 * h);
    let mut best = a[0][0];
    let mut err = f64::INFINITY;
    for i in 1..N {
        h /= CON;
        a[0][i] = (f(x + h) - f(x - h)) / (2.0 * h);
        let mut fac = CON2;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= CON2;
            let e = (a[j][i] - a[j - 1][i]).abs().max((a[j][i] - a[j - 1][i - 1]).abs());
            if e <= err {
                err = e;
                best = a[j][i];
            }
        }
        if (a[i][i] - a[i - 1][i - 1]).abs() >= 2.0 * err {
            break;
        }
    }
    best
}
