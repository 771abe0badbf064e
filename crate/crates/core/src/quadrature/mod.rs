//! Reconstruction of unit-speed curves from a prescribed curvature law.
//!
//! Two pipelines are provided. When κ depends on the pseudodistance ρ the
//! angular momentum `K(ρ) = ρ² ν'` gives
//! `ds = ρ dρ / sqrt(K² ± ε ρ²)` and `dν = K ds / ρ²`.
//! When κ depends on `v = y - x` the linear momentum `K(v) = u'` gives
//! `ds = ε K dv` and `du = K ds`.

mod domain;
pub mod gauss_kronrod;
mod momentum;
mod rho;
pub mod roots;
mod table;
mod v;

pub use domain::{domain_scan, EndpointKind, Interval, ScanWindow};
pub use momentum::{MomentumSpec, RealFn, Variable};
pub use rho::{
    arc_from_rho, emit_equilibrium, equilibria, nu_from_s, solve_kappa_rho, solve_kappa_rho_detailed,
    ArcTable, RhoSolution,
};
pub(crate) use table::Cumulative;
pub use table::{invert_monotone, InverseTable, MonotoneTable, Tabulated};
pub use v::{solve_kappa_v, solve_kappa_v_detailed, VSolution};

use crate::error::{Error, Result};
use crate::plane::{Branch, CausalSign, Side};
use crate::samples::{geomspace, linspace};

/// Picks the interval to integrate: the one overlapping the sampling
/// window the most, the longer one on a tie, the upper one after that.
pub(crate) fn choose_interval(
    intervals: &[Interval],
    hint: Option<Interval>,
    window: (f64, f64),
) -> Result<Interval> {
    let candidates: Vec<Interval> = match hint {
        Some(h) => intervals.iter().filter_map(|iv| iv.clip(h.lo, h.hi)).collect(),
        None => intervals.to_vec(),
    };
    let mut best: Option<(Interval, (f64, f64))> = None;
    for iv in candidates {
        let overlap = (iv.hi.min(window.1) - iv.lo.max(window.0)).max(0.0);
        let score = (overlap, iv.len());
        match best {
            Some((_, b)) if score.0 < b.0 || (score.0 == b.0 && score.1 < b.1) => {}
            _ => best = Some((iv, score)),
        }
    }
    match best {
        Some((iv, _)) => Ok(iv),
        None => {
            let h = hint.unwrap_or(Interval::new(f64::NAN, f64::NAN));
            Err(Error::EmptyDomain { lo: h.lo, hi: h.hi })
        }
    }
}

/// How output samples are placed in arc length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Spacing {
    #[default]
    Uniform,
    /// Constant ratio between neighbouring samples; suits laws like κ = 1/s.
    Geometric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPolicy {
    pub count: usize,
    pub spacing: Spacing,
    /// Explicit arc-length range; chosen from `window` when absent.
    pub s_range: Option<(f64, f64)>,
    /// Range of ρ or v the default arc-length range is drawn from.
    pub window: Option<(f64, f64)>,
    /// Fraction of the natural range trimmed at singular endpoints.
    pub guard: f64,
}

impl Default for SamplingPolicy {
    fn default() -> Self {
        SamplingPolicy {
            count: 512,
            spacing: Spacing::Uniform,
            s_range: None,
            window: None,
            guard: 0.02,
        }
    }
}

impl SamplingPolicy {
    pub fn with_count(mut self, count: usize) -> Self {
        self.count = count;
        self
    }

    pub fn with_s_range(mut self, lo: f64, hi: f64) -> Self {
        self.s_range = Some((lo, hi));
        self
    }

    pub fn with_spacing(mut self, spacing: Spacing) -> Self {
        self.spacing = spacing;
        self
    }

    pub fn with_window(mut self, lo: f64, hi: f64) -> Self {
        self.window = Some((lo, hi));
        self
    }

    pub(crate) fn grid(&self, lo: f64, hi: f64) -> Result<Vec<f64>> {
        if !(lo < hi) {
            return Err(Error::EmptyDomain { lo, hi });
        }
        match self.spacing {
            Spacing::Uniform => Ok(linspace(lo, hi, self.count)),
            Spacing::Geometric => geomspace(lo, hi, self.count),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute accuracy of each quadrature.
    pub integral: f64,
    /// Residual allowed when inverting s(ρ) or s(v).
    pub inversion: f64,
    /// Threshold used by the invariant checks.
    pub verify: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            integral: 1e-10,
            inversion: 1e-10,
            verify: 1e-6,
        }
    }
}

/// Everything needed to run one of the two pipelines.
#[derive(Clone)]
pub struct SolveRequest {
    pub momentum: MomentumSpec,
    pub epsilon: CausalSign,
    /// Pseudopolar wedge of the output (ρ pipeline only).
    pub branch: Branch,
    pub sign: Side,
    pub domain_hint: Option<Interval>,
    pub sampling: SamplingPolicy,
    pub tolerances: Tolerances,
    pub scan: Option<ScanWindow>,
    /// Value of ρ or v where ν (resp. u) is set to zero.
    pub anchor: Option<f64>,
}

impl std::fmt::Debug for SolveRequest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SolveRequest")
            .field("momentum", &self.momentum)
            .field("epsilon", &self.epsilon)
            .field("branch", &self.branch)
            .field("sign", &self.sign)
            .field("domain_hint", &self.domain_hint)
            .field("sampling", &self.sampling)
            .finish()
    }
}

impl SolveRequest {
    pub fn new(momentum: MomentumSpec, epsilon: CausalSign) -> Self {
        SolveRequest {
            momentum,
            epsilon,
            branch: Branch::Plus,
            sign: Side::Pos,
            domain_hint: None,
            sampling: SamplingPolicy::default(),
            tolerances: Tolerances::default(),
            scan: None,
            anchor: None,
        }
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = branch;
        self
    }

    pub fn with_sign(mut self, sign: Side) -> Self {
        self.sign = sign;
        self
    }

    pub fn with_hint(mut self, lo: f64, hi: f64) -> Self {
        self.domain_hint = Some(Interval::new(lo, hi));
        self
    }

    pub fn with_sampling(mut self, sampling: SamplingPolicy) -> Self {
        self.sampling = sampling;
        self
    }

    pub fn with_s_range(mut self, lo: f64, hi: f64) -> Self {
        self.sampling.s_range = Some((lo, hi));
        self
    }

    pub fn with_count(mut self, count: usize) -> Self {
        self.sampling.count = count;
        self
    }

    pub fn with_anchor(mut self, anchor: f64) -> Self {
        self.anchor = Some(anchor);
        self
    }

    /// The sign σ = ε·branch of the ρ² term in the radicand `K² + σ ρ²`.
    pub fn radicand_sign(&self) -> f64 {
        self.epsilon.value() * self.branch.value()
    }

    pub fn scan_window(&self) -> ScanWindow {
        self.scan
            .unwrap_or_else(|| ScanWindow::default_for(self.momentum.variable))
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.sampling.count < 16 {
            return Err(Error::InvalidParameter {
                name: "count".into(),
                value: self.sampling.count as f64,
                reason: "at least 16 samples are required".into(),
            });
        }
        if !(self.sampling.guard >= 0.0 && self.sampling.guard < 0.5) {
            return Err(Error::InvalidParameter {
                name: "guard".into(),
                value: self.sampling.guard,
                reason: "guard fraction must lie in [0, 0.5)".into(),
            });
        }
        if let Some((lo, hi)) = self.sampling.s_range {
            if !(lo < hi) {
                return Err(Error::EmptyDomain { lo, hi });
            }
        }
        Ok(())
    }
}
