//! The effective configuration of a run, validated before anything is
//! computed and embedded in JSON output as provenance.

use std::collections::BTreeMap;

use l2curves::{Branch, CausalSign, Side, Variable};
use serde::{Deserialize, Serialize};

use crate::io::Format;

pub const TOL_ENV: &str = "L2CURVES_TOL";
pub const DEFAULT_VERIFY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub integral: f64,
    pub inversion: f64,
    pub verify: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let t = l2curves::Tolerances::default();
        Tolerances {
            integral: t.integral,
            inversion: t.inversion,
            verify: t.verify,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub tool: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expression: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variable: Option<Variable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<f64>,
    pub epsilon: i8,
    pub branch: i8,
    pub sign: i8,
    /// Arc-length range, or the auxiliary parameter range of a family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<(f64, f64)>,
    /// ρ or v window the pipeline draws its samples from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(f64, f64)>,
    pub samples: usize,
    pub tolerances: Tolerances,
    pub format: Format,
    /// Not serialized: output files should not depend on where they live.
    #[serde(skip)]
    pub output: Option<String>,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        RunConfig {
            tool: format!("l2curves {}", env!("CARGO_PKG_VERSION")),
            command: command.to_string(),
            family: None,
            params: BTreeMap::new(),
            expression: None,
            variable: None,
            c: None,
            anchor: None,
            epsilon: 1,
            branch: 1,
            sign: 1,
            range: None,
            window: None,
            samples: 512,
            tolerances: Tolerances::default(),
            format: Format::Csv,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [("epsilon", self.epsilon), ("branch", self.branch), ("sign", self.sign)] {
            if v != 1 && v != -1 {
                return Err(format!("{name} must be 1 or -1, got {v}"));
            }
        }
        if self.samples < 8 {
            return Err(format!("need at least 8 samples, got {}", self.samples));
        }
        for (name, r) in [("range", self.range), ("window", self.window)] {
            if let Some((lo, hi)) = r {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(format!("{name} needs finite lo < hi, got [{lo}, {hi}]"));
                }
            }
        }
        for (name, v) in self.params.iter() {
            if !v.is_finite() {
                return Err(format!("parameter {name} must be finite"));
            }
        }
        for (name, v) in [("c", self.c), ("anchor", self.anchor)] {
            if matches!(v, Some(x) if !x.is_finite()) {
                return Err(format!("{name} must be finite"));
            }
        }
        let t = &self.tolerances;
        for (name, v) in [("integral", t.integral), ("inversion", t.inversion), ("verify", t.verify)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("tolerance {name} must be positive, got {v}"));
            }
        }
        if self.command == "solve" && (self.expression.is_none() || self.c.is_none()) {
            return Err("solve needs --kappa and an explicit --c".into());
        }
        Ok(())
    }

    pub fn causal_sign(&self) -> CausalSign {
        if self.epsilon > 0 {
            CausalSign::Spacelike
        } else {
            CausalSign::Timelike
        }
    }

    pub fn branch(&self) -> Branch {
        if self.branch > 0 {
            Branch::Plus
        } else {
            Branch::Minus
        }
    }

    pub fn side(&self) -> Side {
        if self.sign > 0 {
            Side::Pos
        } else {
            Side::Neg
        }
    }
}

/// The verification threshold: an explicit flag wins, then `L2CURVES_TOL`,
/// then the default.
pub fn verify_tolerance(flag: Option<f64>, env: Option<&str>) -> Result<f64, String> {
    let v = match (flag, env) {
        (Some(v), _) => v,
        (None, Some(s)) => s
            .trim()
            .parse::<f64>()
            .map_err(|_| format!("{TOL_ENV}=`{s}` is not a number"))?,
        (None, None) => DEFAULT_VERIFY_TOL,
    };
    if !(v > 0.0 && v.is_finite()) {
        return Err(format!("verification tolerance must be positive, got {v}"));
    }
    Ok(v)
}
