//! Run configuration: JSON ingestion with strict field checking, plus the
//! shared validation entry point.

use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExampleId {
    /// Example with the smooth manufactured solution (1 + t^2) x(1-x).
    Smooth,
    /// Example with the nonsmooth manufactured solution (1 + t^alpha) x(1-x).
    Nonsmooth,
    /// Caller-supplied problem; only reachable through the library API.
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GradingMode {
    Uniform,
    /// r = max{(2 - alpha)/alpha, 1}
    Auto,
    Explicit(f64),
}

impl GradingMode {
    pub fn exponent(&self, alpha: f64) -> Result<f64> {
        match self {
            GradingMode::Uniform => Ok(1.0),
            GradingMode::Auto => crate::mesh::auto_grading(alpha),
            GradingMode::Explicit(r) => {
                if *r >= 1.0 {
                    Ok(*r)
                } else {
                    Err(Error::InvalidConfig(format!("explicit grading r must be >= 1, got {r}")))
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputSpec {
    pub format: OutputFormat,
    pub path: String,
}

/// Driver configuration. The JSON document must use exactly these field
/// names; unknown keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub example_id: ExampleId,
    /// Fractional orders to sweep (one table block per alpha).
    pub alphas: Vec<f64>,
    /// Time-step counts to sweep; convergence orders are attached when each
    /// entry doubles the previous one.
    #[serde(rename = "N_list")]
    pub n_list: Vec<usize>,
    /// Spatial element count.
    #[serde(rename = "M")]
    pub m: usize,
    pub grading_mode: GradingMode,
    pub output: Option<OutputSpec>,
    /// All unknown analytic constants are pinned to 1.
    pub constants_convention: ConstantsConvention,
    #[serde(default = "default_theta")]
    pub theta: f64,
}

fn default_theta() -> f64 {
    std::f64::consts::FRAC_PI_4
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstantsConvention {
    Unit,
}

impl RunConfig {
    pub fn from_json(doc: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(doc)?;
        Ok(cfg)
    }

    pub fn check(&self) -> Vec<Error> {
        let mut violations = Vec::new();
        if self.n_list.is_empty() {
            violations.push(Error::Violation("N_list".into(), 0.0, "N_list must be nonempty".into()));
        }
        for &n in &self.n_list {
            if n < 2 {
                violations.push(Error::Violation("N_list".into(), n as f64, "each N must be >= 2".into()));
            }
        }
        if self.m < 2 {
            violations.push(Error::Violation("M".into(), self.m as f64, "M must be >= 2".into()));
        }
        if self.alphas.is_empty() {
            violations.push(Error::Violation("alphas".into(), 0.0, "alphas must be nonempty".into()));
        }
        for &a in &self.alphas {
            if !(0.0 < a && a < 1.0) {
                violations.push(Error::Violation("alphas".into(), a, "alpha out of (0,1)".into()));
            }
        }
        violations
    }
}

/// Validate a problem/config pair, collecting every violation.
pub fn validate(spec: &ProblemSpec, cfg: &RunConfig) -> std::result::Result<(), Vec<Error>> {
    let mut violations = spec.check();
    violations.extend(cfg.check());
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}
