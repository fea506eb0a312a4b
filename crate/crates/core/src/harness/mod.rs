//! Sampling campaigns over built families and the report data model.

mod campaigns;
mod identity_checks;
mod sampling;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use campaigns::{
    default_campaign, takahashi_equivalence, verify_cone_scaling, verify_minimality, verify_screw_invariance,
    TakahashiReport,
};
pub use identity_checks::{run_identity_checks, IdentityCheck, IdentityTable};
pub use sampling::{draw_point, point_stream, sample_map, SamplePlan, Sampled, DEFAULT_SEED};

use crate::families::{FamilySpec, SpecError};
use crate::geom::GeomError;
use crate::identities::IdentityError;

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Identity(#[from] IdentityError),
    #[error("sampling exhausted ({excluded} of {drawn} draws excluded): {reason}")]
    SamplingExhausted {
        excluded: usize,
        drawn: usize,
        reason: String,
    },
    #[error("invalid sample plan: {0}")]
    InvalidPlan(String),
    #[error("invalid tolerances: {0}")]
    InvalidTolerance(String),
    #[error("check `{check}` does not apply: {reason}")]
    NotApplicable { check: String, reason: String },
}

/// Thresholds for verdicts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TolerancePolicy {
    /// Normalized mean curvature `|H| / (1 + |dF|²)`.
    pub tol_h: f64,
    pub tol_identity: f64,
    /// Smallest residual a negative control must show everywhere.
    pub tol_negative: f64,
    /// Tangential part of `H`, relative to `1 + |H| + |F|`.
    pub tol_tangent: f64,
    /// Screw and cone-scaling defects.
    pub tol_symmetry: f64,
    /// Harmonicity and cancellation sums of the helicoid proof.
    pub tol_harmonic: f64,
    /// Agreement of the summed proof terms with the generic operator.
    pub tol_operator: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            tol_h: 1e-8,
            tol_identity: 1e-9,
            tol_negative: 1e-2,
            tol_tangent: 1e-8,
            tol_symmetry: 1e-12,
            tol_harmonic: 1e-8,
            tol_operator: 1e-7,
        }
    }
}

impl TolerancePolicy {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let all = [
            ("tol_h", self.tol_h),
            ("tol_identity", self.tol_identity),
            ("tol_negative", self.tol_negative),
            ("tol_tangent", self.tol_tangent),
            ("tol_symmetry", self.tol_symmetry),
            ("tol_harmonic", self.tol_harmonic),
            ("tol_operator", self.tol_operator),
        ];
        if let Some((name, _)) = all.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
            return Err(HarnessError::InvalidTolerance(format!("{name} must be positive")));
        }
        if self.tol_negative < 1e3 * self.tol_h {
            return Err(HarnessError::InvalidTolerance(
                "tol_negative must exceed tol_h by at least a factor 1000".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    Pass,
    /// Negative control: every residual must stay above `tol_negative`.
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Verdict {
    Pass,
    Fail,
    FailExpected,
    /// Neither below the pass tolerance nor above the negative threshold.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub min_residual: f64,
    pub points_evaluated: usize,
    pub points_excluded: usize,
    pub tolerance: f64,
    pub expectation: Expectation,
    pub verdict: Verdict,
}

impl CheckResult {
    /// Summarizes residuals of a positive (`Expectation::Pass`) check.
    pub fn positive(name: &str, residuals: &[f64], excluded: usize, tol: f64) -> Self {
        Self::build(name, residuals, excluded, tol, Expectation::Pass, f64::INFINITY)
    }

    /// Summarizes residuals of a negative control.
    pub fn negative(name: &str, residuals: &[f64], excluded: usize, tol: f64, tol_negative: f64) -> Self {
        Self::build(name, residuals, excluded, tol, Expectation::Fail, tol_negative)
    }

    pub fn build(
        name: &str,
        residuals: &[f64],
        excluded: usize,
        tol: f64,
        expectation: Expectation,
        tol_negative: f64,
    ) -> Self {
        let max = residuals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = residuals.iter().copied().fold(f64::INFINITY, f64::min);
        let mean = residuals.iter().sum::<f64>() / residuals.len().max(1) as f64;
        // NaN residuals never pass
        let all_finite = residuals.iter().all(|r| r.is_finite());
        let verdict = if residuals.is_empty() {
            Verdict::Inconclusive
        } else if all_finite && max <= tol {
            Verdict::Pass
        } else {
            match expectation {
                Expectation::Pass => Verdict::Fail,
                Expectation::Fail if min >= tol_negative => Verdict::FailExpected,
                Expectation::Fail => Verdict::Inconclusive,
            }
        };
        Self {
            name: name.to_string(),
            max_residual: max,
            mean_residual: mean,
            min_residual: min,
            points_evaluated: residuals.len(),
            points_excluded: excluded,
            tolerance: tol,
            expectation,
            verdict,
        }
    }

    pub fn matches_expectation(&self) -> bool {
        matches!(
            (self.expectation, self.verdict),
            (Expectation::Pass, Verdict::Pass) | (Expectation::Fail, Verdict::FailExpected)
        )
    }
}

/// Result of one campaign over one family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub version: u32,
    pub engine_version: String,
    pub family: FamilySpec,
    pub plan: SamplePlan,
    pub tolerances: TolerancePolicy,
    pub checks: Vec<CheckResult>,
    /// Only field that varies between identical runs.
    pub wall_time_s: f64,
}

impl VerificationReport {
    pub fn new(family: FamilySpec, plan: SamplePlan, tolerances: TolerancePolicy) -> Self {
        Self {
            version: REPORT_VERSION,
            engine_version: ENGINE_VERSION.to_string(),
            family,
            plan,
            tolerances,
            checks: Vec::new(),
            wall_time_s: 0.0,
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_match_expectation(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(CheckResult::matches_expectation)
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
        self.wall_time_s += other.wall_time_s;
    }

    /// Equality ignoring `wall_time_s`.
    pub fn same_results(&self, other: &Self) -> bool {
        let mut a = self.clone();
        a.wall_time_s = other.wall_time_s;
        &a == other
    }
}
