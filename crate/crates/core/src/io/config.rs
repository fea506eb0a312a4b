use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::mesh::MeshConfig;
use super::RunError;
use crate::families::FamilySpec;
use crate::harness::{IdentityCheck, SamplePlan, TolerancePolicy};

pub const CONFIG_VERSION: u32 = 1;

/// Every check a config may request.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Minimality,
    Screw,
    ConeScaling,
    Takahashi,
    Lemma,
    HelicoidAlgebra,
    ThetaHarmonicity,
    ProofTerms,
}

impl Check {
    pub fn identity(self) -> Option<IdentityCheck> {
        match self {
            Check::Lemma => Some(IdentityCheck::Lemma),
            Check::HelicoidAlgebra => Some(IdentityCheck::HelicoidAlgebra),
            Check::ThetaHarmonicity => Some(IdentityCheck::ThetaHarmonicity),
            Check::ProofTerms => Some(IdentityCheck::ProofTerms),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<PathBuf>,
}

fn default_version() -> u32 {
    CONFIG_VERSION
}

fn default_rays() -> usize {
    2
}

/// One run of the command-line front end.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_version")]
    pub version: u32,
    pub family: FamilySpec,
    #[serde(default)]
    pub plan: SamplePlan,
    #[serde(default)]
    pub tolerances: TolerancePolicy,
    #[serde(default)]
    pub checks: Vec<Check>,
    #[serde(default)]
    pub output: OutputPaths,
    #[serde(default)]
    pub mesh: MeshConfig,
    /// Number of rays for the Takahashi check.
    #[serde(default = "default_rays")]
    pub rays: usize,
    /// Restricts proof-term checks to one ray block (one based).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proof_block: Option<usize>,
}

impl RunConfig {
    pub fn new(family: FamilySpec, checks: Vec<Check>) -> Self {
        Self {
            version: CONFIG_VERSION,
            family,
            plan: SamplePlan::default(),
            tolerances: TolerancePolicy::default(),
            checks,
            output: OutputPaths::default(),
            mesh: MeshConfig::default(),
            rays: default_rays(),
            proof_block: None,
        }
    }

    /// Parses and validates; unknown kinds, fields and check names fail here.
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), RunError> {
        if self.version != CONFIG_VERSION {
            return Err(RunError::Version(self.version));
        }
        self.family.validate()?;
        self.plan.validate()?;
        self.tolerances.validate()?;
        if self.rays == 0 {
            return Err(RunError::Config("rays must be at least 1".into()));
        }
        if self.proof_block == Some(0) {
            return Err(RunError::Config("proof_block is one based".into()));
        }
        Ok(())
    }

    /// Zero-based proof block.
    pub fn proof_block_index(&self) -> Option<usize> {
        self.proof_block.map(|b| b - 1)
    }

    /// Fails when `checks` is empty or holds a check outside `allowed`.
    pub fn require_checks(&self, command: &str, allowed: &[Check]) -> Result<(), RunError> {
        if self.checks.is_empty() {
            return Err(RunError::Config(format!("`{command}` needs a non-empty `checks` list")));
        }
        if let Some(c) = self.checks.iter().find(|c| !allowed.contains(c)) {
            return Err(RunError::Config(format!(
                "check `{}` is not available for `{command}`",
                serde_json::to_value(c).expect("check serializes").as_str().unwrap_or_default()
            )));
        }
        Ok(())
    }
}
