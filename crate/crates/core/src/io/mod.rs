//! Run configuration, report and table output, and mesh export.

mod config;
mod mesh;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{Check, OutputPaths, RunConfig, CONFIG_VERSION};
pub use mesh::{tessellate, to_obj, Mesh, MeshConfig, Projection, ProjectionPreset};

use crate::families::{build_immersion_with, SpecError};
use crate::geom::GeomError;
use crate::harness::{
    run_identity_checks, takahashi_equivalence, verify_cone_scaling, verify_minimality, verify_screw_invariance,
    HarnessError, IdentityCheck, IdentityTable, TakahashiReport, VerificationReport,
};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("cannot parse config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported config version {0}, expected {CONFIG_VERSION}")]
    Version(u32),
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub const VERIFY_CHECKS: [Check; 4] = [Check::Minimality, Check::Screw, Check::ConeScaling, Check::Takahashi];
pub const IDENTITY_CHECKS: [Check; 4] = [
    Check::Lemma,
    Check::HelicoidAlgebra,
    Check::ThetaHarmonicity,
    Check::ProofTerms,
];

fn relabel(mut r: VerificationReport, prefix: &str) -> VerificationReport {
    for c in &mut r.checks {
        c.name = format!("{prefix}-{}", c.name);
    }
    r
}

/// Runs the verification checks of `cfg` into one report.
pub fn run_verify(cfg: &RunConfig) -> Result<VerificationReport, RunError> {
    cfg.validate()?;
    cfg.require_checks("verify", &VERIFY_CHECKS)?;
    let mut report = VerificationReport::new(cfg.family.clone(), cfg.plan.clone(), cfg.tolerances);
    let mut minimality_done = false;
    for check in &cfg.checks {
        let part = match check {
            Check::Minimality if minimality_done => continue,
            Check::Minimality => verify_minimality(&cfg.family, &cfg.plan, &cfg.tolerances)?,
            Check::Screw => verify_screw_invariance(&cfg.family, &cfg.plan, &cfg.tolerances)?,
            Check::ConeScaling => {
                let mut r = verify_cone_scaling(&cfg.family, &cfg.plan, &cfg.tolerances)?;
                if minimality_done {
                    r.checks.retain(|c| c.name == "cone-scaling");
                }
                r
            }
            Check::Takahashi => relabel(run_takahashi(cfg)?.report, "takahashi"),
            _ => unreachable!("rejected by require_checks"),
        };
        minimality_done |= part.check("minimality").is_some();
        report.merge(part);
    }
    Ok(report)
}

pub fn run_takahashi(cfg: &RunConfig) -> Result<TakahashiReport, RunError> {
    cfg.validate()?;
    Ok(takahashi_equivalence(&cfg.family, cfg.rays, &cfg.plan, &cfg.tolerances)?)
}

pub fn run_identities(cfg: &RunConfig) -> Result<(VerificationReport, IdentityTable), RunError> {
    cfg.validate()?;
    cfg.require_checks("identities", &IDENTITY_CHECKS)?;
    let checks: Vec<IdentityCheck> = cfg.checks.iter().filter_map(|c| c.identity()).collect();
    Ok(run_identity_checks(
        &cfg.family,
        &checks,
        &cfg.plan,
        &cfg.tolerances,
        cfg.proof_block_index(),
    )?)
}

/// Mesh of `cfg.family` over the plan's box, or the family's default box.
pub fn run_mesh(cfg: &RunConfig) -> Result<Mesh, RunError> {
    cfg.validate()?;
    let imm = build_immersion_with(&cfg.family, &cfg.plan.exclusion)?;
    let domain = cfg.plan.resolve_box(&imm.domain)?;
    tessellate(&imm, &domain.0, &cfg.mesh)
}

pub fn report_to_json(report: &VerificationReport) -> String {
    serde_json::to_string_pretty(report).expect("reports serialize")
}

pub fn report_from_json(text: &str) -> Result<VerificationReport, RunError> {
    Ok(serde_json::from_str(text)?)
}

/// CSV with a header row; numbers use the shortest round-trip form.
pub fn table_to_csv(table: &IdentityTable) -> Result<String, RunError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.columns)?;
    for row in &table.rows {
        let index = std::iter::once((row[0] as usize).to_string());
        w.write_record(index.chain(row[1..].iter().map(|v| format!("{v:?}"))))?;
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_file(path: &std::path::Path, contents: &str) -> Result<(), RunError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| RunError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| RunError::Write {
        path: path.to_path_buf(),
        source,
    })
}
