use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::sampling::{sample_map, SamplePlan};
use super::{CheckResult, HarnessError, TolerancePolicy, VerificationReport};
use crate::families::{build_immersion_with, CliffordBlock, FamilySpec, GenHelicoidASpec, SpecError};
use crate::geom::ParamBox;
use crate::identities::{
    helicoid_algebra, lemma_magic_residuals, proof_terms, theta_harmonicity, IdentityError,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdentityCheck {
    /// Clifford-torus identities; needs a `clifford_torus` family.
    Lemma,
    /// Metric assembly, determinant factorization and inverse metric of a
    /// `gen_helicoid_a` family.
    HelicoidAlgebra,
    ThetaHarmonicity,
    /// Six-piece decomposition of the Laplacian of one ray block.
    ProofTerms,
}

impl IdentityCheck {
    pub const ALL: [IdentityCheck; 4] = [
        IdentityCheck::Lemma,
        IdentityCheck::HelicoidAlgebra,
        IdentityCheck::ThetaHarmonicity,
        IdentityCheck::ProofTerms,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityCheck::Lemma => "lemma",
            IdentityCheck::HelicoidAlgebra => "helicoid-algebra",
            IdentityCheck::ThetaHarmonicity => "theta-harmonicity",
            IdentityCheck::ProofTerms => "proof-terms",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    fn columns(self, blocks: &[usize]) -> Vec<String> {
        let fixed = |names: &[&str]| names.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        match self {
            IdentityCheck::Lemma => fixed(&["res_a", "res_b", "res_c", "res_d", "res_e", "res_e_split", "d_dot_jc"]),
            IdentityCheck::HelicoidAlgebra => fixed(&[
                "metric_defect",
                "det_defect",
                "p_defect",
                "sqrt_g_defect",
                "inverse_defect",
                "inverse_defect_literal",
            ]),
            IdentityCheck::ThetaHarmonicity => fixed(&["theta_laplacian", "theta_relative", "block_divergence"]),
            IdentityCheck::ProofTerms => blocks
                .iter()
                .flat_map(|t| {
                    ["sum_cancel", "operator_defect", "term_defect", "cross_defect"]
                        .into_iter()
                        .map(move |c| format!("{c}_{}", t + 1))
                })
                .collect(),
        }
    }
}

/// Per-point residual table; the first column is the point index.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl IdentityTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

enum Subject<'a> {
    Torus(&'a CliffordBlock),
    Helicoid(&'a GenHelicoidASpec),
}

fn excluded_or<T>(r: Result<T, IdentityError>) -> Result<Option<T>, HarnessError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_exclusion() => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn not_applicable(check: IdentityCheck, spec: &FamilySpec) -> HarnessError {
    let needs = match check {
        IdentityCheck::Lemma => "clifford_torus",
        _ => "gen_helicoid_a",
    };
    HarnessError::NotApplicable {
        check: check.name().into(),
        reason: format!("needs a `{needs}` family, got `{}`", spec.kind()),
    }
}

/// Evaluates the requested identity checks at the same sampled points.
///
/// `proof_block` restricts the proof-term check to one ray block (zero
/// based); by default every block is checked.
pub fn run_identity_checks(
    spec: &FamilySpec,
    checks: &[IdentityCheck],
    plan: &SamplePlan,
    tol: &TolerancePolicy,
    proof_block: Option<usize>,
) -> Result<(VerificationReport, IdentityTable), HarnessError> {
    let start = Instant::now();
    if checks.is_empty() {
        return Err(HarnessError::InvalidPlan("no identity checks requested".into()));
    }
    spec.validate()?;
    plan.validate()?;
    tol.validate()?;
    let subject = match spec {
        FamilySpec::CliffordTorus { block } => Subject::Torus(block),
        FamilySpec::GenHelicoidA(a) => Subject::Helicoid(a),
        _ => return Err(not_applicable(checks[0], spec)),
    };
    for &c in checks {
        let ok = matches!(
            (&subject, c),
            (Subject::Torus(_), IdentityCheck::Lemma) | (Subject::Helicoid(_), IdentityCheck::HelicoidAlgebra)
                | (Subject::Helicoid(_), IdentityCheck::ThetaHarmonicity)
                | (Subject::Helicoid(_), IdentityCheck::ProofTerms)
        );
        if !ok {
            return Err(not_applicable(c, spec));
        }
    }
    let blocks: Vec<usize> = match (&subject, proof_block) {
        (Subject::Helicoid(a), Some(t)) if t >= a.rays() => {
            return Err(SpecError::invalid("proof_block", format!("{t} out of range for {} blocks", a.rays())).into())
        }
        (Subject::Helicoid(_), Some(t)) => vec![t],
        (Subject::Helicoid(a), None) => (0..a.rays()).collect(),
        (Subject::Torus(_), _) => Vec::new(),
    };

    let imm = build_immersion_with(spec, &plan.exclusion)?;
    let b: ParamBox = plan.resolve_box(&imm.domain)?;

    let sampled = sample_map(plan, &b, |p, _| {
        if imm.exclusion(p).is_some() {
            return Ok(None);
        }
        let mut row = Vec::new();
        for &c in checks {
            let part = match (&subject, c) {
                (Subject::Torus(block), IdentityCheck::Lemma) => {
                    let Some(r) = excluded_or(lemma_magic_residuals(block, p))? else {
                        return Ok(None);
                    };
                    vec![r.res_a1.max(r.res_a2), r.res_b, r.res_c, r.res_d, r.res_e, r.res_e_split, r.d_dot_jc]
                }
                (Subject::Helicoid(a), IdentityCheck::HelicoidAlgebra) => {
                    let Some(h) = excluded_or(helicoid_algebra(a, p))? else {
                        return Ok(None);
                    };
                    vec![
                        h.metric_defect,
                        h.det_defect,
                        h.p_defect,
                        h.sqrt_g_defect,
                        h.inverse_defect,
                        h.inverse_defect_literal,
                    ]
                }
                (Subject::Helicoid(a), IdentityCheck::ThetaHarmonicity) => {
                    let Some(h) = excluded_or(theta_harmonicity(a, p))? else {
                        return Ok(None);
                    };
                    vec![h.laplacian.abs(), h.relative, h.block_defect]
                }
                (Subject::Helicoid(a), IdentityCheck::ProofTerms) => {
                    let mut v = Vec::new();
                    for &t in &blocks {
                        let Some(pt) = excluded_or(proof_terms(a, t, p))? else {
                            return Ok(None);
                        };
                        v.extend([pt.sum_norm, pt.operator_defect, pt.max_term_defect(), pt.cross_defect]);
                    }
                    v
                }
                _ => unreachable!("checked above"),
            };
            row.extend(part);
        }
        Ok(Some(row))
    })?;

    let mut columns = vec!["point".to_string()];
    for &c in checks {
        columns.extend(c.columns(&blocks));
    }
    let rows: Vec<Vec<f64>> = sampled
        .values
        .iter()
        .enumerate()
        .map(|(i, (_, r))| std::iter::once(i as f64).chain(r.iter().copied()).collect())
        .collect();
    let table = IdentityTable { columns, rows };

    let ex = sampled.excluded;
    let mut report = VerificationReport::new(spec.clone(), plan.clone(), *tol);
    let mut push = |name: String, col: &str, t: f64| {
        let values = table.column(col).expect("column registered");
        report.checks.push(CheckResult::positive(&name, &values, ex, t));
    };
    for &c in checks {
        match c {
            IdentityCheck::Lemma => {
                for (col, label) in [("res_a", "a"), ("res_b", "b"), ("res_c", "c"), ("res_d", "d"), ("res_e", "e")] {
                    push(format!("lemma-{label}"), col, tol.tol_identity);
                }
            }
            IdentityCheck::HelicoidAlgebra => {
                push("metric-blocks".into(), "metric_defect", tol.tol_identity);
                push("det-factorization".into(), "det_defect", tol.tol_identity);
                push("sqrt-det".into(), "sqrt_g_defect", tol.tol_identity);
                push("inverse-metric".into(), "inverse_defect", tol.tol_identity);
            }
            IdentityCheck::ThetaHarmonicity => {
                push("theta-harmonicity".into(), "theta_laplacian", tol.tol_harmonic);
                push("block-divergence".into(), "block_divergence", tol.tol_harmonic);
            }
            IdentityCheck::ProofTerms => {
                for &t in &blocks {
                    let k = t + 1;
                    push(format!("proof-cancellation-{k}"), &format!("sum_cancel_{k}"), tol.tol_harmonic);
                    push(format!("proof-operator-{k}"), &format!("operator_defect_{k}"), tol.tol_operator);
                    push(format!("proof-terms-{k}"), &format!("term_defect_{k}"), tol.tol_operator);
                    push(format!("proof-cross-{k}"), &format!("cross_defect_{k}"), tol.tol_operator);
                }
            }
        }
    }
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok((report, table))
}
