use std::f64::consts::TAU;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sampling::{sample_map, SamplePlan};
use super::{CheckResult, Expectation, HarnessError, TolerancePolicy, VerificationReport};
use crate::families::{
    apply_screw, build_immersion_with, ChartKind, CliffordBlock, FamilySpec, PitchVector, SphereChart, SpecError,
};
use crate::geom::{
    laplace_beltrami_divergence_at, mean_curvature_at, metric_with_tol, GeomError, Immersion, MetricEval,
    ParamBox, PointEval, Target,
};

/// Jet evaluation and metric at `p`, or `None` when `p` is excluded.
fn eval_point(imm: &Immersion, p: &[f64]) -> Result<Option<(PointEval, MetricEval)>, HarnessError> {
    if imm.exclusion(p).is_some() {
        return Ok(None);
    }
    let attempt = imm
        .eval(p)
        .and_then(|pe| metric_with_tol(&pe, imm.rank_tol).map(|m| (pe, m)));
    match attempt {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_exclusion() => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn prepare(spec: &FamilySpec, plan: &SamplePlan, tol: &TolerancePolicy) -> Result<(Immersion, ParamBox), HarnessError> {
    spec.validate()?;
    plan.validate()?;
    tol.validate()?;
    let imm = build_immersion_with(spec, &plan.exclusion)?;
    let b = plan.resolve_box(&imm.domain)?;
    Ok((imm, b))
}

fn expectation_of(spec: &FamilySpec) -> Expectation {
    if spec.expect_minimal() {
        Expectation::Pass
    } else {
        Expectation::Fail
    }
}

struct MinimalityRow {
    minimality: f64,
    normality: f64,
    forms: f64,
}

/// Samples `plan.count` admissible points and checks that the mean curvature
/// vanishes (in the unit sphere for spherical families).
///
/// Residuals are normalized by `1 + |dF|²` so cones sampled far from the
/// vertex do not look artificially flat.
pub fn verify_minimality(
    spec: &FamilySpec,
    plan: &SamplePlan,
    tol: &TolerancePolicy,
) -> Result<VerificationReport, HarnessError> {
    let start = Instant::now();
    let (imm, b) = prepare(spec, plan, tol)?;
    let spherical = imm.traits.target == Target::UnitSphere;
    let n = imm.param_dim() as f64;
    let sampled = sample_map(plan, &b, |p, _| {
        let Some((pe, m)) = eval_point(&imm, p)? else {
            return Ok(None);
        };
        let jac = 1.0 + pe.jacobian.norm_squared();
        let mc = mean_curvature_at(&pe, &m);
        let raw = if spherical {
            let norm = pe.position.norm();
            if (norm - 1.0).abs() > crate::geom::SPHERE_TOL {
                return Err(GeomError::NotSpherical { norm }.into());
            }
            (&pe.position * n + &mc.h).norm()
        } else {
            mc.h_norm
        };
        let divergence = match laplace_beltrami_divergence_at(&pe) {
            Ok(h) => h,
            Err(e) if e.is_exclusion() => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        Ok(Some(MinimalityRow {
            minimality: raw / jac,
            normality: mc.tangential_residual / (1.0 + mc.h_norm + pe.position.norm()),
            forms: (&mc.h - divergence).norm() / jac,
        }))
    })?;
    let col = |f: fn(&MinimalityRow) -> f64| -> Vec<f64> { sampled.values.iter().map(|(_, r)| f(r)).collect() };
    let ex = sampled.excluded;
    let mut report = VerificationReport::new(spec.clone(), plan.clone(), *tol);
    report.checks.push(CheckResult::build(
        "minimality",
        &col(|r| r.minimality),
        ex,
        tol.tol_h,
        expectation_of(spec),
        tol.tol_negative,
    ));
    report
        .checks
        .push(CheckResult::positive("normality", &col(|r| r.normality), ex, tol.tol_tangent));
    report
        .checks
        .push(CheckResult::positive("laplacian-forms", &col(|r| r.forms), ex, tol.tol_h));
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Outcome of the three equivalent minimality statements for a spherical
/// base `Σ`: `Σ` minimal in its sphere, its spherical join minimal in the
/// big sphere, its `L`-rays cone minimal in Euclidean space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TakahashiReport {
    pub rays: usize,
    /// Checks named `sphere`, `join` and `cone`, in that order.
    pub report: VerificationReport,
    /// All three verdicts are PASS, or none is.
    pub agree: bool,
}

impl TakahashiReport {
    pub fn passed(&self) -> bool {
        self.agree && self.report.all_match_expectation()
    }
}

fn spherical_residuals(spec: &FamilySpec, plan: &SamplePlan) -> Result<(Vec<f64>, usize), HarnessError> {
    let imm = build_immersion_with(spec, &plan.exclusion)?;
    let b = plan.resolve_box(&imm.domain)?;
    let n = imm.param_dim();
    let s = sample_map(plan, &b, |p, _| {
        let Some((pe, m)) = eval_point(&imm, p)? else {
            return Ok(None);
        };
        Ok(Some(crate::geom::sphere_minimality_residual_at(&pe, &m, n)?))
    })?;
    Ok((s.values.into_iter().map(|(_, r)| r).collect(), s.excluded))
}

/// `|H| |F|` on the cone, which is invariant under scaling.
fn cone_residuals(spec: &FamilySpec, plan: &SamplePlan) -> Result<(Vec<f64>, usize), HarnessError> {
    let imm = build_immersion_with(spec, &plan.exclusion)?;
    let b = plan.resolve_box(&imm.domain)?;
    let s = sample_map(plan, &b, |p, _| {
        let Some((pe, m)) = eval_point(&imm, p)? else {
            return Ok(None);
        };
        Ok(Some(mean_curvature_at(&pe, &m).h_norm * pe.position.norm()))
    })?;
    Ok((s.values.into_iter().map(|(_, r)| r).collect(), s.excluded))
}

/// Evaluates the three equivalent statements for `base` with `rays` rays.
///
/// The plan's box, if any, applies to the base only; the join and cone use
/// their default boxes.
pub fn takahashi_equivalence(
    base: &FamilySpec,
    rays: usize,
    plan: &SamplePlan,
    tol: &TolerancePolicy,
) -> Result<TakahashiReport, HarnessError> {
    let start = Instant::now();
    base.validate()?;
    plan.validate()?;
    tol.validate()?;
    if !base.is_spherical() {
        let imm = build_immersion_with(base, &plan.exclusion)?;
        let norm = imm.position(&imm.domain.midpoint())?.iter().map(|x| x * x).sum::<f64>().sqrt();
        return Err(GeomError::NotSpherical { norm }.into());
    }
    let join = FamilySpec::SphericalJoin {
        rays,
        chart: SphereChart::default(),
        base: Box::new(base.clone()),
    };
    let cone = FamilySpec::LRaysCone {
        rays,
        base: Box::new(base.clone()),
    };
    join.validate()?;
    cone.validate()?;
    let unboxed = SamplePlan {
        sample_box: None,
        ..plan.clone()
    };

    let expectation = expectation_of(base);
    let statement = |name: &str, (res, ex): (Vec<f64>, usize)| {
        CheckResult::build(name, &res, ex, tol.tol_h, expectation, tol.tol_negative)
    };
    let mut report = VerificationReport::new(base.clone(), plan.clone(), *tol);
    report.checks.push(statement("sphere", spherical_residuals(base, plan)?));
    report.checks.push(statement("join", spherical_residuals(&join, &unboxed)?));
    report.checks.push(statement("cone", cone_residuals(&cone, &unboxed)?));
    let passes = report.checks.iter().filter(|c| c.verdict == super::Verdict::Pass).count();
    let agree = passes == 0 || passes == report.checks.len();
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(TakahashiReport { rays, report, agree })
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Checks `F(.., Θ + t, ..) = S_t F(.., Θ, ..)` for random `t ∈ [−2π, 2π]`.
pub fn verify_screw_invariance(
    spec: &FamilySpec,
    plan: &SamplePlan,
    tol: &TolerancePolicy,
) -> Result<VerificationReport, HarnessError> {
    let start = Instant::now();
    let (imm, b) = prepare(spec, plan, tol)?;
    let Some(sym) = imm.traits.screw.clone() else {
        return Err(HarnessError::NotApplicable {
            check: "screw".into(),
            reason: format!("`{}` has no screw symmetry", spec.kind()),
        });
    };
    let sampled = sample_map(plan, &b, |p, rng| {
        if imm.exclusion(p).is_some() {
            return Ok(None);
        }
        let t = rng.random_range(-TAU..=TAU);
        let f = imm.position(p)?;
        let mut shifted = p.to_vec();
        shifted[sym.theta_index] += t;
        let moved = apply_screw(&sym, t, &f)?;
        let direct = imm.position(&shifted)?;
        Ok(Some(sup_diff(&moved, &direct) / (1.0 + sup_norm(&f))))
    })?;
    let res: Vec<f64> = sampled.values.iter().map(|(_, r)| *r).collect();
    let mut report = VerificationReport::new(spec.clone(), plan.clone(), *tol);
    report
        .checks
        .push(CheckResult::positive("screw-invariance", &res, sampled.excluded, tol.tol_symmetry));
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Checks `F(s r) = s F(r)` along the radial parameters for random
/// `s ∈ [0.1, 10]`, then runs [`verify_minimality`].
pub fn verify_cone_scaling(
    spec: &FamilySpec,
    plan: &SamplePlan,
    tol: &TolerancePolicy,
) -> Result<VerificationReport, HarnessError> {
    let start = Instant::now();
    if !spec.is_cone() {
        return Err(SpecError::invalid(
            "family",
            format!("`{}` is not a cone; cone scaling needs a vanishing axial pitch", spec.kind()),
        )
        .into());
    }
    let (imm, b) = prepare(spec, plan, tol)?;
    let radial = imm.traits.radial_params.clone();
    let sampled = sample_map(plan, &b, |p, rng| {
        if imm.exclusion(p).is_some() {
            return Ok(None);
        }
        let s = rng.random_range(0.1..=10.0);
        let f = imm.position(p)?;
        let mut scaled = p.to_vec();
        for &i in &radial {
            scaled[i] *= s;
        }
        let expected: Vec<f64> = f.iter().map(|x| s * x).collect();
        let direct = imm.position(&scaled)?;
        Ok(Some(sup_diff(&expected, &direct) / (1.0 + sup_norm(&expected))))
    })?;
    let res: Vec<f64> = sampled.values.iter().map(|(_, r)| *r).collect();
    let mut report = VerificationReport::new(spec.clone(), plan.clone(), *tol);
    report
        .checks
        .push(CheckResult::positive("cone-scaling", &res, sampled.excluded, tol.tol_symmetry));
    report.wall_time_s = start.elapsed().as_secs_f64();
    report.merge(verify_minimality(spec, plan, tol)?);
    Ok(report)
}

/// Positive families from every construction plus the negative controls.
pub fn default_campaign() -> Vec<FamilySpec> {
    let torus = |n| CliffordBlock::new(n);
    vec![
        FamilySpec::clifford_torus(1),
        FamilySpec::CliffordCone { block: torus(2) },
        FamilySpec::LRaysCliffordCone { rays: 2, block: torus(1) },
        FamilySpec::SphericalJoin {
            rays: 2,
            chart: SphereChart::default(),
            base: Box::new(FamilySpec::clifford_torus(1)),
        },
        FamilySpec::gen_helicoid_a(PitchVector::new(0.7, vec![1.0, -1.3]), 1),
        FamilySpec::GenHelicoidA(crate::families::GenHelicoidASpec::standard(
            PitchVector::new(0.0, vec![1.5]),
            2,
            ChartKind::Trigonometric,
        )),
        FamilySpec::GenHelicoidB {
            lambda: 1.2,
            lambda0: 0.5,
            rays: 2,
            block: torus(1),
        },
        FamilySpec::ChoeHoppe {
            n: 2,
            lambda: 0.8,
            chart_p: SphereChart::default(),
            chart_q: SphereChart::default(),
        },
        FamilySpec::Bdj {
            pitch: PitchVector::new(1.0, vec![1.0, 2.0]),
        },
        FamilySpec::LawsonSurface {
            lambda1: 1.0,
            lambda2: 2.0,
        },
        FamilySpec::HarveyLawsonCone {
            n: 1,
            chart_x: SphereChart::default(),
            chart_y: SphereChart::default(),
        },
        FamilySpec::equator(),
        FamilySpec::LatitudeCircle { height: 0.5 },
        FamilySpec::Cylinder { radius: 1.0 },
    ]
}
