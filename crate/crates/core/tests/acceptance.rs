//! Acceptance suite: eight criteria, each reported as one PASS/FAIL line.
//!
//! Run with `cargo test -p minvar-core --test acceptance -- --nocapture` to
//! see the table.

use std::time::Instant;

use minvar_core::derivkit::StepPolicy;
use minvar_core::families::{
    build_immersion, choe_hoppe_graph_residual, clifford_frame, random_unitary, ChartKind, CliffordBlock,
    FamilySpec, GenHelicoidASpec, PitchVector, SpecError, SphereChart,
};
use minvar_core::geom::{mean_curvature, sphere_minimality_residual};
use minvar_core::harness::{
    draw_point, point_stream, run_identity_checks, sample_map, takahashi_equivalence, verify_cone_scaling,
    verify_minimality, verify_screw_invariance, HarnessError, IdentityCheck, SamplePlan, TolerancePolicy, Verdict,
    VerificationReport,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_2024;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Self {
            passed: true,
            detail: String::new(),
        }
    }

    fn require(&mut self, ok: bool, what: impl AsRef<str>) {
        if !ok {
            self.passed = false;
            if !self.detail.is_empty() {
                self.detail.push_str("; ");
            }
            self.detail.push_str(what.as_ref());
        }
    }

    fn require_report(&mut self, label: &str, r: &VerificationReport) {
        for c in &r.checks {
            self.require(
                c.matches_expectation(),
                format!("{label}: {} {:?} max {:.2e}", c.name, c.verdict, c.max_residual),
            );
        }
    }
}

fn signed(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let v = rng.random_range(lo..hi);
    if rng.random_bool(0.5) {
        v
    } else {
        -v
    }
}

fn random_pitch(rng: &mut ChaCha8Rng, rays: usize) -> PitchVector {
    let lambda0 = signed(rng, 0.2, 2.0);
    let lambdas = (0..rays).map(|_| signed(rng, 0.3, 2.5)).collect();
    PitchVector::new(lambda0, lambdas)
}

fn worst(r: &VerificationReport, name: &str) -> f64 {
    r.check(name).map_or(f64::INFINITY, |c| c.max_residual)
}

fn plan(count: usize, seed: u64) -> SamplePlan {
    SamplePlan::new(count, seed)
}

/// Generalized helicoids with one torus per ray block.
fn criterion_1() -> Outcome {
    let tol = TolerancePolicy::default();
    let mut out = Outcome::new();
    let mut rng = point_stream(SEED, 1);
    let mut max_h: f64 = 0.0;
    let mut max_time: f64 = 0.0;
    for l in 1..=3 {
        for n in 0..=2 {
            let start = Instant::now();
            for k in 0..3 {
                let spec = FamilySpec::gen_helicoid_a(random_pitch(&mut rng, l), n);
                let r = verify_minimality(&spec, &plan(1000, SEED + k), &tol).unwrap();
                out.require_report(&format!("L={l} N={n}"), &r);
                max_h = max_h.max(worst(&r, "minimality"));
            }
            let secs = start.elapsed().as_secs_f64();
            max_time = max_time.max(secs);
            out.require(secs <= 60.0, format!("L={l} N={n} took {secs:.1} s"));
        }
    }
    out.detail = format!("max |H| {max_h:.2e}, slowest (L,N) {max_time:.2} s. {}", out.detail);
    out
}

/// Single-torus helicoids and multi-ray Clifford cones.
fn criterion_2() -> Outcome {
    let tol = TolerancePolicy::default();
    let mut out = Outcome::new();
    let mut rng = point_stream(SEED, 2);
    let mut max_h: f64 = 0.0;
    for l in 1..=3 {
        for n in 0..=2 {
            for k in 0..3 {
                let pitch = random_pitch(&mut rng, 1);
                let spec = FamilySpec::GenHelicoidB {
                    lambda: pitch.lambdas[0],
                    lambda0: pitch.lambda0,
                    rays: l,
                    block: CliffordBlock::new(n),
                };
                let r = verify_minimality(&spec, &plan(1000, SEED + k), &tol).unwrap();
                out.require_report(&format!("B L={l} N={n}"), &r);
                max_h = max_h.max(worst(&r, "minimality"));
            }
            if n >= 1 {
                let spec = FamilySpec::LRaysCliffordCone {
                    rays: l,
                    block: CliffordBlock::new(n),
                };
                let r = verify_minimality(&spec, &plan(1000, SEED), &tol).unwrap();
                out.require_report(&format!("cone L={l} N={n}"), &r);
                max_h = max_h.max(worst(&r, "minimality"));
            }
        }
    }
    out.detail = format!("max |H| {max_h:.2e}. {}", out.detail);
    out
}

/// Clifford-torus identities plus the N = 1 trigonometric closed forms.
fn criterion_3() -> Outcome {
    let tol = TolerancePolicy::default();
    let mut out = Outcome::new();
    let mut rng = point_stream(SEED, 3);
    let mut max_res: f64 = 0.0;
    for n in 1..=3 {
        for kind in [ChartKind::Stereographic, ChartKind::Trigonometric] {
            for rotated in [false, true] {
                let mut block = CliffordBlock::with_kind(n, kind);
                if rotated {
                    block = block.with_unitary(random_unitary(n + 1, &mut rng));
                }
                let spec = FamilySpec::CliffordTorus { block };
                let (r, _) = run_identity_checks(&spec, &[IdentityCheck::Lemma], &plan(1000, SEED), &tol, None).unwrap();
                out.require_report(&format!("N={n} {kind:?} rotated={rotated}"), &r);
                max_res = r.checks.iter().fold(max_res, |m, c| m.max(c.max_residual));
            }
        }
    }
    let block = CliffordBlock::with_kind(1, ChartKind::Trigonometric);
    let mut closed: f64 = 0.0;
    for i in 0..1000 {
        let u = draw_point(&minvar_core::geom::ParamBox(block.default_box()), &mut point_stream(SEED + 3, i));
        let f = clifford_frame(&block, &u).unwrap();
        let d = u[0] - u[1];
        closed = closed.max((f.d_dot_jc + d.cos()).abs());
        for w in &f.w {
            closed = closed.max((w - 0.5 * d.sin()).abs());
        }
    }
    out.require(closed <= 1e-12, format!("N=1 closed forms off by {closed:.2e}"));
    out.detail = format!("max residual {max_res:.2e}, closed forms {closed:.2e}. {}", out.detail);
    out
}

/// Metric algebra, harmonicity of the axial coordinate and the six-term
/// cancellation for generalized helicoids.
fn criterion_4() -> Outcome {
    let tol = TolerancePolicy::default();
    let mut out = Outcome::new();
    let mut rng = point_stream(SEED, 4);
    let checks = [
        IdentityCheck::HelicoidAlgebra,
        IdentityCheck::ThetaHarmonicity,
        IdentityCheck::ProofTerms,
    ];
    let mut worst_by: std::collections::BTreeMap<&str, f64> = Default::default();
    for l in 1..=2 {
        for n in 1..=2 {
            let spec = FamilySpec::gen_helicoid_a(random_pitch(&mut rng, l), n);
            let (r, _) = run_identity_checks(&spec, &checks, &plan(200, SEED), &tol, None).unwrap();
            out.require_report(&format!("L={l} N={n}"), &r);
            for (key, name) in [
                ("det", "det-factorization".to_string()),
                ("inverse", "inverse-metric".to_string()),
                ("theta", "theta-harmonicity".to_string()),
            ]
            .into_iter()
            .chain((1..=l).map(|t| ("cancel", format!("proof-cancellation-{t}"))))
            {
                let e = worst_by.entry(key).or_insert(0.0);
                *e = e.max(worst(&r, &name));
            }
        }
    }
    out.require(worst_by["det"] <= 1e-9, "determinant factorization");
    out.require(worst_by["inverse"] <= 1e-9, "inverse metric");
    out.require(worst_by["theta"] <= 1e-8, "theta harmonicity");
    out.require(worst_by["cancel"] <= 1e-8, "six-term cancellation");
    let parts: Vec<String> = worst_by.iter().map(|(k, v)| format!("{k} {v:.2e}")).collect();
    out.detail = format!("{}. {}", parts.join(", "), out.detail);
    out
}

/// Three-way equivalence for spherical bases, positive and negative.
fn criterion_5() -> Outcome {
    let tol = TolerancePolicy::default();
    let mut out = Outcome::new();
    let mut summary = Vec::new();
    for (base, rays, minimal) in [
        (FamilySpec::equator(), 2, true),
        (FamilySpec::clifford_torus(1), 3, true),
        (FamilySpec::LatitudeCircle { height: 0.5 }, 2, false),
    ] {
        let t = takahashi_equivalence(&base, rays, &plan(500, SEED), &tol).unwrap();
        out.require(t.agree, format!("{} verdicts disagree", base.kind()));
        for c in &t.report.checks {
            if minimal {
                out.require(c.verdict == Verdict::Pass, format!("{} {} not PASS", base.kind(), c.name));
            } else {
                out.require(
                    c.verdict == Verdict::FailExpected && c.min_residual >= 0.1,
                    format!("{} {} min {:.2e}", base.kind(), c.name, c.min_residual),
                );
            }
        }
        let extreme = if minimal {
            t.report.checks.iter().map(|c| c.max_residual).fold(0.0, f64::max)
        } else {
            t.report.checks.iter().map(|c| c.min_residual).fold(f64::INFINITY, f64::min)
        };
        summary.push(format!("{} {:.2e}", base.kind(), extreme));
    }
    out.detail = format!("{}. {}", summary.join(", "), out.detail);
    out
}

/// Graph form of the interleaved helicoid solves the minimal surface equation.
fn criterion_6() -> Outcome {
    let mut out = Outcome::new();
    let mut max_res: f64 = 0.0;
    for n in 1..=3 {
        let b = minvar_core::geom::ParamBox(vec![(-2.0, 2.0); 2 * n]);
        let s = sample_map(&plan(1000, SEED + n as u64), &b, |x, _| match choe_hoppe_graph_residual(n, x) {
            Ok(r) => Ok(Some(r.abs())),
            Err(SpecError::BranchLocus { .. }) => Ok(None),
            Err(e) => Err(HarnessError::from(e)),
        })
        .unwrap();
        let m = s.values.iter().map(|(_, r)| *r).fold(0.0, f64::max);
        out.require(m <= 1e-8, format!("N={n} residual {m:.2e}"));
        max_res = max_res.max(m);
    }
    out.detail = format!("max residual {max_res:.2e}. {}", out.detail);
    out
}

/// Screw invariance, cone scaling, Lawson and Harvey–Lawson instances.
fn criterion_7() -> Outcome {
    let tol = TolerancePolicy::default();
    let mut out = Outcome::new();
    let p = plan(1000, SEED);
    let mut rng = point_stream(SEED, 7);
    let mut screw: f64 = 0.0;
    for spec in [
        FamilySpec::gen_helicoid_a(random_pitch(&mut rng, 2), 1),
        FamilySpec::GenHelicoidB {
            lambda: 1.3,
            lambda0: -0.4,
            rays: 3,
            block: CliffordBlock::new(1),
        },
        FamilySpec::ChoeHoppe {
            n: 3,
            lambda: 0.9,
            chart_p: SphereChart::default(),
            chart_q: SphereChart::default(),
        },
        FamilySpec::Bdj {
            pitch: random_pitch(&mut rng, 3),
        },
    ] {
        let r = verify_screw_invariance(&spec, &p, &tol).unwrap();
        out.require_report(spec.kind(), &r);
        screw = screw.max(worst(&r, "screw-invariance"));
    }
    let mut scaling: f64 = 0.0;
    for spec in [
        FamilySpec::LRaysCliffordCone {
            rays: 2,
            block: CliffordBlock::new(1),
        },
        FamilySpec::GenHelicoidA(GenHelicoidASpec::standard(
            PitchVector::new(0.0, vec![1.2, -0.8]),
            1,
            ChartKind::Stereographic,
        )),
        FamilySpec::HarveyLawsonCone {
            n: 2,
            chart_x: SphereChart::default(),
            chart_y: SphereChart::default(),
        },
    ] {
        let r = verify_cone_scaling(&spec, &p, &tol).unwrap();
        out.require_report(spec.kind(), &r);
        scaling = scaling.max(worst(&r, "cone-scaling"));
    }
    let lawson = build_immersion(&FamilySpec::LawsonSurface {
        lambda1: 1.0,
        lambda2: 2.0,
    })
    .unwrap();
    let lawson_res = sample_map(&p, &lawson.domain, |u, _| Ok(Some(sphere_minimality_residual(&lawson, u, 2)?)))
        .unwrap()
        .values
        .iter()
        .map(|(_, r)| *r)
        .fold(0.0, f64::max);
    out.require(lawson_res <= 1e-9, format!("Lawson residual {lawson_res:.2e}"));
    let hl = build_immersion(&FamilySpec::HarveyLawsonCone {
        n: 1,
        chart_x: SphereChart::default(),
        chart_y: SphereChart::default(),
    })
    .unwrap();
    let hl_res = sample_map(&p, &hl.domain, |u, _| {
        if hl.exclusion(u).is_some() {
            return Ok(None);
        }
        Ok(Some(mean_curvature(&hl, u)?.h_norm))
    })
    .unwrap()
    .values
    .iter()
    .map(|(_, r)| *r)
    .fold(0.0, f64::max);
    out.require(hl_res <= 1e-8, format!("Harvey-Lawson |H| {hl_res:.2e}"));
    out.require(screw <= 1e-12 && scaling <= 1e-12, "symmetry defects above 1e-12");
    out.detail = format!(
        "screw {screw:.2e}, scaling {scaling:.2e}, Lawson {lawson_res:.2e}, Harvey-Lawson {hl_res:.2e}. {}",
        out.detail
    );
    out
}

/// Jets agree with finite differences, the two Laplacians agree, and the
/// negative controls fail.
fn criterion_8() -> Outcome {
    let tol = TolerancePolicy::default();
    let mut out = Outcome::new();
    let policy = StepPolicy::default();
    let mut rng = point_stream(SEED, 8);
    let mut fd_err: f64 = 0.0;
    let mut forms: f64 = 0.0;
    for spec in minvar_core::harness::default_campaign()
        .into_iter()
        .chain([FamilySpec::gen_helicoid_a(random_pitch(&mut rng, 3), 2)])
    {
        let imm = build_immersion(&spec).unwrap();
        let s = sample_map(&plan(50, SEED), &imm.domain, |u, _| {
            if imm.exclusion(u).is_some() {
                return Ok(None);
            }
            let jet = imm.eval(u)?;
            let fd = imm.eval_fd(u, &policy)?;
            let scale = 1.0 + jet.jacobian.amax();
            let mut e = (&jet.jacobian - &fd.jacobian).amax() / scale;
            for (a, b) in jet.second.iter().zip(&fd.second) {
                e = e.max((a - b).amax() / (1.0 + a.amax()));
            }
            Ok(Some(e))
        })
        .unwrap();
        let m = s.values.iter().map(|(_, e)| *e).fold(0.0, f64::max);
        out.require(m <= 1e-5, format!("{} jet vs FD {m:.2e}", spec.kind()));
        fd_err = fd_err.max(m);
        let r = verify_minimality(&spec, &plan(200, SEED), &tol).unwrap();
        forms = forms.max(worst(&r, "laplacian-forms"));
        out.require_report(spec.kind(), &r);
    }
    out.require(forms <= 1e-8, format!("Laplacian forms differ by {forms:.2e}"));

    let cylinder = build_immersion(&FamilySpec::Cylinder { radius: 1.0 }).unwrap();
    let mut cyl: f64 = 0.0;
    for i in 0..200 {
        let u = draw_point(&cylinder.domain, &mut point_stream(SEED, i));
        cyl = cyl.max((mean_curvature(&cylinder, &u).unwrap().h_norm - 1.0).abs());
    }
    out.require(cyl <= 1e-3, format!("cylinder |H| off by {cyl:.2e}"));
    let mut controls = Vec::new();
    for spec in [FamilySpec::Cylinder { radius: 1.0 }, FamilySpec::LatitudeCircle { height: 0.5 }] {
        let r = verify_minimality(&spec, &plan(200, SEED), &tol).unwrap();
        let c = r.check("minimality").unwrap();
        out.require(c.verdict == Verdict::FailExpected, format!("{} verdict {:?}", spec.kind(), c.verdict));
        controls.push(format!("{} {:.3}", spec.kind(), c.min_residual));
    }
    out.detail = format!(
        "jet vs FD {fd_err:.2e}, forms {forms:.2e}, cylinder |H|-1 {cyl:.1e}, controls {}. {}",
        controls.join(", "),
        out.detail
    );
    out
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 helicoids with one torus per block are minimal", criterion_1),
        ("2 single-torus helicoids and Clifford cones are minimal", criterion_2),
        ("3 Clifford-torus identities", criterion_3),
        ("4 helicoid metric algebra and cancellation", criterion_4),
        ("5 sphere/join/cone equivalence", criterion_5),
        ("6 graph minimal surface equation", criterion_6),
        ("7 symmetry suite", criterion_7),
        ("8 engine self-consistency and negative controls", criterion_8),
    ];
    let mut failed = Vec::new();
    println!();
    for (name, run) in criteria {
        let start = Instant::now();
        let o = run();
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!(
            "[{status}] criterion {name} ({:.1} s): {}",
            start.elapsed().as_secs_f64(),
            o.detail.trim_end_matches(". ").trim_end()
        );
        if !o.passed {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
