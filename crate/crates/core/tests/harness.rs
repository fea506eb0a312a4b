use minvar_core::families::{ChartKind, CliffordBlock, FamilySpec, GenHelicoidASpec, PitchVector, SpecError};
use minvar_core::harness::{
    default_campaign, takahashi_equivalence, verify_cone_scaling, verify_minimality, verify_screw_invariance,
    Expectation, HarnessError, SamplePlan, TolerancePolicy, Verdict,
};

fn tol() -> TolerancePolicy {
    TolerancePolicy::default()
}

#[test]
fn reports_are_reproducible_and_thread_count_independent() {
    let spec = FamilySpec::gen_helicoid_a(PitchVector::new(0.6, vec![1.0, -1.4]), 1);
    let plan = SamplePlan::new(300, 42);
    let a = verify_minimality(&spec, &plan, &tol()).unwrap();
    let b = verify_minimality(&spec, &plan, &tol()).unwrap();
    assert!(a.same_results(&b));
    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| verify_minimality(&spec, &plan, &tol()).unwrap());
    assert!(a.same_results(&serial));
    let other = verify_minimality(&spec, &SamplePlan::new(300, 43), &tol()).unwrap();
    assert!(!a.same_results(&other));
}

#[test]
fn default_campaign_has_falsifiable_members_and_all_match() {
    let campaign = default_campaign();
    let negatives = campaign.iter().filter(|s| !s.expect_minimal()).count();
    assert!(negatives >= 2);
    for spec in campaign {
        let r = verify_minimality(&spec, &SamplePlan::new(200, 7), &tol()).unwrap();
        let c = r.check("minimality").unwrap();
        let expected = if spec.expect_minimal() {
            (Expectation::Pass, Verdict::Pass)
        } else {
            (Expectation::Fail, Verdict::FailExpected)
        };
        assert_eq!((c.expectation, c.verdict), expected, "{} max {:e}", spec.kind(), c.max_residual);
        assert!(r.all_match_expectation(), "{}", spec.kind());
    }
}

#[test]
fn cylinder_control_reports_a_third() {
    // |H| = 1 and |dF|² = 2 at radius one
    let r = verify_minimality(&FamilySpec::Cylinder { radius: 1.0 }, &SamplePlan::new(50, 1), &tol()).unwrap();
    let c = r.check("minimality").unwrap();
    assert!((c.max_residual - 1.0 / 3.0).abs() < 1e-14);
    assert!((c.min_residual - 1.0 / 3.0).abs() < 1e-14);
}

#[test]
fn excluded_boxes_exhaust_sampling() {
    let spec = FamilySpec::GenHelicoidA(GenHelicoidASpec::standard(
        PitchVector::new(1.0, vec![1.0]),
        1,
        ChartKind::Stereographic,
    ));
    let plan = SamplePlan {
        max_rejects: 20,
        ..SamplePlan::new(10, 1)
    }
    .with_box(vec![(-1.0, 1.0), (-1.0, 1.0), (0.0, 1.0), (0.0, 1e-4)]);
    let err = verify_minimality(&spec, &plan, &tol()).unwrap_err();
    assert!(matches!(err, HarnessError::SamplingExhausted { .. }), "{err}");
}

#[test]
fn plan_box_must_match_the_family() {
    let plan = SamplePlan::new(10, 1).with_box(vec![(0.0, 1.0)]);
    let err = verify_minimality(&FamilySpec::clifford_torus(1), &plan, &tol()).unwrap_err();
    assert!(matches!(err, HarnessError::InvalidPlan(_)));
}

#[test]
fn cone_scaling_needs_a_cone() {
    let spec = FamilySpec::gen_helicoid_a(PitchVector::new(0.5, vec![1.0]), 1);
    let err = verify_cone_scaling(&spec, &SamplePlan::new(10, 1), &tol()).unwrap_err();
    assert!(matches!(err, HarnessError::Spec(SpecError::Invalid { .. })));
    let cone = FamilySpec::LRaysCliffordCone {
        rays: 2,
        block: CliffordBlock::new(1),
    };
    let r = verify_cone_scaling(&cone, &SamplePlan::new(100, 1), &tol()).unwrap();
    assert!(r.check("cone-scaling").is_some() && r.check("minimality").is_some());
    assert!(r.all_match_expectation());
}

#[test]
fn screw_check_needs_a_screw_symmetry() {
    let err = verify_screw_invariance(&FamilySpec::clifford_torus(1), &SamplePlan::new(10, 1), &tol()).unwrap_err();
    assert!(matches!(err, HarnessError::NotApplicable { .. }));
}

#[test]
fn takahashi_needs_a_spherical_base() {
    let err = takahashi_equivalence(&FamilySpec::Cylinder { radius: 1.0 }, 2, &SamplePlan::new(10, 1), &tol())
        .unwrap_err();
    assert!(matches!(
        err,
        HarnessError::Spec(_) | HarnessError::Geom(minvar_core::geom::GeomError::NotSpherical { .. })
    ));
}

#[test]
fn takahashi_statements_share_the_latitude_residual() {
    // height 0.5: every statement reports h / sqrt(1 - h²)
    let t = takahashi_equivalence(&FamilySpec::LatitudeCircle { height: 0.5 }, 2, &SamplePlan::new(100, 3), &tol())
        .unwrap();
    let expected = 0.5 / 0.75f64.sqrt();
    for c in &t.report.checks {
        assert!((c.min_residual - expected).abs() < 1e-12, "{} {}", c.name, c.min_residual);
        assert!((c.max_residual - expected).abs() < 1e-12, "{} {}", c.name, c.max_residual);
    }
    assert!(t.agree && t.passed());
}

#[test]
fn tolerances_are_validated() {
    let bad = TolerancePolicy {
        tol_h: 0.0,
        ..tol()
    };
    let err = verify_minimality(&FamilySpec::clifford_torus(1), &SamplePlan::new(10, 1), &bad).unwrap_err();
    assert!(matches!(err, HarnessError::InvalidTolerance(_)));
}
