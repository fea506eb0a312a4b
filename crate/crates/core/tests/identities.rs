use minvar_core::families::{build_immersion, ChartKind, CliffordBlock, FamilySpec, GenHelicoidASpec, PitchVector};
use minvar_core::harness::{draw_point, point_stream};
use minvar_core::identities::{helicoid_algebra, lemma_magic_residuals, proof_terms, theta_harmonicity};

fn spec(lambda0: f64, lambdas: Vec<f64>, n: usize) -> GenHelicoidASpec {
    GenHelicoidASpec::standard(PitchVector::new(lambda0, lambdas), n, ChartKind::Stereographic)
}

fn admissible_points(a: &GenHelicoidASpec, count: usize) -> Vec<Vec<f64>> {
    let imm = build_immersion(&FamilySpec::GenHelicoidA(a.clone())).unwrap();
    (0..)
        .map(|i| draw_point(&imm.domain, &mut point_stream(11, i)))
        .filter(|p| imm.exclusion(p).is_none())
        .take(count)
        .collect()
}

#[test]
fn block_diagonal_inverse_is_exact_for_one_ray_only() {
    let one = spec(0.8, vec![1.3], 1);
    for p in admissible_points(&one, 20) {
        let h = helicoid_algebra(&one, &p).unwrap();
        assert!(h.inverse_defect_literal < 1e-10);
    }
    // with two rays the d d / P couplings between different blocks matter
    let two = spec(0.8, vec![1.3, -0.9], 1);
    let worst = admissible_points(&two, 20)
        .iter()
        .map(|p| helicoid_algebra(&two, p).unwrap())
        .inspect(|h| assert!(h.inverse_defect < 1e-10))
        .map(|h| h.inverse_defect_literal)
        .fold(0.0, f64::max);
    assert!(worst > 1e-3, "literal inverse defect {worst:e}");
}

#[test]
fn determinant_factorization_holds_without_axial_pitch() {
    let a = spec(0.0, vec![1.1, 0.6, -1.7], 2);
    for p in admissible_points(&a, 10) {
        let h = helicoid_algebra(&a, &p).unwrap();
        assert!(h.det_defect < 1e-10, "{:e}", h.det_defect);
        assert!(h.p_defect < 1e-12);
        assert!(theta_harmonicity(&a, &p).unwrap().block_defect < 1e-10);
    }
}

#[test]
fn each_closed_form_matches_its_operator_piece() {
    let a = spec(0.5, vec![1.2, -0.7, 2.0], 1);
    for p in admissible_points(&a, 10) {
        for t in 0..3 {
            let pt = proof_terms(&a, t, &p).unwrap();
            assert!(pt.max_term_defect() < 1e-10, "block {t}: {:?}", pt.term_defects);
            assert!(pt.cross_defect < 1e-10);
            assert!(pt.sum_norm < 1e-12);
        }
    }
    assert!(proof_terms(&a, 3, &admissible_points(&a, 1)[0]).is_err());
}

#[test]
fn lemma_needs_a_positive_dimension() {
    assert!(lemma_magic_residuals(&CliffordBlock::new(0), &[]).is_err());
    let r = lemma_magic_residuals(&CliffordBlock::with_kind(2, ChartKind::Trigonometric), &[1.0, 0.4, 2.0, -1.0]).unwrap();
    assert!(r.max() < 1e-12, "{r:?}");
}
