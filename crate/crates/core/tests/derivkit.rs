use minvar_core::derivkit::{fd_jet, jet_eval, Jet1, Jet2, Scalar, StepPolicy};
use proptest::prelude::*;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

fn assert_jets_close(a: &Jet2, b: &Jet2, rel: f64) -> Result<(), TestCaseError> {
    prop_assert!(close(a.value(), b.value(), rel), "value {} vs {}", a.value(), b.value());
    for i in 0..a.dim() {
        prop_assert!(close(a.grad()[i], b.grad()[i], rel), "grad[{i}] {} vs {}", a.grad()[i], b.grad()[i]);
        for j in 0..a.dim() {
            prop_assert!(close(a.hess(i, j), b.hess(i, j), rel), "hess[{i}][{j}] {} vs {}", a.hess(i, j), b.hess(i, j));
        }
    }
    Ok(())
}

fn mixed<S: Scalar>(u: &[S]) -> S {
    let a = (u[0].clone() * u[1].clone()).sin();
    let b = u[2].exp() / (u[1].square() + 1.0);
    let c = (u[0].square() + u[2].square() + 1.0).sqrt().ln();
    a + b * c + u[0].powi(3) - u[1].atan2(&(u[2].clone() + 3.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jets_match_finite_differences(x in -1.5..1.5f64, y in -1.5..1.5f64, z in -1.5..1.5f64) {
        let p = [x, y, z];
        let jet = jet_eval(mixed, &p).unwrap();
        let fd = fd_jet(mixed, &p, &StepPolicy::default()).unwrap();
        assert_jets_close(&jet, &fd, 1e-6)?;
    }

    #[test]
    fn product_rule(x in -2.0..2.0f64, y in -2.0..2.0f64) {
        let p = [x, y];
        let f = |u: &[Jet2]| u[0].sin() * u[1].clone() + u[0].clone();
        let g = |u: &[Jet2]| (u[0].clone() * u[1].clone()).cos();
        let (fj, gj) = (jet_eval(f, &p).unwrap(), jet_eval(g, &p).unwrap());
        let prod = jet_eval(|u| f(u) * g(u), &p).unwrap();
        for i in 0..2 {
            let expect = fj.grad()[i] * gj.value() + fj.value() * gj.grad()[i];
            prop_assert!(close(prod.grad()[i], expect, 1e-13));
            for j in 0..2 {
                let expect = fj.hess(i, j) * gj.value()
                    + fj.grad()[i] * gj.grad()[j]
                    + fj.grad()[j] * gj.grad()[i]
                    + fj.value() * gj.hess(i, j);
                prop_assert!(close(prod.hess(i, j), expect, 1e-13));
            }
        }
    }

    #[test]
    fn chain_rule_through_exp(x in -1.0..1.0f64, y in -1.0..1.0f64) {
        // exp(g) has gradient exp(g) ∇g and Hessian exp(g) (∇²g + ∇g ∇gᵀ)
        let p = [x, y];
        let g = |u: &[Jet2]| u[0].square() * u[1].clone() - u[1].sin();
        let gj = jet_eval(g, &p).unwrap();
        let ej = jet_eval(|u| g(u).exp(), &p).unwrap();
        let e = gj.value().exp();
        for i in 0..2 {
            prop_assert!(close(ej.grad()[i], e * gj.grad()[i], 1e-13));
            for j in 0..2 {
                let expect = e * (gj.hess(i, j) + gj.grad()[i] * gj.grad()[j]);
                prop_assert!(close(ej.hess(i, j), expect, 1e-13));
            }
        }
    }

    #[test]
    fn first_order_jets_agree_with_second_order(x in -1.5..1.5f64, y in -1.5..1.5f64, z in -1.5..1.5f64) {
        let p = [x, y, z];
        let j2 = jet_eval(mixed, &p).unwrap();
        let seeds: Vec<Jet1> = p.iter().enumerate().map(|(i, &v)| Jet1::variable(3, i, v)).collect();
        let j1 = mixed(&seeds);
        prop_assert!(close(j1.value(), j2.value(), 1e-15));
        for i in 0..3 {
            prop_assert!(close(j1.grad()[i], j2.grad()[i], 1e-14));
        }
    }
}

#[test]
fn hessian_is_symmetric_and_exact_for_polynomials() {
    let jet = jet_eval(|u| u[0].powi(3) * u[1].clone() + u[1].square() * 4.0, &[2.0, -1.0]).unwrap();
    assert_eq!(jet.value(), -4.0);
    assert_eq!(jet.grad(), &[-12.0, 0.0]);
    assert_eq!(jet.hess(0, 0), -12.0);
    assert_eq!(jet.hess(0, 1), 12.0);
    assert_eq!(jet.hess(1, 0), 12.0);
    assert_eq!(jet.hess(1, 1), 8.0);
}

#[test]
fn richardson_beats_a_single_level() {
    let f = |u: &[f64]| (3.0 * u[0]).sin();
    let exact = -9.0 * (3.0 * 0.4f64).sin();
    let coarse = fd_jet(f, &[0.4], &StepPolicy::new(1e-2, 1)).unwrap();
    let fine = fd_jet(f, &[0.4], &StepPolicy::new(1e-2, 3)).unwrap();
    assert!((fine.hess(0, 0) - exact).abs() < 1e-3 * (coarse.hess(0, 0) - exact).abs());
}
