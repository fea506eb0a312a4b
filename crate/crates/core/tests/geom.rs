use minvar_core::derivkit::Scalar;
use minvar_core::families::{build_immersion, ChartKind, CliffordBlock, FamilySpec, PitchVector, SphereChart};
use minvar_core::geom::{
    laplace_beltrami, laplace_beltrami_divergence, mean_curvature, metric, sphere_minimality_residual, GeomError,
    Immersion, ParamBox, ParametricMap,
};
use proptest::prelude::*;

/// Enneper's surface, a classical minimal surface.
struct Enneper;

impl ParametricMap for Enneper {
    fn param_dim(&self) -> usize {
        2
    }
    fn ambient_dim(&self) -> usize {
        3
    }
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let (a, b) = (u[0].clone(), u[1].clone());
        vec![
            a.clone() - a.powi(3) / 3.0 + a.clone() * b.square(),
            b.clone() - b.powi(3) / 3.0 + b.clone() * a.square(),
            a.square() - b.square(),
        ]
    }
}

/// Graph of `z = x² + 2y² + xy³` under an invertible affine change of
/// parameters and an orthogonal change of ambient coordinates.
struct Bowl {
    reparam: [f64; 6],
    rotation: [[f64; 3]; 3],
}

impl Bowl {
    fn plain() -> Self {
        Self {
            reparam: [1.0, 0.0, 0.0, 1.0, 0.0, 0.0],
            rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }
}

impl ParametricMap for Bowl {
    fn param_dim(&self) -> usize {
        2
    }
    fn ambient_dim(&self) -> usize {
        3
    }
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let [a, b, c, d, e, f] = self.reparam;
        let x = u[0].clone() * a + u[1].clone() * b + e;
        let y = u[0].clone() * c + u[1].clone() * d + f;
        let z = x.square() + y.square() * 2.0 + x.clone() * y.powi(3);
        let p = [x, y, z];
        self.rotation
            .iter()
            .map(|row| p[0].clone() * row[0] + p[1].clone() * row[1] + p[2].clone() * row[2])
            .collect()
    }
}

fn rotation(a: f64, b: f64) -> [[f64; 3]; 3] {
    let (ca, sa, cb, sb) = (a.cos(), a.sin(), b.cos(), b.sin());
    // rotation about z by a, then about x by b
    let rz = [[ca, -sa, 0.0], [sa, ca, 0.0], [0.0, 0.0, 1.0]];
    let rx = [[1.0, 0.0, 0.0], [0.0, cb, -sb], [0.0, sb, cb]];
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| rx[i][k] * rz[k][j]).sum();
        }
    }
    out
}

#[test]
fn classical_helicoid_metric() {
    let spec = FamilySpec::Bdj {
        pitch: PitchVector::new(1.0, vec![1.0]),
    };
    let imm = build_immersion(&spec).unwrap();
    let m = metric(&imm.eval(&[0.3, 1.0]).unwrap()).unwrap();
    let expected = [[2.0, 0.0], [0.0, 1.0]];
    for i in 0..2 {
        for j in 0..2 {
            assert!((m.g[(i, j)] - expected[i][j]).abs() < 1e-15);
        }
    }
    assert!((m.det_g - 2.0).abs() < 1e-14);
}

#[test]
fn clifford_torus_metric_in_angle_chart() {
    let spec = FamilySpec::CliffordTorus {
        block: CliffordBlock::with_kind(1, ChartKind::Trigonometric),
    };
    let imm = build_immersion(&spec).unwrap();
    let m = metric(&imm.eval(&[0.9, -0.4]).unwrap()).unwrap();
    assert!((m.g[(0, 0)] - 0.5).abs() < 1e-15);
    assert!((m.g[(1, 1)] - 0.5).abs() < 1e-15);
    assert!(m.g[(0, 1)].abs() < 1e-15);
}

#[test]
fn round_sphere_laplacian_is_minus_two_f() {
    for chart in [SphereChart::default(), SphereChart::trigonometric()] {
        let imm = build_immersion(&FamilySpec::RoundSphere { dim: 2, chart }).unwrap();
        let p = [0.6, 1.1];
        let f = imm.position(&p).unwrap();
        let lap = laplace_beltrami(&imm, &p).unwrap();
        for k in 0..3 {
            assert!((lap[k] + 2.0 * f[k]).abs() < 1e-13, "component {k}");
        }
        assert!(sphere_minimality_residual(&imm, &p, 2).unwrap() < 1e-13);
    }
}

#[test]
fn cylinder_mean_curvature_is_inverse_radius() {
    let imm = build_immersion(&FamilySpec::Cylinder { radius: 2.0 }).unwrap();
    let h = mean_curvature(&imm, &[1.2, 0.5]).unwrap();
    assert!((h.h_norm - 0.5).abs() < 1e-14);
    assert!(h.tangential_residual < 1e-15);
}

#[test]
fn latitude_circle_residual_is_height_over_radius() {
    let height: f64 = 0.5;
    let imm = build_immersion(&FamilySpec::LatitudeCircle { height }).unwrap();
    let rho = (1.0 - height * height).sqrt();
    let r = sphere_minimality_residual(&imm, &[0.7], 1).unwrap();
    assert!((r - height / rho).abs() < 1e-14);
}

#[test]
fn sphere_residual_rejects_off_sphere_maps() {
    let imm = build_immersion(&FamilySpec::Cylinder { radius: 2.0 }).unwrap();
    let err = sphere_minimality_residual(&imm, &[0.0, 0.0], 2).unwrap_err();
    assert!(matches!(err, GeomError::NotSpherical { .. }));
}

#[test]
fn enneper_is_minimal() {
    let imm = Immersion::new("enneper", Enneper, ParamBox(vec![(-1.5, 1.5); 2]));
    for p in [[0.1, 0.2], [1.2, -0.7], [-1.4, 1.3]] {
        let h = mean_curvature(&imm, &p).unwrap();
        let scale = imm.eval(&p).unwrap().jacobian.norm_squared();
        assert!(h.h_norm / (1.0 + scale) < 1e-14, "{:e}", h.h_norm);
    }
}

#[test]
fn degenerate_parametrization_is_rejected() {
    let imm = Immersion::new(
        "flat",
        Bowl {
            reparam: [1.0, 2.0, 0.5, 1.0, 0.0, 0.0],
            rotation: rotation(0.0, 0.0),
        },
        ParamBox(vec![(-1.0, 1.0); 2]),
    );
    assert!(matches!(
        metric(&imm.eval(&[0.3, 0.1]).unwrap()),
        Err(GeomError::DegenerateMetric { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mean_curvature_ignores_the_parametrization(
        a in 0.5..2.0f64, b in -1.0..1.0f64, c in -1.0..1.0f64, d in 0.5..2.0f64,
        s in -0.5..0.5f64, t in -0.5..0.5f64,
    ) {
        prop_assume!((a * d - b * c).abs() > 0.2);
        let plain = Immersion::new("bowl", Bowl::plain(), ParamBox(vec![(-2.0, 2.0); 2]));
        let moved = Immersion::new(
            "bowl",
            Bowl { reparam: [a, b, c, d, 0.1, -0.2], rotation: rotation(0.0, 0.0) },
            ParamBox(vec![(-2.0, 2.0); 2]),
        );
        let x = a * s + b * t + 0.1;
        let y = c * s + d * t - 0.2;
        let h0 = mean_curvature(&plain, &[x, y]).unwrap().h;
        let h1 = mean_curvature(&moved, &[s, t]).unwrap().h;
        prop_assert!((&h0 - &h1).norm() < 1e-10 * (1.0 + h0.norm()));
    }

    #[test]
    fn mean_curvature_follows_ambient_rotations(a in -3.0..3.0f64, b in -3.0..3.0f64, s in -1.0..1.0f64, t in -1.0..1.0f64) {
        let r = rotation(a, b);
        let plain = Immersion::new("bowl", Bowl::plain(), ParamBox(vec![(-2.0, 2.0); 2]));
        let turned = Immersion::new("bowl", Bowl { reparam: Bowl::plain().reparam, rotation: r }, ParamBox(vec![(-2.0, 2.0); 2]));
        let h0 = mean_curvature(&plain, &[s, t]).unwrap().h;
        let h1 = mean_curvature(&turned, &[s, t]).unwrap().h;
        for i in 0..3 {
            let rotated: f64 = (0..3).map(|k| r[i][k] * h0[k]).sum();
            prop_assert!((rotated - h1[i]).abs() < 1e-11 * (1.0 + h0.norm()));
        }
    }

    #[test]
    fn laplacian_forms_agree(s in -1.5..1.5f64, t in -1.5..1.5f64) {
        let imm = Immersion::new("bowl", Bowl::plain(), ParamBox(vec![(-2.0, 2.0); 2]));
        let a = laplace_beltrami(&imm, &[s, t]).unwrap();
        let b = laplace_beltrami_divergence(&imm, &[s, t]).unwrap();
        prop_assert!((&a - &b).norm() < 1e-10 * (1.0 + a.norm()));
    }
}
