use nalgebra::{DMatrix, DVector};

use super::immersion::{Immersion, PointEval};
use super::linalg::det_and_inverse;
use super::GeomError;
use crate::derivkit::{Jet1, Scalar};

/// Lower bound on `det g / prod g_ii` below which the metric counts as
/// degenerate. The ratio is scale free and lies in `(0, 1]` for positive
/// definite `g`.
pub const DEFAULT_RANK_TOL: f64 = 1e-12;

/// Allowed deviation of `|F|` from 1 for sphere-valued immersions.
pub const SPHERE_TOL: f64 = 1e-12;

/// First fundamental form at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricEval {
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    pub det_g: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeanCurvatureEval {
    /// `Δ_g F`.
    pub h: DVector<f64>,
    /// Norm of the tangential part of `h`.
    pub tangential_residual: f64,
    pub h_norm: f64,
}

pub fn metric(pe: &PointEval) -> Result<MetricEval, GeomError> {
    metric_with_tol(pe, DEFAULT_RANK_TOL)
}

pub fn metric_with_tol(pe: &PointEval, rank_tol: f64) -> Result<MetricEval, GeomError> {
    let g = pe.jacobian.transpose() * &pe.jacobian;
    let n = g.nrows();
    let diag: f64 = (0..n).map(|i| g[(i, i)]).product();
    let degenerate = |det: f64| GeomError::DegenerateMetric {
        det,
        normalized: if diag > 0.0 { det / diag } else { 0.0 },
    };
    let chol = g.clone().cholesky().ok_or_else(|| degenerate(0.0))?;
    let det_g: f64 = chol.l_dirty().diagonal().iter().map(|d| d * d).product();
    if !(diag > 0.0 && det_g / diag > rank_tol) {
        return Err(degenerate(det_g));
    }
    let mut g_inv = chol.inverse();
    g_inv = (&g_inv + g_inv.transpose()) * 0.5;
    Ok(MetricEval { g, g_inv, det_g })
}

/// `∂_i∂_jF · ∂_lF`, indexed `[i][j][l]`.
fn second_dot_first(pe: &PointEval) -> Vec<f64> {
    let n = pe.param_dim();
    let k = pe.ambient_dim();
    let mut out = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let mut s = 0.0;
                for c in 0..k {
                    s += pe.second[c][(i, j)] * pe.jacobian[(c, l)];
                }
                out[(i * n + j) * n + l] = s;
            }
        }
    }
    out
}

/// Christoffel-contraction form `g^{ij}(∂_i∂_jF − Γ^k_{ij} ∂_kF)`, with the
/// Christoffel symbols of the first kind assembled from metric derivatives.
pub fn laplace_beltrami_at(pe: &PointEval, m: &MetricEval) -> DVector<f64> {
    let n = pe.param_dim();
    let a = second_dot_first(pe);
    let at = |i: usize, j: usize, l: usize| a[(i * n + j) * n + l];
    // ∂_k g_ij = A[k][i][j] + A[k][j][i]
    let dg = |k: usize, i: usize, j: usize| at(k, i, j) + at(k, j, i);

    // c_l = g^{ij} Γ_{l,ij}
    let mut c = vec![0.0; n];
    for (l, cl) in c.iter_mut().enumerate() {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                let gamma = 0.5 * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
                s += m.g_inv[(i, j)] * gamma;
            }
        }
        *cl = s;
    }
    let gamma_up = &m.g_inv * DVector::from_vec(c);

    let mut trace = DVector::zeros(pe.ambient_dim());
    for (comp, h) in pe.second.iter().enumerate() {
        trace[comp] = m.g_inv.component_mul(h).sum();
    }
    trace - &pe.jacobian * gamma_up
}

/// Divergence form `(1/√g) ∂_a(√g g^{ab} ∂_b ·)` with the metric carried as
/// first-order jets.
///
/// `√g` and `g^{ab}` are differentiated by running Gauss–Jordan elimination
/// on jets of the metric entries, which shares no arithmetic with
/// [`laplace_beltrami_at`].
#[derive(Clone, Debug)]
pub struct DivergenceForm {
    n: usize,
    pub sqrt_g: Jet1,
    /// Row-major `n x n`.
    pub g_inv: Vec<Jet1>,
    first: Vec<Vec<Jet1>>,
}

impl DivergenceForm {
    pub fn new(pe: &PointEval) -> Result<Self, GeomError> {
        let n = pe.param_dim();
        let first: Vec<Vec<Jet1>> = (0..pe.ambient_dim())
            .map(|c| Self::gradient_jets_of(pe, c))
            .collect();
        let mut g = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let mut s = first[0][a].clone() * first[0][b].clone();
                for f in first.iter().skip(1) {
                    s = s + f[a].clone() * f[b].clone();
                }
                g.push(s);
            }
        }
        let (det, g_inv) = det_and_inverse(&g, n).ok_or(GeomError::DegenerateMetric {
            det: 0.0,
            normalized: 0.0,
        })?;
        if det.value() <= 0.0 {
            return Err(GeomError::DegenerateMetric {
                det: det.value(),
                normalized: 0.0,
            });
        }
        Ok(Self {
            n,
            sqrt_g: det.sqrt(),
            g_inv,
            first,
        })
    }

    /// `∂_b F^c` as first-order jets, `b = 0..n`.
    pub fn gradient_jets_of(pe: &PointEval, c: usize) -> Vec<Jet1> {
        let n = pe.param_dim();
        (0..n)
            .map(|b| Jet1::new(pe.jacobian[(c, b)], (0..n).map(|a| pe.second[c][(a, b)]).collect()))
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Gradient jets of ambient coordinate `c`.
    pub fn coordinate_gradient(&self, c: usize) -> &[Jet1] {
        &self.first[c]
    }

    /// Per-`a` terms `∂_a(√g Σ_b g^{ab} ∂_bφ)` restricted to index pairs
    /// accepted by `include`, without the `1/√g` prefactor.
    pub fn flux_terms(&self, dphi: &[Jet1], include: impl Fn(usize, usize) -> bool) -> Vec<f64> {
        let n = self.n;
        assert_eq!(dphi.len(), n);
        (0..n)
            .map(|a| {
                let mut flux: Option<Jet1> = None;
                for b in 0..n {
                    if !include(a, b) {
                        continue;
                    }
                    let term = self.g_inv[a * n + b].clone() * dphi[b].clone();
                    flux = Some(match flux {
                        Some(f) => f + term,
                        None => term,
                    });
                }
                flux.map_or(0.0, |f| (self.sqrt_g.clone() * f).grad()[a])
            })
            .collect()
    }

    /// `Δ_g φ` for a function given by the jets of its gradient.
    pub fn laplacian(&self, dphi: &[Jet1]) -> f64 {
        self.flux_terms(dphi, |_, _| true).iter().sum::<f64>() / self.sqrt_g.value()
    }

    pub fn laplace_beltrami(&self) -> DVector<f64> {
        DVector::from_iterator(self.first.len(), self.first.iter().map(|d| self.laplacian(d)))
    }
}

pub fn laplace_beltrami_divergence_at(pe: &PointEval) -> Result<DVector<f64>, GeomError> {
    Ok(DivergenceForm::new(pe)?.laplace_beltrami())
}

/// Contraction-form Laplace–Beltrami of the immersion map at `p`.
pub fn laplace_beltrami(imm: &Immersion, p: &[f64]) -> Result<DVector<f64>, GeomError> {
    imm.check_admissible(p)?;
    let pe = imm.eval(p)?;
    let m = metric_with_tol(&pe, imm.rank_tol)?;
    Ok(laplace_beltrami_at(&pe, &m))
}

/// Divergence-form Laplace–Beltrami of the immersion map at `p`.
pub fn laplace_beltrami_divergence(imm: &Immersion, p: &[f64]) -> Result<DVector<f64>, GeomError> {
    imm.check_admissible(p)?;
    let pe = imm.eval(p)?;
    metric_with_tol(&pe, imm.rank_tol)?;
    laplace_beltrami_divergence_at(&pe)
}

/// Tangential part `J g^{-1} J^T v` of an ambient vector.
pub fn tangential_part(pe: &PointEval, m: &MetricEval, v: &DVector<f64>) -> DVector<f64> {
    let coeffs = &m.g_inv * (pe.jacobian.transpose() * v);
    &pe.jacobian * coeffs
}

pub fn mean_curvature_at(pe: &PointEval, m: &MetricEval) -> MeanCurvatureEval {
    let h = laplace_beltrami_at(pe, m);
    let tangential_residual = tangential_part(pe, m, &h).norm();
    let h_norm = h.norm();
    MeanCurvatureEval {
        h,
        tangential_residual,
        h_norm,
    }
}

pub fn mean_curvature(imm: &Immersion, p: &[f64]) -> Result<MeanCurvatureEval, GeomError> {
    imm.check_admissible(p)?;
    let pe = imm.eval(p)?;
    let m = metric_with_tol(&pe, imm.rank_tol)?;
    Ok(mean_curvature_at(&pe, &m))
}

/// `|n F + Δ_g F|` for an immersion into the unit sphere; zero exactly when
/// the immersion is minimal in the sphere at `p`.
pub fn sphere_minimality_residual_at(pe: &PointEval, m: &MetricEval, n: usize) -> Result<f64, GeomError> {
    let norm = pe.position.norm();
    if (norm - 1.0).abs() > SPHERE_TOL {
        return Err(GeomError::NotSpherical { norm });
    }
    let h = laplace_beltrami_at(pe, m);
    Ok((&pe.position * n as f64 + h).norm())
}

pub fn sphere_minimality_residual(imm: &Immersion, p: &[f64], n: usize) -> Result<f64, GeomError> {
    imm.check_admissible(p)?;
    let pe = imm.eval(p)?;
    let m = metric_with_tol(&pe, imm.rank_tol)?;
    sphere_minimality_residual_at(&pe, &m, n)
}
