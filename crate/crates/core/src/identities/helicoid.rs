use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{relative, IdentityError};
use crate::derivkit::{dot, Jet1, Jet2, Scalar};
use crate::families::{
    apply_j, build_immersion, clifford_frame, torus_jets, torus_point_eval, FamilySpec, GenHelicoidASpec,
};
use crate::geom::linalg::det_and_inverse;
use crate::geom::{metric, metric_with_tol, DivergenceForm, Immersion, MetricEval, PointEval};

/// Block-by-block assembly of the helicoid metric compared with the metric
/// computed directly from the Jacobian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HelicoidAlgebra {
    /// `R = λ0² + Σ λ_s² r_s²`.
    pub r_value: f64,
    /// `P = R − Σ λ_s² r_s² wᵀ g⁻¹ w`.
    pub p_value: f64,
    /// `λ0² + Σ λ_s² r_s² (D^s·JC^s)²`.
    pub p_closed: f64,
    pub det_direct: f64,
    /// `P (r_1⋯r_L)^{4N} Π det g^s`.
    pub det_factored: f64,
    /// `d^s = λ_s (g^s)⁻¹ w^s` per block.
    pub d: Vec<Vec<f64>>,
    /// `Q_t = Π_{s≠t} |r_s|^{2N} √det g^s` per block.
    pub q: Vec<f64>,
    /// `√P |r_t|^{2N} √det g^t Q_t` per block; each equals `√det G`.
    pub sqrt_g_factored: Vec<f64>,
    /// `max|G_direct − G_blocks| / max|G_direct|`.
    pub metric_defect: f64,
    pub det_defect: f64,
    pub p_defect: f64,
    pub sqrt_g_defect: f64,
    /// `max|G_direct · G_formula⁻¹ − I|` with the full inverse, including
    /// the `d^s d^{s'} / P` couplings between different blocks.
    pub inverse_defect: f64,
    /// Same product when couplings between different blocks are set to zero.
    pub inverse_defect_literal: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaHarmonicity {
    /// `Δ_G(λ0 Θ)` from the divergence form on the direct metric.
    pub laplacian: f64,
    /// `|Σ_a ∂_a(√G G^{aΘ} λ0)|` over the largest of the individual terms and
    /// of the fluxes `|√G G^{aΘ} λ0|` themselves.
    pub relative: f64,
    /// Largest relative defect of the per-block divergence
    /// `Σ_i ∂_{u^s_i}(P^{-1/2} √g^s (g^s)^{ij} w^s_j) = 0`.
    pub block_defect: f64,
}

pub(crate) struct BlockData {
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    pub det: f64,
    pub w: Vec<f64>,
    pub delta: f64,
}

pub(crate) fn block_data(spec: &GenHelicoidASpec, p: &[f64]) -> Result<Vec<BlockData>, IdentityError> {
    spec.blocks
        .iter()
        .enumerate()
        .map(|(s, block)| {
            let u = &p[spec.block_range(s)];
            let frame = clifford_frame(block, u)?;
            let (g, g_inv, det) = if block.n == 0 {
                (DMatrix::zeros(0, 0), DMatrix::zeros(0, 0), 1.0)
            } else {
                let MetricEval { g, g_inv, det_g } = metric(&torus_point_eval(block, u))?;
                (g, g_inv, det_g)
            };
            Ok(BlockData {
                g,
                g_inv,
                det,
                w: frame.w,
                delta: frame.d_dot_jc,
            })
        })
        .collect()
}

pub(crate) struct DirectEval {
    pub pe: PointEval,
    pub metric: MetricEval,
}

pub(crate) fn direct_eval(spec: &GenHelicoidASpec, p: &[f64]) -> Result<(Immersion, DirectEval), IdentityError> {
    let imm = build_immersion(&FamilySpec::GenHelicoidA(spec.clone()))?;
    imm.check_admissible(p)?;
    let pe = imm.eval(p)?;
    let metric = metric_with_tol(&pe, imm.rank_tol)?;
    Ok((imm, DirectEval { pe, metric }))
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, b| a.max(b.abs()))
}

pub fn helicoid_algebra(spec: &GenHelicoidASpec, p: &[f64]) -> Result<HelicoidAlgebra, IdentityError> {
    let (_, direct) = direct_eval(spec, p)?;
    let blocks = block_data(spec, p)?;
    let lam0 = spec.pitch.lambda0;
    let lams = &spec.pitch.lambdas;
    let n = spec.n();
    let dim = spec.param_dim();
    let th = spec.theta_index();
    let r: Vec<f64> = (0..spec.rays()).map(|s| p[spec.r_index(s)]).collect();

    let r_value = lam0 * lam0 + lams.iter().zip(&r).map(|(l, x)| l * l * x * x).sum::<f64>();
    let mut p_value = r_value;
    let mut p_closed = lam0 * lam0;
    let mut d = Vec::with_capacity(blocks.len());
    for (s, b) in blocks.iter().enumerate() {
        let lr2 = lams[s] * lams[s] * r[s] * r[s];
        let tau: Vec<f64> = (0..2 * n)
            .map(|i| (0..2 * n).map(|j| b.g_inv[(i, j)] * b.w[j]).sum())
            .collect();
        let wgw: f64 = tau.iter().zip(&b.w).map(|(t, w)| t * w).sum();
        p_value -= lr2 * wgw;
        p_closed += lr2 * b.delta * b.delta;
        d.push(tau.iter().map(|t| lams[s] * t).collect::<Vec<f64>>());
    }

    // metric assembled block by block
    let mut g_formula = DMatrix::zeros(dim, dim);
    for (s, b) in blocks.iter().enumerate() {
        let range = spec.block_range(s);
        let r2 = r[s] * r[s];
        for (i, gi) in range.clone().enumerate() {
            for (j, gj) in range.clone().enumerate() {
                g_formula[(gi, gj)] = r2 * b.g[(i, j)];
            }
            g_formula[(gi, th)] = lams[s] * r2 * b.w[i];
            g_formula[(th, gi)] = lams[s] * r2 * b.w[i];
        }
        g_formula[(spec.r_index(s), spec.r_index(s))] = 1.0;
    }
    g_formula[(th, th)] = r_value;
    let g_direct = &direct.metric.g;
    let metric_defect = max_abs(&(g_direct - &g_formula)) / max_abs(g_direct);

    let r_prod: f64 = r.iter().product();
    let g_prod: f64 = blocks.iter().map(|b| b.det).product();
    let det_factored = p_value * r_prod.powi(4 * n as i32) * g_prod;
    let det_direct = direct.metric.det_g;
    let det_defect = (det_direct - det_factored).abs() / det_direct.abs();

    let q: Vec<f64> = (0..blocks.len())
        .map(|t| {
            blocks
                .iter()
                .enumerate()
                .filter(|(s, _)| *s != t)
                .map(|(s, b)| r[s].abs().powi(2 * n as i32) * b.det.sqrt())
                .product()
        })
        .collect();
    let sqrt_g_factored: Vec<f64> = (0..blocks.len())
        .map(|t| p_value.sqrt() * r[t].abs().powi(2 * n as i32) * blocks[t].det.sqrt() * q[t])
        .collect();
    let sqrt_det = det_direct.sqrt();
    let sqrt_g_defect = sqrt_g_factored
        .iter()
        .map(|v| (v - sqrt_det).abs() / sqrt_det)
        .fold(0.0, f64::max);

    let inverse = |couple_blocks: bool| -> DMatrix<f64> {
        let mut inv = DMatrix::zeros(dim, dim);
        for (s, b) in blocks.iter().enumerate() {
            let rs = spec.block_range(s);
            let r2 = r[s] * r[s];
            for (i, gi) in rs.clone().enumerate() {
                for (j, gj) in rs.clone().enumerate() {
                    inv[(gi, gj)] = b.g_inv[(i, j)] / r2;
                }
                inv[(gi, th)] = -d[s][i] / p_value;
                inv[(th, gi)] = -d[s][i] / p_value;
            }
            for (s2, _) in blocks.iter().enumerate() {
                if s2 != s && !couple_blocks {
                    continue;
                }
                for (i, gi) in rs.clone().enumerate() {
                    for (j, gj) in spec.block_range(s2).enumerate() {
                        inv[(gi, gj)] += d[s][i] * d[s2][j] / p_value;
                    }
                }
            }
            inv[(spec.r_index(s), spec.r_index(s))] = 1.0;
        }
        inv[(th, th)] = 1.0 / p_value;
        inv
    };
    let identity = DMatrix::<f64>::identity(dim, dim);
    let inverse_defect = max_abs(&(g_direct * inverse(true) - &identity));
    let inverse_defect_literal = max_abs(&(g_direct * inverse(false) - &identity));

    Ok(HelicoidAlgebra {
        r_value,
        p_value,
        p_closed,
        det_direct,
        det_factored,
        d,
        q,
        sqrt_g_factored,
        metric_defect,
        det_defect,
        p_defect: relative((p_value - p_closed).abs(), &[p_value, p_closed, r_value]),
        sqrt_g_defect,
        inverse_defect,
        inverse_defect_literal,
    })
}

/// First-order jets, over block `s`'s own chart parameters, of its torus
/// metric entries, of `w^s` and of `D^s·JC^s`.
pub(crate) fn block_jets(spec: &GenHelicoidASpec, s: usize, p: &[f64]) -> (Vec<Jet1>, Vec<Jet1>, Jet1) {
    let block = &spec.blocks[s];
    let m = block.param_dim();
    let (cj, dj) = torus_jets(block, &p[spec.block_range(s)]);
    let partials: Vec<Vec<Jet1>> = (0..m)
        .map(|j| cj.iter().map(|x: &Jet2| x.partial(j)).collect())
        .collect();
    let c1: Vec<Jet1> = cj.iter().map(Jet1::from).collect();
    let d1: Vec<Jet1> = dj.iter().map(Jet1::from).collect();
    let jc1 = apply_j(&c1);
    let mut g = Vec::with_capacity(m * m);
    for a in 0..m {
        for b in 0..m {
            g.push(dot(&partials[a], &partials[b]));
        }
    }
    let w = partials.iter().map(|dc| dot(dc, &jc1)).collect();
    (g, w, dot(&d1, &jc1))
}

pub fn theta_harmonicity(spec: &GenHelicoidASpec, p: &[f64]) -> Result<ThetaHarmonicity, IdentityError> {
    let (_, direct) = direct_eval(spec, p)?;
    let lam0 = spec.pitch.lambda0;
    let dim = spec.param_dim();
    let th = spec.theta_index();

    let (laplacian, rel) = if lam0 == 0.0 {
        (0.0, 0.0)
    } else {
        let div = DivergenceForm::new(&direct.pe)?;
        let dphi: Vec<Jet1> = (0..dim)
            .map(|b| Jet1::constant(dim, if b == th { lam0 } else { 0.0 }))
            .collect();
        let mut scale = div.flux_terms(&dphi, |_, _| true);
        let total: f64 = scale.iter().sum();
        // undifferentiated flux sizes keep the scale meaningful when every
        // derivative term is itself at rounding level
        scale.extend((0..dim).map(|a| lam0 * div.sqrt_g.value() * div.g_inv[a * dim + th].value()));
        (total / div.sqrt_g.value(), relative(total.abs(), &scale))
    };

    let blocks = block_data(spec, p)?;
    let lams = &spec.pitch.lambdas;
    let mut block_defect = 0.0_f64;
    for s in 0..spec.rays() {
        let m = spec.blocks[s].param_dim();
        if m == 0 {
            continue;
        }
        let (g, w, delta) = block_jets(spec, s, p);
        let rs = p[spec.r_index(s)];
        let lr2 = lams[s] * lams[s] * rs * rs;
        let p_other = lam0 * lam0
            + blocks
                .iter()
                .enumerate()
                .filter(|(t, _)| *t != s)
                .map(|(t, b)| {
                    let r = p[spec.r_index(t)];
                    lams[t] * lams[t] * r * r * b.delta * b.delta
                })
                .sum::<f64>();
        let p_jet = delta.square() * lr2 + p_other;
        let (det, g_inv) = det_and_inverse(&g, m).ok_or(crate::geom::GeomError::DegenerateMetric {
            det: 0.0,
            normalized: 0.0,
        })?;
        let prefactor = det.sqrt() / p_jet.sqrt();
        let terms: Vec<f64> = (0..m)
            .map(|i| {
                let mut v = g_inv[i * m].clone() * w[0].clone();
                for j in 1..m {
                    v = v + g_inv[i * m + j].clone() * w[j].clone();
                }
                (prefactor.clone() * v).grad()[i]
            })
            .collect();
        block_defect = block_defect.max(relative(terms.iter().sum::<f64>().abs(), &terms));
    }

    Ok(ThetaHarmonicity {
        laplacian,
        relative: rel,
        block_defect,
    })
}
