use serde::{Deserialize, Serialize};

use super::helicoid::{block_data, direct_eval};
use super::{diff_norm, norm, relative, IdentityError};
use crate::derivkit::Jet1;
use crate::families::{clifford_frame, rotate_block, GenHelicoidASpec, SpecError};
use crate::geom::DivergenceForm;

/// The six pieces of `√G Δ_G` applied to block `t` of the helicoid map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProofTerms {
    pub block: usize,
    /// Closed forms, in the order: torus-metric part, `d d / P` part,
    /// `∂_u(· ∂_Θ)`, `∂_Θ(· ∂_u)`, `∂_Θ(· ∂_Θ)`, radial part.
    pub closed: Vec<Vec<f64>>,
    /// The same six pieces from the inverse-metric entries of the directly
    /// computed metric.
    pub generic: Vec<Vec<f64>>,
    /// Contribution of `d^s d^t / P` couplings with the other blocks `s ≠ t`;
    /// vanishes by the divergence identity of each block.
    pub cross: Vec<f64>,
    /// `√G Δ_G` of block `t` with the full inverse metric.
    pub operator: Vec<f64>,
    pub scale: f64,
    /// `|Σ closed| / scale`.
    pub sum_norm: f64,
    /// `|Σ closed − operator| / scale`.
    pub operator_defect: f64,
    pub term_defects: Vec<f64>,
    pub cross_defect: f64,
}

impl ProofTerms {
    pub fn max_term_defect(&self) -> f64 {
        self.term_defects.iter().fold(0.0, |a, b| a.max(*b))
    }
}

fn piece_flux(div: &DivergenceForm, dphi: &[Jet1], weight: &dyn Fn(usize, usize) -> Option<Jet1>) -> f64 {
    let n = div.dim();
    let mut total = 0.0;
    for a in 0..n {
        let mut flux: Option<Jet1> = None;
        for (b, db) in dphi.iter().enumerate() {
            if let Some(m) = weight(a, b) {
                let term = m * db.clone();
                flux = Some(match flux {
                    Some(f) => f + term,
                    None => term,
                });
            }
        }
        if let Some(f) = flux {
            total += (div.sqrt_g.clone() * f).grad()[a];
        }
    }
    total
}

fn scaled(v: &[f64], k: f64) -> Vec<f64> {
    v.iter().map(|x| x * k).collect()
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Evaluates the closed forms of the six operator pieces acting on block `t`
/// (zero based) and compares them with the generic operator.
pub fn proof_terms(spec: &GenHelicoidASpec, t: usize, p: &[f64]) -> Result<ProofTerms, IdentityError> {
    if t >= spec.rays() {
        return Err(SpecError::invalid("block", format!("index {t} out of range for {} blocks", spec.rays())).into());
    }
    let (_, direct) = direct_eval(spec, p)?;
    let blocks = block_data(spec, p)?;
    let n = spec.n();
    let nf = n as f64;
    let th = spec.theta_index();
    let lam_t = spec.pitch.lambdas[t];
    let lam2 = lam_t * lam_t;
    let r = |s: usize| p[spec.r_index(s)];
    let r_t = r(t);
    let theta = p[th];

    // closed forms
    let frame = clifford_frame(&spec.blocks[t], &p[spec.block_range(t)])?;
    let p_val = spec.pitch.lambda0 * spec.pitch.lambda0
        + blocks
            .iter()
            .enumerate()
            .map(|(s, b)| spec.pitch.lambdas[s].powi(2) * r(s).powi(2) * b.delta * b.delta)
            .sum::<f64>();
    let q_t: f64 = blocks
        .iter()
        .enumerate()
        .filter(|(s, _)| *s != t)
        .map(|(s, b)| r(s).abs().powi(2 * n as i32) * b.det.sqrt())
        .product();
    let sqrt_gt = blocks[t].det.sqrt();
    let delta = frame.d_dot_jc;
    let kappa = r_t.powi(2 * n as i32 + 1) * q_t * sqrt_gt / p_val.sqrt();
    let cone = 2.0 * nf * r_t.powi(2 * n as i32 - 1) * q_t * p_val.sqrt() * sqrt_gt;
    let e = |v: &[f64]| rotate_block(v, &(lam_t * theta));
    let c = &frame.c;
    let jd = &frame.jd;
    let jd_plus = add(jd, &scaled(c, delta));
    let c_plus = add(c, &scaled(jd, delta));

    let s1 = add(&e(&scaled(c, -cone)), &e(&scaled(&jd_plus, -2.0 * lam2 * kappa * delta)));
    let s2 = e(&scaled(c, -lam2 * kappa * (1.0 - delta * delta)));
    let s3 = e(&scaled(&c_plus, lam2 * kappa));
    let s4 = s3.clone();
    let s5 = e(&scaled(c, -lam2 * kappa));
    let s6 = add(&e(&scaled(c, cone)), &e(&scaled(c, lam2 * kappa * delta * delta)));
    let closed = vec![s1, s2, s3, s4, s5, s6];

    // generic pieces from the direct metric
    let div = DivergenceForm::new(&direct.pe)?;
    let gi = |a: usize, b: usize| div.g_inv[a * div.dim() + b].clone();
    let block_of = |a: usize| -> Option<usize> { if a < th && n > 0 { Some(a / (2 * n)) } else { None } };
    let is_r = |a: usize| a > th;
    let same_block_dd = |a: usize, b: usize| gi(a, th) * gi(th, b) / gi(th, th);

    let w1 = |a: usize, b: usize| match (block_of(a), block_of(b)) {
        (Some(x), Some(y)) if x == y => Some(gi(a, b) - same_block_dd(a, b)),
        _ => None,
    };
    let w2 = |a: usize, b: usize| match (block_of(a), block_of(b)) {
        (Some(x), Some(y)) if x == y => Some(same_block_dd(a, b)),
        _ => None,
    };
    let w_cross = |a: usize, b: usize| match (block_of(a), block_of(b)) {
        (Some(x), Some(y)) if x != y => Some(gi(a, b)),
        _ => None,
    };
    let w3 = |a: usize, b: usize| (block_of(a).is_some() && b == th).then(|| gi(a, b));
    let w4 = |a: usize, b: usize| (a == th && block_of(b).is_some()).then(|| gi(a, b));
    let w5 = |a: usize, b: usize| (a == th && b == th).then(|| gi(a, b));
    let w6 = |a: usize, b: usize| (is_r(a) && is_r(b)).then(|| gi(a, b));
    let w_all = |a: usize, b: usize| Some(gi(a, b));
    let pieces: [&dyn Fn(usize, usize) -> Option<Jet1>; 6] = [&w1, &w2, &w3, &w4, &w5, &w6];

    let k = spec.blocks[t].ambient_dim();
    let components: Vec<usize> = (t * k..(t + 1) * k).collect();
    let apply = |weight: &dyn Fn(usize, usize) -> Option<Jet1>| -> Vec<f64> {
        components
            .iter()
            .map(|&comp| piece_flux(&div, div.coordinate_gradient(comp), weight))
            .collect()
    };
    let generic: Vec<Vec<f64>> = pieces.iter().map(|w| apply(*w)).collect();
    let cross = apply(&w_cross);
    let operator = apply(&w_all);

    let scale = closed.iter().map(|v| norm(v)).fold(0.0, f64::max);
    let sum = closed.iter().skip(1).fold(closed[0].clone(), |acc, v| add(&acc, v));
    let sum_norm = relative(norm(&sum), &[scale]);
    let operator_defect = relative(diff_norm(&sum, &operator), &[scale]);
    let term_defects = closed
        .iter()
        .zip(&generic)
        .map(|(a, b)| relative(diff_norm(a, b), &[scale]))
        .collect();
    let cross_defect = relative(norm(&cross), &[scale]);

    Ok(ProofTerms {
        block: t,
        closed,
        generic,
        cross,
        operator,
        scale,
        sum_norm,
        operator_defect,
        term_defects,
        cross_defect,
    })
}
