use serde::{Deserialize, Serialize};

use super::{diff_norm, norm, relative, IdentityError};
use crate::derivkit::{Jet1, Jet2, Scalar};
use crate::families::{apply_j, check_chart_point, torus_jets, CliffordBlock, DEFAULT_CHART_EPS};
use crate::geom::{metric, DivergenceForm, PointEval};

/// Relative defects of the five Clifford-torus identities at one chart point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaResiduals {
    /// `JC = (D·JC) D + Σ g^{ij} w_j ∂_iC`.
    pub res_a1: f64,
    /// `−JD = (D·JC) C + Σ g^{ij} w_j ∂_iD`.
    pub res_a2: f64,
    /// `1 − (D·JC)² = Σ g^{ij} w_i w_j`.
    pub res_b: f64,
    /// `Σ ∂_i(√g g^{ij} w_j) = 0`.
    pub res_c: f64,
    /// `Σ g^{ij} w_j ∂_i(D·JC) = 0`.
    pub res_d: f64,
    /// `Σ g^{ij} ∂_i(D·JC) ∂_jC = −2(JD + (D·JC) C)`.
    pub res_e: f64,
    /// `∂_i(D·JC) = 2w_i` on the first factor and `−2w_i` on the second.
    pub res_e_split: f64,
    pub d_dot_jc: f64,
    pub w: Vec<f64>,
}

impl LemmaResiduals {
    pub fn max(&self) -> f64 {
        [
            self.res_a1,
            self.res_a2,
            self.res_b,
            self.res_c,
            self.res_d,
            self.res_e,
            self.res_e_split,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    crate::derivkit::dot(a, b)
}

pub fn lemma_magic_residuals(block: &CliffordBlock, u: &[f64]) -> Result<LemmaResiduals, IdentityError> {
    check_chart_point(block, u, DEFAULT_CHART_EPS)?;
    if block.n == 0 {
        return Err(crate::families::SpecError::invalid("block.n", "the identities need N >= 1").into());
    }
    let m = block.param_dim();
    let k = block.ambient_dim();
    let (cj, dj) = torus_jets(block, u);
    let pe = PointEval::from_jets(&cj);
    let g = metric(&pe)?;

    let c: Vec<f64> = cj.iter().map(Scalar::value).collect();
    let d: Vec<f64> = dj.iter().map(Scalar::value).collect();
    let jc = apply_j(&c);
    let jd = apply_j(&d);
    let dc = |i: usize| -> Vec<f64> { cj.iter().map(|x| x.grad()[i]).collect() };
    let dd = |i: usize| -> Vec<f64> { dj.iter().map(|x| x.grad()[i]).collect() };

    // first-order jets of C, D, JC and of the partials ∂_jC
    let c1: Vec<Jet1> = cj.iter().map(Jet1::from).collect();
    let d1: Vec<Jet1> = dj.iter().map(Jet1::from).collect();
    let jc1 = apply_j(&c1);
    let w1: Vec<Jet1> = (0..m)
        .map(|j| {
            let dcj: Vec<Jet1> = cj.iter().map(|x: &Jet2| x.partial(j)).collect();
            dot(&dcj, &jc1)
        })
        .collect();
    let delta1 = dot(&d1, &jc1);
    let w: Vec<f64> = w1.iter().map(Scalar::value).collect();
    let delta = delta1.value();
    let grad_delta = delta1.grad().to_vec();

    let tau: Vec<f64> = (0..m)
        .map(|i| (0..m).map(|j| g.g_inv[(i, j)] * w[j]).sum())
        .collect();

    let combo = |coef: &[f64], vecs: &dyn Fn(usize) -> Vec<f64>| -> Vec<f64> {
        let mut out = vec![0.0; k];
        for (i, a) in coef.iter().enumerate() {
            for (o, v) in out.iter_mut().zip(vecs(i)) {
                *o += a * v;
            }
        }
        out
    };

    // (a)
    let tangential_c = combo(&tau, &dc);
    let rhs_a1: Vec<f64> = d.iter().zip(&tangential_c).map(|(x, t)| delta * x + t).collect();
    let res_a1 = relative(diff_norm(&jc, &rhs_a1), &[norm(&jc), delta.abs() * norm(&d), norm(&tangential_c)]);
    let tangential_d = combo(&tau, &dd);
    let lhs_a2: Vec<f64> = jd.iter().map(|x| -x).collect();
    let rhs_a2: Vec<f64> = c.iter().zip(&tangential_d).map(|(x, t)| delta * x + t).collect();
    let res_a2 = relative(diff_norm(&lhs_a2, &rhs_a2), &[norm(&jd), delta.abs() * norm(&c), norm(&tangential_d)]);

    // (b)
    let wgw: f64 = tau.iter().zip(&w).map(|(t, x)| t * x).sum();
    let res_b = relative(((1.0 - delta * delta) - wgw).abs(), &[1.0, delta * delta, wgw]);

    // (c): divergence of √g g^{ij} w_j over the torus chart
    let div = DivergenceForm::new(&pe)?;
    let flux = div.flux_terms(&w1, |_, _| true);
    let res_c = relative(flux.iter().sum::<f64>().abs(), &flux);

    // (d)
    let d_terms: Vec<f64> = tau.iter().zip(&grad_delta).map(|(t, gd)| t * gd).collect();
    let res_d = relative(d_terms.iter().sum::<f64>().abs(), &d_terms);

    // (e) and its coordinate split
    let sigma: Vec<f64> = (0..m)
        .map(|j| (0..m).map(|i| g.g_inv[(i, j)] * grad_delta[i]).sum())
        .collect();
    let lhs_e = combo(&sigma, &dc);
    let rhs_e: Vec<f64> = jd.iter().zip(&c).map(|(a, b)| -2.0 * (a + delta * b)).collect();
    let res_e = relative(diff_norm(&lhs_e, &rhs_e), &[norm(&lhs_e), 2.0 * norm(&jd), 2.0 * delta.abs()]);
    let n = block.n;
    let split_defect = (0..m)
        .map(|i| {
            let sign = if i < n { 2.0 } else { -2.0 };
            (grad_delta[i] - sign * w[i]).abs()
        })
        .fold(0.0, f64::max);
    let split_scale: Vec<f64> = grad_delta.iter().copied().chain(w.iter().map(|x| 2.0 * x)).collect();
    let res_e_split = relative(split_defect, &split_scale);

    Ok(LemmaResiduals {
        res_a1,
        res_a2,
        res_b,
        res_c,
        res_d,
        res_e,
        res_e_split,
        d_dot_jc: delta,
        w,
    })
}
