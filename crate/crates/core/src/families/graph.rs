use super::SpecError;
use crate::derivkit::{jet_eval, Jet2, Scalar};

/// Minimum of `|Σ(x_k² − y_k²)| + |2Σ x_k y_k|` accepted by the graph check.
pub const DEFAULT_BRANCH_TOL: f64 = 1e-2;

/// `f(x, y) = ½ atan2(2 Σ x_k y_k, Σ (x_k² − y_k²))` on interleaved
/// coordinates `(x_1, y_1, …, x_N, y_N)`, i.e. half the argument of `Σ z_k²`.
pub fn graph_height<S: Scalar>(x: &[S]) -> S {
    let mut re = x[0].zero_like();
    let mut im = x[0].zero_like();
    for pair in x.chunks(2) {
        re = re + pair[0].square() - pair[1].square();
        im = im + pair[0].clone() * pair[1].clone() * 2.0;
    }
    im.atan2(&re) * 0.5
}

pub fn branch_distance(x: &[f64]) -> f64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for pair in x.chunks(2) {
        re += pair[0] * pair[0] - pair[1] * pair[1];
        im += 2.0 * pair[0] * pair[1];
    }
    re.abs() + im.abs()
}

/// Minimal-surface operator `div(∇f / W)`, `W = √(1 + |∇f|²)`, applied to the
/// graph height at `x`, expanded as `(W² Δf − ∇fᵀ ∇²f ∇f) / W³` from exact
/// jets.
pub fn choe_hoppe_graph_residual(n: usize, x: &[f64]) -> Result<f64, SpecError> {
    choe_hoppe_graph_residual_with(n, x, DEFAULT_BRANCH_TOL)
}

pub fn choe_hoppe_graph_residual_with(n: usize, x: &[f64], branch_tol: f64) -> Result<f64, SpecError> {
    if n == 0 || x.len() != 2 * n {
        return Err(SpecError::invalid("x", format!("expected {} coordinates, got {}", 2 * n, x.len())));
    }
    let distance = branch_distance(x);
    if distance <= branch_tol {
        return Err(SpecError::BranchLocus { distance, tol: branch_tol });
    }
    let jet = jet_eval(|v: &[Jet2]| graph_height(v), x).map_err(|e| SpecError::ChartDomain(e.to_string()))?;
    let grad = jet.grad();
    let m = x.len();
    let w2 = 1.0 + grad.iter().map(|g| g * g).sum::<f64>();
    let lap: f64 = (0..m).map(|i| jet.hess(i, i)).sum();
    let mut quad = 0.0;
    for i in 0..m {
        for j in 0..m {
            quad += grad[i] * jet.hess(i, j) * grad[j];
        }
    }
    Ok((w2 * lap - quad) / (w2 * w2.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_real_axis_has_zero_height() {
        assert_eq!(graph_height(&[1.0, 0.0]), 0.0);
        assert!(choe_hoppe_graph_residual(1, &[1.0, 0.0]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn height_is_scale_invariant() {
        let x = [0.7, 1.3, -0.4, 0.9];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        assert!((graph_height(&x) - graph_height(&y)).abs() < 1e-12);
    }

    #[test]
    fn branch_locus_is_refused() {
        // Σ z_k² = (1 + i)² + (1 − i)² = 0
        let err = choe_hoppe_graph_residual(2, &[1.0, 1.0, 1.0, -1.0]).unwrap_err();
        assert!(matches!(err, SpecError::BranchLocus { .. }));
    }
}
