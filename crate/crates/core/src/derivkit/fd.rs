use serde::{Deserialize, Serialize};

use super::jet::Jet2;
use super::DomainError;

/// Step control for the central-difference oracle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepPolicy {
    /// Central-difference step before per-coordinate scaling.
    pub base_step: f64,
    /// Number of Richardson columns; the error is `O(h^(2 * levels))`.
    pub richardson_levels: usize,
}

impl Default for StepPolicy {
    fn default() -> Self {
        Self {
            base_step: 1e-4,
            richardson_levels: 2,
        }
    }
}

impl StepPolicy {
    pub fn new(base_step: f64, richardson_levels: usize) -> Self {
        assert!(base_step > 0.0, "base_step must be positive");
        assert!(richardson_levels >= 1, "at least one Richardson level is required");
        Self {
            base_step,
            richardson_levels,
        }
    }

    /// Effective step for a coordinate with value `x`.
    pub fn step_for(&self, x: f64) -> f64 {
        self.base_step * x.abs().max(1.0)
    }
}

/// Eliminates the even-power error terms of a sequence of central estimates
/// taken at steps `h, h/2, h/4, ...`.
fn richardson(estimates: &[f64]) -> f64 {
    let mut table = estimates.to_vec();
    let mut factor = 1.0;
    for m in 1..table.len() {
        factor *= 4.0;
        for k in (m..table.len()).rev() {
            table[k] = table[k] + (table[k] - table[k - 1]) / (factor - 1.0);
        }
    }
    *table.last().expect("at least one estimate")
}

/// Value, gradient and Hessian of `f` at `p` by extrapolated central
/// differences. Independent of the jet machinery; used as its oracle.
pub fn fd_jet<F>(f: F, p: &[f64], policy: &StepPolicy) -> Result<Jet2, DomainError>
where
    F: Fn(&[f64]) -> f64,
{
    let n = p.len();
    let eval = |x: &[f64]| -> Result<f64, DomainError> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(DomainError::NonFinite { at: x.to_vec() })
        }
    };
    let f0 = eval(p)?;
    let steps: Vec<f64> = p.iter().map(|&x| policy.step_for(x)).collect();
    let levels = policy.richardson_levels;
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n * n];
    let mut x = p.to_vec();

    for i in 0..n {
        let mut d1 = Vec::with_capacity(levels);
        let mut d2 = Vec::with_capacity(levels);
        for k in 0..levels {
            let h = steps[i] / f64::from(1u32 << k);
            x[i] = p[i] + h;
            let fp = eval(&x)?;
            x[i] = p[i] - h;
            let fm = eval(&x)?;
            x[i] = p[i];
            d1.push((fp - fm) / (2.0 * h));
            d2.push((fp - 2.0 * f0 + fm) / (h * h));
        }
        grad[i] = richardson(&d1);
        hess[i * n + i] = richardson(&d2);
    }

    for i in 0..n {
        for j in (i + 1)..n {
            let mut dij = Vec::with_capacity(levels);
            for k in 0..levels {
                let scale = f64::from(1u32 << k);
                let (hi, hj) = (steps[i] / scale, steps[j] / scale);
                let mut corner = |si: f64, sj: f64| -> Result<f64, DomainError> {
                    x[i] = p[i] + si * hi;
                    x[j] = p[j] + sj * hj;
                    let v = eval(&x);
                    x[i] = p[i];
                    x[j] = p[j];
                    v
                };
                let fpp = corner(1.0, 1.0)?;
                let fpm = corner(1.0, -1.0)?;
                let fmp = corner(-1.0, 1.0)?;
                let fmm = corner(-1.0, -1.0)?;
                dij.push((fpp - fpm - fmp + fmm) / (4.0 * hi * hj));
            }
            let v = richardson(&dij);
            hess[i * n + j] = v;
            hess[j * n + i] = v;
        }
    }
    Ok(Jet2::from_parts(f0, grad, hess))
}
