use serde::{Deserialize, Serialize};

use super::charts::rotate_block;
use crate::geom::{ComplexLayout, GeomError, ScrewSymmetry};

/// Translation rate `lambda0` along the last axis and one rotation rate per
/// complex block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PitchVector {
    pub lambda0: f64,
    pub lambdas: Vec<f64>,
}

impl PitchVector {
    pub fn new(lambda0: f64, lambdas: Vec<f64>) -> Self {
        Self { lambda0, lambdas }
    }

    pub fn rays(&self) -> usize {
        self.lambdas.len()
    }

    pub fn symmetry(&self, theta_index: usize) -> ScrewSymmetry {
        ScrewSymmetry {
            lambda0: self.lambda0,
            lambdas: self.lambdas.clone(),
            theta_index,
            layout: ComplexLayout::Blocked,
        }
    }
}

/// Multi-screw motion on `R^{L(2N+2)+1}`: block `b` is multiplied by
/// `e^{i λ_b t}`, the last coordinate is shifted by `λ_0 t`. The block size
/// is inferred from `q`.
pub fn screw_action(pitch: &PitchVector, t: f64, q: &[f64]) -> Result<Vec<f64>, GeomError> {
    apply_screw(&pitch.symmetry(0), t, q)
}

/// Applies a [`ScrewSymmetry`] in either complex layout.
///
/// In the interleaved layout only one rate is allowed; it rotates every
/// `(x_k, y_k)` pair.
pub fn apply_screw(sym: &ScrewSymmetry, t: f64, q: &[f64]) -> Result<Vec<f64>, GeomError> {
    let blocks = sym.lambdas.len();
    let mismatch = |expected| GeomError::DimensionMismatch { expected, got: q.len() };
    if blocks == 0 || q.is_empty() {
        return Err(mismatch(3));
    }
    let body = q.len() - 1;
    let mut out = Vec::with_capacity(q.len());
    match sym.layout {
        ComplexLayout::Blocked => {
            let size = body / blocks;
            if size < 2 || !size.is_multiple_of(2) || size * blocks != body {
                let n = (body / blocks).saturating_sub(2) / 2;
                return Err(mismatch(blocks * (2 * n + 2) + 1));
            }
            for (b, lam) in sym.lambdas.iter().enumerate() {
                out.extend(rotate_block(&q[b * size..(b + 1) * size], &(lam * t)));
            }
        }
        ComplexLayout::Interleaved => {
            if blocks != 1 || !body.is_multiple_of(2) || body == 0 {
                return Err(mismatch(2 * (body / 2).max(1) + 1));
            }
            let (c, s) = ((sym.lambdas[0] * t).cos(), (sym.lambdas[0] * t).sin());
            for pair in q[..body].chunks(2) {
                out.push(c * pair[0] - s * pair[1]);
                out.push(s * pair[0] + c * pair[1]);
            }
        }
    }
    out.push(q[body] + sym.lambda0 * t);
    Ok(out)
}
