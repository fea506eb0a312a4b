//! Second-order forward-mode differentiation and its finite-difference
//! oracle.
//!
//! Maps are written once against [`Scalar`] and evaluated either on `f64`
//! or on [`Jet2`]/[`Jet1`], which carry exact derivatives (up to rounding)
//! through `+ - * /`, `sin`, `cos`, `exp`, `ln`, `sqrt`, `atan2` and integer
//! powers. [`fd_jet`] recomputes the same quantities by Richardson-extrapolated
//! central differences and shares no code with the jet arithmetic.

mod fd;
mod jet;
mod scalar;

use thiserror::Error;

pub use fd::{fd_jet, StepPolicy};
pub use jet::{Jet1, Jet2};
pub use scalar::{dot, norm_sq, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("primitive evaluated outside its domain near {at:?}")]
    NonFinite { at: Vec<f64> },
}

/// Evaluates `f` on seeded jets at `p`.
pub fn jet_eval<F>(f: F, p: &[f64]) -> Result<Jet2, DomainError>
where
    F: Fn(&[Jet2]) -> Jet2,
{
    let out = f(&Jet2::seed(p));
    if out.is_finite() {
        Ok(out)
    } else {
        Err(DomainError::NonFinite { at: p.to_vec() })
    }
}
