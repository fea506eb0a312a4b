//! Numerical checks of the Clifford-torus identities and of the algebra
//! behind the minimality proof for generalized helicoids.
//!
//! Every residual is relative: the defect divided by the largest term that
//! enters the identity.

mod helicoid;
mod lemma;
mod proof;

use thiserror::Error;

pub use helicoid::{helicoid_algebra, theta_harmonicity, HelicoidAlgebra, ThetaHarmonicity};
pub use lemma::{lemma_magic_residuals, LemmaResiduals};
pub use proof::{proof_terms, ProofTerms};

use crate::families::SpecError;
use crate::geom::GeomError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IdentityError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

impl IdentityError {
    pub fn is_exclusion(&self) -> bool {
        match self {
            IdentityError::Geom(g) => g.is_exclusion(),
            IdentityError::Spec(SpecError::ChartDomain(_)) => true,
            IdentityError::Spec(_) => false,
        }
    }
}

/// `defect / max(terms)`, with `0/0 = 0`.
pub(crate) fn relative(defect: f64, terms: &[f64]) -> f64 {
    let scale = terms.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
    if defect == 0.0 {
        0.0
    } else if scale == 0.0 {
        f64::INFINITY
    } else {
        defect / scale
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn diff_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
