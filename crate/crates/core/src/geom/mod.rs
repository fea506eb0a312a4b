//! Immersions and the geometry they induce: first fundamental form,
//! Laplace–Beltrami operator (two independent forms), mean curvature vector
//! and the spherical minimality residual.

mod calculus;
mod immersion;
pub mod linalg;

use thiserror::Error;

pub use calculus::{
    laplace_beltrami, laplace_beltrami_at, laplace_beltrami_divergence,
    laplace_beltrami_divergence_at, mean_curvature, mean_curvature_at, metric, metric_with_tol,
    sphere_minimality_residual, sphere_minimality_residual_at, tangential_part, DivergenceForm,
    MeanCurvatureEval, MetricEval, DEFAULT_RANK_TOL, SPHERE_TOL,
};
pub use immersion::{
    ComplexLayout, Guard, Immersion, ImmersionTraits, ParamBox, ParametricMap, PointEval,
    ScrewSymmetry, Target,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("map is not finite at {at:?}")]
    NonFinite { at: Vec<f64> },
    #[error("point excluded by guard `{guard}`")]
    Excluded { guard: String },
    #[error("degenerate metric (det g = {det:e}, det g / prod g_ii = {normalized:e})")]
    DegenerateMetric { det: f64, normalized: f64 },
    #[error("immersion does not land on the unit sphere (|F| = {norm})")]
    NotSpherical { norm: f64 },
}

impl GeomError {
    /// Errors that mark a sample point as unusable rather than a failure.
    pub fn is_exclusion(&self) -> bool {
        matches!(
            self,
            GeomError::Excluded { .. } | GeomError::DegenerateMetric { .. } | GeomError::NonFinite { .. }
        )
    }
}
