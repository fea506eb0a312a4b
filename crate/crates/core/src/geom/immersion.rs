use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::GeomError;
use crate::derivkit::{fd_jet, Jet1, Jet2, Scalar, StepPolicy};

/// A smooth map from parameter space to ambient space written once against
/// [`Scalar`], so it can be evaluated on plain floats and on jets.
pub trait ParametricMap: Send + Sync + 'static {
    fn param_dim(&self) -> usize;
    fn ambient_dim(&self) -> usize;
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S>;
}

/// Object-safe view of a [`ParametricMap`].
trait ErasedMap: Send + Sync {
    fn position(&self, u: &[f64]) -> Vec<f64>;
    fn jets2(&self, u: &[Jet2]) -> Vec<Jet2>;
    fn jets1(&self, u: &[Jet1]) -> Vec<Jet1>;
}

impl<T: ParametricMap> ErasedMap for T {
    fn position(&self, u: &[f64]) -> Vec<f64> {
        self.map(u)
    }
    fn jets2(&self, u: &[Jet2]) -> Vec<Jet2> {
        self.map(u)
    }
    fn jets1(&self, u: &[Jet1]) -> Vec<Jet1> {
        self.map(u)
    }
}

/// Axis-aligned parameter box, one closed interval per parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamBox(pub Vec<(f64, f64)>);

impl ParamBox {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.0.iter().map(|(a, b)| 0.5 * (a + b)).collect()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim() && self.0.iter().zip(p).all(|(&(a, b), &x)| a <= x && x <= b)
    }
}

/// Named degeneracy predicate. A point is admissible iff every guard admits it.
#[derive(Clone)]
pub struct Guard {
    pub name: String,
    admits: Arc<dyn Fn(&[f64]) -> bool + Send + Sync>,
}

impl Guard {
    pub fn new(name: impl Into<String>, admits: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            admits: Arc::new(admits),
        }
    }

    /// Every listed parameter must satisfy `|u_i| > eps`.
    pub fn min_abs(indices: Vec<usize>, eps: f64) -> Self {
        let name = format!("min |u_i| > {eps} for i in {indices:?}");
        Self::new(name, move |p| indices.iter().all(|&i| p[i].abs() > eps))
    }

    pub fn admits(&self, p: &[f64]) -> bool {
        (self.admits)(p)
    }
}

impl fmt::Debug for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Guard").field("name", &self.name).finish()
    }
}

/// Where the family is expected to be minimal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// Minimality means `Δ_g F = 0` in the ambient Euclidean space.
    Euclidean,
    /// The image lies in the unit sphere; minimality there means `n F + Δ_g F = 0`.
    UnitSphere,
}

/// How complex coordinates are laid out in real ambient space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplexLayout {
    /// Each block of `2m` reals is `(Re z_1..Re z_m, Im z_1..Im z_m)`.
    Blocked,
    /// Pairs `(Re z_k, Im z_k)` follow each other.
    Interleaved,
}

/// One-parameter screw symmetry: `F(.., Θ + t, ..) = S_t(F(.., Θ, ..))`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScrewSymmetry {
    pub lambda0: f64,
    /// Rotation rate of each complex block.
    pub lambdas: Vec<f64>,
    pub theta_index: usize,
    pub layout: ComplexLayout,
}

/// Structural facts a family declares about itself.
#[derive(Clone, Debug, PartialEq)]
pub struct ImmersionTraits {
    pub target: Target,
    /// False for negative controls.
    pub expect_minimal: bool,
    pub screw: Option<ScrewSymmetry>,
    /// Parameters along which the map is homogeneous of degree one
    /// (empty unless the image is a cone).
    pub radial_params: Vec<usize>,
}

impl Default for ImmersionTraits {
    fn default() -> Self {
        Self {
            target: Target::Euclidean,
            expect_minimal: true,
            screw: None,
            radial_params: Vec::new(),
        }
    }
}

/// Position, Jacobian and second derivatives of an immersion at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct PointEval {
    pub position: DVector<f64>,
    /// `K x n`, column `j` is `∂F/∂u_j`.
    pub jacobian: DMatrix<f64>,
    /// One symmetric `n x n` matrix per ambient coordinate.
    pub second: Vec<DMatrix<f64>>,
}

impl PointEval {
    pub fn from_jets(jets: &[Jet2]) -> Self {
        let k = jets.len();
        let n = jets.first().map_or(0, Jet2::dim);
        let position = DVector::from_iterator(k, jets.iter().map(Scalar::value));
        let jacobian = DMatrix::from_fn(k, n, |r, c| jets[r].grad()[c]);
        let second = jets
            .iter()
            .map(|j| DMatrix::from_row_slice(n, n, j.hess_flat()))
            .collect();
        Self {
            position,
            jacobian,
            second,
        }
    }

    pub fn param_dim(&self) -> usize {
        self.jacobian.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.position.len()
    }

    /// `∂²F/∂u_i∂u_j` as an ambient vector.
    pub fn second_vector(&self, i: usize, j: usize) -> DVector<f64> {
        DVector::from_iterator(self.ambient_dim(), self.second.iter().map(|h| h[(i, j)]))
    }
}

/// Parametrized immersion with its sampling box and degeneracy guards.
#[derive(Clone)]
pub struct Immersion {
    pub name: String,
    param_dim: usize,
    ambient_dim: usize,
    map: Arc<dyn ErasedMap>,
    pub domain: ParamBox,
    pub guards: Vec<Guard>,
    pub rank_tol: f64,
    pub traits: ImmersionTraits,
}

impl fmt::Debug for Immersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Immersion")
            .field("name", &self.name)
            .field("param_dim", &self.param_dim)
            .field("ambient_dim", &self.ambient_dim)
            .field("domain", &self.domain)
            .field("guards", &self.guards)
            .field("traits", &self.traits)
            .finish()
    }
}

impl Immersion {
    pub fn new(name: impl Into<String>, map: impl ParametricMap, domain: ParamBox) -> Self {
        assert_eq!(domain.dim(), map.param_dim(), "domain box dimension mismatch");
        assert!(map.param_dim() > 0, "immersions need at least one parameter");
        Self {
            name: name.into(),
            param_dim: map.param_dim(),
            ambient_dim: map.ambient_dim(),
            map: Arc::new(map),
            domain,
            guards: Vec::new(),
            rank_tol: super::DEFAULT_RANK_TOL,
            traits: ImmersionTraits::default(),
        }
    }

    pub fn with_guard(mut self, guard: Guard) -> Self {
        self.guards.push(guard);
        self
    }

    pub fn with_traits(mut self, traits: ImmersionTraits) -> Self {
        self.traits = traits;
        self
    }

    pub fn param_dim(&self) -> usize {
        self.param_dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    fn check_dim(&self, p: &[f64]) -> Result<(), GeomError> {
        if p.len() == self.param_dim {
            Ok(())
        } else {
            Err(GeomError::DimensionMismatch {
                expected: self.param_dim,
                got: p.len(),
            })
        }
    }

    pub fn position(&self, p: &[f64]) -> Result<Vec<f64>, GeomError> {
        self.check_dim(p)?;
        let x = self.map.position(p);
        if x.iter().all(|v| v.is_finite()) {
            Ok(x)
        } else {
            Err(GeomError::NonFinite { at: p.to_vec() })
        }
    }

    /// Name of the first guard rejecting `p`, if any.
    pub fn exclusion(&self, p: &[f64]) -> Option<&str> {
        self.guards
            .iter()
            .find(|g| !g.admits(p))
            .map(|g| g.name.as_str())
    }

    pub fn check_admissible(&self, p: &[f64]) -> Result<(), GeomError> {
        self.check_dim(p)?;
        match self.exclusion(p) {
            Some(name) => Err(GeomError::Excluded {
                guard: name.to_string(),
            }),
            None => Ok(()),
        }
    }

    /// Exact first and second derivatives through jet evaluation.
    pub fn eval(&self, p: &[f64]) -> Result<PointEval, GeomError> {
        self.check_dim(p)?;
        let jets = self.map.jets2(&Jet2::seed(p));
        if jets.iter().all(Jet2::is_finite) {
            Ok(PointEval::from_jets(&jets))
        } else {
            Err(GeomError::NonFinite { at: p.to_vec() })
        }
    }

    /// Same quantities as [`Immersion::eval`] from the finite-difference
    /// oracle, one component at a time.
    pub fn eval_fd(&self, p: &[f64], policy: &StepPolicy) -> Result<PointEval, GeomError> {
        self.check_dim(p)?;
        let jets = (0..self.ambient_dim)
            .map(|c| fd_jet(|x| self.map.position(x)[c], p, policy))
            .collect::<Result<Vec<Jet2>, _>>()
            .map_err(|_| GeomError::NonFinite { at: p.to_vec() })?;
        Ok(PointEval::from_jets(&jets))
    }

    /// First-order jets of the position only.
    pub fn eval_first_order(&self, p: &[f64]) -> Result<Vec<Jet1>, GeomError> {
        self.check_dim(p)?;
        let n = p.len();
        let seeds: Vec<Jet1> = p.iter().enumerate().map(|(i, &v)| Jet1::variable(n, i, v)).collect();
        let jets = self.map.jets1(&seeds);
        if jets.iter().all(Jet1::is_finite) {
            Ok(jets)
        } else {
            Err(GeomError::NonFinite { at: p.to_vec() })
        }
    }
}
