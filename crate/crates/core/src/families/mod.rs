//! Declarative family descriptions and their immersions.

mod charts;
mod graph;
mod maps;
mod screw;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use charts::{
    apply_j, check_chart_point, clifford_frame, random_unitary, real_representation, rotate_block,
    torus_jets, torus_metric_det, torus_point_eval, ChartKind, CliffordBlock, CliffordFrame,
    SphereChart, MATRIX_TOL,
};
pub use graph::{
    branch_distance, choe_hoppe_graph_residual, choe_hoppe_graph_residual_with, graph_height,
    DEFAULT_BRANCH_TOL,
};
pub use maps::FamilyMap;
pub use screw::{apply_screw, screw_action, PitchVector};

use crate::geom::{
    ComplexLayout, Guard, Immersion, ImmersionTraits, ParamBox, ParametricMap, ScrewSymmetry, Target,
    DEFAULT_RANK_TOL,
};
use maps::*;

pub const DEFAULT_EPS_R: f64 = 1e-3;
/// Helicoid guard `P > eps_p R`; the metric's conditioning degrades like `R / P`.
pub const DEFAULT_EPS_P: f64 = 1e-4;
/// Trigonometric charts need `|sin φ| >` this on every polar angle.
pub const DEFAULT_CHART_EPS: f64 = 1e-3;

/// Sampling box used for every radial parameter.
pub const RADIAL_BOX: (f64, f64) = (0.25, 2.5);
pub const ANGLE_BOX: (f64, f64) = (-PI, PI);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("chart domain: {0}")]
    ChartDomain(String),
    #[error("point is within {distance:e} of the branch locus (tolerance {tol:e})")]
    BranchLocus { distance: f64, tol: f64 },
}

impl SpecError {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        SpecError::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

/// Thresholds for the degeneracy guards installed on built immersions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GuardPolicy {
    /// Radial parameters must satisfy `|r| > eps_r`.
    pub eps_r: f64,
    /// Helicoids need `P > eps_p R`, with `R` the same sum taken with
    /// every `D·JC` set to one.
    pub eps_p: f64,
    pub chart_eps: f64,
    pub rank_tol: f64,
}

impl Default for GuardPolicy {
    fn default() -> Self {
        Self {
            eps_r: DEFAULT_EPS_R,
            eps_p: DEFAULT_EPS_P,
            chart_eps: DEFAULT_CHART_EPS,
            rank_tol: DEFAULT_RANK_TOL,
        }
    }
}

/// Generalized helicoid with one Clifford torus per complex block.
///
/// Parameters are ordered `u^1 (2N), …, u^L (2N), Θ, r_1, …, r_L`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenHelicoidASpec {
    pub pitch: PitchVector,
    pub blocks: Vec<CliffordBlock>,
}

impl GenHelicoidASpec {
    /// `L = lambdas.len()` default blocks of torus dimension `2N`.
    pub fn standard(pitch: PitchVector, n: usize, kind: ChartKind) -> Self {
        let blocks = vec![CliffordBlock::with_kind(n, kind); pitch.rays()];
        Self { pitch, blocks }
    }

    pub fn rays(&self) -> usize {
        self.blocks.len()
    }

    pub fn n(&self) -> usize {
        self.blocks.first().map_or(0, |b| b.n)
    }

    pub fn theta_index(&self) -> usize {
        2 * self.n() * self.rays()
    }

    pub fn r_index(&self, s: usize) -> usize {
        self.theta_index() + 1 + s
    }

    /// Parameter range of block `s`'s torus chart.
    pub fn block_range(&self, s: usize) -> std::ops::Range<usize> {
        let m = 2 * self.n();
        s * m..(s + 1) * m
    }

    pub fn param_dim(&self) -> usize {
        self.theta_index() + 1 + self.rays()
    }

    pub fn ambient_dim(&self) -> usize {
        self.rays() * (2 * self.n() + 2) + 1
    }

    pub fn validate(&self, field: &str) -> Result<(), SpecError> {
        if self.blocks.is_empty() {
            return Err(SpecError::invalid(format!("{field}.blocks"), "need at least one block"));
        }
        if self.pitch.lambdas.len() != self.blocks.len() {
            return Err(SpecError::invalid(
                format!("{field}.pitch.lambdas"),
                format!(
                    "has {} entries but there are {} blocks (one rate per block is required)",
                    self.pitch.lambdas.len(),
                    self.blocks.len()
                ),
            ));
        }
        check_finite(&format!("{field}.pitch"), &pitch_values(&self.pitch))?;
        let n = self.n();
        for (s, b) in self.blocks.iter().enumerate() {
            if b.n != n {
                return Err(SpecError::invalid(
                    format!("{field}.blocks[{s}].n"),
                    format!("is {} but blocks[0].n is {n}; all blocks must share N", b.n),
                ));
            }
            b.validate(&format!("{field}.blocks[{s}]"))?;
        }
        Ok(())
    }

    /// `P = λ0² + Σ λ_s² r_s² (D^s·JC^s)²` at a parameter point.
    pub fn p_value(&self, p: &[f64]) -> f64 {
        let mut acc = self.pitch.lambda0 * self.pitch.lambda0;
        for (s, b) in self.blocks.iter().enumerate() {
            let delta = b.dot_d_jc(&p[self.block_range(s)]);
            let lr = self.pitch.lambdas[s] * p[self.r_index(s)];
            acc += lr * lr * delta * delta;
        }
        acc
    }

    /// `R = λ0² + Σ λ_s² r_s²`.
    pub fn r_value(&self, p: &[f64]) -> f64 {
        let mut acc = self.pitch.lambda0 * self.pitch.lambda0;
        for s in 0..self.rays() {
            let lr = self.pitch.lambdas[s] * p[self.r_index(s)];
            acc += lr * lr;
        }
        acc
    }

    fn map(&self) -> HelicoidAMap {
        HelicoidAMap {
            lambda0: self.pitch.lambda0,
            lambdas: self.pitch.lambdas.clone(),
            blocks: self.blocks.clone(),
        }
    }
}

fn pitch_values(p: &PitchVector) -> Vec<f64> {
    let mut v = vec![p.lambda0];
    v.extend(&p.lambdas);
    v
}

fn check_finite(field: &str, values: &[f64]) -> Result<(), SpecError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(SpecError::invalid(field, "values must be finite"))
    }
}

/// One family, tagged by `kind` in JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    /// Clifford torus in `S^{2N+1}`; parameters `u (2N)`.
    CliffordTorus { block: CliffordBlock },
    /// Cone over the Clifford torus; parameters `u (2N), r`.
    CliffordCone { block: CliffordBlock },
    /// `L`-rays cone over a spherical base; parameters `u_base, r_1..r_L`.
    LRaysCone { rays: usize, base: Box<FamilySpec> },
    /// `L`-rays cone over a Clifford torus; parameters `u (2N), r_1..r_L`.
    LRaysCliffordCone { rays: usize, block: CliffordBlock },
    /// Spherical join `{(x_1 F, …, x_L F) : x ∈ S^{L−1}}`; parameters `u_base, v (L−1)`.
    SphericalJoin {
        rays: usize,
        #[serde(default)]
        chart: SphereChart,
        base: Box<FamilySpec>,
    },
    GenHelicoidA(GenHelicoidASpec),
    /// One torus shared by `L` rays turning at a common rate; parameters `u (2N), Θ, r_1..r_L`.
    GenHelicoidB {
        lambda: f64,
        lambda0: f64,
        rays: usize,
        block: CliffordBlock,
    },
    /// Helicoid in `R^{2N+1}` over the real Clifford cone of `R^{2N}`; parameters `u_p (N−1), u_q (N−1), Θ, r`.
    ChoeHoppe {
        n: usize,
        lambda: f64,
        #[serde(default)]
        chart_p: SphereChart,
        #[serde(default)]
        chart_q: SphereChart,
    },
    /// Parameters `Θ, r_1..r_L`.
    Bdj { pitch: PitchVector },
    /// Ruled surface in `S^3`; parameters `t, Θ`.
    LawsonSurface { lambda1: f64, lambda2: f64 },
    /// Cone in `R^{4N+4}`; parameters `u_x (N), u_y (N), r_1, r_2`.
    HarveyLawsonCone {
        n: usize,
        #[serde(default)]
        chart_x: SphereChart,
        #[serde(default)]
        chart_y: SphereChart,
    },
    /// Intersection of a `λ0 = 0` helicoid with the unit sphere; parameters `u^1..u^L, Θ, v (L−1)`.
    SphericalSlice {
        inner: GenHelicoidASpec,
        #[serde(default)]
        chart: SphereChart,
    },
    /// Circle of height `h` on `S^2`; minimal only for `h = 0`.
    LatitudeCircle { height: f64 },
    /// Round cylinder in `R^3`; never minimal.
    Cylinder { radius: f64 },
    /// Unit sphere `S^dim` as a chart.
    RoundSphere {
        dim: usize,
        #[serde(default)]
        chart: SphereChart,
    },
}

impl FamilySpec {
    pub fn kind(&self) -> &'static str {
        match self {
            FamilySpec::CliffordTorus { .. } => "clifford_torus",
            FamilySpec::CliffordCone { .. } => "clifford_cone",
            FamilySpec::LRaysCone { .. } => "l_rays_cone",
            FamilySpec::LRaysCliffordCone { .. } => "l_rays_clifford_cone",
            FamilySpec::SphericalJoin { .. } => "spherical_join",
            FamilySpec::GenHelicoidA(_) => "gen_helicoid_a",
            FamilySpec::GenHelicoidB { .. } => "gen_helicoid_b",
            FamilySpec::ChoeHoppe { .. } => "choe_hoppe",
            FamilySpec::Bdj { .. } => "bdj",
            FamilySpec::LawsonSurface { .. } => "lawson_surface",
            FamilySpec::HarveyLawsonCone { .. } => "harvey_lawson_cone",
            FamilySpec::SphericalSlice { .. } => "spherical_slice",
            FamilySpec::LatitudeCircle { .. } => "latitude_circle",
            FamilySpec::Cylinder { .. } => "cylinder",
            FamilySpec::RoundSphere { .. } => "round_sphere",
        }
    }

    pub fn gen_helicoid_a(pitch: PitchVector, n: usize) -> Self {
        FamilySpec::GenHelicoidA(GenHelicoidASpec::standard(pitch, n, ChartKind::Stereographic))
    }

    pub fn clifford_torus(n: usize) -> Self {
        FamilySpec::CliffordTorus {
            block: CliffordBlock::new(n),
        }
    }

    pub fn equator() -> Self {
        FamilySpec::LatitudeCircle { height: 0.0 }
    }

    /// Whether the image lies in the unit sphere.
    pub fn is_spherical(&self) -> bool {
        match self {
            FamilySpec::CliffordTorus { .. }
            | FamilySpec::LawsonSurface { .. }
            | FamilySpec::SphericalSlice { .. }
            | FamilySpec::LatitudeCircle { .. }
            | FamilySpec::RoundSphere { .. } => true,
            FamilySpec::SphericalJoin { base, .. } => base.is_spherical(),
            _ => false,
        }
    }

    /// Whether the family is expected to be minimal in its target.
    pub fn expect_minimal(&self) -> bool {
        match self {
            FamilySpec::LatitudeCircle { height } => *height == 0.0,
            FamilySpec::Cylinder { .. } => false,
            FamilySpec::LRaysCone { base, .. } | FamilySpec::SphericalJoin { base, .. } => base.expect_minimal(),
            _ => true,
        }
    }

    /// Whether the family is a cone through the origin (homogeneous in its
    /// radial parameters).
    pub fn is_cone(&self) -> bool {
        match self {
            FamilySpec::CliffordCone { .. }
            | FamilySpec::LRaysCone { .. }
            | FamilySpec::LRaysCliffordCone { .. }
            | FamilySpec::HarveyLawsonCone { .. } => true,
            FamilySpec::GenHelicoidA(a) => a.pitch.lambda0 == 0.0,
            FamilySpec::GenHelicoidB { lambda0, .. } => *lambda0 == 0.0,
            FamilySpec::ChoeHoppe { lambda, .. } => *lambda == 0.0,
            FamilySpec::Bdj { pitch } => pitch.lambda0 == 0.0,
            _ => false,
        }
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        match self {
            FamilySpec::CliffordTorus { block } | FamilySpec::CliffordCone { block } => {
                if block.n == 0 && matches!(self, FamilySpec::CliffordTorus { .. }) {
                    return Err(SpecError::invalid("block.n", "the N = 0 torus is four points; need N >= 1"));
                }
                block.validate("block")
            }
            FamilySpec::LRaysCone { rays, base } => {
                check_rays(*rays)?;
                check_base(base)
            }
            FamilySpec::LRaysCliffordCone { rays, block } => {
                check_rays(*rays)?;
                block.validate("block")
            }
            FamilySpec::SphericalJoin { rays, chart, base } => {
                if *rays < 2 {
                    return Err(SpecError::invalid("rays", "a spherical join needs at least 2 rays"));
                }
                chart.validate(rays - 1, "chart")?;
                check_base(base)
            }
            FamilySpec::GenHelicoidA(a) => a.validate("family"),
            FamilySpec::GenHelicoidB {
                lambda,
                lambda0,
                rays,
                block,
            } => {
                check_rays(*rays)?;
                check_finite("lambda", &[*lambda, *lambda0])?;
                block.validate("block")
            }
            FamilySpec::ChoeHoppe {
                n,
                lambda,
                chart_p,
                chart_q,
            } => {
                if *n == 0 {
                    return Err(SpecError::invalid("n", "must be at least 1"));
                }
                check_finite("lambda", &[*lambda])?;
                chart_p.validate(n - 1, "chart_p")?;
                chart_q.validate(n - 1, "chart_q")
            }
            FamilySpec::Bdj { pitch } => {
                if pitch.lambdas.is_empty() {
                    return Err(SpecError::invalid("pitch.lambdas", "need at least one rate"));
                }
                check_finite("pitch", &pitch_values(pitch))
            }
            FamilySpec::LawsonSurface { lambda1, lambda2 } => check_finite("lambda1", &[*lambda1, *lambda2]),
            FamilySpec::HarveyLawsonCone { n, chart_x, chart_y } => {
                if *n == 0 {
                    return Err(SpecError::invalid("n", "must be at least 1"));
                }
                chart_x.validate(*n, "chart_x")?;
                chart_y.validate(*n, "chart_y")
            }
            FamilySpec::SphericalSlice { inner, chart } => {
                inner.validate("inner")?;
                if inner.pitch.lambda0 != 0.0 {
                    return Err(SpecError::invalid(
                        "inner.pitch.lambda0",
                        "must be 0; only the cone case meets the sphere in a minimal slice",
                    ));
                }
                if inner.n() == 0 && inner.rays() == 1 {
                    return Err(SpecError::invalid("inner", "slice of an N = 0, L = 1 cone is a circle arc; need more parameters"));
                }
                chart.validate(inner.rays() - 1, "chart")
            }
            FamilySpec::LatitudeCircle { height } => {
                if !height.is_finite() || height.abs() >= 1.0 {
                    return Err(SpecError::invalid("height", "must lie strictly between -1 and 1"));
                }
                Ok(())
            }
            FamilySpec::Cylinder { radius } => {
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(SpecError::invalid("radius", "must be positive"));
                }
                Ok(())
            }
            FamilySpec::RoundSphere { dim, chart } => {
                if *dim == 0 {
                    return Err(SpecError::invalid("dim", "must be at least 1"));
                }
                chart.validate(*dim, "chart")
            }
        }
    }

    /// Parametric map behind the immersion.
    pub fn family_map(&self) -> Result<FamilyMap, SpecError> {
        self.validate()?;
        Ok(self.map_unchecked())
    }

    fn map_unchecked(&self) -> FamilyMap {
        match self {
            FamilySpec::CliffordTorus { block } => FamilyMap::Torus(TorusMap { block: block.clone() }),
            FamilySpec::CliffordCone { block } => FamilyMap::CliffordCone(CliffordConeMap { block: block.clone() }),
            FamilySpec::LRaysCone { rays, base } => FamilyMap::RaysCone(RaysConeMap {
                base: Box::new(base.map_unchecked()),
                rays: *rays,
            }),
            FamilySpec::LRaysCliffordCone { rays, block } => FamilyMap::RaysCone(RaysConeMap {
                base: Box::new(FamilyMap::Torus(TorusMap { block: block.clone() })),
                rays: *rays,
            }),
            FamilySpec::SphericalJoin { rays, chart, base } => FamilyMap::Join(JoinMap {
                base: Box::new(base.map_unchecked()),
                rays: *rays,
                chart: chart.clone(),
            }),
            FamilySpec::GenHelicoidA(a) => FamilyMap::HelicoidA(a.map()),
            FamilySpec::GenHelicoidB {
                lambda,
                lambda0,
                rays,
                block,
            } => FamilyMap::HelicoidB(HelicoidBMap {
                lambda: *lambda,
                lambda0: *lambda0,
                rays: *rays,
                block: block.clone(),
            }),
            FamilySpec::ChoeHoppe {
                n,
                lambda,
                chart_p,
                chart_q,
            } => FamilyMap::ChoeHoppe(ChoeHoppeMap {
                n: *n,
                lambda: *lambda,
                chart_p: chart_p.clone(),
                chart_q: chart_q.clone(),
            }),
            FamilySpec::Bdj { pitch } => FamilyMap::Bdj(BdjMap {
                lambda0: pitch.lambda0,
                lambdas: pitch.lambdas.clone(),
            }),
            FamilySpec::LawsonSurface { lambda1, lambda2 } => FamilyMap::Lawson(LawsonMap {
                lambda1: *lambda1,
                lambda2: *lambda2,
            }),
            FamilySpec::HarveyLawsonCone { n, chart_x, chart_y } => FamilyMap::HarveyLawson(HarveyLawsonMap {
                n: *n,
                chart_x: chart_x.clone(),
                chart_y: chart_y.clone(),
            }),
            FamilySpec::SphericalSlice { inner, chart } => FamilyMap::Slice(SliceMap {
                lambdas: inner.pitch.lambdas.clone(),
                blocks: inner.blocks.clone(),
                chart: chart.clone(),
            }),
            FamilySpec::LatitudeCircle { height } => FamilyMap::Latitude(LatitudeMap { height: *height }),
            FamilySpec::Cylinder { radius } => FamilyMap::Cylinder(CylinderMap { radius: *radius }),
            FamilySpec::RoundSphere { dim, chart } => FamilyMap::RoundSphere(RoundSphereMap {
                dim: *dim,
                chart: chart.clone(),
            }),
        }
    }

    /// Default sampling box, ordered like the parameters.
    pub fn default_box(&self) -> Vec<(f64, f64)> {
        match self {
            FamilySpec::CliffordTorus { block } => block.default_box(),
            FamilySpec::CliffordCone { block } => with_radial(block.default_box(), 1),
            FamilySpec::LRaysCone { rays, base } => with_radial(base.default_box(), *rays),
            FamilySpec::LRaysCliffordCone { rays, block } => with_radial(block.default_box(), *rays),
            FamilySpec::SphericalJoin { rays, chart, base } => {
                let mut b = base.default_box();
                b.extend(chart.default_box(rays - 1));
                b
            }
            FamilySpec::GenHelicoidA(a) => {
                let mut b: Vec<(f64, f64)> = a.blocks.iter().flat_map(CliffordBlock::default_box).collect();
                b.push(ANGLE_BOX);
                with_radial(b, a.rays())
            }
            FamilySpec::GenHelicoidB { rays, block, .. } => {
                let mut b = block.default_box();
                b.push(ANGLE_BOX);
                with_radial(b, *rays)
            }
            FamilySpec::ChoeHoppe {
                n, chart_p, chart_q, ..
            } => {
                let mut b = chart_p.default_box(n - 1);
                b.extend(chart_q.default_box(n - 1));
                b.push(ANGLE_BOX);
                with_radial(b, 1)
            }
            FamilySpec::Bdj { pitch } => with_radial(vec![ANGLE_BOX], pitch.rays()),
            FamilySpec::LawsonSurface { .. } => vec![ANGLE_BOX, ANGLE_BOX],
            FamilySpec::HarveyLawsonCone { n, chart_x, chart_y } => {
                let mut b = chart_x.default_box(*n);
                b.extend(chart_y.default_box(*n));
                with_radial(b, 2)
            }
            FamilySpec::SphericalSlice { inner, chart } => {
                let mut b: Vec<(f64, f64)> = inner.blocks.iter().flat_map(CliffordBlock::default_box).collect();
                b.push(ANGLE_BOX);
                b.extend(chart.default_box(inner.rays() - 1));
                b
            }
            FamilySpec::LatitudeCircle { .. } => vec![ANGLE_BOX],
            FamilySpec::Cylinder { .. } => vec![ANGLE_BOX, (-2.0, 2.0)],
            FamilySpec::RoundSphere { dim, chart } => chart.default_box(*dim),
        }
    }

    /// Indices of the radial parameters when the family is a cone.
    pub fn radial_params(&self) -> Vec<usize> {
        if !self.is_cone() {
            return Vec::new();
        }
        let n = self.map_unchecked().param_dim();
        let count = match self {
            FamilySpec::CliffordCone { .. } | FamilySpec::ChoeHoppe { .. } => 1,
            FamilySpec::LRaysCone { rays, .. } | FamilySpec::LRaysCliffordCone { rays, .. } => *rays,
            FamilySpec::GenHelicoidA(a) => a.rays(),
            FamilySpec::GenHelicoidB { rays, .. } => *rays,
            FamilySpec::Bdj { pitch } => pitch.rays(),
            FamilySpec::HarveyLawsonCone { .. } => 2,
            _ => 0,
        };
        (n - count..n).collect()
    }

    fn screw(&self) -> Option<ScrewSymmetry> {
        match self {
            FamilySpec::GenHelicoidA(a) => Some(a.pitch.symmetry(a.theta_index())),
            FamilySpec::GenHelicoidB {
                lambda,
                lambda0,
                rays,
                block,
            } => Some(ScrewSymmetry {
                lambda0: *lambda0,
                lambdas: vec![*lambda; *rays],
                theta_index: block.param_dim(),
                layout: ComplexLayout::Blocked,
            }),
            FamilySpec::ChoeHoppe { n, lambda, .. } => Some(ScrewSymmetry {
                lambda0: *lambda,
                lambdas: vec![1.0],
                theta_index: 2 * (n - 1),
                layout: ComplexLayout::Interleaved,
            }),
            FamilySpec::Bdj { pitch } => Some(pitch.symmetry(0)),
            _ => None,
        }
    }

    fn guards(&self, policy: &GuardPolicy) -> Vec<Guard> {
        let eps_r = policy.eps_r;
        let eps_p = policy.eps_p;
        let ce = policy.chart_eps;
        let mut guards = Vec::new();
        let radial = self.radial_params();
        match self {
            FamilySpec::CliffordTorus { block } => {
                guards.extend(block_chart_guard(block, 0, ce));
            }
            FamilySpec::CliffordCone { block } | FamilySpec::LRaysCliffordCone { block, .. } => {
                guards.extend(block_chart_guard(block, 0, ce));
                guards.push(radial_norm_guard(radial, eps_r));
            }
            FamilySpec::LRaysCone { base, .. } => {
                guards.extend(base.guards(policy));
                guards.push(radial_norm_guard(radial, eps_r));
            }
            FamilySpec::SphericalJoin { rays, chart, base } => {
                guards.extend(base.guards(policy));
                let start = base.map_unchecked().param_dim();
                guards.extend(chart_guard(chart, rays - 1, start, ce));
            }
            FamilySpec::GenHelicoidA(a) => {
                for (s, b) in a.blocks.iter().enumerate() {
                    guards.extend(block_chart_guard(b, a.block_range(s).start, ce));
                }
                let r_idx: Vec<usize> = (0..a.rays()).map(|s| a.r_index(s)).collect();
                guards.push(Guard::min_abs(r_idx, eps_r));
                let spec = a.clone();
                guards.push(Guard::new(format!("P > {eps_p} R"), move |p| {
                    spec.p_value(p) > eps_p * spec.r_value(p)
                }));
            }
            FamilySpec::GenHelicoidB {
                lambda,
                lambda0,
                rays,
                block,
            } => {
                guards.extend(block_chart_guard(block, 0, ce));
                let m = block.param_dim();
                let r_idx: Vec<usize> = (m + 1..m + 1 + rays).collect();
                guards.push(radial_norm_guard(r_idx.clone(), eps_r));
                let (lam, lam0, b) = (*lambda, *lambda0, block.clone());
                guards.push(Guard::new(format!("P > {eps_p} R"), move |p| {
                    let delta = b.dot_d_jc(&p[..m]);
                    let rho2: f64 = r_idx.iter().map(|&i| p[i] * p[i]).sum();
                    lam0 * lam0 + lam * lam * rho2 * delta * delta > eps_p * (lam0 * lam0 + lam * lam * rho2)
                }));
            }
            FamilySpec::ChoeHoppe {
                n,
                lambda,
                chart_p,
                chart_q,
            } => {
                let d = n - 1;
                guards.extend(chart_guard(chart_p, d, 0, ce));
                guards.extend(chart_guard(chart_q, d, d, ce));
                guards.push(Guard::min_abs(vec![2 * d + 1], eps_r));
                let (lam, cp, cq) = (*lambda, chart_p.clone(), chart_q.clone());
                guards.push(Guard::new(format!("P > {eps_p} R"), move |p| {
                    let x = cp.map(d, &p[..d], &0.0);
                    let y = cq.map(d, &p[d..2 * d], &0.0);
                    let xy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
                    let r = p[2 * d + 1];
                    lam * lam + r * r * xy * xy > eps_p * (lam * lam + r * r)
                }));
            }
            FamilySpec::Bdj { pitch } => {
                let pitch = pitch.clone();
                guards.push(Guard::new(format!("R > {eps_p}"), move |p| {
                    let r: f64 = pitch
                        .lambdas
                        .iter()
                        .zip(&p[1..])
                        .map(|(l, r)| l * l * r * r)
                        .sum();
                    pitch.lambda0 * pitch.lambda0 + r > eps_p
                }));
            }
            FamilySpec::HarveyLawsonCone { n, chart_x, chart_y } => {
                guards.extend(chart_guard(chart_x, *n, 0, ce));
                guards.extend(chart_guard(chart_y, *n, *n, ce));
                guards.push(radial_norm_guard(radial, eps_r));
            }
            FamilySpec::SphericalSlice { inner, chart } => {
                for (s, b) in inner.blocks.iter().enumerate() {
                    guards.extend(block_chart_guard(b, inner.block_range(s).start, ce));
                }
                guards.extend(chart_guard(chart, inner.rays() - 1, inner.theta_index() + 1, ce));
            }
            FamilySpec::RoundSphere { dim, chart } => {
                guards.extend(chart_guard(chart, *dim, 0, ce));
            }
            FamilySpec::LawsonSurface { .. } | FamilySpec::LatitudeCircle { .. } | FamilySpec::Cylinder { .. } => {}
        }
        guards
    }
}

fn check_rays(rays: usize) -> Result<(), SpecError> {
    if rays == 0 {
        Err(SpecError::invalid("rays", "must be at least 1"))
    } else {
        Ok(())
    }
}

fn check_base(base: &FamilySpec) -> Result<(), SpecError> {
    base.validate()
        .map_err(|e| SpecError::invalid("base", e.to_string()))?;
    if !base.is_spherical() {
        return Err(SpecError::invalid(
            "base",
            format!("`{}` does not lie in the unit sphere", base.kind()),
        ));
    }
    Ok(())
}

fn with_radial(mut b: Vec<(f64, f64)>, count: usize) -> Vec<(f64, f64)> {
    b.extend(std::iter::repeat_n(RADIAL_BOX, count));
    b
}

fn chart_guard(chart: &SphereChart, dim: usize, start: usize, eps: f64) -> Option<Guard> {
    if chart.kind != ChartKind::Trigonometric || dim < 2 {
        return None;
    }
    let chart = chart.clone();
    Some(Guard::new(
        format!("|sin φ| > {eps} on polar angles {start}..{}", start + dim - 1),
        move |p| chart.admits(dim, &p[start..start + dim], eps),
    ))
}

fn block_chart_guard(block: &CliffordBlock, start: usize, eps: f64) -> Vec<Guard> {
    chart_guard(&block.chart_x, block.n, start, eps)
        .into_iter()
        .chain(chart_guard(&block.chart_y, block.n, start + block.n, eps))
        .collect()
}

fn radial_norm_guard(indices: Vec<usize>, eps: f64) -> Guard {
    Guard::new(format!("|r| > {eps} over {indices:?}"), move |p| {
        indices.iter().map(|&i| p[i] * p[i]).sum::<f64>() > eps * eps
    })
}

pub fn build_immersion(spec: &FamilySpec) -> Result<Immersion, SpecError> {
    build_immersion_with(spec, &GuardPolicy::default())
}

pub fn build_immersion_with(spec: &FamilySpec, policy: &GuardPolicy) -> Result<Immersion, SpecError> {
    let map = spec.family_map()?;
    if map.param_dim() == 0 {
        return Err(SpecError::invalid("family", "has no parameters"));
    }
    let traits = ImmersionTraits {
        target: if spec.is_spherical() {
            Target::UnitSphere
        } else {
            Target::Euclidean
        },
        expect_minimal: spec.expect_minimal(),
        screw: spec.screw(),
        radial_params: spec.radial_params(),
    };
    let mut imm = Immersion::new(spec.kind(), map, ParamBox(spec.default_box()));
    imm.rank_tol = policy.rank_tol;
    for g in spec.guards(policy) {
        imm = imm.with_guard(g);
    }
    Ok(imm.with_traits(traits))
}
