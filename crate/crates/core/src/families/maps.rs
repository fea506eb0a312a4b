use super::charts::{rotate_block, CliffordBlock, SphereChart};
use crate::derivkit::Scalar;
use crate::geom::ParametricMap;

fn carrier<S: Scalar>(u: &[S]) -> S {
    u[0].zero_like()
}

/// Clifford torus `C(u)` in `S^{2N+1}`.
#[derive(Clone, Debug)]
pub struct TorusMap {
    pub block: CliffordBlock,
}

/// `(u, r) ↦ r C(u)`.
#[derive(Clone, Debug)]
pub struct CliffordConeMap {
    pub block: CliffordBlock,
}

/// `(u, r_1..r_L) ↦ (r_1 F(u), …, r_L F(u))` for a sphere-valued `F`.
#[derive(Clone, Debug)]
pub struct RaysConeMap {
    pub base: Box<FamilyMap>,
    pub rays: usize,
}

/// `(u, v) ↦ (x_1 F(u), …, x_L F(u))` with `x(v)` on `S^{L−1}`.
#[derive(Clone, Debug)]
pub struct JoinMap {
    pub base: Box<FamilyMap>,
    pub rays: usize,
    pub chart: SphereChart,
}

/// `(u^1..u^L, Θ, r_1..r_L) ↦ (r_1 e^{iλ_1Θ} C^1, …, r_L e^{iλ_LΘ} C^L, λ_0Θ)`.
#[derive(Clone, Debug)]
pub struct HelicoidAMap {
    pub lambda0: f64,
    pub lambdas: Vec<f64>,
    pub blocks: Vec<CliffordBlock>,
}

/// `(u, Θ, r_1..r_L) ↦ (r_1 e^{iλΘ} C, …, r_L e^{iλΘ} C, λ_0Θ)`.
#[derive(Clone, Debug)]
pub struct HelicoidBMap {
    pub lambda: f64,
    pub lambda0: f64,
    pub rays: usize,
    pub block: CliffordBlock,
}

/// Helicoid over the real cone of `R^{2N}` written in interleaved complex
/// coordinates: `(u_p, u_q, Θ, r) ↦ (x_1, y_1, …, x_N, y_N, λΘ)` with
/// `x_k + i y_k = e^{iΘ}(p_k + i q_k)`, `(p, q) = r (X, Y)/√2`.
#[derive(Clone, Debug)]
pub struct ChoeHoppeMap {
    pub n: usize,
    pub lambda: f64,
    pub chart_p: SphereChart,
    pub chart_q: SphereChart,
}

/// `(Θ, r_1..r_L) ↦ (r_1 e^{iλ_1Θ}, …, r_L e^{iλ_LΘ}, λ_0Θ)` in `R^{2L+1}`.
#[derive(Clone, Debug)]
pub struct BdjMap {
    pub lambda0: f64,
    pub lambdas: Vec<f64>,
}

/// `(t, Θ) ↦ (cos t e^{iλ_1Θ}, sin t e^{iλ_2Θ})` in `S^3`.
#[derive(Clone, Debug)]
pub struct LawsonMap {
    pub lambda1: f64,
    pub lambda2: f64,
}

/// `(u_x, u_y, r_1, r_2) ↦ (r_1 X, r_1 Y, r_2 X, r_2 Y)`.
#[derive(Clone, Debug)]
pub struct HarveyLawsonMap {
    pub n: usize,
    pub chart_x: SphereChart,
    pub chart_y: SphereChart,
}

/// `(u^1..u^L, Θ, v) ↦ (x_1 e^{iλ_1Θ} C^1, …, x_L e^{iλ_LΘ} C^L)` with
/// `x(v)` on `S^{L−1}`.
#[derive(Clone, Debug)]
pub struct SliceMap {
    pub lambdas: Vec<f64>,
    pub blocks: Vec<CliffordBlock>,
    pub chart: SphereChart,
}

/// `φ ↦ (ρ cos φ, ρ sin φ, h)`, `ρ = √(1 − h²)`.
#[derive(Clone, Debug)]
pub struct LatitudeMap {
    pub height: f64,
}

/// `(φ, z) ↦ (R cos φ, R sin φ, z)`.
#[derive(Clone, Debug)]
pub struct CylinderMap {
    pub radius: f64,
}

#[derive(Clone, Debug)]
pub struct RoundSphereMap {
    pub dim: usize,
    pub chart: SphereChart,
}

/// Every family map behind one type, so composite families can call their
/// base generically.
#[derive(Clone, Debug)]
pub enum FamilyMap {
    Torus(TorusMap),
    CliffordCone(CliffordConeMap),
    RaysCone(RaysConeMap),
    Join(JoinMap),
    HelicoidA(HelicoidAMap),
    HelicoidB(HelicoidBMap),
    ChoeHoppe(ChoeHoppeMap),
    Bdj(BdjMap),
    Lawson(LawsonMap),
    HarveyLawson(HarveyLawsonMap),
    Slice(SliceMap),
    Latitude(LatitudeMap),
    Cylinder(CylinderMap),
    RoundSphere(RoundSphereMap),
}

impl ParametricMap for TorusMap {
    fn param_dim(&self) -> usize {
        self.block.param_dim()
    }
    fn ambient_dim(&self) -> usize {
        self.block.ambient_dim()
    }
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        self.block.point(u, &carrier(u))
    }
}

impl ParametricMap for CliffordConeMap {
    fn param_dim(&self) -> usize {
        self.block.param_dim() + 1
    }
    fn ambient_dim(&self) -> usize {
        self.block.ambient_dim()
    }
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let m = self.block.param_dim();
        let r = &u[m];
        self.block
            .point(&u[..m], &carrier(u))
            .into_iter()
            .map(|c| c * r.clone())
            .collect()
    }
}

impl ParametricMap for RaysConeMap {
    fn param_dim(&self) -> usize {
        self.base.param_dim() + self.rays
    }
    fn ambient_dim(&self) -> usize {
        self.base.ambient_dim() * self.rays
    }
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let m = self.base.param_dim();
        let f = self.base.map(&u[..m]);
        u[m..]
            .iter()
            .flat_map(|r| f.iter().map(move |x| x.clone() * r.clone()))
            .collect()
    }
}

impl ParametricMap for JoinMap {
    fn param_dim(&self) -> usize {
        self.base.param_dim() + self.rays - 1
    }
    fn ambient_dim(&self) -> usize {
        self.base.ambient_dim() * self.rays
    }
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let m = self.base.param_dim();
        let f = self.base.map(&u[..m]);
        let x = self.chart.map(self.rays - 1, &u[m..], &carrier(u));
        x.iter()
            .flat_map(|xs| f.iter().map(move |v| v.clone() * xs.clone()))
            .collect()
    }
}

impl ParametricMap for HelicoidAMap {
    fn param_dim(&self) -> usize {
        self.blocks.iter().map(CliffordBlock::param_dim).sum::<usize>() + 1 + self.blocks.len()
    }
    fn ambient_dim(&self) -> usize {
        self.blocks.iter().map(CliffordBlock::ambient_dim).sum::<usize>() + 1
    }
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let zero = carrier(u);
        let theta_at = self.blocks.iter().map(CliffordBlock::param_dim).sum::<usize>();
        let theta = &u[theta_at];
        let mut out = Vec::with_capacity(self.ambient_dim());
        let mut offset = 0;
        for (s, block) in self.blocks.iter().enumerate() {
            let m = block.param_dim();
            let c = block.point(&u[offset..offset + m], &zero);
            offset += m;
            let r = &u[theta_at + 1 + s];
            let rotated = rotate_block(&c, &(theta.clone() * self.lambdas[s]));
            out.extend(rotated.into_iter().map(|x| x * r.clone()));
        }
        out.push(theta.clone() * self.lambda0);
        out
    }
}

impl ParametricMap for HelicoidBMap {
    fn param_dim(&self) -> usize {
        self.block.param_dim() + 1 + self.rays
    }
    fn ambient_dim(&self) -> usize {
        self.block.ambient_dim() * self.rays + 1
    }
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let m = self.block.param_dim();
        let theta = &u[m];
        let c = self.block.point(&u[..m], &carrier(u));
        let rotated = rotate_block(&c, &(theta.clone() * self.lambda));
        let mut out: Vec<S> = u[m + 1..]
            .iter()
            .flat_map(|r| rotated.iter().map(move |x| x.clone() * r.clone()))
            .collect();
        out.push(theta.clone() * self.lambda0);
        out
    }
}

impl ParametricMap for ChoeHoppeMap {
    fn param_dim(&self) -> usize {
        2 * self.n
    }
    fn ambient_dim(&self) -> usize {
        2 * self.n + 1
    }
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let d = self.n - 1;
        let zero = carrier(u);
        let x = self.chart_p.map(d, &u[..d], &zero);
        let y = self.chart_q.map(d, &u[d..2 * d], &zero);
        let theta = &u[2 * d];
        let r = u[2 * d + 1].clone() * std::f64::consts::FRAC_1_SQRT_2;
        let (c, s) = (theta.cos(), theta.sin());
        let mut out = Vec::with_capacity(self.ambient_dim());
        for (xk, yk) in x.iter().zip(&y) {
            let p = r.clone() * xk.clone();
            let q = r.clone() * yk.clone();
            out.push(p.clone() * c.clone() - q.clone() * s.clone());
            out.push(q * c.clone() + p * s.clone());
        }
        out.push(theta.clone() * self.lambda);
        out
    }
}

impl ParametricMap for BdjMap {
    fn param_dim(&self) -> usize {
        1 + self.lambdas.len()
    }
    fn ambient_dim(&self) -> usize {
        2 * self.lambdas.len() + 1
    }
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let theta = &u[0];
        let mut out = Vec::with_capacity(self.ambient_dim());
        for (lam, r) in self.lambdas.iter().zip(&u[1..]) {
            let a = theta.clone() * *lam;
            out.push(r.clone() * a.cos());
            out.push(r.clone() * a.sin());
        }
        out.push(theta.clone() * self.lambda0);
        out
    }
}

impl ParametricMap for LawsonMap {
    fn param_dim(&self) -> usize {
        2
    }
    fn ambient_dim(&self) -> usize {
        4
    }
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let (t, theta) = (&u[0], &u[1]);
        let a = theta.clone() * self.lambda1;
        let b = theta.clone() * self.lambda2;
        vec![t.cos() * a.cos(), t.cos() * a.sin(), t.sin() * b.cos(), t.sin() * b.sin()]
    }
}

impl ParametricMap for HarveyLawsonMap {
    fn param_dim(&self) -> usize {
        2 * self.n + 2
    }
    fn ambient_dim(&self) -> usize {
        4 * self.n + 4
    }
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let n = self.n;
        let zero = carrier(u);
        let x = self.chart_x.map(n, &u[..n], &zero);
        let y = self.chart_y.map(n, &u[n..2 * n], &zero);
        let mut out = Vec::with_capacity(self.ambient_dim());
        for r in &u[2 * n..] {
            out.extend(x.iter().map(|v| v.clone() * r.clone()));
            out.extend(y.iter().map(|v| v.clone() * r.clone()));
        }
        out
    }
}

impl ParametricMap for SliceMap {
    fn param_dim(&self) -> usize {
        self.blocks.iter().map(CliffordBlock::param_dim).sum::<usize>() + self.blocks.len()
    }
    fn ambient_dim(&self) -> usize {
        self.blocks.iter().map(CliffordBlock::ambient_dim).sum()
    }
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let zero = carrier(u);
        let theta_at = self.blocks.iter().map(CliffordBlock::param_dim).sum::<usize>();
        let theta = &u[theta_at];
        let x = self.chart.map(self.blocks.len() - 1, &u[theta_at + 1..], &zero);
        let mut out = Vec::with_capacity(self.ambient_dim());
        let mut offset = 0;
        for (s, block) in self.blocks.iter().enumerate() {
            let m = block.param_dim();
            let c = block.point(&u[offset..offset + m], &zero);
            offset += m;
            let rotated = rotate_block(&c, &(theta.clone() * self.lambdas[s]));
            out.extend(rotated.into_iter().map(|v| v * x[s].clone()));
        }
        out
    }
}

impl ParametricMap for LatitudeMap {
    fn param_dim(&self) -> usize {
        1
    }
    fn ambient_dim(&self) -> usize {
        3
    }
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let rho = (1.0 - self.height * self.height).sqrt();
        vec![u[0].cos() * rho, u[0].sin() * rho, u[0].lift(self.height)]
    }
}

impl ParametricMap for CylinderMap {
    fn param_dim(&self) -> usize {
        2
    }
    fn ambient_dim(&self) -> usize {
        3
    }
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        vec![u[0].cos() * self.radius, u[0].sin() * self.radius, u[1].clone()]
    }
}

impl ParametricMap for RoundSphereMap {
    fn param_dim(&self) -> usize {
        self.dim
    }
    fn ambient_dim(&self) -> usize {
        self.dim + 1
    }
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        self.chart.map(self.dim, u, &carrier(u))
    }
}

macro_rules! dispatch {
    ($self:ident, $m:ident => $body:expr) => {
        match $self {
            FamilyMap::Torus($m) => $body,
            FamilyMap::CliffordCone($m) => $body,
            FamilyMap::RaysCone($m) => $body,
            FamilyMap::Join($m) => $body,
            FamilyMap::HelicoidA($m) => $body,
            FamilyMap::HelicoidB($m) => $body,
            FamilyMap::ChoeHoppe($m) => $body,
            FamilyMap::Bdj($m) => $body,
            FamilyMap::Lawson($m) => $body,
            FamilyMap::HarveyLawson($m) => $body,
            FamilyMap::Slice($m) => $body,
            FamilyMap::Latitude($m) => $body,
            FamilyMap::Cylinder($m) => $body,
            FamilyMap::RoundSphere($m) => $body,
        }
    };
}

impl ParametricMap for FamilyMap {
    fn param_dim(&self) -> usize {
        dispatch!(self, m => m.param_dim())
    }
    fn ambient_dim(&self) -> usize {
        dispatch!(self, m => m.ambient_dim())
    }
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        dispatch!(self, m => m.map(u))
    }
}
