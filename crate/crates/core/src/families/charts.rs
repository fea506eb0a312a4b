use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::SpecError;
use crate::derivkit::{Jet2, Scalar};
use crate::geom::{metric, GeomError, PointEval};

/// Matrices supplied in configs are accepted when `|M^T M − I|_max` and
/// `|U J − J U|_max` stay below this.
pub const MATRIX_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartKind {
    /// Inverse stereographic projection from the last pole; no coordinate
    /// singularities.
    #[default]
    Stereographic,
    /// Hyperspherical angles; polar angles must stay away from `0` and `π`.
    Trigonometric,
}

/// Local chart `u ↦ X(u)` of the unit sphere `S^N ⊂ R^{N+1}`.
///
/// For `N = 0` the sphere is `{±1}`; the chart then has no parameters and
/// `branch` selects the point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereChart {
    #[serde(default)]
    pub kind: ChartKind,
    /// Optional orthogonal `(N+1) x (N+1)` matrix applied to the image.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<Vec<Vec<f64>>>,
    #[serde(default = "default_branch")]
    pub branch: i8,
}

fn default_branch() -> i8 {
    1
}

impl Default for SphereChart {
    fn default() -> Self {
        Self {
            kind: ChartKind::Stereographic,
            rotation: None,
            branch: 1,
        }
    }
}

impl SphereChart {
    pub fn trigonometric() -> Self {
        Self {
            kind: ChartKind::Trigonometric,
            ..Self::default()
        }
    }

    pub fn with_branch(branch: i8) -> Self {
        Self {
            branch,
            ..Self::default()
        }
    }

    pub fn validate(&self, dim: usize, field: &str) -> Result<(), SpecError> {
        if self.branch != 1 && self.branch != -1 {
            return Err(SpecError::invalid(format!("{field}.branch"), "must be +1 or -1"));
        }
        if let Some(rot) = &self.rotation {
            let m = square_matrix(rot, dim + 1, &format!("{field}.rotation"))?;
            let defect = (m.transpose() * &m - DMatrix::identity(dim + 1, dim + 1)).amax();
            if defect > MATRIX_TOL {
                return Err(SpecError::invalid(
                    format!("{field}.rotation"),
                    format!("not orthogonal (|R^T R - I| = {defect:e})"),
                ));
            }
        }
        Ok(())
    }

    pub fn default_box(&self, dim: usize) -> Vec<(f64, f64)> {
        match self.kind {
            ChartKind::Stereographic => vec![(-2.0, 2.0); dim],
            ChartKind::Trigonometric => (0..dim)
                .map(|k| if k + 1 < dim { (0.3, PI - 0.3) } else { (-PI, PI) })
                .collect(),
        }
    }

    /// Chart-level admissibility: polar angles of trigonometric charts must
    /// keep `|sin φ| > eps`.
    pub fn admits(&self, dim: usize, u: &[f64], eps: f64) -> bool {
        match self.kind {
            ChartKind::Stereographic => true,
            ChartKind::Trigonometric => u.iter().take(dim.saturating_sub(1)).all(|p| p.sin().abs() > eps),
        }
    }

    /// `X(u) ∈ R^{dim+1}`; `zero` only provides the derivative carrier.
    pub fn map<S: Scalar>(&self, dim: usize, u: &[S], zero: &S) -> Vec<S> {
        debug_assert_eq!(u.len(), dim);
        let raw = if dim == 0 {
            vec![zero.lift(f64::from(self.branch))]
        } else {
            match self.kind {
                ChartKind::Stereographic => {
                    let mut s = u[0].square();
                    for x in &u[1..] {
                        s = s + x.square();
                    }
                    let inv = (s.clone() + 1.0).recip();
                    let mut out: Vec<S> = u.iter().map(|x| x.clone() * 2.0 * inv.clone()).collect();
                    out.push((s - 1.0) * inv);
                    out
                }
                ChartKind::Trigonometric => {
                    let mut out = Vec::with_capacity(dim + 1);
                    let mut sin_prod: Option<S> = None;
                    for phi in u {
                        let c = phi.cos();
                        out.push(match &sin_prod {
                            Some(sp) => sp.clone() * c,
                            None => c,
                        });
                        let s = phi.sin();
                        sin_prod = Some(match sin_prod {
                            Some(sp) => sp * s,
                            None => s,
                        });
                    }
                    out.push(sin_prod.expect("dim > 0"));
                    out
                }
            }
        };
        match &self.rotation {
            None => raw,
            Some(rot) => rot
                .iter()
                .map(|row| {
                    let mut acc = zero.clone();
                    for (r, x) in row.iter().zip(&raw) {
                        acc = acc + x.clone() * *r;
                    }
                    acc
                })
                .collect(),
        }
    }
}

fn square_matrix(rows: &[Vec<f64>], size: usize, field: &str) -> Result<DMatrix<f64>, SpecError> {
    if rows.len() != size || rows.iter().any(|r| r.len() != size) {
        return Err(SpecError::invalid(field, format!("expected a {size}x{size} matrix")));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(SpecError::invalid(field, "entries must be finite"));
    }
    Ok(DMatrix::from_fn(size, size, |r, c| rows[r][c]))
}

/// `J(a, b) = (−b, a)` on a block laid out as `(Re, Im)` halves.
pub fn apply_j<S: Scalar>(v: &[S]) -> Vec<S> {
    let m = v.len() / 2;
    debug_assert_eq!(v.len(), 2 * m);
    let mut out = Vec::with_capacity(v.len());
    out.extend(v[m..].iter().map(|x| -x.clone()));
    out.extend(v[..m].iter().cloned());
    out
}

/// Multiplication by `e^{iθ}` on a block laid out as `(Re, Im)` halves.
pub fn rotate_block<S: Scalar>(v: &[S], theta: &S) -> Vec<S> {
    let (c, s) = (theta.cos(), theta.sin());
    let jv = apply_j(v);
    v.iter()
        .zip(jv)
        .map(|(x, y)| x.clone() * c.clone() + y * s.clone())
        .collect()
}

/// Real `2m x 2m` representation `[[A, −B], [B, A]]` of the complex matrix `A + iB`.
pub fn real_representation(u: &DMatrix<Complex<f64>>) -> Vec<Vec<f64>> {
    let m = u.nrows();
    let mut out = vec![vec![0.0; 2 * m]; 2 * m];
    for r in 0..m {
        for c in 0..m {
            let z = u[(r, c)];
            out[r][c] = z.re;
            out[r][c + m] = -z.im;
            out[r + m][c] = z.im;
            out[r + m][c + m] = z.re;
        }
    }
    out
}

/// Random unitary of `C^m` (QR of a Gaussian-like matrix), as a real matrix.
pub fn random_unitary<R: Rng>(m: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let a = DMatrix::from_fn(m, m, |_, _| {
        Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let q = a.qr().q();
    real_representation(&q)
}

/// One Clifford torus `(1/√2) S^N × (1/√2) S^N ⊂ S^{2N+1}` with its own
/// charts and an optional complex-linear isometry of `C^{N+1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliffordBlock {
    pub n: usize,
    #[serde(default)]
    pub chart_x: SphereChart,
    #[serde(default)]
    pub chart_y: SphereChart,
    /// Real `(2N+2) x (2N+2)` matrix; must be orthogonal and commute with `J`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitary: Option<Vec<Vec<f64>>>,
}

impl CliffordBlock {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            chart_x: SphereChart::default(),
            chart_y: SphereChart::default(),
            unitary: None,
        }
    }

    pub fn with_kind(n: usize, kind: ChartKind) -> Self {
        let chart = SphereChart {
            kind,
            ..SphereChart::default()
        };
        Self {
            n,
            chart_x: chart.clone(),
            chart_y: chart,
            unitary: None,
        }
    }

    pub fn with_unitary(mut self, unitary: Vec<Vec<f64>>) -> Self {
        self.unitary = Some(unitary);
        self
    }

    pub fn param_dim(&self) -> usize {
        2 * self.n
    }

    pub fn ambient_dim(&self) -> usize {
        2 * self.n + 2
    }

    pub fn validate(&self, field: &str) -> Result<(), SpecError> {
        self.chart_x.validate(self.n, &format!("{field}.chart_x"))?;
        self.chart_y.validate(self.n, &format!("{field}.chart_y"))?;
        if let Some(rows) = &self.unitary {
            let size = self.ambient_dim();
            let u = square_matrix(rows, size, &format!("{field}.unitary"))?;
            let orth = (u.transpose() * &u - DMatrix::identity(size, size)).amax();
            if orth > MATRIX_TOL {
                return Err(SpecError::invalid(
                    format!("{field}.unitary"),
                    format!("not orthogonal (|U^T U - I| = {orth:e})"),
                ));
            }
            let j = DMatrix::from_fn(size, size, |r, c| {
                let m = self.n + 1;
                if r < m && c == r + m {
                    -1.0
                } else if r >= m && c + m == r {
                    1.0
                } else {
                    0.0
                }
            });
            let comm = (&u * &j - &j * &u).amax();
            if comm > MATRIX_TOL {
                return Err(SpecError::invalid(
                    format!("{field}.unitary"),
                    format!("does not commute with J (|UJ - JU| = {comm:e}); only complex-linear isometries are allowed"),
                ));
            }
        }
        Ok(())
    }

    pub fn default_box(&self) -> Vec<(f64, f64)> {
        let mut b = self.chart_x.default_box(self.n);
        b.extend(self.chart_y.default_box(self.n));
        b
    }

    pub fn admits(&self, u: &[f64], eps: f64) -> bool {
        self.chart_x.admits(self.n, &u[..self.n], eps) && self.chart_y.admits(self.n, &u[self.n..], eps)
    }

    fn apply_unitary<S: Scalar>(&self, v: Vec<S>, zero: &S) -> Vec<S> {
        match &self.unitary {
            None => v,
            Some(rows) => rows
                .iter()
                .map(|row| {
                    let mut acc = zero.clone();
                    for (a, x) in row.iter().zip(&v) {
                        if *a != 0.0 {
                            acc = acc + x.clone() * *a;
                        }
                    }
                    acc
                })
                .collect(),
        }
    }

    /// Torus point `C = U (X, Y)/√2` and unit normal `D = U (X, −Y)/√2`.
    pub fn frame_map<S: Scalar>(&self, u: &[S], zero: &S) -> (Vec<S>, Vec<S>) {
        let n = self.n;
        let x = self.chart_x.map(n, &u[..n], zero);
        let y = self.chart_y.map(n, &u[n..2 * n], zero);
        let mut c = Vec::with_capacity(2 * n + 2);
        let mut d = Vec::with_capacity(2 * n + 2);
        for xi in &x {
            c.push(xi.clone() * FRAC_1_SQRT_2);
            d.push(xi.clone() * FRAC_1_SQRT_2);
        }
        for yi in &y {
            c.push(yi.clone() * FRAC_1_SQRT_2);
            d.push(-(yi.clone() * FRAC_1_SQRT_2));
        }
        (self.apply_unitary(c, zero), self.apply_unitary(d, zero))
    }

    pub fn point<S: Scalar>(&self, u: &[S], zero: &S) -> Vec<S> {
        self.frame_map(u, zero).0
    }

    /// `D · JC` at a torus point (equal to `−X · Y`).
    pub fn dot_d_jc(&self, u: &[f64]) -> f64 {
        let (c, d) = self.frame_map(u, &0.0);
        d.iter().zip(apply_j(&c)).map(|(a, b)| a * b).sum()
    }
}

/// Frame of a Clifford torus at one chart point.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordFrame {
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub jc: Vec<f64>,
    pub jd: Vec<f64>,
    /// `w_j = ∂C/∂u_j · JC`.
    pub w: Vec<f64>,
    pub d_dot_jc: f64,
}

/// Jets of `C` and `D` over the `2N` torus parameters.
pub fn torus_jets(block: &CliffordBlock, u: &[f64]) -> (Vec<Jet2>, Vec<Jet2>) {
    if u.is_empty() {
        let (c, d) = block.frame_map(&[], &Jet2::constant(0, 0.0));
        return (c, d);
    }
    let seeds = Jet2::seed(u);
    let zero = seeds[0].zero_like();
    block.frame_map(&seeds, &zero)
}

pub fn check_chart_point(block: &CliffordBlock, u: &[f64], eps: f64) -> Result<(), SpecError> {
    if u.len() != block.param_dim() {
        return Err(SpecError::ChartDomain(format!(
            "expected {} torus parameters, got {}",
            block.param_dim(),
            u.len()
        )));
    }
    if !block.admits(u, eps) {
        return Err(SpecError::ChartDomain(format!(
            "{u:?} is on a trigonometric chart singularity"
        )));
    }
    Ok(())
}

/// `C`, `D`, `JC`, `JD`, `w` and `D · JC` at a torus chart point.
pub fn clifford_frame(block: &CliffordBlock, u: &[f64]) -> Result<CliffordFrame, SpecError> {
    check_chart_point(block, u, super::DEFAULT_CHART_EPS)?;
    let (cj, dj) = torus_jets(block, u);
    let c: Vec<f64> = cj.iter().map(Scalar::value).collect();
    let d: Vec<f64> = dj.iter().map(Scalar::value).collect();
    let jc = apply_j(&c);
    let jd = apply_j(&d);
    let w = (0..block.param_dim())
        .map(|j| cj.iter().zip(&jc).map(|(cc, x)| cc.grad()[j] * x).sum())
        .collect();
    let d_dot_jc = d.iter().zip(&jc).map(|(a, b)| a * b).sum();
    Ok(CliffordFrame {
        c,
        d,
        jc,
        jd,
        w,
        d_dot_jc,
    })
}

/// Point evaluation of the torus chart itself (for its metric).
pub fn torus_point_eval(block: &CliffordBlock, u: &[f64]) -> PointEval {
    PointEval::from_jets(&torus_jets(block, u).0)
}

/// Determinant of the torus metric; `1` for the parameter-free `N = 0` torus.
pub fn torus_metric_det(block: &CliffordBlock, u: &[f64]) -> Result<f64, GeomError> {
    if block.n == 0 {
        return Ok(1.0);
    }
    Ok(metric(&torus_point_eval(block, u))?.det_g)
}
