use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::RunError;
use crate::geom::{GeomError, Immersion};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProjectionPreset {
    /// First two ambient coordinates, last coordinate as height.
    #[serde(rename = "last-axis")]
    LastAxis,
}

/// Which ambient coordinates become the OBJ `x, y, z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Projection {
    Axes([usize; 3]),
    Preset(ProjectionPreset),
}

impl Default for Projection {
    fn default() -> Self {
        Projection::Axes([0, 1, 2])
    }
}

impl Projection {
    pub fn axes(&self, ambient_dim: usize) -> Result<[usize; 3], GeomError> {
        let axes = match self {
            Projection::Axes(a) => *a,
            Projection::Preset(ProjectionPreset::LastAxis) => [0, 1, ambient_dim.saturating_sub(1)],
        };
        match axes.iter().find(|&&i| i >= ambient_dim) {
            Some(&i) => Err(GeomError::DimensionMismatch {
                expected: ambient_dim,
                got: i + 1,
            }),
            None => Ok(axes),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshConfig {
    /// Grid vertices along each varied parameter.
    pub resolution: usize,
    /// The two varied parameters.
    pub params: [usize; 2],
    /// Values of the remaining parameters; the sampling box midpoint when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed: Option<Vec<f64>>,
    pub projection: Projection,
}

impl Default for MeshConfig {
    fn default() -> Self {
        Self {
            resolution: 64,
            params: [0, 1],
            fixed: None,
            projection: Projection::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    /// Zero-based triangles.
    pub faces: Vec<[usize; 3]>,
}

/// Samples a regular grid over two parameters and splits each quad into
/// two triangles. Ranges come from `domain`, one interval per parameter.
pub fn tessellate(imm: &Immersion, domain: &[(f64, f64)], cfg: &MeshConfig) -> Result<Mesh, RunError> {
    let n = imm.param_dim();
    let res = cfg.resolution;
    if res < 2 {
        return Err(RunError::Config("mesh resolution must be at least 2".into()));
    }
    let [a, b] = cfg.params;
    if a == b || a >= n || b >= n {
        return Err(RunError::Config(format!(
            "mesh params {:?} must be two distinct indices below {n}",
            cfg.params
        )));
    }
    if domain.len() != n {
        return Err(GeomError::DimensionMismatch {
            expected: n,
            got: domain.len(),
        }
        .into());
    }
    let axes = cfg.projection.axes(imm.ambient_dim())?;
    let base = match &cfg.fixed {
        Some(f) if f.len() != n => {
            return Err(GeomError::DimensionMismatch {
                expected: n,
                got: f.len(),
            }
            .into())
        }
        Some(f) => f.clone(),
        None => domain.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect(),
    };
    let at = |(lo, hi): (f64, f64), k: usize| lo + (hi - lo) * k as f64 / (res - 1) as f64;

    let mut vertices = Vec::with_capacity(res * res);
    let mut p = base;
    for i in 0..res {
        p[a] = at(domain[a], i);
        for j in 0..res {
            p[b] = at(domain[b], j);
            let x = imm.position(&p)?;
            vertices.push([x[axes[0]], x[axes[1]], x[axes[2]]]);
        }
    }
    let idx = |i: usize, j: usize| i * res + j;
    let mut faces = Vec::with_capacity(2 * (res - 1) * (res - 1));
    for i in 0..res - 1 {
        for j in 0..res - 1 {
            faces.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            faces.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    Ok(Mesh { vertices, faces })
}

/// Wavefront OBJ with `v` and `f` records only.
pub fn to_obj(mesh: &Mesh) -> String {
    let mut out = String::with_capacity(32 * mesh.vertices.len());
    for [x, y, z] in &mesh.vertices {
        writeln!(out, "v {x:?} {y:?} {z:?}").expect("writing to a string");
    }
    for [a, b, c] in &mesh.faces {
        writeln!(out, "f {} {} {}", a + 1, b + 1, c + 1).expect("writing to a string");
    }
    out
}
