use super::{BranchPoint, ConfigTree, Edge, LiftedWeight};
use crate::error::{ErdError, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Discrete data of a vertex: everything except its value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum VertexShape {
    Pole { p: Complex64, mu: u32 },
    Essential { tract: usize },
}

/// A tree without its continuous parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeShape {
    pub vertices: Vec<VertexShape>,
    pub edges: Vec<(usize, usize)>,
    pub start: usize,
}

impl TreeShape {
    pub fn of(t: &ConfigTree) -> TreeShape {
        TreeShape {
            vertices: t
                .vertices
                .iter()
                .map(|v| match *v {
                    BranchPoint::Pole { p, mu, .. } => VertexShape::Pole { p, mu },
                    BranchPoint::Essential { tract, .. } => VertexShape::Essential { tract },
                })
                .collect(),
            edges: t.edges.iter().map(|e| (e.from, e.to)).collect(),
            start: t.start,
        }
    }
}

/// Base point, first vertex and the edge weights in storage order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartParams {
    pub z0: Complex64,
    pub first_vertex: BranchPoint,
    pub weights: Vec<LiftedWeight>,
}

impl ChartParams {
    /// Number of continuous complex parameters: z0, t₁ and one per weight.
    pub fn dimension(&self) -> usize {
        self.weights.len() + 2
    }
}

pub fn to_chart(t: &ConfigTree, z0: Complex64) -> ChartParams {
    ChartParams {
        z0,
        first_vertex: t.vertices[t.start],
        weights: t.edges.iter().map(|e| e.weight).collect(),
    }
}

/// Rebuilds a tree on `shape` by propagating values from the first vertex along the weights.
pub fn from_chart(c: &ChartParams, shape: &TreeShape) -> Result<ConfigTree> {
    let n = shape.vertices.len();
    if c.weights.len() != shape.edges.len() || n == 0 || shape.edges.len() + 1 != n {
        return Err(ErdError::ShapeMismatch(format!(
            "{} weights for a shape with {} vertices and {} edges",
            c.weights.len(),
            n,
            shape.edges.len()
        )));
    }
    if shape.start >= n {
        return Err(ErdError::ShapeMismatch("start index out of range".into()));
    }
    for w in &c.weights {
        if w.value.norm() == 0.0 || !w.value.is_finite() {
            return Err(ErdError::InvalidInput("chart weight with value 0".into()));
        }
    }
    let first_ok = match (shape.vertices[shape.start], c.first_vertex) {
        (VertexShape::Pole { mu, .. }, BranchPoint::Pole { mu: m2, .. }) => mu == m2,
        (VertexShape::Essential { tract }, BranchPoint::Essential { tract: s2, .. }) => tract == s2,
        _ => false,
    };
    if !first_ok {
        return Err(ErdError::ShapeMismatch("first vertex kind differs from the shape".into()));
    }
    let mut values: Vec<Option<Complex64>> = vec![None; n];
    values[shape.start] = Some(c.first_vertex.t());
    let mut changed = true;
    while changed {
        changed = false;
        for (i, &(a, b)) in shape.edges.iter().enumerate() {
            if a >= n || b >= n {
                return Err(ErdError::ShapeMismatch(format!("edge {i} out of range")));
            }
            if let (Some(ta), None) = (values[a], values[b]) {
                values[b] = Some(ta + c.weights[i].value);
                changed = true;
            }
        }
    }
    let mut vertices = Vec::with_capacity(n);
    for (i, v) in shape.vertices.iter().enumerate() {
        let t = values[i].ok_or_else(|| {
            ErdError::ShapeMismatch(format!("vertex {i} not reachable from the start along edge orientation"))
        })?;
        vertices.push(match *v {
            VertexShape::Pole { p, mu } => BranchPoint::Pole { p, p_tilde: t, mu },
            VertexShape::Essential { tract } => BranchPoint::Essential { tract, a: t },
        });
    }
    vertices[shape.start] = c.first_vertex;
    Ok(ConfigTree {
        vertices,
        edges: shape
            .edges
            .iter()
            .zip(c.weights.iter())
            .map(|(&(a, b), &w)| Edge { from: a, to: b, weight: w })
            .collect(),
        start: shape.start,
    })
}
