//! Configuration trees: vertices are branch points, edges carry lifted weights.

mod chart;
mod text;
mod validate;

pub use chart::{from_chart, to_chart, ChartParams, TreeShape, VertexShape};
pub use text::{parse_tree, write_tree, TREE_FORMAT};
pub use validate::{validate, validate_with_signature, Clause, ValidationReport, Violation};

use crate::error::{ErdError, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::f64::consts::PI;

/// Relative tolerance for weight and value comparisons.
pub const WEIGHT_TOL: f64 = 1e-6;
/// Absolute tolerance (after normalising by the value scale) for `Im = 0` decisions.
pub const IM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BranchPoint {
    Pole { p: Complex64, p_tilde: Complex64, mu: u32 },
    Essential { tract: usize, a: Complex64 },
}

impl BranchPoint {
    pub fn t(&self) -> Complex64 {
        match *self {
            BranchPoint::Pole { p_tilde, .. } => p_tilde,
            BranchPoint::Essential { a, .. } => a,
        }
    }

    pub fn is_pole(&self) -> bool {
        matches!(self, BranchPoint::Pole { .. })
    }

    pub fn mu(&self) -> Option<u32> {
        match *self {
            BranchPoint::Pole { mu, .. } => Some(mu),
            BranchPoint::Essential { .. } => None,
        }
    }

    pub fn with_t(&self, t: Complex64) -> BranchPoint {
        match *self {
            BranchPoint::Pole { p, mu, .. } => BranchPoint::Pole { p, p_tilde: t, mu },
            BranchPoint::Essential { tract, .. } => BranchPoint::Essential { tract, a: t },
        }
    }

    /// Deterministic order used to pick the starting vertex.
    pub fn start_order(&self, other: &BranchPoint) -> Ordering {
        let key = |b: &BranchPoint| -> (f64, f64, u8, f64, f64) {
            match *b {
                BranchPoint::Essential { tract, a } => (a.re, a.im, 0, tract as f64, 0.0),
                BranchPoint::Pole { p, p_tilde, .. } => (p_tilde.re, p_tilde.im, 1, p.re, p.im),
            }
        };
        key(self).partial_cmp(&key(other)).unwrap_or(Ordering::Equal)
    }
}

/// Element `value · e^{2πiK}` of the universal cover of ℂ*.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiftedWeight {
    pub value: Complex64,
    pub k: i64,
}

impl LiftedWeight {
    pub fn new(value: Complex64, k: i64) -> Result<Self> {
        if value.norm() == 0.0 || !value.is_finite() {
            return Err(ErdError::InvalidInput("weight value must be a finite nonzero complex".into()));
        }
        Ok(LiftedWeight { value, k })
    }

    /// Argument in `[0, 2π)`.
    pub fn arg0(&self) -> f64 {
        let a = self.value.arg();
        if a < 0.0 {
            a + 2.0 * PI
        } else {
            a
        }
    }

    pub fn is_horizontal(&self) -> bool {
        self.k == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: LiftedWeight,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigTree {
    pub vertices: Vec<BranchPoint>,
    pub edges: Vec<Edge>,
    pub start: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeSignature {
    pub r: u32,
    pub d: usize,
    pub n: usize,
    pub multiplicities: Vec<u32>,
    pub asymptotic_multiplicities: Vec<usize>,
}

impl ConfigTree {
    pub fn single(vertex: BranchPoint) -> Self {
        ConfigTree { vertices: vec![vertex], edges: vec![], start: 0 }
    }

    /// Builds a tree from oriented `(from, to, K)` triples, weights taken from vertex values.
    pub fn from_edges(vertices: Vec<BranchPoint>, start: usize, edges: &[(usize, usize, i64)]) -> Result<Self> {
        let mut out = Vec::with_capacity(edges.len());
        for &(a, b, k) in edges {
            if a >= vertices.len() || b >= vertices.len() {
                return Err(ErdError::InvalidInput(format!("edge ({a},{b}) out of range")));
            }
            let w = LiftedWeight::new(vertices[b].t() - vertices[a].t(), k)?;
            out.push(Edge { from: a, to: b, weight: w });
        }
        Ok(ConfigTree { vertices, edges: out, start })
    }

    pub fn pole_count(&self) -> usize {
        self.vertices.iter().filter(|v| v.is_pole()).count()
    }

    pub fn essential_count(&self) -> usize {
        self.vertices.len() - self.pole_count()
    }

    /// Largest distance between vertex values, or 1 for trees with one value.
    pub fn value_scale(&self) -> f64 {
        let mut s: f64 = 0.0;
        for a in &self.vertices {
            for b in &self.vertices {
                s = s.max((a.t() - b.t()).norm());
            }
        }
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }

    /// Children lists in traversal order from the start vertex; `None` if edges are not
    /// oriented away from the start or the graph is not a tree.
    pub fn children(&self) -> Option<Vec<Vec<usize>>> {
        let n = self.vertices.len();
        if self.start >= n {
            return None;
        }
        let mut kids = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        for (i, e) in self.edges.iter().enumerate() {
            if e.from >= n || e.to >= n {
                return None;
            }
            kids[e.from].push(i);
            indeg[e.to] += 1;
        }
        if indeg[self.start] != 0 || (0..n).any(|v| v != self.start && indeg[v] != 1) {
            return None;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![self.start];
        seen[self.start] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &ei in &kids[v] {
                let w = self.edges[ei].to;
                if seen[w] {
                    return None;
                }
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
        if count != n {
            return None;
        }
        Some(kids)
    }

    /// Edge indices in breadth-first order, children sorted by (K, arg₀, |value|).
    pub fn traversal_order(&self) -> Option<Vec<usize>> {
        let mut kids = self.children()?;
        for list in kids.iter_mut() {
            list.sort_by(|&a, &b| {
                let wa = &self.edges[a].weight;
                let wb = &self.edges[b].weight;
                (wa.k, wa.arg0(), wa.value.norm())
                    .partial_cmp(&(wb.k, wb.arg0(), wb.value.norm()))
                    .unwrap_or(Ordering::Equal)
            });
        }
        let mut order = Vec::new();
        let mut queue = std::collections::VecDeque::from([self.start]);
        while let Some(v) = queue.pop_front() {
            for &ei in &kids[v] {
                order.push(ei);
                queue.push_back(self.edges[ei].to);
            }
        }
        Some(order)
    }

    /// Relabels vertices by `perm[old] = new`.
    pub fn relabel(&self, perm: &[usize]) -> ConfigTree {
        let mut vertices = self.vertices.clone();
        for (old, &new) in perm.iter().enumerate() {
            vertices[new] = self.vertices[old];
        }
        ConfigTree {
            vertices,
            edges: self
                .edges
                .iter()
                .map(|e| Edge { from: perm[e.from], to: perm[e.to], weight: e.weight })
                .collect(),
            start: perm[self.start],
        }
    }

    /// Adds a common constant to every vertex value.
    pub fn translate(&self, c: Complex64) -> ConfigTree {
        ConfigTree {
            vertices: self.vertices.iter().map(|v| v.with_t(v.t() + c)).collect(),
            edges: self.edges.clone(),
            start: self.start,
        }
    }
}

/// Recomputes (r, d, n, μ list, ν list).
pub fn degree_signature(t: &ConfigTree) -> DegreeSignature {
    let mut multiplicities = Vec::new();
    let mut values: Vec<Complex64> = Vec::new();
    for v in &t.vertices {
        match *v {
            BranchPoint::Pole { mu, .. } => multiplicities.push(mu),
            BranchPoint::Essential { a, .. } => values.push(a),
        }
    }
    let scale = t.value_scale();
    let mut groups: Vec<(Complex64, usize)> = Vec::new();
    for a in values.iter() {
        match groups.iter_mut().find(|(g, _)| (g - a).norm() <= WEIGHT_TOL * scale) {
            Some(g) => g.1 += 1,
            None => groups.push((*a, 1)),
        }
    }
    DegreeSignature {
        r: multiplicities.iter().sum(),
        d: values.len(),
        n: multiplicities.len(),
        multiplicities,
        asymptotic_multiplicities: groups.into_iter().map(|g| g.1).collect(),
    }
}

/// Orders values by regularised height: `Im` first (ties within `tol`), then `Re`.
pub fn height_cmp(a: Complex64, b: Complex64, tol: f64) -> Ordering {
    if (a.im - b.im).abs() > tol {
        a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal)
    } else {
        a.re.partial_cmp(&b.re).unwrap_or(Ordering::Equal)
    }
}

/// Representative of `k` modulo `m` in `(-m/2, m/2]`.
pub fn symmetric_mod(k: i64, m: i64) -> i64 {
    let r = k.rem_euclid(m);
    if 2 * r > m {
        r - m
    } else {
        r
    }
}
