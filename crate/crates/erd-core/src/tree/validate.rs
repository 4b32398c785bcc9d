use super::{ConfigTree, IM_TOL, WEIGHT_TOL};
use crate::skeleton::blow_up;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Clause {
    /// d+n vertices, d+n−1 edges, connected and acyclic.
    TreeShape,
    /// Edges point away from the start vertex.
    Orientation,
    /// Pole multiplicities are positive and sum to the declared r.
    PoleMultiplicity,
    /// Essential vertices carry distinct tract indices 1..=d.
    TractIndexing,
    /// No edge joins two vertices with equal value.
    EqualValueEdge,
    /// Weight values are nonzero.
    ZeroWeight,
    /// Weight value equals t(to) − t(from).
    WeightConsistency,
    /// The start vertex has an incident edge with K = 0.
    Minimality,
    /// No vertex of a horizontal subtree lies strictly inside the height range of one of its edges.
    PreferredHorizontalSubtree,
    /// One-vertex trees are a single pole or a single essential vertex.
    SingleVertexForm,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub clause: Clause,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, clause: Clause) -> bool {
        self.violations.iter().any(|v| v.clause == clause)
    }

    pub fn clauses(&self) -> Vec<Clause> {
        let mut c: Vec<Clause> = self.violations.iter().map(|v| v.clause).collect();
        c.dedup();
        c
    }

    fn push(&mut self, clause: Clause, detail: impl Into<String>) {
        self.violations.push(Violation { clause, detail: detail.into() });
    }
}

/// Checks every clause that does not need a declared (r, d).
pub fn validate(t: &ConfigTree) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let n = t.vertices.len();
    if n == 0 {
        rep.push(Clause::TreeShape, "no vertices");
        return rep;
    }
    if n == 1 {
        if !t.edges.is_empty() {
            rep.push(Clause::TreeShape, "single vertex with edges");
        }
        if let super::BranchPoint::Pole { mu, .. } = t.vertices[0] {
            if mu == 0 {
                rep.push(Clause::PoleMultiplicity, "pole with μ = 0");
            }
        }
        if let super::BranchPoint::Essential { tract, .. } = t.vertices[0] {
            if tract != 1 {
                rep.push(Clause::TractIndexing, format!("single tract has index {tract}"));
            }
        }
        return rep;
    }
    if t.edges.len() != n - 1 {
        rep.push(Clause::TreeShape, format!("{} vertices but {} edges", n, t.edges.len()));
    }
    if t.start >= n {
        rep.push(Clause::TreeShape, "start index out of range");
        return rep;
    }
    if t.edges.iter().any(|e| e.from >= n || e.to >= n) {
        rep.push(Clause::TreeShape, "edge endpoint out of range");
        return rep;
    }
    if !is_tree(t) {
        rep.push(Clause::TreeShape, "underlying graph is not a tree");
    }
    let oriented = t.children().is_some();
    if !oriented && !rep.has(Clause::TreeShape) {
        rep.push(Clause::Orientation, "edges are not oriented away from the start vertex");
    }
    for (i, v) in t.vertices.iter().enumerate() {
        if v.mu() == Some(0) {
            rep.push(Clause::PoleMultiplicity, format!("vertex {i} is a pole with μ = 0"));
        }
    }
    let mut tracts: Vec<usize> = t
        .vertices
        .iter()
        .filter_map(|v| match v {
            super::BranchPoint::Essential { tract, .. } => Some(*tract),
            _ => None,
        })
        .collect();
    tracts.sort_unstable();
    if tracts.iter().enumerate().any(|(i, &s)| s != i + 1) {
        rep.push(Clause::TractIndexing, format!("tract indices {tracts:?} are not 1..=d"));
    }
    let scale = t.value_scale();
    for (i, e) in t.edges.iter().enumerate() {
        if e.from >= n || e.to >= n {
            continue;
        }
        let ta = t.vertices[e.from].t();
        let tb = t.vertices[e.to].t();
        if (tb - ta).norm() <= WEIGHT_TOL * scale {
            rep.push(Clause::EqualValueEdge, format!("edge {i} joins vertices with equal value"));
        }
        if e.weight.value.norm() == 0.0 {
            rep.push(Clause::ZeroWeight, format!("edge {i} has zero weight"));
        } else if (e.weight.value - (tb - ta)).norm() > WEIGHT_TOL * scale.max(e.weight.value.norm()) {
            rep.push(
                Clause::WeightConsistency,
                format!("edge {i}: value {} differs from t(to) − t(from) = {}", e.weight.value, tb - ta),
            );
        }
    }
    if !t.edges.iter().any(|e| (e.from == t.start || e.to == t.start) && e.weight.k == 0) {
        rep.push(Clause::Minimality, "start vertex has no incident edge with K = 0");
    }
    if oriented && !rep.has(Clause::TreeShape) {
        check_preferred(t, scale, &mut rep);
    }
    rep
}

/// Runs `validate` and also checks Σμ = r and the essential count against d.
pub fn validate_with_signature(t: &ConfigTree, r: u32, d: usize) -> ValidationReport {
    let mut rep = validate(t);
    let sig = super::degree_signature(t);
    if sig.r != r {
        rep.push(Clause::PoleMultiplicity, format!("Σμ = {} but r = {r}", sig.r));
    }
    if sig.d != d {
        rep.push(Clause::TractIndexing, format!("{} essential vertices but d = {d}", sig.d));
    }
    if t.vertices.len() == 1 {
        let ok = match t.vertices[0] {
            super::BranchPoint::Pole { mu, .. } => d == 0 && mu == r,
            super::BranchPoint::Essential { .. } => r == 0 && d == 1,
        };
        if !ok {
            rep.push(Clause::SingleVertexForm, "one-vertex tree is neither (r,0) nor (0,1)");
        }
    }
    rep
}

fn is_tree(t: &ConfigTree) -> bool {
    let n = t.vertices.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    for e in &t.edges {
        let a = find(&mut parent, e.from);
        let b = find(&mut parent, e.to);
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    let root = find(&mut parent, 0);
    (0..n).all(|v| find(&mut parent, v) == root) && t.edges.len() + 1 == n
}

fn check_preferred(t: &ConfigTree, scale: f64, rep: &mut ValidationReport) {
    let skel = blow_up(t);
    let sheet_of_edge = match skel.edge_sheets() {
        Ok(s) => s,
        Err(e) => {
            rep.push(Clause::PreferredHorizontalSubtree, format!("sheet structure: {e}"));
            return;
        }
    };
    let tol = IM_TOL * scale;
    let n_sheets = sheet_of_edge.iter().copied().max().map_or(0, |m| m + 1);
    for s in 0..n_sheets {
        let edges: Vec<usize> = (0..t.edges.len()).filter(|&i| sheet_of_edge[i] == s).collect();
        let mut members: Vec<usize> = edges.iter().flat_map(|&i| [t.edges[i].from, t.edges[i].to]).collect();
        members.sort_unstable();
        members.dedup();
        for &i in &edges {
            let e = &t.edges[i];
            let (ya, yb) = (t.vertices[e.from].t().im, t.vertices[e.to].t().im);
            let (lo, hi) = (ya.min(yb), ya.max(yb));
            for &z in &members {
                if z == e.from || z == e.to {
                    continue;
                }
                let y = t.vertices[z].t().im;
                if y > lo + tol && y < hi - tol {
                    rep.push(
                        Clause::PreferredHorizontalSubtree,
                        format!("vertex {z} lies inside the horizontal strip of edge {i}"),
                    );
                }
            }
        }
    }
}
