//! Skeletons (towers and cycles), sheets, the soul and tree equivalence.

mod canon;
mod surface;

pub use canon::{canonical_form, equivalent, topology_key, ColumnClass, ColumnRecord, SheetStructure, CANON_FORMAT};
pub use surface::{
    attach_helicoids, build_soul, strip_decomposition, Cut, CutRef, Gluing, HelicoidTag, Sheet, Side,
    StripDecomposition, SurfaceModel,
};

use crate::error::{ErdError, Result};
use crate::tree::{symmetric_mod, BranchPoint, ConfigTree, Edge, LiftedWeight};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColumnKind {
    /// Essential vertex: levels `min..=max`, containing 0.
    Tower { min: i64, max: i64 },
    /// Pole vertex: levels are residues modulo `len = μ + 1`.
    Cycle { len: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub vertex: usize,
    pub kind: ColumnKind,
}

impl Column {
    pub fn levels(&self) -> Vec<i64> {
        match self.kind {
            ColumnKind::Tower { min, max } => (min..=max).collect(),
            ColumnKind::Cycle { len } => (0..len).collect(),
        }
    }

    pub fn level_count(&self) -> usize {
        match self.kind {
            ColumnKind::Tower { min, max } => (max - min + 1) as usize,
            ColumnKind::Cycle { len } => len as usize,
        }
    }

    pub fn normalize_level(&self, l: i64) -> i64 {
        match self.kind {
            ColumnKind::Tower { .. } => l,
            ColumnKind::Cycle { len } => l.rem_euclid(len),
        }
    }
}

/// A node of the skeleton: (column, level).
pub type Node = (usize, i64);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizontalEdge {
    pub from: Node,
    pub to: Node,
    pub value: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skeleton {
    pub vertices: Vec<BranchPoint>,
    pub columns: Vec<Column>,
    pub horizontal_edges: Vec<HorizontalEdge>,
}

/// Replaces each vertex by a tower or cycle and attaches every edge at its K level.
pub fn blow_up(t: &ConfigTree) -> Skeleton {
    let n = t.vertices.len();
    let mut ks: Vec<Vec<i64>> = vec![vec![0]; n];
    for e in &t.edges {
        if e.from < n {
            ks[e.from].push(e.weight.k);
        }
    }
    let columns: Vec<Column> = t
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| Column {
            vertex: i,
            kind: match v {
                BranchPoint::Pole { mu, .. } => ColumnKind::Cycle { len: (*mu as i64 + 1).max(1) },
                BranchPoint::Essential { .. } => ColumnKind::Tower {
                    min: *ks[i].iter().min().unwrap(),
                    max: *ks[i].iter().max().unwrap(),
                },
            },
        })
        .collect();
    let horizontal_edges = t
        .edges
        .iter()
        .filter(|e| e.from < n && e.to < n)
        .map(|e| HorizontalEdge {
            from: (e.from, columns[e.from].normalize_level(e.weight.k)),
            to: (e.to, 0),
            value: e.weight.value,
        })
        .collect();
    Skeleton { vertices: t.vertices.clone(), columns, horizontal_edges }
}

/// Collapses columns back to vertices; K is the attachment level (symmetric residue on cycles).
pub fn blow_down(s: &Skeleton) -> Result<ConfigTree> {
    let n = s.vertices.len();
    let mut indeg = vec![0usize; n];
    for h in &s.horizontal_edges {
        indeg[h.to.0] += 1;
        if h.to.1 != 0 {
            return Err(ErdError::InconsistentGluing("horizontal edge must land on level 0".into()));
        }
    }
    let start = (0..n)
        .find(|&v| indeg[v] == 0)
        .ok_or_else(|| ErdError::InconsistentGluing("no column without incoming edge".into()))?;
    let edges = s
        .horizontal_edges
        .iter()
        .map(|h| {
            let col = &s.columns[h.from.0];
            let k = match col.kind {
                ColumnKind::Tower { .. } => h.from.1,
                ColumnKind::Cycle { len } => symmetric_mod(h.from.1, len),
            };
            Ok(Edge { from: h.from.0, to: h.to.0, weight: LiftedWeight::new(h.value, k)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConfigTree { vertices: s.vertices.clone(), edges, start })
}

impl Skeleton {
    pub fn essential_count(&self) -> usize {
        self.columns.iter().filter(|c| matches!(c.kind, ColumnKind::Tower { .. })).count()
    }

    pub fn total_mu(&self) -> u32 {
        self.vertices.iter().filter_map(|v| v.mu()).sum()
    }

    pub fn nodes(&self) -> Vec<Node> {
        self.columns.iter().flat_map(|c| c.levels().into_iter().map(move |l| (c.vertex, l))).collect()
    }

    /// Connected components of nodes under horizontal edges, each sorted; the list is
    /// ordered by first node. A sheet never holds two nodes of one column.
    pub fn sheets(&self) -> Result<Vec<Vec<Node>>> {
        let nodes = self.nodes();
        let index: BTreeMap<Node, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let mut parent: Vec<usize> = (0..nodes.len()).collect();
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
        for h in &self.horizontal_edges {
            let a = *index
                .get(&h.from)
                .ok_or_else(|| ErdError::InconsistentGluing(format!("node {:?} outside its column", h.from)))?;
            let b = *index
                .get(&h.to)
                .ok_or_else(|| ErdError::InconsistentGluing(format!("node {:?} outside its column", h.to)))?;
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return Err(ErdError::InconsistentGluing("horizontal edges close a cycle".into()));
            }
            parent[ra] = rb;
        }
        let mut groups: BTreeMap<usize, Vec<Node>> = BTreeMap::new();
        for (i, &n) in nodes.iter().enumerate() {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(n);
        }
        let mut out: Vec<Vec<Node>> = groups.into_values().collect();
        for s in out.iter_mut() {
            s.sort_unstable();
            if s.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(ErdError::InconsistentGluing(format!(
                    "column {} meets one sheet twice",
                    s.iter().find(|n| s.iter().filter(|m| m.0 == n.0).count() > 1).unwrap().0
                )));
            }
        }
        out.sort();
        Ok(out)
    }

    /// Sheet index of every horizontal edge.
    pub fn edge_sheets(&self) -> Result<Vec<usize>> {
        let sheets = self.sheets()?;
        let mut of: BTreeMap<Node, usize> = BTreeMap::new();
        for (i, s) in sheets.iter().enumerate() {
            for &n in s {
                of.insert(n, i);
            }
        }
        Ok(self.horizontal_edges.iter().map(|h| of[&h.from]).collect())
    }

    /// Number of horizontal levels summed over columns.
    pub fn level_total(&self) -> usize {
        self.columns.iter().map(|c| c.level_count()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn cycle_levels_for_triple_pole_tree() {
        let s = blow_up(&fixtures::tree_5_4());
        let pole = s.columns.iter().find(|c| matches!(c.kind, ColumnKind::Cycle { .. })).unwrap();
        assert_eq!(pole.kind, ColumnKind::Cycle { len: 3 });
        let mut levels: Vec<i64> =
            s.horizontal_edges.iter().flat_map(|h| [h.from, h.to]).filter(|n| n.0 == pole.vertex).map(|n| n.1).collect();
        levels.sort();
        assert_eq!(levels, vec![0, 1, 2]);
    }

    #[test]
    fn single_essential_has_one_tower() {
        let t = fixtures::tree_single_essential();
        let s = blow_up(&t);
        assert_eq!(s.columns.len(), 1);
        assert_eq!(s.columns[0].kind, ColumnKind::Tower { min: 0, max: 0 });
        assert!(s.horizontal_edges.is_empty());
        assert_eq!(blow_down(&s).unwrap(), t);
    }

    #[test]
    fn tower_range_covers_k() {
        let t = fixtures::tree_tower_example();
        let s = blow_up(&t);
        let c = &s.columns[1];
        assert_eq!(c.kind, ColumnKind::Tower { min: -1, max: 1 });
    }

    #[test]
    fn blow_down_reproduces_all_real_d0_tree() {
        let t = fixtures::tree_5_1(1, 1);
        assert_eq!(blow_down(&blow_up(&t)).unwrap(), t);
    }

    #[test]
    fn sheets_of_three_pole_example() {
        let s = blow_up(&fixtures::tree_5_5());
        let sheets = s.sheets().unwrap();
        let mut multi: Vec<usize> = sheets.iter().map(|x| x.len()).filter(|&l| l > 1).collect();
        multi.sort();
        assert_eq!(multi, vec![2, 2, 2, 3]);
        assert_eq!(sheets.len(), s.level_total() - 5);
    }
}
