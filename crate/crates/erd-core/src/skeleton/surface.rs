use super::{ColumnKind, Node, Skeleton};
use crate::error::{ErdError, Result};
use crate::tree::IM_TOL;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    /// Edge of the half-plane above the cut.
    Upper,
    /// Edge of the half-plane below the cut.
    Lower,
}

/// A horizontal cut starting at a branch value and running to the right.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    pub node: Node,
    pub t: Complex64,
    /// Direction of the cut ray; always 0 (rightward).
    pub direction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sheet {
    pub cuts: Vec<Cut>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CutRef {
    pub sheet: usize,
    pub cut: usize,
    pub side: Side,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gluing {
    pub a: CutRef,
    pub b: CutRef,
}

/// Symbolic semi-infinite helicoid closing one boundary side of a tower.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HelicoidTag {
    pub vertex: usize,
    /// True for the helicoid climbing above the tower top.
    pub upward: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceModel {
    pub sheets: Vec<Sheet>,
    pub gluings: Vec<Gluing>,
    pub boundary: Vec<CutRef>,
    pub helicoids: Vec<(CutRef, HelicoidTag)>,
}

impl SurfaceModel {
    /// Sheet and cut index of a skeleton node.
    pub fn locate(&self, node: Node) -> Option<(usize, usize)> {
        self.sheets
            .iter()
            .enumerate()
            .find_map(|(i, s)| s.cuts.iter().position(|c| c.node == node).map(|j| (i, j)))
    }

    /// Partner of a glued cut side.
    pub fn partner(&self, r: CutRef) -> Option<CutRef> {
        self.gluings.iter().find_map(|g| {
            if g.a == r {
                Some(g.b)
            } else if g.b == r {
                Some(g.a)
            } else {
                None
            }
        })
    }
}

/// Sheets with cuts, glued along towers and cycles: level `l` below the cut meets level `l+1` above it.
pub fn build_soul(s: &Skeleton) -> Result<SurfaceModel> {
    let node_sheets = s.sheets()?;
    let mut at: BTreeMap<Node, (usize, usize)> = BTreeMap::new();
    let sheets: Vec<Sheet> = node_sheets
        .iter()
        .enumerate()
        .map(|(i, nodes)| Sheet {
            cuts: nodes
                .iter()
                .enumerate()
                .map(|(j, &n)| {
                    at.insert(n, (i, j));
                    Cut { node: n, t: s.vertices[n.0].t(), direction: 0.0 }
                })
                .collect(),
        })
        .collect();
    let r = |n: Node, side: Side| -> CutRef {
        let (sheet, cut) = at[&n];
        CutRef { sheet, cut, side }
    };
    let mut gluings = Vec::new();
    let mut boundary = Vec::new();
    for col in &s.columns {
        match col.kind {
            ColumnKind::Tower { min, max } => {
                for l in min..max {
                    gluings.push(Gluing { a: r((col.vertex, l), Side::Lower), b: r((col.vertex, l + 1), Side::Upper) });
                }
                boundary.push(r((col.vertex, max), Side::Lower));
                boundary.push(r((col.vertex, min), Side::Upper));
            }
            ColumnKind::Cycle { len } => {
                for l in 0..len {
                    gluings.push(Gluing {
                        a: r((col.vertex, l), Side::Lower),
                        b: r((col.vertex, (l + 1).rem_euclid(len)), Side::Upper),
                    });
                }
            }
        }
    }
    let m = SurfaceModel { sheets, gluings, boundary, helicoids: Vec::new() };
    check_involution(&m)?;
    Ok(m)
}

fn check_involution(m: &SurfaceModel) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    let sides = m.gluings.iter().flat_map(|g| [g.a, g.b]).chain(m.boundary.iter().copied());
    let sides = sides.chain(m.helicoids.iter().map(|h| h.0));
    for r in sides {
        if !seen.insert(r) {
            return Err(ErdError::InconsistentGluing(format!("cut side {r:?} used twice")));
        }
    }
    let total: usize = m.sheets.iter().map(|s| 2 * s.cuts.len()).sum();
    if seen.len() != total {
        return Err(ErdError::InconsistentGluing(format!("{} of {} cut sides accounted for", seen.len(), total)));
    }
    Ok(())
}

/// Closes every boundary side with a semi-infinite helicoid.
pub fn attach_helicoids(m: &SurfaceModel) -> Result<SurfaceModel> {
    let mut out = m.clone();
    for r in std::mem::take(&mut out.boundary) {
        let node = out.sheets[r.sheet].cuts[r.cut].node;
        out.helicoids.push((r, HelicoidTag { vertex: node.0, upward: r.side == Side::Lower }));
    }
    check_involution(&out)?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripDecomposition {
    pub half_planes_from_poles: usize,
    /// `(vertex, K_σ)` for each essential vertex.
    pub finite_helicoids: Vec<(usize, u32)>,
    pub semi_infinite_helicoids: usize,
    pub finite_strips: Vec<f64>,
    pub infinite_half_planes: bool,
}

/// Half planes, strips and helicoids read off the sheet census.
pub fn strip_decomposition(s: &Skeleton) -> Result<StripDecomposition> {
    let sheets = s.sheets()?;
    let scale = {
        let mut m: f64 = 0.0;
        for a in &s.vertices {
            for b in &s.vertices {
                m = m.max((a.t() - b.t()).norm());
            }
        }
        if m > 0.0 {
            m
        } else {
            1.0
        }
    };
    let tol = IM_TOL * scale;
    let mut pole_sheets = 0;
    let mut finite_strips = Vec::new();
    for sheet in &sheets {
        if sheet.iter().any(|n| s.vertices[n.0].is_pole()) {
            pole_sheets += 1;
        }
        let mut ys: Vec<f64> = sheet.iter().map(|n| s.vertices[n.0].t().im).collect();
        ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut distinct: Vec<f64> = Vec::new();
        for y in ys {
            if distinct.last().is_none_or(|&l| y - l > tol) {
                distinct.push(y);
            }
        }
        finite_strips.extend(distinct.windows(2).map(|w| w[1] - w[0]));
    }
    let finite_helicoids = s
        .columns
        .iter()
        .filter_map(|c| match c.kind {
            ColumnKind::Tower { min, max } => Some((c.vertex, (max - min) as u32)),
            ColumnKind::Cycle { .. } => None,
        })
        .collect();
    let d = s.essential_count();
    Ok(StripDecomposition {
        half_planes_from_poles: 2 * pole_sheets,
        finite_helicoids,
        semi_infinite_helicoids: 2 * d,
        finite_strips,
        infinite_half_planes: d >= 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::skeleton::blow_up;

    #[test]
    fn exp_soul_is_one_sheet_one_cut() {
        let m = build_soul(&blow_up(&fixtures::tree_5_2(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)))).unwrap();
        assert_eq!(m.sheets.len(), 1);
        assert_eq!(m.sheets[0].cuts.len(), 1);
        assert_eq!(m.boundary.len(), 2);
        let full = attach_helicoids(&m).unwrap();
        assert!(full.boundary.is_empty());
        assert_eq!(full.helicoids.len(), 2);
    }

    #[test]
    fn simple_pole_gives_two_sheet_cyclic_helicoid() {
        let t = fixtures::tree_5_3(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let m = build_soul(&blow_up(&t)).unwrap();
        assert_eq!(m.sheets.len(), 2);
        let cyc: Vec<_> = m.gluings.iter().filter(|g| g.a.sheet != g.b.sheet).collect();
        assert_eq!(cyc.len(), 2);
    }

    #[test]
    fn erf_soul_single_sheet_two_cuts() {
        let m = build_soul(&blow_up(&fixtures::tree_erf(Complex64::new(1.0, 0.0)))).unwrap();
        assert_eq!(m.sheets.len(), 1);
        assert_eq!(m.sheets[0].cuts.len(), 2);
    }

    #[test]
    fn boundary_census_on_fixtures() {
        for (name, t, r, d) in fixtures::all() {
            let s = blow_up(&t);
            let m = build_soul(&s).unwrap();
            assert_eq!(m.boundary.len(), 2 * d, "{name}");
            assert_eq!(attach_helicoids(&m).unwrap().boundary.len(), 0, "{name}");
            assert_eq!(m.sheets.len(), s.level_total() - t.edges.len(), "{name}");
            let sd = strip_decomposition(&s).unwrap();
            assert_eq!(sd.infinite_half_planes, d >= 1, "{name}");
            assert_eq!(sd.semi_infinite_helicoids, 2 * d, "{name}");
            if r >= 1 {
                assert!(sd.half_planes_from_poles >= 2 * (r as usize + 1), "{name}");
                assert!(sd.half_planes_from_poles <= 4 * r as usize, "{name}");
            }
        }
    }

    #[test]
    fn erf_strips() {
        let i = strip_decomposition(&blow_up(&fixtures::tree_erf(Complex64::new(0.0, 1.0)))).unwrap();
        assert_eq!(i.finite_strips.len(), 1);
        assert!((i.finite_strips[0] - 2.0).abs() < 1e-12);
        let one = strip_decomposition(&blow_up(&fixtures::tree_erf(Complex64::new(1.0, 0.0)))).unwrap();
        assert!(one.finite_strips.is_empty());
    }
}
