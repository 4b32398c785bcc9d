//! Equivalence of trees through the sheet structure of their skeletons.
//!
//! The canonical form is a text document:
//!
//! ```text
//! erd-canon/1
//! scale 2.00000000e0
//! column pole mu=1 t=-240425000,0 sheets=0,3
//! column essential t=0,0 sheets=0
//! ```
//!
//! Values are taken relative to their centroid and quantised to 1e-9 of the scale.
//! Sheet names are indices into the sorted sheet list of the minimal labelling.

use super::{blow_up, ColumnKind};
use crate::error::Result;
use crate::tree::{BranchPoint, ConfigTree, IM_TOL, WEIGHT_TOL};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const CANON_FORMAT: &str = "erd-canon/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ColumnClass {
    Essential,
    Pole { mu: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnRecord {
    pub class: ColumnClass,
    pub t: Complex64,
    pub cyclic: bool,
    /// Sheet of each level, from the bottom of the tower or from level 0 of the cycle.
    pub sheets: Vec<usize>,
}

/// Columns with their sheet sequences: the data that determines the surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SheetStructure {
    pub columns: Vec<ColumnRecord>,
    pub sheet_count: usize,
    pub scale: f64,
}

impl SheetStructure {
    pub fn of(t: &ConfigTree) -> Result<SheetStructure> {
        let s = blow_up(t);
        let sheets = s.sheets()?;
        let mut of: BTreeMap<(usize, i64), usize> = BTreeMap::new();
        for (i, sh) in sheets.iter().enumerate() {
            for &n in sh {
                of.insert(n, i);
            }
        }
        let columns = s
            .columns
            .iter()
            .map(|c| ColumnRecord {
                class: match t.vertices[c.vertex] {
                    BranchPoint::Essential { .. } => ColumnClass::Essential,
                    BranchPoint::Pole { mu, .. } => ColumnClass::Pole { mu },
                },
                t: t.vertices[c.vertex].t(),
                cyclic: matches!(c.kind, ColumnKind::Cycle { .. }),
                sheets: c.levels().into_iter().map(|l| of[&(c.vertex, l)]).collect(),
            })
            .collect();
        Ok(SheetStructure { columns, sheet_count: sheets.len(), scale: t.value_scale() })
    }

    fn centroid(&self) -> Complex64 {
        let n = self.columns.len().max(1) as f64;
        self.columns.iter().map(|c| c.t).sum::<Complex64>() / n
    }
}

/// Tolerant isomorphism test of the sheet structures, values compared at 1e-6 of the scale.
pub fn equivalent(a: &ConfigTree, b: &ConfigTree) -> bool {
    let (sa, sb) = match (SheetStructure::of(a), SheetStructure::of(b)) {
        (Ok(x), Ok(y)) => (x, y),
        _ => return false,
    };
    if sa.columns.len() != sb.columns.len() || sa.sheet_count != sb.sheet_count {
        return false;
    }
    let tol = WEIGHT_TOL * sa.scale.max(sb.scale);
    let (ca, cb) = (sa.centroid(), sb.centroid());
    let compatible = |x: &ColumnRecord, y: &ColumnRecord| {
        x.class == y.class && x.cyclic == y.cyclic && x.sheets.len() == y.sheets.len() && ((x.t - ca) - (y.t - cb)).norm() <= tol
    };
    let mut order: Vec<usize> = (0..sa.columns.len()).collect();
    order.sort_by_key(|&i| sb.columns.iter().filter(|y| compatible(&sa.columns[i], y)).count());
    let mut st = Matcher {
        a: &sa,
        b: &sb,
        used: vec![false; sb.columns.len()],
        fwd: vec![None; sa.sheet_count],
        bwd: vec![None; sb.sheet_count],
    };
    st.search(&order, 0, &compatible)
}

struct Matcher<'a> {
    a: &'a SheetStructure,
    b: &'a SheetStructure,
    used: Vec<bool>,
    fwd: Vec<Option<usize>>,
    bwd: Vec<Option<usize>>,
}

impl Matcher<'_> {
    fn search(&mut self, order: &[usize], k: usize, ok: &dyn Fn(&ColumnRecord, &ColumnRecord) -> bool) -> bool {
        if k == order.len() {
            return true;
        }
        let x = &self.a.columns[order[k]];
        for j in 0..self.b.columns.len() {
            if self.used[j] || !ok(x, &self.b.columns[j]) {
                continue;
            }
            let y = &self.b.columns[j];
            let rotations = if x.cyclic { x.sheets.len() } else { 1 };
            for rot in 0..rotations {
                let mut added = Vec::new();
                let mut fine = true;
                for (i, &sa) in x.sheets.iter().enumerate() {
                    let sb = y.sheets[(i + rot) % y.sheets.len()];
                    match (self.fwd[sa], self.bwd[sb]) {
                        (None, None) => {
                            self.fwd[sa] = Some(sb);
                            self.bwd[sb] = Some(sa);
                            added.push((sa, sb));
                        }
                        (Some(f), Some(g)) if f == sb && g == sa => {}
                        _ => {
                            fine = false;
                            break;
                        }
                    }
                }
                if fine {
                    self.used[j] = true;
                    if self.search(order, k + 1, ok) {
                        return true;
                    }
                    self.used[j] = false;
                }
                for (sa, sb) in added {
                    self.fwd[sa] = None;
                    self.bwd[sb] = None;
                }
            }
        }
        false
    }
}

/// Column data after discretisation: a sortable key, a cyclic flag and per-level tags.
struct Abstract {
    keys: Vec<String>,
    cyclic: Vec<bool>,
    /// `(sheet, tag)` for each level.
    levels: Vec<Vec<(usize, i64)>>,
}

/// Canonical byte string of the surface determined by the tree.
pub fn canonical_form(t: &ConfigTree) -> Result<String> {
    let s = SheetStructure::of(t)?;
    let c = s.centroid();
    let q = |x: f64| (x / s.scale * 1e9).round() as i64;
    let abs = Abstract {
        keys: s
            .columns
            .iter()
            .map(|col| {
                let u = col.t - c;
                match col.class {
                    ColumnClass::Essential => format!("essential t={},{}", q(u.re), q(u.im)),
                    ColumnClass::Pole { mu } => format!("pole mu={mu} t={},{}", q(u.re), q(u.im)),
                }
            })
            .collect(),
        cyclic: s.columns.iter().map(|c| c.cyclic).collect(),
        levels: s.columns.iter().map(|c| c.sheets.iter().map(|&x| (x, 0)).collect()).collect(),
    };
    Ok(format!("{CANON_FORMAT}\nscale {:.8e}\n{}", s.scale, minimal_encoding(&abs, s.sheet_count)))
}

/// Topology proxy: kinds, sheet sequences and the height order inside each sheet,
/// taken up to reflection of the value plane.
pub fn topology_key(t: &ConfigTree) -> Result<String> {
    let s = SheetStructure::of(t)?;
    let tol = IM_TOL * s.scale;
    let mut members: Vec<Vec<f64>> = vec![Vec::new(); s.sheet_count];
    for col in &s.columns {
        for &sh in &col.sheets {
            members[sh].push(col.t.im);
        }
    }
    let rank = |sh: usize, y: f64| -> i64 {
        let mut ys = members[sh].clone();
        ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut r = 0;
        let mut last: Option<f64> = None;
        for v in ys {
            if v < y - tol {
                if last.is_none_or(|l| v - l > tol) {
                    r += 1;
                }
                last = Some(v);
            }
        }
        r
    };
    let keys: Vec<String> = s
        .columns
        .iter()
        .map(|col| match col.class {
            ColumnClass::Essential => "essential".to_string(),
            ColumnClass::Pole { mu } => format!("pole mu={mu}"),
        })
        .collect();
    let cyclic: Vec<bool> = s.columns.iter().map(|c| c.cyclic).collect();
    let levels: Vec<Vec<(usize, i64)>> =
        s.columns.iter().map(|c| c.sheets.iter().map(|&sh| (sh, rank(sh, c.t.im))).collect()).collect();
    let direct = Abstract { keys: keys.clone(), cyclic: cyclic.clone(), levels: levels.clone() };
    let top: Vec<i64> = (0..s.sheet_count)
        .map(|sh| levels.iter().flatten().filter(|l| l.0 == sh).map(|l| l.1).max().unwrap_or(0))
        .collect();
    let mirrored = Abstract {
        keys,
        cyclic,
        levels: levels.iter().map(|l| l.iter().rev().map(|&(sh, r)| (sh, top[sh] - r)).collect()).collect(),
    };
    let a = minimal_encoding(&direct, s.sheet_count);
    let b = minimal_encoding(&mirrored, s.sheet_count);
    Ok(format!("erd-topology/1\n{}", a.min(b)))
}

/// Lexicographically least encoding over column orders within equal refined keys and cycle rotations.
fn minimal_encoding(abs: &Abstract, sheet_count: usize) -> String {
    let n = abs.keys.len();
    let refined = refine(abs, sheet_count);
    let mut groups: BTreeMap<&String, Vec<usize>> = BTreeMap::new();
    for (i, k) in refined.iter().enumerate() {
        groups.entry(k).or_default().push(i);
    }
    let group_list: Vec<Vec<usize>> = groups.into_values().collect();
    let rotations: Vec<Vec<usize>> = (0..n).map(|i| candidate_rotations(abs, &refined, i)).collect();
    let mut best: Option<String> = None;
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut budget = 200_000usize;
    permute_groups(&group_list, 0, &mut order, &mut |order: &[usize]| {
        let mut rot = vec![0usize; n];
        rotate_all(order, 0, &rotations, &mut rot, &mut |rot: &[usize]| {
            if budget == 0 {
                return;
            }
            budget -= 1;
            let enc = encode(abs, order, rot, sheet_count);
            if best.as_ref().is_none_or(|b| enc < *b) {
                best = Some(enc);
            }
        });
    });
    best.unwrap_or_default()
}

fn permute_groups(groups: &[Vec<usize>], g: usize, order: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if g == groups.len() {
        f(order);
        return;
    }
    let mut items = groups[g].clone();
    heap_permutations(&mut items, groups[g].len(), &mut |p: &[usize]| {
        let base = order.len();
        order.extend_from_slice(p);
        permute_groups(groups, g + 1, order, f);
        order.truncate(base);
    });
}

fn heap_permutations(items: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k <= 1 {
        f(items);
        return;
    }
    for i in 0..k {
        heap_permutations(items, k - 1, f);
        if k.is_multiple_of(2) {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

fn rotate_all(order: &[usize], k: usize, rotations: &[Vec<usize>], rot: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if k == order.len() {
        f(rot);
        return;
    }
    let col = order[k];
    for &r in &rotations[col] {
        rot[col] = r;
        rotate_all(order, k + 1, rotations, rot, f);
    }
}

/// Colour refinement: each column key absorbs the multiset of keys met on its sheets.
fn refine(abs: &Abstract, sheet_count: usize) -> Vec<String> {
    let mut keys = abs.keys.clone();
    for _ in 0..abs.keys.len().min(8) {
        let mut sheet_sig: Vec<Vec<String>> = vec![Vec::new(); sheet_count];
        for (i, lv) in abs.levels.iter().enumerate() {
            for (pos, &(sh, tag)) in lv.iter().enumerate() {
                let pos = if abs.cyclic[i] { 0 } else { pos };
                sheet_sig[sh].push(format!("{}@{}#{}", keys[i], pos, tag));
            }
        }
        for s in sheet_sig.iter_mut() {
            s.sort();
        }
        let next: Vec<String> = (0..keys.len())
            .map(|i| {
                let seq: Vec<String> = abs.levels[i].iter().map(|&(sh, tag)| format!("{tag}[{}]", sheet_sig[sh].join(";"))).collect();
                let seq = if abs.cyclic[i] { min_rotation(&seq) } else { seq };
                format!("{}|{}", abs.keys[i], digest(&seq.join("/")))
            })
            .collect();
        let distinct = |v: &[String]| v.iter().collect::<std::collections::BTreeSet<_>>().len();
        if distinct(&next) == distinct(&keys) {
            keys = next;
            break;
        }
        keys = next;
    }
    keys
}

fn digest(s: &str) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

fn min_rotation<T: Ord + Clone>(v: &[T]) -> Vec<T> {
    (0..v.len().max(1))
        .map(|r| v.iter().cycle().skip(r).take(v.len()).cloned().collect::<Vec<T>>())
        .min()
        .unwrap_or_default()
}

/// Rotations of a cycle whose local sheet signatures are minimal; towers have only rotation 0.
fn candidate_rotations(abs: &Abstract, refined: &[String], i: usize) -> Vec<usize> {
    if !abs.cyclic[i] {
        return vec![0];
    }
    let sig: Vec<String> = abs.levels[i]
        .iter()
        .map(|&(sh, tag)| {
            let mut m: Vec<&str> = abs
                .levels
                .iter()
                .enumerate()
                .filter(|&(j, lv)| j != i && lv.iter().any(|l| l.0 == sh))
                .map(|(j, _)| refined[j].as_str())
                .collect();
            m.sort();
            format!("{tag}:{}", m.join(","))
        })
        .collect();
    let len = sig.len();
    let rotated = |r: usize| -> Vec<&String> { (0..len).map(|k| &sig[(k + r) % len]).collect() };
    let best = (0..len).map(rotated).min().unwrap();
    (0..len).filter(|&r| rotated(r) == best).collect()
}

fn encode(abs: &Abstract, order: &[usize], rot: &[usize], sheet_count: usize) -> String {
    let mut first_seen: Vec<Option<usize>> = vec![None; sheet_count];
    let mut next = 0;
    let mut lines = Vec::with_capacity(order.len());
    for &i in order {
        let lv = &abs.levels[i];
        let len = lv.len();
        let mut parts = Vec::with_capacity(len);
        for k in 0..len {
            let (sh, tag) = lv[(k + rot[i]) % len];
            let name = *first_seen[sh].get_or_insert_with(|| {
                next += 1;
                next - 1
            });
            parts.push(if tag == 0 { name.to_string() } else { format!("{name}:{tag}") });
        }
        let kind = if abs.cyclic[i] { "cycle" } else { "tower" };
        lines.push(format!("column {} {kind} sheets={}", abs.keys[i], parts.join(",")));
    }
    lines.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::tree::LiftedWeight;

    #[test]
    fn alternative_tree_of_three_pole_field_is_equivalent() {
        assert!(equivalent(&fixtures::tree_5_5(), &fixtures::tree_6_8()));
        assert_eq!(canonical_form(&fixtures::tree_5_5()).unwrap(), canonical_form(&fixtures::tree_6_8()).unwrap());
    }

    #[test]
    fn k_shift_by_cycle_length_is_equivalent() {
        let a = fixtures::tree_5_4();
        let mut b = a.clone();
        b.edges[1].weight = LiftedWeight::new(b.edges[1].weight.value, b.edges[1].weight.k + 3).unwrap();
        assert!(equivalent(&a, &b));
        assert_eq!(canonical_form(&a).unwrap(), canonical_form(&b).unwrap());
    }

    #[test]
    fn k_change_outside_class_is_detected() {
        let a = fixtures::tree_5_5();
        let mut b = a.clone();
        b.edges[2].weight = LiftedWeight::new(b.edges[2].weight.value, 0).unwrap();
        assert!(!equivalent(&a, &b));
        assert_ne!(canonical_form(&a).unwrap(), canonical_form(&b).unwrap());
    }

    #[test]
    fn relabelled_tree_is_equivalent() {
        let a = fixtures::tree_5_5();
        let b = a.relabel(&[3, 5, 0, 1, 4, 2]);
        assert!(equivalent(&a, &b));
        assert_eq!(canonical_form(&a).unwrap(), canonical_form(&b).unwrap());
    }

    #[test]
    fn topology_key_ignores_sign_of_imaginary_part() {
        let up = fixtures::tree_erf(Complex64::new(0.0, 1.0));
        let down = fixtures::tree_erf(Complex64::new(0.0, -1.0));
        let flat = fixtures::tree_erf(Complex64::new(1.0, 0.0));
        assert_eq!(topology_key(&up).unwrap(), topology_key(&down).unwrap());
        assert_ne!(topology_key(&up).unwrap(), topology_key(&flat).unwrap());
    }
}
