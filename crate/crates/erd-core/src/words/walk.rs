use super::{CyclicWord, Letter};
use crate::error::{ErdError, Result};
use crate::skeleton::{ColumnKind, Node, Skeleton};
use crate::tree::{height_cmp, IM_TOL};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Boundary walk of the soul at ∞.
///
/// The walk climbs the right side of a sheet through the gaps between consecutive cuts
/// and passes through the lower side of each cut it meets. On top of a sheet it turns
/// around ∞ and descends the left side. Tower tops bounce through both helicoids of the
/// tower and come back above its lowest cut.
pub fn word_at_infinity(s: &Skeleton) -> Result<CyclicWord> {
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
    let t_of = |n: Node| s.vertices[n.0].t();
    let ordered: Vec<Vec<Node>> = sheets
        .iter()
        .map(|sh| {
            let mut v = sh.clone();
            v.sort_by(|&a, &b| height_cmp(t_of(a), t_of(b), tol));
            v
        })
        .collect();
    let mut place: BTreeMap<Node, (usize, usize)> = BTreeMap::new();
    for (i, sh) in ordered.iter().enumerate() {
        for (j, &n) in sh.iter().enumerate() {
            place.insert(n, (i, j));
        }
    }
    let par = |nu: Complex64, out: &mut Vec<Letter>| {
        if nu.im.abs() > tol {
            out.push(Letter::Par(nu));
        }
    };
    let total: usize = ordered.iter().map(|sh| sh.len() + 1).sum();
    let mut visited = vec![vec![false; 0]; ordered.len()];
    for (i, sh) in ordered.iter().enumerate() {
        visited[i] = vec![false; sh.len() + 1];
    }
    let mut letters = Vec::new();
    let (mut sheet, mut gap) = (0usize, 0usize);
    for _ in 0..total {
        if visited[sheet][gap] {
            return Err(ErdError::InconsistentGluing("walk at ∞ closed before visiting every gap".into()));
        }
        visited[sheet][gap] = true;
        let cuts = &ordered[sheet];
        let k = cuts.len();
        if gap < k {
            if gap > 0 {
                par(t_of(cuts[gap]) - t_of(cuts[gap - 1]), &mut letters);
            }
            let (col, level) = cuts[gap];
            let column = &s.columns[col];
            let next = match column.kind {
                ColumnKind::Cycle { len } => (col, (level + 1).rem_euclid(len)),
                ColumnKind::Tower { min, max } => {
                    if level < max {
                        (col, level + 1)
                    } else {
                        letters.push(Letter::Ent);
                        letters.extend(std::iter::repeat_n(Letter::H, 2 * column.level_count()));
                        letters.push(Letter::Ent);
                        (col, min)
                    }
                }
            };
            let (ns, nj) = place[&next];
            sheet = ns;
            gap = nj + 1;
        } else {
            letters.push(Letter::E);
            for m in (1..k).rev() {
                par(-(t_of(cuts[m]) - t_of(cuts[m - 1])), &mut letters);
            }
            letters.push(Letter::E);
            gap = 0;
        }
    }
    if (sheet, gap) != (0, 0) {
        return Err(ErdError::InconsistentGluing("walk at ∞ does not close up".into()));
    }
    Ok(CyclicWord::new(letters))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::skeleton::blow_up;
    use crate::words::{parse_word, ph_index, reduce};

    fn word(t: &crate::tree::ConfigTree) -> CyclicWord {
        word_at_infinity(&blow_up(t)).unwrap()
    }

    fn same(a: &CyclicWord, b: &str) -> bool {
        reduce(a) == reduce(&parse_word(b).unwrap())
    }

    #[test]
    fn exp_word() {
        let w = word(&fixtures::tree_5_2(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)));
        assert!(same(&w, "E*H*"), "{w}");
        assert_eq!(reduce(&w).to_string(), "**");
        assert_eq!(ph_index(&w), 2.0);
    }

    #[test]
    fn erf_words() {
        let w1 = word(&fixtures::tree_erf(Complex64::new(1.0, 0.0)));
        assert!(same(&w1, "E*HH*E*HH*"), "{w1}");
        let wi = word(&fixtures::tree_erf(Complex64::new(0.0, 1.0)));
        assert!(same(&wi, "E*HH*P(0+2i)E*HH*P(0-2i)"), "{wi}");
    }

    #[test]
    fn double_pole_three_tracts() {
        let w = word(&fixtures::tree_5_4());
        assert_eq!(reduce(&w).to_string(), "******");
        assert_eq!(ph_index(&w), 4.0);
    }

    #[test]
    fn real_exp_over_linear() {
        let t = fixtures::tree_5_3(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let w = word(&t);
        assert!(same(&w, "**EE"), "{w}");
        assert_eq!(ph_index(&w), 3.0);
    }

    #[test]
    fn counting_identities_on_fixtures() {
        for (name, t, r, d) in fixtures::all() {
            let w = reduce(&word(&t));
            let (h, e, ent) = w.counts();
            assert_eq!(ent, 2 * d, "{name}: {w}");
            assert_eq!(h as i64 - e as i64, 2 * (d as i64 - r as i64 - 1), "{name}: {w}");
            assert_eq!(ph_index(&w), 2.0 + r as f64, "{name}: {w}");
            let sum: Complex64 = w.parabolic().iter().sum();
            assert!(sum.norm() < 1e-9, "{name}: {w}");
        }
    }
}
