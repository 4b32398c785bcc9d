use super::is_structurally_stable;
use crate::error::{ErdError, Result};
use crate::skeleton::topology_key;
use crate::tree::{symmetric_mod, validate, validate_with_signature, BranchPoint, ConfigTree, Edge, LiftedWeight, IM_TOL};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::{BTreeSet, VecDeque};

/// Weight values covering `Im < 0`, `Im = 0` and `Im > 0` in several directions.
pub fn standard_grid() -> Vec<Complex64> {
    [(1.0, 0.0), (-1.0, 0.0), (2.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
        .iter()
        .map(|&(re, im)| Complex64::new(re, im))
        .collect()
}

fn integer_partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in (1..=n.min(max)).rev() {
        for mut rest in integer_partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn decode_pruefer(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &x in seq {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &x in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf, x));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

fn labelled_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    match n {
        0 | 1 => vec![Vec::new()],
        2 => vec![vec![(0, 1)]],
        _ => {
            let total = n.pow(n as u32 - 2);
            (0..total)
                .map(|mut code| {
                    let seq: Vec<usize> = (0..n - 2)
                        .map(|_| {
                            let x = code % n;
                            code /= n;
                            x
                        })
                        .collect();
                    decode_pruefer(&seq, n)
                })
                .collect()
        }
    }
}

/// Edges oriented away from `start`, in breadth-first order.
fn orient(edges: &[(usize, usize)], n: usize, start: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &(a, b) in edges {
            let w = if a == v { b } else if b == v { a } else { continue };
            if !seen[w] {
                seen[w] = true;
                out.push((v, w));
                queue.push_back(w);
            }
        }
    }
    out
}

fn k_choices(v: &BranchPoint, bound: i64) -> Vec<i64> {
    match v.mu() {
        Some(mu) => {
            let m = mu as i64 + 1;
            (-bound..=bound).filter(|&k| symmetric_mod(k, m) == k).collect()
        }
        None => (-bound..=bound).collect(),
    }
}

fn trees_of(
    vertices: &[BranchPoint],
    oriented: &[(usize, usize)],
    start: usize,
    r: u32,
    d: usize,
    k_bound: i64,
    grid: &[Complex64],
) -> Vec<ConfigTree> {
    let mut out = Vec::new();
    let choices: Vec<Vec<(Complex64, i64)>> = oriented
        .iter()
        .map(|&(a, _)| {
            let ks = k_choices(&vertices[a], k_bound);
            grid.iter().flat_map(|&w| ks.iter().map(move |&k| (w, k))).collect()
        })
        .collect();
    let mut idx = vec![0usize; oriented.len()];
    loop {
        let mut vs = vertices.to_vec();
        vs[start] = vs[start].with_t(Complex64::new(0.0, 0.0));
        let mut triples = Vec::with_capacity(oriented.len());
        for (e, &(a, b)) in oriented.iter().enumerate() {
            let (w, k) = choices[e][idx[e]];
            vs[b] = vs[b].with_t(vs[a].t() + w);
            triples.push((a, b, k));
        }
        if let Ok(t) = ConfigTree::from_edges(vs, start, &triples) {
            if validate_with_signature(&t, r, d).is_valid() {
                out.push(t);
            }
        }
        let mut e = 0;
        loop {
            if e == idx.len() {
                return out;
            }
            idx[e] += 1;
            if idx[e] < choices[e].len() {
                break;
            }
            idx[e] = 0;
            e += 1;
        }
    }
}

/// Every valid `(r, d)` tree whose edge weights lie on `grid` and whose lifts satisfy
/// `|K| ≤ k_bound`, in a deterministic order.
pub fn enumerate_trees(r: u32, d: usize, k_bound: i64, grid: &[Complex64]) -> Result<Vec<ConfigTree>> {
    if r as usize + d == 0 {
        return Err(ErdError::InvalidInput("r + d must be at least 1".into()));
    }
    if r as usize + d > 4 {
        return Err(ErdError::InvalidInput("enumeration is limited to r + d ≤ 4".into()));
    }
    let mut jobs = Vec::new();
    for parts in integer_partitions(r, r.max(1)) {
        let mut vertices: Vec<BranchPoint> = parts
            .iter()
            .enumerate()
            .map(|(i, &mu)| BranchPoint::Pole { p: Complex64::new(i as f64, 0.0), p_tilde: Complex64::new(0.0, 0.0), mu })
            .collect();
        vertices.extend((1..=d).map(|tract| BranchPoint::Essential { tract, a: Complex64::new(0.0, 0.0) }));
        let n = vertices.len();
        for tree in labelled_trees(n) {
            for start in 0..n {
                jobs.push((vertices.clone(), orient(&tree, n, start), start));
            }
        }
    }
    Ok(jobs
        .par_iter()
        .map(|(vs, oriented, start)| trees_of(vs, oriented, *start, r, d, k_bound, grid))
        .flatten()
        .collect())
}

/// Distinct topology keys among [`enumerate_trees`], sorted.
pub fn enumerate_classes(r: u32, d: usize, k_bound: i64, grid: &[Complex64]) -> Result<Vec<String>> {
    let keys: BTreeSet<String> =
        enumerate_trees(r, d, k_bound, grid)?.par_iter().filter_map(|t| topology_key(t).ok()).collect();
    Ok(keys.into_iter().collect())
}

/// Adds `deltas[e]` to each edge value and recomputes vertex values from the start vertex.
pub fn perturb_weights(t: &ConfigTree, deltas: &[Complex64]) -> Result<ConfigTree> {
    if deltas.len() != t.edges.len() {
        return Err(ErdError::InvalidInput("one perturbation per edge is required".into()));
    }
    let order = t.traversal_order().ok_or_else(|| ErdError::InvalidInput("edges do not form an oriented tree".into()))?;
    let mut vertices = t.vertices.clone();
    let mut edges = t.edges.clone();
    for ei in order {
        let e = t.edges[ei];
        let w = LiftedWeight::new(e.weight.value + deltas[ei], e.weight.k)?;
        vertices[e.to] = vertices[e.to].with_t(vertices[e.from].t() + w.value);
        edges[ei] = Edge { weight: w, ..e };
    }
    Ok(ConfigTree { vertices, edges, start: t.start })
}

fn perturbation_sets(edges: usize, eps: f64) -> Vec<Vec<Complex64>> {
    let dirs: Vec<Complex64> = (0..8).map(|k| Complex64::from_polar(eps, k as f64 * std::f64::consts::FRAC_PI_4)).collect();
    let mut sets = vec![vec![Complex64::new(0.0, 0.0); edges]];
    if edges <= 3 {
        let total = dirs.len().pow(edges as u32);
        for mut code in 0..total {
            sets.push(
                (0..edges)
                    .map(|_| {
                        let x = dirs[code % dirs.len()];
                        code /= dirs.len();
                        x
                    })
                    .collect(),
            );
        }
    } else {
        for e in 0..edges {
            for &dz in &dirs {
                let mut s = vec![Complex64::new(0.0, 0.0); edges];
                s[e] = dz;
                sets.push(s);
            }
        }
    }
    sets
}

/// Finite check of structural stability by weight perturbations of size `eps`.
///
/// A stable tree keeps its class under every perturbation that preserves the sign of each
/// `Im` weight. An unstable tree has two perturbations in different classes. Returns `None`
/// for trees with multiple poles, whose splitting is not a weight perturbation.
pub fn perturbation_dichotomy(t: &ConfigTree, eps: f64) -> Option<bool> {
    if t.vertices.iter().any(|v| v.mu().is_some_and(|m| m > 1)) {
        return None;
    }
    let base = topology_key(t).ok()?;
    let tol = IM_TOL * t.value_scale();
    let sign = |x: f64| if x.abs() <= tol { 0 } else { x.signum() as i32 };
    let stable = is_structurally_stable(t).stable;
    let mut classes = BTreeSet::from([base.clone()]);
    for deltas in perturbation_sets(t.edges.len(), eps) {
        let keeps_signs = t.edges.iter().zip(&deltas).all(|(e, &dz)| sign(e.weight.value.im) == sign((e.weight.value + dz).im));
        if stable && !keeps_signs {
            continue;
        }
        let key = match perturb_weights(t, &deltas) {
            Ok(p) if validate(&p).is_valid() => topology_key(&p).ok(),
            _ => None,
        };
        match key {
            Some(k) => {
                classes.insert(k);
            }
            None if stable => return Some(false),
            None => {}
        }
    }
    Some(if stable { classes.len() == 1 } else { classes.len() > 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pruefer_counts() {
        for n in 1..=5 {
            let trees = labelled_trees(n);
            let expected = if n < 2 { 1 } else { n.pow(n as u32 - 2) };
            assert_eq!(trees.len(), expected);
            for t in trees {
                assert_eq!(t.len(), n.saturating_sub(1));
            }
        }
    }

    #[test]
    fn partitions_enumerated() {
        assert_eq!(integer_partitions(4, 4).len(), 5);
        assert_eq!(integer_partitions(2, 2), vec![vec![2], vec![1, 1]]);
    }

    #[test]
    fn dichotomy_on_small_grids() {
        let g = standard_grid();
        for (r, d) in [(1, 1), (0, 2)] {
            let trees = enumerate_trees(r, d, 2, &g).unwrap();
            assert!(!trees.is_empty());
            for t in trees {
                assert_eq!(perturbation_dichotomy(&t, 1e-3), Some(true), "{t:?}");
            }
        }
    }

    #[test]
    fn table_rows() {
        let g = standard_grid();
        for (r, d, n) in [(1, 0, 1), (0, 1, 1), (0, 2, 2), (1, 1, 2), (2, 0, 3)] {
            assert_eq!(enumerate_classes(r, d, 2, &g).unwrap().len(), n, "({r},{d})");
        }
    }
}
