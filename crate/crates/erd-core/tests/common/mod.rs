#![allow(dead_code)]

use erd_core::field::{build_config_tree, BuildOptions, FieldSpec};
use erd_core::numerics::ComplexPoly;
use erd_core::tree::{symmetric_mod, validate, BranchPoint, ConfigTree};
use erd_core::words::{CyclicWord, Letter};
use erd_core::ErdError;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn disk(rng: &mut ChaCha8Rng) -> Complex64 {
    loop {
        let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if z.norm() <= 1.0 {
            return z;
        }
    }
}

/// Field with `r, d ≤ 3`, `r + d ≥ 1`, every coefficient uniform in the unit disk.
pub fn random_field(rng: &mut ChaCha8Rng) -> FieldSpec {
    let r = rng.gen_range(0..=3usize);
    let d = rng.gen_range(if r == 0 { 1 } else { 0 }..=3usize);
    let p: Vec<Complex64> = (0..=r).map(|_| disk(rng)).collect();
    let mut e: Vec<Complex64> = (0..=d).map(|_| disk(rng)).collect();
    if d == 0 {
        e = vec![Complex64::new(0.0, 0.0)];
    }
    FieldSpec::new(ComplexPoly::new(p), ComplexPoly::new(e), Complex64::new(0.0, 0.0)).unwrap()
}

pub struct Sweep {
    pub accepted: Vec<(FieldSpec, ConfigTree)>,
    pub rejected: usize,
}

/// Draws fields until `n` build a tree. Draws with a leading coefficient below 0.05 or that
/// end in `AmbiguousGeometry` count as degenerate and are skipped.
pub fn sweep(seed: u64, n: usize) -> Sweep {
    let mut g = rng(seed);
    let mut out = Sweep { accepted: Vec::new(), rejected: 0 };
    while out.accepted.len() < n {
        let f = random_field(&mut g);
        if f.p.leading().norm() < 0.05 || (f.d() > 0 && f.e.leading().norm() < 0.05) {
            out.rejected += 1;
            continue;
        }
        match build_config_tree(&f, &BuildOptions::default()) {
            Ok(t) => out.accepted.push((f, t)),
            Err(ErdError::AmbiguousGeometry(_)) => out.rejected += 1,
            Err(e) => panic!("field {:?} / {:?}: {e}", f.p.coeffs(), f.e.coeffs()),
        }
    }
    out
}

/// Valid tree with random shape, values and lifts.
pub fn random_tree(rng: &mut ChaCha8Rng) -> ConfigTree {
    loop {
        let poles = rng.gen_range(0..=3usize);
        let d = rng.gen_range(if poles == 0 { 1 } else { 0 }..=3usize);
        let n = poles + d;
        let mut vertices: Vec<BranchPoint> = (0..poles)
            .map(|i| BranchPoint::Pole {
                p: Complex64::new(i as f64, 0.0),
                p_tilde: Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
                mu: rng.gen_range(1..=3),
            })
            .collect();
        vertices.extend(
            (1..=d).map(|tract| BranchPoint::Essential { tract, a: Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)) }),
        );
        if rng.gen_bool(0.3) && n >= 2 {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let y = vertices[i].t().im;
            vertices[j] = vertices[j].with_t(Complex64::new(vertices[j].t().re, y));
        }
        let start = rng.gen_range(0..n);
        let mut order: Vec<usize> = (0..n).filter(|&v| v != start).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let mut placed = vec![start];
        let mut edges = Vec::new();
        for (idx, &v) in order.iter().enumerate() {
            let parent = if idx == 0 { start } else { placed[rng.gen_range(0..placed.len())] };
            let k = if parent == start && !edges.iter().any(|&(a, _, _)| a == start) {
                0
            } else {
                match vertices[parent].mu() {
                    Some(mu) => symmetric_mod(rng.gen_range(-3..=3), mu as i64 + 1),
                    None => rng.gen_range(-2..=2),
                }
            };
            edges.push((parent, v, k));
            placed.push(v);
        }
        if let Ok(t) = ConfigTree::from_edges(vertices, start, &edges) {
            if validate(&t).is_valid() {
                return t;
            }
        }
    }
}

pub fn random_word(rng: &mut ChaCha8Rng, max_len: usize) -> CyclicWord {
    let len = rng.gen_range(0..=max_len);
    let letters = (0..len)
        .map(|_| match rng.gen_range(0..7) {
            0 | 1 => Letter::E,
            2 | 3 => Letter::H,
            4 | 5 => Letter::Ent,
            _ => Letter::Par(Complex64::new(0.0, if rng.gen_bool(0.5) { 1.0 } else { -2.0 })),
        })
        .collect();
    CyclicWord::new(letters)
}
