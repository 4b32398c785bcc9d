//! The `erd-report/1` JSON document and its plain-text summary.

use erd_core::classify::{count_topologies, is_structurally_stable, StabilityReason, TopologyCount};
use erd_core::field::FieldSpec;
use erd_core::skeleton::{blow_up, strip_decomposition, ColumnKind, Skeleton, StripDecomposition};
use erd_core::tree::{degree_signature, BranchPoint, ConfigTree, DegreeSignature};
use erd_core::words::{ph_index, reduce, word_at_infinity, word_at_pole, CyclicWord, Letter};
use erd_core::{Complex64, Result};
use serde_json::{json, Value};
use std::fmt::Write;

pub const REPORT_FORMAT: &str = "erd-report/1";

/// Rounds to 12 significant digits and clears the sign of zero.
pub fn r12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return 0.0;
    }
    let y: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    if y == 0.0 {
        0.0
    } else {
        y
    }
}

fn c12(z: Complex64) -> Value {
    json!([r12(z.re), r12(z.im)])
}

fn rounded_word(w: &CyclicWord) -> CyclicWord {
    CyclicWord {
        letters: w
            .letters
            .iter()
            .map(|&l| match l {
                Letter::Par(nu) => Letter::Par(Complex64::new(r12(nu.re), r12(nu.im))),
                other => other,
            })
            .collect(),
        residue: Complex64::new(r12(w.residue.re), r12(w.residue.im)),
    }
}

/// The reduced word with parabolic letters removed and reduced again.
pub fn sectors_without_parabolic(w: &CyclicWord) -> CyclicWord {
    let kept = reduce(w).letters.into_iter().filter(|l| !l.is_parabolic()).collect();
    reduce(&CyclicWord::new(kept))
}

/// Everything the analysis derives from one tree.
pub struct Analysis {
    pub tree: ConfigTree,
    pub signature: DegreeSignature,
    pub skeleton: Skeleton,
    pub strips: StripDecomposition,
    pub word: CyclicWord,
    pub reduced: CyclicWord,
}

impl Analysis {
    pub fn of(tree: ConfigTree) -> Result<Analysis> {
        let signature = degree_signature(&tree);
        let skeleton = blow_up(&tree);
        let strips = strip_decomposition(&skeleton)?;
        let word = word_at_infinity(&skeleton)?;
        let reduced = reduce(&word);
        Ok(Analysis { tree, signature, skeleton, strips, word, reduced })
    }
}

fn vertex_json(v: &BranchPoint) -> Value {
    match *v {
        BranchPoint::Pole { p, p_tilde, mu } => json!({ "kind": "pole", "p": c12(p), "t": c12(p_tilde), "mu": mu }),
        BranchPoint::Essential { tract, a } => json!({ "kind": "essential", "tract": tract, "t": c12(a) }),
    }
}

pub fn tree_json(t: &ConfigTree) -> Value {
    let order = t.traversal_order().unwrap_or_else(|| (0..t.edges.len()).collect());
    json!({
        "start": t.start,
        "vertices": t.vertices.iter().map(vertex_json).collect::<Vec<_>>(),
        "edges": order.iter().map(|&i| {
            let e = &t.edges[i];
            json!({ "from": e.from, "to": e.to, "value": c12(e.weight.value), "k": e.weight.k })
        }).collect::<Vec<_>>(),
    })
}

pub fn skeleton_json(s: &Skeleton) -> Value {
    let columns: Vec<Value> = s
        .columns
        .iter()
        .map(|c| match c.kind {
            ColumnKind::Tower { min, max } => json!({ "vertex": c.vertex, "kind": "tower", "min": min, "max": max }),
            ColumnKind::Cycle { len } => json!({ "vertex": c.vertex, "kind": "cycle", "length": len }),
        })
        .collect();
    let sheets = s.sheets().map(|v| v.len()).unwrap_or(0);
    json!({ "columns": columns, "sheets": sheets, "horizontal_edges": s.horizontal_edges.len() })
}

pub fn strips_json(d: &StripDecomposition) -> Value {
    json!({
        "half_planes_from_poles": d.half_planes_from_poles,
        "finite_helicoids": d.finite_helicoids.iter().map(|&(v, k)| json!({ "vertex": v, "k": k })).collect::<Vec<_>>(),
        "semi_infinite_helicoids": d.semi_infinite_helicoids,
        "finite_strips": d.finite_strips.iter().map(|&h| r12(h)).collect::<Vec<_>>(),
        "infinite_half_planes": d.infinite_half_planes,
    })
}

pub fn word_json(w: &CyclicWord) -> Value {
    let red = rounded_word(&reduce(w));
    let (h, e, ent) = red.counts();
    json!({
        "raw": rounded_word(w).to_string(),
        "reduced": red.to_string(),
        "unicode": red.to_unicode(),
        "sectors_without_parabolic": sectors_without_parabolic(w).to_unicode(),
        "counts": { "h": h, "e": e, "entire": ent, "parabolic": red.parabolic().len() },
    })
}

pub fn stability_json(t: &ConfigTree) -> Value {
    let v = is_structurally_stable(t);
    let reasons: Vec<Value> = v
        .reasons
        .iter()
        .map(|r| match *r {
            StabilityReason::NonSimplePole { vertex, p, mu } => json!({ "kind": "non_simple_pole", "vertex": vertex, "p": c12(p), "mu": mu }),
            StabilityReason::RealImaginaryEdge { edge } => json!({ "kind": "real_edge", "edge": edge }),
            StabilityReason::ZeroImaginaryWithinTolerance { edge, im } => {
                json!({ "kind": "zero_imaginary_within_tolerance", "edge": edge, "im": r12(im) })
            }
        })
        .collect();
    json!({ "stable": v.stable, "reasons": reasons })
}

pub fn topology_json(c: TopologyCount) -> Value {
    match c {
        TopologyCount::Finite(n) => json!({ "kind": "finite", "value": n.to_string() }),
        TopologyCount::Infinite => json!({ "kind": "infinite" }),
        TopologyCount::UpperBound(n) => json!({ "kind": "upper_bound", "value": n.to_string() }),
    }
}

fn poly_json(p: &erd_core::numerics::ComplexPoly) -> Value {
    Value::Array(p.coeffs().iter().map(|&c| c12(c)).collect())
}

pub fn report(f: &FieldSpec, a: &Analysis) -> Value {
    let sig = &a.signature;
    let poles: Vec<Value> = a
        .tree
        .vertices
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.mu().map(|mu| json!({ "vertex": i, "mu": mu, "index": ph_index(&word_at_pole(mu)) })))
        .collect();
    json!({
        "format": REPORT_FORMAT,
        "field": { "p": poly_json(&f.p), "e": poly_json(&f.e), "z0": c12(f.z0) },
        "signature": {
            "r": sig.r, "d": sig.d, "n": sig.n,
            "multiplicities": sig.multiplicities,
            "asymptotic_multiplicities": sig.asymptotic_multiplicities,
        },
        "tree": tree_json(&a.tree),
        "skeleton": skeleton_json(&a.skeleton),
        "strips": strips_json(&a.strips),
        "word": word_json(&a.word),
        "ph_index": { "infinity": ph_index(&a.reduced), "poles": poles },
        "stability": stability_json(&a.tree),
        "topologies": count_topologies(sig.r, sig.d as u32).map(topology_json).unwrap_or(Value::Null),
    })
}

pub fn to_text(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("report values are plain JSON") + "\n"
}

/// Short human-readable summary of a report.
pub fn summary(a: &Analysis) -> String {
    let mut s = String::new();
    let sig = &a.signature;
    writeln!(s, "signature   r={} d={} n={}", sig.r, sig.d, sig.n).unwrap();
    writeln!(s, "tree        {} vertices, {} edges, start {}", a.tree.vertices.len(), a.tree.edges.len(), a.tree.start).unwrap();
    for e in &a.tree.edges {
        let w = e.weight.value;
        writeln!(s, "  edge      {} -> {}  value {:.6}{:+.6}i  K={}", e.from, e.to, w.re, w.im, e.weight.k).unwrap();
    }
    writeln!(s, "sheets      {}", a.skeleton.sheets().map(|v| v.len()).unwrap_or(0)).unwrap();
    writeln!(s, "strips      {} finite, infinite half planes: {}", a.strips.finite_strips.len(), a.strips.infinite_half_planes).unwrap();
    writeln!(s, "word        {}", rounded_word(&a.reduced).to_unicode()).unwrap();
    writeln!(s, "  sectors   {}", sectors_without_parabolic(&a.word).to_unicode()).unwrap();
    writeln!(s, "PH at ∞     {}", ph_index(&a.reduced)).unwrap();
    let v = is_structurally_stable(&a.tree);
    writeln!(s, "stability   {}", if v.stable { "stable" } else { "unstable" }).unwrap();
    s
}
