//! Line-based text format for configuration trees.
//!
//! ```text
//! erd-tree/1
//! vertex 0 essential tract=1 t=-1.0,0.0
//! vertex 1 pole mu=2 p=0.0,0.0 t=0.0,0.0
//! start 0
//! edge 0 1 value=1.0,0.0 K=0
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Floats use the shortest
//! representation that parses back to the same bits.

use super::{BranchPoint, ConfigTree, Edge, LiftedWeight};
use crate::error::{ErdError, Result};
use num_complex::Complex64;
use std::fmt::Write;

pub const TREE_FORMAT: &str = "erd-tree/1";

fn fmt_c(z: Complex64) -> String {
    format!("{:?},{:?}", z.re, z.im)
}

/// Serialises vertices in index order and edges in breadth-first order from the start.
pub fn write_tree(t: &ConfigTree) -> String {
    let mut out = String::new();
    writeln!(out, "{TREE_FORMAT}").unwrap();
    for (i, v) in t.vertices.iter().enumerate() {
        match *v {
            BranchPoint::Pole { p, p_tilde, mu } => {
                writeln!(out, "vertex {i} pole mu={mu} p={} t={}", fmt_c(p), fmt_c(p_tilde)).unwrap()
            }
            BranchPoint::Essential { tract, a } => {
                writeln!(out, "vertex {i} essential tract={tract} t={}", fmt_c(a)).unwrap()
            }
        }
    }
    writeln!(out, "start {}", t.start).unwrap();
    let order = t.traversal_order().unwrap_or_else(|| (0..t.edges.len()).collect());
    for i in order {
        let e = &t.edges[i];
        writeln!(out, "edge {} {} value={} K={}", e.from, e.to, fmt_c(e.weight.value), e.weight.k).unwrap();
    }
    out
}

fn bad(line: usize, msg: impl Into<String>) -> ErdError {
    ErdError::InvalidInput(format!("line {}: {}", line + 1, msg.into()))
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| bad(line, format!("bad number '{s}'")))?;
    if !v.is_finite() {
        return Err(bad(line, "non-finite number"));
    }
    Ok(v)
}

fn parse_c(s: &str, line: usize) -> Result<Complex64> {
    let (a, b) = s.split_once(',').ok_or_else(|| bad(line, format!("expected re,im in '{s}'")))?;
    Ok(Complex64::new(parse_f64(a, line)?, parse_f64(b, line)?))
}

fn field<'a>(tok: &'a str, key: &str, line: usize) -> Result<&'a str> {
    tok.strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| bad(line, format!("expected {key}=…, found '{tok}'")))
}

fn parse_usize(s: &str, line: usize) -> Result<usize> {
    s.parse().map_err(|_| bad(line, format!("bad index '{s}'")))
}

/// Parses the text format; structural validity is left to `validate`.
pub fn parse_tree(src: &str) -> Result<ConfigTree> {
    let mut lines = src
        .lines()
        .enumerate()
        .map(|(i, l)| (i, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, h)) if h == TREE_FORMAT => {}
        Some((i, h)) => return Err(bad(i, format!("expected header '{TREE_FORMAT}', found '{h}'"))),
        None => return Err(ErdError::InvalidInput("empty tree document".into())),
    }
    let mut vertices: Vec<Option<BranchPoint>> = Vec::new();
    let mut edges = Vec::new();
    let mut start = None;
    for (i, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.first().copied() {
            Some("vertex") => {
                if toks.len() < 4 {
                    return Err(bad(i, "short vertex line"));
                }
                let idx = parse_usize(toks[1], i)?;
                if idx > 10_000 {
                    return Err(bad(i, "vertex index too large"));
                }
                let v = match toks[2] {
                    "pole" if toks.len() == 6 => {
                        let mu: u32 = field(toks[3], "mu", i)?.parse().map_err(|_| bad(i, "bad mu"))?;
                        BranchPoint::Pole {
                            mu,
                            p: parse_c(field(toks[4], "p", i)?, i)?,
                            p_tilde: parse_c(field(toks[5], "t", i)?, i)?,
                        }
                    }
                    "essential" if toks.len() == 5 => BranchPoint::Essential {
                        tract: parse_usize(field(toks[3], "tract", i)?, i)?,
                        a: parse_c(field(toks[4], "t", i)?, i)?,
                    },
                    _ => return Err(bad(i, "vertex kind must be 'pole mu= p= t=' or 'essential tract= t='")),
                };
                if vertices.len() <= idx {
                    vertices.resize(idx + 1, None);
                }
                if vertices[idx].is_some() {
                    return Err(bad(i, format!("duplicate vertex {idx}")));
                }
                vertices[idx] = Some(v);
            }
            Some("start") if toks.len() == 2 => {
                if start.is_some() {
                    return Err(bad(i, "duplicate start line"));
                }
                start = Some(parse_usize(toks[1], i)?);
            }
            Some("edge") if toks.len() == 5 => {
                let from = parse_usize(toks[1], i)?;
                let to = parse_usize(toks[2], i)?;
                let value = parse_c(field(toks[3], "value", i)?, i)?;
                let k: i64 = field(toks[4], "K", i)?.parse().map_err(|_| bad(i, "bad K"))?;
                let weight = LiftedWeight::new(value, k).map_err(|e| bad(i, e.to_string()))?;
                edges.push(Edge { from, to, weight });
            }
            _ => return Err(bad(i, format!("unrecognised line '{l}'"))),
        }
    }
    let vertices: Vec<BranchPoint> = vertices
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| ErdError::InvalidInput(format!("vertex {i} missing"))))
        .collect::<Result<_>>()?;
    let start = start.ok_or_else(|| ErdError::InvalidInput("missing start line".into()))?;
    if start >= vertices.len() || edges.iter().any(|e| e.from >= vertices.len() || e.to >= vertices.len()) {
        return Err(ErdError::InvalidInput("index out of range".into()));
    }
    Ok(ConfigTree { vertices, edges, start })
}
