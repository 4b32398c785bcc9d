use super::lift::{Geometry, LiftOptions, Point, VertexData};
use super::{branch_points, FieldSpec};
use crate::error::{ErdError, Result};
use crate::tree::{height_cmp, symmetric_mod, validate, BranchPoint, ConfigTree, Edge, LiftedWeight, IM_TOL, WEIGHT_TOL};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BuildOptions {
    pub lift: LiftOptions,
    /// Largest `|level|` tried at an essential vertex.
    pub max_essential_level: i64,
    /// Rotation of the value plane used to break horizontal ties; chosen automatically if `None`.
    pub theta: Option<f64>,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { lift: LiftOptions::default(), max_essential_level: 12, theta: None }
    }
}

/// Lifted path between two branch points sharing a sheet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalWitness {
    pub from: usize,
    pub to: usize,
    pub path_z: Vec<Complex64>,
    pub t_from: Complex64,
    pub t_to: Complex64,
}

type Germ = (usize, i64);

struct Discovery {
    sheets: Vec<Vec<Germ>>,
    witnesses: Vec<(Germ, Germ, Vec<Complex64>, Complex64, Complex64)>,
}

fn value_scale(v: &[BranchPoint]) -> f64 {
    let mut s: f64 = 0.0;
    for a in v {
        for b in v {
            s = s.max((a.t() - b.t()).norm());
        }
    }
    s
}

/// Rotation angle that separates values lying on a common horizontal line.
fn tie_rotation(v: &[BranchPoint], scale: f64) -> Result<f64> {
    let tol = IM_TOL * scale;
    let mut tied = false;
    let mut room = f64::INFINITY;
    for (i, a) in v.iter().enumerate() {
        for b in &v[i + 1..] {
            let d = b.t() - a.t();
            if d.norm() <= tol {
                continue;
            }
            if d.im.abs() <= tol {
                tied = true;
                continue;
            }
            let alpha = d.arg().rem_euclid(PI);
            room = room.min(PI - alpha);
        }
    }
    if !tied {
        return Ok(0.0);
    }
    let theta = (0.5 * room).min(1e-3);
    if theta < 1e-6 {
        return Err(ErdError::AmbiguousGeometry(format!("horizontal ties cannot be separated (room {room:e})")));
    }
    Ok(theta)
}

fn canonical_level(geo: &Geometry, g: Germ) -> Germ {
    match geo.data[g.0] {
        VertexData::Pole { mu, .. } => (g.0, g.1.rem_euclid(mu as i64 + 1)),
        VertexData::Essential { .. } => g,
    }
}

/// Germs sharing a sheet with `g`, found by lifting left, vertically, then right toward each value.
#[allow(clippy::type_complexity)]
fn sheet_of(geo: &Geometry, g: Germ, targets: &[(Complex64, Vec<usize>)], x_left: f64) -> Result<Vec<(Germ, Vec<Complex64>, Complex64, Complex64)>> {
    let (v, level) = g;
    let tv = geo.verts[v].t();
    let start = geo.germ(v, level, PI, geo.rho_start(v))?;
    let mut left_path = vec![start.z];
    let corner = geo.follow(start, &[Complex64::new(x_left, tv.im)], &mut left_path)?;
    let found: Vec<Result<Option<(Germ, Vec<Complex64>, Complex64, Complex64)>>> = targets
        .par_iter()
        .filter(|(t, _)| (t - tv).norm() > IM_TOL * geo.scale)
        .map(|(t, verts)| {
            let delta = verts.iter().map(|&w| geo.rho_end(w)).fold(f64::INFINITY, f64::min);
            let mut path = left_path.clone();
            let end: Point = geo.follow(corner, &[Complex64::new(x_left, t.im), t - delta], &mut path)?;
            for &w in verts {
                if let Some(l) = geo.classify(w, end)? {
                    return Ok(Some(((w, l), path, start.t, end.t)));
                }
            }
            Ok(None)
        })
        .collect();
    let mut out = Vec::new();
    for r in found {
        if let Some((h, path, t0, t1)) = r? {
            out.push((canonical_level(geo, h), path, t0, t1));
        }
    }
    Ok(out)
}

fn discover(geo: &Geometry, opts: &BuildOptions) -> Result<Discovery> {
    let n = geo.verts.len();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in &geo.verts {
        lo = lo.min(v.t().re);
        hi = hi.max(v.t().re);
    }
    let x_left = lo - 0.5 * geo.scale.max(hi - lo);
    let mut targets: Vec<(Complex64, Vec<usize>)> = Vec::new();
    for (i, v) in geo.verts.iter().enumerate() {
        match targets.iter_mut().find(|(t, _)| (t - v.t()).norm() <= IM_TOL * geo.scale) {
            Some(entry) => entry.1.push(i),
            None => targets.push((v.t(), vec![i])),
        }
    }
    let mut queue: VecDeque<Germ> = VecDeque::new();
    for (i, d) in geo.data.iter().enumerate() {
        if let VertexData::Pole { mu, .. } = d {
            for l in 0..=*mu as i64 {
                queue.push_back((i, l));
            }
        }
    }
    let ess: Vec<usize> = (0..n).filter(|&i| !geo.verts[i].is_pole()).collect();
    for k in 0..=opts.max_essential_level {
        for &i in &ess {
            queue.push_back((i, k));
            if k > 0 {
                queue.push_back((i, -k));
            }
        }
    }
    let needed = n - 1;
    let mut done: BTreeMap<Germ, usize> = BTreeMap::new();
    let mut sheets: Vec<Vec<Germ>> = Vec::new();
    let mut witnesses = Vec::new();
    let mut merged = 0usize;
    while merged < needed {
        let Some(g) = queue.pop_front() else {
            return Err(ErdError::NonConvergence(format!("found {merged} of {needed} sheet identifications")));
        };
        if done.contains_key(&g) {
            continue;
        }
        let hits = sheet_of(geo, g, &targets, x_left)?;
        let mut members = vec![g];
        for (h, path, t0, t1) in hits {
            if members.iter().any(|m| m.0 == h.0) {
                return Err(ErdError::AmbiguousGeometry(format!("vertex {} met twice on one sheet", h.0)));
            }
            if let Some(&other) = done.get(&h) {
                return Err(ErdError::AmbiguousGeometry(format!("germ {h:?} already lies on sheet {other}")));
            }
            members.push(h);
            witnesses.push((g, h, path, t0, t1));
        }
        let id = sheets.len();
        for &m in &members {
            done.insert(m, id);
        }
        merged += members.len() - 1;
        if members.len() > 1 {
            for &m in &members[1..] {
                if let VertexData::Essential { .. } = geo.data[m.0] {
                    queue.push_front(m);
                }
            }
        }
        sheets.push(members);
    }
    if merged != needed {
        return Err(ErdError::AmbiguousGeometry(format!("{merged} sheet identifications, expected {needed}")));
    }
    sheets.retain(|s| s.len() > 1);
    Ok(Discovery { sheets, witnesses })
}

/// Preferred horizontal subtrees on each sheet, oriented away from the starting vertex.
fn assemble(geo: &Geometry, disc: &Discovery, original: &[BranchPoint]) -> Result<ConfigTree> {
    let n = geo.verts.len();
    let tol = IM_TOL * geo.scale;
    let first = (0..n).min_by(|&a, &b| original[a].start_order(&original[b])).unwrap();
    let start = (0..n)
        .filter(|&v| (original[v].t() - original[first].t()).norm() <= tol)
        .min_by(|&a, &b| original[a].with_t(original[first].t()).start_order(&original[b].with_t(original[first].t())))
        .unwrap();
    let mut adj: Vec<Vec<(usize, i64, i64)>> = vec![Vec::new(); n];
    for sheet in &disc.sheets {
        let mut s = sheet.clone();
        s.sort_by(|a, b| height_cmp(geo.verts[a.0].t(), geo.verts[b.0].t(), tol));
        for w in s.windows(2) {
            adj[w[0].0].push((w[1].0, w[0].1, w[1].1));
            adj[w[1].0].push((w[0].0, w[1].1, w[0].1));
        }
    }
    let ref0 = adj[start]
        .iter()
        .map(|e| e.1)
        .min()
        .ok_or_else(|| ErdError::AmbiguousGeometry("starting vertex shares no sheet".into()))?;
    let mut refl = vec![None; n];
    refl[start] = Some(ref0);
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([start]);
    let mut order: Vec<(usize, i64, i64)>;
    while let Some(a) = queue.pop_front() {
        order = adj[a].clone();
        order.sort();
        for (b, la, lb) in order {
            if refl[b].is_some() {
                continue;
            }
            let raw = la - refl[a].unwrap();
            let k = match original[a] {
                BranchPoint::Pole { mu, .. } => symmetric_mod(raw, mu as i64 + 1),
                BranchPoint::Essential { .. } => raw,
            };
            refl[b] = Some(lb);
            edges.push(Edge { from: a, to: b, weight: LiftedWeight::new(original[b].t() - original[a].t(), k)? });
            queue.push_back(b);
        }
    }
    if edges.len() != n - 1 {
        return Err(ErdError::AmbiguousGeometry("sheet graph is not connected".into()));
    }
    Ok(ConfigTree { vertices: original.to_vec(), edges, start })
}

struct Built {
    tree: ConfigTree,
    witnesses: Vec<DiagonalWitness>,
}

fn build(f: &FieldSpec, opts: &BuildOptions) -> Result<Built> {
    let original = branch_points(f, opts.lift.rel_tol).map_err(|e| match e {
        ErdError::ToleranceNotMet { value, .. } if !value.is_finite() => {
            ErdError::AmbiguousGeometry("a branch value lies outside the floating-point range".into())
        }
        e => e,
    })?;
    if original.len() == 1 {
        return Ok(Built { tree: ConfigTree::single(original[0]), witnesses: Vec::new() });
    }
    let scale = value_scale(&original);
    if scale == 0.0 {
        return Err(ErdError::AmbiguousGeometry("all branch values coincide".into()));
    }
    for (i, a) in original.iter().enumerate() {
        for b in &original[i + 1..] {
            let d = (a.t() - b.t()).norm();
            let identical_tracts = !a.is_pole() && !b.is_pole() && d <= IM_TOL * a.t().norm().max(b.t().norm()).max(scale.min(1.0));
            if d <= WEIGHT_TOL * scale && !identical_tracts {
                return Err(ErdError::AmbiguousGeometry(format!("values {} and {} nearly coincide", a.t(), b.t())));
            }
        }
    }
    let theta = match opts.theta {
        Some(t) => t,
        None => tie_rotation(&original, scale)?,
    };
    let rot = Complex64::from_polar(1.0, theta);
    let rotated: Vec<BranchPoint> = original.iter().map(|b| b.with_t(b.t() * rot)).collect();
    let geo = Geometry::new(f.scaled(rot), rotated, opts.lift)?;
    let disc = discover(&geo, opts)?;
    let tree = assemble(&geo, &disc, &original)?;
    let report = validate(&tree);
    if !report.is_valid() {
        return Err(ErdError::AmbiguousGeometry(format!("extracted tree is not admissible: {report:?}")));
    }
    let back = rot.conj();
    let witnesses = disc
        .witnesses
        .into_iter()
        .map(|(g, h, path, t0, t1)| DiagonalWitness { from: g.0, to: h.0, path_z: path, t_from: t0 * back, t_to: t1 * back })
        .collect();
    Ok(Built { tree, witnesses })
}

/// Configuration tree of the field, discovered by lifting paths between branch values.
pub fn build_config_tree(f: &FieldSpec, opts: &BuildOptions) -> Result<ConfigTree> {
    Ok(build(f, opts)?.tree)
}

/// Lifted paths joining branch points on common sheets, in the unrotated value plane.
pub fn diagonal_witnesses(f: &FieldSpec, opts: &BuildOptions) -> Result<Vec<DiagonalWitness>> {
    Ok(build(f, opts)?.witnesses)
}
