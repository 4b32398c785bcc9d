use super::{branch_points, tail_integral, tract_directions, FieldSpec, Tract};
use crate::error::{ErdError, Result};
use crate::numerics::{gk15, integrate_entire, ComplexPoly};
use crate::tree::BranchPoint;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiftOptions {
    pub rel_tol: f64,
    pub max_steps: usize,
}

impl Default for LiftOptions {
    fn default() -> Self {
        LiftOptions { rel_tol: 1e-10, max_steps: 200_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Terminal {
    Reached(BranchPoint),
    /// Growth sector index, counted from the positive real axis.
    EscapedToInfinity(usize),
    Diverged,
    /// The segment ends at a regular point of the surface.
    Regular { z: Complex64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftOutcome {
    pub terminal: Terminal,
    pub path_z: Vec<Complex64>,
    /// Level of the germ reached at the end (0 unless `Reached`).
    pub turns: i64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum VertexData {
    Pole { p: Complex64, mu: u32, c: Complex64 },
    Essential { tract: Tract },
}

/// A lifted point: `z` together with the tracked value `t = Ψ(z)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Point {
    pub z: Complex64,
    pub t: Complex64,
}

pub(crate) struct Geometry {
    pub f: FieldSpec,
    pub verts: Vec<BranchPoint>,
    pub data: Vec<VertexData>,
    pub scale: f64,
    pub opts: LiftOptions,
    dp: ComplexPoly,
    de: ComplexPoly,
    dde: ComplexPoly,
    poles: Vec<Complex64>,
    e_center: Complex64,
    escape_radius: f64,
}

fn wrap(a: f64) -> f64 {
    let x = (a + PI).rem_euclid(2.0 * PI) - PI;
    if x <= -PI {
        x + 2.0 * PI
    } else {
        x
    }
}

fn arg0(z: Complex64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

impl Geometry {
    pub fn new(f: FieldSpec, verts: Vec<BranchPoint>, opts: LiftOptions) -> Result<Self> {
        let tracts = tract_directions(&f);
        let mut scale: f64 = 0.0;
        for a in &verts {
            for b in &verts {
                scale = scale.max((a.t() - b.t()).norm());
            }
        }
        if scale == 0.0 {
            scale = verts.iter().map(|v| v.t().norm()).fold(1.0, f64::max);
        }
        let mut data = Vec::with_capacity(verts.len());
        for v in &verts {
            data.push(match *v {
                BranchPoint::Pole { p, mu, .. } => {
                    let taylor = f.p.taylor_shift(p);
                    let lead = taylor.coeffs().get(mu as usize).copied().unwrap_or_default();
                    VertexData::Pole { p, mu, c: lead * (-f.e.eval(p)).exp() / (mu as f64 + 1.0) }
                }
                BranchPoint::Essential { tract, .. } => VertexData::Essential {
                    tract: *tracts
                        .get(tract.wrapping_sub(1))
                        .ok_or_else(|| ErdError::InvalidInput(format!("tract index {tract} out of range")))?,
                },
            });
        }
        let poles: Vec<Complex64> = verts
            .iter()
            .filter_map(|v| match v {
                BranchPoint::Pole { p, .. } => Some(*p),
                _ => None,
            })
            .collect();
        let d = f.d();
        let e_center = if d >= 1 {
            -f.e.coeffs()[d - 1] / (f.e.leading() * d as f64)
        } else {
            Complex64::new(0.0, 0.0)
        };
        let reach = poles.iter().map(|p| p.norm()).fold(f.z0.norm(), f64::max);
        Ok(Geometry {
            dp: f.p.derivative(),
            de: f.e.derivative(),
            dde: f.e.derivative().derivative(),
            escape_radius: 1e5 * (1.0 + reach),
            f,
            verts,
            data,
            scale,
            opts,
            poles,
            e_center,
        })
    }

    pub fn omega(&self, z: Complex64) -> Complex64 {
        self.f.omega(z)
    }

    /// Rounding error of `ω(z)` from evaluating `P` with cancellation.
    fn omega_noise(&self, z: Complex64) -> f64 {
        let r = z.norm();
        let size: f64 = self.f.p.coeffs().iter().rev().fold(0.0, |acc, c| acc * r + c.norm());
        64.0 * f64::EPSILON * size * (-self.f.e.eval(z)).exp().norm()
    }

    fn seg(&self, a: Complex64, b: Complex64) -> Result<Complex64> {
        Ok(integrate_entire(&|z| self.f.omega(z), &[a, b], self.opts.rel_tol)?.value)
    }

    /// Distance from `t_v` to the nearest different value.
    pub fn gap(&self, v: usize) -> f64 {
        let tv = self.verts[v].t();
        self.verts
            .iter()
            .map(|w| (w.t() - tv).norm())
            .filter(|&d| d > 1e-9 * self.scale)
            .fold(self.scale, f64::min)
    }

    /// Pole-germ radius in t.
    pub fn rho_pole(&self, v: usize) -> f64 {
        let VertexData::Pole { p, mu, c } = self.data[v] else { return 0.0 };
        let others = self.poles.iter().filter(|&&q| q != p).map(|q| (q - p).norm()).fold(1.0, f64::min);
        let ep = self.de.eval(p).norm();
        let rz = 1e-3 * others.min(1.0 / (1.0 + ep));
        let gap = self.gap(v);
        (c.norm() * rz.powi(mu as i32 + 1)).max(1e-11 * gap).min(1e-3 * gap)
    }

    pub fn rho_start(&self, v: usize) -> f64 {
        match self.data[v] {
            VertexData::Pole { .. } => self.rho_pole(v),
            VertexData::Essential { .. } => 1e-3 * self.gap(v),
        }
    }

    pub fn rho_end(&self, v: usize) -> f64 {
        match self.data[v] {
            VertexData::Pole { .. } => self.rho_pole(v),
            VertexData::Essential { .. } => 1e-8 * self.gap(v),
        }
    }

    /// `Ψ(z) − p̃` by a local integral from the pole.
    fn pole_offset(&self, p: Complex64, z: Complex64) -> Result<Complex64> {
        self.seg(p, z)
    }

    fn pole_level_of(&self, v: usize, z: Complex64, u: Complex64) -> i64 {
        let VertexData::Pole { p, mu, c } = self.data[v] else { return 0 };
        let n = mu as i64 + 1;
        let w = z - p;
        let model = c * w.powu(mu + 1);
        let theta = c.arg() + n as f64 * arg0(w) + (u / model).arg();
        (theta / (2.0 * PI)).floor() as i64 % n
    }

    /// `argz_σ`: argument of `z − c_E` in `(θ_σ − π, θ_σ + π]`.
    fn argz(&self, tract: &Tract, z: Complex64) -> f64 {
        let theta = tract.center_direction;
        theta + wrap((z - self.e_center).arg() - theta)
    }

    /// `log(P/E')` continued along tract σ.
    fn log_w(&self, tract: &Tract, z: Complex64) -> Complex64 {
        let w = self.f.p.eval(z) / self.de.eval(z);
        let q = self.f.p.degree() as f64 - (self.f.d() as f64 - 1.0);
        let lead = self.f.p.leading() / (self.f.e.leading() * self.f.d() as f64);
        let zeta = z - self.e_center;
        let az = self.argz(tract, z);
        let model = lead * Complex64::from_polar(zeta.norm().powf(q), q * az);
        let argc = lead.arg() + q * az + (w / model).arg();
        Complex64::new(w.norm().ln(), argc)
    }

    /// `log(u / M)` with `M = −(P/E') e^{−E}`, principal imaginary part.
    fn log_u_over_m(&self, tract: &Tract, z: Complex64, u: Complex64) -> Complex64 {
        let lw = self.log_w(tract, z);
        let e = self.f.e.eval(z);
        let x = Complex64::new(u.norm().ln(), u.arg()) - lw - Complex64::new(0.0, PI) + e;
        Complex64::new(x.re, wrap(x.im))
    }

    fn ess_level_of(&self, tract: &Tract, z: Complex64, u: Complex64) -> i64 {
        let e = self.f.e.eval(z);
        let theta = PI + self.log_w(tract, z).im - e.im + self.log_u_over_m(tract, z, u).im;
        (theta / (2.0 * PI)).floor() as i64
    }

    fn nearest_tract(&self, z: Complex64) -> Option<usize> {
        let a = (z - self.e_center).arg();
        let mut best: Option<(f64, usize)> = None;
        for (i, dat) in self.data.iter().enumerate() {
            if let VertexData::Essential { tract } = dat {
                let dist = wrap(a - tract.center_direction).abs();
                if best.is_none_or(|b| dist < b.0) {
                    best = Some((dist, i));
                }
            }
        }
        best.map(|b| b.1)
    }

    /// Point on germ `level` of vertex `v` with `t = t_v + ρ e^{i(dir + 2π level)}`.
    pub fn germ(&self, v: usize, level: i64, dir: f64, rho: f64) -> Result<Point> {
        let tv = self.verts[v].t();
        match self.data[v] {
            VertexData::Pole { p, mu, c } => {
                let n = mu as i64 + 1;
                let target = Complex64::from_polar(rho, dir);
                let rz = (rho / c.norm()).powf(1.0 / n as f64);
                let mut found = None;
                for k in 0..n {
                    let ang = (dir - c.arg() + 2.0 * PI * k as f64) / n as f64;
                    let mut z = p + Complex64::from_polar(rz, ang);
                    for _ in 0..8 {
                        let u = self.pole_offset(p, z)?;
                        let step = (u - target) / self.omega(z);
                        z -= step;
                        if step.norm() < 1e-14 * rz {
                            break;
                        }
                    }
                    let u = self.pole_offset(p, z)?;
                    if (u - target).norm() > 1e-6 * rho {
                        return Err(ErdError::NonConvergence(format!("pole germ at {p} did not settle")));
                    }
                    if self.pole_level_of(v, z, u) == level.rem_euclid(n) {
                        found = Some(Point { z, t: tv + u });
                    }
                }
                found.ok_or_else(|| ErdError::AmbiguousGeometry(format!("no germ at level {level} of pole {p}")))
            }
            VertexData::Essential { tract } => {
                let mut r = rho;
                let mut last = None;
                for _ in 0..3 {
                    match self.essential_germ(&tract, tv, level, dir, r) {
                        Ok(pt) => return Ok(pt),
                        Err(e) => last = Some(e),
                    }
                    r *= 1e-3;
                }
                Err(last.unwrap())
            }
        }
    }

    /// Germ on a tract, seeded from the asymptotic model and refined with the tail integral.
    fn essential_germ(&self, tract: &Tract, tv: Complex64, level: i64, dir: f64, rho: f64) -> Result<Point> {
        let theta = dir + 2.0 * PI * level as f64;
        let target_t = Complex64::new(-rho.ln(), PI - theta);
        let d = self.f.d();
        let lead = self.f.e.leading();
        let r0 = (target_t / lead).norm().powf(1.0 / d as f64);
        let base = (target_t / lead).arg() / d as f64;
        let mut z = (0..d)
            .map(|k| base + 2.0 * PI * k as f64 / d as f64)
            .map(|a| self.e_center + Complex64::from_polar(r0, a))
            .min_by(|a, b| {
                let da = wrap(self.argz(tract, *a) - tract.center_direction).abs();
                let db = wrap(self.argz(tract, *b) - tract.center_direction).abs();
                da.partial_cmp(&db).unwrap()
            })
            .unwrap();
        let mut ok = false;
        for _ in 0..200 {
            let g = self.f.e.eval(z) - self.log_w(tract, z) - target_t;
            let pz = self.f.p.eval(z);
            let dez = self.de.eval(z);
            let dg = dez - (self.dp.eval(z) / pz - self.dde.eval(z) / dez);
            let mut step = g / dg;
            let cap = 0.3 * (1.0 + (z - self.e_center).norm());
            if step.norm() > cap {
                step *= cap / step.norm();
            }
            z -= step;
            if step.norm() < 1e-13 * (1.0 + z.norm()) {
                ok = true;
                break;
            }
        }
        if !ok || self.f.e.eval(z).re < 2.0 {
            return Err(ErdError::NonConvergence("essential germ seed".into()));
        }
        let target = Complex64::from_polar(rho, dir);
        let mut u = -self.tail(tract, z)?;
        for _ in 0..8 {
            let step = (u - target) / self.omega(z);
            z -= step;
            u = -self.tail(tract, z)?;
            if (u - target).norm() < 1e-9 * rho {
                break;
            }
        }
        if (u - target).norm() > 1e-6 * rho {
            return Err(ErdError::NonConvergence("essential germ refinement".into()));
        }
        let got = self.ess_level_of(tract, z, u);
        if got != level {
            return Err(ErdError::AmbiguousGeometry(format!("essential germ landed on level {got}, wanted {level}")));
        }
        Ok(Point { z, t: tv + u })
    }

    fn step_limit(&self, z: Complex64) -> f64 {
        let dpole = self.poles.iter().map(|p| (z - p).norm()).fold(f64::INFINITY, f64::min);
        let de = self.de.eval(z).norm();
        (0.1 * dpole).min(0.3 / de.max(1e-300)).min(0.2 * (1.0 + z.norm()))
    }

    /// Lifts the polyline `start.t → waypoints…`, tracking `Ψ` exactly by local quadrature.
    pub fn follow(&self, start: Point, waypoints: &[Complex64], path: &mut Vec<Complex64>) -> Result<Point> {
        let mut cur = start;
        let mut steps = 0usize;
        let eps = 1e-13 * self.scale.min(1e8 * self.gap_floor());
        let inv = |z: Complex64| 1.0 / self.omega(z);
        for &goal in waypoints {
            let mut shrink = 1.0;
            loop {
                let rem = goal - cur.t;
                let resolution = 16.0 * f64::EPSILON * (1.0 + cur.z.norm()) * self.omega(cur.z).norm();
                if rem.norm() <= eps.max(resolution) {
                    break;
                }
                steps += 1;
                if steps > self.opts.max_steps {
                    return Err(ErdError::Diverged(format!("step budget exhausted near z = {}", cur.z)));
                }
                let w = self.omega(cur.z);
                let hmax = shrink * self.step_limit(cur.z) * w.norm();
                if !(hmax > 1e-300) || !hmax.is_finite() {
                    return Err(ErdError::Diverged(format!("step size underflow near z = {}", cur.z)));
                }
                let h = if rem.norm() <= hmax { rem } else { rem * (hmax / rem.norm()) };
                let k1 = inv(cur.z);
                let k2 = inv(cur.z + h * k1 * 0.5);
                let k3 = inv(cur.z + h * k2 * 0.5);
                let k4 = inv(cur.z + h * k3);
                let zp = cur.z + h * (k1 + k2 * 2.0 + k3 * 2.0 + k4) / 6.0;
                let want = cur.t + h;
                let (d1, _, _) = gk15(&|z| self.omega(z), cur.z, zp);
                let zn = zp + (want - (cur.t + d1)) / self.omega(zp);
                let (d2, err, abs) = gk15(&|z| self.omega(z), cur.z, zn);
                let miss = (want - (cur.t + d2)).norm();
                let noise = self.omega_noise(cur.z) * (zn - cur.z).norm();
                if !zn.is_finite() || miss > 0.05 * h.norm() || err > 1e-12 * abs.max(h.norm()) + noise {
                    shrink *= 0.5;
                    if shrink < 1e-8 {
                        return Err(ErdError::Diverged(format!("step rejected repeatedly near z = {}", cur.z)));
                    }
                    continue;
                }
                shrink = (shrink * 2.0).min(1.0);
                cur = Point { z: zn, t: cur.t + d2 };
                path.push(zn);
                if zn.norm() > self.escape_radius {
                    return Err(ErdError::Diverged(format!("lift left every bounded region near z = {zn}")));
                }
            }
        }
        Ok(cur)
    }

    /// Which germ, if any, the point `pt` occupies at vertex `v`; `expected` is `t − t_v`.
    pub fn classify(&self, v: usize, pt: Point) -> Result<Option<i64>> {
        let expected = pt.t - self.verts[v].t();
        match self.data[v] {
            VertexData::Pole { p, mu, c } => {
                let r_end = (expected.norm() / c.norm()).powf(1.0 / (mu as f64 + 1.0));
                if (pt.z - p).norm() > 3.0 * r_end {
                    return Ok(None);
                }
                let u = self.pole_offset(p, pt.z)?;
                let model = c * (pt.z - p).powu(mu + 1);
                if (u / model - 1.0).norm() > 0.2 {
                    return Ok(None);
                }
                Ok(Some(self.pole_level_of(v, pt.z, u)))
            }
            VertexData::Essential { tract } => {
                if self.nearest_tract(pt.z).map(|i| self.data_tract(i)) != Some(tract.index) {
                    return Ok(None);
                }
                if self.f.e.eval(pt.z).re < 2.0 {
                    return Ok(None);
                }
                let quick = self.log_u_over_m(&tract, pt.z, expected);
                if quick.norm() > 0.5 {
                    return Ok(None);
                }
                let u = -self.tail(&tract, pt.z)?;
                if (u - expected).norm() > 0.1 * expected.norm() || self.log_u_over_m(&tract, pt.z, u).norm() > 0.2 {
                    return Ok(None);
                }
                Ok(Some(self.ess_level_of(&tract, pt.z, u)))
            }
        }
    }

    fn gap_floor(&self) -> f64 {
        (0..self.verts.len()).map(|v| self.gap(v)).fold(self.scale, f64::min)
    }

    fn tail(&self, tract: &Tract, z: Complex64) -> Result<Complex64> {
        tail_integral(&self.f, z, tract.center_direction, self.opts.rel_tol, 1e-14 * self.scale)
    }

    fn data_tract(&self, i: usize) -> usize {
        match self.data[i] {
            VertexData::Essential { tract } => tract.index,
            VertexData::Pole { .. } => 0,
        }
    }

    /// Growth sector containing `z`, numbered from the positive real axis.
    pub fn growth_sector(&self, z: Complex64) -> usize {
        let d = self.f.d().max(1);
        let phi = self.f.e.leading().arg();
        let a = arg0(z - self.e_center);
        (((a + phi / d as f64 + PI / (2.0 * d as f64)).rem_euclid(2.0 * PI)) / (PI / d as f64)).floor() as usize / 2
    }
}

/// Lifts the straight segment from germ `local_branch` of `from` toward `target_t`.
///
/// When `target_t` is a branch value the lift stops just short of it and the endpoint is
/// matched against the germs there.
pub fn lift_segment(
    f: &FieldSpec,
    from: &BranchPoint,
    local_branch: i64,
    target_t: Complex64,
    opts: &LiftOptions,
) -> Result<LiftOutcome> {
    let verts = branch_points(f, opts.rel_tol)?;
    let scale_guess = verts.iter().map(|v| (v.t() - from.t()).norm()).fold(0.0, f64::max).max(1e-300);
    let v = verts
        .iter()
        .position(|b| b.is_pole() == from.is_pole() && (b.t() - from.t()).norm() <= 1e-8 * scale_guess.max(1.0) && same_site(b, from))
        .ok_or_else(|| ErdError::InvalidInput("`from` is not a branch point of this field".into()))?;
    if (target_t - verts[v].t()).norm() == 0.0 {
        return Err(ErdError::InvalidInput("target equals the starting value".into()));
    }
    let geo = Geometry::new(f.clone(), verts, *opts)?;
    let dir_vec = target_t - geo.verts[v].t();
    let dir = dir_vec.arg();
    let start = geo.germ(v, local_branch, dir, geo.rho_start(v))?;
    let hits: Vec<usize> =
        (0..geo.verts.len()).filter(|&w| w != v && (geo.verts[w].t() - target_t).norm() <= 1e-9 * geo.scale).collect();
    let delta = hits.iter().map(|&w| geo.rho_end(w)).fold(f64::INFINITY, f64::min);
    let end_t = if hits.is_empty() { target_t } else { target_t - dir_vec / dir_vec.norm() * delta };
    let mut path = vec![start.z];
    let end = match geo.follow(start, &[end_t], &mut path) {
        Ok(p) => p,
        Err(ErdError::Diverged(_)) => {
            let last = *path.last().unwrap();
            let terminal = if last.norm() > geo.escape_radius {
                Terminal::EscapedToInfinity(geo.growth_sector(last))
            } else {
                Terminal::Diverged
            };
            return Ok(LiftOutcome { terminal, path_z: path, turns: 0 });
        }
        Err(e) => return Err(e),
    };
    for &w in &hits {
        if let Some(level) = geo.classify(w, end)? {
            return Ok(LiftOutcome { terminal: Terminal::Reached(geo.verts[w]), path_z: path, turns: level });
        }
    }
    Ok(LiftOutcome { terminal: Terminal::Regular { z: end.z }, path_z: path, turns: 0 })
}

fn same_site(a: &BranchPoint, b: &BranchPoint) -> bool {
    match (a, b) {
        (BranchPoint::Pole { p: p1, .. }, BranchPoint::Pole { p: p2, .. }) => (p1 - p2).norm() <= 1e-6 * (1.0 + p1.norm()),
        (BranchPoint::Essential { tract: s1, .. }, BranchPoint::Essential { tract: s2, .. }) => s1 == s2,
        _ => false,
    }
}
