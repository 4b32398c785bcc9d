//! SVG phase portraits of `Re X` for `X = e^E / P ∂/∂z`.

use crate::config::PortraitSpec;
use erd_core::field::FieldSpec;
use erd_core::numerics::{poly_roots, ComplexPoly};
use erd_core::skeleton::StripDecomposition;
use erd_core::{Complex64, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use std::f64::consts::PI;
use svg::node::element::path::Data;
use svg::node::element::{Circle, Element, Group, Path, Rectangle, Text, Title};
use svg::{Document, Node};

const WIDTH: f64 = 800.0;
const INSET: f64 = 220.0;

#[derive(Debug, Clone, Copy, PartialEq)]
struct PoleSite {
    p: Complex64,
    mu: u32,
}

/// Geometry of the drawing window.
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    margin: f64,
}

impl Frame {
    fn new(w: [f64; 4]) -> Frame {
        let margin = 0.05 * (w[1] - w[0]).max(w[3] - w[2]);
        Frame { x0: w[0], x1: w[1], y0: w[2], y1: w[3], margin }
    }

    fn diag(&self) -> f64 {
        (self.x1 - self.x0).hypot(self.y1 - self.y0)
    }

    fn inside(&self, z: Complex64) -> bool {
        z.re >= self.x0 - self.margin && z.re <= self.x1 + self.margin && z.im >= self.y0 - self.margin && z.im <= self.y1 + self.margin
    }

    fn height_px(&self) -> f64 {
        WIDTH * (self.y1 - self.y0 + 2.0 * self.margin) / (self.x1 - self.x0 + 2.0 * self.margin)
    }

    fn px(&self, z: Complex64) -> (f64, f64) {
        let w = self.x1 - self.x0 + 2.0 * self.margin;
        let h = self.y1 - self.y0 + 2.0 * self.margin;
        let x = (z.re - self.x0 + self.margin) / w * WIDTH;
        let y = (self.y1 + self.margin - z.im) / h * self.height_px();
        ((x * 100.0).round() / 100.0 + 0.0, (y * 100.0).round() / 100.0 + 0.0)
    }

    /// Last point of the segment `a → b` that stays in the frame, for `a` inside.
    fn clip(&self, a: Complex64, b: Complex64) -> Complex64 {
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            if self.inside(a + (b - a) * mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        a + (b - a) * lo
    }
}

struct Flow<'a> {
    f: &'a FieldSpec,
    dp: ComplexPoly,
    de: ComplexPoly,
    poles: &'a [PoleSite],
}

impl Flow<'_> {
    /// Unit vector along `X(z)`, or `None` where `P` vanishes numerically.
    fn direction(&self, z: Complex64) -> Option<Complex64> {
        let p = self.f.p.eval(z);
        if p.norm() < 1e-12 * self.f.p.scale_norm() {
            return None;
        }
        let e = self.f.e.eval(z);
        Some(Complex64::from_polar(1.0, e.im - p.arg()))
    }

    /// Step length keeping the turning of the direction per step near 0.1 rad.
    fn step(&self, z: Complex64, h0: f64) -> f64 {
        let p = self.f.p.eval(z);
        let turn = self.de.eval(z).norm() + (self.dp.eval(z) / p).norm();
        h0.min(0.1 / turn.max(1e-300))
    }

    fn near_pole(&self, z: Complex64, r: f64) -> bool {
        self.poles.iter().any(|s| (z - s.p).norm() < r)
    }

    /// RK4 along `±X/|X|` until the trajectory leaves the frame, stalls or reaches its length.
    fn trace(&self, start: Complex64, sign: f64, frame: &Frame, max_len: f64) -> Vec<Complex64> {
        let h0 = 4e-3 * frame.diag();
        let stop = 1e-3 * frame.diag();
        let mut z = start;
        let mut out = vec![z];
        let mut len = 0.0;
        let mut steps = 0;
        while len < max_len && steps < 20_000 {
            steps += 1;
            let h = self.step(z, h0);
            if h < 1e-9 * frame.diag() {
                break;
            }
            let k = |w: Complex64| self.direction(w).map(|d| d * sign);
            let Some(k1) = k(z) else { break };
            let Some(k2) = k(z + k1 * (0.5 * h)) else { break };
            let Some(k3) = k(z + k2 * (0.5 * h)) else { break };
            let Some(k4) = k(z + k3 * h) else { break };
            let next = z + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            if !next.is_finite() {
                break;
            }
            if !frame.inside(next) {
                out.push(frame.clip(z, next));
                break;
            }
            len += (next - z).norm();
            z = next;
            out.push(z);
            if steps > 1 && self.near_pole(z, stop) {
                break;
            }
        }
        out
    }

    /// Forward and backward trajectory through `seed`, as one polyline.
    fn through(&self, seed: Complex64, frame: &Frame, max_len: f64) -> Vec<Complex64> {
        let mut back = self.trace(seed, -1.0, frame, 0.5 * max_len);
        back.reverse();
        back.pop();
        back.extend(self.trace(seed, 1.0, frame, 0.5 * max_len));
        back
    }
}

fn pole_sites(f: &FieldSpec) -> Result<Vec<PoleSite>> {
    if f.r() == 0 {
        return Ok(Vec::new());
    }
    Ok(poly_roots(&f.p, 1e-8)?.into_iter().map(|c| PoleSite { p: c.location, mu: c.multiplicity }).collect())
}

/// Directions `(angle, outgoing)` of the `2(μ+1)` separatrices at a pole.
fn separatrix_angles(f: &FieldSpec, site: PoleSite) -> Vec<(f64, bool)> {
    let shifted = f.p.taylor_shift(site.p);
    let lead = shifted.coeffs().get(site.mu as usize).copied().unwrap_or(Complex64::new(1.0, 0.0));
    let c = f.e.eval(site.p).exp() / lead;
    let n = site.mu as f64 + 1.0;
    (0..=site.mu)
        .flat_map(|k| {
            let base = 2.0 * PI * k as f64;
            [((c.arg() + base) / n, true), ((c.arg() + PI + base) / n, false)]
        })
        .collect()
}

fn polyline(frame: &Frame, pts: &[Complex64]) -> Data {
    let mut d = Data::new();
    for (i, &z) in pts.iter().enumerate() {
        let p = frame.px(z);
        d = if i == 0 { d.move_to(p) } else { d.line_to(p) };
    }
    d
}

/// Counts of what a portrait contains, also written into its `<metadata>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PortraitStats {
    pub trajectories: usize,
    pub separatrices: usize,
    pub poles: usize,
    pub shaded_strips: usize,
}

pub struct Portrait {
    pub svg: String,
    pub stats: PortraitStats,
}

/// Renders trajectories of `Re X`, pole separatrices and, if given, a strip inset.
pub fn render_portrait(f: &FieldSpec, spec: &PortraitSpec, seed: u64, strips: Option<&StripDecomposition>) -> Result<Portrait> {
    spec.check()?;
    let frame = Frame::new(spec.window);
    let sites = pole_sites(f)?;
    let flow = Flow { f, dp: f.p.derivative(), de: f.e.derivative(), poles: &sites };
    let max_len = spec.max_length * frame.diag();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.density;
    let (cw, ch) = ((frame.x1 - frame.x0) / n as f64, (frame.y1 - frame.y0) / n as f64);
    let mut seeds = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let jitter = Complex64::new(rng.gen_range(-0.3..0.3) * cw, rng.gen_range(-0.3..0.3) * ch);
            let z = Complex64::new(frame.x0 + (i as f64 + 0.5) * cw, frame.y0 + (j as f64 + 0.5) * ch) + jitter;
            if !flow.near_pole(z, 1e-6 * frame.diag()) {
                seeds.push(z);
            }
        }
    }
    let trajectories: Vec<Vec<Complex64>> = seeds.par_iter().map(|&z| flow.through(z, &frame, max_len)).collect();

    let mut separatrix_seeds = Vec::new();
    if spec.separatrices {
        for (i, &s) in sites.iter().enumerate() {
            let others = sites.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, o)| (o.p - s.p).norm()).fold(f64::INFINITY, f64::min);
            let r = (2e-3 * frame.diag()).min(0.1 * others);
            for (angle, outgoing) in separatrix_angles(f, s) {
                separatrix_seeds.push((s.p, s.p + Complex64::from_polar(r, angle), outgoing));
            }
        }
    }
    let separatrices: Vec<Vec<Complex64>> = separatrix_seeds
        .par_iter()
        .map(|&(p, z, outgoing)| {
            let mut pts = vec![p];
            pts.extend(flow.trace(z, if outgoing { 1.0 } else { -1.0 }, &frame, max_len));
            pts
        })
        .collect();

    let shaded: Vec<f64> = if spec.shade_strips { strips.map(|s| s.finite_strips.clone()).unwrap_or_default() } else { Vec::new() };
    let stats = PortraitStats {
        trajectories: trajectories.len(),
        separatrices: separatrices.len(),
        poles: sites.len(),
        shaded_strips: shaded.len(),
    };

    let height = frame.height_px();
    let total_width = if shaded.is_empty() { WIDTH } else { WIDTH + INSET };
    let mut meta = Element::new("metadata");
    meta.append(svg::node::Text::new(
        json!({
            "format": "erd-portrait/1",
            "window": spec.window,
            "trajectories": stats.trajectories,
            "separatrix_count": stats.separatrices,
            "poles": stats.poles,
            "shaded_strips": stats.shaded_strips,
            "infinite_half_planes": strips.map(|s| s.infinite_half_planes),
        })
        .to_string(),
    ));
    let mut doc = Document::new()
        .set("version", "1.1")
        .set("width", total_width)
        .set("height", height)
        .set("viewBox", (0, 0, total_width, height))
        .add(meta)
        .add(Rectangle::new().set("x", 0).set("y", 0).set("width", WIDTH).set("height", height).set("fill", "white"));

    let (wx0, wy0) = frame.px(Complex64::new(frame.x0, frame.y1));
    let (wx1, wy1) = frame.px(Complex64::new(frame.x1, frame.y0));
    doc = doc.add(
        Rectangle::new()
            .set("x", wx0)
            .set("y", wy0)
            .set("width", wx1 - wx0)
            .set("height", wy1 - wy0)
            .set("fill", "none")
            .set("stroke", "#bbbbbb")
            .set("stroke-dasharray", "4 3"),
    );

    let mut g = Group::new().set("id", "trajectories").set("fill", "none").set("stroke", "#4a6fa5").set("stroke-width", 0.7);
    for pts in trajectories.iter().filter(|p| p.len() > 1) {
        g = g.add(Path::new().set("d", polyline(&frame, pts)));
    }
    doc = doc.add(g);

    let mut g = Group::new().set("id", "separatrices").set("fill", "none").set("stroke", "#c0392b").set("stroke-width", 1.4);
    for pts in separatrices.iter().filter(|p| p.len() > 1) {
        g = g.add(Path::new().set("class", "separatrix").set("d", polyline(&frame, pts)));
    }
    doc = doc.add(g);

    let mut g = Group::new().set("id", "poles");
    for s in &sites {
        let (x, y) = frame.px(s.p);
        g = g.add(
            Circle::new()
                .set("cx", x)
                .set("cy", y)
                .set("r", 3.0 + s.mu as f64)
                .set("fill", "black")
                .add(Title::new(format!("pole mu={} at {:.6}{:+.6}i", s.mu, s.p.re, s.p.im))),
        );
    }
    doc = doc.add(g);

    if !shaded.is_empty() {
        let mut g = Group::new().set("id", "strips").set("transform", format!("translate({WIDTH},0)"));
        g = g.add(Text::new("finite strips").set("x", 20).set("y", 24).set("font-size", 14).set("font-family", "sans-serif"));
        let band = ((height - 60.0) / shaded.len() as f64).min(40.0);
        let top = shaded.iter().cloned().fold(0.0, f64::max).max(1e-300);
        for (i, &h) in shaded.iter().enumerate() {
            let y = 40.0 + i as f64 * band;
            let thick = (band - 6.0) * (h / top).max(0.05);
            g = g.add(
                Rectangle::new()
                    .set("class", "strip")
                    .set("x", 20)
                    .set("y", y)
                    .set("width", 120)
                    .set("height", thick)
                    .set("fill", "#f5cba7")
                    .set("stroke", "#935116"),
            );
            g = g.add(Text::new(format!("{h:.6}")).set("x", 148).set("y", y + thick.max(10.0)).set("font-size", 11).set("font-family", "monospace"));
        }
        doc = doc.add(g);
    }

    Ok(Portrait { svg: doc.to_string(), stats })
}
