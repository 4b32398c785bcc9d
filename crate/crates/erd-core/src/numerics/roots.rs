use super::poly::ComplexPoly;
use crate::error::{ErdError, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootCluster {
    pub location: Complex64,
    pub multiplicity: u32,
}

const MAX_ABERTH_ITER: usize = 2000;

/// Roots with multiplicities.
///
/// The square-free part `p / gcd(p, p')` is solved by Aberth iteration; each
/// multiplicity is the winding number of `p` on a small circle around the root.
/// Falls back to clustering raw Aberth roots of `p` if the gcd route is inconsistent.
pub fn poly_roots(p: &ComplexPoly, cluster_tol: f64) -> Result<Vec<RootCluster>> {
    if p.degree() == 0 {
        return Err(ErdError::InvalidInput("poly_roots needs degree >= 1".into()));
    }
    if !(cluster_tol > 0.0) {
        return Err(ErdError::InvalidInput("cluster_tol must be positive".into()));
    }
    let monic = p.scale(Complex64::new(1.0, 0.0) / p.leading());
    let g = approx_gcd(&monic, &monic.derivative(), cluster_tol);
    let (q, _) = monic.div_rem(&g);
    let q = q.scale(Complex64::new(1.0, 0.0) / q.leading());
    if let Ok(simple) = aberth(&q) {
        let simple: Vec<Complex64> = simple.into_iter().map(|z| newton_polish(&q, z)).collect();
        if let Some(clusters) = winding_multiplicities(&monic, &simple) {
            return Ok(merge_close(clusters, cluster_tol));
        }
    }
    let raw = aberth(&monic)?;
    Ok(cluster_raw(&monic, raw, cluster_tol))
}

fn approx_gcd(a: &ComplexPoly, b: &ComplexPoly, tol: f64) -> ComplexPoly {
    let mut a = a.clone();
    let mut b = b.clone();
    let norm = a.scale_norm().max(b.scale_norm());
    loop {
        if b.degree() == 0 {
            if b.leading().norm() <= tol * norm {
                return a;
            }
            return ComplexPoly::constant(Complex64::new(1.0, 0.0));
        }
        let (_, r) = a.div_rem(&b);
        let rn = r.scale_norm();
        if rn <= tol * norm.max(b.scale_norm()) {
            return b.scale(Complex64::new(1.0, 0.0) / b.leading());
        }
        let mut coeffs = r.coeffs().to_vec();
        while coeffs.len() > 1 && coeffs.last().unwrap().norm() <= tol * rn {
            coeffs.pop();
        }
        a = b;
        b = ComplexPoly::new(coeffs);
    }
}

fn cauchy_radius(p: &ComplexPoly) -> f64 {
    let n = p.degree();
    let lead = p.leading().norm();
    let mut r: f64 = 0.0;
    for (k, c) in p.coeffs().iter().enumerate().take(n) {
        let v = (c.norm() / lead).powf(1.0 / (n - k) as f64);
        r = r.max(v);
    }
    (2.0 * r).max(1e-3)
}

fn aberth(p: &ComplexPoly) -> Result<Vec<Complex64>> {
    let n = p.degree();
    if n == 0 {
        return Ok(vec![]);
    }
    if n == 1 {
        return Ok(vec![-p.coeffs()[0] / p.coeffs()[1]]);
    }
    let dp = p.derivative();
    let r0 = cauchy_radius(p) * 0.5;
    let centre = -p.coeffs()[n - 1] / (p.leading() * n as f64);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| centre + Complex64::from_polar(r0, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..MAX_ABERTH_ITER {
        let mut max_step: f64 = 0.0;
        for k in 0..n {
            let pv = p.eval(z[k]);
            if pv == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = pv / dp.eval(z[k]);
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    s += Complex64::new(1.0, 0.0) / (z[k] - z[j]);
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if max_step < 1e-15 {
            return Ok(z);
        }
    }
    // accept if residuals are already tiny
    let scale = p.scale_norm();
    if z.iter().all(|&x| p.eval(x).norm() <= 1e-10 * scale * x.norm().max(1.0).powi(n as i32)) {
        return Ok(z);
    }
    Err(ErdError::NonConvergence(format!(
        "Aberth iteration exceeded {MAX_ABERTH_ITER} sweeps"
    )))
}

fn newton_polish(p: &ComplexPoly, mut z: Complex64) -> Complex64 {
    let dp = p.derivative();
    for _ in 0..5 {
        let d = dp.eval(z);
        if d.norm() == 0.0 {
            break;
        }
        let step = p.eval(z) / d;
        if !step.is_finite() || step.norm() < 1e-17 * (1.0 + z.norm()) {
            break;
        }
        z -= step;
    }
    z
}

fn winding_multiplicities(p: &ComplexPoly, roots: &[Complex64]) -> Option<Vec<RootCluster>> {
    let dp = p.derivative();
    let mut out = Vec::with_capacity(roots.len());
    let mut total = 0u32;
    for (i, &r) in roots.iter().enumerate() {
        let sep = roots
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, &s)| (s - r).norm())
            .fold(f64::INFINITY, f64::min);
        let rad = if sep.is_finite() { 0.3 * sep } else { 0.5 * (1.0 + r.norm()) };
        let m = 64;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..m {
            let w = Complex64::from_polar(rad, 2.0 * PI * k as f64 / m as f64);
            let z = r + w;
            acc += dp.eval(z) / p.eval(z) * w;
        }
        let wind = acc.re / m as f64;
        let mult = wind.round();
        if mult < 1.0 || (wind - mult).abs() > 0.1 {
            return None;
        }
        total += mult as u32;
        out.push(RootCluster { location: r, multiplicity: mult as u32 });
    }
    if total as usize == p.degree() {
        Some(out)
    } else {
        None
    }
}

fn merge_close(mut clusters: Vec<RootCluster>, tol: f64) -> Vec<RootCluster> {
    let mut merged: Vec<RootCluster> = Vec::new();
    clusters.sort_by(|a, b| {
        (a.location.re, a.location.im)
            .partial_cmp(&(b.location.re, b.location.im))
            .unwrap()
    });
    for c in clusters {
        if let Some(m) = merged
            .iter_mut()
            .find(|m| (m.location - c.location).norm() <= tol * (1.0 + m.location.norm()))
        {
            let w = m.multiplicity as f64;
            let v = c.multiplicity as f64;
            m.location = (m.location * w + c.location * v) / (w + v);
            m.multiplicity += c.multiplicity;
        } else {
            merged.push(c);
        }
    }
    merged
}

fn cluster_raw(p: &ComplexPoly, raw: Vec<Complex64>, tol: f64) -> Vec<RootCluster> {
    let n = p.degree() as f64;
    let radius = tol.max(f64::EPSILON.powf(1.0 / n) * 10.0);
    let clusters = raw
        .into_iter()
        .map(|z| RootCluster { location: z, multiplicity: 1 })
        .collect();
    merge_close(clusters, radius)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<RootCluster>) -> Vec<RootCluster> {
        v.sort_by(|a, b| a.location.arg().partial_cmp(&b.location.arg()).unwrap());
        v
    }

    #[test]
    fn cube_roots_of_one_third() {
        let p = ComplexPoly::from_real(&[-1.0, 0.0, 0.0, 3.0]);
        let roots = sorted(poly_roots(&p, 1e-8).unwrap());
        assert_eq!(roots.len(), 3);
        let p1 = 3f64.powf(-1.0 / 3.0);
        let expect = [
            Complex64::from_polar(p1, -2.0 * PI / 3.0),
            c(p1, 0.0),
            Complex64::from_polar(p1, 2.0 * PI / 3.0),
        ];
        for (r, e) in roots.iter().zip(expect.iter()) {
            assert_eq!(r.multiplicity, 1);
            assert!((r.location - e).norm() < 1e-12, "{:?} vs {:?}", r.location, e);
        }
    }

    #[test]
    fn double_root_at_zero() {
        let p = ComplexPoly::from_real(&[0.0, 0.0, 3.0]);
        let roots = poly_roots(&p, 1e-8).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].multiplicity, 2);
        assert!(roots[0].location.norm() < 1e-12);
    }

    #[test]
    fn constructed_factorisation() {
        // (z-1)^2 (z+1) = z^3 - z^2 - z + 1
        let p = ComplexPoly::from_real(&[1.0, -1.0, -1.0, 1.0]);
        let mut roots = poly_roots(&p, 1e-8).unwrap();
        roots.sort_by(|a, b| a.location.re.partial_cmp(&b.location.re).unwrap());
        assert_eq!(roots.len(), 2);
        assert!((roots[0].location - c(-1.0, 0.0)).norm() < 1e-10);
        assert_eq!(roots[0].multiplicity, 1);
        assert!((roots[1].location - c(1.0, 0.0)).norm() < 1e-10);
        assert_eq!(roots[1].multiplicity, 2);
    }

    #[test]
    fn triple_complex_root() {
        let r = c(0.3, -0.7);
        let p = ComplexPoly::from_roots(c(2.0, 1.0), &[r, r, r, c(-1.0, 0.2)]);
        let roots = poly_roots(&p, 1e-8).unwrap();
        let total: u32 = roots.iter().map(|x| x.multiplicity).sum();
        assert_eq!(total, 4);
        let triple = roots.iter().find(|x| x.multiplicity == 3).expect("triple root");
        assert!((triple.location - r).norm() < 1e-8);
    }
}
