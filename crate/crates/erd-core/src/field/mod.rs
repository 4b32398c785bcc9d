//! Fields `X = e^E / P ∂/∂z`, their distinguished parameter `Ψ` and branch values.

mod extract;
mod lift;

pub use extract::{build_config_tree, diagonal_witnesses, BuildOptions, DiagonalWitness};
pub use lift::{lift_segment, LiftOptions, LiftOutcome, Terminal};

use crate::error::{ErdError, Result};
use crate::numerics::{integrate_entire, poly_roots, ComplexPoly};
use crate::tree::BranchPoint;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Integrand values with `Re E` below this overflow `e^{−E}`.
const OVERFLOW_RE_E: f64 = -700.0;
const MAX_TAIL_DOUBLINGS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: ComplexPoly,
    pub e: ComplexPoly,
    pub z0: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tract {
    pub index: usize,
    /// In `[0, 2π)`.
    pub center_direction: f64,
    pub half_width: f64,
}

impl FieldSpec {
    pub fn new(p: ComplexPoly, e: ComplexPoly, z0: Complex64) -> Result<Self> {
        if p.is_zero() {
            return Err(ErdError::InvalidInput("P is identically zero, so X is undefined".into()));
        }
        if p.coeffs().iter().chain(e.coeffs()).any(|c| !c.is_finite()) || !z0.is_finite() {
            return Err(ErdError::InvalidInput("coefficients and base point must be finite".into()));
        }
        let f = FieldSpec { p, e, z0 };
        if f.r() + f.d() as u32 == 0 {
            return Err(ErdError::InvalidInput("need deg P + deg E ≥ 1".into()));
        }
        Ok(f)
    }

    pub fn r(&self) -> u32 {
        self.p.degree() as u32
    }

    pub fn d(&self) -> usize {
        if self.e.is_zero() {
            0
        } else {
            self.e.degree()
        }
    }

    /// `ω = P e^{−E}`.
    pub fn omega(&self, z: Complex64) -> Complex64 {
        self.p.eval(z) * (-self.e.eval(z)).exp()
    }

    /// `X(z) = e^{E}/P`.
    pub fn x(&self, z: Complex64) -> Complex64 {
        self.e.eval(z).exp() / self.p.eval(z)
    }

    /// Same field with `Ψ` multiplied by `s`.
    pub fn scaled(&self, s: Complex64) -> FieldSpec {
        FieldSpec { p: self.p.scale(s), e: self.e.clone(), z0: self.z0 }
    }

    /// Pullback under `z ↦ a z + b`; `Ψ` values are unchanged.
    pub fn pullback_affine(&self, a: Complex64, b: Complex64) -> Result<FieldSpec> {
        if a.norm() == 0.0 {
            return Err(ErdError::InvalidInput("affine map must be invertible".into()));
        }
        FieldSpec::new(self.p.compose_affine(a, b).scale(a), self.e.compose_affine(a, b), (self.z0 - b) / a)
    }
}

fn guarded(f: &FieldSpec, z: Complex64) -> Complex64 {
    let e = f.e.eval(z);
    if e.re < OVERFLOW_RE_E {
        return Complex64::new(f64::INFINITY, f64::INFINITY);
    }
    f.p.eval(z) * (-e).exp()
}

/// `∫ ω` along a polyline.
pub fn integrate_path(f: &FieldSpec, path: &[Complex64], rel_tol: f64) -> Result<Complex64> {
    Ok(integrate_entire(&|z| guarded(f, z), path, rel_tol)?.value)
}

/// `Ψ(z) = ∫_{z0}^{z} ω` along the straight segment.
pub fn eval_psi(f: &FieldSpec, z: Complex64) -> Result<Complex64> {
    psi_with_tol(f, z, 1e-12)
}

pub fn psi_with_tol(f: &FieldSpec, z: Complex64, rel_tol: f64) -> Result<Complex64> {
    if z == f.z0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    integrate_path(f, &[f.z0, z], rel_tol)
}

/// One pole vertex per distinct root of P.
pub fn critical_values(f: &FieldSpec) -> Result<Vec<BranchPoint>> {
    if f.r() == 0 {
        return Ok(Vec::new());
    }
    let mut roots = poly_roots(&f.p, 1e-8)?;
    roots.sort_by(|a, b| (a.location.re, a.location.im).partial_cmp(&(b.location.re, b.location.im)).unwrap());
    roots
        .into_iter()
        .map(|rc| {
            Ok(BranchPoint::Pole { p: rc.location, p_tilde: eval_psi(f, rc.location)?, mu: rc.multiplicity })
        })
        .collect()
}

/// Decay tracts of `e^{−E}`, indexed 1..d by center angle in `[0, 2π)`.
pub fn tract_directions(f: &FieldSpec) -> Vec<Tract> {
    let d = f.d();
    if d == 0 {
        return Vec::new();
    }
    let phi = f.e.leading().arg();
    let mut centers: Vec<f64> = (0..d).map(|s| (2.0 * PI * s as f64 - phi) / d as f64).map(norm_angle).collect();
    centers.sort_by(|a, b| a.partial_cmp(b).unwrap());
    centers
        .into_iter()
        .enumerate()
        .map(|(i, c)| Tract { index: i + 1, center_direction: c, half_width: PI / (2.0 * d as f64) })
        .collect()
}

fn norm_angle(a: f64) -> f64 {
    let x = a.rem_euclid(2.0 * PI);
    if x >= 2.0 * PI - 1e-15 {
        0.0
    } else {
        x
    }
}

/// `∫_{z}^{∞} ω` along the ray `z + s e^{iθ}`, by doubling segments until the tail bound is small.
pub(crate) fn tail_integral(f: &FieldSpec, z: Complex64, theta: f64, rel_tol: f64, abs_tol: f64) -> Result<Complex64> {
    let dir = Complex64::from_polar(1.0, theta);
    let de = f.e.derivative();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut s0 = 0.0;
    let mut h = 0.25 * (1.0 + z.norm()).min(4.0);
    for _ in 0..MAX_TAIL_DOUBLINGS {
        let s1 = s0 + h;
        let a = z + dir * s0;
        let b = z + dir * s1;
        let seg = match integrate_entire(&|z| guarded(f, z), &[a, b], rel_tol * 1e-2) {
            Ok(q) => q.value,
            Err(ErdError::ToleranceNotMet { value, error_estimate })
                if value.is_finite() && error_estimate <= (1e-2 * rel_tol * (sum + value).norm()).max(abs_tol) =>
            {
                value
            }
            Err(e) => return Err(e),
        };
        sum += seg;
        let e_end = f.e.eval(b);
        let slope = (de.eval(b) * dir).re;
        if slope > 0.0 {
            let bound = f.p.eval(b).norm().max(f.p.scale_norm() * 1e-300) * (-e_end.re).exp() / slope;
            let p_growth = (f.p.degree() as f64) / (1.0 + b.norm());
            if bound * 4.0 < (rel_tol * sum.norm()).max(abs_tol).max(1e-300) && slope > 2.0 * p_growth && e_end.re > 5.0 {
                return Ok(sum);
            }
            if e_end.re > 740.0 {
                return Ok(sum);
            }
        }
        s0 = s1;
        h *= 2.0;
    }
    Err(ErdError::ToleranceNotMet { value: sum, error_estimate: f64::INFINITY })
}

/// One essential vertex per tract, `a_σ = lim Ψ` along the ray from `z0` in the tract direction.
pub fn asymptotic_values(f: &FieldSpec, rel_tol: f64) -> Result<Vec<BranchPoint>> {
    if !(rel_tol > 0.0) {
        return Err(ErdError::InvalidInput("rel_tol must be positive".into()));
    }
    tract_directions(f)
        .into_iter()
        .map(|tr| {
            let a = tail_integral(f, f.z0, tr.center_direction, rel_tol, 0.0)?;
            Ok(BranchPoint::Essential { tract: tr.index, a })
        })
        .collect()
}

/// Critical values followed by asymptotic values.
pub fn branch_points(f: &FieldSpec, rel_tol: f64) -> Result<Vec<BranchPoint>> {
    let mut v = asymptotic_values(f, rel_tol)?;
    v.extend(critical_values(f)?);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn field(p: &[f64], e: &[f64]) -> FieldSpec {
        FieldSpec::new(ComplexPoly::from_real(p), ComplexPoly::from_real(e), c(0.0, 0.0)).unwrap()
    }

    #[test]
    fn psi_closed_forms() {
        let f = field(&[1.0], &[0.0, 1.0]);
        assert!((eval_psi(&f, c(0.0, PI)).unwrap() - c(2.0, 0.0)).norm() < 1e-12);
        assert_eq!(eval_psi(&f, f.z0).unwrap(), c(0.0, 0.0));
        let g = field(&[0.0, 0.0, -3.0], &[0.0, 0.0, 0.0, 1.0]);
        assert!((eval_psi(&g, c(1.0, 0.0)).unwrap() - c((-1f64).exp() - 1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn rejects_bad_fields() {
        let zero = ComplexPoly::from_real(&[0.0]);
        assert!(FieldSpec::new(zero, ComplexPoly::from_real(&[0.0, 1.0]), c(0.0, 0.0)).is_err());
        assert!(FieldSpec::new(ComplexPoly::from_real(&[1.0]), ComplexPoly::from_real(&[2.0]), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn three_simple_poles() {
        let f = field(&[-1.0, 0.0, 0.0, 3.0], &[0.0, 0.0, 0.0, 1.0]);
        let cv = critical_values(&f).unwrap();
        assert_eq!(cv.len(), 3);
        let pt1 = -(3.0 * std::f64::consts::E).powf(-1.0 / 3.0);
        let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        for target in [c(pt1, 0.0), w * pt1, w.conj() * pt1] {
            assert!(cv.iter().any(|b| (b.t() - target).norm() < 1e-8), "{target}");
        }
        for a in asymptotic_values(&f, 1e-10).unwrap() {
            assert!(a.t().norm() < 1e-8);
        }
    }

    #[test]
    fn double_pole_and_three_tracts() {
        let f = field(&[0.0, 0.0, -3.0], &[0.0, 0.0, 0.0, 1.0]);
        let cv = critical_values(&f).unwrap();
        assert_eq!(cv.len(), 1);
        assert_eq!(cv[0].mu(), Some(2));
        assert!(cv[0].t().norm() < 1e-12);
        let av = asymptotic_values(&f, 1e-10).unwrap();
        assert_eq!(av.len(), 3);
        for a in av {
            assert!((a.t() - c(-1.0, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn tract_centers() {
        let t = tract_directions(&field(&[1.0], &[0.0, 0.0, 0.0, 1.0]));
        let got: Vec<f64> = t.iter().map(|x| x.center_direction).collect();
        for (g, w) in got.iter().zip([0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0]) {
            assert!((g - w).abs() < 1e-12);
        }
        let t = tract_directions(&field(&[1.0], &[0.0, 0.0, -1.0]));
        assert!((t[0].center_direction - PI / 2.0).abs() < 1e-12);
        assert!((t[1].center_direction - 1.5 * PI).abs() < 1e-12);
        assert_eq!(tract_directions(&field(&[1.0], &[0.0, 1.0]))[0].center_direction, 0.0);
    }

    #[test]
    fn exponential_asymptotic_value() {
        let lambda = c(0.5, 2.0);
        let z0 = c(0.3, -0.7);
        let f = FieldSpec::new(ComplexPoly::constant(lambda), ComplexPoly::from_real(&[0.0, 1.0]), z0).unwrap();
        let a = asymptotic_values(&f, 1e-12).unwrap();
        assert!((a[0].t() - lambda * (-z0).exp()).norm() < 1e-10);
    }

    #[test]
    fn pullback_keeps_values() {
        let f = field(&[-1.0, 0.0, 0.0, 3.0], &[0.0, 0.0, 0.0, 1.0]);
        let g = f.pullback_affine(c(0.0, 2.0), c(0.5, 0.0)).unwrap();
        let zf = c(0.4, 0.3);
        let zg = (zf - c(0.5, 0.0)) / c(0.0, 2.0);
        assert!((eval_psi(&f, zf).unwrap() - eval_psi(&g, zg).unwrap()).norm() < 1e-10);
    }
}
