use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Dense complex polynomial, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoly {
    coeffs: Vec<Complex64>,
}

impl ComplexPoly {
    /// Builds a polynomial, trimming exact trailing zeros. An empty list is the zero polynomial.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == Complex64::new(0.0, 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        ComplexPoly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c z^n`.
    pub fn monomial(c: Complex64, n: usize) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); n + 1];
        v[n] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        poly_eval(self, z)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::constant(Complex64::new(0.0, 0.0));
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    /// Primitive vanishing at 0.
    pub fn antiderivative(&self) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0)];
        c.extend(self.coeffs.iter().enumerate().map(|(k, a)| a / (k as f64 + 1.0)));
        Self::new(c)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Product of `(z - root)` factors times `lead`.
    pub fn from_roots(lead: Complex64, roots: &[Complex64]) -> Self {
        let mut p = Self::constant(lead);
        for &r in roots {
            p = p.mul(&Self::new(vec![-r, Complex64::new(1.0, 0.0)]));
        }
        p
    }

    /// Coefficients of `p(w + c)` in powers of `w`.
    pub fn taylor_shift(&self, c: Complex64) -> Self {
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let t = a[j + 1] * c;
                a[j] += t;
            }
        }
        Self::new(a)
    }

    /// `p(a z + b)`.
    pub fn compose_affine(&self, a: Complex64, b: Complex64) -> Self {
        let shifted = self.taylor_shift(b);
        let mut pow = Complex64::new(1.0, 0.0);
        let mut out = Vec::with_capacity(shifted.coeffs.len());
        for c in shifted.coeffs.iter() {
            out.push(c * pow);
            pow *= a;
        }
        Self::new(out)
    }

    /// Largest coefficient modulus.
    pub fn scale_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Quotient and remainder of Euclidean division.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dn = d.degree();
        let lead = d.leading();
        let mut r = self.coeffs.clone();
        if self.degree() < dn {
            return (Self::constant(Complex64::new(0.0, 0.0)), self.clone());
        }
        let mut q = vec![Complex64::new(0.0, 0.0); self.degree() - dn + 1];
        for k in (0..q.len()).rev() {
            let c = r[k + dn] / lead;
            q[k] = c;
            for j in 0..=dn {
                r[k + j] -= c * d.coeffs[j];
            }
        }
        r.truncate(dn.max(1));
        (Self::new(q), Self::new(r))
    }
}

/// Horner evaluation.
pub fn poly_eval(p: &ComplexPoly, z: Complex64) -> Complex64 {
    p.coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn horner_examples() {
        assert_eq!(poly_eval(&ComplexPoly::from_real(&[0.0]), c(5.0, 0.0)), c(0.0, 0.0));
        assert_eq!(
            poly_eval(&ComplexPoly::from_real(&[-1.0, 0.0, 0.0, 1.0]), c(1.0, 0.0)),
            c(0.0, 0.0)
        );
        assert_eq!(poly_eval(&ComplexPoly::from_real(&[1.0, 2.0]), c(0.0, 1.0)), c(1.0, 2.0));
    }

    #[test]
    fn trailing_zeros_trimmed() {
        let p = ComplexPoly::from_real(&[1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), 1);
        assert!(ComplexPoly::new(vec![]).is_zero());
    }

    #[test]
    fn affine_composition_matches_pointwise() {
        let p = ComplexPoly::new(vec![c(1.0, 2.0), c(-0.5, 0.3), c(0.0, 1.0), c(2.0, 0.0)]);
        let a = c(0.7, -1.1);
        let b = c(-0.2, 0.4);
        let q = p.compose_affine(a, b);
        for z in [c(0.3, 0.1), c(-2.0, 1.0), c(1.5, -0.7)] {
            assert!((q.eval(z) - p.eval(a * z + b)).norm() < 1e-12);
        }
    }

    #[test]
    fn division_reconstructs() {
        let p = ComplexPoly::new(vec![c(1.0, 0.0), c(0.0, 2.0), c(3.0, 0.0), c(1.0, 1.0)]);
        let d = ComplexPoly::new(vec![c(-1.0, 0.5), c(1.0, 0.0)]);
        let (q, r) = p.div_rem(&d);
        let back = q.mul(&d);
        for z in [c(0.3, 0.1), c(-2.0, 1.0)] {
            assert!((back.eval(z) + r.eval(z) - p.eval(z)).norm() < 1e-12);
        }
    }
}
