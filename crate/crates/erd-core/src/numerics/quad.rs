use crate::error::{ErdError, Result};
use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 40;
const MAX_PANELS: usize = 4000;

/// One 7/15-point Gauss–Kronrod panel on the segment `[a, b]`.
/// Returns (kronrod value, |kronrod - gauss|, integral of |f| |dz|).
pub fn gk15(f: &dyn Fn(Complex64) -> Complex64, a: Complex64, b: Complex64) -> (Complex64, f64, f64) {
    let mid = (a + b) * 0.5;
    let half = (b - a) * 0.5;
    let fc = f(mid);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut abs = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(mid - dx);
        let f2 = f(mid + dx);
        k += (f1 + f2) * WGK[j];
        abs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            g += (f1 + f2) * WG[j / 2];
        }
    }
    let hn = half.norm();
    (k * half, ((k - g) * half).norm(), abs * hn)
}

struct Panel {
    a: Complex64,
    b: Complex64,
    value: Complex64,
    err: f64,
    abs: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.partial_cmp(&o.err).unwrap_or(Ordering::Equal)
    }
}

/// Adaptive integral of `f(ζ) dζ` along one straight segment.
fn integrate_segment(
    f: &dyn Fn(Complex64) -> Complex64,
    a: Complex64,
    b: Complex64,
    rel_tol: f64,
) -> (QuadratureResult, bool) {
    let (v, e, abs) = gk15(f, a, b);
    let mut evals = 15usize;
    let mut total = v;
    let mut total_err = e;
    let mut total_abs = abs;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value: v, err: e, abs, depth: 0 });
    let mut converged = false;
    loop {
        if !total.is_finite() {
            break;
        }
        let target = (rel_tol * total.norm()).max(1e-3 * rel_tol * total_abs).max(1e-300);
        if total_err <= target {
            converged = true;
            break;
        }
        if heap.len() >= MAX_PANELS {
            break;
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        if worst.depth >= MAX_DEPTH {
            heap.push(worst);
            break;
        }
        let m = (worst.a + worst.b) * 0.5;
        let (v1, e1, a1) = gk15(f, worst.a, m);
        let (v2, e2, a2) = gk15(f, m, worst.b);
        evals += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        total_abs += a1 + a2 - worst.abs;
        heap.push(Panel { a: worst.a, b: m, value: v1, err: e1, abs: a1, depth: worst.depth + 1 });
        heap.push(Panel { a: m, b: worst.b, value: v2, err: e2, abs: a2, depth: worst.depth + 1 });
    }
    // recompute sums to shed accumulated cancellation
    let (mut sum, mut err) = (Complex64::new(0.0, 0.0), 0.0);
    for p in heap.iter() {
        sum += p.value;
        err += p.err;
    }
    (QuadratureResult { value: sum, error_estimate: err, evaluations: evals }, converged)
}

/// Integrates an entire integrand along a polyline with adaptive Gauss–Kronrod panels.
///
/// # Arguments
/// * `f` - integrand `ζ ↦ f(ζ)`; the result approximates `∫ f(ζ) dζ`
/// * `path` - polyline vertices, at least two
/// * `rel_tol` - relative tolerance per segment
pub fn integrate_entire(
    f: &dyn Fn(Complex64) -> Complex64,
    path: &[Complex64],
    rel_tol: f64,
) -> Result<QuadratureResult> {
    if path.len() < 2 {
        return Err(ErdError::InvalidInput("quadrature path needs two points".into()));
    }
    if !(rel_tol > 0.0) {
        return Err(ErdError::InvalidInput("rel_tol must be positive".into()));
    }
    let mut out = QuadratureResult { value: Complex64::new(0.0, 0.0), error_estimate: 0.0, evaluations: 0 };
    let mut ok = true;
    for w in path.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let (r, conv) = integrate_segment(f, w[0], w[1], rel_tol);
        out.value += r.value;
        out.error_estimate += r.error_estimate;
        out.evaluations += r.evaluations;
        ok &= conv;
    }
    out.evaluations = out.evaluations.max(1);
    if ok && out.value.is_finite() {
        Ok(out)
    } else {
        Err(ErdError::ToleranceNotMet { value: out.value, error_estimate: out.error_estimate })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exponential_along_imaginary_axis() {
        let r = integrate_entire(&|z: Complex64| (-z).exp(), &[c(0.0, 0.0), c(0.0, PI)], 1e-12).unwrap();
        assert!((r.value - c(2.0, 0.0)).norm() < 1e-12);
        assert!(r.evaluations > 0);
    }

    #[test]
    fn cubic_exponential_closed_form() {
        let r = integrate_entire(&|z: Complex64| 3.0 * z * z * (-z * z * z).exp(), &[c(0.0, 0.0), c(1.0, 0.0)], 1e-12)
            .unwrap();
        assert!((r.value.re - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn critical_value_by_quadrature() {
        let p1 = 3f64.powf(-1.0 / 3.0);
        let r = integrate_entire(
            &|z: Complex64| (1.0 - 3.0 * z * z * z) * (-z * z * z).exp(),
            &[c(0.0, 0.0), c(p1, 0.0)],
            1e-12,
        )
        .unwrap();
        // ∫(1-3z³)e^{-z³} = z e^{-z³}; with P = 3z³-1 the critical value is its negative
        let expect = -(3.0 * std::f64::consts::E).powf(-1.0 / 3.0);
        assert!((-r.value - c(expect, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn oscillatory_integrand_converges() {
        let r = integrate_entire(&|z: Complex64| (c(0.0, 40.0) * z).exp(), &[c(0.0, 0.0), c(3.0, 0.0)], 1e-10).unwrap();
        let exact = ((c(0.0, 120.0)).exp() - 1.0) / c(0.0, 40.0);
        assert!((r.value - exact).norm() < 1e-9);
    }
}
