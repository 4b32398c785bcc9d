//! Worked configuration trees with closed-form vertex values.
//!
//! Vertex indices are 0-based; tract indices follow the tract ordering of
//! [`crate::field::tract_directions`].

use crate::numerics::ComplexPoly;
use crate::tree::{BranchPoint, ConfigTree};
use num_complex::Complex64;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ess(tract: usize, a: Complex64) -> BranchPoint {
    BranchPoint::Essential { tract, a }
}

fn pole(p: Complex64, p_tilde: Complex64, mu: u32) -> BranchPoint {
    BranchPoint::Pole { p, p_tilde, mu }
}

fn build(vertices: Vec<BranchPoint>, start: usize, edges: &[(usize, usize, i64)]) -> ConfigTree {
    ConfigTree::from_edges(vertices, start, edges).expect("fixture edges join distinct values")
}

/// `X = 1/((z+1)^μ₁ (z−1)^μ₂) ∂/∂z`, base point 0: two poles, one horizontal edge.
pub fn tree_5_1(mu1: u32, mu2: u32) -> ConfigTree {
    let mut roots = vec![c(-1.0, 0.0); mu1 as usize];
    roots.extend(std::iter::repeat_n(c(1.0, 0.0), mu2 as usize));
    let psi = ComplexPoly::from_roots(c(1.0, 0.0), &roots).antiderivative();
    let v = vec![
        pole(c(-1.0, 0.0), psi.eval(c(-1.0, 0.0)), mu1),
        pole(c(1.0, 0.0), psi.eval(c(1.0, 0.0)), mu2),
    ];
    let start = if v[0].start_order(&v[1]).is_le() { 0 } else { 1 };
    build(v, start, &[(start, 1 - start, 0)])
}

/// `X = λ⁻¹ e^z ∂/∂z` with base point `z0`: one essential vertex at `λe^{−z0}`.
pub fn tree_5_2(lambda: Complex64, z0: Complex64) -> ConfigTree {
    ConfigTree::single(ess(1, lambda * (-z0).exp()))
}

/// `X = e^z / (λ(z − p₁)) ∂/∂z` with base point `z0`.
pub fn tree_5_3(lambda: Complex64, p1: Complex64, z0: Complex64) -> ConfigTree {
    let a = lambda * (-z0).exp() * (z0 - p1 + 1.0);
    let pt = a - lambda * (-p1).exp();
    build(vec![ess(1, a), pole(p1, pt, 1)], 0, &[(0, 1, 0)])
}

/// `X = −e^{z³}/(3z²) ∂/∂z`: a double pole over 0 and three tracts over −1.
pub fn tree_5_4() -> ConfigTree {
    let a = c(-1.0, 0.0);
    let z = c(0.0, 0.0);
    build(
        vec![ess(1, a), pole(z, z, 2), ess(2, a), ess(3, a)],
        0,
        &[(0, 1, 0), (1, 2, 1), (1, 3, -1)],
    )
}

/// Vertices shared by the two trees of the field `e^{z³}/(3z³ − 1) ∂/∂z`:
/// `[∞₁, p₁, p₂, p₃, ∞₂, ∞₃]`.
pub fn vertices_5_5() -> Vec<BranchPoint> {
    let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    let p1 = c(3f64.powf(-1.0 / 3.0), 0.0);
    let pt1 = c(-(3.0 * std::f64::consts::E).powf(-1.0 / 3.0), 0.0);
    let z = c(0.0, 0.0);
    vec![
        ess(1, z),
        pole(p1, pt1, 1),
        pole(w * p1, w * pt1, 1),
        pole(w.conj() * p1, w.conj() * pt1, 1),
        ess(2, z),
        ess(3, z),
    ]
}

/// First tree of the three-simple-pole field.
pub fn tree_5_5() -> ConfigTree {
    build(vertices_5_5(), 0, &[(0, 1, 0), (1, 2, 0), (1, 3, 1), (2, 4, 1), (3, 5, 1)])
}

/// Second tree of the same field, with the horizontal triangle broken at another edge.
pub fn tree_6_8() -> ConfigTree {
    build(vertices_5_5(), 4, &[(4, 2, 0), (2, 0, 1), (0, 1, 0), (1, 3, 1), (3, 5, 1)])
}

/// `X = λ e^{z²} √π / 2 ∂/∂z`, whose distinguished parameter is `λ⁻¹ erf z`.
pub fn tree_erf(lambda: Complex64) -> ConfigTree {
    let v = vec![ess(1, 1.0 / lambda), ess(2, -1.0 / lambda)];
    let start = if v[0].start_order(&v[1]).is_le() { 0 } else { 1 };
    build(v, start, &[(start, 1 - start, 0)])
}

pub fn tree_single_essential() -> ConfigTree {
    ConfigTree::single(ess(1, c(0.0, 0.0)))
}

pub fn tree_single_pole(mu: u32) -> ConfigTree {
    ConfigTree::single(pole(c(0.0, 0.0), c(0.0, 0.0), mu))
}

/// A simple pole followed by an essential vertex that carries edges at K = ±1.
pub fn tree_tower_example() -> ConfigTree {
    build(
        vec![pole(c(0.0, 0.0), c(0.0, 0.0), 1), ess(1, c(1.0, 0.0)), ess(2, c(1.5, 1.0)), ess(3, c(1.5, -1.0))],
        0,
        &[(0, 1, 0), (1, 2, 1), (1, 3, -1)],
    )
}

/// Every fixture with its declared (r, d).
pub fn all() -> Vec<(&'static str, ConfigTree, u32, usize)> {
    vec![
        ("two_poles_1_1", tree_5_1(1, 1), 2, 0),
        ("two_poles_5_3", tree_5_1(5, 3), 8, 0),
        ("exp", tree_5_2(c(1.0, 0.0), c(0.0, 0.0)), 0, 1),
        ("exp_over_linear", tree_5_3(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)), 1, 1),
        ("double_pole_three_tracts", tree_5_4(), 2, 3),
        ("three_simple_poles", tree_5_5(), 3, 3),
        ("three_simple_poles_alt", tree_6_8(), 3, 3),
        ("erf_real", tree_erf(c(1.0, 0.0)), 0, 2),
        ("erf_imaginary", tree_erf(c(0.0, 1.0)), 0, 2),
        ("single_essential", tree_single_essential(), 0, 1),
        ("single_pole", tree_single_pole(3), 3, 0),
        ("tower", tree_tower_example(), 1, 3),
    ]
}
