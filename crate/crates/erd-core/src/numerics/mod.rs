//! Polynomials, roots with multiplicity, and contour quadrature.

mod poly;
mod quad;
mod roots;

pub use poly::{poly_eval, ComplexPoly};
pub use quad::{gk15, integrate_entire, QuadratureResult};
pub use roots::{poly_roots, RootCluster};
