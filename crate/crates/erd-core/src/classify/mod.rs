//! Stability, topology counts and brute-force class enumeration.

mod enumerate;

pub use enumerate::{enumerate_classes, enumerate_trees, perturb_weights, perturbation_dichotomy, standard_grid};

use crate::error::{ErdError, Result};
use crate::tree::{ConfigTree, IM_TOL};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StabilityReason {
    NonSimplePole { vertex: usize, p: Complex64, mu: u32 },
    /// Edge weight with imaginary part exactly zero.
    RealImaginaryEdge { edge: usize },
    /// Edge weight whose imaginary part is nonzero but below `IM_TOL` of the value scale.
    ZeroImaginaryWithinTolerance { edge: usize, im: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub stable: bool,
    pub reasons: Vec<StabilityReason>,
}

pub fn is_structurally_stable(t: &ConfigTree) -> StabilityVerdict {
    let mut reasons = Vec::new();
    for (i, v) in t.vertices.iter().enumerate() {
        if let crate::tree::BranchPoint::Pole { p, mu, .. } = *v {
            if mu > 1 {
                reasons.push(StabilityReason::NonSimplePole { vertex: i, p, mu });
            }
        }
    }
    let tol = IM_TOL * t.value_scale();
    for (i, e) in t.edges.iter().enumerate() {
        let im = e.weight.value.im;
        if im == 0.0 {
            reasons.push(StabilityReason::RealImaginaryEdge { edge: i });
        } else if im.abs() <= tol {
            reasons.push(StabilityReason::ZeroImaginaryWithinTolerance { edge: i, im });
        }
    }
    StabilityVerdict { stable: reasons.is_empty(), reasons }
}

/// True when every vertex value is real up to `IM_TOL` of the value scale.
pub fn all_real_values(t: &ConfigTree) -> bool {
    let tol = IM_TOL * t.value_scale();
    t.vertices.iter().all(|v| v.t().im.abs() <= tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TopologyCount {
    Finite(u128),
    Infinite,
    UpperBound(u128),
}

/// Number of partitions of `n`.
pub fn partitions(n: u32) -> u128 {
    let n = n as usize;
    let mut p = vec![0u128; n + 1];
    p[0] = 1;
    for part in 1..=n {
        for m in part..=n {
            p[m] += p[m - part];
        }
    }
    p[n]
}

pub fn count_topologies(r: u32, d: u32) -> Result<TopologyCount> {
    Ok(match (r, d) {
        (0, 0) => return Err(ErdError::InvalidInput("r + d must be at least 1".into())),
        (1, 0) | (0, 1) => TopologyCount::Finite(1),
        (0, 2) | (1, 1) => TopologyCount::Finite(2),
        (2, 0) => TopologyCount::Finite(3),
        (_, 0) => {
            let overflow = || ErdError::InvalidInput(format!("topology bound for r = {r} overflows"));
            let mut b = 3u128.checked_pow(r - 1).ok_or_else(overflow)?;
            b = b.checked_mul((r - 1) as u128).ok_or_else(overflow)?;
            for k in 2..=r as u128 {
                b = b.checked_mul(k).ok_or_else(overflow)?;
            }
            TopologyCount::UpperBound(b.checked_mul(partitions(r)).ok_or_else(overflow)?)
        }
        _ => TopologyCount::Infinite,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn partition_numbers() {
        let known = [1u128, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42];
        for (n, &p) in known.iter().enumerate() {
            assert_eq!(partitions(n as u32), p);
        }
    }

    #[test]
    fn counts() {
        assert_eq!(count_topologies(0, 2).unwrap(), TopologyCount::Finite(2));
        assert_eq!(count_topologies(2, 0).unwrap(), TopologyCount::Finite(3));
        assert_eq!(count_topologies(4, 0).unwrap(), TopologyCount::UpperBound(9720));
        assert_eq!(count_topologies(3, 0).unwrap(), TopologyCount::UpperBound(9 * 2 * 6 * 3));
        assert!(count_topologies(0, 0).is_err());
        for r in 0..=5u32 {
            for d in 0..=5u32 {
                if r + d == 0 {
                    continue;
                }
                let infinite = (r >= 2 && d == 1) || (r >= 1 && d == 2) || d >= 3;
                assert_eq!(count_topologies(r, d).unwrap() == TopologyCount::Infinite, infinite, "({r},{d})");
            }
        }
    }

    #[test]
    fn stability_examples() {
        let v = is_structurally_stable(&fixtures::tree_5_5());
        assert!(!v.stable);
        assert!(v.reasons.iter().any(|r| matches!(r, StabilityReason::RealImaginaryEdge { .. })));
        let erf = fixtures::tree_erf(Complex64::new(0.0, 1.0));
        assert!(is_structurally_stable(&erf).stable);
        let v = is_structurally_stable(&fixtures::tree_5_4());
        assert!(v.reasons.iter().any(|r| matches!(r, StabilityReason::NonSimplePole { mu: 2, .. })));
    }

    #[test]
    fn near_real_edge_is_reported() {
        let mut t = fixtures::tree_erf(Complex64::new(0.0, 1.0));
        t.edges[0].weight.value = Complex64::new(2.0, 1e-12);
        let v = is_structurally_stable(&t);
        assert!(matches!(v.reasons[..], [StabilityReason::ZeroImaginaryWithinTolerance { edge: 0, .. }]));
    }

    #[test]
    fn all_real_examples() {
        assert!(all_real_values(&fixtures::tree_erf(Complex64::new(1.0, 0.0))));
        assert!(!all_real_values(&fixtures::tree_erf(Complex64::new(0.0, 1.0))));
        assert!(!all_real_values(&fixtures::tree_5_5()));
        assert!(all_real_values(&fixtures::tree_5_1(1, 2)));
        for (name, t, _, _) in fixtures::all() {
            if all_real_values(&t) && !t.edges.is_empty() {
                assert!(!is_structurally_stable(&t).stable, "{name}");
            }
        }
    }

    #[test]
    fn one_vertex_trees_are_stable_even_when_real() {
        let t = fixtures::tree_single_essential();
        assert!(all_real_values(&t));
        assert!(is_structurally_stable(&t).stable);
    }
}
