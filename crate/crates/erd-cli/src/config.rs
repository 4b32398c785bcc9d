//! Job configuration read from a single JSON document.
//!
//! ```json
//! {
//!   "p": [[-1, 0], [0, 0], [0, 0], [3, 0]],
//!   "e": [[0, 0], [0, 0], [0, 0], [1, 0]],
//!   "z0": [0, 0],
//!   "tolerances": { "quad_rel": 1e-10 },
//!   "portrait": { "window": [-2, 2, -2, 2], "density": 16 },
//!   "enumerate": { "r": 1, "d": 1, "k_bound": 2 },
//!   "outputs": { "report": "report.json", "svg": "portrait.svg" }
//! }
//! ```
//!
//! Coefficients are `[re, im]` pairs from the constant term upward.

use erd_core::field::{BuildOptions, FieldSpec};
use erd_core::numerics::ComplexPoly;
use erd_core::{Complex64, ErdError, Result};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative tolerance of every quadrature.
    #[serde(default = "default_quad_rel")]
    pub quad_rel: f64,
    /// Step budget of a single path lift.
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    /// Largest germ level searched at an essential vertex.
    #[serde(default = "default_max_level")]
    pub max_essential_level: i64,
}

fn default_quad_rel() -> f64 {
    1e-10
}

fn default_max_steps() -> usize {
    200_000
}

fn default_max_level() -> i64 {
    12
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { quad_rel: default_quad_rel(), max_steps: default_max_steps(), max_essential_level: default_max_level() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortraitSpec {
    /// `[x_min, x_max, y_min, y_max]`.
    #[serde(default = "default_window")]
    pub window: [f64; 4],
    /// Seeds per side of the seeding grid.
    #[serde(default = "default_density")]
    pub density: usize,
    /// Arc length cap of one trajectory, in units of the window diagonal.
    #[serde(default = "default_length")]
    pub max_length: f64,
    #[serde(default = "yes")]
    pub separatrices: bool,
    #[serde(default = "yes")]
    pub shade_strips: bool,
}

fn default_window() -> [f64; 4] {
    [-2.0, 2.0, -2.0, 2.0]
}

fn default_density() -> usize {
    14
}

fn default_length() -> f64 {
    3.0
}

fn yes() -> bool {
    true
}

impl Default for PortraitSpec {
    fn default() -> Self {
        PortraitSpec {
            window: default_window(),
            density: default_density(),
            max_length: default_length(),
            separatrices: true,
            shade_strips: true,
        }
    }
}

impl PortraitSpec {
    pub fn check(&self) -> Result<()> {
        let [x0, x1, y0, y1] = self.window;
        if !self.window.iter().all(|v| v.is_finite()) || !(x1 > x0) || !(y1 > y0) {
            return Err(ErdError::InvalidInput("portrait window must be finite and nonempty".into()));
        }
        if self.density < 1 {
            return Err(ErdError::InvalidInput("portrait density must be at least 1".into()));
        }
        if !(self.max_length > 0.0) || !self.max_length.is_finite() {
            return Err(ErdError::InvalidInput("portrait max_length must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnumerateSpec {
    pub r: u32,
    pub d: usize,
    #[serde(default = "default_k_bound")]
    pub k_bound: i64,
}

fn default_k_bound() -> i64 {
    2
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub report: Option<PathBuf>,
    pub tree: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default)]
    pub p: Vec<[f64; 2]>,
    #[serde(default)]
    pub e: Vec<[f64; 2]>,
    #[serde(default)]
    pub z0: [f64; 2],
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub portrait: PortraitSpec,
    pub enumerate: Option<EnumerateSpec>,
    #[serde(default)]
    pub outputs: Outputs,
}

fn poly(name: &str, c: &[[f64; 2]]) -> Result<ComplexPoly> {
    if c.iter().flatten().any(|x| !x.is_finite()) {
        return Err(ErdError::InvalidInput(format!("{name} has a non-finite coefficient")));
    }
    Ok(ComplexPoly::new(c.iter().map(|&[re, im]| Complex64::new(re, im)).collect()))
}

impl JobConfig {
    pub fn from_json(src: &str) -> Result<JobConfig> {
        serde_json::from_str(src).map_err(|e| ErdError::InvalidInput(format!("config: {e}")))
    }

    /// The field described by `p`, `e` and `z0`, with a readable message for each broken invariant.
    pub fn field(&self) -> Result<FieldSpec> {
        let p = poly("P", &self.p)?;
        if p.is_zero() {
            return Err(ErdError::InvalidInput("P must not be the zero polynomial".into()));
        }
        let e = if self.e.is_empty() { ComplexPoly::new(vec![Complex64::new(0.0, 0.0)]) } else { poly("E", &self.e)? };
        let z0 = Complex64::new(self.z0[0], self.z0[1]);
        if !z0.is_finite() {
            return Err(ErdError::InvalidInput("z0 must be finite".into()));
        }
        FieldSpec::new(p, e, z0)
    }

    pub fn build_options(&self) -> Result<BuildOptions> {
        let t = &self.tolerances;
        if !(t.quad_rel > 0.0 && t.quad_rel < 1e-2) {
            return Err(ErdError::InvalidInput("tolerances.quad_rel must lie in (0, 1e-2)".into()));
        }
        if t.max_steps == 0 || t.max_essential_level < 0 {
            return Err(ErdError::InvalidInput("tolerances.max_steps and max_essential_level must be positive".into()));
        }
        let mut o = BuildOptions::default();
        o.lift.rel_tol = t.quad_rel;
        o.lift.max_steps = t.max_steps;
        o.max_essential_level = t.max_essential_level;
        Ok(o)
    }
}
