//! Command dispatch and exit-code mapping.

use crate::config::JobConfig;
use crate::render::render_portrait;
use crate::report::{self, Analysis};
use erd_core::classify::{all_real_values, count_topologies, enumerate_classes, standard_grid};
use erd_core::field::build_config_tree;
use erd_core::tree::write_tree;
use erd_core::words::ph_index;
use erd_core::ErdError;
use serde_json::json;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Analyze,
    Tree,
    Skeleton,
    Word,
    Stability,
    Enumerate,
    Render,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Erd(ErdError),
}

impl From<ErdError> for CliError {
    fn from(e: ErdError) -> Self {
        CliError::Erd(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Erd(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    /// 1 for bad input, 2 for ambiguous geometry, 3 for numerical failure, 4 for internal inconsistency.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Erd(ErdError::InvalidInput(_)) => 1,
            CliError::Erd(ErdError::AmbiguousGeometry(_)) => 2,
            CliError::Erd(ErdError::NonConvergence(_) | ErdError::Diverged(_) | ErdError::ToleranceNotMet { .. }) => 3,
            CliError::Erd(ErdError::ShapeMismatch(_) | ErdError::InconsistentGluing(_)) => 4,
        }
    }
}

/// What a command produced: the main document and a human summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Emitted {
    pub document: String,
    pub summary: String,
    /// Output path configured for this kind of document, if any.
    pub default_path: Option<PathBuf>,
    /// Extra files requested by the config, written alongside the document.
    pub extra: Vec<(PathBuf, String)>,
}

fn analysis(cfg: &JobConfig) -> Result<Analysis, CliError> {
    let f = cfg.field()?;
    let tree = build_config_tree(&f, &cfg.build_options()?)?;
    Ok(Analysis::of(tree)?)
}

pub fn execute(cmd: Command, cfg: &JobConfig) -> Result<Emitted, CliError> {
    let out = &cfg.outputs;
    let emitted = match cmd {
        Command::Analyze => {
            let f = cfg.field()?;
            let a = analysis(cfg)?;
            let mut extra = Vec::new();
            if let Some(p) = &out.tree {
                extra.push((p.clone(), write_tree(&a.tree)));
            }
            Emitted {
                document: report::to_text(&report::report(&f, &a)),
                summary: report::summary(&a),
                default_path: out.report.clone(),
                extra,
            }
        }
        Command::Tree => {
            let a = analysis(cfg)?;
            Emitted {
                document: write_tree(&a.tree),
                summary: format!("{} vertices, {} edges\n", a.tree.vertices.len(), a.tree.edges.len()),
                default_path: out.tree.clone(),
                extra: Vec::new(),
            }
        }
        Command::Skeleton => {
            let a = analysis(cfg)?;
            let v = json!({
                "format": report::REPORT_FORMAT,
                "skeleton": report::skeleton_json(&a.skeleton),
                "strips": report::strips_json(&a.strips),
            });
            Emitted {
                document: report::to_text(&v),
                summary: format!("{} columns, {} finite strips\n", a.skeleton.columns.len(), a.strips.finite_strips.len()),
                default_path: out.report.clone(),
                extra: Vec::new(),
            }
        }
        Command::Word => {
            let a = analysis(cfg)?;
            let v = json!({
                "format": report::REPORT_FORMAT,
                "word": report::word_json(&a.word),
                "ph_index": ph_index(&a.reduced),
            });
            Emitted {
                document: report::to_text(&v),
                summary: format!("{}  PH {}\n", a.reduced.to_unicode(), ph_index(&a.reduced)),
                default_path: out.report.clone(),
                extra: Vec::new(),
            }
        }
        Command::Stability => {
            let a = analysis(cfg)?;
            let mut v = report::stability_json(&a.tree);
            v["format"] = json!(report::REPORT_FORMAT);
            v["all_real_values"] = json!(all_real_values(&a.tree));
            let stable = v["stable"].as_bool().unwrap_or(false);
            Emitted {
                document: report::to_text(&v),
                summary: format!("{}\n", if stable { "stable" } else { "unstable" }),
                default_path: out.report.clone(),
                extra: Vec::new(),
            }
        }
        Command::Enumerate => {
            let spec = cfg.enumerate.as_ref().ok_or_else(|| CliError::Usage("enumerate needs an \"enumerate\" section in the config".into()))?;
            let classes = enumerate_classes(spec.r, spec.d, spec.k_bound, &standard_grid())?;
            let v = json!({
                "format": report::REPORT_FORMAT,
                "r": spec.r,
                "d": spec.d,
                "k_bound": spec.k_bound,
                "class_count": classes.len(),
                "classes": classes,
                "topologies": count_topologies(spec.r, spec.d as u32).map(report::topology_json)?,
            });
            Emitted {
                document: report::to_text(&v),
                summary: format!("({}, {}): {} classes on the standard grid\n", spec.r, spec.d, classes.len()),
                default_path: out.report.clone(),
                extra: Vec::new(),
            }
        }
        Command::Render => {
            let f = cfg.field()?;
            let strips = match analysis(cfg) {
                Ok(a) => Some(a.strips),
                Err(CliError::Erd(ErdError::InvalidInput(m))) => return Err(CliError::Erd(ErdError::InvalidInput(m))),
                Err(_) => None,
            };
            let p = render_portrait(&f, &cfg.portrait, cfg.seed, strips.as_ref())?;
            let s = p.stats;
            Emitted {
                document: p.svg,
                summary: format!(
                    "{} trajectories, {} separatrices, {} poles, {} shaded strips{}\n",
                    s.trajectories,
                    s.separatrices,
                    s.poles,
                    s.shaded_strips,
                    if strips.is_none() { " (tree unavailable)" } else { "" }
                ),
                default_path: out.svg.clone(),
                extra: Vec::new(),
            }
        }
    };
    Ok(emitted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use erd_core::Complex64;

    #[test]
    fn exit_codes() {
        let code = |e: ErdError| CliError::Erd(e).exit_code();
        assert_eq!(code(ErdError::InvalidInput("x".into())), 1);
        assert_eq!(code(ErdError::AmbiguousGeometry("x".into())), 2);
        assert_eq!(code(ErdError::NonConvergence("x".into())), 3);
        assert_eq!(code(ErdError::Diverged("x".into())), 3);
        assert_eq!(code(ErdError::ToleranceNotMet { value: Complex64::new(0.0, 0.0), error_estimate: 1.0 }), 3);
        assert_eq!(code(ErdError::InconsistentGluing("x".into())), 4);
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
    }
}
