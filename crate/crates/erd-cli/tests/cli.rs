use erd_cli::config::JobConfig;
use erd_cli::render::render_portrait;
use erd_cli::run::{execute, Command};
use erd_core::tree::{parse_tree, validate, write_tree};
use std::path::PathBuf;
use std::process::Command as Process;

fn job(src: &str) -> JobConfig {
    JobConfig::from_json(src).unwrap()
}

const CUBIC: &str = r#"{"p": [[-1, 0], [0, 0], [0, 0], [3, 0]], "e": [[0, 0], [0, 0], [0, 0], [1, 0]]}"#;
const EXP: &str = r#"{"p": [[1, 0]], "e": [[0, 0], [1, 0]]}"#;
const DOUBLE_POLE: &str = r#"{"p": [[0, 0], [0, 0], [-3, 0]], "e": [[0, 0], [0, 0], [0, 0], [1, 0]]}"#;
// (z − 1)(z + 1)²
const TWO_POLES: &str = r#"{"p": [[-1, 0], [-1, 0], [1, 0], [1, 0]], "e": [[0, 0]]}"#;
// 2/(λ√π) with λ = i
const ERF_I: &str = r#"{"p": [[0, -1.1283791670955126]], "e": [[0, 0], [0, 0], [1, 0]]}"#;

fn report(src: &str) -> serde_json::Value {
    serde_json::from_str(&execute(Command::Analyze, &job(src)).unwrap().document).unwrap()
}

fn metadata(svg: &str) -> serde_json::Value {
    let doc = roxmltree::Document::parse(svg).unwrap();
    let meta = doc.descendants().find(|n| n.has_tag_name("metadata")).unwrap();
    serde_json::from_str(meta.text().unwrap()).unwrap()
}

#[test]
fn analyze_cubic_example() {
    let r = report(CUBIC);
    assert_eq!(r["format"], "erd-report/1");
    assert_eq!(r["signature"]["d"], 3);
    assert_eq!(r["signature"]["n"], 3);
    assert_eq!(r["ph_index"]["infinity"], 5.0);
    let sectors = erd_core::words::parse_word(&r["word"]["sectors_without_parabolic"].as_str().unwrap().replace('𝓔', "*")).unwrap();
    let expected = erd_core::words::parse_word("*EE*****").unwrap();
    assert!(sectors.cyclic_eq(&expected), "{sectors}");
}

#[test]
fn analyze_exponential() {
    let r = report(EXP);
    assert_eq!(r["word"]["unicode"], "𝓔𝓔");
    assert_eq!(r["ph_index"]["infinity"], 2.0);
}

#[test]
fn zero_p_is_rejected() {
    let err = execute(Command::Analyze, &job(r#"{"p": [[0, 0]], "e": [[0, 0], [1, 0]]}"#)).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().contains("P must not be the zero polynomial"));
}

#[test]
fn reports_are_byte_identical() {
    for src in [CUBIC, EXP, DOUBLE_POLE] {
        let a = execute(Command::Analyze, &job(src)).unwrap().document;
        let b = execute(Command::Analyze, &job(src)).unwrap().document;
        assert_eq!(a, b);
    }
    let a = execute(Command::Render, &job(TWO_POLES)).unwrap().document;
    let b = execute(Command::Render, &job(TWO_POLES)).unwrap().document;
    assert_eq!(a, b);
}

#[test]
fn svg_is_well_formed_and_stays_in_window() {
    for src in [CUBIC, EXP, TWO_POLES, ERF_I] {
        let cfg = job(src);
        let svg = execute(Command::Render, &cfg).unwrap().document;
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let root = doc.root_element();
        assert_eq!(root.attribute("version"), Some("1.1"));
        let [x0, x1, y0, y1] = cfg.portrait.window;
        let margin = 0.05 * (x1 - x0).max(y1 - y0);
        let w = x1 - x0 + 2.0 * margin;
        let h = y1 - y0 + 2.0 * margin;
        let plot_w = 800.0;
        let plot_h = plot_w * h / w;
        for path in doc.descendants().filter(|n| n.has_tag_name("path")) {
            let d = path.attribute("d").unwrap();
            for pair in d.split(['M', 'L']).map(str::trim).filter(|s| !s.is_empty()) {
                let (x, y) = pair.split_once(',').unwrap();
                let (x, y): (f64, f64) = (x.trim().parse().unwrap(), y.trim().parse().unwrap());
                assert!((-0.01..=plot_w + 0.01).contains(&x) && (-0.01..=plot_h + 0.01).contains(&y), "{x},{y}");
            }
        }
    }
}

#[test]
fn separatrices_of_two_pole_field() {
    let svg = execute(Command::Render, &job(TWO_POLES)).unwrap().document;
    let m = metadata(&svg);
    assert_eq!(m["separatrix_count"], 2 * (1 + 1) + 2 * (2 + 1));
    assert_eq!(m["poles"], 2);
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let drawn = doc.descendants().filter(|n| n.attribute("class") == Some("separatrix")).count();
    assert_eq!(drawn, 10);
}

#[test]
fn exponential_has_no_poles_drawn() {
    let svg = execute(Command::Render, &job(EXP)).unwrap().document;
    assert_eq!(metadata(&svg)["poles"], 0);
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert_eq!(doc.descendants().filter(|n| n.has_tag_name("circle")).count(), 0);
}

#[test]
fn shaded_strips_match_decomposition() {
    for src in [ERF_I, EXP, CUBIC] {
        let cfg = job(src);
        let r = report(src);
        let expected = r["strips"]["finite_strips"].as_array().unwrap().len();
        let svg = execute(Command::Render, &cfg).unwrap().document;
        assert_eq!(metadata(&svg)["shaded_strips"], expected);
        let doc = roxmltree::Document::parse(&svg).unwrap();
        assert_eq!(doc.descendants().filter(|n| n.attribute("class") == Some("strip")).count(), expected);
    }
    assert_eq!(report(ERF_I)["strips"]["finite_strips"], serde_json::json!([2.0]));
}

#[test]
fn portrait_without_strips() {
    let cfg = job(EXP);
    let p = render_portrait(&cfg.field().unwrap(), &cfg.portrait, 0, None).unwrap();
    assert_eq!(p.stats.shaded_strips, 0);
    assert!(p.stats.trajectories > 0);
}

#[test]
fn tree_export_round_trips() {
    let text = execute(Command::Tree, &job(DOUBLE_POLE)).unwrap().document;
    let t = parse_tree(&text).unwrap();
    assert!(validate(&t).is_valid());
    assert_eq!((t.vertices.len(), t.edges.len()), (4, 3));
    let mut ks: Vec<i64> = t.edges.iter().map(|e| e.weight.k).collect();
    ks.sort();
    assert_eq!(ks, vec![-1, 0, 1]);
    assert_eq!(write_tree(&t), text);

    let text = execute(Command::Tree, &job(EXP)).unwrap().document;
    let t = parse_tree(&text).unwrap();
    assert_eq!((t.vertices.len(), t.edges.len()), (1, 0));
    assert_eq!(write_tree(&t), text);
}

#[test]
fn enumerate_command() {
    let cfg = job(r#"{"enumerate": {"r": 1, "d": 1}}"#);
    let v: serde_json::Value = serde_json::from_str(&execute(Command::Enumerate, &cfg).unwrap().document).unwrap();
    assert_eq!(v["class_count"], 2);
    assert_eq!(v["topologies"]["kind"], "finite");
    assert_eq!(execute(Command::Enumerate, &job(EXP)).unwrap_err().exit_code(), 1);
}

#[test]
fn stability_and_word_commands() {
    let v: serde_json::Value = serde_json::from_str(&execute(Command::Stability, &job(ERF_I)).unwrap().document).unwrap();
    assert_eq!(v["stable"], true);
    assert_eq!(v["all_real_values"], false);
    let v: serde_json::Value = serde_json::from_str(&execute(Command::Stability, &job(DOUBLE_POLE)).unwrap().document).unwrap();
    assert_eq!(v["stable"], false);
    assert_eq!(v["reasons"][0]["kind"], "non_simple_pole");
    let v: serde_json::Value = serde_json::from_str(&execute(Command::Word, &job(EXP)).unwrap().document).unwrap();
    assert_eq!(v["ph_index"], 2.0);
    let v: serde_json::Value = serde_json::from_str(&execute(Command::Skeleton, &job(ERF_I)).unwrap().document).unwrap();
    assert_eq!(v["strips"]["infinite_half_planes"], true);
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn erd(args: &[&str]) -> std::process::Output {
    Process::new(env!("CARGO_BIN_EXE_erd")).args(args).output().unwrap()
}

#[test]
fn binary_exit_codes_and_outputs() {
    let good = scratch("cli_exp.json", EXP);
    let out = erd(&["analyze", "--config", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["ph_index"]["infinity"], 2.0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("PH at ∞"));

    let dest = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli_exp.svg");
    let out = erd(&["render", "--config", good.to_str().unwrap(), "--out", dest.to_str().unwrap(), "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    roxmltree::Document::parse(&std::fs::read_to_string(&dest).unwrap()).unwrap();

    let zero = scratch("cli_zero.json", r#"{"p": [[0, 0]]}"#);
    let out = erd(&["analyze", "--config", zero.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("P must not be the zero polynomial"));

    assert_eq!(erd(&["frobnicate", "--config", good.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(erd(&["analyze", "--config", good.to_str().unwrap(), "--tol", "5"]).status.code(), Some(1));

    // Ψ = z⁴/4 − z²/2 takes the value −1/4 at both poles ±1.
    let tied = scratch("cli_tied.json", r#"{"p": [[0, 0], [-1, 0], [0, 0], [1, 0]], "e": [[0, 0]]}"#);
    let out = erd(&["analyze", "--config", tied.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}
