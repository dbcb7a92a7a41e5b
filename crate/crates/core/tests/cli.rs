use std::path::Path;

use rdk::cli::{run, ExitStatus};
use rdk::model::{DesignFile, Document};
use serde_json::Value;

fn rdk(args: &[&str]) -> (ExitStatus, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["rdk"];
    argv.extend_from_slice(args);
    let status = run(argv, &mut out, &mut err);
    (status, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("k13.json");
    let (status, _, err) = rdk(&["generate", "K13", "20", "6", "--out", path_str(&file)]);
    assert_eq!(status, ExitStatus::Success, "{err}");
    let (status, out, _) = rdk(&["verify", path_str(&file)]);
    assert_eq!(status, ExitStatus::Success);
    let report: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["valid"], true);
    let doc = DesignFile::parse(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(doc.design().classes.len(), 76);
}

#[test]
fn generation_is_deterministic() {
    let (_, first, _) = rdk(&["generate", "K4E", "16", "5"]);
    let (_, second, _) = rdk(&["generate", "K4E", "16", "5"]);
    assert!(!first.is_empty());
    assert_eq!(first, second);
}

#[test]
fn deleting_a_block_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("c4.json");
    let (status, _, _) = rdk(&["generate", "C4", "8", "2", "--out", path_str(&file)]);
    assert_eq!(status, ExitStatus::Success);
    let mut doc = DesignFile::parse(&std::fs::read_to_string(&file).unwrap()).unwrap();
    match &mut doc {
        Document::Design(d) => d.classes[0].blocks.pop(),
        Document::Grouped(g) => g.design.classes[0].blocks.pop(),
    };
    std::fs::write(&file, doc.to_json()).unwrap();
    let (status, out, _) = rdk(&["verify", path_str(&file)]);
    assert_eq!(status, ExitStatus::Negative);
    let report: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["valid"], false);
    assert!(!report["edgeDefects"].as_array().unwrap().is_empty());
}

#[test]
fn malformed_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("broken.json");
    std::fs::write(&file, "{\"shape\": \"C4\", \"lambda\": ").unwrap();
    assert_eq!(rdk(&["verify", path_str(&file)]).0, ExitStatus::Usage);
    assert_eq!(rdk(&["verify", path_str(&dir.path().join("absent.json"))]).0, ExitStatus::Usage);
}

#[test]
fn unknown_flags_are_usage_errors() {
    assert_eq!(rdk(&["generate", "C4", "8", "2", "--bogus"]).0, ExitStatus::Usage);
    assert_eq!(rdk(&["generate", "C5", "8", "2"]).0, ExitStatus::Usage);
}

#[test]
fn inadmissible_parameters_are_negative() {
    let (status, out, _) = rdk(&["generate", "C4", "6", "2"]);
    assert_eq!(status, ExitStatus::Negative);
    let value: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(value["status"], "NOT_ADMISSIBLE");
}

#[test]
fn dry_run_of_a_buildable_design_is_ready() {
    let (status, out, _) = rdk(&["generate", "KITE", "16", "2", "--dry-run"]);
    assert_eq!(status, ExitStatus::Success);
    let value: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(value["status"], "READY");
    assert!(value["missing"].as_array().unwrap().is_empty());
}

#[test]
fn search_reports_exhaustion() {
    let (status, out, _) = rdk(&["search", "K3", "--v", "6", "--lambda", "2"]);
    assert_eq!(status, ExitStatus::Negative);
    assert!(out.contains("EXHAUSTED_NONEXISTENT"));
    let (status, out, _) = rdk(&["search", "C4", "--v", "4", "--lambda", "2"]);
    assert_eq!(status, ExitStatus::Success);
    assert!(out.contains("FOUND"));
}

#[test]
fn spectrum_is_tab_separated() {
    let (status, out, _) = rdk(&["spectrum", "K13", "--v-max", "24", "--lambda-max", "6"]);
    assert_eq!(status, ExitStatus::Success);
    assert!(out.lines().count() > 1);
    assert!(out.lines().all(|l| l.contains('\t')));
}
