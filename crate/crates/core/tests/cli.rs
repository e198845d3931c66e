use std::path::Path;
use std::process::{Command, Output};

use oral_billiards::orbits::canonical_word;

fn bin(args: &[&str]) -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_oral-billiards"));
    c.args(args).env_remove("ORAL_BILLIARDS_DATA");
    c
}

fn run(args: &[&str]) -> Output {
    bin(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("run.json");
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

#[test]
fn missing_config_is_a_config_error() {
    let o = run(&["--config", "/nonexistent/run.json", "simulate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nonexistent"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"init": {"side": "θ", "s": 1.0, "angle": 1.0}, "bogus": 3}"#);
    assert_eq!(run(&["--config", &cfg, "simulate"]).status.code(), Some(2));
}

#[test]
fn grammar_exit_codes() {
    let ok = run(&["grammar", "validate", "θ/P", "a/A"]);
    assert_eq!(ok.status.code(), Some(0));
    let parse: serde_json::Value = serde_json::from_str(&stdout(&ok)).unwrap();
    assert_eq!(parse["syllables"].as_array().unwrap().len(), 1);

    let bad = run(&["grammar", "validate", "θ/P", "θ/P"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("token 1"));

    let unknown = run(&["grammar", "validate", "qq/A"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn generated_phones_validate() {
    let g = run(&["--seed", "7", "grammar", "generate", "--count", "3"]);
    assert_eq!(g.status.code(), Some(0));
    let text = stdout(&g);
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let mut args = vec!["grammar", "validate"];
    args.extend(&tokens);
    let v = run(&args);
    assert_eq!(v.status.code(), Some(0), "{text}");
    let parse: serde_json::Value = serde_json::from_str(&stdout(&v)).unwrap();
    assert_eq!(parse["syllables"].as_array().unwrap().len(), 3);
}

#[test]
fn zero_events_gives_an_empty_log() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"init": {"side": "θ", "s": 1.0, "angle": 1.2}}"#);
    let o = run(&["--config", &cfg, "--max-events", "0", "--out", dir.path().to_str().unwrap(), "simulate"]);
    assert_eq!(o.status.code(), Some(0));
    // Only the termination trailer.
    let log = std::fs::read_to_string(dir.path().join("events.jsonl")).unwrap();
    assert_eq!(log.lines().count(), 1);
    let last: serde_json::Value = serde_json::from_str(log.trim()).unwrap();
    assert_eq!(last["events"], 0);
    assert_eq!(std::fs::read_to_string(dir.path().join("word.txt")).unwrap().trim(), "");
}

#[test]
fn fagnano_launch_cycles_its_three_sides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"init": {"fagnano": ["θ", "ʔ", "χ"]}, "max_events": 30}"#);
    let out = dir.path().join("out");
    let o = run(&["--config", &cfg, "--svg", "--out", out.to_str().unwrap(), "simulate"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let word: Vec<String> = std::fs::read_to_string(out.join("word.txt"))
        .unwrap()
        .split_whitespace()
        .map(String::from)
        .collect();
    assert_eq!(word.len(), 30);
    assert_eq!(canonical_word(&word[..3]), canonical_word(&["θ", "ʔ", "χ"]));
    assert!(word.chunks(3).all(|c| c == &word[..3]));
    let events = std::fs::read_to_string(out.join("events.jsonl")).unwrap();
    assert_eq!(events.lines().count(), 31);
    for line in events.lines() {
        serde_json::from_str::<serde_json::Value>(line).unwrap();
    }
    let svg = std::fs::read_to_string(out.join("trajectory.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
}

#[test]
fn equilateral_search_finds_fagnano() {
    let dir = tempfile::tempdir().unwrap();
    let h = 3f64.sqrt() / 2.0;
    let cfg = write_config(
        dir.path(),
        &format!(
            r#"{{"table": {{"vertices": [[0,0],[1,0],[0.5,{h}]], "labels": ["a","b","c"]}}, "search": {{"period_max": 4}}}}"#
        ),
    );
    let o = run(&["--config", &cfg, "orbits"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let records: Vec<serde_json::Value> = serde_json::from_str(&stdout(&o)).unwrap();
    let words: Vec<Vec<String>> = records
        .iter()
        .map(|r| serde_json::from_value(r["word"].clone()).unwrap())
        .collect();
    assert!(
        words.iter().any(|w| canonical_word(w) == canonical_word(&["a", "b", "c"])),
        "{words:?}"
    );
}

#[test]
fn data_directory_overrides_the_inventory() {
    let dir = tempfile::tempdir().unwrap();
    let inv = r#"[
  {"symbol": "a", "place": "Glottal", "frontBack": "Central", "openClose": "open", "polygonal": true, "provisional": false},
  {"symbol": "k", "place": "VUP", "frontBack": "Back", "openClose": "close", "polygonal": true, "provisional": false}
]"#;
    std::fs::write(dir.path().join("inventory.json"), inv).unwrap();
    let with = bin(&["grammar", "validate", "θ/P", "a/A"])
        .env("ORAL_BILLIARDS_DATA", dir.path())
        .output()
        .unwrap();
    assert_eq!(with.status.code(), Some(2));
    let ok = bin(&["grammar", "validate", "k/P", "a/A"])
        .env("ORAL_BILLIARDS_DATA", dir.path())
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
}

#[test]
fn render_writes_svg_only_to_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--out", dir.path().to_str().unwrap(), "render"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("render.svg").is_file());
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"init": {"side": "θ", "s": 0.7, "angle": 1.1}, "max_events": 200, "seed": 3,
            "drive": {"restitution": 0.9, "reforce_speed": 1.0, "direction_jitter": 0.01}}"#,
    );
    let a = run(&["--config", &cfg, "simulate"]);
    let b = run(&["--config", &cfg, "simulate"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
}
