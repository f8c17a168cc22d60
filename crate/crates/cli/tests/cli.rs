use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dramaturg"))
        .args(args)
        .env_remove("DRAMATURG_CONFIG")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn analyze_golden(out: &Path) -> Output {
    run(&[
        "analyze",
        s(&fixture("golden/synthetic_play.txt")),
        "--config",
        s(&fixture("golden/config.json")),
        "--out",
        s(out),
    ])
}

#[test]
fn analyze_writes_the_golden_tree_and_caches() {
    let out = tempfile::tempdir().unwrap();
    let first = analyze_golden(out.path());
    assert_eq!(code(&first), 0, "{}", String::from_utf8_lossy(&first.stderr));
    for name in ["report.json", "arc.csv", "frequencies.csv", "arc.svg", "emotions.svg", "wordcloud.svg"] {
        let got = std::fs::read(out.path().join("synthetic_play").join(name)).unwrap();
        let want = std::fs::read(fixture("golden/expected/synthetic_play").join(name)).unwrap();
        assert!(got == want, "{name} differs from golden");
    }
    assert!(out.path().join(".dramaturg-cache").read_dir().unwrap().count() == 1);
    let second = analyze_golden(out.path());
    assert_eq!(code(&second), 0);
    assert!(String::from_utf8_lossy(&second.stdout).contains("(cached)"));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["analyze"])), 1);
    let play = fixture("golden/synthetic_play.txt");
    assert_eq!(code(&run(&["analyze", s(&play), "--format", "pdf"])), 1);
    assert_eq!(code(&run(&["analyze", s(&play), "--scorer", "magic"])), 1);
    assert_eq!(code(&run(&["analyze", s(&play), "--window", "0"])), 1);
    assert_eq!(code(&run(&["compare", "only-one.json"])), 1);
    assert_eq!(code(&run(&["--version"])), 0);
}

#[test]
fn empty_play_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let play = dir.path().join("vide.txt");
    std::fs::write(&play, "\n\n").unwrap();
    let o = run(&["analyze", s(&play), "--out", s(&dir.path().join("out"))]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("segment"));
}

#[test]
fn unreachable_scorer_exits_3() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let dir = tempfile::tempdir().unwrap();
    let scorer = format!("external:tcp://127.0.0.1:{port}");
    let o = run(&[
        "analyze",
        s(&fixture("golden/synthetic_play.txt")),
        "--scorer",
        &scorer,
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&o), 3);
}

#[test]
fn external_subprocess_scorer_drives_the_arc() {
    let dir = tempfile::tempdir().unwrap();
    let scorer = format!("external:sh {}", s(&fixture("mock_scorer.sh")));
    let o = run(&[
        "analyze",
        s(&fixture("golden/synthetic_play.txt")),
        "--scorer",
        &scorer,
        "--out",
        s(dir.path()),
        "--format",
        "json",
        "--no-cache",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!dir.path().join(".dramaturg-cache").exists());
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("synthetic_play/report.json")).unwrap()).unwrap();
    let points = report["arc"]["points"].as_array().unwrap();
    assert_eq!(points.len(), 10);
    assert!(points.iter().all(|p| p["valence"].as_f64() == Some(0.9)));
    assert!(report["percentages"].is_null());
}

#[test]
fn compare_and_render_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let plays = [("riche", "Rue nuit chien coton champ heure main froid rue nuit."), ("pauvre", "Rue nuit rue nuit rue nuit rue nuit rue nuit.")];
    for (title, text) in plays {
        let p = dir.path().join(format!("{title}.txt"));
        std::fs::write(&p, text).unwrap();
        assert_eq!(code(&run(&["analyze", s(&p), "--out", s(&out)])), 0);
    }
    let a = out.join("riche/report.json");
    let b = out.join("pauvre/report.json");
    let o = run(&["compare", s(&b), s(&a)]);
    assert_eq!(code(&o), 0);
    let cmp: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(cmp["ttr_ranking"], serde_json::json!(["riche", "pauvre"]));

    let target = dir.path().join("cmp.json");
    assert_eq!(code(&run(&["compare", s(&a), s(&b), "--out", s(&target)])), 0);
    assert!(target.exists());

    std::fs::remove_file(out.join("riche/arc.svg")).unwrap();
    let o = run(&["render", s(&a)]);
    assert_eq!(code(&o), 0);
    assert!(out.join("riche/arc.svg").exists());

    let w = dir.path().join("w.txt");
    std::fs::write(&w, "Rue nuit.").unwrap();
    let out2 = dir.path().join("out2");
    assert_eq!(code(&run(&["analyze", s(&w), "--out", s(&out2), "--window", "5"])), 0);
    let o = run(&["compare", s(&a), s(&out2.join("w/report.json"))]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("window"));

    assert_eq!(code(&run(&["render", s(&dir.path().join("missing.json"))])), 2);
}
