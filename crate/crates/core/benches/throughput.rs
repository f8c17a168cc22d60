use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dramaturg::affect::{build_arc_with, ArcScorers};
use dramaturg::corpus::{segment_tokens, RawDocument, TokenizedPlay};
use dramaturg::report::{AnalysisConfig, Analyzer};
use dramaturg::Execution;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn modes() -> Vec<(&'static str, Execution)> {
    let mut m = vec![("sequential", Execution::Sequential)];
    if cfg!(feature = "parallel") {
        m.push(("parallel", Execution::Parallel));
    }
    m
}

fn arc(c: &mut Criterion) {
    let cfg = AnalysisConfig::default();
    let settings = cfg.resolve().unwrap();
    let (s, e) = cfg.lexicon_scorers().unwrap();
    let text = std::fs::read_to_string(fixture("golden/synthetic_play.txt")).unwrap().repeat(20);
    let doc = RawDocument::new("bench", text, "bench.txt").unwrap();
    let play = TokenizedPlay::build(&doc, &settings.cleaner, &settings.stoplist);
    let segments = segment_tokens(&play, &settings.segmentation);
    let scorers = ArcScorers { sentiment: Some(&s), emotion: Some(&e) };

    let mut group = c.benchmark_group("build_arc");
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| build_arc_with(&play, &segments, 150, scorers, exec).unwrap())
        });
    }
    group.finish();
}

fn batch(c: &mut Criterion) {
    let cfg = AnalysisConfig::default();
    let (s, e) = cfg.lexicon_scorers().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("golden/synthetic_play.txt")).unwrap().repeat(4);
    let paths: Vec<PathBuf> = (0..8)
        .map(|i| {
            let p = dir.path().join(format!("play{i}.txt"));
            std::fs::write(&p, format!("{text}\nVariante {i}.")).unwrap();
            p
        })
        .collect();

    let mut group = c.benchmark_group("analyze_many");
    for (name, exec) in modes() {
        let analyzer = Analyzer::new(cfg.resolve().unwrap(), ArcScorers { sentiment: Some(&s), emotion: Some(&e) })
            .with_execution(exec);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| analyzer.analyze_many(&paths))
        });
    }
    group.finish();
}

criterion_group!(benches, arc, batch);
criterion_main!(benches);
