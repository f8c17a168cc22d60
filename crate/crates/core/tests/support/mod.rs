//! Shared test harness: random corpora, brute-force oracles and a
//! fault-injecting scorer server.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::io::{BufRead, BufReader, Write};
use std::net::{Shutdown, TcpListener, TcpStream};
use std::path::PathBuf;
use std::thread::{self, JoinHandle};

use dramaturg::corpus::{tokenize, Stoplist, Token};
use dramaturg::lexstats::CountingPolicy;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

const VOCAB: &[&str] = &[
    "homme", "désir", "heure", "animal", "temps", "point", "vous", "regard", "main", "froid",
    "nuit", "chambre", "rue", "femme", "monsieur", "chien", "de", "la", "le", "et", "je", "l'",
    "qu'", "d'", "Homme", "NUIT", "Désir", "lumière", "coton", "champ",
];
const PUNCT: &[&str] = &[",", ".", "!", "?", ";", ":", "…", "«", "»"];

/// Random French-looking text of `words` words with interleaved punctuation
/// and occasional clitics glued to the next word.
pub fn random_text(rng: &mut StdRng, words: usize) -> String {
    let mut out = String::new();
    let mut glue = false;
    for _ in 0..words {
        let w = if rng.gen_bool(0.7) {
            VOCAB.choose(rng).unwrap().to_string()
        } else {
            // Long tail of synthetic types.
            let n = rng.gen_range(0..400u32);
            let letters: String = n.to_string().chars().map(|c| (b'a' + c as u8 - b'0') as char).collect();
            format!("mot{letters}")
        };
        if !glue && !out.is_empty() {
            out.push(' ');
        }
        glue = w.ends_with('\'');
        out.push_str(&w);
        if !glue && rng.gen_bool(0.15) {
            if rng.gen_bool(0.5) {
                out.push(' ');
            }
            out.push_str(PUNCT.choose(rng).unwrap());
        }
    }
    out
}

pub fn random_tokens(seed: u64, words: usize, stop: &Stoplist) -> Vec<Token> {
    let mut rng = StdRng::seed_from_u64(seed);
    tokenize(&random_text(&mut rng, words), stop)
}

/// Type-token ratio by sorting and deduplicating a plain list of forms.
pub fn naive_ttr(tokens: &[Token], policy: CountingPolicy) -> Option<(usize, usize, f64)> {
    let mut forms: Vec<String> = tokens
        .iter()
        .filter(|t| match policy {
            CountingPolicy::AlphaAll => t.is_alpha,
            CountingPolicy::AlphaNonstop => t.is_alpha && !t.is_stopword,
        })
        .map(|t| t.surface.to_lowercase().replace('’', "'"))
        .collect();
    let n = forms.len();
    if n == 0 {
        return None;
    }
    forms.sort();
    forms.dedup();
    Some((n, forms.len(), forms.len() as f64 / n as f64))
}

/// Frequency table by run-length counting a sorted list and repeated max
/// selection.
pub fn naive_frequencies(tokens: &[Token], stop: &BTreeSet<String>, top_n: usize) -> Vec<(String, u64)> {
    let forms: Vec<String> = tokens
        .iter()
        .filter(|t| t.is_alpha)
        .map(|t| t.surface.to_lowercase().replace('’', "'"))
        .filter(|f| !stop.contains(f))
        .collect();
    let mut sorted = forms;
    sorted.sort();
    let mut remaining: Vec<(String, u64)> = Vec::new();
    for f in sorted {
        match remaining.last_mut() {
            Some((t, c)) if *t == f => *c += 1,
            _ => remaining.push((f, 1)),
        }
    }
    let mut out = Vec::new();
    while out.len() < top_n && !remaining.is_empty() {
        let mut best = 0;
        for i in 1..remaining.len() {
            let (ref t, c) = remaining[i];
            let (ref bt, bc) = remaining[best];
            if c > bc || (c == bc && t < bt) {
                best = i;
            }
        }
        out.push(remaining.remove(best));
    }
    out
}

#[derive(Clone, Debug)]
pub enum ReplyOrder {
    InOrder,
    Reversed,
    Shuffled(u64),
}

/// Behaviour of the mock scorer server.
#[derive(Clone, Debug)]
pub struct MockBehavior {
    pub version: u32,
    pub capabilities: Vec<&'static str>,
    pub model: &'static str,
    /// Requests collected before any reply is sent.
    pub hold: usize,
    pub order: ReplyOrder,
    /// Ids answered with an error line instead of a payload.
    pub fail_ids: BTreeSet<u64>,
    /// Close the connection after this many replies.
    pub drop_after: Option<usize>,
    /// Ids that never get an answer.
    pub silent_ids: BTreeSet<u64>,
    /// Fixed valence; otherwise `(id % 10) / 10`.
    pub valence: Option<f64>,
    /// Emit a garbage line before the first reply.
    pub garble_first: bool,
}

impl Default for MockBehavior {
    fn default() -> Self {
        Self {
            version: 1,
            capabilities: vec!["sentiment", "emotion"],
            model: "mock",
            hold: 1,
            order: ReplyOrder::InOrder,
            fail_ids: BTreeSet::new(),
            drop_after: None,
            silent_ids: BTreeSet::new(),
            valence: None,
            garble_first: false,
        }
    }
}

pub fn mock_valence(id: u64) -> f64 {
    (id % 10) as f64 / 10.0
}

pub fn mock_emotion_label(id: u64) -> usize {
    (id % 6) as usize
}

const LABELS: [&str; 6] = ["sadness", "joy", "love", "anger", "fear", "surprise"];

fn reply(b: &MockBehavior, line: &str) -> String {
    let v: serde_json::Value = match serde_json::from_str(line) {
        Ok(v) => v,
        Err(_) => return r#"{"id":-1,"error":"malformed request"}"#.into(),
    };
    let id = v["id"].as_u64().unwrap();
    if b.fail_ids.contains(&id) {
        return format!(r#"{{"id":{id},"error":"model exploded on {id}"}}"#);
    }
    match v["task"].as_str().unwrap() {
        "sentiment" => format!(
            r#"{{"id":{id},"valence":{}}}"#,
            b.valence.unwrap_or_else(|| mock_valence(id))
        ),
        _ => {
            let scores: Vec<String> = LABELS
                .iter()
                .enumerate()
                .map(|(i, l)| format!(r#""{l}":{}"#, if i == mock_emotion_label(id) { 1.0 } else { 0.0 }))
                .collect();
            format!(r#"{{"id":{id},"scores":{{{}}}}}"#, scores.join(","))
        }
    }
}

fn serve(stream: TcpStream, b: MockBehavior) {
    let mut writer = stream.try_clone().unwrap();
    let mut lines = BufReader::new(stream.try_clone().unwrap()).lines();
    let Some(Ok(hello)) = lines.next() else { return };
    assert_eq!(hello, r#"{"v":1,"hello":true}"#);
    let caps: Vec<String> = b.capabilities.iter().map(|c| format!("\"{c}\"")).collect();
    writeln!(writer, r#"{{"v":{},"capabilities":[{}],"model":"{}"}}"#, b.version, caps.join(","), b.model).unwrap();

    let mut rng = StdRng::seed_from_u64(match b.order {
        ReplyOrder::Shuffled(s) => s,
        _ => 0,
    });
    let mut held: Vec<(u64, String)> = Vec::new();
    let mut sent = 0usize;
    let mut garble = b.garble_first;
    for line in lines {
        let Ok(line) = line else { break };
        let id = serde_json::from_str::<serde_json::Value>(&line)
            .ok()
            .and_then(|v| v["id"].as_u64())
            .unwrap_or(u64::MAX);
        held.push((id, reply(&b, &line)));
        if held.len() < b.hold {
            continue;
        }
        match b.order {
            ReplyOrder::InOrder => {}
            ReplyOrder::Reversed => held.reverse(),
            ReplyOrder::Shuffled(_) => held.shuffle(&mut rng),
        }
        for (id, r) in held.drain(..) {
            if b.silent_ids.contains(&id) {
                continue;
            }
            if b.drop_after == Some(sent) {
                let _ = stream.shutdown(Shutdown::Both);
                return;
            }
            if garble {
                writeln!(writer, "this is not json").unwrap();
                garble = false;
            }
            writeln!(writer, "{r}").unwrap();
            sent += 1;
        }
        writer.flush().unwrap();
    }
}

/// Starts a one-connection mock server; returns its `tcp://` endpoint.
pub fn spawn_mock(b: MockBehavior) -> (String, JoinHandle<()>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let handle = thread::spawn(move || {
        if let Ok((stream, _)) = listener.accept() {
            serve(stream, b);
        }
    });
    (format!("tcp://{addr}"), handle)
}

/// Outputs of the golden pipeline, as (file name, content) pairs.
pub const GOLDEN_FILES: [&str; 6] =
    ["report.json", "arc.csv", "frequencies.csv", "arc.svg", "emotions.svg", "wordcloud.svg"];

pub fn golden_config() -> dramaturg::report::AnalysisConfig {
    dramaturg::report::AnalysisConfig::from_path(&fixture("golden/config.json")).unwrap()
}

/// Runs the bundled synthetic play through analysis and rendering into
/// `out`, returning the report.
pub fn run_golden_pipeline(out: &std::path::Path) -> dramaturg::report::PlayReport {
    use dramaturg::affect::ArcScorers;
    use dramaturg::report::{render, Analyzer, OutputFormat, RenderOptions};
    let cfg = golden_config();
    let (s, e) = cfg.lexicon_scorers().unwrap();
    let analyzer = Analyzer::new(cfg.resolve().unwrap(), ArcScorers { sentiment: Some(&s), emotion: Some(&e) });
    let (report, _) = analyzer.analyze_file(&fixture("golden/synthetic_play.txt")).unwrap();
    render(&report, &[OutputFormat::Json, OutputFormat::Csv, OutputFormat::Svg], out, &RenderOptions::default())
        .unwrap();
    report
}

/// Byte comparison of rendered outputs against the checked-in goldens.
/// With `UPDATE_GOLDENS=1` the goldens are rewritten instead.
pub fn golden_mismatches(out: &std::path::Path) -> Vec<String> {
    let expected_dir = fixture("golden/expected/synthetic_play");
    let got_dir = out.join("synthetic_play");
    let update = std::env::var_os("UPDATE_GOLDENS").is_some();
    if update {
        std::fs::create_dir_all(&expected_dir).unwrap();
    }
    let mut bad = Vec::new();
    for name in GOLDEN_FILES {
        let got = std::fs::read(got_dir.join(name)).unwrap();
        if update {
            std::fs::write(expected_dir.join(name), &got).unwrap();
            continue;
        }
        if std::fs::read(expected_dir.join(name)).ok().as_deref() != Some(&got[..]) {
            bad.push(name.to_owned());
        }
    }
    bad
}

/// Three plays of ten words whose type-token ratios are 0.8, 0.5 and 0.3,
/// keyed by title.
pub const TTR_PLAYS: [(&str, &str, f64); 3] = [
    ("gamma", "Rue nuit chien coton champ rue nuit chien coton champ.", 0.5),
    ("alpha", "Rue nuit chien rue nuit chien rue nuit chien rue.", 0.3),
    ("beta", "Rue nuit chien coton champ heure main froid rue nuit.", 0.8),
];
