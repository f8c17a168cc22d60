use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dramaturg::affect::{ArcScorers, EmotionScorer, SentimentScorer};
use dramaturg::bridge::{BridgeConfig, ExternalScorer, Task};
use dramaturg::report::{
    compare_plays, render, to_canonical_json, AnalysisConfig, Analyzer, CacheStatus, OutputFormat,
    PlayReport, RenderOptions, CACHE_DIR,
};

const EXIT_USAGE: u8 = 1;
const EXIT_ANALYSIS: u8 = 2;
const EXIT_SCORER: u8 = 3;

#[derive(Parser)]
#[command(name = "dramaturg", version, about = "Lexical and affect analysis of play texts in stage minutes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one or more plays and write reports
    Analyze(AnalyzeArgs),
    /// Rank previously written reports against each other
    Compare(CompareArgs),
    /// Re-render a report.json
    Render(RenderArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Plain-text UTF-8 play files
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// JSON analysis config
    #[arg(long, env = "DRAMATURG_CONFIG")]
    config: Option<PathBuf>,
    /// `lexicon` or `external:<command line | host:port | http://… | tcp://…>`
    #[arg(long, default_value = "lexicon")]
    scorer: String,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Comma-separated output formats
    #[arg(long, default_value = "json,csv,svg", value_delimiter = ',')]
    format: Vec<String>,
    #[arg(long)]
    top_n: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    /// Skip the results cache
    #[arg(long)]
    no_cache: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// report.json files from `analyze`
    #[arg(required = true, num_args = 2..)]
    reports: Vec<PathBuf>,
    /// Write the comparison here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    report: PathBuf,
    #[arg(long, default_value = "svg", value_delimiter = ',')]
    format: Vec<String>,
    /// Output root; defaults to the directory above the report's folder
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Self { code: EXIT_USAGE, message: message.to_string() }
    }

    fn analysis(message: impl ToString) -> Self {
        Self { code: EXIT_ANALYSIS, message: message.to_string() }
    }

    fn scorer(message: impl ToString) -> Self {
        Self { code: EXIT_SCORER, message: message.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Analyze(args) => analyze(args),
        Command::Compare(args) => compare(args),
        Command::Render(args) => rerender(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn parse_formats(raw: &[String]) -> Result<Vec<OutputFormat>, Failure> {
    raw.iter().map(|f| f.parse().map_err(Failure::usage)).collect()
}

fn analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    let formats = parse_formats(&args.format)?;
    let mut config = match &args.config {
        Some(path) => AnalysisConfig::from_path(path).map_err(Failure::usage)?,
        None => AnalysisConfig::default(),
    };
    if let Some(n) = args.top_n {
        config.top_n = n;
    }
    if let Some(w) = args.window {
        config.window = w;
    }
    let settings = config.resolve().map_err(Failure::usage)?;

    let lexicons;
    let external;
    let scorers = match args.scorer.as_str() {
        "lexicon" => {
            lexicons = config.lexicon_scorers().map_err(Failure::usage)?;
            ArcScorers {
                sentiment: Some(&lexicons.0 as &dyn SentimentScorer),
                emotion: Some(&lexicons.1 as &dyn EmotionScorer),
            }
        }
        other => {
            let Some(endpoint) = other.strip_prefix("external:") else {
                return Err(Failure::usage(format!(
                    "unknown scorer `{other}` (expected `lexicon` or `external:<endpoint>`)"
                )));
            };
            external = ExternalScorer::open(endpoint, BridgeConfig::default())
                .map_err(Failure::scorer)?
                .with_granularity(config.granularity);
            ArcScorers {
                sentiment: external
                    .supports(Task::Sentiment)
                    .then_some(&external as &dyn SentimentScorer),
                emotion: external
                    .supports(Task::Emotion)
                    .then_some(&external as &dyn EmotionScorer),
            }
        }
    };

    let mut analyzer = Analyzer::new(settings, scorers);
    if !args.no_cache {
        analyzer = analyzer.with_cache(args.out.join(CACHE_DIR));
    }
    let opts = RenderOptions::default();
    let mut worst: Option<Failure> = None;
    for (path, outcome) in args.files.iter().zip(analyzer.analyze_many(&args.files)) {
        let (report, status) = match outcome {
            Ok(ok) => ok,
            Err(e) => {
                let f = if e.is_scorer_failure() { Failure::scorer(&e) } else { Failure::analysis(&e) };
                eprintln!("error: {}", f.message);
                if worst.as_ref().is_none_or(|w| f.code > w.code) {
                    worst = Some(f);
                }
                continue;
            }
        };
        let written = render(&report, &formats, &args.out, &opts).map_err(Failure::analysis)?;
        let note = match status {
            CacheStatus::Hit => " (cached)",
            _ => "",
        };
        println!(
            "{}: ttr {:.4}, {} segments -> {}{note}",
            path.display(),
            report.lexical.summary.ttr,
            report.arc.points.len(),
            written.first().and_then(|p| p.parent()).unwrap_or(Path::new(".")).display()
        );
    }
    match worst {
        Some(f) => Err(Failure { message: "one or more plays failed".into(), ..f }),
        None => Ok(()),
    }
}

fn compare(args: CompareArgs) -> Result<(), Failure> {
    let reports = args
        .reports
        .iter()
        .map(|p| PlayReport::load(p).map_err(Failure::analysis))
        .collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&PlayReport> = reports.iter().collect();
    let comparison = compare_plays(&refs).map_err(Failure::analysis)?;
    let json = to_canonical_json(&comparison).map_err(Failure::analysis)?;
    match args.out {
        Some(path) => std::fs::write(&path, json)
            .map_err(|e| Failure::analysis(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn rerender(args: RenderArgs) -> Result<(), Failure> {
    let formats = parse_formats(&args.format)?;
    let report = PlayReport::load(&args.report).map_err(Failure::analysis)?;
    let out = args.out.unwrap_or_else(|| {
        args.report
            .parent()
            .and_then(Path::parent)
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."))
    });
    for path in render(&report, &formats, &out, &RenderOptions::default()).map_err(Failure::analysis)? {
        println!("{}", path.display());
    }
    Ok(())
}
