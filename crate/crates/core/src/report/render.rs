use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use super::PlayReport;
use crate::affect::{Emotion, EmotionProfile};
use crate::lexstats::{wordcloud_layout, Canvas, LexError, WordCloudSpec};

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("cannot write {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("word cloud: {0}")]
    WordCloud(#[from] LexError),
    #[error("unknown output format `{0}` (expected json, csv or svg)")]
    UnknownFormat(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OutputFormat {
    Json,
    Csv,
    Svg,
}

impl FromStr for OutputFormat {
    type Err = RenderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "svg" => Ok(OutputFormat::Svg),
            other => Err(RenderError::UnknownFormat(other.to_owned())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    pub cloud_canvas: Canvas,
    pub cloud_seed: u64,
    pub chart_width: f64,
    pub chart_height: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            cloud_canvas: Canvas::default(),
            cloud_seed: 42,
            chart_width: 800.0,
            chart_height: 400.0,
        }
    }
}

const MARGIN: f64 = 50.0;
const VALENCE_COLOR: &str = "#222222";

fn emotion_color(e: Emotion) -> &'static str {
    match e {
        Emotion::Sadness => "#4c72b0",
        Emotion::Joy => "#dd8452",
        Emotion::Love => "#c44e9b",
        Emotion::Anger => "#c44e52",
        Emotion::Fear => "#8172b3",
        Emotion::Surprise => "#55a868",
    }
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn svg_open(out: &mut String, w: f64, h: f64) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r##"<rect width="{w:.0}" height="{h:.0}" fill="#ffffff"/>"##);
}

fn polyline(out: &mut String, points: &[(f64, f64)], color: &str, class: &str) {
    let coords: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let _ = writeln!(
        out,
        r#"<polyline class="{class}" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
        coords.join(" ")
    );
}

/// Line chart of valence and emotion scores per stage minute.
pub fn arc_svg(report: &PlayReport, opts: &RenderOptions) -> String {
    let (w, h) = (opts.chart_width, opts.chart_height);
    let (plot_w, plot_h) = (w - 2.0 * MARGIN, h - 2.0 * MARGIN);
    let n = report.arc.points.len();
    let x_of = |i: usize| {
        if n <= 1 {
            MARGIN + plot_w / 2.0
        } else {
            MARGIN + plot_w * i as f64 / (n - 1) as f64
        }
    };
    let y_of = |v: f64| MARGIN + (1.0 - v) * plot_h;

    let mut out = String::new();
    svg_open(&mut out, w, h);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="16">{}</text>"#,
        w / 2.0,
        xml_escape(&report.title)
    );
    let _ = writeln!(
        out,
        r##"<g class="axes" stroke="#888888" stroke-width="1"><line x1="{m:.2}" y1="{b:.2}" x2="{r:.2}" y2="{b:.2}"/><line x1="{m:.2}" y1="{m:.2}" x2="{m:.2}" y2="{b:.2}"/></g>"##,
        m = MARGIN,
        b = MARGIN + plot_h,
        r = MARGIN + plot_w
    );
    for tick in [0.0, 0.5, 1.0] {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-size="10">{tick:.1}</text>"#,
            MARGIN - 6.0,
            y_of(tick) + 3.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="11">stage minute</text>"#,
        MARGIN + plot_w / 2.0,
        h - 12.0
    );

    let valence: Vec<(f64, f64)> = report
        .arc
        .points
        .iter()
        .filter_map(|p| p.valence.map(|v| (x_of(p.segment_index), y_of(v.value()))))
        .collect();
    if !valence.is_empty() {
        polyline(&mut out, &valence, VALENCE_COLOR, "valence");
    }
    for e in Emotion::ALL {
        let series: Vec<(f64, f64)> = report
            .arc
            .points
            .iter()
            .filter_map(|p| {
                p.emotions
                    .as_ref()
                    .map(|prof: &EmotionProfile| (x_of(p.segment_index), y_of(prof.scores.get(e))))
            })
            .collect();
        if !series.is_empty() {
            polyline(&mut out, &series, emotion_color(e), e.label());
        }
    }

    let mut legend: Vec<(&str, &str)> = Vec::new();
    if !valence.is_empty() {
        legend.push(("valence", VALENCE_COLOR));
    }
    if report.arc.points.iter().any(|p| p.emotions.is_some()) {
        legend.extend(Emotion::ALL.iter().map(|e| (e.label(), emotion_color(*e))));
    }
    for (i, (label, color)) in legend.iter().enumerate() {
        let x = MARGIN + 8.0 + 90.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{x:.2}" y="34" width="10" height="10" fill="{color}"/><text x="{:.2}" y="43" font-size="10">{label}</text>"#,
            x + 14.0
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Single stacked bar of emotion percentages.
pub fn emotions_svg(report: &PlayReport, opts: &RenderOptions) -> String {
    let w = opts.chart_width;
    let h = 160.0;
    let bar_w = w - 2.0 * MARGIN;
    let mut out = String::new();
    svg_open(&mut out, w, h);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="16">{}</text>"#,
        w / 2.0,
        xml_escape(&report.title)
    );
    match &report.percentages {
        Some(pct) => {
            let mut x = MARGIN;
            for (e, p) in pct.iter() {
                let seg = bar_w * p / 100.0;
                if seg > 0.0 {
                    let _ = writeln!(
                        out,
                        r#"<rect class="{label}" x="{x:.2}" y="50" width="{seg:.2}" height="40" fill="{color}"><title>{label} {p:.1}%</title></rect>"#,
                        label = e.label(),
                        color = emotion_color(e)
                    );
                }
                x += seg;
            }
            for (i, (e, p)) in pct.iter().enumerate() {
                let lx = MARGIN + 120.0 * i as f64;
                let _ = writeln!(
                    out,
                    r#"<rect x="{lx:.2}" y="110" width="10" height="10" fill="{}"/><text x="{:.2}" y="119" font-size="11">{} {p:.1}%</text>"#,
                    emotion_color(e),
                    lx + 14.0,
                    e.label()
                );
            }
        }
        None => {
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="75" text-anchor="middle" font-size="12">no emotional signal</text>"#,
                w / 2.0
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

pub fn wordcloud_svg(spec: &WordCloudSpec) -> String {
    let mut out = String::new();
    svg_open(&mut out, spec.canvas.width, spec.canvas.height);
    for (i, item) in spec.items.iter().enumerate() {
        let color = emotion_color(Emotion::ALL[i % Emotion::ALL.len()]);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="{:.2}" text-anchor="middle" dominant-baseline="central" fill="{color}">{}</text>"#,
            item.x,
            item.y,
            item.font_size,
            xml_escape(&item.term)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn empty_cloud(canvas: Canvas) -> String {
    let mut out = String::new();
    svg_open(&mut out, canvas.width, canvas.height);
    out.push_str("</svg>\n");
    out
}

/// File-system-safe directory name for a play title.
pub(crate) fn title_dir(title: &str) -> String {
    let cleaned: String = title
        .chars()
        .map(|c| if c.is_alphanumeric() || matches!(c, '-' | '_' | '.' | ' ') { c } else { '_' })
        .collect();
    let cleaned = cleaned.trim().trim_start_matches('.');
    if cleaned.is_empty() {
        "untitled".into()
    } else {
        cleaned.to_owned()
    }
}

/// Writes the requested formats under `<out_dir>/<title>/` and returns the
/// paths written.
pub fn render(
    report: &PlayReport,
    formats: &[OutputFormat],
    out_dir: &Path,
    opts: &RenderOptions,
) -> Result<Vec<PathBuf>, RenderError> {
    let dir = out_dir.join(title_dir(&report.title));
    std::fs::create_dir_all(&dir).map_err(|e| RenderError::Io {
        path: dir.clone(),
        message: e.to_string(),
    })?;
    let mut files: Vec<(&str, String)> = Vec::new();
    let mut formats = formats.to_vec();
    formats.sort();
    formats.dedup();
    for f in formats {
        match f {
            OutputFormat::Json => files.push(("report.json", report.to_json())),
            OutputFormat::Csv => {
                files.push(("arc.csv", report.arc.to_csv()));
                files.push(("frequencies.csv", report.lexical.frequencies.to_csv()));
            }
            OutputFormat::Svg => {
                files.push(("arc.svg", arc_svg(report, opts)));
                files.push(("emotions.svg", emotions_svg(report, opts)));
                let cloud = if report.lexical.frequencies.is_empty() {
                    empty_cloud(opts.cloud_canvas)
                } else {
                    wordcloud_svg(&wordcloud_layout(
                        &report.lexical.frequencies,
                        opts.cloud_canvas,
                        opts.cloud_seed,
                    )?)
                };
                files.push(("wordcloud.svg", cloud));
            }
        }
    }
    let mut written = Vec::new();
    for (name, content) in files {
        let path = dir.join(name);
        std::fs::write(&path, content).map_err(|e| RenderError::Io {
            path: path.clone(),
            message: e.to_string(),
        })?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn titles_become_safe_dirs() {
        assert_eq!(title_dir("La Nuit/Juste"), "La Nuit_Juste");
        assert_eq!(title_dir("../x"), "_x");
        assert_eq!(title_dir(""), "untitled");
    }

    #[test]
    fn formats_parse() {
        assert_eq!("SVG".parse::<OutputFormat>().unwrap(), OutputFormat::Svg);
        assert!("pdf".parse::<OutputFormat>().is_err());
    }

    #[test]
    fn escapes_markup() {
        assert_eq!(xml_escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    }
}
