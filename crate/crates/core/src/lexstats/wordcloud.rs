use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{FrequencyTable, LexError};

pub const MIN_FONT_SIZE: f64 = 10.0;
pub const MAX_FONT_SIZE: f64 = 64.0;

// Rough glyph metrics for a proportional sans-serif face, in ems.
const GLYPH_WIDTH_EM: f64 = 0.6;
const LINE_HEIGHT_EM: f64 = 1.0;

// Archimedean spiral r = SPIRAL_PITCH * t, sampled every ANGLE_STEP radians.
const SPIRAL_PITCH: f64 = 1.5;
const ANGLE_STEP: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Canvas {
    pub width: f64,
    pub height: f64,
}

impl Default for Canvas {
    fn default() -> Self {
        Self {
            width: 800.0,
            height: 400.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl BoundingBox {
    fn centered(cx: f64, cy: f64, w: f64, h: f64) -> Self {
        Self {
            x0: cx - w / 2.0,
            y0: cy - h / 2.0,
            x1: cx + w / 2.0,
            y1: cy + h / 2.0,
        }
    }

    /// True when the interiors overlap; shared edges do not count.
    pub fn intersects(&self, other: &BoundingBox) -> bool {
        self.x0 < other.x1 && other.x0 < self.x1 && self.y0 < other.y1 && other.y0 < self.y1
    }

    fn within(&self, canvas: &Canvas) -> bool {
        self.x0 >= 0.0 && self.y0 >= 0.0 && self.x1 <= canvas.width && self.y1 <= canvas.height
    }
}

/// A placed term. `x`/`y` is the center of its box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloudItem {
    pub term: String,
    pub weight: f64,
    pub font_size: f64,
    pub x: f64,
    pub y: f64,
    pub bbox: BoundingBox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordCloudSpec {
    pub canvas: Canvas,
    pub seed: u64,
    pub items: Vec<CloudItem>,
    /// Terms that found no free spot, in table order.
    pub omitted: Vec<String>,
}

fn font_size(weight: f64) -> f64 {
    MIN_FONT_SIZE + (MAX_FONT_SIZE - MIN_FONT_SIZE) * weight
}

fn extents(term: &str, size: f64) -> (f64, f64) {
    let chars = term.chars().count() as f64;
    (round2(chars * GLYPH_WIDTH_EM * size), round2(LINE_HEIGHT_EM * size))
}

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

/// Greedy spiral placement from the canvas center, heaviest term first.
///
/// The seed only rotates each term's starting angle, so the heaviest term
/// always lands on the center.
pub fn wordcloud_layout(
    table: &FrequencyTable,
    canvas: Canvas,
    seed: u64,
) -> Result<WordCloudSpec, LexError> {
    if !(canvas.width > 0.0 && canvas.height > 0.0) {
        return Err(LexError::BadCanvas {
            width: canvas.width,
            height: canvas.height,
        });
    }
    let max_count = table
        .entries
        .iter()
        .map(|(_, c)| *c)
        .max()
        .ok_or(LexError::EmptyTable)?;

    let mut order: Vec<&(String, u64)> = table.entries.iter().collect();
    order.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (cx, cy) = (canvas.width / 2.0, canvas.height / 2.0);
    let max_radius = cx.hypot(cy);
    let aspect = canvas.width / canvas.height;

    let mut items: Vec<CloudItem> = Vec::new();
    let mut omitted = Vec::new();
    for (rank, (term, count)) in order.into_iter().enumerate() {
        let weight = *count as f64 / max_count as f64;
        let size = font_size(weight);
        let (w, h) = extents(term, size);
        let phase = rng.gen::<f64>() * TAU;

        let mut placed = None;
        let mut t = 0.0;
        while SPIRAL_PITCH * t <= max_radius {
            let r = SPIRAL_PITCH * t;
            let angle = phase + t;
            let x = round2(cx + r * angle.cos() * aspect.sqrt());
            let y = round2(cy + r * angle.sin() / aspect.sqrt());
            let bbox = BoundingBox::centered(x, y, w, h);
            if bbox.within(&canvas) && !items.iter().any(|it| it.bbox.intersects(&bbox)) {
                placed = Some((x, y, bbox));
                break;
            }
            t += ANGLE_STEP;
        }

        match placed {
            Some((x, y, bbox)) => items.push(CloudItem {
                term: term.clone(),
                weight,
                font_size: size,
                x,
                y,
                bbox,
            }),
            None if rank == 0 => {
                return Err(LexError::CanvasExhausted { term: term.clone() });
            }
            None => omitted.push(term.clone()),
        }
    }
    Ok(WordCloudSpec {
        canvas,
        seed,
        items,
        omitted,
    })
}
