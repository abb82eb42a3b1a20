//! Self-contained SVG figures. Output depends only on the input data:
//! coordinates are printed with two decimals and colors are fixed constants.

use std::fmt::Write;

use crate::analysis::{AccuracySurface, SimilarityCurves, SimilarityMatrix};
use crate::error::{Error, Result};
use crate::language::LanguageTag;

/// Color for -1 on the diverging scale.
pub const COLD_COLOR: (u8, u8, u8) = (0x3b, 0x4c, 0xc0);
/// Color for 0.
pub const MID_COLOR: (u8, u8, u8) = (0xf7, 0xf7, 0xf7);
/// Color for +1.
pub const WARM_COLOR: (u8, u8, u8) = (0xb4, 0x04, 0x26);

const CURVE_PALETTE: [&str; 16] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#393b79", "#637939", "#8c6d31", "#843c39", "#7b4173", "#3182bd",
];

const FONT: &str = "font-family=\"Helvetica, Arial, sans-serif\"";
const TEXT_COLOR: &str = "#222222";
const AXIS_COLOR: &str = "#444444";
const GRID_COLOR: &str = "#e5e5e5";
const EMBEDDING_BAND: &str = "#fff3cd";

fn hex((r, g, b): (u8, u8, u8)) -> String {
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn lerp(a: (u8, u8, u8), b: (u8, u8, u8), t: f64) -> (u8, u8, u8) {
    let mix = |x: u8, y: u8| (x as f64 + (y as f64 - x as f64) * t).round() as u8;
    (mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// Maps a value in [-1, 1] (clamped) to the cold-white-warm scale.
pub fn diverging_color(value: f64) -> String {
    let v = if value.is_nan() {
        0.0
    } else {
        value.clamp(-1.0, 1.0)
    };
    if v < 0.0 {
        hex(lerp(MID_COLOR, COLD_COLOR, -v))
    } else {
        hex(lerp(MID_COLOR, WARM_COLOR, v))
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn two_decimals(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn layer_caption(layer: usize) -> String {
    if layer == 0 {
        "layer 0 (embedding)".into()
    } else {
        format!("layer {layer}")
    }
}

/// k x k grid of colored cells with the value printed in each cell.
pub fn render_heatmap(matrix: &SimilarityMatrix) -> String {
    const CELL: f64 = 40.0;
    const LEFT: f64 = 90.0;
    const TOP: f64 = 70.0;
    const LEGEND_GAP: f64 = 30.0;
    const LEGEND_W: f64 = 16.0;
    let k = matrix.languages.len();
    let grid = CELL * k as f64;
    let width = LEFT + grid + LEGEND_GAP + LEGEND_W + 50.0;
    let height = TOP + grid + 40.0;

    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.2}" height="{height:.2}" viewBox="0 0 {width:.2} {height:.2}">"#
    );
    svg.push('\n');
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{width:.2}" height="{height:.2}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="24" text-anchor="middle" {FONT} font-size="15" fill="{TEXT_COLOR}">{} similarity of probe vectors, {}</text>"#,
        width / 2.0,
        matrix.metric,
        layer_caption(matrix.layer)
    );
    for (j, tag) in matrix.languages.iter().enumerate() {
        let x = LEFT + CELL * (j as f64 + 0.5);
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle" {FONT} font-size="11" fill="{TEXT_COLOR}">{}</text>"#,
            TOP - 8.0,
            escape(tag.code())
        );
    }
    for (i, tag) in matrix.languages.iter().enumerate() {
        let y = TOP + CELL * i as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" {FONT} font-size="11" fill="{TEXT_COLOR}">{}</text>"#,
            LEFT - 8.0,
            y + CELL / 2.0 + 4.0,
            escape(tag.code())
        );
        for (j, &v) in matrix.values[i].iter().enumerate() {
            let x = LEFT + CELL * j as f64;
            let _ = writeln!(
                svg,
                r#"<rect class="cell" x="{x:.2}" y="{y:.2}" width="{CELL:.2}" height="{CELL:.2}" fill="{}" stroke="white" stroke-width="1"/>"#,
                diverging_color(v)
            );
            let ink = if v.abs() > 0.6 { "white" } else { TEXT_COLOR };
            let _ = writeln!(
                svg,
                r#"<text class="value" x="{:.2}" y="{:.2}" text-anchor="middle" {FONT} font-size="10" fill="{ink}">{}</text>"#,
                x + CELL / 2.0,
                y + CELL / 2.0 + 3.5,
                two_decimals(v)
            );
        }
    }
    // Legend: 20 bands from +1 (top) to -1 (bottom).
    let lx = LEFT + grid + LEGEND_GAP;
    let bands = 20;
    let band_h = grid / bands as f64;
    for b in 0..bands {
        let v = 1.0 - 2.0 * (b as f64 + 0.5) / bands as f64;
        let _ = writeln!(
            svg,
            r#"<rect class="legend" x="{lx:.2}" y="{:.2}" width="{LEGEND_W:.2}" height="{band_h:.2}" fill="{}"/>"#,
            TOP + band_h * b as f64,
            diverging_color(v)
        );
    }
    for (label, frac) in [("1", 0.0), ("0", 0.5), ("-1", 1.0)] {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" {FONT} font-size="10" fill="{TEXT_COLOR}">{label}</text>"#,
            lx + LEGEND_W + 4.0,
            TOP + grid * frac + 4.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YRange {
    /// [0, 1]
    Accuracy,
    /// [-1, 1]
    Similarity,
}

impl YRange {
    fn bounds(self) -> (f64, f64) {
        match self {
            YRange::Accuracy => (0.0, 1.0),
            YRange::Similarity => (-1.0, 1.0),
        }
    }
}

/// One polyline per language over layer index.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveChart {
    pub title: String,
    pub y_label: String,
    pub y_range: YRange,
    pub layers: Vec<usize>,
    pub series: Vec<(LanguageTag, Vec<f64>)>,
}

impl CurveChart {
    pub fn from_surface(surface: &AccuracySurface) -> Self {
        let layers = surface.layers();
        let series = surface
            .languages()
            .into_iter()
            .map(|tag| {
                let curve = layers
                    .iter()
                    .map(|&l| surface.get(tag.code(), l).unwrap_or(f64::NAN))
                    .collect();
                (tag, curve)
            })
            .collect();
        let mut title = String::from("Layer-wise probing accuracy");
        if !surface.model_name.is_empty() {
            title = format!("{title} ({}, {})", surface.model_name, surface.dataset_name);
        }
        Self {
            title,
            y_label: "accuracy".into(),
            y_range: YRange::Accuracy,
            layers,
            series,
        }
    }

    pub fn from_similarity(curves: &SimilarityCurves) -> Self {
        Self {
            title: format!(
                "{} similarity of probe vectors with {}",
                curves.metric,
                curves.reference.display_name()
            ),
            y_label: format!("{} similarity", curves.metric),
            y_range: YRange::Similarity,
            layers: curves.layers.clone(),
            series: curves.curves.clone(),
        }
    }
}

/// Renders the chart. High-resource languages are solid, low-resource
/// dashed; the highlighted language (if any) is drawn thicker and last.
/// The embedding slot (layer 0) sits on a shaded band.
pub fn render_curves(chart: &CurveChart, highlight: Option<&LanguageTag>) -> Result<String> {
    if chart.series.is_empty() || chart.layers.is_empty() {
        return Err(Error::data("curve chart has no curves"));
    }
    if let Some((tag, _)) = chart
        .series
        .iter()
        .find(|(_, c)| c.len() != chart.layers.len())
    {
        return Err(Error::dim(format!(
            "curve for {tag} does not match the layer axis"
        )));
    }
    const WIDTH: f64 = 760.0;
    const HEIGHT: f64 = 440.0;
    const LEFT: f64 = 70.0;
    const RIGHT: f64 = 130.0;
    const TOP: f64 = 50.0;
    const BOTTOM: f64 = 60.0;
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let (y_min, y_max) = chart.y_range.bounds();
    let first = *chart.layers.first().unwrap() as f64;
    let last = *chart.layers.last().unwrap() as f64;
    let x_of = |layer: f64| {
        if last > first {
            LEFT + (layer - first) / (last - first) * plot_w
        } else {
            LEFT + plot_w / 2.0
        }
    };
    let y_of = |v: f64| TOP + (y_max - v.clamp(y_min, y_max)) / (y_max - y_min) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.2}" height="{HEIGHT:.2}" viewBox="0 0 {WIDTH:.2} {HEIGHT:.2}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{WIDTH:.2}" height="{HEIGHT:.2}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="26" text-anchor="middle" {FONT} font-size="15" fill="{TEXT_COLOR}">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(&chart.title)
    );
    if chart.layers.contains(&0) && last > first {
        let half_step = plot_w / (last - first) / 2.0;
        let x0 = x_of(0.0);
        let _ = writeln!(
            svg,
            r#"<rect class="embedding-slot" x="{:.2}" y="{TOP:.2}" width="{:.2}" height="{plot_h:.2}" fill="{EMBEDDING_BAND}"/>"#,
            x0, half_step
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" {FONT} font-size="9" fill="{AXIS_COLOR}">emb</text>"#,
            x0 + 2.0,
            TOP + 10.0
        );
    }
    let ticks = match chart.y_range {
        YRange::Accuracy => 5,
        YRange::Similarity => 4,
    };
    for t in 0..=ticks {
        let v = y_min + (y_max - y_min) * t as f64 / ticks as f64;
        let y = y_of(v);
        let _ = writeln!(
            svg,
            r#"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{GRID_COLOR}" stroke-width="1"/>"#,
            LEFT + plot_w
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" {FONT} font-size="11" fill="{TEXT_COLOR}">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            two_decimals(v)
        );
    }
    let _ = writeln!(
        svg,
        r#"<line x1="{LEFT:.2}" y1="{TOP:.2}" x2="{LEFT:.2}" y2="{:.2}" stroke="{AXIS_COLOR}" stroke-width="1.5"/>"#,
        TOP + plot_h
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{LEFT:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{AXIS_COLOR}" stroke-width="1.5"/>"#,
        TOP + plot_h,
        LEFT + plot_w,
        TOP + plot_h
    );
    let label_every = (chart.layers.len() / 12).max(1);
    for (i, &l) in chart.layers.iter().enumerate() {
        if i % label_every == 0 || i + 1 == chart.layers.len() {
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" {FONT} font-size="11" fill="{TEXT_COLOR}">{l}</text>"#,
                x_of(l as f64),
                TOP + plot_h + 16.0
            );
        }
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" {FONT} font-size="12" fill="{TEXT_COLOR}">layer</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 18.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.2}" text-anchor="middle" {FONT} font-size="12" fill="{TEXT_COLOR}" transform="rotate(-90 18 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(&chart.y_label)
    );

    let mut order: Vec<usize> = (0..chart.series.len()).collect();
    if let Some(h) = highlight {
        order.sort_by_key(|&i| chart.series[i].0.code() == h.code());
    }
    for &i in &order {
        let (tag, curve) = &chart.series[i];
        let color = CURVE_PALETTE[i % CURVE_PALETTE.len()];
        let points: Vec<String> = chart
            .layers
            .iter()
            .zip(curve)
            .filter(|(_, v)| v.is_finite())
            .map(|(&l, &v)| format!("{:.2},{:.2}", x_of(l as f64), y_of(v)))
            .collect();
        let emphasized = highlight.is_some_and(|h| h.code() == tag.code());
        let width = if emphasized { 3.0 } else { 1.5 };
        let (class, dash) = if tag.is_high_resource() {
            ("curve high", "")
        } else {
            ("curve low", r#" stroke-dasharray="6 4""#)
        };
        let _ = writeln!(
            svg,
            r#"<polyline class="{class}" data-language="{}" points="{}" fill="none" stroke="{color}" stroke-width="{width:.1}"{dash}/>"#,
            escape(tag.code()),
            points.join(" ")
        );
    }
    for (i, (tag, _)) in chart.series.iter().enumerate() {
        let color = CURVE_PALETTE[i % CURVE_PALETTE.len()];
        let y = TOP + 6.0 + 16.0 * i as f64;
        let x = LEFT + plot_w + 14.0;
        let dash = if tag.is_high_resource() {
            ""
        } else {
            r#" stroke-dasharray="6 4""#
        };
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="2"{dash}/>"#,
            x + 22.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" {FONT} font-size="11" fill="{TEXT_COLOR}">{}</text>"#,
            x + 28.0,
            y + 4.0,
            escape(tag.display_name())
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
