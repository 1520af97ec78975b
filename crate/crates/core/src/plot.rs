//! Minimal SVG emission: line charts for MSE/dispersion curves and heatmap
//! renderings of 2D maps. No styling dependencies, deterministic output.

use std::fmt::Write as _;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// One polyline on a chart.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Optional symmetric band half-width per point (e.g. std dev).
    pub band: Option<Vec<f64>>,
    pub dashed: bool,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points, band: None, dashed: false }
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }

    pub fn with_band(mut self, band: Vec<f64>) -> Self {
        self.band = Some(band);
        self
    }
}

#[derive(Debug, Clone)]
pub struct ChartLabels {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
}

fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    if !(hi > lo) {
        return vec![lo];
    }
    let raw = (hi - lo) / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    } * mag;
    let first = (lo / step).ceil() * step;
    let mut ticks = Vec::new();
    let mut t = first;
    while t <= hi + step * 1e-9 {
        ticks.push(t);
        t += step;
    }
    ticks
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if a >= 1000.0 || a < 0.01 {
        format!("{v:.1e}")
    } else if a >= 10.0 {
        format!("{v:.0}")
    } else if a >= 1.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.2}")
    }
}

/// Renders series as an SVG line chart with axes, ticks and a legend.
pub fn line_chart(labels: &ChartLabels, series: &[Series]) -> String {
    let width = 760.0;
    let height = 520.0;
    let ml = 70.0;
    let mr = 20.0;
    let mt = 40.0;
    let mb = 60.0;
    let pw = width - ml - mr;
    let ph = height - mt - mb;

    let mut x_lo = f64::INFINITY;
    let mut x_hi = f64::NEG_INFINITY;
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for s in series {
        for (i, &(x, y)) in s.points.iter().enumerate() {
            let b = s.band.as_ref().map_or(0.0, |b| b[i]);
            x_lo = x_lo.min(x);
            x_hi = x_hi.max(x);
            y_lo = y_lo.min(y - b);
            y_hi = y_hi.max(y + b);
        }
    }
    if !x_lo.is_finite() {
        x_lo = 0.0;
        x_hi = 1.0;
        y_lo = 0.0;
        y_hi = 1.0;
    }
    if x_hi == x_lo {
        x_hi = x_lo + 1.0;
    }
    if y_hi == y_lo {
        y_hi = y_lo + 1.0;
    }
    let y_pad = 0.05 * (y_hi - y_lo);
    y_lo -= y_pad;
    y_hi += y_pad;

    let sx = move |x: f64| ml + (x - x_lo) / (x_hi - x_lo) * pw;
    let sy = move |y: f64| mt + (y_hi - y) / (y_hi - y_lo) * ph;

    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = write!(svg, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = write!(
        svg,
        r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        ml + pw / 2.0,
        xml_escape(&labels.title)
    );

    for t in nice_ticks(x_lo, x_hi, 8) {
        let x = sx(t);
        let _ = write!(
            svg,
            r##"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="#ddd"/>"##,
            mt,
            mt + ph
        );
        let _ = write!(
            svg,
            r#"<text x="{x:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            mt + ph + 16.0,
            fmt_tick(t)
        );
    }
    for t in nice_ticks(y_lo, y_hi, 8) {
        let y = sy(t);
        let _ = write!(
            svg,
            r##"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/>"##,
            ml,
            ml + pw
        );
        let _ = write!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            ml - 6.0,
            y + 4.0,
            fmt_tick(t)
        );
    }
    let _ = write!(
        svg,
        r#"<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let _ = write!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        ml + pw / 2.0,
        height - 14.0,
        xml_escape(&labels.x_label)
    );
    let _ = write!(
        svg,
        r#"<text x="18" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
        mt + ph / 2.0,
        mt + ph / 2.0,
        xml_escape(&labels.y_label)
    );

    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        if let Some(band) = &s.band {
            let mut d = String::from("M");
            for (i, &(x, y)) in s.points.iter().enumerate() {
                let _ = write!(d, " {:.1},{:.1}", sx(x), sy(y + band[i]));
            }
            for (i, &(x, y)) in s.points.iter().enumerate().rev() {
                let _ = write!(d, " L {:.1},{:.1}", sx(x), sy(y - band[i]));
            }
            d.push('Z');
            let _ = write!(svg, r#"<path d="{d}" fill="{color}" opacity="0.15"/>"#);
        }
        let pts: Vec<String> =
            s.points.iter().map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y))).collect();
        let dash = if s.dashed { r#" stroke-dasharray="6,4""# } else { "" };
        let _ = write!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.8"{dash}/>"#,
            pts.join(" ")
        );
        for &(x, y) in &s.points {
            let _ = write!(
                svg,
                r#"<circle cx="{:.1}" cy="{:.1}" r="2.4" fill="{color}"/>"#,
                sx(x),
                sy(y)
            );
        }
        let ly = mt + 16.0 + 18.0 * k as f64;
        let _ = write!(
            svg,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"{dash}/>"#,
            ml + pw - 150.0,
            ml + pw - 120.0
        );
        let _ = write!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12">{}</text>"#,
            ml + pw - 114.0,
            ly + 4.0,
            xml_escape(&s.label)
        );
    }
    svg.push_str("</svg>");
    svg
}

/// Renders a row-major matrix as an SVG heatmap (diverging blue-white-red
/// colormap, one rect per cell, row 0 at the top).
pub fn heatmap(
    labels: &ChartLabels,
    values: &[f64],
    n_rows: usize,
    n_cols: usize,
    x_extent: (f64, f64),
    y_extent: (f64, f64),
) -> String {
    assert_eq!(values.len(), n_rows * n_cols);
    let width = 760.0;
    let height = 520.0;
    let ml = 70.0;
    let mr = 20.0;
    let mt = 40.0;
    let mb = 60.0;
    let pw = width - ml - mr;
    let ph = height - mt - mb;

    let amax = values.iter().fold(0.0f64, |m, &v| m.max(v.abs())).max(1e-300);

    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = write!(svg, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = write!(
        svg,
        r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        ml + pw / 2.0,
        xml_escape(&labels.title)
    );

    let cw = pw / n_cols as f64;
    let ch = ph / n_rows as f64;
    for r in 0..n_rows {
        for c in 0..n_cols {
            let v = values[r * n_cols + c] / amax;
            let (rr, gg, bb) = diverging_rgb(v);
            let _ = write!(
                svg,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({rr},{gg},{bb})"/>"#,
                ml + c as f64 * cw,
                mt + r as f64 * ch,
                cw + 0.05,
                ch + 0.05
            );
        }
    }
    let _ = write!(
        svg,
        r#"<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let _ = write!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        ml + pw / 2.0,
        height - 14.0,
        xml_escape(&labels.x_label)
    );
    let _ = write!(
        svg,
        r#"<text x="18" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
        mt + ph / 2.0,
        mt + ph / 2.0,
        xml_escape(&labels.y_label)
    );
    for (v, at) in [(x_extent.0, ml), (x_extent.1, ml + pw)] {
        let _ = write!(
            svg,
            r#"<text x="{at:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            mt + ph + 16.0,
            fmt_tick(v)
        );
    }
    for (v, at) in [(y_extent.0, mt), (y_extent.1, mt + ph)] {
        let _ = write!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            ml - 6.0,
            at + 4.0,
            fmt_tick(v)
        );
    }
    svg.push_str("</svg>");
    svg
}

fn diverging_rgb(v: f64) -> (u8, u8, u8) {
    let v = v.clamp(-1.0, 1.0);
    if v >= 0.0 {
        let t = v;
        (255, (255.0 * (1.0 - t * 0.85)) as u8, (255.0 * (1.0 - t)) as u8)
    } else {
        let t = -v;
        ((255.0 * (1.0 - t)) as u8, (255.0 * (1.0 - t * 0.75)) as u8, 255)
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
