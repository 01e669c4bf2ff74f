//! Single-panel SVG line plots.
//!
//! Output depends only on the input numbers: coordinates are written with a
//! fixed number of decimals and series are drawn in the order given.

use std::fmt::Write;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlotError {
    #[error("series `{0}` has fewer than two points")]
    TooFewPoints(String),
    #[error("series `{0}` contains a non-finite value")]
    NonFinite(String),
    #[error("degenerate {0} range")]
    DegenerateRange(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, xs: &[f64], ys: &[f64]) -> Self {
        Self {
            label: label.into(),
            points: xs.iter().copied().zip(ys.iter().copied()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotStyle {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub width: f64,
    pub height: f64,
}

impl PlotStyle {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            width: 640.0,
            height: 420.0,
        }
    }
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const DASHES: [&str; 3] = ["", "6 4", "2 3"];
const MARGIN_LEFT: f64 = 78.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 52.0;
const PADDING: f64 = 0.05;
const TICKS: usize = 5;

/// Range padded by 5% of its span; a zero span is padded by 5% of the value
/// (or by 0.05 around zero).
fn padded(lo: f64, hi: f64) -> (f64, f64) {
    let span = hi - lo;
    let pad = if span > 0.0 {
        PADDING * span
    } else if lo != 0.0 {
        PADDING * lo.abs()
    } else {
        PADDING
    };
    (lo - pad, hi + pad)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if a < 1e-12 {
        "0".into()
    } else if (1e-2..1e4).contains(&a) {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

/// Render `series` as an SVG 1.1 document.
pub fn emit_plot(series: &[Series], style: &PlotStyle) -> Result<String, PlotError> {
    let mut x_range = (f64::INFINITY, f64::NEG_INFINITY);
    let mut y_range = (f64::INFINITY, f64::NEG_INFINITY);
    for s in series {
        if s.points.len() < 2 {
            return Err(PlotError::TooFewPoints(s.label.clone()));
        }
        for &(x, y) in &s.points {
            if !x.is_finite() || !y.is_finite() {
                return Err(PlotError::NonFinite(s.label.clone()));
            }
            x_range = (x_range.0.min(x), x_range.1.max(x));
            y_range = (y_range.0.min(y), y_range.1.max(y));
        }
    }
    if series.is_empty() {
        return Err(PlotError::TooFewPoints(String::new()));
    }
    if x_range.1 <= x_range.0 {
        return Err(PlotError::DegenerateRange("x"));
    }
    let (x0, x1) = padded(x_range.0, x_range.1);
    let (y0, y1) = padded(y_range.0, y_range.1);
    if !(x1 > x0 && y1 > y0) {
        return Err(PlotError::DegenerateRange("y"));
    }

    let (w, h) = (style.width, style.height);
    let (left, right) = (MARGIN_LEFT, w - MARGIN_RIGHT);
    let (top, bottom) = (MARGIN_TOP, h - MARGIN_BOTTOM);
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * (right - left);
    let sy = |y: f64| bottom - (y - y0) / (y1 - y0) * (bottom - top);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{w:.0}" height="{h:.0}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="22" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        w / 2.0,
        escape(&style.title)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{left:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        right - left,
        bottom - top
    );

    for k in 0..TICKS {
        let f = k as f64 / (TICKS - 1) as f64;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{bottom:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
            bottom + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{px:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            bottom + 18.0,
            tick_label(xv)
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{left:.2}" y2="{py:.2}" stroke="black"/>"#,
            left - 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            left - 8.0,
            py + 4.0,
            tick_label(yv)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
        (left + right) / 2.0,
        h - 12.0,
        escape(&style.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        (top + bottom) / 2.0,
        (top + bottom) / 2.0,
        escape(&style.y_label)
    );

    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let dash = DASHES[(i / COLORS.len() + i) % DASHES.len()];
        let points: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let dash_attr = if dash.is_empty() {
            String::new()
        } else {
            format!(r#" stroke-dasharray="{dash}""#)
        };
        let _ = writeln!(
            svg,
            r#"<polyline class="series" fill="none" stroke="{color}" stroke-width="1.5"{dash_attr} points="{}"/>"#,
            points.join(" ")
        );
    }

    // Legend in the upper right corner of the panel.
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let y = top + 16.0 + 16.0 * i as f64;
        let x = right - 170.0;
        let _ = writeln!(
            svg,
            r#"<line class="legend" x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="2"/>"#,
            x + 24.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11">{}</text>"#,
            x + 30.0,
            y + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn style() -> PlotStyle {
        PlotStyle::new("test", "t [natural]", "|Gamma|")
    }

    #[test]
    fn constant_curve_is_padded_by_five_percent() {
        assert_eq!(padded(2.0, 2.0), (1.9, 2.1));
        assert_eq!(padded(0.0, 0.0), (-0.05, 0.05));
        let (lo, hi) = padded(0.0, 1.0);
        assert!((lo + 0.05).abs() < 1e-15 && (hi - 1.05).abs() < 1e-15);
        let s = Series::new("flat", &[0.0, 1.0, 2.0], &[3.0, 3.0, 3.0]);
        let svg = emit_plot(&[s], &style()).unwrap();
        // A flat series maps every point to the middle of the panel.
        let mid = (MARGIN_TOP + 420.0 - MARGIN_BOTTOM) / 2.0;
        assert!(svg.contains(&format!(",{mid:.2} ")));
    }

    #[test]
    fn overlay_has_both_series_and_legend() {
        let xs = [0.0, 1.0, 2.0];
        let a = Series::new("closed form", &xs, &[1.0, 0.5, 0.1]);
        let b = Series::new("quadrature", &xs, &[1.0, 0.5, 0.1]);
        let svg = emit_plot(&[a, b], &style()).unwrap();
        assert_eq!(svg.matches(r#"class="series""#).count(), 2);
        assert_eq!(svg.matches(r#"class="legend""#).count(), 2);
        assert!(svg.contains(">closed form<") && svg.contains(">quadrature<"));
        assert!(svg.contains(r#"version="1.1""#));
        assert!(svg.contains("t [natural]"));
    }

    #[test]
    fn output_is_deterministic() {
        let xs: Vec<f64> = (0..50).map(|k| k as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|t| (-t * t).exp()).collect();
        let a = emit_plot(&[Series::new("g", &xs, &ys)], &style()).unwrap();
        let b = emit_plot(&[Series::new("g", &xs, &ys)], &style()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn degenerate_input_is_rejected() {
        let one = Series::new("one", &[0.0], &[1.0]);
        assert_eq!(emit_plot(&[one], &style()), Err(PlotError::TooFewPoints("one".into())));
        let vertical = Series::new("v", &[1.0, 1.0], &[0.0, 1.0]);
        assert_eq!(emit_plot(&[vertical], &style()), Err(PlotError::DegenerateRange("x")));
        let nan = Series::new("n", &[0.0, 1.0], &[f64::NAN, 1.0]);
        assert_eq!(emit_plot(&[nan], &style()), Err(PlotError::NonFinite("n".into())));
        assert!(emit_plot(&[], &style()).is_err());
    }

    #[test]
    fn labels_are_escaped() {
        let s = Series::new("a<b", &[0.0, 1.0], &[0.0, 1.0]);
        let svg = emit_plot(&[s], &PlotStyle::new("x & y", "t", "y")).unwrap();
        assert!(svg.contains("a&lt;b") && svg.contains("x &amp; y"));
    }
}
