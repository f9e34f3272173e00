//! Deterministic SVG rendering for Corbit tables and study curves.
//!
//! Corbit layout: concentric rings are stages (innermost is stage one),
//! angular sectors are lags, and each point's fill encodes its value on a
//! symmetric diverging scale centred at zero. R-Corbit cells fan the
//! per-community points around the cell position with the community mean
//! at the cell centre. The plot centre carries the zero reference.
//!
//! Output is byte-deterministic: fixed float formatting, fixed element
//! order, no timestamps.

use crate::acf::{CorbitScope, CorbitTable};
use crate::scalar::Real;

/// Rendering options.
#[derive(Debug, Clone)]
pub struct CorbitStyle {
    /// Canvas edge in pixels.
    pub size: f64,
    /// Data point radius.
    pub point_radius: f64,
    /// Fixed colour-scale ceiling; default scales to the table maximum.
    pub scale_max: Option<f64>,
}

impl Default for CorbitStyle {
    fn default() -> Self {
        Self {
            size: 640.0,
            point_radius: 7.0,
            scale_max: None,
        }
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

/// Diverging blue-white-red scale on [-1, 1].
fn diverging_color(v: f64) -> String {
    let v = v.clamp(-1.0, 1.0);
    let (r, g, b) = if v < 0.0 {
        let t = 1.0 + v; // 0 at -1, 1 at 0
        (
            (255.0 * t) as u8,
            (255.0 * t) as u8,
            255u8,
        )
    } else {
        let t = 1.0 - v;
        (
            255u8,
            (255.0 * t) as u8,
            (255.0 * t) as u8,
        )
    };
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Renders a Corbit or R-Corbit table as an SVG 1.1 document.
pub fn render_corbit_svg<T: Real>(table: &CorbitTable<T>, style: &CorbitStyle) -> String {
    let size = style.size;
    let cx = size / 2.0;
    let cy = size / 2.0;
    let inner = size * 0.11;
    let outer = size * 0.40;
    let max_stage = table.max_stage.max(1);
    let max_lag = table.max_lag.max(1);
    let ring_radius = |stage: usize| -> f64 {
        if max_stage == 1 {
            (inner + outer) / 2.0
        } else {
            inner + (outer - inner) * (stage - 1) as f64 / (max_stage - 1) as f64
        }
    };
    let sector_angle = |lag: usize| -> f64 {
        // lag 1 starts at twelve o'clock, clockwise
        std::f64::consts::TAU * (lag - 1) as f64 / max_lag as f64 - std::f64::consts::FRAC_PI_2
    };
    let scale = style.scale_max.unwrap_or_else(|| {
        table
            .rows
            .iter()
            .map(|r| r.value.to_f64_lossy().abs())
            .fold(0.0f64, f64::max)
            .max(1e-12)
    });

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
        w = fmt(size),
        h = fmt(size)
    ));
    out.push_str(&format!(
        "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
        w = fmt(size),
        h = fmt(size)
    ));
    out.push_str(&format!(
        "<text x=\"{x}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{} by lag (sectors) and stage (rings)</text>\n",
        table.kind.as_str(),
        x = fmt(cx)
    ));

    // stage rings
    for r in 1..=max_stage {
        out.push_str(&format!(
            "<circle class=\"ring\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n",
            fmt(cx),
            fmt(cy),
            fmt(ring_radius(r))
        ));
    }
    // sector separators and lag labels
    for h in 1..=max_lag {
        let angle = sector_angle(h) - std::f64::consts::PI / max_lag as f64;
        let x2 = cx + (outer + 14.0) * angle.cos();
        let y2 = cy + (outer + 14.0) * angle.sin();
        out.push_str(&format!(
            "<line class=\"sector\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#eeeeee\" stroke-width=\"1\"/>\n",
            fmt(cx),
            fmt(cy),
            fmt(x2),
            fmt(y2)
        ));
        let label_angle = sector_angle(h);
        let lx = cx + (outer + 26.0) * label_angle.cos();
        let ly = cy + (outer + 26.0) * label_angle.sin() + 5.0;
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">{h}</text>\n",
            fmt(lx),
            fmt(ly)
        ));
    }

    // zero reference at the centre
    out.push_str(&format!(
        "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"{}\" stroke=\"#888888\"/>\n",
        fmt(cx),
        fmt(cy),
        diverging_color(0.0)
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">0</text>\n",
        fmt(cx),
        fmt(cy + 18.0)
    ));

    // count communities present for sub-ring fanning
    let community_count = table
        .rows
        .iter()
        .filter_map(|r| match r.scope {
            CorbitScope::Community(c) => Some(c),
            _ => None,
        })
        .max()
        .unwrap_or(0);

    for row in &table.rows {
        let angle = sector_angle(row.lag);
        let radius = ring_radius(row.stage);
        let (px, py, pr) = match row.scope {
            CorbitScope::Whole | CorbitScope::CommunityMean => (
                cx + radius * angle.cos(),
                cy + radius * angle.sin(),
                style.point_radius,
            ),
            CorbitScope::Community(c) => {
                let fan = std::f64::consts::TAU * (c - 1) as f64 / community_count.max(1) as f64;
                let spread = style.point_radius * 2.2;
                (
                    cx + radius * angle.cos() + spread * fan.cos(),
                    cy + radius * angle.sin() + spread * fan.sin(),
                    style.point_radius * 0.75,
                )
            }
        };
        let value = row.value.to_f64_lossy();
        out.push_str(&format!(
            "<circle class=\"pt\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\" stroke=\"#444444\" stroke-width=\"0.5\"><title>{} lag {} stage {}{}: {}</title></circle>\n",
            fmt(px),
            fmt(py),
            fmt(pr),
            diverging_color(value / scale),
            table.kind.as_str(),
            row.lag,
            row.stage,
            match row.scope {
                CorbitScope::Whole => String::new(),
                CorbitScope::Community(c) => format!(" community {c}"),
                CorbitScope::CommunityMean => " mean".to_string(),
            },
            value
        ));
    }

    // legend: diverging swatches
    let legend_y = size - 26.0;
    for (slot, v) in [-1.0f64, -0.5, 0.0, 0.5, 1.0].iter().enumerate() {
        let x = cx - 70.0 + 28.0 * slot as f64;
        out.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"24\" height=\"12\" fill=\"{}\" stroke=\"#888888\" stroke-width=\"0.5\"/>\n",
            fmt(x),
            fmt(legend_y),
            diverging_color(*v)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">-{s:.2} to +{s:.2}</text>\n",
        fmt(cx),
        fmt(legend_y - 6.0),
        s = scale
    ));
    out.push_str("</svg>\n");
    out
}

/// Minimal deterministic polyline chart for study curves.
///
/// `series` pairs a label with `(x, y)` points; axes are linear and
/// padded to the data range.
pub fn render_lines_svg(series: &[(String, Vec<(f64, f64)>)], title: &str) -> String {
    let width = 720.0;
    let height = 480.0;
    let margin = 60.0;
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for (_, pts) in series {
        for (x, y) in pts {
            xs.push(*x);
            ys.push(*y);
        }
    }
    let (xmin, xmax) = bounds(&xs);
    let (ymin, ymax) = bounds(&ys);
    let sx = |x: f64| margin + (x - xmin) / (xmax - xmin).max(1e-12) * (width - 2.0 * margin);
    let sy = |y: f64| height - margin - (y - ymin) / (ymax - ymin).max(1e-12) * (height - 2.0 * margin);
    let palette = ["#d95f02", "#1b9e77", "#7570b3", "#000000", "#e7298a", "#66a61e"];

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        fmt(width),
        fmt(height),
        fmt(width),
        fmt(height)
    ));
    out.push_str(&format!(
        "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
        fmt(width),
        fmt(height)
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{title}</text>\n",
        fmt(width / 2.0)
    ));
    // axes
    out.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"#000000\"/>\n<line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"#000000\"/>\n",
        m = fmt(margin),
        b = fmt(height - margin),
        r = fmt(width - margin),
        t = fmt(margin)
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{xmin:.0}</text>\n",
        fmt(margin),
        fmt(height - margin + 18.0)
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{xmax:.0}</text>\n",
        fmt(width - margin),
        fmt(height - margin + 18.0)
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{ymax:.3}</text>\n",
        fmt(margin - 6.0),
        fmt(margin + 4.0)
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{ymin:.3}</text>\n",
        fmt(margin - 6.0),
        fmt(height - margin + 4.0)
    ));

    for (idx, (label, pts)) in series.iter().enumerate() {
        let color = palette[idx % palette.len()];
        let path: Vec<String> = pts.iter().map(|(x, y)| format!("{},{}", fmt(sx(*x)), fmt(sy(*y)))).collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            path.join(" ")
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{label}</text>\n",
            fmt(width - margin + 6.0),
            fmt(margin + 16.0 * idx as f64)
        ));
    }
    out.push_str("</svg>\n");
    out
}

fn bounds(vals: &[f64]) -> (f64, f64) {
    if vals.is_empty() {
        return (0.0, 1.0);
    }
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if (max - min).abs() < 1e-12 {
        (min - 0.5, max + 0.5)
    } else {
        (min, max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acf::{CorbitKind, CorbitRow, CorbitTable};

    fn sample_table() -> CorbitTable<f64> {
        let mut rows = Vec::new();
        for h in 1..=4usize {
            for r in 1..=3usize {
                rows.push(CorbitRow {
                    lag: h,
                    stage: r,
                    scope: CorbitScope::Whole,
                    value: (h as f64 - 2.0) * 0.1 * r as f64,
                });
            }
        }
        CorbitTable {
            kind: CorbitKind::Pnacf,
            rows,
            max_lag: 4,
            max_stage: 3,
            len: 100,
            node_count: 5,
        }
    }

    #[test]
    fn byte_identical_for_identical_input() {
        let table = sample_table();
        let a = render_corbit_svg(&table, &CorbitStyle::default());
        let b = render_corbit_svg(&table, &CorbitStyle::default());
        assert_eq!(a, b);
    }

    #[test]
    fn ring_and_sector_counts_match_table() {
        let table = sample_table();
        let svg = render_corbit_svg(&table, &CorbitStyle::default());
        assert_eq!(svg.matches("class=\"ring\"").count(), 3);
        assert_eq!(svg.matches("class=\"sector\"").count(), 4);
        assert_eq!(svg.matches("class=\"pt\"").count(), 12);
    }

    #[test]
    fn empty_table_still_valid() {
        let table = CorbitTable::<f64> {
            kind: CorbitKind::Nacf,
            rows: vec![],
            max_lag: 2,
            max_stage: 2,
            len: 0,
            node_count: 0,
        };
        let svg = render_corbit_svg(&table, &CorbitStyle::default());
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("class=\"pt\"").count(), 0);
    }

    #[test]
    fn diverging_scale_endpoints() {
        assert_eq!(diverging_color(-1.0), "#0000ff");
        assert_eq!(diverging_color(0.0), "#ffffff");
        assert_eq!(diverging_color(1.0), "#ff0000");
    }

    #[test]
    fn line_chart_renders() {
        let series = vec![
            ("all".to_string(), vec![(25.0, 1.0), (50.0, 0.7), (100.0, 0.4)]),
            ("c1".to_string(), vec![(25.0, 0.6), (50.0, 0.4), (100.0, 0.2)]),
        ];
        let svg = render_lines_svg(&series, "median error");
        assert!(svg.contains("polyline"));
        assert_eq!(svg.matches("polyline").count(), 2);
    }
}
