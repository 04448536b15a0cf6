//! Self-contained SVG line charts for metrics tables.

use std::fmt::Write as _;

use thiserror::Error;

use crate::analysis::MetricsTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Passage width, midpoint set point, and occupied position over time.
    Path,
    /// Intruder displacement and follower distances over time.
    Follow,
}

impl std::str::FromStr for PlotKind {
    type Err = PlotError;
    fn from_str(s: &str) -> Result<Self, PlotError> {
        match s {
            "path" => Ok(PlotKind::Path),
            "follow" => Ok(PlotKind::Follow),
            other => Err(PlotError::Kind(other.to_owned())),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PlotError {
    #[error("nothing to plot: metrics table has no rows")]
    Empty,
    #[error("metrics table lacks column `{0}`")]
    MissingColumn(String),
    #[error("unknown plot kind `{0}` (expected path or follow)")]
    Kind(String),
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = [
    "#1f5fbf", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Tick step of 1, 2, or 5 times a power of ten giving about `target` ticks.
fn nice_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let m = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn padded_range(lo: f64, hi: f64) -> (f64, f64) {
    if (hi - lo).abs() < 1e-12 {
        let pad = if lo.abs() > 1e-12 {
            lo.abs() * 0.1
        } else {
            1.0
        };
        (lo - pad, hi + pad)
    } else {
        (lo, hi)
    }
}

fn collect_series(table: &MetricsTable, kind: PlotKind) -> Result<Vec<Series>, PlotError> {
    let col = |name: &str| {
        table
            .column(name)
            .ok_or_else(|| PlotError::MissingColumn(name.to_owned()))
    };
    let time = col("time")?;
    let series = |label: &str, values: Vec<Option<f64>>| Series {
        label: label.to_owned(),
        points: time
            .iter()
            .zip(values)
            .filter_map(|(t, v)| Some(((*t)?, v?)))
            .collect(),
    };
    Ok(match kind {
        PlotKind::Path => vec![
            series("total distance (m)", col("total")?),
            series("suggested position (m)", col("suggested")?),
            series("actual position (m)", col("actual")?),
        ],
        PlotKind::Follow => {
            let mut out = vec![series(
                "intruder displacement (m)",
                col("intruder_displacement")?,
            )];
            for name in table.columns.iter().filter(|c| c.starts_with("robot_")) {
                let label = format!("robot {} to intruder (m)", &name["robot_".len()..]);
                out.push(series(&label, col(name)?));
            }
            out
        }
    })
}

/// Renders `table` as an SVG document.
pub fn emit_plot(table: &MetricsTable, kind: PlotKind) -> Result<String, PlotError> {
    if table.rows.is_empty() {
        return Err(PlotError::Empty);
    }
    let series = collect_series(table, kind)?;
    let pts = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        return Err(PlotError::Empty);
    }
    let (x0, x1) = padded_range(x0, x1);
    let (y0, y1) = padded_range(y0.min(0.0), y1);
    let x_step = nice_step(x1 - x0, 8.0);
    let y_step = nice_step(y1 - y0, 6.0);
    let (x0, x1) = (
        (x0 / x_step).floor() * x_step,
        (x1 / x_step).ceil() * x_step,
    );
    let (y0, y1) = (
        (y0 / y_step).floor() * y_step,
        (y1 / y_step).ceil() * y_step,
    );

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| TOP + plot_h - (y - y0) / (y1 - y0) * plot_h;

    let title = match kind {
        PlotKind::Path => "Navigation path between obstacles",
        PlotKind::Follow => "Intruder following",
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>
<text x="{:.1}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(title)
    );

    // grid and tick labels
    let mut k = 0;
    loop {
        let x = x0 + k as f64 * x_step;
        if x > x1 + x_step * 1e-9 {
            break;
        }
        let px = sx(x);
        let _ = writeln!(
            svg,
            r##"<line x1="{px:.2}" y1="{TOP}" x2="{px:.2}" y2="{:.2}" stroke="#e4e4e4"/>
<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            TOP + plot_h,
            TOP + plot_h + 18.0,
            fmt_tick(x, x_step)
        );
        k += 1;
    }
    let mut k = 0;
    loop {
        let y = y0 + k as f64 * y_step;
        if y > y1 + y_step * 1e-9 {
            break;
        }
        let py = sy(y);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#e4e4e4"/>
<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT + plot_w,
            LEFT - 8.0,
            py + 4.0,
            fmt_tick(y, y_step)
        );
        k += 1;
    }
    let _ = writeln!(
        svg,
        r##"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#333"/>
<text x="{:.1}" y="{:.1}" text-anchor="middle">time (s)</text>
<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">distance (m)</text>"##,
        LEFT + plot_w / 2.0,
        HEIGHT - 16.0,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if s.points.len() > 1 {
            let path: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                path.join(" ")
            );
        }
        for &(x, y) in &s.points {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                sx(x),
                sy(y)
            );
        }
        let ly = TOP + 10.0 + i as f64 * 20.0;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>
<text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 18.0,
            lx + 24.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn fmt_tick(v: f64, step: f64) -> String {
    let decimals = if step >= 1.0 {
        0
    } else {
        (-step.log10().floor()) as usize
    };
    let s = format!("{v:.decimals$}");
    if s == "-0" {
        "0".to_owned()
    } else {
        s
    }
}
