//! Static SVG heatmap of a figure of merit over the `(α, β)` grid.
//!
//! Conventions: `α` runs left to right and `β` bottom to top, one cell per grid
//! point. Color encodes `log10 Λ` on a diverging blue-white-red scale centred on
//! `Λ = 1e-2` and saturating two decades either side, so white marks the
//! classifier threshold, red the non-negligible region and blue the negligible
//! one. `Λ = 0` is drawn at full blue.

use std::fmt::Write as _;

use super::config::{Metric, ScanConfig};
use super::scan::ScanOutcome;

pub const PIVOT_LOG10: f64 = -2.0;
pub const SPAN_DECADES: f64 = 2.0;

const CELL_W: f64 = 6.0;
const CELL_H: f64 = 6.0;
const LEFT: f64 = 70.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const BAR_GAP: f64 = 20.0;
const BAR_W: f64 = 16.0;
const RIGHT: f64 = 80.0;

/// Position on the diverging scale in `[-1, 1]`.
pub fn scale_position(lambda: f64) -> f64 {
    if lambda.is_nan() || lambda <= 0.0 {
        return -1.0;
    }
    ((lambda.log10() - PIVOT_LOG10) / SPAN_DECADES).clamp(-1.0, 1.0)
}

/// RGB color of a scale position: blue at -1, white at 0, red at +1.
pub fn color(t: f64) -> (u8, u8, u8) {
    let t = t.clamp(-1.0, 1.0);
    let (blue, red) = ((33.0, 102.0, 172.0), (178.0, 24.0, 43.0));
    let (end, s) = if t < 0.0 { (blue, -t) } else { (red, t) };
    let mix = |c: f64| (255.0 + (c - 255.0) * s).round() as u8;
    (mix(end.0), mix(end.1), mix(end.2))
}

fn hex((r, g, b): (u8, u8, u8)) -> String {
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn tick_indices(n: usize) -> Vec<usize> {
    let mut idx = vec![0];
    if n > 2 {
        idx.push((n - 1) / 2);
    }
    if n > 1 {
        idx.push(n - 1);
    }
    idx
}

pub fn heatmap(cfg: &ScanConfig, outcome: &ScanOutcome, metric: Metric) -> String {
    let na = outcome.alpha_grid.len();
    let nb = outcome.beta_grid.len();
    let plot_w = CELL_W * na as f64;
    let plot_h = CELL_H * nb as f64;
    let width = LEFT + plot_w + BAR_GAP + BAR_W + RIGHT;
    let height = TOP + plot_h + BOTTOM;
    let label = match metric {
        Metric::Avg => "Λ_avg",
        Metric::Min => "Λ_min",
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="13">{label}, {} model, L = {}, μ = {}</text>"#,
        LEFT + plot_w / 2.0,
        cfg.model.name.as_str().to_uppercase(),
        cfg.cells,
        cfg.mu
    );

    let _ = writeln!(s, r#"<g shape-rendering="crispEdges">"#);
    for i in 0..na {
        for j in 0..nb {
            let x = LEFT + CELL_W * i as f64;
            let y = TOP + plot_h - CELL_H * (j + 1) as f64;
            let c = hex(color(scale_position(outcome.row(i, j).lambda(metric))));
            let _ = writeln!(
                s,
                r#"<rect x="{x}" y="{y}" width="{CELL_W}" height="{CELL_H}" fill="{c}"/>"#
            );
        }
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );

    for i in tick_indices(na) {
        let x = LEFT + CELL_W * (i as f64 + 0.5);
        let y = TOP + plot_h;
        let _ = writeln!(
            s,
            r#"<line x1="{x}" y1="{y}" x2="{x}" y2="{}" stroke="black"/>"#,
            y + 4.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{}" text-anchor="middle">{}</text>"#,
            y + 16.0,
            outcome.alpha_grid[i]
        );
    }
    for j in tick_indices(nb) {
        let y = TOP + plot_h - CELL_H * (j as f64 + 0.5);
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{y}" x2="{LEFT}" y2="{y}" stroke="black"/>"#,
            LEFT - 4.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            outcome.beta_grid[j]
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">α</text>"#,
        LEFT + plot_w / 2.0,
        TOP + plot_h + 36.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{}" text-anchor="middle">β</text>"#,
        TOP + plot_h / 2.0
    );

    // colorbar: 64 bands from log10 Λ = pivot - span (bottom) to pivot + span (top)
    let bx = LEFT + plot_w + BAR_GAP;
    let bands = 64;
    let bh = plot_h / bands as f64;
    let _ = writeln!(s, r#"<g shape-rendering="crispEdges">"#);
    for b in 0..bands {
        let t = -1.0 + 2.0 * (b as f64 + 0.5) / bands as f64;
        let y = TOP + plot_h - bh * (b + 1) as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{bx}" y="{y}" width="{BAR_W}" height="{bh}" fill="{}"/>"#,
            hex(color(t))
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<rect x="{bx}" y="{TOP}" width="{BAR_W}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for (frac, text) in [(0.0, "≤1e-4"), (0.5, "1e-2"), (1.0, "≥1e0")] {
        let y = TOP + plot_h * (1.0 - frac);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">{text}</text>"#,
            bx + BAR_W + 4.0,
            y + 4.0
        );
    }
    let _ = writeln!(s, "</svg>");
    s
}
