//! Minimal static SVG renderings of the report tables.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_R: f64 = 120.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 60.0;
const PALETTE: [&str; 6] = ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#b07aa1"];

/// Grouped bar chart: one group per category, one bar per series.
#[derive(Debug, Clone, PartialEq)]
pub struct BarChart {
    pub title: String,
    pub y_label: String,
    pub categories: Vec<String>,
    pub series: Vec<(String, Vec<f64>)>,
}

/// Sample points plus labelled arrows from the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Scatter {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
    pub arrows: Vec<(String, f64, f64)>,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"11\">"
    );
    let _ = writeln!(out, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>",
        WIDTH / 2.0,
        esc(title)
    );
}

fn legend(out: &mut String, names: impl Iterator<Item = String>) {
    for (k, name) in names.enumerate() {
        let y = MARGIN_T + 16.0 * k as f64;
        let x = WIDTH - MARGIN_R + 12.0;
        let _ = writeln!(
            out,
            "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"10\" height=\"10\" fill=\"{}\"/><text x=\"{:.1}\" y=\"{:.1}\">{}</text>",
            PALETTE[k % PALETTE.len()],
            x + 14.0,
            y + 9.0,
            esc(&name)
        );
    }
}

pub fn bar_chart_svg(chart: &BarChart) -> String {
    let mut out = String::new();
    header(&mut out, &chart.title);
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let max = chart
        .series
        .iter()
        .flat_map(|(_, v)| v.iter().copied())
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::max);
    let top = if max > 0.0 { max * 1.1 } else { 1.0 };
    let base_y = MARGIN_T + plot_h;
    let _ = writeln!(
        out,
        "<line x1=\"{MARGIN_L}\" y1=\"{base_y:.1}\" x2=\"{:.1}\" y2=\"{base_y:.1}\" stroke=\"black\"/>",
        MARGIN_L + plot_w
    );
    let _ = writeln!(
        out,
        "<line x1=\"{MARGIN_L}\" y1=\"{MARGIN_T}\" x2=\"{MARGIN_L}\" y2=\"{base_y:.1}\" stroke=\"black\"/>"
    );
    for tick in 0..=4 {
        let v = top * tick as f64 / 4.0;
        let y = base_y - plot_h * tick as f64 / 4.0;
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{v:.3}</text>",
            MARGIN_L - 4.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"14\" y=\"{:.1}\" transform=\"rotate(-90 14 {:.1})\" text-anchor=\"middle\">{}</text>",
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0,
        esc(&chart.y_label)
    );

    let groups = chart.categories.len().max(1) as f64;
    let group_w = plot_w / groups;
    let bar_w = group_w * 0.8 / chart.series.len().max(1) as f64;
    for (c, cat) in chart.categories.iter().enumerate() {
        let gx = MARGIN_L + group_w * c as f64 + group_w * 0.1;
        for (s, (_, values)) in chart.series.iter().enumerate() {
            let v = values.get(c).copied().filter(|v| v.is_finite()).unwrap_or(0.0);
            let h = plot_h * v / top;
            let _ = writeln!(
                out,
                "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"{bar_w:.1}\" height=\"{h:.1}\" fill=\"{}\"/>",
                gx + bar_w * s as f64,
                base_y - h,
                PALETTE[s % PALETTE.len()]
            );
        }
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
            gx + group_w * 0.4,
            base_y + 16.0,
            esc(cat)
        );
    }
    legend(&mut out, chart.series.iter().map(|(n, _)| n.clone()));
    out.push_str("</svg>\n");
    out
}

pub fn scatter_svg(plot: &Scatter) -> String {
    let mut out = String::new();
    header(&mut out, &plot.title);
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let extent = plot
        .points
        .iter()
        .flat_map(|&(x, y)| [x, y])
        .chain(plot.arrows.iter().flat_map(|(_, x, y)| [*x, *y]))
        .filter(|v| v.is_finite())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let extent = if extent > 0.0 { extent * 1.1 } else { 1.0 };
    let cx = MARGIN_L + plot_w / 2.0;
    let cy = MARGIN_T + plot_h / 2.0;
    let sx = |x: f64| cx + x / extent * plot_w / 2.0;
    let sy = |y: f64| cy - y / extent * plot_h / 2.0;

    let _ = writeln!(
        out,
        "<line x1=\"{MARGIN_L}\" y1=\"{cy:.1}\" x2=\"{:.1}\" y2=\"{cy:.1}\" stroke=\"#999\"/>",
        MARGIN_L + plot_w
    );
    let _ = writeln!(
        out,
        "<line x1=\"{cx:.1}\" y1=\"{MARGIN_T}\" x2=\"{cx:.1}\" y2=\"{:.1}\" stroke=\"#999\"/>",
        MARGIN_T + plot_h
    );
    let _ = writeln!(
        out,
        "<text x=\"{cx:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
        HEIGHT - 20.0,
        esc(&plot.x_label)
    );
    let _ = writeln!(
        out,
        "<text x=\"14\" y=\"{cy:.1}\" transform=\"rotate(-90 14 {cy:.1})\" text-anchor=\"middle\">{}</text>",
        esc(&plot.y_label)
    );
    for &(x, y) in &plot.points {
        if x.is_finite() && y.is_finite() {
            let _ = writeln!(
                out,
                "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"1.5\" fill=\"#4e79a7\" fill-opacity=\"0.5\"/>",
                sx(x),
                sy(y)
            );
        }
    }
    for (name, x, y) in &plot.arrows {
        let _ = writeln!(
            out,
            "<line x1=\"{cx:.1}\" y1=\"{cy:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#e15759\" stroke-width=\"1.5\"/><text x=\"{:.1}\" y=\"{:.1}\" fill=\"#e15759\">{}</text>",
            sx(*x),
            sy(*y),
            sx(*x) + 3.0,
            sy(*y) - 3.0,
            esc(name)
        );
    }
    out.push_str("</svg>\n");
    out
}
