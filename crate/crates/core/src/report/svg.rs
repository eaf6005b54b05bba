//! Deterministic SVG charts: scatter with curves, box plots, Tukey
//! intervals and the feature-selection profile.
//!
//! Coordinates are written with two decimals so identical payloads give
//! identical bytes.

use std::fmt::Write as _;

use serde::Serialize;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

/// Colours of successive series (partner groups).
pub const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn colour(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(c),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterSeries {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Fitted curve sampled on a grid, drawn as one path.
    pub curve: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxGroup {
    pub label: String,
    pub values: Vec<f64>,
    /// Colour index (partner group in grouped plots).
    pub series: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Interval {
    pub label: String,
    pub estimate: f64,
    pub low: f64,
    pub high: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "plot", rename_all = "snake_case")]
pub enum PlotPayload {
    Scatter {
        title: String,
        x_label: String,
        y_label: String,
        series: Vec<ScatterSeries>,
    },
    Box {
        title: String,
        x_label: String,
        y_label: String,
        groups: Vec<BoxGroup>,
        /// Legend entries `(series index, label)` for grouped plots.
        legend: Vec<(usize, String)>,
    },
    Tukey {
        title: String,
        intervals: Vec<Interval>,
    },
    Selection {
        title: String,
        ranked_means: Vec<f64>,
        cut_positions: Vec<usize>,
        chosen_k: usize,
    },
}

#[derive(Debug, Clone, Copy)]
struct Scale {
    d0: f64,
    d1: f64,
    r0: f64,
    r1: f64,
}

impl Scale {
    fn new(lo: f64, hi: f64, r0: f64, r1: f64) -> Self {
        let (lo, hi) = if hi > lo {
            let pad = 0.05 * (hi - lo);
            (lo - pad, hi + pad)
        } else {
            let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
            (lo - pad, hi + pad)
        };
        Scale { d0: lo, d1: hi, r0, r1 }
    }

    fn map(&self, v: f64) -> f64 {
        self.r0 + (v - self.d0) / (self.d1 - self.d0) * (self.r1 - self.r0)
    }

    /// Roughly five round tick values inside the domain.
    fn ticks(&self) -> Vec<f64> {
        let span = self.d1 - self.d0;
        let raw = span / 5.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0]
            .iter()
            .map(|m| m * mag)
            .find(|s| span / s <= 6.0)
            .unwrap_or(10.0 * mag);
        let start = (self.d0 / step).ceil() as i64;
        let end = (self.d1 / step).floor() as i64;
        (start..=end).map(|i| i as f64 * step).collect()
    }
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
}

fn tick_label(v: f64) -> String {
    let s = crate::format::sig(v, 3);
    if s.contains('.') && !s.contains('e') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

struct Svg {
    out: String,
}

impl Svg {
    fn new(title: &str) -> Self {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(title)
        );
        Svg { out }
    }

    fn raw(&mut self, s: &str) {
        self.out.push_str(s);
        self.out.push('\n');
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, extra: &str) {
        let _ = writeln!(
            self.out,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}"{extra}/>"#
        );
    }

    fn text(&mut self, x: f64, y: f64, anchor: &str, s: &str, extra: &str) {
        let _ = writeln!(
            self.out,
            r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}"{extra}>{}</text>"#,
            escape(s)
        );
    }

    fn circle(&mut self, x: f64, y: f64, r: f64, fill: &str, extra: &str) {
        let _ = writeln!(
            self.out,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r:.1}" fill="{fill}"{extra}/>"#
        );
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

fn plot_left() -> f64 {
    LEFT
}
fn plot_right() -> f64 {
    WIDTH - RIGHT
}
fn plot_top() -> f64 {
    TOP
}
fn plot_bottom() -> f64 {
    HEIGHT - BOTTOM
}

fn y_axis(svg: &mut Svg, ys: &Scale, label: &str) {
    svg.line(plot_left(), plot_top(), plot_left(), plot_bottom(), "black", "");
    for t in ys.ticks() {
        let y = ys.map(t);
        svg.line(plot_left() - 4.0, y, plot_left(), y, "black", "");
        svg.text(plot_left() - 7.0, y + 4.0, "end", &tick_label(t), "");
    }
    let _ = writeln!(
        svg.out,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        (plot_top() + plot_bottom()) / 2.0,
        (plot_top() + plot_bottom()) / 2.0,
        escape(label)
    );
}

fn x_axis_numeric(svg: &mut Svg, xs: &Scale, label: &str) {
    svg.line(plot_left(), plot_bottom(), plot_right(), plot_bottom(), "black", "");
    for t in xs.ticks() {
        let x = xs.map(t);
        svg.line(x, plot_bottom(), x, plot_bottom() + 4.0, "black", "");
        svg.text(x, plot_bottom() + 17.0, "middle", &tick_label(t), "");
    }
    svg.text((plot_left() + plot_right()) / 2.0, HEIGHT - 18.0, "middle", label, "");
}

fn legend(svg: &mut Svg, entries: &[(usize, String)]) {
    for (row, (series, label)) in entries.iter().enumerate() {
        let y = plot_top() + 12.0 + 16.0 * row as f64;
        svg.circle(plot_right() - 6.0, y - 4.0, 4.0, colour(*series), "");
        svg.text(plot_right() - 14.0, y, "end", label, "");
    }
}

/// Renders a payload to SVG text.
pub fn render_svg(payload: &PlotPayload) -> String {
    match payload {
        PlotPayload::Scatter { title, x_label, y_label, series } => scatter(title, x_label, y_label, series),
        PlotPayload::Box { title, x_label, y_label, groups, legend } => box_plot(title, x_label, y_label, groups, legend),
        PlotPayload::Tukey { title, intervals } => tukey(title, intervals),
        PlotPayload::Selection { title, ranked_means, cut_positions, chosen_k } => {
            selection(title, ranked_means, cut_positions, *chosen_k)
        }
    }
}

fn scatter(title: &str, x_label: &str, y_label: &str, series: &[ScatterSeries]) -> String {
    let (x0, x1) = extent(series.iter().flat_map(|s| s.x.iter().copied()));
    let (y0, y1) = extent(series.iter().flat_map(|s| {
        s.y.iter()
            .copied()
            .chain(s.curve.iter().flatten().map(|p| p.1))
    }));
    let xs = Scale::new(x0, x1, plot_left(), plot_right());
    let ys = Scale::new(y0, y1, plot_bottom(), plot_top());
    let mut svg = Svg::new(title);
    x_axis_numeric(&mut svg, &xs, x_label);
    y_axis(&mut svg, &ys, y_label);
    for (k, s) in series.iter().enumerate() {
        svg.raw(r#"<g class="points" fill-opacity="0.45">"#);
        for (&x, &y) in s.x.iter().zip(&s.y) {
            svg.circle(xs.map(x), ys.map(y), 2.5, colour(k), "");
        }
        svg.raw("</g>");
    }
    for (k, s) in series.iter().enumerate() {
        if let Some(curve) = &s.curve {
            let mut d = String::new();
            for (i, (x, y)) in curve.iter().enumerate() {
                let _ = write!(d, "{}{:.2},{:.2}", if i == 0 { "M" } else { " L" }, xs.map(*x), ys.map(*y));
            }
            svg.raw(&format!(
                r#"<path d="{d}" fill="none" stroke="{}" stroke-width="2.5"/>"#,
                if series.len() == 1 { "black" } else { colour(k) }
            ));
        }
    }
    if series.len() > 1 {
        let entries: Vec<(usize, String)> = series.iter().enumerate().map(|(k, s)| (k, s.label.clone())).collect();
        legend(&mut svg, &entries);
    }
    svg.finish()
}

/// Quartiles by linear interpolation between order statistics.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn box_plot(title: &str, x_label: &str, y_label: &str, groups: &[BoxGroup], entries: &[(usize, String)]) -> String {
    let (y0, y1) = extent(groups.iter().flat_map(|g| g.values.iter().copied()).chain([0.0]));
    let ys = Scale::new(y0, y1, plot_bottom(), plot_top());
    let mut svg = Svg::new(title);
    y_axis(&mut svg, &ys, y_label);
    svg.line(plot_left(), plot_bottom(), plot_right(), plot_bottom(), "black", "");
    svg.line(plot_left(), ys.map(0.0), plot_right(), ys.map(0.0), "#999999", r#" stroke-dasharray="4 3""#);
    let slot = (plot_right() - plot_left()) / groups.len().max(1) as f64;
    let half = (slot * 0.3).min(30.0);
    for (i, g) in groups.iter().enumerate() {
        let cx = plot_left() + slot * (i as f64 + 0.5);
        let c = colour(g.series);
        svg.raw(r#"<g class="box">"#);
        if !g.values.is_empty() {
            let mut v = g.values.clone();
            v.sort_by(f64::total_cmp);
            let (q1, med, q3) = (quantile(&v, 0.25), quantile(&v, 0.5), quantile(&v, 0.75));
            let iqr = q3 - q1;
            let lo = v.iter().copied().find(|x| *x >= q1 - 1.5 * iqr).unwrap_or(v[0]);
            let hi = v.iter().rev().copied().find(|x| *x <= q3 + 1.5 * iqr).unwrap_or(v[v.len() - 1]);
            svg.line(cx, ys.map(lo), cx, ys.map(q1), c, "");
            svg.line(cx, ys.map(q3), cx, ys.map(hi), c, "");
            let _ = writeln!(
                svg.out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{c}" fill-opacity="0.25" stroke="{c}"/>"#,
                cx - half,
                ys.map(q3),
                2.0 * half,
                (ys.map(q1) - ys.map(q3)).max(0.5)
            );
            svg.line(cx - half, ys.map(med), cx + half, ys.map(med), c, r#" stroke-width="2""#);
            for &x in v.iter().filter(|x| **x < lo || **x > hi) {
                svg.circle(cx, ys.map(x), 2.0, c, "");
            }
        }
        svg.text(cx, plot_bottom() + 17.0, "middle", &g.label, "");
        svg.text(cx, plot_bottom() + 31.0, "middle", &format!("n={}", g.values.len()), r#" font-size="10""#);
        svg.raw("</g>");
    }
    svg.text((plot_left() + plot_right()) / 2.0, HEIGHT - 8.0, "middle", x_label, "");
    if !entries.is_empty() {
        legend(&mut svg, entries);
    }
    svg.finish()
}

fn tukey(title: &str, intervals: &[Interval]) -> String {
    let (x0, x1) = extent(intervals.iter().flat_map(|i| [i.low, i.high]).chain([0.0]));
    let left = 150.0;
    let xs = Scale::new(x0, x1, left, plot_right());
    let mut svg = Svg::new(title);
    svg.line(left, plot_bottom(), plot_right(), plot_bottom(), "black", "");
    for t in xs.ticks() {
        let x = xs.map(t);
        svg.line(x, plot_bottom(), x, plot_bottom() + 4.0, "black", "");
        svg.text(x, plot_bottom() + 17.0, "middle", &tick_label(t), "");
    }
    svg.text((left + plot_right()) / 2.0, HEIGHT - 18.0, "middle", "difference in mean SHAP (simultaneous CI)", "");
    svg.line(xs.map(0.0), plot_top(), xs.map(0.0), plot_bottom(), "#999999", r#" stroke-dasharray="4 3""#);
    let row = (plot_bottom() - plot_top()) / intervals.len().max(1) as f64;
    for (i, iv) in intervals.iter().enumerate() {
        let y = plot_top() + row * (i as f64 + 0.5);
        let c = if iv.significant { "#d62728" } else { "#555555" };
        svg.raw(r#"<g class="interval">"#);
        svg.line(xs.map(iv.low), y, xs.map(iv.high), y, c, r#" stroke-width="2""#);
        svg.circle(xs.map(iv.estimate), y, 4.0, c, "");
        svg.text(left - 8.0, y + 4.0, "end", &iv.label, "");
        svg.raw("</g>");
    }
    svg.finish()
}

fn selection(title: &str, ranked_means: &[f64], cut_positions: &[usize], chosen_k: usize) -> String {
    let n = ranked_means.len();
    let xs = Scale::new(1.0, n.max(1) as f64, plot_left(), plot_right());
    let (y0, y1) = extent(ranked_means.iter().copied().chain([0.0]));
    let ys = Scale::new(y0, y1, plot_bottom(), plot_top());
    let mut svg = Svg::new(title);
    x_axis_numeric(&mut svg, &xs, "feature rank");
    y_axis(&mut svg, &ys, "mean |SHAP|");
    if chosen_k > 0 && chosen_k <= n {
        let x_end = xs.map(chosen_k as f64 + 0.5).min(plot_right());
        let _ = writeln!(
            svg.out,
            r##"<rect class="chosen" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#2ca02c" fill-opacity="0.12"/>"##,
            plot_left(),
            plot_top(),
            x_end - plot_left(),
            plot_bottom() - plot_top()
        );
    }
    for &k in cut_positions {
        let x = xs.map(k as f64 + 0.5);
        svg.line(x, plot_top(), x, plot_bottom(), "#d62728", r#" class="cut" stroke-dasharray="5 3""#);
    }
    let pts: Vec<String> = ranked_means
        .iter()
        .enumerate()
        .map(|(i, m)| format!("{:.2},{:.2}", xs.map((i + 1) as f64), ys.map(*m)))
        .collect();
    svg.raw(&format!(r##"<polyline points="{}" fill="none" stroke="#1f77b4"/>"##, pts.join(" ")));
    for (i, m) in ranked_means.iter().enumerate() {
        svg.circle(xs.map((i + 1) as f64), ys.map(*m), 3.0, "#1f77b4", "");
    }
    svg.text(
        plot_right() - 4.0,
        plot_top() + 14.0,
        "end",
        &format!("{} cuts; {} features selected", cut_positions.len(), chosen_k),
        "",
    );
    svg.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scatter_payload(n: usize) -> PlotPayload {
        let x: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        PlotPayload::Scatter {
            title: "f".into(),
            x_label: "x".into(),
            y_label: "SHAP".into(),
            series: vec![ScatterSeries {
                label: "all".into(),
                curve: Some(x.iter().map(|&v| (v, 2.0 * v + 1.0)).collect()),
                x,
                y,
            }],
        }
    }

    #[test]
    fn scatter_structure() {
        let svg = render_svg(&scatter_payload(37));
        assert_eq!(svg.matches("<circle").count(), 37);
        assert_eq!(svg.matches("<path").count(), 1);
    }

    #[test]
    fn box_structure() {
        let groups: Vec<BoxGroup> = (0..4)
            .map(|k| BoxGroup {
                label: k.to_string(),
                values: (0..10).map(|i| (i * k) as f64).collect(),
                series: 0,
            })
            .collect();
        let svg = render_svg(&PlotPayload::Box {
            title: "b".into(),
            x_label: "c".into(),
            y_label: "SHAP".into(),
            groups,
            legend: vec![],
        });
        assert_eq!(svg.matches(r#"<g class="box">"#).count(), 4);
    }

    #[test]
    fn rendering_is_deterministic() {
        let p = scatter_payload(100);
        assert_eq!(render_svg(&p), render_svg(&p));
    }

    #[test]
    fn text_is_escaped() {
        let svg = render_svg(&PlotPayload::Tukey {
            title: "a < b & \"c\"".into(),
            intervals: vec![Interval {
                label: "1 vs 0".into(),
                estimate: 0.5,
                low: 0.2,
                high: 0.8,
                significant: true,
            }],
        });
        assert!(svg.contains("a &lt; b &amp; &quot;c&quot;"));
        assert_eq!(svg.matches(r#"class="interval""#).count(), 1);
    }

    #[test]
    fn selection_marks_cuts() {
        let svg = render_svg(&PlotPayload::Selection {
            title: "s".into(),
            ranked_means: vec![1.0, 0.9, 0.4, 0.1],
            cut_positions: vec![2, 3],
            chosen_k: 2,
        });
        assert_eq!(svg.matches(r#"class="cut""#).count(), 2);
        assert_eq!(svg.matches("<circle").count(), 4);
    }

    #[test]
    fn ticks_are_round() {
        let s = Scale::new(0.0, 10.0, 0.0, 100.0);
        let t = s.ticks();
        assert!(t.contains(&0.0) && t.contains(&10.0));
        assert!(t.len() >= 3 && t.len() <= 7);
    }
}
