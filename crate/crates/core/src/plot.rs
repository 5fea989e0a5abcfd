//! Minimal hand-written SVG output: scatter and line charts, heatmaps and
//! histograms. Output is deterministic text so reports stay reproducible.

use std::fmt::Write as _;

use crate::metrics::BeliefHistogram;

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;
pub const PALETTE: [&str; 6] = ["#000000", "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#8c564b"];

/// A named set of points. Dashed series are drawn as connected lines.
#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub color: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

impl Series {
    pub fn new(name: impl Into<String>, color: &str, points: Vec<(f64, f64)>) -> Self {
        Self {
            name: name.into(),
            color: color.to_string(),
            points,
            dashed: false,
        }
    }
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, v: f64) -> f64 {
        MARGIN + (v - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, v: f64) -> f64 {
        HEIGHT - MARGIN - (v - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn open(header: &str, title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(s, "<!-- {} -->", escape(header.trim().trim_start_matches('#').trim()));
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"11\">"
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">{}</text>",
        WIDTH / 2.0,
        escape(title)
    );
    s
}

fn axes(s: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let (x0, x1) = (MARGIN, WIDTH - MARGIN);
    let (y0, y1) = (HEIGHT - MARGIN, MARGIN);
    let _ = writeln!(s, "<rect x=\"{x0}\" y=\"{y1}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>", x1 - x0, y0 - y1);
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let xv = frame.x.0 + t * (frame.x.1 - frame.x.0);
        let yv = frame.y.0 + t * (frame.y.1 - frame.y.0);
        let _ = writeln!(s, "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>", frame.px(xv), y0 + 14.0, tick(xv));
        let _ = writeln!(s, "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>", x0 - 4.0, frame.py(yv) + 4.0, tick(yv));
    }
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>", WIDTH / 2.0, HEIGHT - 16.0, escape(x_label));
    let _ = writeln!(
        s,
        "<text x=\"14\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {0})\">{1}</text>",
        HEIGHT / 2.0,
        escape(y_label)
    );
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.1e}")
    } else {
        format!("{v:.2}")
    }
}

fn legend(s: &mut String, series: &[Series]) {
    for (k, ser) in series.iter().enumerate() {
        let y = MARGIN + 12.0 + 14.0 * k as f64;
        let _ = writeln!(s, "<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"3\" fill=\"{}\"/>", MARGIN + 8.0, y - 4.0, ser.color);
        let _ = writeln!(s, "<text x=\"{}\" y=\"{y}\">{}</text>", MARGIN + 22.0, escape(&ser.name));
    }
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

/// Scatter plot; with `identity` the axes share one range and the line
/// `y = x` is overlaid. `bounds` fixes `(x_lo, x_hi, y_lo, y_hi)`.
pub fn scatter_svg(
    header: &str,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    identity: bool,
    bounds: Option<(f64, f64, f64, f64)>,
) -> String {
    let frame = match bounds {
        Some((a, b, c, d)) => Frame { x: (a, b), y: (c, d) },
        None => {
            let x = extent(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
            let y = extent(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
            if identity {
                let r = (x.0.min(y.0), x.1.max(y.1));
                Frame { x: r, y: r }
            } else {
                Frame { x, y }
            }
        }
    };
    let mut s = open(header, title);
    axes(&mut s, &frame, x_label, y_label);
    if identity {
        let lo = frame.x.0.max(frame.y.0);
        let hi = frame.x.1.min(frame.y.1);
        let _ = writeln!(
            s,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>",
            frame.px(lo),
            frame.py(lo),
            frame.px(hi),
            frame.py(hi)
        );
    }
    for ser in series {
        if ser.dashed {
            polyline(&mut s, &frame, ser);
            continue;
        }
        let _ = writeln!(s, "<g fill=\"{}\" fill-opacity=\"0.5\">", ser.color);
        for &(x, y) in ser.points.iter().filter(|p| p.0.is_finite() && p.1.is_finite()) {
            let _ = writeln!(s, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\"/>", frame.px(x), frame.py(y));
        }
        s.push_str("</g>\n");
    }
    legend(&mut s, series);
    s.push_str("</svg>\n");
    s
}

fn polyline(s: &mut String, frame: &Frame, ser: &Series) {
    let pts: Vec<String> = ser
        .points
        .iter()
        .filter(|p| p.0.is_finite() && p.1.is_finite())
        .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
        .collect();
    let dash = if ser.dashed { " stroke-dasharray=\"5 3\"" } else { "" };
    let _ = writeln!(
        s,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{dash}/>",
        pts.join(" "),
        ser.color
    );
}

/// Connected curves, e.g. a dose-response plot.
pub fn line_svg(header: &str, title: &str, x_label: &str, y_label: &str, curves: &[Series], bounds: Option<(f64, f64, f64, f64)>) -> String {
    let frame = match bounds {
        Some((a, b, c, d)) => Frame { x: (a, b), y: (c, d) },
        None => Frame {
            x: extent(curves.iter().flat_map(|s| s.points.iter().map(|p| p.0))),
            y: extent(curves.iter().flat_map(|s| s.points.iter().map(|p| p.1))),
        },
    };
    let mut s = open(header, title);
    axes(&mut s, &frame, x_label, y_label);
    for c in curves {
        polyline(&mut s, &frame, c);
    }
    legend(&mut s, curves);
    s.push_str("</svg>\n");
    s
}

/// Grid of values, rows top to bottom, with a grey-to-red colour scale.
pub fn heatmap_svg(header: &str, title: &str, x_label: &str, y_label: &str, x_ticks: &[String], y_ticks: &[String], values: &[Vec<f64>]) -> String {
    let (lo, hi) = extent(values.iter().flatten().copied());
    let rows = values.len().max(1);
    let cols = values.iter().map(Vec::len).max().unwrap_or(1).max(1);
    let cw = (WIDTH - 2.0 * MARGIN) / cols as f64;
    let ch = (HEIGHT - 2.0 * MARGIN) / rows as f64;
    let mut s = open(header, &format!("{title} (range {} to {})", tick(lo), tick(hi)));
    for (r, row) in values.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            let t = if v.is_finite() { ((v - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.0 };
            let (red, gb) = (200.0 + 55.0 * t, 230.0 * (1.0 - t));
            let (x, y) = (MARGIN + c as f64 * cw, MARGIN + r as f64 * ch);
            let _ = writeln!(
                s,
                "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{cw:.2}\" height=\"{ch:.2}\" fill=\"rgb({red:.0},{gb:.0},{gb:.0})\" stroke=\"white\"/>"
            );
            let _ = writeln!(s, "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>", x + cw / 2.0, y + ch / 2.0 + 4.0, tick(v));
        }
    }
    for (c, t) in x_ticks.iter().enumerate().take(cols) {
        let _ = writeln!(s, "<text x=\"{:.2}\" y=\"{}\" text-anchor=\"middle\">{}</text>", MARGIN + (c as f64 + 0.5) * cw, HEIGHT - MARGIN + 14.0, escape(t));
    }
    for (r, t) in y_ticks.iter().enumerate().take(rows) {
        let _ = writeln!(s, "<text x=\"{}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>", MARGIN - 4.0, MARGIN + (r as f64 + 0.5) * ch + 4.0, escape(t));
    }
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>", WIDTH / 2.0, HEIGHT - 16.0, escape(x_label));
    let _ = writeln!(
        s,
        "<text x=\"14\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {0})\">{1}</text>",
        HEIGHT / 2.0,
        escape(y_label)
    );
    s.push_str("</svg>\n");
    s
}

pub fn histogram_svg(header: &str, title: &str, hist: &BeliefHistogram) -> String {
    let peak = hist.counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    let frame = Frame {
        x: (hist.lo, hist.hi),
        y: (0.0, peak),
    };
    let mut s = open(header, title);
    axes(&mut s, &frame, "belief", "count");
    s.push_str("<g fill=\"#1f77b4\">\n");
    for (k, &c) in hist.counts.iter().enumerate() {
        let (a, b) = hist.bin_edges(k);
        let (x0, x1) = (frame.px(a), frame.px(b));
        let top = frame.py(c as f64);
        let _ = writeln!(
            s,
            "<rect x=\"{x0:.2}\" y=\"{top:.2}\" width=\"{:.2}\" height=\"{:.2}\"/>",
            (x1 - x0).max(0.5),
            frame.py(0.0) - top
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scatter_has_identity_line_and_points() {
        let svg = scatter_svg(
            "# cbp config=x seed=1",
            "BP",
            "exact",
            "approx",
            &[Series::new("bp", PALETTE[0], vec![(0.1, 0.2), (0.9, 0.95)])],
            true,
            Some((0.0, 1.0, 0.0, 1.0)),
        );
        assert!(svg.starts_with("<?xml"));
        assert!(svg.contains("<!-- cbp config=x seed=1 -->"));
        assert!(svg.contains("stroke-dasharray"));
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn heatmap_and_histogram_render() {
        let svg = heatmap_svg("h", "R", "beta", "K", &["0.1".into(), "0.2".into()], &["10".into()], &[vec![1.0, 2.0]]);
        assert_eq!(svg.matches("<rect x=").count(), 2);
        let hist = BeliefHistogram {
            lo: -1.0,
            hi: 1.0,
            counts: vec![1, 0, 3, 2],
        };
        let svg = histogram_svg("h", "hist", &hist);
        assert_eq!(svg.matches("<rect x=").count(), 4 + 1);
        assert!(!line_svg("h", "t", "x", "y", &[Series::new("a", PALETTE[1], vec![(0.0, 1.0), (1.0, 2.0)])], None).contains("NaN"));
    }

    #[test]
    fn text_is_escaped() {
        let svg = scatter_svg("h", "a<b & c", "x", "y", &[], false, None);
        assert!(svg.contains("a&lt;b &amp; c"));
    }
}
