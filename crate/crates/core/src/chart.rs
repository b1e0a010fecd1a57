//! Static SVG charts: scatter and line plots plus a four-panel residual
//! grid. Output is a self-contained SVG string with deterministic
//! formatting, so identical inputs produce byte-identical files.

use std::fmt::Write as _;

/// One named point series.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Series {
        Series {
            label: label.into(),
            points,
        }
    }
}

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

struct Frame {
    x0: f64,
    y0: f64,
    width: f64,
    height: f64,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        self.x0 + (v - self.x_min) / (self.x_max - self.x_min) * self.width
    }

    fn y(&self, v: f64) -> f64 {
        // SVG y grows downward.
        self.y0 + self.height - (v - self.y_min) / (self.y_max - self.y_min) * self.height
    }
}

fn data_range(series: &[Series], pick_x: bool) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            let v = if pick_x { x } else { y };
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        // Degenerate span: pad to something drawable.
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        return (lo - pad, hi + pad);
    }
    let pad = (hi - lo) * 0.06;
    (lo - pad, hi + pad)
}

/// Tick step of the form 1/2/5 x 10^k giving 4-8 divisions.
fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
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
    };
    step * mag
}

fn fmt_tick(v: f64, step: f64) -> String {
    if step >= 1.0 {
        format!("{:.0}", v)
    } else {
        let decimals = (-step.log10().floor()) as usize;
        format!("{:.*}", decimals, v)
    }
}

fn push_axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let bottom = frame.y0 + frame.height;
    let _ = write!(
        out,
        "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>",
        frame.x0, frame.y0, frame.width, frame.height
    );
    // X ticks.
    let step = nice_step(frame.x_max - frame.x_min);
    let mut t = (frame.x_min / step).ceil() * step;
    while t <= frame.x_max + 1e-9 {
        let px = frame.x(t);
        let _ = write!(
            out,
            "<line x1=\"{px:.2}\" y1=\"{bottom:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"#333\" stroke-width=\"1\"/>",
            bottom + 4.0
        );
        let _ = write!(
            out,
            "<text x=\"{px:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\" fill=\"#333\">{}</text>",
            bottom + 16.0,
            fmt_tick(t, step)
        );
        t += step;
    }
    // Y ticks.
    let step = nice_step(frame.y_max - frame.y_min);
    let mut t = (frame.y_min / step).ceil() * step;
    while t <= frame.y_max + 1e-9 {
        let py = frame.y(t);
        let _ = write!(
            out,
            "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{:.2}\" y2=\"{py:.2}\" stroke=\"#333\" stroke-width=\"1\"/>",
            frame.x0 - 4.0,
            frame.x0
        );
        let _ = write!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\" fill=\"#333\">{}</text>",
            frame.x0 - 7.0,
            py + 4.0,
            fmt_tick(t, step)
        );
        t += step;
    }
    // Axis labels.
    let _ = write!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\" fill=\"#111\">{}</text>",
        frame.x0 + frame.width / 2.0,
        bottom + 34.0,
        escape_xml(x_label)
    );
    let _ = write!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\" fill=\"#111\" transform=\"rotate(-90 {:.2} {:.2})\">{}</text>",
        frame.x0 - 42.0,
        frame.y0 + frame.height / 2.0,
        frame.x0 - 42.0,
        frame.y0 + frame.height / 2.0,
        escape_xml(y_label)
    );
}

fn push_zero_line(out: &mut String, frame: &Frame) {
    if frame.y_min < 0.0 && frame.y_max > 0.0 {
        let py = frame.y(0.0);
        let _ = write!(
            out,
            "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{:.2}\" y2=\"{py:.2}\" stroke=\"#888\" stroke-width=\"1\" stroke-dasharray=\"5,4\"/>",
            frame.x0,
            frame.x0 + frame.width
        );
    }
}

fn push_series(out: &mut String, frame: &Frame, series: &[Series], connect: bool) {
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if connect && s.points.len() > 1 {
            let mut path = String::new();
            for (j, &(x, y)) in s.points.iter().enumerate() {
                let _ = write!(
                    path,
                    "{}{:.2},{:.2}",
                    if j == 0 { "M" } else { " L" },
                    frame.x(x),
                    frame.y(y)
                );
            }
            let _ = write!(
                out,
                "<path d=\"{path}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>"
            );
        }
        for &(x, y) in &s.points {
            let _ = write!(
                out,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>",
                frame.x(x),
                frame.y(y)
            );
        }
    }
}

fn push_legend(out: &mut String, frame: &Frame, series: &[Series]) {
    if series.len() < 2 {
        return;
    }
    let x = frame.x0 + frame.width - 130.0;
    let mut y = frame.y0 + 14.0;
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let _ = write!(
            out,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"{color}\"/>",
            x,
            y - 4.0
        );
        let _ = write!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" fill=\"#111\">{}</text>",
            x + 10.0,
            y,
            escape_xml(&s.label)
        );
        y += 16.0;
    }
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    zero_line: bool,
    connect: bool,
) -> String {
    let width = 720.0;
    let height = 480.0;
    let frame_data = {
        let (x_min, x_max) = data_range(series, true);
        let (mut y_min, mut y_max) = data_range(series, false);
        if zero_line {
            y_min = y_min.min(-0.02 * (y_max - y_min));
            y_max = y_max.max(0.02 * (y_max - y_min));
        }
        Frame {
            x0: 66.0,
            y0: 40.0,
            width: width - 66.0 - 24.0,
            height: height - 40.0 - 60.0,
            x_min,
            x_max,
            y_min,
            y_max,
        }
    };
    let mut out = String::new();
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">"
    );
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = write!(
        out,
        "<text x=\"{:.2}\" y=\"24\" font-size=\"15\" text-anchor=\"middle\" fill=\"#111\">{}</text>",
        width / 2.0,
        escape_xml(title)
    );
    let total_points: usize = series.iter().map(|s| s.points.len()).sum();
    if total_points == 0 {
        let _ = write!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\" fill=\"#666\">no data</text>",
            width / 2.0,
            height / 2.0
        );
        out.push_str("</svg>");
        return out;
    }
    push_axes(&mut out, &frame_data, x_label, y_label);
    if zero_line {
        push_zero_line(&mut out, &frame_data);
    }
    push_series(&mut out, &frame_data, series, connect);
    push_legend(&mut out, &frame_data, series);
    out.push_str("</svg>");
    out
}

/// Scatter plot; optional dashed horizontal zero reference line.
pub fn scatter_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    zero_line: bool,
) -> String {
    chart(title, x_label, y_label, series, zero_line, false)
}

/// Line plot (points connected in input order) with markers.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    chart(title, x_label, y_label, series, false, true)
}

/// Four fixed panels in a 2x2 grid sharing the y scale, each with a zero
/// reference line; made for the per-component residual trajectories.
pub fn four_panel_chart(title: &str, x_label: &str, y_label: &str, panels: &[(String, Vec<(f64, f64)>)]) -> String {
    assert_eq!(panels.len(), 4, "four_panel_chart wants exactly 4 panels");
    let width = 760.0;
    let height = 560.0;
    let all: Vec<Series> = panels
        .iter()
        .map(|(label, pts)| Series::new(label.clone(), pts.clone()))
        .collect();
    let (x_min, x_max) = data_range(&all, true);
    let (mut y_min, mut y_max) = data_range(&all, false);
    // Panels share the residual scale and always show zero.
    y_min = y_min.min(-0.5);
    y_max = y_max.max(0.5);

    let mut out = String::new();
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">"
    );
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = write!(
        out,
        "<text x=\"{:.2}\" y=\"24\" font-size=\"15\" text-anchor=\"middle\" fill=\"#111\">{}</text>",
        width / 2.0,
        escape_xml(title)
    );
    let panel_w = (width - 3.0 * 66.0) / 2.0;
    let panel_h = (height - 40.0 - 2.0 * 78.0) / 2.0;
    for (i, (label, pts)) in panels.iter().enumerate() {
        let col = (i % 2) as f64;
        let row = (i / 2) as f64;
        let frame = Frame {
            x0: 66.0 + col * (panel_w + 66.0),
            y0: 48.0 + row * (panel_h + 78.0),
            width: panel_w,
            height: panel_h,
            x_min,
            x_max,
            y_min,
            y_max,
        };
        let _ = write!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\" fill=\"#111\">{}</text>",
            frame.x0 + frame.width / 2.0,
            frame.y0 - 6.0,
            escape_xml(label)
        );
        push_axes(&mut out, &frame, x_label, y_label);
        push_zero_line(&mut out, &frame);
        let series = [Series::new(label.clone(), pts.clone())];
        push_series(&mut out, &frame, &series, true);
    }
    out.push_str("</svg>");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_series() -> Vec<Series> {
        vec![Series::new(
            "a",
            vec![(2000.0, 0.01), (2001.0, -0.02), (2002.0, 0.03)],
        )]
    }

    #[test]
    fn scatter_is_wellformed_and_deterministic() {
        let s = sample_series();
        let svg = scatter_chart("Improvement by season", "season", "I", &s, true);
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("stroke-dasharray"), "zero line missing");
        let again = scatter_chart("Improvement by season", "season", "I", &s, true);
        assert_eq!(svg, again);
    }

    #[test]
    fn line_chart_connects_points() {
        let s = sample_series();
        let svg = line_chart("eta by season", "season", "eta", &s);
        assert!(svg.contains("<path"));
        assert_eq!(svg.matches("<circle").count(), 3);
    }

    #[test]
    fn overlay_gets_a_legend() {
        let s = vec![
            Series::new("batters", vec![(2000.0, 0.06), (2001.0, 0.061)]),
            Series::new("pitchers", vec![(2000.0, 0.02), (2001.0, 0.021)]),
        ];
        let svg = line_chart("sd by season", "season", "sd", &s);
        assert!(svg.contains(">batters</text>"));
        assert!(svg.contains(">pitchers</text>"));
    }

    #[test]
    fn empty_series_is_handled() {
        let svg = scatter_chart("t", "x", "y", &[Series::new("a", vec![])], true);
        assert!(svg.contains("no data"));
        assert!(svg.ends_with("</svg>"));
    }

    #[test]
    fn four_panel_layout() {
        let panels: Vec<(String, Vec<(f64, f64)>)> = ["BB", "SO", "HR", "HIP"]
            .iter()
            .map(|c| {
                (
                    c.to_string(),
                    vec![(2000.0, -0.5), (2001.0, 0.8), (2002.0, 0.1)],
                )
            })
            .collect();
        let svg = four_panel_chart("Standardized residuals", "season", "z", &panels);
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 12);
        assert_eq!(svg.matches(">BB</text>").count(), 1);
        assert_eq!(svg.matches("stroke-dasharray").count(), 4);
        assert!(!svg.contains("&quot;"));
    }

    #[test]
    fn titles_are_escaped() {
        let svg = scatter_chart(
            "a < b & c",
            "x",
            "y",
            &[Series::new("s", vec![(1.0, 2.0)])],
            false,
        );
        assert!(svg.contains("a &lt; b &amp; c"));
    }

    #[test]
    fn degenerate_single_point_still_draws() {
        let svg = scatter_chart("t", "x", "y", &[Series::new("a", vec![(5.0, 5.0)])], false);
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(!svg.contains("NaN"));
    }
}
