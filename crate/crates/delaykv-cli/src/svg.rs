//! Minimal self-contained SVG plots: one polyline or one point cloud with
//! axes and numeric corner labels. Non-finite samples are dropped before
//! scaling.

use std::fs;
use std::path::Path;

use crate::CliError;

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: f64 = 64.0;

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn from_points(points: &[(f64, f64)]) -> Option<Frame> {
        let mut it = points.iter();
        let &(x0, y0) = it.next()?;
        let mut f = Frame {
            x_min: x0,
            x_max: x0,
            y_min: y0,
            y_max: y0,
        };
        for &(x, y) in it {
            f.x_min = f.x_min.min(x);
            f.x_max = f.x_max.max(x);
            f.y_min = f.y_min.min(y);
            f.y_max = f.y_max.max(y);
        }
        if f.x_max - f.x_min < 1e-300 {
            f.x_min -= 0.5;
            f.x_max += 0.5;
        }
        if f.y_max - f.y_min < 1e-300 {
            f.y_min -= 0.5;
            f.y_max += 0.5;
        }
        Some(f)
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x_min) / (self.x_max - self.x_min) * (W - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        H - MARGIN - (y - self.y_min) / (self.y_max - self.y_min) * (H - 2.0 * MARGIN)
    }
}

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"15\">{title}</text>\n",
        W / 2.0
    )
}

fn axes(frame: &Frame, x_label: &str, y_label: &str) -> String {
    let x0 = MARGIN;
    let x1 = W - MARGIN;
    let y0 = H - MARGIN;
    let y1 = MARGIN;
    let mut s = String::new();
    s.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n\
         <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n"
    ));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"12\">{x_label}</text>\n",
        W / 2.0,
        H - 16.0
    ));
    s.push_str(&format!(
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"12\" transform=\"rotate(-90 16 {})\">{y_label}</text>\n",
        H / 2.0,
        H / 2.0
    ));
    for (value, px, py, anchor) in [
        (frame.x_min, x0, y0 + 18.0, "start"),
        (frame.x_max, x1, y0 + 18.0, "end"),
        (frame.y_min, x0 - 6.0, y0, "end"),
        (frame.y_max, x0 - 6.0, y1 + 4.0, "end"),
    ] {
        s.push_str(&format!(
            "<text x=\"{px}\" y=\"{py}\" text-anchor=\"{anchor}\" \
             font-family=\"sans-serif\" font-size=\"10\">{value:.3e}</text>\n"
        ));
    }
    s
}

fn write_svg(path: &Path, body: String) -> Result<(), CliError> {
    fs::write(path, body).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

fn finite(points: impl Iterator<Item = (f64, f64)>) -> Vec<(f64, f64)> {
    points
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect()
}

pub fn line_plot(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    xs: &[f64],
    ys: &[f64],
) -> Result<(), CliError> {
    let points = finite(xs.iter().copied().zip(ys.iter().copied()));
    let mut body = header(title);
    if let Some(frame) = Frame::from_points(&points) {
        body.push_str(&axes(&frame, x_label, y_label));
        let coords: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
            .collect();
        body.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" \
             stroke-width=\"1.5\"/>\n",
            coords.join(" ")
        ));
    } else {
        body.push_str("<text x=\"320\" y=\"210\" text-anchor=\"middle\">no data</text>\n");
    }
    body.push_str("</svg>\n");
    write_svg(path, body)
}

pub fn scatter_plot(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    points: &[(f64, f64)],
) -> Result<(), CliError> {
    let points = finite(points.iter().copied());
    let mut body = header(title);
    if let Some(frame) = Frame::from_points(&points) {
        body.push_str(&axes(&frame, x_label, y_label));
        for &(x, y) in &points {
            body.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"#d62728\"/>\n",
                frame.px(x),
                frame.py(y)
            ));
        }
    } else {
        body.push_str("<text x=\"320\" y=\"210\" text-anchor=\"middle\">no data</text>\n");
    }
    body.push_str("</svg>\n");
    write_svg(path, body)
}
