//! Minimal SVG plots. Coordinates are printed with fixed precision so the
//! files are byte-stable.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn fit(points: &[(f64, f64)], equal_aspect: bool) -> Frame {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in points.iter().filter(|(x, y)| x.is_finite() && y.is_finite()) {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !(x0 <= x1) {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        let pad = |lo: f64, hi: f64| {
            let w = hi - lo;
            let w = if w > 0.0 { w } else { lo.abs().max(1.0) };
            (lo - 0.05 * w, hi + 0.05 * w)
        };
        let (mut x0, mut x1) = pad(x0, x1);
        let (mut y0, mut y1) = pad(y0, y1);
        if equal_aspect {
            let (pw, ph) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
            let scale = ((x1 - x0) / pw).max((y1 - y0) / ph);
            let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
            (x0, x1) = (cx - 0.5 * scale * pw, cx + 0.5 * scale * pw);
            (y0, y1) = (cy - 0.5 * scale * ph, cy + 0.5 * scale * ph);
        }
        Frame { x0, x1, y0, y1 }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let px = MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN);
        let py = HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN);
        (px, py)
    }
}

fn header(out: &mut String, title: &str, stamp: Option<&str>) {
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    if let Some(s) = stamp {
        let _ = writeln!(out, "<!-- {s} -->");
    }
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(out, "<rect x=\"{l:.1}\" y=\"{t:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"#444\"/>", r - l, b - t);
    let label = |out: &mut String, x: f64, y: f64, anchor: &str, text: &str| {
        let _ = writeln!(
            out,
            "<text x=\"{x:.1}\" y=\"{y:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"{anchor}\">{}</text>",
            escape(text)
        );
    };
    label(out, l, b + 16.0, "start", &format!("{:.4e}", f.x0));
    label(out, r, b + 16.0, "end", &format!("{:.4e}", f.x1));
    label(out, l - 4.0, b, "end", &format!("{:.3e}", f.y0));
    label(out, l - 4.0, t + 8.0, "end", &format!("{:.3e}", f.y1));
    label(out, WIDTH / 2.0, HEIGHT - 12.0, "middle", x_label);
    label(out, 14.0, HEIGHT / 2.0, "start", y_label);
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// A polyline through `points`; `equal_aspect` for plane curves.
pub fn polyline(title: &str, x_label: &str, y_label: &str, points: &[(f64, f64)], equal_aspect: bool, stamp: Option<&str>) -> String {
    let f = Frame::fit(points, equal_aspect);
    let mut out = String::new();
    header(&mut out, title, stamp);
    axes(&mut out, &f, x_label, y_label);
    out.push_str("<polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"1.5\" points=\"");
    for (k, &(x, y)) in points.iter().enumerate() {
        let (px, py) = f.map(x, y);
        if k > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{px:.2},{py:.2}");
    }
    out.push_str("\"/>\n</svg>\n");
    out
}

/// Scatter of `(t, value)` on a log-t axis with a dashed horizontal line at `limit`.
pub fn log_scatter(title: &str, y_label: &str, points: &[(f64, f64)], limit: f64, stamp: Option<&str>) -> String {
    let logged: Vec<(f64, f64)> = points.iter().map(|&(t, v)| (t.log10(), v)).collect();
    let mut framed = logged.clone();
    if let Some(&(x, _)) = logged.first() {
        framed.push((x, limit));
    }
    let f = Frame::fit(&framed, false);
    let mut out = String::new();
    header(&mut out, title, stamp);
    axes(&mut out, &f, "log10 t", y_label);
    let (lx, ly) = f.map(f.x0, limit);
    let (rx, _) = f.map(f.x1, limit);
    let _ = writeln!(
        out,
        "<line x1=\"{lx:.2}\" y1=\"{ly:.2}\" x2=\"{rx:.2}\" y2=\"{ly:.2}\" stroke=\"#bf3f1f\" stroke-dasharray=\"6 4\"/>"
    );
    for &(x, y) in &logged {
        let (px, py) = f.map(x, y);
        let _ = writeln!(out, "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"3\" fill=\"#1f5fbf\"/>");
    }
    out.push_str("</svg>\n");
    out
}
