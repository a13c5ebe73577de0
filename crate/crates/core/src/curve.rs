//! Slits in the upper half-plane stored as polylines.

use crate::error::{LabError, Result};
use crate::types::ComplexPoint;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

/// A simple polyline from the origin into the upper half-plane.
///
/// `arc_length[k]` is the length of the curve up to vertex `k` (exact for
/// generated curves, accumulated chords otherwise). `capacity[k]`, when
/// present, is the half-plane capacity of the prefix ending at vertex `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    vertices: Vec<ComplexPoint>,
    arc_length: Vec<f64>,
    capacity: Option<Vec<f64>>,
}

fn chord_lengths(vertices: &[ComplexPoint]) -> Vec<f64> {
    let mut s = Vec::with_capacity(vertices.len());
    let mut acc = 0.0;
    s.push(0.0);
    for w in vertices.windows(2) {
        acc += (w[1] - w[0]).norm();
        s.push(acc);
    }
    s
}

fn orient(a: ComplexPoint, b: ComplexPoint, c: ComplexPoint) -> f64 {
    (b - a).re * (c - a).im - (b - a).im * (c - a).re
}

fn segments_touch(p1: ComplexPoint, p2: ComplexPoint, q1: ComplexPoint, q2: ComplexPoint) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |a: ComplexPoint, b: ComplexPoint, c: ComplexPoint, d: f64| {
        d == 0.0 && c.re >= a.re.min(b.re) && c.re <= a.re.max(b.re) && c.im >= a.im.min(b.im) && c.im <= a.im.max(b.im)
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

impl Curve {
    pub fn new(vertices: Vec<ComplexPoint>, arc_length: Vec<f64>, capacity: Option<Vec<f64>>) -> Result<Self> {
        let op = "Curve::new";
        if vertices.len() < 2 {
            return Err(LabError::input(op, "a curve needs at least two vertices"));
        }
        if vertices.len() != arc_length.len() || capacity.as_ref().is_some_and(|c| c.len() != vertices.len()) {
            return Err(LabError::input(op, "per-vertex columns must have equal length"));
        }
        if vertices[0] != Complex64::new(0.0, 0.0) {
            return Err(LabError::input(op, format!("curve must start at the origin, got {}", vertices[0])));
        }
        if let Some((k, v)) = vertices.iter().enumerate().skip(1).find(|(_, v)| !(v.im > 0.0 && v.re.is_finite())) {
            return Err(LabError::input(op, format!("vertex {k} = {v} is not in the open upper half-plane")));
        }
        if arc_length[0] != 0.0 {
            return Err(LabError::input(op, "arc length must start at 0"));
        }
        if let Some(k) = arc_length.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(LabError::input(op, format!("arc length not strictly increasing at vertex {}", k + 1)));
        }
        if let Some(cap) = &capacity {
            if cap[0] != 0.0 {
                return Err(LabError::input(op, "capacity must start at 0"));
            }
            if let Some(k) = cap.windows(2).position(|w| !(w[1] > w[0])) {
                return Err(LabError::input(op, format!("capacity not strictly increasing at vertex {}", k + 1)));
            }
        }
        let curve = Curve { vertices, arc_length, capacity };
        curve.check_simple()?;
        Ok(curve)
    }

    pub fn from_vertices(vertices: Vec<ComplexPoint>) -> Result<Self> {
        let s = chord_lengths(&vertices);
        Self::new(vertices, s, None)
    }

    pub fn from_vertices_with_capacity(vertices: Vec<ComplexPoint>, capacity: Vec<f64>) -> Result<Self> {
        let s = chord_lengths(&vertices);
        Self::new(vertices, s, Some(capacity))
    }

    fn check_simple(&self) -> Result<()> {
        let v = &self.vertices;
        let n = v.len() - 1;
        let boxes: Vec<(f64, f64, f64, f64)> = v
            .windows(2)
            .map(|w| (w[0].re.min(w[1].re), w[0].re.max(w[1].re), w[0].im.min(w[1].im), w[0].im.max(w[1].im)))
            .collect();
        for i in 0..n {
            let bi = boxes[i];
            for j in (i + 2)..n {
                let bj = boxes[j];
                if bj.0 > bi.1 || bj.1 < bi.0 || bj.2 > bi.3 || bj.3 < bi.2 {
                    continue;
                }
                if segments_touch(v[i], v[i + 1], v[j], v[j + 1]) {
                    return Err(LabError::input(
                        "Curve::new",
                        format!("curve is not simple: segments {i} and {j} intersect"),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[ComplexPoint] {
        &self.vertices
    }

    pub fn arc_length(&self) -> &[f64] {
        &self.arc_length
    }

    pub fn capacity(&self) -> Option<&[f64]> {
        self.capacity.as_deref()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        *self.arc_length.last().expect("non-empty")
    }

    pub fn tip(&self) -> ComplexPoint {
        *self.vertices.last().expect("non-empty")
    }

    pub fn with_capacity(&self, capacity: Vec<f64>) -> Result<Self> {
        Curve::new(self.vertices.clone(), self.arc_length.clone(), Some(capacity))
    }

    /// The curve scaled by `alpha > 0`; capacities scale by `alpha^2`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(LabError::input("Curve::scaled", format!("need alpha > 0, got {alpha}")));
        }
        Curve::new(
            self.vertices.iter().map(|v| v * alpha).collect(),
            self.arc_length.iter().map(|s| s * alpha).collect(),
            self.capacity.as_ref().map(|c| c.iter().map(|t| t * alpha * alpha).collect()),
        )
    }

    /// The first `n` vertices.
    pub fn prefix(&self, n: usize) -> Result<Self> {
        if n < 2 || n > self.len() {
            return Err(LabError::input("Curve::prefix", format!("prefix length {n} out of range 2..={}", self.len())));
        }
        Curve::new(
            self.vertices[..n].to_vec(),
            self.arc_length[..n].to_vec(),
            self.capacity.as_ref().map(|c| c[..n].to_vec()),
        )
    }

    /// CSV with header `s,x,y` or `s,x,y,t`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match &self.capacity {
            Some(cap) => {
                out.push_str("s,x,y,t\n");
                for ((v, s), t) in self.vertices.iter().zip(&self.arc_length).zip(cap) {
                    let _ = writeln!(out, "{},{},{},{}", s, v.re, v.im, t);
                }
            }
            None => {
                out.push_str("s,x,y\n");
                for (v, s) in self.vertices.iter().zip(&self.arc_length) {
                    let _ = writeln!(out, "{},{},{}", s, v.re, v.im);
                }
            }
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn from_csv(text: &str, origin: &str) -> Result<Self> {
        let rows = crate::csv_table::parse(text, origin, &[&["s", "x", "y"], &["s", "x", "y", "t"]])?;
        let with_t = rows.columns == 4;
        let mut vertices = Vec::with_capacity(rows.data.len());
        let mut s = Vec::with_capacity(rows.data.len());
        let mut t = Vec::new();
        for r in &rows.data {
            s.push(r[0]);
            vertices.push(Complex64::new(r[1], r[2]));
            if with_t {
                t.push(r[3]);
            }
        }
        Curve::new(vertices, s, with_t.then_some(t))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv(&text, &path.display().to_string())
    }
}

/// Möbius map `w -> 2w / (2 + i w)`; sends the unit circle centred at `i` onto
/// the real axis.
pub fn arc_to_segment(z: ComplexPoint) -> ComplexPoint {
    2.0 * z / (2.0 + Complex64::i() * z)
}

/// Geometric description of a generated slit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveSpec {
    /// Segment `e^{i theta} s`, `0 <= s <= length`.
    Line { theta: f64, length: f64 },
    /// Unit circle centred at `i`: `sin(phi) + i (1 - cos(phi))`, `0 <= phi <= phi_max`.
    Arc { phi_max: f64 },
    /// `e^{i theta} (s + i kappa s^order)`, `0 <= s <= length`.
    PerturbedLine { theta: f64, kappa: f64, order: u32, length: f64 },
    /// The arc displaced by `kappa phi^order` along its normal towards the centre.
    PerturbedArc { phi_max: f64, kappa: f64, order: u32 },
}

impl CurveSpec {
    fn validate(&self) -> Result<()> {
        let op = "generate_curve";
        let check_theta = |theta: f64| {
            if theta > 0.0 && theta < PI {
                Ok(())
            } else {
                Err(LabError::input(op, format!("theta must lie in (0, pi), got {theta}")))
            }
        };
        let check_len = |length: f64| {
            if length > 0.0 && length.is_finite() {
                Ok(())
            } else {
                Err(LabError::input(op, format!("length must be positive, got {length}")))
            }
        };
        let check_phi = |phi: f64| {
            if phi > 0.0 && phi < PI {
                Ok(())
            } else {
                Err(LabError::input(op, format!("phi_max must lie in (0, pi), got {phi}")))
            }
        };
        let check_kappa = |kappa: f64| {
            if kappa.is_finite() {
                Ok(())
            } else {
                Err(LabError::input(op, "kappa must be finite"))
            }
        };
        match *self {
            CurveSpec::Line { theta, length } => {
                check_theta(theta)?;
                check_len(length)
            }
            CurveSpec::Arc { phi_max } => check_phi(phi_max),
            CurveSpec::PerturbedLine { theta, kappa, order, length } => {
                check_theta(theta)?;
                check_len(length)?;
                check_kappa(kappa)?;
                if order < 5 {
                    return Err(LabError::input(op, format!("perturbed-line needs order >= 5 (tangency of order 4), got {order}")));
                }
                Ok(())
            }
            CurveSpec::PerturbedArc { phi_max, kappa, order } => {
                check_phi(phi_max)?;
                check_kappa(kappa)?;
                if order < 7 {
                    return Err(LabError::input(op, format!("perturbed-arc needs order >= 7 (tangency of order 6), got {order}")));
                }
                Ok(())
            }
        }
    }
}

const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

fn gauss5<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    GL5_NODES.iter().zip(GL5_WEIGHTS).map(|(x, w)| w * f(m + r * x)).sum::<f64>() * r
}

/// Samples `point(u)`, `0 <= u <= u_end`, at `n` points uniform in arc length.
fn sample_by_arc_length<P, S>(point: P, speed: S, u_end: f64, n: usize) -> Result<Curve>
where
    P: Fn(f64) -> ComplexPoint,
    S: Fn(f64) -> f64,
{
    let m = (8 * (n - 1)).max(256);
    let nodes: Vec<f64> = (0..=m).map(|j| u_end * j as f64 / m as f64).collect();
    let mut cumulative = vec![0.0; m + 1];
    for j in 0..m {
        cumulative[j + 1] = cumulative[j] + gauss5(&speed, nodes[j], nodes[j + 1]);
    }
    let total = cumulative[m];
    let mut vertices = Vec::with_capacity(n);
    let mut lengths = Vec::with_capacity(n);
    vertices.push(Complex64::new(0.0, 0.0));
    lengths.push(0.0);
    for k in 1..n {
        let target = total * k as f64 / (n - 1) as f64;
        let u = if k == n - 1 {
            u_end
        } else {
            let j = cumulative.partition_point(|&c| c <= target).clamp(1, m) - 1;
            let (a, b) = (nodes[j], nodes[j + 1]);
            let mut u = a + (b - a) * (target - cumulative[j]) / (cumulative[j + 1] - cumulative[j]);
            for _ in 0..8 {
                let s = cumulative[j] + gauss5(&speed, a, u);
                let step = (s - target) / speed(u);
                u = (u - step).clamp(a, b);
                if step.abs() <= 1e-16 * u_end {
                    break;
                }
            }
            u
        };
        vertices.push(point(u));
        lengths.push(target);
    }
    Curve::new(vertices, lengths, None)
}

fn arc_point(phi: f64) -> ComplexPoint {
    let h = 0.5 * phi;
    Complex64::new(phi.sin(), 2.0 * h.sin() * h.sin())
}

pub fn generate_curve(spec: &CurveSpec, n_vertices: usize) -> Result<Curve> {
    spec.validate()?;
    if n_vertices < 2 {
        return Err(LabError::input("generate_curve", format!("need at least 2 vertices, got {n_vertices}")));
    }
    let last = (n_vertices - 1) as f64;
    match *spec {
        CurveSpec::Line { theta, length } => {
            let (sin, cos) = theta.sin_cos();
            let s: Vec<f64> = (0..n_vertices).map(|k| length * k as f64 / last).collect();
            let v = s.iter().map(|&s| Complex64::new(s * cos, s * sin)).collect();
            Curve::new(v, s, None)
        }
        CurveSpec::Arc { phi_max } => {
            let s: Vec<f64> = (0..n_vertices).map(|k| phi_max * k as f64 / last).collect();
            let v = s.iter().map(|&phi| arc_point(phi)).collect();
            Curve::new(v, s, None)
        }
        CurveSpec::PerturbedLine { theta, length, kappa, .. } if kappa == 0.0 => {
            generate_curve(&CurveSpec::Line { theta, length }, n_vertices)
        }
        CurveSpec::PerturbedArc { phi_max, kappa, .. } if kappa == 0.0 => {
            generate_curve(&CurveSpec::Arc { phi_max }, n_vertices)
        }
        CurveSpec::PerturbedLine { theta, kappa, order, length } => {
            let dir = Complex64::from_polar(1.0, theta);
            let m = order as i32;
            sample_by_arc_length(
                |s| dir * Complex64::new(s, kappa * s.powi(m)),
                |s| (1.0 + (kappa * m as f64 * s.powi(m - 1)).powi(2)).sqrt(),
                length,
                n_vertices,
            )
        }
        CurveSpec::PerturbedArc { phi_max, kappa, order } => {
            let m = order as i32;
            sample_by_arc_length(
                |phi| arc_point(phi) + Complex64::i() * Complex64::from_polar(kappa * phi.powi(m), phi),
                |phi| {
                    let a = 1.0 - kappa * phi.powi(m);
                    let b = kappa * m as f64 * phi.powi(m - 1);
                    (a * a + b * b).sqrt()
                },
                phi_max,
                n_vertices,
            )
        }
    }
}
