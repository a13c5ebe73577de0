//! Finite-difference harmonic measure of one slit side.
//!
//! Five-point finite-volume Laplacian on a tensor grid: uniform spacing `h`
//! around the slit, geometric stretching out to a far boundary. The slit is a
//! two-sided Dirichlet boundary handled by cut arms (an arm crossing the slit
//! at fraction `theta` of its length uses `theta * d` as its length and takes
//! the boundary value of the side it meets). The system is symmetric positive
//! definite and solved by conjugate gradients with an incomplete Cholesky
//! preconditioner.

use crate::curve::Curve;
use crate::error::{LabError, Result};
use crate::types::{ComplexPoint, Side};
use std::collections::HashMap;

const STRETCH: f64 = 1.08;
const FAR_FACTOR: f64 = 200.0;
const MIN_FRACTION: f64 = 1e-3;
const MAX_NODES: usize = 20_000_000;
const CG_TOL: f64 = 1e-9;
const TIP_REFINE: f64 = 256.0;
const TIP_GROWTH: f64 = 1.2;

/// Node coordinates along one axis plus the two boundary coordinates.
struct Axis {
    nodes: Vec<f64>,
    lo: f64,
    hi: f64,
}

impl Axis {
    fn coord(&self, k: isize) -> f64 {
        if k < 0 {
            self.lo
        } else if k as usize >= self.nodes.len() {
            self.hi
        } else {
            self.nodes[k as usize]
        }
    }

    /// Index `k` of the arm `[coord(k), coord(k+1)]` containing `x`, with `k` in `-1..n`.
    fn arm_of(&self, x: f64) -> Option<isize> {
        if !(x >= self.lo && x <= self.hi) {
            return None;
        }
        let k = self.nodes.partition_point(|&c| c <= x) as isize - 1;
        Some(k)
    }

    fn dual(&self, k: usize) -> f64 {
        0.5 * (self.coord(k as isize + 1) - self.coord(k as isize - 1))
    }
}

/// Offsets `first, first + step, ...` with the step growing from `fine` to `coarse`
/// geometrically, then uniform, until `extent` is covered.
fn graded_offsets(first: f64, fine: f64, coarse: f64, extent: f64) -> Vec<f64> {
    let mut out = vec![first];
    let mut step = fine;
    let mut o = first;
    while o < extent {
        step = (step * TIP_GROWTH).min(coarse);
        o += step;
        out.push(o);
    }
    out
}

fn stretched(core_end: f64, h: f64, far: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut x = core_end;
    let mut step = h;
    loop {
        step *= STRETCH;
        x += step;
        if x >= far - 0.5 * step {
            break;
        }
        out.push(x);
    }
    out
}

/// A crossing of a grid arm by the slit, at coordinate `at` along the arm.
#[derive(Clone, Copy)]
struct Crossing {
    at: f64,
    segment: usize,
}

fn on_left(curve: &[ComplexPoint], segment: usize, p: ComplexPoint) -> bool {
    let (a, b) = (curve[segment], curve[segment + 1]);
    let (d, r) = (b - a, p - a);
    d.re * r.im - d.im * r.re > 0.0
}

fn distance_to_polyline(v: &[ComplexPoint], p: ComplexPoint) -> f64 {
    v.windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            let s = ((p - w[0]).re * d.re + (p - w[0]).im * d.im) / d.norm_sqr();
            (w[0] + d * s.clamp(0.0, 1.0) - p).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Discrete harmonic measure at `eval_point` of one side of `curve` in the
/// slit half-plane.
pub fn harmonic_measure_grid_oracle(curve: &Curve, side: Side, eval_point: ComplexPoint, grid_h: f64) -> Result<f64> {
    let op = "harmonic_measure_grid_oracle";
    let h = grid_h;
    if !(h > 0.0 && h.is_finite()) {
        return Err(LabError::input(op, format!("grid spacing must be positive, got {h}")));
    }
    if !(eval_point.im > 0.0 && eval_point.re.is_finite()) {
        return Err(LabError::input(op, format!("evaluation point {eval_point} is not in the upper half-plane")));
    }
    let v = curve.vertices();
    let gap = distance_to_polyline(v, eval_point);
    if gap < 10.0 * h {
        return Err(LabError::resolution(
            op,
            format!("evaluation point is {gap:.3e} from the slit, below 10 grid spacings ({:.3e}); refine the grid", 10.0 * h),
        ));
    }
    if curve.total_length() < 4.0 * h {
        return Err(LabError::resolution(op, "slit shorter than 4 grid spacings; refine the grid"));
    }

    let scale = v.iter().chain(std::iter::once(&eval_point)).map(|z| z.norm()).fold(0.0, f64::max);
    let margin = (0.25 * scale).max(10.0 * h);
    let x_extent = v.iter().chain(std::iter::once(&eval_point)).map(|z| z.re.abs()).fold(0.0, f64::max) + margin;
    let y_extent = v.iter().chain(std::iter::once(&eval_point)).map(|z| z.im).fold(0.0, f64::max) + margin;
    let far = FAR_FACTOR * scale;

    // Tip-centred grid graded from `h / TIP_REFINE` at the tip up to `h`: the
    // tip sits at the midpoint of a horizontal arm on a node row for every h.
    let tip = curve.tip();
    let rows_to_tip = (tip.im / grid_h).ceil();
    let h = tip.im / rows_to_tip;
    let fine = h / TIP_REFINE;
    let right = graded_offsets(0.5 * fine, fine, h, x_extent - tip.re);
    let left = graded_offsets(0.5 * fine, fine, h, x_extent + tip.re);
    let mut core: Vec<f64> = left.iter().rev().map(|o| tip.re - o).collect();
    core.extend(right.iter().map(|o| tip.re + o));
    let (first, last) = (core[0], *core.last().unwrap());
    let mut xs: Vec<f64> = stretched(-first, h, far).into_iter().rev().map(|x| -x).collect();
    xs.extend(core);
    xs.extend(stretched(last, h, far));
    let x_axis = Axis { nodes: xs, lo: -far, hi: far };

    let below = graded_offsets(fine, fine, h, tip.im);
    let mut ys: Vec<f64> = below.iter().rev().map(|o| tip.im - o).filter(|&y| y > 0.25 * h.min(tip.im)).collect();
    ys.push(tip.im);
    ys.extend(graded_offsets(fine, fine, h, y_extent - tip.im).iter().map(|o| tip.im + o));
    let top = *ys.last().unwrap();
    ys.extend(stretched(top, h, far));
    let y_axis = Axis { nodes: ys, lo: 0.0, hi: far };

    let (nx, ny) = (x_axis.nodes.len(), y_axis.nodes.len());
    let n = nx * ny;
    if n > MAX_NODES {
        return Err(LabError::input(op, format!("grid of {n} nodes exceeds the limit {MAX_NODES}; increase grid_h")));
    }
    let idx = |i: usize, j: usize| j * nx + i;

    // crossings of horizontal arms (row j, between columns k and k+1) and vertical arms
    let mut h_arms: HashMap<(isize, usize), Vec<Crossing>> = HashMap::new();
    let mut v_arms: HashMap<(usize, isize), Vec<Crossing>> = HashMap::new();
    for (s, w) in v.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let (ylo, yhi) = (a.im.min(b.im), a.im.max(b.im));
        let j0 = y_axis.nodes.partition_point(|&y| y < ylo);
        for j in j0..ny {
            let y = y_axis.nodes[j];
            if y > yhi {
                break;
            }
            if a.im == b.im {
                continue;
            }
            let x = a.re + (b.re - a.re) * (y - a.im) / (b.im - a.im);
            if let Some(k) = x_axis.arm_of(x) {
                h_arms.entry((k, j)).or_default().push(Crossing { at: x, segment: s });
            }
        }
        let (xlo, xhi) = (a.re.min(b.re), a.re.max(b.re));
        let i0 = x_axis.nodes.partition_point(|&x| x < xlo);
        for i in i0..nx {
            let x = x_axis.nodes[i];
            if x > xhi {
                break;
            }
            if a.re == b.re {
                continue;
            }
            let y = a.im + (b.im - a.im) * (x - a.re) / (b.re - a.re);
            if let Some(k) = y_axis.arm_of(y) {
                v_arms.entry((i, k)).or_default().push(Crossing { at: y, segment: s });
            }
        }
    }

    let indicator = |segment: usize, p: ComplexPoint| -> f64 {
        let left = on_left(v, segment, p);
        match (side, left) {
            (Side::Left, true) | (Side::Right, false) => 1.0,
            _ => 0.0,
        }
    };
    // nearest crossing from `from` towards `to` along an arm
    let nearest = |list: Option<&Vec<Crossing>>, from: f64, to: f64| -> Option<Crossing> {
        list?.iter().filter(|c| (c.at - from) * (to - from) >= 0.0).min_by(|a, b| {
            (a.at - from).abs().total_cmp(&(b.at - from).abs())
        }).copied()
    };

    let mut diag = vec![0.0; n];
    let mut east = vec![0.0; n]; // coupling to (i+1, j)
    let mut north = vec![0.0; n]; // coupling to (i, j+1)
    let mut rhs = vec![0.0; n];
    for j in 0..ny {
        let yj = y_axis.nodes[j];
        let dy = y_axis.dual(j);
        for i in 0..nx {
            let xi = x_axis.nodes[i];
            let dx = x_axis.dual(i);
            let k = idx(i, j);
            let p = ComplexPoint::new(xi, yj);
            // (neighbour coordinate, arm crossings, face length, is horizontal, neighbour interior)
            let arms = [
                (x_axis.coord(i as isize + 1), h_arms.get(&(i as isize, j)), dy, true, i + 1 < nx),
                (x_axis.coord(i as isize - 1), h_arms.get(&(i as isize - 1, j)), dy, true, i > 0),
                (y_axis.coord(j as isize + 1), v_arms.get(&(i, j as isize)), dx, false, j + 1 < ny),
                (y_axis.coord(j as isize - 1), v_arms.get(&(i, j as isize - 1)), dx, false, j > 0),
            ];
            for (dir, (to, list, face, horizontal, interior)) in arms.into_iter().enumerate() {
                let from = if horizontal { xi } else { yj };
                let d = (to - from).abs();
                match nearest(list, from, to) {
                    Some(c) => {
                        let frac = ((c.at - from).abs() / d).max(MIN_FRACTION);
                        let w = face / (frac * d);
                        diag[k] += w;
                        rhs[k] += w * indicator(c.segment, p);
                    }
                    None => {
                        let w = face / d;
                        diag[k] += w;
                        if interior {
                            match dir {
                                0 => east[k] = w,
                                2 => north[k] = w,
                                _ => {}
                            }
                        }
                    }
                }
            }
        }
    }
    // an arm cut from one end only must be cut from the other too; keep the
    // matrix symmetric by dropping couplings across any cut arm
    for j in 0..ny {
        for i in 0..nx {
            let k = idx(i, j);
            if i + 1 < nx && h_arms.contains_key(&(i as isize, j)) {
                east[k] = 0.0;
            }
            if j + 1 < ny && v_arms.contains_key(&(i, j as isize)) {
                north[k] = 0.0;
            }
        }
    }

    let apply = |x: &[f64], out: &mut [f64]| {
        for j in 0..ny {
            for i in 0..nx {
                let k = idx(i, j);
                let mut s = diag[k] * x[k];
                if i + 1 < nx {
                    s -= east[k] * x[k + 1];
                }
                if i > 0 {
                    s -= east[k - 1] * x[k - 1];
                }
                if j + 1 < ny {
                    s -= north[k] * x[k + nx];
                }
                if j > 0 {
                    s -= north[k - nx] * x[k - nx];
                }
                out[k] = s;
            }
        }
    };
    let precond = IncompleteCholesky::new(nx, &diag, &east, &north);
    let u = conjugate_gradient(&apply, &precond, &rhs, op)?;

    // bilinear interpolation at the evaluation point
    let (ci, cj) = match (x_axis.arm_of(eval_point.re), y_axis.arm_of(eval_point.im)) {
        (Some(ci), Some(cj)) if ci >= 0 && cj >= 0 && (ci as usize) + 1 < nx && (cj as usize) + 1 < ny => {
            (ci as usize, cj as usize)
        }
        _ => return Err(LabError::input(op, "evaluation point outside the interpolation region")),
    };
    for key in [(ci as isize, cj), (ci as isize, cj + 1)] {
        if h_arms.contains_key(&key) {
            return Err(LabError::resolution(op, "slit passes through the interpolation cell; refine the grid"));
        }
    }
    for key in [(ci, cj as isize), (ci + 1, cj as isize)] {
        if v_arms.contains_key(&key) {
            return Err(LabError::resolution(op, "slit passes through the interpolation cell; refine the grid"));
        }
    }
    let (x0, x1) = (x_axis.nodes[ci], x_axis.nodes[ci + 1]);
    let (y0, y1) = (y_axis.nodes[cj], y_axis.nodes[cj + 1]);
    let (sx, sy) = ((eval_point.re - x0) / (x1 - x0), (eval_point.im - y0) / (y1 - y0));
    let value = (1.0 - sx) * (1.0 - sy) * u[idx(ci, cj)]
        + sx * (1.0 - sy) * u[idx(ci + 1, cj)]
        + (1.0 - sx) * sy * u[idx(ci, cj + 1)]
        + sx * sy * u[idx(ci + 1, cj + 1)];
    Ok(value)
}

/// Zero-fill incomplete Cholesky factor of the five-point matrix, stored as the
/// pivots of `(D + L) D^-1 (D + L)^T`.
struct IncompleteCholesky<'a> {
    nx: usize,
    pivot: Vec<f64>,
    east: &'a [f64],
    north: &'a [f64],
}

impl<'a> IncompleteCholesky<'a> {
    fn new(nx: usize, diag: &[f64], east: &'a [f64], north: &'a [f64]) -> Self {
        let mut pivot = diag.to_vec();
        for k in 0..diag.len() {
            if k >= 1 {
                pivot[k] -= east[k - 1] * east[k - 1] / pivot[k - 1];
            }
            if k >= nx {
                pivot[k] -= north[k - nx] * north[k - nx] / pivot[k - nx];
            }
        }
        Self { nx, pivot, east, north }
    }

    fn solve(&self, r: &[f64], z: &mut [f64]) {
        let (nx, n) = (self.nx, r.len());
        for k in 0..n {
            let mut s = r[k];
            if k >= 1 {
                s += self.east[k - 1] * z[k - 1];
            }
            if k >= nx {
                s += self.north[k - nx] * z[k - nx];
            }
            z[k] = s / self.pivot[k];
        }
        for k in (0..n).rev() {
            let mut s = 0.0;
            if k + 1 < n {
                s += self.east[k] * z[k + 1];
            }
            if k + nx < n {
                s += self.north[k] * z[k + nx];
            }
            z[k] += s / self.pivot[k];
        }
    }
}

fn conjugate_gradient<F>(apply: &F, precond: &IncompleteCholesky, b: &[f64], op: &'static str) -> Result<Vec<f64>>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    precond.solve(&r, &mut z);
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        return Ok(x);
    }
    let mut rz = dot(&r, &z);
    let max_iter = 50 * (n as f64).sqrt() as usize + 2000;
    for _ in 0..max_iter {
        apply(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        if dot(&r, &r).sqrt() <= CG_TOL * bnorm {
            return Ok(x);
        }
        precond.solve(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    Err(LabError::convergence(op, format!("conjugate gradients did not reach {CG_TOL:e} in {max_iter} iterations")))
}
