//! Forward and backward chordal Loewner flow
//! `df/dt = 2 / (f - lambda(t))`, `f(z, 0) = z`.
//!
//! Both directions integrate the offset `v = f - lambda` in the power time
//! variable `u = t^(1/p)` of the driving, in which the square-root layer at a
//! singular start becomes linear and the drivings are smooth. The backward
//! flow `dh/ds = -2 / (h - lambda(t - s))` is split at `s = t/2`: the first half
//! runs in `sigma = sqrt(s)` (regular at the tip), the second half in the
//! driving's own `u` (regular at `t - s = 0`).

use crate::config::NumericConfig;
use crate::curve::Curve;
use crate::driving::DrivingFunction;
use crate::error::{LabError, Result};
use crate::ode::{Dopri5, Outcome, Span};
use crate::types::{ComplexPoint, SingularPair};
use num_complex::Complex64;
use rayon::prelude::*;

/// Image of a point under `f(., t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowResult {
    pub value: ComplexPoint,
    /// False when the point hit the hull before `t`.
    pub survived: bool,
    /// Estimated hitting time when the point did not survive.
    pub swallow_time: Option<f64>,
    pub step_count: usize,
    /// Sum of local error estimates along the path.
    pub error_estimate: f64,
}

fn solver(cfg: &NumericConfig) -> Dopri5 {
    Dopri5::new(cfg.ode_rel_tol, cfg.ode_abs_tol)
}

fn any_state(_: f64, _: Complex64) -> bool {
    true
}

/// `2 p u^(p-1)`, the Jacobian of `t = u^p` times the Loewner factor 2.
fn time_weight(p: i32, u: f64) -> f64 {
    match p {
        2 => 4.0 * u,
        3 => 6.0 * u * u,
        _ => 2.0 * p as f64 * u.powi(p - 1),
    }
}

/// Integration nodes `a -> b` in the `u` variable including interior breakpoints.
fn u_nodes(driving: &DrivingFunction, a: f64, b: f64) -> Vec<f64> {
    let (lo, hi) = (a.min(b), a.max(b));
    let mut nodes = vec![a];
    let inner: Vec<f64> = driving
        .breakpoints_u()
        .into_iter()
        .filter(|&x| x > lo && x < hi)
        .collect();
    if a <= b {
        nodes.extend(inner);
    } else {
        nodes.extend(inner.into_iter().rev());
    }
    nodes.push(b);
    nodes
}

/// Integrates `v = f - lambda` from `u = 0` to `u = t^(1/p)`.
fn forward_offset(driving: &DrivingFunction, v0: Complex64, t: f64, cfg: &NumericConfig) -> Span {
    let p = driving.time_exponent();
    let mut rhs = |u: f64, v: Complex64| {
        let (_, dl) = driving.eval_u(u);
        time_weight(p, u) / v - dl
    };
    let nodes = u_nodes(driving, 0.0, driving.u_of_t(t));
    solver(cfg).integrate_nodes(&mut rhs, &nodes, v0, &any_state)
}

pub fn evolve_point(
    z0: ComplexPoint,
    driving: &DrivingFunction,
    t: f64,
    cfg: &NumericConfig,
) -> Result<FlowResult> {
    let op = "evolve_point";
    driving.check_time(op, t)?;
    if !(z0.re.is_finite() && z0.im.is_finite()) || z0.im < 0.0 {
        return Err(LabError::input(op, format!("start point must lie in the closed upper half-plane, got {z0}")));
    }
    if t == 0.0 {
        return Ok(FlowResult { value: z0, survived: true, swallow_time: None, step_count: 0, error_estimate: 0.0 });
    }
    let base = driving.value(0.0);
    if z0 == Complex64::new(base, 0.0) {
        return Err(LabError::input(op, "start point is the singular base point; use singular_pair"));
    }
    let span = forward_offset(driving, z0 - base, t, cfg);
    let lambda_t = driving.value(t);
    Ok(match span.outcome {
        Outcome::Completed => FlowResult {
            value: span.y + lambda_t,
            survived: true,
            swallow_time: None,
            step_count: span.steps,
            error_estimate: span.error_sum,
        },
        Outcome::Underflow { x } | Outcome::NonFinite { x } | Outcome::Guard { x } | Outcome::StepLimit { x } => {
            FlowResult {
                value: span.y + driving.eval_u(x).0,
                survived: false,
                swallow_time: Some(driving.t_of_u(x)),
                step_count: span.steps,
                error_estimate: span.error_sum,
            }
        }
    })
}

/// One side of the image segment by first-order Richardson extrapolation of
/// `f(base + sign * eps * sqrt(t), t) - lambda(t)` over `cfg.eps_list`.
/// The last two extrapolants must agree within ten times the ODE tolerance,
/// where the tolerance includes the accumulated local error estimate.
fn singular_offset(driving: &DrivingFunction, t: f64, sign: f64, cfg: &NumericConfig) -> Result<f64> {
    let op = "singular_pair";
    let scale = t.sqrt();
    let mut estimates = Vec::with_capacity(cfg.eps_list.len());
    let mut path_error: f64 = 0.0;
    let keeps_side = |_: f64, v: Complex64| sign * v.re > 0.0;
    for &eps in &cfg.eps_list {
        let v0 = Complex64::new(sign * eps * scale, 0.0);
        let p = driving.time_exponent();
        let mut rhs = |u: f64, v: Complex64| {
            let (_, dl) = driving.eval_u(u);
            time_weight(p, u) / v - dl
        };
        let nodes = u_nodes(driving, 0.0, driving.u_of_t(t));
        let span = solver(cfg).integrate_nodes(&mut rhs, &nodes, v0, &keeps_side);
        if matches!(span.outcome, Outcome::Guard { .. } | Outcome::Underflow { .. }) {
            // the driving outruns the start point: this side follows a thin
            // attracting branch that explicit forward steps cannot track
            return backward_threshold(driving, t, sign, cfg);
        }
        if span.outcome != Outcome::Completed {
            return Err(LabError::integration(
                op,
                format!("flow from offset {:e} stopped with {:?} at t={t}", sign * eps * scale, span.outcome),
            ));
        }
        path_error = path_error.max(span.error_sum);
        estimates.push((eps * scale, span.y.re));
    }
    let extrapolants: Vec<f64> = estimates
        .windows(2)
        .map(|w| {
            let ((e0, f0), (e1, f1)) = (w[0], w[1]);
            (e0 * f1 - e1 * f0) / (e0 - e1)
        })
        .collect();
    let n = extrapolants.len();
    let (last, prev) = (extrapolants[n - 1], extrapolants[n - 2]);
    // ten times the tolerance plus the accumulated local error of the paths
    let allowed = 10.0 * (cfg.ode_rel_tol * last.abs() + cfg.ode_abs_tol + path_error);
    if !((last - prev).abs() <= allowed) {
        return Err(LabError::convergence(
            op,
            format!(
                "side {sign:+}: extrapolants {prev:e} and {last:e} differ by {:e} > {allowed:e} (raw estimates {:?})",
                (last - prev).abs(),
                estimates.iter().map(|e| e.1).collect::<Vec<_>>()
            ),
        ));
    }
    Ok(last)
}

/// One side of the image segment as the smallest offset `v = x - lambda(t)`
/// whose backward real flow reaches `t = 0` without meeting the driving.
/// Backward in time the side's branch is repelling, so the classification of
/// each trial offset is sharp and bisection converges to rounding level.
fn backward_threshold(driving: &DrivingFunction, t: f64, sign: f64, cfg: &NumericConfig) -> Result<f64> {
    let op = "singular_pair";
    let p = driving.time_exponent();
    let nodes = u_nodes(driving, driving.u_of_t(t), 0.0);
    let keeps_side = |_: f64, v: Complex64| sign * v.re > 0.0;
    let survives = |offset: f64| {
        let mut rhs = |u: f64, v: Complex64| {
            let (_, dl) = driving.eval_u(u);
            time_weight(p, u) / v - dl
        };
        let span = solver(cfg).integrate_nodes(&mut rhs, &nodes, Complex64::new(sign * offset, 0.0), &keeps_side);
        span.outcome == Outcome::Completed
    };
    let mut hi = t.sqrt();
    let mut doublings = 0;
    while !survives(hi) {
        hi *= 2.0;
        doublings += 1;
        if doublings > 60 {
            return Err(LabError::convergence(op, format!("side {sign:+}: no surviving backward start up to offset {hi:e}")));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) || hi - lo <= cfg.ode_rel_tol * 1e-3 * hi {
            break;
        }
        if survives(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(sign * hi)
}

pub fn singular_pair(driving: &DrivingFunction, t: f64, cfg: &NumericConfig) -> Result<SingularPair> {
    let op = "singular_pair";
    driving.check_time(op, t)?;
    if !(t > 0.0) {
        return Err(LabError::input(op, "capacity must be positive"));
    }
    let lambda = driving.value(t);
    let (right, left) = rayon::join(
        || singular_offset(driving, t, 1.0, cfg),
        || singular_offset(driving, t, -1.0, cfg),
    );
    Ok(SingularPair { t, f_minus: lambda + left?, lambda, f_plus: lambda + right? })
}

/// Backward flow from `k0 = h - lambda(t)` at `sigma = sigma0` to `s = t`.
fn backward(
    op: &'static str,
    driving: &DrivingFunction,
    t: f64,
    sigma0: f64,
    k0: Complex64,
    cfg: &NumericConfig,
) -> Result<(Complex64, usize)> {
    let p = driving.time_exponent();
    let ode = solver(cfg);
    let guard = |_: f64, k: Complex64| k.im > 0.0;

    let sigma_mid = (0.5 * t).sqrt();
    let mut nodes1 = vec![sigma0];
    let mut inner: Vec<f64> = driving
        .breakpoints_u()
        .into_iter()
        .map(|u| driving.t_of_u(u))
        .filter(|&tau| tau > 0.5 * t && tau < t)
        .map(|tau| (t - tau).sqrt())
        .filter(|&s| s > sigma0)
        .collect();
    inner.sort_by(f64::total_cmp);
    nodes1.extend(inner);
    nodes1.push(sigma_mid);
    let mut rhs1 = |sigma: f64, k: Complex64| {
        let tau = t - sigma * sigma;
        -4.0 * sigma / k + 2.0 * sigma * driving.derivative(tau)
    };
    let first = ode.integrate_nodes(&mut rhs1, &nodes1, k0, &guard);
    check_backward(op, t, &first)?;

    let r_mid = driving.u_of_t(0.5 * t);
    let nodes2 = u_nodes(driving, r_mid, 0.0);
    let mut rhs2 = |r: f64, k: Complex64| {
        let (_, dl) = driving.eval_u(r);
        time_weight(p, r) / k - dl
    };
    let second = ode.integrate_nodes(&mut rhs2, &nodes2, first.y, &guard);
    check_backward(op, t, &second)?;
    Ok((second.y + driving.value(0.0), first.steps + second.steps))
}

fn check_backward(op: &'static str, t: f64, span: &Span) -> Result<()> {
    match span.outcome {
        Outcome::Completed => Ok(()),
        Outcome::Guard { .. } => Err(LabError::integration(
            op,
            format!("backward flow left the upper half-plane at t={t} (state {}); the driving does not generate a slit at this resolution", span.y),
        )),
        other => Err(LabError::integration(op, format!("backward flow stopped with {other:?} at t={t}"))),
    }
}

/// The tip `gamma(t) = f^{-1}(lambda(t), t)`.
pub fn trace_tip(driving: &DrivingFunction, t: f64, cfg: &NumericConfig) -> Result<ComplexPoint> {
    let op = "trace_tip";
    driving.check_time(op, t)?;
    if !(t > 0.0) {
        return Err(LabError::input(op, "capacity must be positive"));
    }
    // h(s) ~ lambda(t) + 2i sqrt(s) + (2/3) lambda'(t) s near the tip
    let sigma0 = 1e-6 * t.sqrt();
    let k0 = Complex64::new(2.0 / 3.0 * driving.derivative(t) * sigma0 * sigma0, 2.0 * sigma0);
    Ok(backward(op, driving, t, sigma0, k0, cfg)?.0)
}

/// `f^{-1}(w, t)` for `w` in the upper half-plane.
pub fn inverse_point(w: ComplexPoint, driving: &DrivingFunction, t: f64, cfg: &NumericConfig) -> Result<ComplexPoint> {
    let op = "inverse_point";
    driving.check_time(op, t)?;
    if !(w.im > 0.0) {
        return Err(LabError::input(op, format!("need Im w > 0, got {w}")));
    }
    if t == 0.0 {
        return Ok(w);
    }
    Ok(backward(op, driving, t, 0.0, w - driving.value(t), cfg)?.0)
}

/// Traces the slit at each capacity of an increasing grid.
pub fn compute_trace(driving: &DrivingFunction, t_grid: &[f64], cfg: &NumericConfig) -> Result<Curve> {
    let op = "compute_trace";
    if t_grid.is_empty() {
        return Err(LabError::input(op, "empty capacity grid"));
    }
    if let Some(w) = t_grid.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(LabError::input(op, format!("capacity grid must increase, found {} then {}", w[0], w[1])));
    }
    let tips: Vec<ComplexPoint> = t_grid
        .par_iter()
        .map(|&t| trace_tip(driving, t, cfg))
        .collect::<Result<_>>()?;
    let mut vertices = Vec::with_capacity(tips.len() + 1);
    vertices.push(Complex64::new(0.0, 0.0));
    vertices.extend(tips);
    let mut capacity = Vec::with_capacity(vertices.len());
    capacity.push(0.0);
    capacity.extend_from_slice(t_grid);
    // traces of drivings with lambda(0) != 0 start at lambda(0); shift to the origin
    let base = driving.value(0.0);
    for v in vertices.iter_mut().skip(1) {
        *v -= base;
    }
    Curve::from_vertices_with_capacity(vertices, capacity)
}

/// `max |f(z,t) - z - 2t/z| |z|^2` over sample points on the half circle `|z| = radius`.
pub fn check_normalization(driving: &DrivingFunction, t: f64, radius: f64, cfg: &NumericConfig) -> Result<f64> {
    let op = "check_normalization";
    driving.check_time(op, t)?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(LabError::input(op, format!("radius must be positive, got {radius}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let p = driving.time_exponent();
    let nodes = u_nodes(driving, 0.0, driving.u_of_t(t));
    let samples = 16;
    let mut worst: f64 = 0.0;
    for k in 0..samples {
        let angle = (k as f64 + 0.5) * std::f64::consts::PI / samples as f64;
        let z = Complex64::from_polar(radius, angle);
        // displacement d = f - z keeps full relative precision of f - z
        let mut rhs = |u: f64, d: Complex64| {
            let (l, _) = driving.eval_u(u);
            time_weight(p, u) / (z + d - l)
        };
        let span = solver(cfg).integrate_nodes(&mut rhs, &nodes, Complex64::new(0.0, 0.0), &any_state);
        if span.outcome != Outcome::Completed {
            return Err(LabError::integration(op, format!("flow from {z} stopped with {:?}", span.outcome)));
        }
        let residual = (span.y - 2.0 * t / z).norm() * radius * radius;
        worst = worst.max(residual);
    }
    Ok(worst)
}
