//! Dormand–Prince 5(4) integrator for a single complex unknown.
//!
//! Deterministic: the step sequence depends only on the right-hand side, the
//! interval and the tolerances.

use num_complex::Complex64;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Why an integration span ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Completed,
    /// The controller asked for a step below the resolvable size at `x`.
    Underflow { x: f64 },
    /// The right-hand side or the state became non-finite at `x`.
    NonFinite { x: f64 },
    /// The guard rejected the state reached at `x`.
    Guard { x: f64 },
    StepLimit { x: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct Span {
    pub y: Complex64,
    pub x: f64,
    pub steps: usize,
    pub rejected: usize,
    /// Sum of the accepted local error estimates.
    pub error_sum: f64,
    /// Step size proposed for a continuation.
    pub h_next: f64,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

struct Stage {
    y5: Complex64,
    k7: Complex64,
    err: Complex64,
}

fn stage<F: FnMut(f64, Complex64) -> Complex64>(
    f: &mut F,
    x: f64,
    y: Complex64,
    k1: Complex64,
    h: f64,
) -> Stage {
    let k2 = f(x + C2 * h, y + h * (A21 * k1));
    let k3 = f(x + C3 * h, y + h * (A31 * k1 + A32 * k2));
    let k4 = f(x + C4 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3));
    let k5 = f(x + C5 * h, y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
    let k6 = f(x + h, y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
    let y5 = y + h * (A71 * k1 + A73 * k3 + A74 * k4 + A75 * k5 + A76 * k6);
    let k7 = f(x + h, y5);
    let err = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
    Stage { y5, k7, err }
}

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

impl Dopri5 {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        Dopri5 { rel_tol, abs_tol, max_steps: 2_000_000 }
    }

    fn scale(&self, a: Complex64, b: Complex64) -> f64 {
        self.abs_tol + self.rel_tol * a.norm().max(b.norm())
    }

    fn initial_step<F: FnMut(f64, Complex64) -> Complex64>(
        &self,
        f: &mut F,
        x0: f64,
        y0: Complex64,
        f0: Complex64,
        range: f64,
    ) -> f64 {
        let sc = self.abs_tol + self.rel_tol * y0.norm();
        let d0 = y0.norm() / sc;
        let d1 = f0.norm() / sc;
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * range } else { 0.01 * d0 / d1 };
        let h0 = h0.min(range);
        let f1 = f(x0 + h0, y0 + h0 * f0);
        let d2 = (f1 - f0).norm() / sc / h0;
        let dm = d1.max(d2);
        let h1 = if !(dm > 1e-15) || !dm.is_finite() {
            (h0 * 1e-3).max(1e-6 * range)
        } else {
            (0.01 / dm).powf(0.2)
        };
        (100.0 * h0).min(h1).min(range)
    }

    /// Integrates `dy/dx = f(x, y)` from `x0` to `x1` (either direction).
    /// `h_start` continues a previous span; `guard` may stop the integration
    /// after any accepted step.
    pub fn integrate<F, G>(
        &self,
        f: &mut F,
        x0: f64,
        x1: f64,
        y0: Complex64,
        h_start: Option<f64>,
        guard: &G,
    ) -> Span
    where
        F: FnMut(f64, Complex64) -> Complex64,
        G: Fn(f64, Complex64) -> bool,
    {
        let range = (x1 - x0).abs();
        let dir = if x1 >= x0 { 1.0 } else { -1.0 };
        let mut span = Span {
            y: y0,
            x: x0,
            steps: 0,
            rejected: 0,
            error_sum: 0.0,
            h_next: h_start.unwrap_or(0.0),
            outcome: Outcome::Completed,
        };
        if range == 0.0 {
            return span;
        }
        let mut k1 = f(x0, y0);
        if !finite(k1) {
            span.outcome = Outcome::NonFinite { x: x0 };
            return span;
        }
        let mut h = match h_start {
            Some(h) if h > 0.0 => h.min(range),
            _ => self.initial_step(f, x0, y0, k1, range),
        };
        let (mut x, mut y) = (x0, y0);
        let mut last_rejected = false;
        loop {
            let remaining = (x1 - x).abs();
            if remaining <= 1e-15 * range {
                break;
            }
            if span.steps + span.rejected >= self.max_steps {
                span.outcome = Outcome::StepLimit { x };
                break;
            }
            let floor = 1e-15 * (x.abs() + range);
            if h < floor {
                span.outcome = Outcome::Underflow { x };
                break;
            }
            let last = h >= remaining * (1.0 - 1e-12);
            let step = if last { remaining } else { h };
            let s = stage(f, x, y, k1, dir * step);
            let err = s.err.norm() / self.scale(y, s.y5);
            if !err.is_finite() || !finite(s.y5) || !finite(s.k7) {
                span.rejected += 1;
                h = 0.25 * step;
                last_rejected = true;
                continue;
            }
            if err <= 1.0 {
                x = if last { x1 } else { x + dir * step };
                y = s.y5;
                k1 = s.k7;
                span.steps += 1;
                span.error_sum += s.err.norm();
                let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                h = if last_rejected { step.min(step * grow) } else { step * grow };
                last_rejected = false;
                if !guard(x, y) {
                    span.outcome = Outcome::Guard { x };
                    break;
                }
            } else {
                span.rejected += 1;
                h = step * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
                last_rejected = true;
            }
        }
        span.x = x;
        span.y = y;
        span.h_next = h;
        span
    }

    /// Integrates a chain of sub-intervals `nodes[0] -> nodes[1] -> ...`,
    /// carrying the step size across nodes. Stops at the first span that does
    /// not complete.
    pub fn integrate_nodes<F, G>(&self, f: &mut F, nodes: &[f64], y0: Complex64, guard: &G) -> Span
    where
        F: FnMut(f64, Complex64) -> Complex64,
        G: Fn(f64, Complex64) -> bool,
    {
        let mut total = Span {
            y: y0,
            x: nodes[0],
            steps: 0,
            rejected: 0,
            error_sum: 0.0,
            h_next: 0.0,
            outcome: Outcome::Completed,
        };
        let mut h = None;
        for w in nodes.windows(2) {
            let s = self.integrate(f, w[0], w[1], total.y, h, guard);
            total.y = s.y;
            total.x = s.x;
            total.steps += s.steps;
            total.rejected += s.rejected;
            total.error_sum += s.error_sum;
            total.h_next = s.h_next;
            if s.outcome != Outcome::Completed {
                total.outcome = s.outcome;
                return total;
            }
            h = Some(s.h_next);
        }
        total
    }

    /// Fixed-step variant, used to measure the order of the scheme.
    pub fn integrate_fixed<F>(f: &mut F, x0: f64, x1: f64, y0: Complex64, n: usize) -> Complex64
    where
        F: FnMut(f64, Complex64) -> Complex64,
    {
        let h = (x1 - x0) / n as f64;
        let mut y = y0;
        let mut k1 = f(x0, y0);
        for i in 0..n {
            let x = x0 + h * i as f64;
            let s = stage(f, x, y, k1, h);
            y = s.y5;
            k1 = s.k7;
        }
        y
    }
}
