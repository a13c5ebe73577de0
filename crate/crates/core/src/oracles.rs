//! Closed-form slit families used as ground truth.
//!
//! * The ray family: driving `c * sqrt(t)` grows the straight slit
//!   `B(c) * sqrt(x)`, `0 <= x <= t`, and its sides map onto explicit
//!   intervals proportional to `sqrt(t)`.
//! * The circular-arc family: the slit along the unit circle centred at `i`,
//!   starting at the origin with `Re > 0`. The inverse map is a
//!   Christoffel–Schwarz integral
//!
//!   ```text
//!   1 / z(w) = (1/2pi) log((w - b1)/(w - b2)) + (b1 + b2)/(b2 - b1) / (w - b1)
//!   ```
//!
//!   with prevertices `b1 < lambda0 < b2`, `lambda0 = 2 b1 + b2`. Expanding at
//!   `w -> inf` and imposing `z(w) = w - 2t/w + ...` leaves two equations:
//!
//!   ```text
//!   [1/w]   (b2 - b1)/(2pi) + (b1 + b2)/(b2 - b1) = 1
//!   [1/w^3] (b2^3 - b1^3)/(6pi) + (b1 + b2) b1^2/(b2 - b1) = 2t
//!   ```
//!
//!   (the `1/w^2` coefficient vanishes identically once the first holds). The
//!   first is equivalent to `(b2 - b1)^2 + 4 pi b1 = 0`. With `u = t^(1/3)`,
//!   `b1 = a u^2`, `b2 = b u` both equations are regular at `u = 0`, where
//!   `b = (12 pi)^(1/3)` and `a = -b^2 / (4 pi)`.
//!
//!   The log is taken as `log(w - b1) - log(w - b2)` with principal branches
//!   for `w` in the closed upper half-plane, so `(b1, b2)` maps onto the line
//!   `Im = -1/2`, the image of the circle under `z -> 1/z`.

use crate::config::NumericConfig;
use crate::error::{LabError, Result};
use crate::types::SingularPair;
use std::f64::consts::PI;

/// Largest capacity accepted by the arc family (arc angle stays well below pi).
pub const ARC_T_MAX: f64 = 0.1;

/// Parameters of the slit grown by `lambda(t) = c sqrt(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqrtSlitParams {
    pub c: f64,
    /// `c / sqrt(c^2 + 16)`.
    pub beta: f64,
    /// `|B(c)|`, the slit length per unit `sqrt(t)`.
    pub b_modulus: f64,
    /// Angle of the slit with the positive real axis.
    pub theta: f64,
}

impl SqrtSlitParams {
    pub fn tip(&self, t: f64) -> num_complex::Complex64 {
        num_complex::Complex64::from_polar(self.b_modulus * t.sqrt(), self.theta)
    }

    /// `(1 + beta) / (1 - beta)`, the limiting ratio of the side measures.
    pub fn side_ratio(&self) -> f64 {
        (1.0 + self.beta) / (1.0 - self.beta)
    }
}

pub fn sqrt_params(c: f64) -> Result<SqrtSlitParams> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(LabError::input("sqrt_params", format!("need c >= 0, got {c}")));
    }
    let root = (c * c + 16.0).sqrt();
    let beta = c / root;
    let b_modulus = 2.0 * ((root + c) / (root - c)).powf(c / (2.0 * root));
    Ok(SqrtSlitParams {
        c,
        beta,
        b_modulus,
        theta: 0.5 * PI * (1.0 - beta),
    })
}

/// Inverse of `theta(c)`: the coefficient whose slit leans at angle `theta`.
pub fn sqrt_coefficient_for_angle(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta <= 0.5 * PI) {
        return Err(LabError::input(
            "sqrt_coefficient_for_angle",
            format!("need 0 < theta <= pi/2, got {theta}"),
        ));
    }
    let beta = 1.0 - 2.0 * theta / PI;
    Ok(4.0 * beta / (1.0 - beta * beta).sqrt())
}

pub fn sqrt_interval_endpoints(c: f64, t: f64) -> Result<SingularPair> {
    if !(c >= 0.0 && c.is_finite()) || !(t >= 0.0 && t.is_finite()) {
        return Err(LabError::input(
            "sqrt_interval_endpoints",
            format!("need c >= 0 and t >= 0, got c={c}, t={t}"),
        ));
    }
    let root = (c * c + 16.0).sqrt();
    let st = t.sqrt();
    Ok(SingularPair {
        t,
        f_minus: 0.5 * (c - root) * st,
        lambda: c * st,
        f_plus: 0.5 * (c + root) * st,
    })
}

/// Leading coefficients of the arc family's expansions in `t^(1/3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcSeriesCoeffs {
    /// `b1(t) ~ a1 t^(2/3)`.
    pub a1: f64,
    /// `b2(t) ~ b1 t^(1/3)`.
    pub b1: f64,
    /// `lambda0(t) ~ c1 t^(1/3)`.
    pub c1: f64,
    /// Second-order combination forced by `lambda0 = 2 b1 + b2`.
    pub b2_minus_c2: f64,
}

pub fn arc_series_coeffs() -> ArcSeriesCoeffs {
    let a1 = -(9.0 / (4.0 * PI)).cbrt();
    let b1 = (12.0 * PI).cbrt();
    ArcSeriesCoeffs {
        a1,
        b1,
        c1: b1,
        b2_minus_c2: -2.0 * a1,
    }
}

/// Prevertex data of the arc slit at capacity `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcParams {
    pub t: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub lambda0: f64,
    /// `[1/w]` normalization residual at the root.
    pub residual1: f64,
    /// `[1/w^3]` normalization residual at the root.
    pub residual2: f64,
    /// 2-norm condition number of the scaled Newton Jacobian at the root.
    pub jacobian_condition: f64,
    pub newton_iterations: usize,
}

impl ArcParams {
    pub fn interval_endpoints(&self) -> SingularPair {
        SingularPair {
            t: self.t,
            f_minus: self.beta1,
            lambda: self.lambda0,
            f_plus: self.beta2,
        }
    }

    /// Angle `phi` of the slit tip `sin(phi) + i (1 - cos(phi))`, read off from
    /// the real part of `1 / z(lambda0)`, which equals `cot(phi/2) / 2`.
    pub fn tip_angle(&self) -> f64 {
        let (b1, b2) = (self.beta1, self.beta2);
        let cot_half = ((b1 + b2) / (-2.0 * b1)).ln() / PI + 2.0 / (b2 - b1);
        2.0 * (1.0 / cot_half).atan()
    }

    pub fn tip(&self) -> num_complex::Complex64 {
        let phi = self.tip_angle();
        let h = 0.5 * phi;
        num_complex::Complex64::new(phi.sin(), 2.0 * h.sin() * h.sin())
    }
}

/// Residual pair of the scaled system in `(a, b)` at `u = t^(1/3)`.
fn scaled_residuals(a: f64, b: f64, u: f64) -> [f64; 2] {
    let d = b - a * u;
    let n = b + a * u;
    let e1 = d * d + 4.0 * PI * a;
    let e2 = (b * b * b - a * a * a * u * u * u) / (6.0 * PI) + a * a * u * n / d - 2.0;
    [e1, e2]
}

/// Jacobian rows `[dE/da, dE/db, dE/du]` of the scaled system.
fn scaled_jacobian(a: f64, b: f64, u: f64) -> [[f64; 3]; 2] {
    let d = b - a * u;
    let n = b + a * u;
    let d2 = d * d;
    let e1 = [-2.0 * u * d + 4.0 * PI, 2.0 * d, -2.0 * a * d];
    let e2 = [
        -a * a * u * u * u / (2.0 * PI) + 2.0 * a * u * n / d + 2.0 * a * a * b * u * u / d2,
        b * b / (2.0 * PI) - 2.0 * a * a * a * u * u / d2,
        -a * a * a * u * u / (2.0 * PI) + a * a * (n / d + 2.0 * a * b * u / d2),
    ];
    [e1, e2]
}

fn solve2(j: &[[f64; 3]; 2], r: [f64; 2]) -> Option<[f64; 2]> {
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some([
        (r[0] * j[1][1] - r[1] * j[0][1]) / det,
        (j[0][0] * r[1] - j[1][0] * r[0]) / det,
    ])
}

fn condition_number(j: &[[f64; 3]; 2]) -> f64 {
    let m = nalgebra::Matrix2::new(j[0][0], j[0][1], j[1][0], j[1][1]);
    let sv = m.singular_values();
    let (hi, lo) = (sv.max(), sv.min());
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Solution of the scaled arc system at one `u`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ScaledArcRoot {
    pub a: f64,
    pub b: f64,
    pub da_du: f64,
    pub db_du: f64,
    pub iterations: usize,
    pub condition: f64,
}

/// Slope of `(a, b)` at `u = 0`; used to seed Newton with a first-order guess.
fn seed_slope() -> (f64, f64) {
    let s = arc_series_coeffs();
    let j = scaled_jacobian(s.a1, s.b1, 0.0);
    let d = solve2(&j, [-j[0][2], -j[1][2]]).expect("regular at u = 0");
    (d[0], d[1])
}

/// Damped Newton on the scaled system, seeded from the leading series.
pub(crate) fn solve_scaled(u: f64, tol: f64, max_iters: usize) -> std::result::Result<ScaledArcRoot, (usize, f64)> {
    let s = arc_series_coeffs();
    let (sa, sb) = seed_slope();
    let mut a = s.a1 + sa * u;
    let mut b = s.b1 + sb * u;
    let norm = |r: [f64; 2]| r[0].abs().max(r[1].abs());
    let mut r = scaled_residuals(a, b, u);
    let mut res = norm(r);
    let mut iterations = 0;
    while res > tol {
        if iterations >= max_iters {
            return Err((iterations, res));
        }
        iterations += 1;
        let j = scaled_jacobian(a, b, u);
        let Some(step) = solve2(&j, r) else {
            return Err((iterations, res));
        };
        let mut damping = 1.0;
        loop {
            let (na, nb) = (a - damping * step[0], b - damping * step[1]);
            let nr = scaled_residuals(na, nb, u);
            let nres = norm(nr);
            if nres.is_finite() && (nres < res || damping < 1e-6) && nb > na * u {
                a = na;
                b = nb;
                r = nr;
                res = nres;
                break;
            }
            damping *= 0.5;
            if damping < 1e-9 {
                return Err((iterations, res));
            }
        }
    }
    let j = scaled_jacobian(a, b, u);
    let d = solve2(&j, [-j[0][2], -j[1][2]]).ok_or((iterations, res))?;
    Ok(ScaledArcRoot {
        a,
        b,
        da_du: d[0],
        db_du: d[1],
        iterations,
        condition: condition_number(&j),
    })
}

/// `lambda0` and its derivative with respect to `u = t^(1/3)`; NaN outside the
/// working range or when Newton fails.
pub(crate) fn arc_driving_u(u: f64) -> (f64, f64) {
    if !(0.0..=ARC_T_MAX.cbrt() * (1.0 + 1e-12)).contains(&u) {
        return (f64::NAN, f64::NAN);
    }
    match solve_scaled(u, 1e-14, 60) {
        Ok(r) => {
            // lambda0 = 2 a u^2 + b u
            let value = 2.0 * r.a * u * u + r.b * u;
            let deriv = 4.0 * r.a * u + 2.0 * r.da_du * u * u + r.b + r.db_du * u;
            (value, deriv)
        }
        Err(_) => (f64::NAN, f64::NAN),
    }
}

pub fn arc_params(t: f64, cfg: &NumericConfig) -> Result<ArcParams> {
    if !(t > 0.0 && t <= ARC_T_MAX) {
        return Err(LabError::input(
            "arc_params",
            format!("capacity must lie in (0, {ARC_T_MAX}], got {t}"),
        ));
    }
    let u = t.cbrt();
    let root = solve_scaled(u, cfg.newton_tol, cfg.max_newton_iters).map_err(|(it, res)| {
        LabError::convergence(
            "arc_params",
            format!("Newton stopped after {it} iterations at t={t}, residual norm {res:e}"),
        )
    })?;
    let beta1 = root.a * u * u;
    let beta2 = root.b * u;
    let diff = beta2 - beta1;
    let residual1 = diff / (2.0 * PI) + (beta1 + beta2) / diff - 1.0;
    let residual2 = (beta2.powi(3) - beta1.powi(3)) / (6.0 * PI)
        + (beta1 + beta2) * beta1 * beta1 / diff
        - 2.0 * t;
    Ok(ArcParams {
        t,
        beta1,
        beta2,
        lambda0: 2.0 * beta1 + beta2,
        residual1,
        residual2,
        jacobian_condition: root.condition,
        newton_iterations: root.iterations,
    })
}

pub fn arc_interval_endpoints(t: f64, cfg: &NumericConfig) -> Result<SingularPair> {
    Ok(arc_params(t, cfg)?.interval_endpoints())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sqrt_params_at_zero() {
        let p = sqrt_params(0.0).unwrap();
        assert_eq!(p.beta, 0.0);
        assert_eq!(p.theta, 0.5 * PI);
        assert_eq!(p.b_modulus, 2.0);
    }

    #[test]
    fn sqrt_params_at_three() {
        let p = sqrt_params(3.0).unwrap();
        assert_relative_eq!(p.beta, 0.6, epsilon = 1e-15);
        assert_relative_eq!(p.theta, PI / 5.0, epsilon = 1e-15);
        assert_relative_eq!(p.b_modulus, 2.0 * 4f64.powf(0.3), epsilon = 1e-14);
        assert_relative_eq!(p.b_modulus, 3.0314331, epsilon = 1e-7);
        assert_relative_eq!(p.side_ratio(), 4.0, epsilon = 1e-14);
        let root = 5.0;
        assert_relative_eq!(p.side_ratio(), (root + 3.0) / (root - 3.0), epsilon = 1e-14);
    }

    #[test]
    fn sqrt_params_rejects_negative() {
        assert!(sqrt_params(-1.0).is_err());
    }

    #[test]
    fn coefficient_for_angle_inverts_theta() {
        for c in [0.0, 0.5, 1.0, 3.0, 10.0] {
            let p = sqrt_params(c).unwrap();
            assert_relative_eq!(sqrt_coefficient_for_angle(p.theta).unwrap(), c, epsilon = 1e-12);
        }
    }

    #[test]
    fn sqrt_intervals() {
        let p = sqrt_interval_endpoints(3.0, 1.0).unwrap();
        assert_eq!((p.f_minus, p.lambda, p.f_plus), (-1.0, 3.0, 4.0));
        let p = sqrt_interval_endpoints(0.0, 0.25).unwrap();
        assert_eq!((p.f_minus, p.lambda, p.f_plus), (-1.0, 0.0, 1.0));
        for t in [1e-6, 0.3, 7.0] {
            let p = sqrt_interval_endpoints(3.0, t).unwrap();
            assert_relative_eq!(p.left().length() / p.right().length(), 4.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn series_coefficients() {
        let s = arc_series_coeffs();
        assert_relative_eq!(s.a1, -(9.0 / (4.0 * PI)).cbrt(), max_relative = 1e-15);
        assert_relative_eq!(s.a1, -0.8947, epsilon = 1e-4);
        assert_relative_eq!(s.b1, 3.3531, epsilon = 1e-4);
        assert_eq!(s.c1, s.b1);
        assert_relative_eq!(s.b1 * s.b1 / s.b2_minus_c2, 2.0 * PI, max_relative = 1e-14);
    }

    #[test]
    fn arc_root_satisfies_both_normalizations() {
        let cfg = NumericConfig::default();
        for t in [1e-9, 1e-6, 1e-3, 0.05, ARC_T_MAX] {
            let p = arc_params(t, &cfg).unwrap();
            assert!(p.residual1.abs() < cfg.newton_tol, "{p:?}");
            assert!(p.residual2.abs() < cfg.newton_tol, "{p:?}");
            assert!(p.jacobian_condition.is_finite() && p.jacobian_condition < 1e3);
            assert!(p.beta1 < p.lambda0 && p.lambda0 < p.beta2);
            assert_eq!(p.lambda0, 2.0 * p.beta1 + p.beta2);
        }
    }

    #[test]
    fn arc_leading_series() {
        let cfg = NumericConfig::default();
        let s = arc_series_coeffs();
        let t: f64 = 1e-9;
        let p = arc_params(t, &cfg).unwrap();
        assert_relative_eq!(p.beta1 / t.powf(2.0 / 3.0), s.a1, max_relative = 1e-2);
        assert_relative_eq!(p.beta2 / t.cbrt(), s.b1, max_relative = 1e-2);
    }

    #[test]
    fn arc_series_approach_is_monotone() {
        let cfg = NumericConfig::default();
        let s = arc_series_coeffs();
        let grid = crate::types::geometric_grid(1e-3, 1e-9, 13).unwrap();
        let gaps: Vec<f64> = grid
            .iter()
            .map(|&t| (arc_params(t, &cfg).unwrap().beta1 / t.powf(2.0 / 3.0) - s.a1).abs())
            .collect();
        for w in gaps.windows(2) {
            assert!(w[1] < w[0], "{gaps:?}");
        }
    }

    #[test]
    fn arc_out_of_range() {
        let cfg = NumericConfig::default();
        assert!(arc_params(0.0, &cfg).is_err());
        assert!(arc_params(0.2, &cfg).is_err());
    }

    #[test]
    fn arc_newton_budget_is_reported() {
        let cfg = NumericConfig {
            max_newton_iters: 1,
            newton_tol: 1e-300,
            ..Default::default()
        };
        match arc_params(0.05, &cfg) {
            Err(LabError::Convergence { op, msg }) => {
                assert_eq!(op, "arc_params");
                assert!(msg.contains("residual"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn arc_driving_derivative_matches_finite_difference() {
        for u in [0.0, 0.05, 0.2, 0.4] {
            let h = 1e-6;
            let (_, d) = arc_driving_u(u);
            let fd = if u == 0.0 {
                (arc_driving_u(h).0 - arc_driving_u(0.0).0) / h
            } else {
                (arc_driving_u(u + h).0 - arc_driving_u(u - h).0) / (2.0 * h)
            };
            assert_relative_eq!(d, fd, max_relative = 1e-5);
        }
    }

    #[test]
    fn tip_angle_small_t_matches_arc_length_series() {
        // s = phi ~ B1 t^(1/3) to leading order; the correction carries a log
        let cfg = NumericConfig::default();
        let t: f64 = 1e-12;
        let p = arc_params(t, &cfg).unwrap();
        assert_relative_eq!(p.tip_angle() / t.cbrt(), arc_series_coeffs().b1, max_relative = 1e-3);
    }
}
