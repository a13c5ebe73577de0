//! Self-check suite: structural invariants of the flow, measures and welder.

use crate::config::NumericConfig;
use crate::driving::DrivingFunction;
use crate::error::Result;
use crate::loewner_flow::{check_normalization, compute_trace, evolve_point, singular_pair};
use crate::measures::harmonic_measure_interval;
use crate::oracles::ARC_T_MAX;
use crate::types::{geometric_grid, IntervalOnR};
use crate::welding::compute_driving;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Result of one invariant check. `value` is the worst observed defect and
/// `limit` the largest accepted one.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, value: f64, limit: f64, detail: String) -> Self {
        CheckOutcome { name, passed: value <= limit, value, limit, detail }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub checks: Vec<CheckOutcome>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub const SCALING_TOL: f64 = 1e-8;
pub const REFLECTION_TOL: f64 = 1e-9;
pub const TAN_TOL: f64 = 1e-12;
/// Allowed growth of the normalization residual when the radius doubles.
pub const NORMALIZATION_GROWTH: f64 = 1.05;
pub const ROUND_TRIP_TOL: f64 = 1e-3;
pub const ROUND_TRIP_STEPS: usize = 4096;

/// The two model drivings with a capacity inside their domain.
fn families() -> Result<Vec<(&'static str, DrivingFunction, f64)>> {
    Ok(vec![("sqrt:c=3", DrivingFunction::sqrt(3.0, 4.0)?, 1.0), ("arc", DrivingFunction::arc(), ARC_T_MAX / 2.0)])
}

/// `(1/a) lambda(a^2 t)` evolves `z` to `(1/a) f(a z, a^2 t)`.
pub fn check_scaling(cfg: &NumericConfig) -> Result<CheckOutcome> {
    let alpha = 2.0;
    let points = [Complex64::new(-1.0, 1.0), Complex64::new(0.5, 2.0), Complex64::new(2.0, 0.5)];
    let mut worst: f64 = 0.0;
    for (_, d, t) in families()? {
        let small = d.scaled(alpha)?;
        let ts = t / (alpha * alpha);
        for &z in &points {
            let lhs = evolve_point(z / alpha, &small, ts, cfg)?.value;
            let rhs = evolve_point(z, &d, t, cfg)?.value / alpha;
            worst = worst.max((lhs - rhs).norm() / rhs.norm());
        }
    }
    Ok(CheckOutcome::new("scaling", worst, SCALING_TOL, format!("alpha={alpha}, max relative defect")))
}

/// Driving `-lambda` swaps and negates the image interval endpoints.
pub fn check_reflection(cfg: &NumericConfig) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for (_, d, t) in families()? {
        let p = singular_pair(&d, t, cfg)?;
        let q = singular_pair(&d.reflected(), t, cfg)?;
        let scale = p.width();
        worst = worst
            .max((q.f_plus + p.f_minus).abs() / scale)
            .max((q.f_minus + p.f_plus).abs() / scale)
            .max((q.lambda + p.lambda).abs() / scale);
    }
    Ok(CheckOutcome::new("reflection", worst, REFLECTION_TOL, "max endpoint defect relative to width".into()))
}

/// `tan(pi w([a,b])) = (b - a)/(1 + ab)` on a fixed set of intervals.
pub fn check_tan_identity() -> Result<CheckOutcome> {
    let intervals = [(-1.0, 3.0), (3.0, 4.0), (-0.5, 0.2), (0.0, 10.0), (-2.0, 0.4), (-1e-3, 2e-3), (0.7, 0.9)];
    let mut worst: f64 = 0.0;
    for (a, b) in intervals {
        let w = harmonic_measure_interval(&IntervalOnR::new(a, b)?);
        let expect: f64 = (b - a) / (1.0 + a * b);
        worst = worst.max(((PI * w).tan() - expect).abs() / expect.abs().max(1.0));
    }
    Ok(CheckOutcome::new("tan-identity", worst, TAN_TOL, format!("{} intervals", intervals.len())))
}

/// `|z|^2 |f - z - 2t/z|` stays bounded as the sampling radius doubles.
pub fn check_normalization_radius(cfg: &NumericConfig) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for (name, d, t) in families()? {
        let radii = [10.0, 20.0, 40.0];
        let r: Vec<f64> = radii.iter().map(|&rad| check_normalization(&d, t, rad, cfg)).collect::<Result<_>>()?;
        for w in r.windows(2) {
            // the floor absorbs residuals that are already at rounding level
            let floor = 1e-9 * t;
            worst = worst.max((w[1] - floor) / w[0].max(floor));
        }
        detail.push(format!("{name}: {:.3e} {:.3e} {:.3e}", r[0], r[1], r[2]));
    }
    Ok(CheckOutcome::new("normalization", worst, NORMALIZATION_GROWTH, detail.join("; ")))
}

/// `f_plus` increases and `f_minus` decreases with capacity.
pub fn check_monotone_growth(cfg: &NumericConfig) -> Result<CheckOutcome> {
    let mut violations = 0usize;
    let mut total = 0usize;
    for (_, d, t) in families()? {
        let mut grid = geometric_grid(t, t * 1e-6, 13)?;
        grid.reverse();
        let pairs: Vec<_> = grid.iter().map(|&s| singular_pair(&d, s, cfg)).collect::<Result<_>>()?;
        for w in pairs.windows(2) {
            total += 1;
            if !(w[1].f_plus > w[0].f_plus && w[1].f_minus < w[0].f_minus) {
                violations += 1;
            }
        }
    }
    Ok(CheckOutcome::new("monotone-growth", violations as f64, 0.0, format!("{violations} of {total} steps violate")))
}

/// Trace a driving on a geometric grid, weld it back, compare drivings.
pub fn weld_round_trip(driving: &DrivingFunction, t_max: f64, steps: usize, cfg: &NumericConfig) -> Result<f64> {
    let mut grid = geometric_grid(t_max, t_max * 1e-9, steps)?;
    grid.reverse();
    let curve = compute_trace(driving, &grid, cfg)?;
    let weld = compute_driving(&curve, cfg)?;
    let end = weld.driving.domain_end();
    let base = driving.value(0.0);
    Ok(grid
        .iter()
        .map(|&t| (weld.driving.value(t.min(end)) - (driving.value(t) - base)).abs())
        .fold(0.0, f64::max))
}

pub fn check_round_trip(cfg: &NumericConfig) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for (name, d, _) in families()? {
        let t_max = d.domain_end().min(1.0);
        let e = weld_round_trip(&d, t_max, ROUND_TRIP_STEPS, cfg)?;
        detail.push(format!("{name}: {e:.3e}"));
        worst = worst.max(e);
    }
    Ok(CheckOutcome::new("weld-round-trip", worst, ROUND_TRIP_TOL, detail.join("; ")))
}

/// Runs every check. Numerical failures inside a check propagate as errors.
pub fn run_checks(cfg: &NumericConfig) -> Result<CheckReport> {
    cfg.validate()?;
    let checks = vec![
        check_scaling(cfg)?,
        check_reflection(cfg)?,
        check_tan_identity()?,
        check_normalization_radius(cfg)?,
        check_monotone_growth(cfg)?,
        check_round_trip(cfg)?,
    ];
    Ok(CheckReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_checks_pass() {
        let cfg = NumericConfig::default();
        for c in [check_scaling(&cfg).unwrap(), check_reflection(&cfg).unwrap(), check_tan_identity().unwrap()] {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn normalization_and_growth_pass() {
        let cfg = NumericConfig::default();
        for c in [check_normalization_radius(&cfg).unwrap(), check_monotone_growth(&cfg).unwrap()] {
            assert!(c.passed, "{c:?}");
        }
    }
}
