//! Small value types shared across the crate.

use crate::error::{LabError, Result};
use num_complex::Complex64;

/// A point of the closed upper half-plane.
pub type ComplexPoint = Complex64;

/// Side of a slit. The left side is the one met first when walking along the
/// real axis from `-inf` towards the base point; its image is `[f_minus, lambda]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// A closed interval `[a, b]` of the real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalOnR {
    pub a: f64,
    pub b: f64,
}

impl IntervalOnR {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a > b {
            return Err(LabError::input(
                "IntervalOnR::new",
                format!("need finite a <= b, got [{a}, {b}]"),
            ));
        }
        Ok(IntervalOnR { a, b })
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }
}

/// Endpoints of the image segment of a slit at capacity `t`, split at the
/// driving value: the left side maps to `[f_minus, lambda]`, the right side to
/// `[lambda, f_plus]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPair {
    pub t: f64,
    pub f_minus: f64,
    pub lambda: f64,
    pub f_plus: f64,
}

impl SingularPair {
    pub fn left(&self) -> IntervalOnR {
        IntervalOnR { a: self.f_minus, b: self.lambda }
    }

    pub fn right(&self) -> IntervalOnR {
        IntervalOnR { a: self.lambda, b: self.f_plus }
    }

    pub fn side(&self, side: Side) -> IntervalOnR {
        match side {
            Side::Left => self.left(),
            Side::Right => self.right(),
        }
    }

    /// Total length of the image segment.
    pub fn width(&self) -> f64 {
        self.f_plus - self.f_minus
    }

    /// Checks `f_minus <= lambda <= f_plus` (strict for `t > 0`).
    pub fn is_ordered(&self) -> bool {
        if self.t > 0.0 {
            self.f_minus < self.lambda && self.lambda < self.f_plus
        } else {
            self.f_minus <= self.lambda && self.lambda <= self.f_plus
        }
    }
}

/// A ratio sampled on a capacity grid decreasing towards zero, with its
/// extrapolated `t -> 0` limit.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub limit_estimate: f64,
    pub limit_error: f64,
}

/// Geometric grid from `start` down to `stop` (inclusive) with `points` nodes.
pub fn geometric_grid(start: f64, stop: f64, points: usize) -> Result<Vec<f64>> {
    if !(start > stop && stop > 0.0) || points < 2 {
        return Err(LabError::input(
            "geometric_grid",
            format!("need start > stop > 0 and points >= 2, got {start}, {stop}, {points}"),
        ));
    }
    let ratio = (stop / start).ln() / (points - 1) as f64;
    Ok((0..points)
        .map(|k| {
            if k == points - 1 {
                stop
            } else {
                start * (ratio * k as f64).exp()
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_rejects_reversed_bounds() {
        assert!(IntervalOnR::new(1.0, 0.0).is_err());
        assert!(IntervalOnR::new(0.0, 0.0).is_ok());
    }

    #[test]
    fn geometric_grid_hits_endpoints() {
        let g = geometric_grid(1e-2, 1e-6, 9).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], 1e-2);
        assert_eq!(g[8], 1e-6);
        for w in g.windows(2) {
            assert!((w[1] / w[0] - 0.316227766).abs() < 1e-6);
        }
    }
}
