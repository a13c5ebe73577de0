//! Driving functions of the Loewner flow.
//!
//! Every driving is evaluated in a power time variable `u = t^(1/p)` in which
//! the built-in families are smooth at `t = 0`: `p = 2` for the constant, ray
//! and sampled kinds, `p = 3` for the circular-arc family.

use crate::error::{LabError, Result};
use crate::oracles::{self, ARC_T_MAX};

#[derive(Debug, Clone, PartialEq)]
pub enum DrivingKind {
    /// `lambda(t) = c0`.
    Constant(f64),
    /// `lambda(t) = c sqrt(t)`.
    Sqrt(f64),
    /// Driving of the circular-arc slit, defined implicitly by the arc
    /// prevertex equations.
    Arc,
    /// Table interpolated linearly in `sqrt(t)`.
    Sampled(SampledDriving),
}

/// Sampled driving values. `times` start at 0 and strictly increase.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledDriving {
    times: Vec<f64>,
    values: Vec<f64>,
    roots: Vec<f64>,
}

impl SampledDriving {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let op = "SampledDriving::new";
        if times.len() != values.len() || times.len() < 2 {
            return Err(LabError::input(op, "need at least two (t, lambda) samples of equal length"));
        }
        if times[0] != 0.0 {
            return Err(LabError::input(op, format!("first sample time must be 0, got {}", times[0])));
        }
        if let Some(w) = times.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(LabError::input(
                op,
                format!("sample times must strictly increase, found {} then {}", w[0], w[1]),
            ));
        }
        if values.iter().chain(times.iter()).any(|v| !v.is_finite()) {
            return Err(LabError::input(op, "samples must be finite"));
        }
        let roots = times.iter().map(|t| t.sqrt()).collect();
        Ok(SampledDriving { times, values, roots })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value and slope in `u = sqrt(t)`; the slope is taken from the segment to
    /// the left of a node.
    fn eval_u(&self, u: f64) -> (f64, f64) {
        let n = self.roots.len();
        let k = match self.roots.partition_point(|&r| r < u) {
            0 => 1,
            k if k >= n => n - 1,
            k => k,
        };
        let (u0, u1) = (self.roots[k - 1], self.roots[k]);
        let (v0, v1) = (self.values[k - 1], self.values[k]);
        let slope = (v1 - v0) / (u1 - u0);
        (v0 + slope * (u - u0), slope)
    }
}

/// A real driving term on `[0, domain_end]`, optionally rescaled as
/// `sign / alpha * base(alpha^2 t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DrivingFunction {
    kind: DrivingKind,
    domain_end: f64,
    alpha: f64,
    sign: f64,
}

impl DrivingFunction {
    fn base(kind: DrivingKind, domain_end: f64) -> Result<Self> {
        if !(domain_end > 0.0 && domain_end.is_finite()) {
            return Err(LabError::input(
                "DrivingFunction",
                format!("domain end must be positive and finite, got {domain_end}"),
            ));
        }
        Ok(DrivingFunction { kind, domain_end, alpha: 1.0, sign: 1.0 })
    }

    pub fn constant(c0: f64, domain_end: f64) -> Result<Self> {
        if !c0.is_finite() {
            return Err(LabError::input("DrivingFunction::constant", "value must be finite"));
        }
        Self::base(DrivingKind::Constant(c0), domain_end)
    }

    pub fn sqrt(c: f64, domain_end: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(LabError::input("DrivingFunction::sqrt", "coefficient must be finite"));
        }
        Self::base(DrivingKind::Sqrt(c), domain_end)
    }

    /// Driving of the radius-1 arc slit, defined for `t <= ARC_T_MAX`.
    pub fn arc() -> Self {
        DrivingFunction { kind: DrivingKind::Arc, domain_end: ARC_T_MAX, alpha: 1.0, sign: 1.0 }
    }

    pub fn sampled(samples: SampledDriving) -> Result<Self> {
        let end = *samples.times.last().expect("validated");
        Self::base(DrivingKind::Sampled(samples), end)
    }

    pub fn from_samples(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::sampled(SampledDriving::new(times, values)?)
    }

    /// `t -> lambda(alpha^2 t) / alpha`, whose hulls are the `1/alpha`-scaled hulls.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(LabError::input("DrivingFunction::scaled", format!("need alpha > 0, got {alpha}")));
        }
        Ok(DrivingFunction {
            kind: self.kind.clone(),
            domain_end: self.domain_end / (alpha * alpha),
            alpha: self.alpha * alpha,
            sign: self.sign,
        })
    }

    /// `t -> -lambda(t)`, the mirror image in the imaginary axis.
    pub fn reflected(&self) -> Self {
        DrivingFunction { sign: -self.sign, ..self.clone() }
    }

    pub fn kind(&self) -> &DrivingKind {
        &self.kind
    }

    pub fn domain_end(&self) -> f64 {
        self.domain_end
    }

    /// Exponent `p` of the time variable `u = t^(1/p)`.
    pub fn time_exponent(&self) -> i32 {
        match self.kind {
            DrivingKind::Arc => 3,
            _ => 2,
        }
    }

    pub fn u_of_t(&self, t: f64) -> f64 {
        match self.time_exponent() {
            3 => t.cbrt(),
            _ => t.sqrt(),
        }
    }

    pub fn t_of_u(&self, u: f64) -> f64 {
        u.powi(self.time_exponent())
    }

    /// Value and `d/du` derivative at `u = t^(1/p)`.
    pub fn eval_u(&self, u: f64) -> (f64, f64) {
        // base time variable: (alpha^2 t)^(1/p) = alpha^(2/p) u
        let p = self.time_exponent();
        let stretch = self.alpha.powf(2.0 / p as f64);
        let ub = stretch * u;
        let (v, d) = match &self.kind {
            DrivingKind::Constant(c0) => (*c0, 0.0),
            DrivingKind::Sqrt(c) => (c * ub, *c),
            DrivingKind::Arc => oracles::arc_driving_u(ub),
            DrivingKind::Sampled(s) => s.eval_u(ub),
        };
        let k = self.sign / self.alpha;
        (k * v, k * stretch * d)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval_u(self.u_of_t(t)).0
    }

    /// `d lambda / dt` at `t > 0`.
    pub fn derivative(&self, t: f64) -> f64 {
        let p = self.time_exponent();
        let u = self.u_of_t(t);
        let (_, du) = self.eval_u(u);
        du / (p as f64 * u.powi(p - 1))
    }

    /// Interior nodes in the `u` variable where the driving is not smooth.
    pub fn breakpoints_u(&self) -> Vec<f64> {
        match &self.kind {
            DrivingKind::Sampled(s) => {
                let stretch = self.alpha.powf(2.0 / self.time_exponent() as f64);
                s.roots[1..s.roots.len() - 1].iter().map(|r| r / stretch).collect()
            }
            _ => Vec::new(),
        }
    }

    pub fn check_time(&self, op: &'static str, t: f64) -> Result<()> {
        if !(t >= 0.0 && t <= self.domain_end * (1.0 + 1e-12)) {
            return Err(LabError::input(
                op,
                format!("t = {t} outside the driving domain [0, {}]", self.domain_end),
            ));
        }
        Ok(())
    }
}
