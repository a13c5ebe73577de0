use crate::error::{LabError, Result};
use serde::{Deserialize, Serialize};

/// Tolerances and resolutions used by the numerical routines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NumericConfig {
    /// Relative local error per ODE step.
    pub ode_rel_tol: f64,
    /// Absolute error floor per ODE step, in plane units.
    pub ode_abs_tol: f64,
    /// Offsets from the base point, in units of `sqrt(t)`, used to approach the
    /// singular solutions. Decreasing, each below half the previous.
    pub eps_list: Vec<f64>,
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    /// Default number of vertices for generated curves fed to the welder.
    pub weld_steps: usize,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig {
            ode_rel_tol: 1e-11,
            ode_abs_tol: 1e-20,
            eps_list: vec![1e-8, 1e-9, 1e-10],
            newton_tol: 1e-12,
            max_newton_iters: 50,
            weld_steps: 4096,
        }
    }
}

impl NumericConfig {
    pub fn validate(&self) -> Result<()> {
        let op = "NumericConfig::validate";
        for (name, v) in [
            ("ode_rel_tol", self.ode_rel_tol),
            ("ode_abs_tol", self.ode_abs_tol),
            ("newton_tol", self.newton_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(LabError::input(op, format!("{name} must be positive, got {v}")));
            }
        }
        if self.eps_list.len() < 3 {
            return Err(LabError::input(op, "eps_list needs at least 3 entries"));
        }
        if !(self.eps_list[0] > 0.0) {
            return Err(LabError::input(op, "eps_list entries must be positive"));
        }
        for w in self.eps_list.windows(2) {
            if !(w[1] > 0.0 && w[1] < w[0] / 2.0) {
                return Err(LabError::input(
                    op,
                    format!("eps_list must shrink by more than 2x per entry: {:?}", self.eps_list),
                ));
            }
        }
        if self.max_newton_iters == 0 {
            return Err(LabError::input(op, "max_newton_iters must be positive"));
        }
        if self.weld_steps < 2 {
            return Err(LabError::input(op, "weld_steps must be at least 2"));
        }
        Ok(())
    }
}
