//! Least-squares extrapolation of `t -> 0` limits.

use crate::error::{LabError, Result};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Correction terms fitted next to the constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExtrapolationModel {
    /// `L + a t^(1/2) + b t`.
    #[serde(rename = "sqrt-t")]
    SqrtT,
    /// `L + a t^(1/3) + b t^(2/3)`.
    #[serde(rename = "cbrt-t")]
    CbrtT,
}

impl ExtrapolationModel {
    pub fn id(&self) -> &'static str {
        match self {
            ExtrapolationModel::SqrtT => "sqrt-t",
            ExtrapolationModel::CbrtT => "cbrt-t",
        }
    }

    fn exponents(&self) -> [f64; 2] {
        match self {
            ExtrapolationModel::SqrtT => [0.5, 1.0],
            ExtrapolationModel::CbrtT => [1.0 / 3.0, 2.0 / 3.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitEstimate {
    pub limit: f64,
    /// Standard error of the fitted constant (0 for an exact fit).
    pub error: f64,
    pub model: ExtrapolationModel,
}

/// Fits `values(t)` with the model and returns the constant term.
pub fn extrapolate_limit(times: &[f64], values: &[f64], model: ExtrapolationModel) -> Result<LimitEstimate> {
    let op = "extrapolate_limit";
    let n = times.len();
    if n != values.len() {
        return Err(LabError::input(op, "times and values differ in length"));
    }
    if n < 4 {
        return Err(LabError::input(op, format!("need at least 4 points, got {n}")));
    }
    if times.iter().any(|&t| !(t > 0.0 && t.is_finite())) || values.iter().any(|v| !v.is_finite()) {
        return Err(LabError::input(op, "times must be positive and values finite"));
    }
    let [e1, e2] = model.exponents();
    let cols = |t: f64| [1.0, t.powf(e1), t.powf(e2)];
    // column scaling keeps the normal matrix well conditioned across decades
    let mut scale = [0.0f64; 3];
    for &t in times {
        for (s, c) in scale.iter_mut().zip(cols(t)) {
            *s = s.max(c.abs());
        }
    }
    let a = DMatrix::from_fn(n, 3, |i, j| cols(times[i])[j] / scale[j]);
    let b = DVector::from_column_slice(values);
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    if !(smin > 1e-12 * smax) {
        return Err(LabError::convergence(
            op,
            format!("rank-deficient fit (singular values {smax:.3e} .. {smin:.3e}); use a wider grid"),
        ));
    }
    let x = svd
        .solve(&b, 1e-14 * smax)
        .map_err(|e| LabError::convergence(op, format!("least-squares solve failed: {e}")))?;
    let limit = x[0] / scale[0];
    let resid = &b - &a * &x;
    let dof = n - 3;
    let error = if dof == 0 {
        0.0
    } else {
        let s2 = resid.norm_squared() / dof as f64;
        // (A^T A)^{-1} = V diag(1/sigma^2) V^T
        let v_t = svd.v_t.as_ref().expect("computed");
        let var00: f64 = (0..3).map(|k| (v_t[(k, 0)] / sv[k]).powi(2)).sum();
        (s2 * var00).sqrt() / scale[0]
    };
    Ok(LimitEstimate { limit, error, model })
}
