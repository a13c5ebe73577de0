//! Harmonic measures of the two slit sides seen from `f^{-1}(i, t)`, and the
//! small-capacity ratio experiments built on them.
//!
//! By conformal invariance the measure of a side equals the harmonic measure
//! at `i` of its image interval on the real line, i.e. the angle the interval
//! subtends at `i` divided by `pi`.

pub mod extrapolate;
pub mod fd_oracle;

use crate::config::NumericConfig;
use crate::curve::Curve;
use crate::driving::DrivingFunction;
use crate::error::{LabError, Result};
use crate::loewner_flow::singular_pair;
use crate::oracles::{arc_params, ARC_T_MAX};
use crate::types::{IntervalOnR, RatioSeries, SingularPair};
use crate::welding::compute_driving;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt::Write as _;

pub use extrapolate::{extrapolate_limit, ExtrapolationModel, LimitEstimate};
pub use fd_oracle::harmonic_measure_grid_oracle;

/// Harmonic measure at `i` of a real interval with respect to the half-plane.
pub fn harmonic_measure_interval(interval: &IntervalOnR) -> f64 {
    let (a, b) = (interval.a, interval.b);
    let denom = 1.0 + a * b;
    if denom > 0.0 {
        // difference formula, accurate for short intervals
        ((b - a) / denom).atan() / PI
    } else {
        (b.atan() - a.atan()) / PI
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurePair {
    pub t: f64,
    pub m_left: f64,
    pub m_right: f64,
}

impl MeasurePair {
    pub fn from_pair(pair: &SingularPair) -> Self {
        MeasurePair {
            t: pair.t,
            m_left: harmonic_measure_interval(&pair.left()),
            m_right: harmonic_measure_interval(&pair.right()),
        }
    }
}

pub fn slit_side_measures(driving: &DrivingFunction, t: f64, cfg: &NumericConfig) -> Result<MeasurePair> {
    Ok(MeasurePair::from_pair(&singular_pair(driving, t, cfg)?))
}

/// Where the singular pairs of a theorem sweep come from.
#[derive(Debug, Clone, Copy)]
pub enum RatioSource<'a> {
    /// The ray family `lambda = c sqrt(t)`, run through the flow.
    Sqrt(f64),
    /// Any driving function, run through the flow.
    Driving(&'a DrivingFunction),
    /// A slit, welded first; its sampled driving is then run through the flow.
    Curve(&'a Curve),
    /// Closed-form prevertices of the circular-arc slit.
    ArcOracle,
}

/// One line of a sweep table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub t: f64,
    pub lambda: f64,
    pub f_minus: f64,
    pub f_plus: f64,
    pub m_left: f64,
    pub m_right: f64,
    pub ratio: f64,
}

/// Which limit a sweep estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    /// `m_left / m_right`.
    One,
    /// `m_left^2 / m_right`.
    Two,
}

impl Theorem {
    pub fn number(&self) -> u8 {
        match self {
            Theorem::One => 1,
            Theorem::Two => 2,
        }
    }

    pub fn model(&self) -> ExtrapolationModel {
        match self {
            Theorem::One => ExtrapolationModel::SqrtT,
            Theorem::Two => ExtrapolationModel::CbrtT,
        }
    }

    fn ratio(&self, m: &MeasurePair) -> f64 {
        match self {
            Theorem::One => m.m_left / m.m_right,
            Theorem::Two => m.m_left * m.m_left / m.m_right,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub theorem: Theorem,
    pub rows: Vec<SweepRow>,
    pub series: RatioSeries,
    pub estimate: LimitEstimate,
}

/// JSON summary of a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub limit: f64,
    pub error: f64,
    pub model: &'static str,
    pub theorem: u8,
}

impl Sweep {
    pub fn summary(&self) -> SweepSummary {
        SweepSummary {
            limit: self.estimate.limit,
            error: self.estimate.error,
            model: self.estimate.model.id(),
            theorem: self.theorem.number(),
        }
    }

    /// CSV with header `t,lambda,f_minus,f_plus,m_left,m_right,ratio`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,lambda,f_minus,f_plus,m_left,m_right,ratio\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.t, r.lambda, r.f_minus, r.f_plus, r.m_left, r.m_right, r.ratio
            );
        }
        out
    }
}

fn check_grid(op: &'static str, t_grid: &[f64]) -> Result<()> {
    if t_grid.len() < 4 {
        return Err(LabError::input(op, format!("need at least 4 grid points, got {}", t_grid.len())));
    }
    if t_grid.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(LabError::input(op, "grid capacities must be positive"));
    }
    if t_grid.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(LabError::input(op, "grid must strictly decrease towards 0"));
    }
    Ok(())
}

/// Singular pairs of a source on a capacity grid, in grid order.
pub fn source_pairs(source: RatioSource<'_>, t_grid: &[f64], cfg: &NumericConfig) -> Result<Vec<SingularPair>> {
    let op = "source_pairs";
    let largest = t_grid.iter().copied().fold(0.0, f64::max);
    let via_flow = |driving: &DrivingFunction| -> Result<Vec<SingularPair>> {
        if largest > driving.domain_end() {
            return Err(LabError::input(
                op,
                format!("grid reaches t = {largest} beyond the driving domain [0, {}]", driving.domain_end()),
            ));
        }
        t_grid.par_iter().map(|&t| singular_pair(driving, t, cfg)).collect()
    };
    match source {
        RatioSource::Sqrt(c) => via_flow(&DrivingFunction::sqrt(c, largest)?),
        RatioSource::Driving(d) => via_flow(d),
        RatioSource::Curve(curve) => {
            let weld = compute_driving(curve, cfg)?;
            if largest > weld.hcap_total {
                return Err(LabError::input(
                    op,
                    format!("grid reaches t = {largest} beyond the curve capacity {}", weld.hcap_total),
                ));
            }
            via_flow(&weld.driving)
        }
        RatioSource::ArcOracle => {
            if largest > ARC_T_MAX {
                return Err(LabError::input(op, format!("arc oracle is defined for t <= {ARC_T_MAX}")));
            }
            t_grid.par_iter().map(|&t| Ok(arc_params(t, cfg)?.interval_endpoints())).collect()
        }
    }
}

fn sweep(theorem: Theorem, source: RatioSource<'_>, t_grid: &[f64], cfg: &NumericConfig) -> Result<Sweep> {
    let op = match theorem {
        Theorem::One => "ratio_theorem1",
        Theorem::Two => "ratio_theorem2",
    };
    sweep_with(op, theorem, source, t_grid, cfg, |_, m| theorem.ratio(m))
}

fn sweep_with<F>(
    op: &'static str,
    theorem: Theorem,
    source: RatioSource<'_>,
    t_grid: &[f64],
    cfg: &NumericConfig,
    ratio: F,
) -> Result<Sweep>
where
    F: Fn(&SingularPair, &MeasurePair) -> f64,
{
    check_grid(op, t_grid)?;
    let pairs = source_pairs(source, t_grid, cfg)?;
    let rows: Vec<SweepRow> = pairs
        .iter()
        .map(|p| {
            let m = MeasurePair::from_pair(p);
            SweepRow {
                t: p.t,
                lambda: p.lambda,
                f_minus: p.f_minus,
                f_plus: p.f_plus,
                m_left: m.m_left,
                m_right: m.m_right,
                ratio: ratio(p, &m),
            }
        })
        .collect();
    if let Some(r) = rows.iter().find(|r| !(r.ratio.is_finite() && r.ratio > 0.0)) {
        return Err(LabError::convergence(op, format!("non-positive side measure at t = {}", r.t)));
    }
    let values: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let estimate = extrapolate_limit(t_grid, &values, theorem.model())?;
    let series = RatioSeries {
        times: t_grid.to_vec(),
        values,
        limit_estimate: estimate.limit,
        limit_error: estimate.error,
    };
    Ok(Sweep { theorem, rows, series, estimate })
}

/// Theorem 1 sweep, `m_left / m_right` on a decreasing grid.
pub fn sweep_theorem1(source: RatioSource<'_>, t_grid: &[f64], cfg: &NumericConfig) -> Result<Sweep> {
    sweep(Theorem::One, source, t_grid, cfg)
}

/// Theorem 2 sweep, `m_left^2 / m_right` on a decreasing grid.
pub fn sweep_theorem2(source: RatioSource<'_>, t_grid: &[f64], cfg: &NumericConfig) -> Result<Sweep> {
    sweep(Theorem::Two, source, t_grid, cfg)
}

pub fn ratio_theorem1(source: RatioSource<'_>, t_grid: &[f64], cfg: &NumericConfig) -> Result<RatioSeries> {
    Ok(sweep_theorem1(source, t_grid, cfg)?.series)
}

pub fn ratio_theorem2(source: RatioSource<'_>, t_grid: &[f64], cfg: &NumericConfig) -> Result<RatioSeries> {
    Ok(sweep_theorem2(source, t_grid, cfg)?.series)
}

/// Theorem 2 sweep whose ratio column is `|I_left|^2 / |I_right|` of the image
/// intervals instead of the side measures.
pub fn interval_sweep_theorem2(source: RatioSource<'_>, t_grid: &[f64], cfg: &NumericConfig) -> Result<Sweep> {
    sweep_with("interval_ratio_theorem2", Theorem::Two, source, t_grid, cfg, |p, _| {
        p.left().length().powi(2) / p.right().length()
    })
}

/// `|I_left|^2 / |I_right|` of the image intervals, extrapolated in `t^(1/3)`.
pub fn interval_ratio_theorem2(source: RatioSource<'_>, t_grid: &[f64], cfg: &NumericConfig) -> Result<RatioSeries> {
    Ok(interval_sweep_theorem2(source, t_grid, cfg)?.series)
}
