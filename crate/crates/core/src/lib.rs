//! Numerical lab for the chordal Loewner equation.

pub mod check;
pub mod config;
mod csv_table;
pub mod curve;
pub mod driving;
pub mod error;
pub mod loewner_flow;
pub mod measures;
pub mod ode;
pub mod oracles;
pub mod types;
pub mod welding;

pub use check::{run_checks, CheckOutcome, CheckReport};
pub use config::NumericConfig;
pub use curve::{arc_to_segment, generate_curve, Curve, CurveSpec};
pub use driving::{DrivingFunction, DrivingKind, SampledDriving};
pub use error::{LabError, Result};
pub use loewner_flow::{
    check_normalization, compute_trace, evolve_point, inverse_point, singular_pair, trace_tip, FlowResult,
};
pub use oracles::{arc_params, sqrt_params, ArcParams, SqrtSlitParams, ARC_T_MAX};
pub use types::{ComplexPoint, IntervalOnR, RatioSeries, Side, SingularPair};
pub use welding::{compute_driving, compute_driving_with, hcap, ElementaryMap, WeldResult};
pub use measures::{
    extrapolate_limit, harmonic_measure_grid_oracle, harmonic_measure_interval, interval_ratio_theorem2,
    interval_sweep_theorem2, source_pairs,
    ratio_theorem1, ratio_theorem2, slit_side_measures, sweep_theorem1, sweep_theorem2, ExtrapolationModel,
    LimitEstimate, MeasurePair, RatioSource, Sweep, SweepRow, SweepSummary, Theorem,
};
