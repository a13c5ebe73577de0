use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "loewner-lab", version, about = "Chordal Loewner equation lab: flows, welding, slit oracles and side measures")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every subcommand. Values given here override the config file.
#[derive(Debug, Args, Default)]
pub struct Common {
    /// JSON config file; explicit flags take precedence over its entries.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file for the primary result (stdout when absent).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Also write an SVG plot.
    #[arg(long, global = true, value_name = "PATH")]
    pub plot: Option<PathBuf>,
    /// Prefix CSV and SVG outputs with a version comment line.
    #[arg(long, global = true)]
    pub stamp: bool,
    /// Relative ODE tolerance per step.
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    /// Absolute ODE tolerance per step.
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
    /// Residual tolerance of the Newton solvers.
    #[arg(long, global = true)]
    pub newton_tol: Option<f64>,
    /// Default vertex count of generated curves.
    #[arg(long, global = true)]
    pub weld_steps: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Push a point (or the two sides of the base point) through the forward flow.
    Evolve(EvolveArgs),
    /// Tip of the slit at one capacity, or the whole trace on a capacity grid.
    Trace(TraceArgs),
    /// Driving function of a curve by the zipper (CSV t,lambda).
    Weld(WeldArgs),
    /// Half-plane capacity of a curve.
    Hcap(CurveArgs),
    /// Closed-form slit families.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Side measures at one capacity.
    Measure(MeasureArgs),
    /// Ratio sweep towards t = 0 with extrapolated limit.
    Ratio(RatioArgs),
    /// Run the invariant suite.
    Check,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(long)]
    pub driving: Option<String>,
    /// Start point `x,y`.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Follow the two sides of the base point instead of a start point.
    #[arg(long, conflicts_with = "z")]
    pub singular: bool,
    #[arg(long)]
    pub t: Option<f64>,
    /// `geometric:start,stop,points`; writes one CSV row per capacity.
    #[arg(long, conflicts_with = "t")]
    pub t_grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long)]
    pub driving: Option<String>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, conflicts_with = "t")]
    pub t_grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// `line:theta=..,len=..`, `arc:phi=..`, `perturbed-line:..`, `perturbed-arc:..` or `file:path.csv`.
    #[arg(long)]
    pub curve: Option<String>,
    /// Vertex count for generated curves.
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Geodesic,
    Tilted,
}

#[derive(Debug, Args)]
pub struct WeldArgs {
    #[command(flatten)]
    pub curve: CurveArgs,
    #[arg(long, value_enum)]
    pub scheme: Option<Scheme>,
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// The ray grown by `lambda = c sqrt(t)`.
    Sqrt {
        #[arg(long, allow_hyphen_values = true)]
        c: Option<f64>,
    },
    /// The radius-1 arc tangent to the real axis at 0.
    Arc {
        #[arg(long)]
        t: Option<f64>,
    },
}

/// Where the singular pairs come from. Exactly one must be given.
#[derive(Debug, Args)]
pub struct SourceArgs {
    /// The ray family `lambda = c sqrt(t)`.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    #[arg(long)]
    pub driving: Option<String>,
    /// Weld this curve first.
    #[arg(long)]
    pub curve: Option<String>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Closed-form arc prevertices.
    #[arg(long)]
    pub arc_oracle: bool,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub t: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RatioArgs {
    /// 1 for m_left/m_right, 2 for m_left^2/m_right.
    #[arg(long)]
    pub theorem: Option<u8>,
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub t_grid: Option<String>,
    /// Theorem 2 on image-interval lengths instead of side measures.
    #[arg(long)]
    pub interval: bool,
    /// Also write the sweep table.
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
}
