use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::plot;
use crate::settings::{optional, required, Settings};
use crate::spec::{parse_point, parse_t_grid, CurveSource, DrivingSpec};
use loewner_core::measures::{source_pairs, MeasurePair};
use loewner_core::types::geometric_grid;
use loewner_core::*;
use serde::Serialize;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

pub fn run(cli: &Cli) -> CliResult<()> {
    let settings = Settings::resolve(&cli.common)?;
    match &cli.command {
        Command::Evolve(a) => evolve(a, &settings),
        Command::Trace(a) => trace(a, &settings),
        Command::Weld(a) => weld(a, &settings),
        Command::Hcap(a) => hcap_cmd(a, &settings),
        Command::Oracle(a) => oracle(a, &settings),
        Command::Measure(a) => measure(a, &settings),
        Command::Ratio(a) => ratio(a, &settings),
        Command::Check => check(&settings),
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// Writes the primary output to `--out` or stdout.
fn emit(settings: &Settings, text: &str) -> CliResult<()> {
    match &settings.out {
        Some(p) => write_file(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn csv(settings: &Settings, body: &str) -> String {
    match settings.stamp_line() {
        Some(line) => format!("# {line}\n{body}"),
        None => body.to_string(),
    }
}

fn no_plot(settings: &Settings, command: &str) -> CliResult<()> {
    match settings.plot {
        Some(_) => Err(CliError::usage(format!("--plot is not available for `{command}`"))),
        None => Ok(()),
    }
}

fn write_plot(settings: &Settings, svg: impl FnOnce(Option<&str>) -> String) -> CliResult<()> {
    if let Some(p) = &settings.plot {
        let stamp = settings.stamp_line();
        write_file(p, &svg(stamp.as_deref()))?;
    }
    Ok(())
}

fn positive(name: &str, t: f64) -> CliResult<f64> {
    if t > 0.0 && t.is_finite() {
        Ok(t)
    } else {
        Err(CliError::usage(format!("--{name} must be positive, got {t}")))
    }
}

#[derive(Serialize)]
struct PointOut {
    t: f64,
    x: f64,
    y: f64,
    survived: bool,
    swallow_time: Option<f64>,
}

#[derive(Serialize)]
struct PairOut {
    t: f64,
    f_minus: f64,
    lambda: f64,
    f_plus: f64,
}

fn evolve(a: &EvolveArgs, s: &Settings) -> CliResult<()> {
    no_plot(s, "evolve")?;
    let f = &s.file;
    let driving = DrivingSpec::parse(&required(a.driving.clone(), &f.driving, "driving")?)?;
    let grid = match optional(a.t_grid.clone(), &f.t_grid) {
        Some(g) if a.t.is_none() => Some(parse_t_grid(&g)?),
        _ => None,
    };
    let times = match &grid {
        Some(g) => g.clone(),
        None => vec![positive("t", required(a.t, &f.t, "t")?)?],
    };
    let d = driving.build(times.iter().copied().fold(0.0, f64::max))?;
    let cfg = &s.numeric;
    let z = if a.singular { None } else { Some(parse_point(&required(a.z.clone(), &f.z, "z")?)?) };
    let text = match (z, &grid) {
        (Some(z), None) => {
            let r = evolve_point(z, &d, times[0], cfg)?;
            json(&PointOut { t: times[0], x: r.value.re, y: r.value.im, survived: r.survived, swallow_time: r.swallow_time })
        }
        (None, None) => {
            let p = singular_pair(&d, times[0], cfg)?;
            json(&PairOut { t: p.t, f_minus: p.f_minus, lambda: p.lambda, f_plus: p.f_plus })
        }
        (Some(z), Some(g)) => {
            let mut out = String::from("t,x,y,survived\n");
            for &t in g {
                let r = evolve_point(z, &d, t, cfg)?;
                let _ = writeln!(out, "{t},{},{},{}", r.value.re, r.value.im, u8::from(r.survived));
            }
            csv(s, &out)
        }
        (None, Some(g)) => {
            let mut out = String::from("t,f_minus,lambda,f_plus\n");
            for &t in g {
                let p = singular_pair(&d, t, cfg)?;
                let _ = writeln!(out, "{t},{},{},{}", p.f_minus, p.lambda, p.f_plus);
            }
            csv(s, &out)
        }
    };
    emit(s, &text)
}

#[derive(Serialize)]
struct TipOut {
    t: f64,
    x: f64,
    y: f64,
}

fn trace(a: &TraceArgs, s: &Settings) -> CliResult<()> {
    let f = &s.file;
    let driving = DrivingSpec::parse(&required(a.driving.clone(), &f.driving, "driving")?)?;
    let cfg = &s.numeric;
    let grid = match optional(a.t_grid.clone(), &f.t_grid) {
        Some(g) if a.t.is_none() => Some(parse_t_grid(&g)?),
        _ => None,
    };
    let curve_of = |d: &DrivingFunction, grid: &[f64]| -> CliResult<Curve> {
        let mut increasing = grid.to_vec();
        increasing.sort_by(f64::total_cmp);
        Ok(compute_trace(d, &increasing, cfg)?)
    };
    let (text, curve) = match grid {
        Some(g) => {
            let d = driving.build(g[0].max(g[g.len() - 1]))?;
            let curve = curve_of(&d, &g)?;
            (csv(s, &curve.to_csv()), Some(curve))
        }
        None => {
            let t = positive("t", required(a.t, &f.t, "t")?)?;
            let d = driving.build(t)?;
            let tip = trace_tip(&d, t, cfg)?;
            let curve = match s.plot {
                Some(_) => Some(curve_of(&d, &geometric_grid(t, t * 1e-6, 256)?)?),
                None => None,
            };
            (json(&TipOut { t, x: tip.re, y: tip.im }), curve)
        }
    };
    emit(s, &text)?;
    if let Some(c) = curve {
        let pts: Vec<(f64, f64)> = c.vertices().iter().map(|z| (z.re, z.im)).collect();
        write_plot(s, |stamp| plot::polyline("trace", "x", "y", &pts, true, stamp))?;
    }
    Ok(())
}

fn load_curve(a: &CurveArgs, s: &Settings) -> CliResult<Curve> {
    let spec = CurveSource::parse(&required(a.curve.clone(), &s.file.curve, "curve")?)?;
    let points = optional(a.points, &s.file.points).unwrap_or(s.numeric.weld_steps);
    spec.build(points)
}

fn weld(a: &WeldArgs, s: &Settings) -> CliResult<()> {
    let curve = load_curve(&a.curve, s)?;
    let scheme = match optional(a.scheme, &s.file.scheme).unwrap_or(Scheme::Geodesic) {
        Scheme::Geodesic => ElementaryMap::Geodesic,
        Scheme::Tilted => ElementaryMap::TiltedSlit,
    };
    let w = compute_driving_with(&curve, &s.numeric, scheme)?;
    emit(s, &csv(s, &w.to_csv()))?;
    let pts: Vec<(f64, f64)> = w.per_vertex_capacity.iter().copied().zip(w.lambda().iter().copied()).collect();
    write_plot(s, |stamp| plot::polyline("welded driving", "t", "lambda", &pts, false, stamp))
}

#[derive(Serialize)]
struct HcapOut {
    hcap: f64,
    vertices: usize,
    length: f64,
}

fn hcap_cmd(a: &CurveArgs, s: &Settings) -> CliResult<()> {
    let curve = load_curve(a, s)?;
    let h = hcap(&curve, &s.numeric)?;
    emit(s, &json(&HcapOut { hcap: h, vertices: curve.len(), length: curve.total_length() }))?;
    let pts: Vec<(f64, f64)> = curve.vertices().iter().map(|z| (z.re, z.im)).collect();
    write_plot(s, |stamp| plot::polyline("curve", "x", "y", &pts, true, stamp))
}

#[derive(Serialize)]
struct SqrtOut {
    c: f64,
    beta: f64,
    theta: f64,
    b_modulus: f64,
}

#[derive(Serialize)]
struct ArcOut {
    t: f64,
    beta1: f64,
    beta2: f64,
    lambda0: f64,
    residual1: f64,
    residual2: f64,
}

fn oracle(a: &OracleCommand, s: &Settings) -> CliResult<()> {
    no_plot(s, "oracle")?;
    let text = match a {
        OracleCommand::Sqrt { c } => {
            let p = sqrt_params(required(*c, &s.file.c, "c")?)?;
            json(&SqrtOut { c: p.c, beta: p.beta, theta: p.theta, b_modulus: p.b_modulus })
        }
        OracleCommand::Arc { t } => {
            let t = positive("t", required(*t, &s.file.t, "t")?)?;
            let p = arc_params(t, &s.numeric)?;
            json(&ArcOut {
                t: p.t,
                beta1: p.beta1,
                beta2: p.beta2,
                lambda0: p.lambda0,
                residual1: p.residual1,
                residual2: p.residual2,
            })
        }
    };
    emit(s, &text)
}

/// A resolved singular-pair source owning its data.
enum Source {
    Sqrt(f64),
    Driving(DrivingSpec),
    Curve(Curve),
    ArcOracle,
}

fn resolve_source(a: &SourceArgs, s: &Settings) -> CliResult<Source> {
    let f = &s.file;
    let from_flags = a.c.is_some() || a.driving.is_some() || a.curve.is_some() || a.arc_oracle;
    let (c, driving, curve, arc) = if from_flags {
        (a.c, a.driving.clone(), a.curve.clone(), a.arc_oracle)
    } else {
        (f.c, f.driving.clone(), f.curve.clone(), f.arc_oracle.unwrap_or(false))
    };
    let given = usize::from(c.is_some()) + usize::from(driving.is_some()) + usize::from(curve.is_some()) + usize::from(arc);
    if given != 1 {
        return Err(CliError::usage("give exactly one of --c, --driving, --curve, --arc-oracle"));
    }
    Ok(if let Some(c) = c {
        Source::Sqrt(c)
    } else if let Some(d) = driving {
        Source::Driving(DrivingSpec::parse(&d)?)
    } else if let Some(spec) = curve {
        let points = optional(a.points, &f.points).unwrap_or(s.numeric.weld_steps);
        Source::Curve(CurveSource::parse(&spec)?.build(points)?)
    } else {
        Source::ArcOracle
    })
}

/// Runs `body` with the borrowed form of `source`.
fn with_source<T>(source: &Source, horizon: f64, body: impl FnOnce(RatioSource<'_>) -> CliResult<T>) -> CliResult<T> {
    match source {
        Source::Sqrt(c) => body(RatioSource::Sqrt(*c)),
        Source::Driving(spec) => {
            let d = spec.build(horizon)?;
            body(RatioSource::Driving(&d))
        }
        Source::Curve(c) => body(RatioSource::Curve(c)),
        Source::ArcOracle => body(RatioSource::ArcOracle),
    }
}

#[derive(Serialize)]
struct MeasureOut {
    t: f64,
    lambda: f64,
    f_minus: f64,
    f_plus: f64,
    m_left: f64,
    m_right: f64,
}

fn measure(a: &MeasureArgs, s: &Settings) -> CliResult<()> {
    no_plot(s, "measure")?;
    let t = positive("t", required(a.t, &s.file.t, "t")?)?;
    let source = resolve_source(&a.source, s)?;
    let pair = with_source(&source, t, |src| Ok(source_pairs(src, &[t], &s.numeric)?[0]))?;
    let m = MeasurePair::from_pair(&pair);
    emit(
        s,
        &json(&MeasureOut { t, lambda: pair.lambda, f_minus: pair.f_minus, f_plus: pair.f_plus, m_left: m.m_left, m_right: m.m_right }),
    )
}

fn ratio(a: &RatioArgs, s: &Settings) -> CliResult<()> {
    let f = &s.file;
    let theorem = match required(a.theorem, &f.theorem, "theorem")? {
        1 => Theorem::One,
        2 => Theorem::Two,
        n => return Err(CliError::usage(format!("--theorem must be 1 or 2, got {n}"))),
    };
    let interval = a.interval || f.interval.unwrap_or(false);
    if interval && theorem != Theorem::Two {
        return Err(CliError::usage("--interval applies to --theorem 2 only"));
    }
    let grid = parse_t_grid(&required(a.t_grid.clone(), &f.t_grid, "t-grid")?)?;
    let source = resolve_source(&a.source, s)?;
    let sweep = with_source(&source, grid[0], |src| {
        Ok(match (theorem, interval) {
            (Theorem::One, _) => sweep_theorem1(src, &grid, &s.numeric)?,
            (Theorem::Two, false) => sweep_theorem2(src, &grid, &s.numeric)?,
            (Theorem::Two, true) => interval_sweep_theorem2(src, &grid, &s.numeric)?,
        })
    })?;
    emit(s, &json(&sweep.summary()))?;
    if let Some(p) = &a.csv {
        write_file(p, &csv(s, &sweep.to_csv()))?;
    }
    let pts: Vec<(f64, f64)> = sweep.rows.iter().map(|r| (r.t, r.ratio)).collect();
    let title = format!("theorem {} ratio, limit {:.6}", theorem.number(), sweep.estimate.limit);
    write_plot(s, |stamp| plot::log_scatter(&title, "ratio", &pts, sweep.estimate.limit, stamp))
}

#[derive(Serialize)]
struct CheckOut<'a> {
    passed: bool,
    checks: &'a [CheckOutcome],
}

fn check(s: &Settings) -> CliResult<()> {
    no_plot(s, "check")?;
    let report = run_checks(&s.numeric)?;
    emit(s, &json(&CheckOut { passed: report.all_passed(), checks: &report.checks }))?;
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!("failed: {}", failed.join(", "))))
    }
}
