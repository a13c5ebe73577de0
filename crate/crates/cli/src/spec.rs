//! Parsers for the inline driving, curve and grid specs.

use crate::error::{CliError, CliResult};
use loewner_core::types::geometric_grid;
use loewner_core::welding::read_driving_csv;
use loewner_core::{generate_curve, Curve, CurveSpec, DrivingFunction};
use std::collections::BTreeMap;
use std::path::PathBuf;

/// `key=value` list after the `kind:` prefix.
struct Params {
    spec: String,
    values: BTreeMap<String, String>,
}

impl Params {
    fn parse(spec: &str, body: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("spec `{spec}`: expected key=value, got `{item}`")))?;
            if values.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(CliError::usage(format!("spec `{spec}`: key `{k}` given twice")));
            }
        }
        Ok(Params { spec: spec.to_string(), values })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.values.remove(key)
    }

    fn number(&mut self, key: &str, default: Option<f64>) -> CliResult<f64> {
        match self.take(key) {
            Some(v) => v
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::usage(format!("spec `{}`: `{key}` must be a finite number, got `{v}`", self.spec))),
            None => default.ok_or_else(|| CliError::usage(format!("spec `{}`: missing `{key}`", self.spec))),
        }
    }

    fn integer(&mut self, key: &str, default: Option<u32>) -> CliResult<u32> {
        match self.take(key) {
            Some(v) => v
                .parse::<u32>()
                .map_err(|_| CliError::usage(format!("spec `{}`: `{key}` must be a non-negative integer, got `{v}`", self.spec))),
            None => default.ok_or_else(|| CliError::usage(format!("spec `{}`: missing `{key}`", self.spec))),
        }
    }

    fn finish(self) -> CliResult<()> {
        match self.values.keys().next() {
            Some(k) => Err(CliError::usage(format!("spec `{}`: unknown key `{k}`", self.spec))),
            None => Ok(()),
        }
    }
}

fn split_kind(spec: &str) -> (&str, &str) {
    match spec.split_once(':') {
        Some((kind, body)) => (kind.trim(), body),
        None => (spec.trim(), ""),
    }
}

/// A driving spec. Analytic drivings get their domain from the largest
/// capacity a command needs.
#[derive(Debug, Clone, PartialEq)]
pub enum DrivingSpec {
    Constant(f64),
    Sqrt(f64),
    Arc,
    File(PathBuf),
}

impl DrivingSpec {
    pub fn parse(spec: &str) -> CliResult<Self> {
        let (kind, body) = split_kind(spec);
        let out = match kind {
            "const" => {
                let mut p = Params::parse(spec, body)?;
                let v = p.number("v", Some(0.0))?;
                p.finish()?;
                DrivingSpec::Constant(v)
            }
            "sqrt" => {
                let mut p = Params::parse(spec, body)?;
                let c = p.number("c", None)?;
                p.finish()?;
                DrivingSpec::Sqrt(c)
            }
            "arc" => {
                Params::parse(spec, body)?.finish()?;
                DrivingSpec::Arc
            }
            "file" if !body.trim().is_empty() => DrivingSpec::File(PathBuf::from(body.trim())),
            _ => {
                return Err(CliError::usage(format!(
                    "unknown driving spec `{spec}`; expected const:v=.., sqrt:c=.., arc or file:path.csv"
                )))
            }
        };
        Ok(out)
    }

    pub fn build(&self, horizon: f64) -> CliResult<DrivingFunction> {
        let horizon = if horizon > 0.0 { horizon } else { 1.0 };
        Ok(match self {
            DrivingSpec::Constant(v) => DrivingFunction::constant(*v, horizon)?,
            DrivingSpec::Sqrt(c) => DrivingFunction::sqrt(*c, horizon)?,
            DrivingSpec::Arc => DrivingFunction::arc(),
            DrivingSpec::File(path) => read_driving_csv(path)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurveSource {
    Generated(CurveSpec),
    File(PathBuf),
}

impl CurveSource {
    pub fn parse(spec: &str) -> CliResult<Self> {
        let (kind, body) = split_kind(spec);
        if kind == "file" {
            if body.trim().is_empty() {
                return Err(CliError::usage("curve spec `file:` needs a path"));
            }
            return Ok(CurveSource::File(PathBuf::from(body.trim())));
        }
        let mut p = Params::parse(spec, body)?;
        let out = match kind {
            "line" => CurveSpec::Line { theta: p.number("theta", None)?, length: p.number("len", Some(1.0))? },
            "arc" => CurveSpec::Arc { phi_max: p.number("phi", None)? },
            "perturbed-line" => CurveSpec::PerturbedLine {
                theta: p.number("theta", None)?,
                kappa: p.number("kappa", None)?,
                order: p.integer("order", Some(5))?,
                length: p.number("len", Some(1.0))?,
            },
            "perturbed-arc" => CurveSpec::PerturbedArc {
                phi_max: p.number("phi", None)?,
                kappa: p.number("kappa", None)?,
                order: p.integer("order", Some(7))?,
            },
            _ => {
                return Err(CliError::usage(format!(
                    "unknown curve spec `{spec}`; expected line:, arc:, perturbed-line:, perturbed-arc: or file:"
                )))
            }
        };
        p.finish()?;
        Ok(CurveSource::Generated(out))
    }

    pub fn build(&self, points: usize) -> CliResult<Curve> {
        Ok(match self {
            CurveSource::Generated(spec) => generate_curve(spec, points)?,
            CurveSource::File(path) => Curve::read_csv(path)?,
        })
    }
}

/// `geometric:start,stop,points`, returned in the given order (start first).
pub fn parse_t_grid(spec: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::usage(format!("t-grid `{spec}`: expected geometric:start,stop,points"));
    let (kind, body) = split_kind(spec);
    if kind != "geometric" {
        return Err(bad());
    }
    let parts: Vec<&str> = body.split(',').map(str::trim).collect();
    let [start, stop, points] = parts[..] else {
        return Err(bad());
    };
    let start: f64 = start.parse().map_err(|_| bad())?;
    let stop: f64 = stop.parse().map_err(|_| bad())?;
    let points: usize = points.parse().map_err(|_| bad())?;
    if points < 4 {
        return Err(CliError::usage(format!("t-grid `{spec}`: need at least 4 points")));
    }
    if !(start > stop && stop > 0.0 && start.is_finite()) {
        return Err(CliError::usage(format!("t-grid `{spec}`: need start > stop > 0")));
    }
    Ok(geometric_grid(start, stop, points)?)
}

/// `x,y` as a complex number.
pub fn parse_point(text: &str) -> CliResult<loewner_core::ComplexPoint> {
    let bad = || CliError::usage(format!("point `{text}`: expected x,y"));
    let (x, y) = text.split_once(',').ok_or_else(bad)?;
    let x: f64 = x.trim().parse().map_err(|_| bad())?;
    let y: f64 = y.trim().parse().map_err(|_| bad())?;
    if !(x.is_finite() && y.is_finite()) {
        return Err(bad());
    }
    Ok(loewner_core::ComplexPoint::new(x, y))
}
