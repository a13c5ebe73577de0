//! Exit criteria. Prints one PASS/FAIL line per criterion and exits non-zero
//! when any fails.

use loewner_core::oracles::{arc_series_coeffs, sqrt_coefficient_for_angle};
use loewner_core::types::geometric_grid;
use loewner_core::*;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::time::Instant;

type Verdict = std::result::Result<(bool, String), LabError>;

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn theorem1_flow() -> Verdict {
    let cfg = NumericConfig::default();
    let grid = geometric_grid(1e-2, 1e-6, 9)?;
    let l3 = sweep_theorem1(RatioSource::Sqrt(3.0), &grid, &cfg)?.estimate.limit;
    let target1 = (17f64.sqrt() + 1.0) / (17f64.sqrt() - 1.0);
    let l1 = sweep_theorem1(RatioSource::Sqrt(1.0), &grid, &cfg)?.estimate.limit;
    let (e3, e1) = (rel(l3, 4.0), rel(l1, target1));
    Ok((
        e3 < 5e-3 && e1 < 5e-3,
        format!("c=3 limit {l3:.6} (rel {e3:.2e}); c=1 limit {l1:.6} vs {target1:.6} (rel {e1:.2e}); tol 5e-3"),
    ))
}

/// The c = 3 ray, long enough to cover the sweep grid.
fn ray_length() -> Result<(f64, f64)> {
    let p = oracles::sqrt_params(3.0)?;
    Ok((p.theta, p.b_modulus * 1.2e-2f64.sqrt()))
}

fn theorem1_welded() -> Verdict {
    let cfg = NumericConfig::default();
    let grid = geometric_grid(1e-2, 1e-6, 9)?;
    let (theta, length) = ray_length()?;
    let curve = generate_curve(&CurveSpec::Line { theta, length }, cfg.weld_steps)?;
    let welded = sweep_theorem1(RatioSource::Curve(&curve), &grid, &cfg)?.estimate.limit;
    let flow = sweep_theorem1(RatioSource::Sqrt(3.0), &grid, &cfg)?.estimate.limit;
    let e = rel(welded, flow);
    Ok((e < 1e-2, format!("welded limit {welded:.6} vs flow {flow:.6} (rel {e:.2e}); tol 1e-2")))
}

fn perturbation_insensitivity() -> Verdict {
    let cfg = NumericConfig::default();
    let grid = geometric_grid(1e-2, 1e-6, 9)?;
    let (theta, length) = ray_length()?;
    let spec = CurveSpec::PerturbedLine { theta, kappa: 0.1, order: 5, length };
    let curve = generate_curve(&spec, cfg.weld_steps)?;
    let l = sweep_theorem1(RatioSource::Curve(&curve), &grid, &cfg)?.estimate.limit;
    let e = rel(l, 4.0);
    Ok((e < 1e-2, format!("limit {l:.6} (rel {e:.2e}); tol 1e-2")))
}

fn theorem2_arc() -> Verdict {
    let cfg = NumericConfig::default();
    let grid = geometric_grid(1e-3, 1e-9, 7)?;
    let interval = interval_sweep_theorem2(RatioSource::ArcOracle, &grid, &cfg)?.estimate.limit;
    let measure = sweep_theorem2(RatioSource::ArcOracle, &grid, &cfg)?.estimate.limit;
    let (ei, em) = (rel(interval, 2.0 * PI), rel(measure, interval));
    Ok((
        ei < 1e-2 && em < 1e-2,
        format!(
            "interval limit {interval:.6} vs 2pi (rel {ei:.2e}); measure limit {measure:.6} vs interval (rel {em:.2e}); tol 1e-2"
        ),
    ))
}

fn series_coefficients() -> Verdict {
    let cfg = NumericConfig::default();
    let t = 1e-9;
    let p = arc_params(t, &cfg)?;
    let a1 = -(9.0 / (4.0 * PI)).cbrt();
    let b1 = (12.0 * PI).cbrt();
    let (r1, r2) = (p.beta1 / t.powf(2.0 / 3.0), p.beta2 / t.cbrt());
    let (e1, e2) = (rel(r1, a1), rel(r2, b1));
    let k = arc_series_coeffs();
    let e3 = rel(k.b1 * k.b1 / (-2.0 * k.a1), 2.0 * PI);
    Ok((
        e1 < 1e-2 && e2 < 1e-2 && e3 < 1e-12,
        format!("beta1/t^(2/3) {r1:.7} (rel {e1:.2e}); beta2/t^(1/3) {r2:.5} (rel {e2:.2e}); B1^2/(-2A1) rel {e3:.1e}"),
    ))
}

fn closed_forms() -> Verdict {
    let cfg = NumericConfig::default();
    let d = DrivingFunction::sqrt(3.0, 1.0)?;
    let p = singular_pair(&d, 1.0, &cfg)?;
    let pair_err = (p.f_minus + 1.0).abs().max((p.lambda - 3.0).abs()).max((p.f_plus - 4.0).abs());
    let tip = trace_tip(&d, 1.0, &cfg)?;
    let tip_err = (tip - Complex64::new(2.452459, 1.781833)).norm();
    let slit = generate_curve(&CurveSpec::Line { theta: PI / 2.0, length: 2.0 }, cfg.weld_steps)?;
    let cap_err = (hcap(&slit, &cfg)? - 1.0).abs();
    Ok((
        pair_err < 1e-6 && tip_err < 1e-4 && cap_err < 1e-4,
        format!("pair err {pair_err:.1e} (tol 1e-6); tip {tip:.6} err {tip_err:.1e} (tol 1e-4); hcap err {cap_err:.1e} (tol 1e-4)"),
    ))
}

fn invariant_suite() -> Verdict {
    let report = run_checks(&NumericConfig::default())?;
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    let summary: Vec<String> = report.checks.iter().map(|c| format!("{} {:.1e}", c.name, c.value)).collect();
    Ok((report.all_passed(), format!("{}; failed: {failed:?}", summary.join(", "))))
}

const FD_TOL: f64 = 0.02;
const FD_H: f64 = 0.02;

/// Worst relative mismatch between the grid oracle and the conformal side
/// measures at `f^{-1}(i, t)`.
fn fd_mismatch(curve: &Curve, driving: &DrivingFunction, t: f64, cfg: &NumericConfig) -> Result<f64> {
    let z = inverse_point(Complex64::new(0.0, 1.0), driving, t, cfg)?;
    let conformal = MeasurePair::from_pair(&singular_pair(driving, t, cfg)?);
    let left = harmonic_measure_grid_oracle(curve, Side::Left, z, FD_H)?;
    let right = harmonic_measure_grid_oracle(curve, Side::Right, z, FD_H)?;
    Ok(rel(left, conformal.m_left).max(rel(right, conformal.m_right)))
}

fn fd_oracle_equivalence() -> Verdict {
    let cfg = NumericConfig::default();
    let vertical = generate_curve(&CurveSpec::Line { theta: PI / 2.0, length: 1.0 }, 401)?;
    let e_vertical = fd_mismatch(&vertical, &DrivingFunction::constant(0.0, 0.25)?, 0.25, &cfg)?;

    let theta = PI / 5.0;
    let c = sqrt_coefficient_for_angle(theta)?;
    let t = 1.0 / oracles::sqrt_params(c)?.b_modulus.powi(2);
    let tilted = generate_curve(&CurveSpec::Line { theta, length: 1.0 }, 401)?;
    let e_tilted = fd_mismatch(&tilted, &DrivingFunction::sqrt(c, t)?, t, &cfg)?;
    Ok((
        e_vertical < FD_TOL && e_tilted < FD_TOL,
        format!("vertical rel {e_vertical:.2e}; line(pi/5) rel {e_tilted:.2e}; tol {FD_TOL}, h = {FD_H}"),
    ))
}

fn capacity_tangency() -> Verdict {
    let cfg = NumericConfig::default();
    let theta = 0.628;
    let scaled: Vec<f64> = (4..=10)
        .map(|k| {
            let s = 2f64.powi(-k);
            let line = generate_curve(&CurveSpec::Line { theta, length: s }, 1025)?;
            let bent = generate_curve(&CurveSpec::PerturbedLine { theta, kappa: 1.0, order: 5, length: s }, 1025)?;
            Ok((hcap(&line, &cfg)? - hcap(&bent, &cfg)?).abs() / (s * s))
        })
        .collect::<Result<_>>()?;
    let drops: Vec<f64> = scaled.windows(2).map(|w| w[0] / w[1]).collect();
    let worst = drops.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((worst >= 1.5, format!("drop per halving {drops:.1?}; min {worst:.2} (need >= 1.5)")))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("theorem-1 ratio via flow", theorem1_flow),
        ("theorem-1 ratio via welding", theorem1_welded),
        ("perturbation insensitivity", perturbation_insensitivity),
        ("theorem-2 arc ratio", theorem2_arc),
        ("arc series coefficients", series_coefficients),
        ("closed-form cross-checks", closed_forms),
        ("invariant suite", invariant_suite),
        ("finite-difference oracle", fd_oracle_equivalence),
        ("capacity tangency", capacity_tangency),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (passed, detail) = match run() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failures += 1;
        }
        println!(
            "{} {} {name}: {detail} [{:.1}s]",
            if passed { "PASS" } else { "FAIL" },
            k + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
