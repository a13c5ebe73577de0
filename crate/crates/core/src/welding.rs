//! Driving function and capacity of a polyline slit by a zipper of elementary maps.
//!
//! Each step removes one chord. In the current frame the chord runs from the
//! tip at 0 to a point `zeta = r e^{i theta}`. Two elementary maps are used:
//!
//! * the tilted-slit map `h(w) = s (w/s - p)^a (w/s - q)^(1-a)` with
//!   `a = 1 - theta/pi` and `a p + (1-a) q = 0`, which removes the straight
//!   chord exactly; `h(w) = w - 2 dt / w + ...` with `dt = s^2 a (1-a) / 4` and
//!   the chord tip has prevertex `s (2a - 1)`;
//! * the geodesic arc map, which removes the circular arc from 0 to `zeta`
//!   leaving the axis vertically. It continues the previous step smoothly and
//!   is the default for steep chords after the first.
//!
//! The first chord and flat chords always use the tilted map.

use crate::config::NumericConfig;
use crate::curve::Curve;
use crate::driving::DrivingFunction;
use crate::error::{LabError, Result};
use crate::types::ComplexPoint;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

const MIN_ANGLE: f64 = 1e-9;
const PARALLEL_MIN: usize = 512;
/// Chords flatter than this slope in the mapped plane use the tilted map.
const GEODESIC_MIN_SLOPE: f64 = 1.0;

#[derive(Debug, Clone)]
pub struct WeldResult {
    /// Sampled driving with nodes at the vertex capacities.
    pub driving: DrivingFunction,
    pub hcap_total: f64,
    pub per_vertex_capacity: Vec<f64>,
}

impl WeldResult {
    pub fn lambda(&self) -> &[f64] {
        match self.driving.kind() {
            crate::driving::DrivingKind::Sampled(s) => s.values(),
            _ => unreachable!("welding always yields a sampled driving"),
        }
    }

    /// CSV with header `t,lambda`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,lambda\n");
        for (t, l) in self.per_vertex_capacity.iter().zip(self.lambda()) {
            let _ = writeln!(out, "{t},{l}");
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Parses a `t,lambda` table into a sampled driving.
pub fn driving_from_csv(text: &str, origin: &str) -> Result<DrivingFunction> {
    let table = crate::csv_table::parse(text, origin, &[&["t", "lambda"]])?;
    let (t, l) = table.data.iter().map(|r| (r[0], r[1])).unzip();
    DrivingFunction::from_samples(t, l)
}

pub fn read_driving_csv(path: &Path) -> Result<DrivingFunction> {
    let text = std::fs::read_to_string(path)?;
    driving_from_csv(&text, &path.display().to_string())
}

/// Hydrodynamically normalized map removing the chord `[0, zeta]`.
#[derive(Debug, Clone, Copy)]
struct ChordMap {
    a: f64,
    p: f64,
    q: f64,
    tip_prevertex: f64,
    dt: f64,
    log_tip: Complex64,
    /// Second derivative of `log h` at the tip prevertex.
    curvature: f64,
    scale: f64,
}

impl ChordMap {
    fn new(zeta: ComplexPoint, step: usize) -> Result<Self> {
        let theta = zeta.arg();
        let r = zeta.norm();
        if !(zeta.im > 0.0 && theta > MIN_ANGLE && theta < PI - MIN_ANGLE && r.is_finite()) {
            return Err(LabError::resolution(
                "compute_driving",
                format!("chord {step} has unresolvable direction {zeta} in the mapped plane; refine the curve"),
            ));
        }
        let a = 1.0 - theta / PI;
        let unit_length = a.powf(a) * (1.0 - a).powf(1.0 - a);
        let s = r / unit_length;
        let (p, q) = (-s * (1.0 - a), s * a);
        let tip_prevertex = s * (2.0 * a - 1.0);
        Ok(ChordMap {
            a,
            p,
            q,
            tip_prevertex,
            dt: s * s * a * (1.0 - a) / 4.0,
            log_tip: zeta.ln(),
            curvature: -1.0 / (s * s * a * (1.0 - a)),
            scale: s,
        })
    }

    fn log_h(&self, w: Complex64) -> Complex64 {
        self.a * (w - self.p).ln() + (1.0 - self.a) * (w - self.q).ln()
    }

    fn dlog_h(&self, w: Complex64) -> Complex64 {
        (w - self.tip_prevertex) / ((w - self.p) * (w - self.q))
    }

    /// Solves `h(w) = z` for `w` in the upper half-plane.
    fn invert(&self, z: ComplexPoint, cfg: &NumericConfig) -> Option<Complex64> {
        let lz = z.ln();
        let residual = |w: Complex64| self.log_h(w) - lz;
        let mut seeds = Vec::with_capacity(2);
        let far = z + 2.0 * self.dt / z;
        seeds.push(Complex64::new(far.re, far.im.max(1e-3 * self.scale)));
        let mut near = (2.0 * (lz - self.log_tip) / self.curvature).sqrt();
        if near.im < 0.0 {
            near = -near;
        }
        let near = near + self.tip_prevertex;
        if near.im > 0.0 {
            seeds.push(near);
        }
        let mut w = seeds
            .into_iter()
            .map(|w| (residual(w).norm(), w))
            .min_by(|x, y| x.0.total_cmp(&y.0))
            .map(|(_, w)| w)?;
        let mut res = residual(w);
        for _ in 0..cfg.max_newton_iters.max(1) * 2 {
            let d = res / self.dlog_h(w);
            let size = d.norm();
            let tol = cfg.newton_tol * (w.norm() + self.scale);
            if !size.is_finite() {
                return None;
            }
            if size <= 1e-3 * tol {
                return Some(w - d).filter(|w| w.im > 0.0).or(Some(w));
            }
            let mut damp = 1.0;
            let mut accepted = false;
            while damp > 1e-12 {
                let cand = w - damp * d;
                if cand.im > 0.0 {
                    let r = residual(cand);
                    if r.norm() < res.norm() {
                        w = cand;
                        res = r;
                        accepted = true;
                        break;
                    }
                }
                damp *= 0.5;
            }
            if !accepted {
                return (size <= tol).then_some(w);
            }
            if size * damp <= tol && damp == 1.0 {
                // one more quadratic step brings the iterate to rounding level
                let d = res / self.dlog_h(w);
                let cand = w - d;
                return Some(if cand.im > 0.0 { cand } else { w });
            }
        }
        None
    }
}

/// Map removing the circular arc from 0 to `zeta` that leaves the real axis
/// vertically, normalized so that the arc tip goes to 0.
#[derive(Debug, Clone, Copy)]
struct ArcMap {
    inv_c: f64,
    b2: f64,
    inv_d: f64,
    scale: f64,
    dlambda: f64,
    dt: f64,
}

impl ArcMap {
    fn new(zeta: ComplexPoint, step: usize) -> Result<Self> {
        let (a, b) = (zeta.re, zeta.im);
        if !(b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(LabError::resolution(
                "compute_driving",
                format!("chord {step} ends at {zeta}, outside the mapped half-plane; refine the curve"),
            ));
        }
        let rho = zeta.norm_sqr();
        let r = rho.sqrt();
        let bp = rho / b;
        Ok(ArcMap {
            inv_c: a / rho,
            b2: bp * bp,
            inv_d: -a * b / (rho * r),
            scale: (b / r).powi(3),
            dlambda: 1.5 * a,
            dt: (a * a + 2.0 * b * b) / 8.0,
        })
    }

    fn apply(&self, z: Complex64) -> Complex64 {
        let w = z / (1.0 - z * self.inv_c);
        let ib = Complex64::new(0.0, self.b2.sqrt());
        let rot = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        let v = rot * (Complex64::new(0.0, -1.0) * (w - ib)).sqrt() * (w + ib).sqrt();
        self.scale * v / (1.0 - v * self.inv_d)
    }
}

/// Elementary conformal map used for each zipper step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ElementaryMap {
    /// Straight chord removed by a power-law corner map (Newton inversion).
    TiltedSlit,
    /// Circular arc leaving the axis vertically, removed in closed form; the
    /// first chord still uses the exact tilted map.
    #[default]
    Geodesic,
}

enum Step {
    Chord(ChordMap),
    Arc(ArcMap),
}

impl Step {
    fn increments(&self) -> (f64, f64) {
        match self {
            Step::Chord(m) => (m.dt, m.tip_prevertex),
            Step::Arc(m) => (m.dt, m.dlambda),
        }
    }

    fn remap(&self, z: Complex64, cfg: &NumericConfig) -> Option<Complex64> {
        let w = match self {
            Step::Chord(m) => m.invert(z, cfg)? - m.tip_prevertex,
            Step::Arc(m) => m.apply(z),
        };
        (w.im > 0.0 && w.re.is_finite()).then_some(w)
    }
}

/// Driving function and capacities of a polyline slit.
pub fn compute_driving(curve: &Curve, cfg: &NumericConfig) -> Result<WeldResult> {
    compute_driving_with(curve, cfg, ElementaryMap::default())
}

pub fn compute_driving_with(curve: &Curve, cfg: &NumericConfig, scheme: ElementaryMap) -> Result<WeldResult> {
    cfg.validate()?;
    let vertices = curve.vertices();
    let n = vertices.len();
    let mut points: Vec<Complex64> = vertices[1..].to_vec();
    let mut times = Vec::with_capacity(n);
    let mut lambda = Vec::with_capacity(n);
    times.push(0.0);
    lambda.push(0.0);
    let (mut t, mut l) = (0.0, 0.0);
    for step in 0..n - 1 {
        let map = match scheme {
            ElementaryMap::Geodesic if step > 0 && points[step].im >= GEODESIC_MIN_SLOPE * points[step].re.abs() => {
                Step::Arc(ArcMap::new(points[step], step + 1)?)
            }
            _ => Step::Chord(ChordMap::new(points[step], step + 1)?),
        };
        let (dt, dl) = map.increments();
        t += dt;
        l += dl;
        if !(t > times[times.len() - 1]) {
            return Err(LabError::resolution("compute_driving", format!("capacity stalled at chord {}", step + 1)));
        }
        times.push(t);
        lambda.push(l);
        let rest = &mut points[step + 1..];
        let fail = |k: usize| {
            LabError::resolution(
                "compute_driving",
                format!("chord map {} sent vertex {} off the half-plane; refine the curve", step + 1, step + 2 + k),
            )
        };
        let remap = |z: &mut Complex64| match map.remap(*z, cfg) {
            Some(w) => {
                *z = w;
                true
            }
            None => false,
        };
        if rest.len() >= PARALLEL_MIN {
            let bad = rest.par_iter_mut().enumerate().filter_map(|(k, z)| (!remap(z)).then_some(k)).min();
            if let Some(k) = bad {
                return Err(fail(k));
            }
        } else if let Some(k) = rest.iter_mut().position(|z| !remap(z)) {
            return Err(fail(k));
        }
    }
    let driving = DrivingFunction::from_samples(times.clone(), lambda)?;
    Ok(WeldResult { driving, hcap_total: t, per_vertex_capacity: times })
}

/// Half-plane capacity of a polyline slit.
pub fn hcap(curve: &Curve, cfg: &NumericConfig) -> Result<f64> {
    Ok(compute_driving(curve, cfg)?.hcap_total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{generate_curve, CurveSpec};
    use crate::oracles::{arc_params, arc_series_coeffs, sqrt_params};
    use approx::assert_relative_eq;

    fn cfg() -> NumericConfig {
        NumericConfig::default()
    }

    #[test]
    fn vertical_slit_has_zero_driving() {
        let c = generate_curve(&CurveSpec::Line { theta: PI / 2.0, length: 2.0 }, 200).unwrap();
        let w = compute_driving(&c, &cfg()).unwrap();
        assert_relative_eq!(w.hcap_total, 1.0, max_relative = 1e-12);
        assert!(w.lambda().iter().all(|l| l.abs() < 1e-12));
        assert_eq!(w.per_vertex_capacity.len(), c.len());
    }

    #[test]
    fn single_vertical_chord() {
        let l = 0.7;
        let c = Curve::from_vertices(vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, l)]).unwrap();
        assert_relative_eq!(hcap(&c, &cfg()).unwrap(), l * l / 4.0, max_relative = 1e-15);
    }

    #[test]
    fn inversion_round_trip() {
        let map = ChordMap::new(Complex64::from_polar(0.3, 0.9), 1).unwrap();
        for z in [
            Complex64::new(0.5, 0.1),
            Complex64::new(-2.0, 1e-4),
            Complex64::new(0.2, 0.2),
            Complex64::from_polar(0.3, 0.9) + Complex64::new(1e-6, 0.0),
            Complex64::new(100.0, 50.0),
        ] {
            let w = map.invert(z, &cfg()).unwrap();
            assert!(w.im > 0.0);
            let back = map.log_h(w).exp();
            assert!((back - z).norm() < 1e-12 * (1.0 + z.norm()), "{z} {back}");
        }
    }

    #[test]
    fn hcap_scales_quadratically() {
        let c = generate_curve(&CurveSpec::Line { theta: PI / 5.0, length: 1.0 }, 300).unwrap();
        let h1 = hcap(&c, &cfg()).unwrap();
        let h2 = hcap(&c.scaled(2.0).unwrap(), &cfg()).unwrap();
        assert_relative_eq!(h2, 4.0 * h1, max_relative = 1e-12);
    }

    #[test]
    fn ray_family_capacity_and_driving() {
        let p = sqrt_params(3.0).unwrap();
        let c = generate_curve(&CurveSpec::Line { theta: p.theta, length: p.b_modulus }, 1024).unwrap();
        for scheme in [ElementaryMap::TiltedSlit, ElementaryMap::Geodesic] {
            let w = compute_driving_with(&c, &cfg(), scheme).unwrap();
            assert_relative_eq!(w.hcap_total, 1.0, max_relative = 1e-4);
            assert_relative_eq!(c.total_length() / w.hcap_total.sqrt(), p.b_modulus, max_relative = 5e-3);
            for (&t, &l) in w.per_vertex_capacity.iter().zip(w.lambda()) {
                assert!((l - 3.0 * t.sqrt()).abs() < 1e-3, "{scheme:?} t={t} lambda={l}");
            }
        }
    }

    #[test]
    fn first_chord_is_exact_ray_map() {
        let p = sqrt_params(3.0).unwrap();
        let c = generate_curve(&CurveSpec::Line { theta: p.theta, length: 0.5 }, 2).unwrap();
        let w = compute_driving(&c, &cfg()).unwrap();
        let t = w.hcap_total;
        assert_relative_eq!(0.5 / t.sqrt(), p.b_modulus, max_relative = 1e-14);
        assert_relative_eq!(w.lambda()[1], 3.0 * t.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn arc_map_expansion_at_infinity() {
        // F(z) = z + lambda_shift + 2 dt / z + O(1/z^2) after undoing the frame shift
        let zeta = Complex64::new(0.3, 0.7);
        let m = ArcMap::new(zeta, 2).unwrap();
        for r in [1e3, 1e4] {
            let z = Complex64::new(0.0, r);
            let f = m.apply(z) + m.dlambda;
            let rem = (f - z - 2.0 * m.dt / z) * z * z;
            assert!(rem.norm() < 1.0, "{rem}");
        }
        assert!(m.apply(zeta).norm() < 1e-7);
        // vertical chord reduces to sqrt(z^2 + b^2)
        let v = ArcMap::new(Complex64::new(0.0, 0.5), 2).unwrap();
        let z = Complex64::new(0.2, 0.1);
        assert!((v.apply(z) - (z * z + 0.25).sqrt()).norm() < 1e-15);
    }

    #[test]
    fn prefix_capacity_increases() {
        let c = generate_curve(&CurveSpec::Arc { phi_max: 1.0 }, 64).unwrap();
        let w = compute_driving(&c, &cfg()).unwrap();
        assert!(w.per_vertex_capacity.windows(2).all(|x| x[1] > x[0]));
        let half = compute_driving(&c.prefix(32).unwrap(), &cfg()).unwrap();
        assert_eq!(half.per_vertex_capacity[..], w.per_vertex_capacity[..32]);
    }

    #[test]
    fn arc_driving_matches_oracle() {
        let c = generate_curve(&CurveSpec::Arc { phi_max: 1.0 }, 2048).unwrap();
        let w = compute_driving(&c, &cfg()).unwrap();
        for k in [256, 1024, 2047] {
            let t = w.per_vertex_capacity[k];
            let o = arc_params(t, &cfg()).unwrap();
            assert_relative_eq!(w.lambda()[k], o.lambda0, max_relative = 5e-3);
        }
    }

    #[test]
    fn small_arc_driving_leading_coefficient() {
        let c = generate_curve(&CurveSpec::Arc { phi_max: 0.05 }, 2048).unwrap();
        let w = compute_driving(&c, &cfg()).unwrap();
        let t = w.hcap_total;
        let l = *w.lambda().last().unwrap();
        assert_relative_eq!(l / t.cbrt(), arc_series_coeffs().b1, max_relative = 2e-2);
        assert_relative_eq!(l, arc_params(t, &cfg()).unwrap().lambda0, max_relative = 5e-3);
    }

    #[test]
    fn csv_round_trip() {
        let c = generate_curve(&CurveSpec::Arc { phi_max: 0.5 }, 16).unwrap();
        let w = compute_driving(&c, &cfg()).unwrap();
        let d = driving_from_csv(&w.to_csv(), "mem").unwrap();
        assert_eq!(d, w.driving);
    }

    #[test]
    fn downward_chord_is_rejected() {
        // the second chord runs almost along the axis into the shadow of the first
        let v = vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1e9, 1e-12)];
        let c = Curve::from_vertices(v).unwrap();
        assert!(matches!(compute_driving(&c, &cfg()), Err(LabError::Resolution { .. })));
    }
}
