//! Orbit classification, cycle detection and convergence-order measurement.

use crate::error::{Error, Result};
use crate::operator::{eval_ank_generic, BehlParams, Family, GeneralParams, SphereMap};
use crate::precision::{Real, Wide256};
use crate::roots::{fixed_points_ank, PolynomialRootConfig};
use crate::sphere::{Chart, ExtendedComplex};
use crate::C64;
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscapeConfig {
    pub max_iter: u32,
    pub eps_zero: f64,
    pub eps_inf: f64,
    /// For maps that leave the unit circle invariant, pull iterates that
    /// start within `circle_band` of the circle back onto it. Normal
    /// deviations grow by the local expansion each step, so without this
    /// double-precision roundoff alone pushes such orbits off the circle.
    pub circle_projection: bool,
    pub circle_band: f64,
}

impl Default for EscapeConfig {
    fn default() -> Self {
        EscapeConfig {
            max_iter: 100,
            eps_zero: 1e-8,
            eps_inf: 1e8,
            circle_projection: true,
            circle_band: 1e-12,
        }
    }
}

impl EscapeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_zero < 1.0 && 1.0 < self.eps_inf && self.max_iter >= 1) {
            return Err(Error::InvalidArgument(format!(
                "escape config needs eps_zero < 1 < eps_inf and max_iter ≥ 1, got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    ToZero,
    ToInfinity,
    /// Captured by the attractor with this id.
    ToStrange(u16),
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitClassification {
    pub outcome: Outcome,
    pub iterations: u32,
    /// Last orbit point computed.
    pub witness: ExtendedComplex,
    /// The map had collapsed to a monomial; no free orbit was iterated.
    pub degenerate: bool,
}

/// An attracting fixed point or cycle that seeds can be captured by.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnownAttractor {
    pub id: u16,
    pub points: Vec<ExtendedComplex>,
    pub multiplier: C64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleReport {
    pub period: u32,
    pub representative: ExtendedComplex,
    pub points: Vec<ExtendedComplex>,
    pub multiplier: C64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CycleDetection {
    Found(CycleReport),
    /// The orbit reached a root basin during burn-in.
    Escaped { iterations: u32, outcome: Outcome },
    NotFound,
}

impl CycleDetection {
    pub fn cycle(&self) -> Option<&CycleReport> {
        match self {
            CycleDetection::Found(c) => Some(c),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleConfig {
    pub burn_in: u32,
    pub max_period: u32,
    pub tol: f64,
}

impl Default for CycleConfig {
    fn default() -> Self {
        CycleConfig {
            burn_in: 1000,
            max_period: 8,
            tol: 1e-9,
        }
    }
}

/// Chordal distance counted as "at" an attractor.
pub const CAPTURE_RADIUS: f64 = 1e-6;
/// Consecutive iterates that must stay within the capture radius.
pub const CAPTURE_STREAK: u32 = 3;

fn escape_outcome(z: &ExtendedComplex, cfg: &EscapeConfig) -> Option<Outcome> {
    let r = z.value().norm();
    match z.chart() {
        Chart::Standard if r < cfg.eps_zero => Some(Outcome::ToZero),
        Chart::Inverted if r < 1.0 / cfg.eps_inf => Some(Outcome::ToInfinity),
        _ => None,
    }
}

fn near_unit_circle(z: &ExtendedComplex, band: f64) -> bool {
    (z.value().norm() - 1.0).abs() <= band
}

/// One map application with optional projection back onto the invariant
/// unit circle.
#[inline]
fn advance(map: &(impl SphereMap + ?Sized), z: ExtendedComplex, project: bool, band: f64) -> ExtendedComplex {
    let next = map.eval(z);
    if project && near_unit_circle(&z, band) {
        next.project_to_unit_circle()
    } else {
        next
    }
}

fn iterate(
    map: &(impl SphereMap + ?Sized),
    start: ExtendedComplex,
    cfg: &EscapeConfig,
    attractors: &[KnownAttractor],
) -> OrbitClassification {
    let project = cfg.circle_projection && map.preserves_unit_circle();
    let mut z = start;
    let mut streak: Option<(u16, u32)> = None;
    for i in 1..=cfg.max_iter {
        z = advance(map, z, project, cfg.circle_band);
        if !z.is_finite_value() {
            return OrbitClassification {
                outcome: Outcome::Undecided,
                iterations: i,
                witness: z,
                degenerate: false,
            };
        }
        if let Some(outcome) = escape_outcome(&z, cfg) {
            return OrbitClassification {
                outcome,
                iterations: i,
                witness: z,
                degenerate: false,
            };
        }
        let near = attractors
            .iter()
            .find(|a| a.points.iter().any(|p| p.chordal_distance(&z) < CAPTURE_RADIUS))
            .map(|a| a.id);
        streak = match (near, streak) {
            (Some(id), Some((prev, count))) if id == prev => Some((id, count + 1)),
            (Some(id), _) => Some((id, 1)),
            (None, _) => None,
        };
        if let Some((id, count)) = streak {
            if count >= CAPTURE_STREAK {
                return OrbitClassification {
                    outcome: Outcome::ToStrange(id),
                    iterations: i,
                    witness: z,
                    degenerate: false,
                };
            }
        }
    }
    OrbitClassification {
        outcome: Outcome::Undecided,
        iterations: cfg.max_iter,
        witness: z,
        degenerate: false,
    }
}

/// Iterates the free critical point `c₊`. A map without one (a collapsed
/// monomial) has all its critical points at `0` and `∞`, so it is reported
/// as reaching the roots immediately, with `degenerate` set.
pub fn classify_critical_orbit(map: &(impl SphereMap + ?Sized), cfg: &EscapeConfig) -> OrbitClassification {
    match map.free_critical_point() {
        Some(c) => iterate(map, ExtendedComplex::finite(c), cfg, &[]),
        None => OrbitClassification {
            outcome: Outcome::ToZero,
            iterations: 0,
            witness: ExtendedComplex::ZERO,
            degenerate: true,
        },
    }
}

/// Iterates an arbitrary seed, additionally reporting capture by one of
/// `attractors`.
pub fn classify_seed(
    map: &(impl SphereMap + ?Sized),
    z0: ExtendedComplex,
    cfg: &EscapeConfig,
    attractors: &[KnownAttractor],
) -> OrbitClassification {
    let mut c = iterate(map, z0, cfg, attractors);
    c.degenerate = map.reduced().is_some();
    c
}

/// Looks for an attracting cycle reached from `seed`.
pub fn detect_cycle(
    map: &(impl SphereMap + ?Sized),
    seed: ExtendedComplex,
    ccfg: &CycleConfig,
    ecfg: &EscapeConfig,
) -> Result<CycleDetection> {
    if ccfg.max_period < 1 {
        return Err(Error::InvalidArgument("max_period must be ≥ 1".into()));
    }
    let project = ecfg.circle_projection && map.preserves_unit_circle();
    let mut z = seed;
    for i in 1..=ccfg.burn_in {
        z = advance(map, z, project, ecfg.circle_band);
        if let Some(outcome) = escape_outcome(&z, ecfg) {
            return Ok(CycleDetection::Escaped { iterations: i, outcome });
        }
        if !z.is_finite_value() {
            return Ok(CycleDetection::NotFound);
        }
    }
    let start = z;
    let mut points = vec![start];
    let mut multiplier = C64::new(1.0, 0.0);
    let mut w = start;
    for p in 1..=ccfg.max_period {
        let (next, d) = map.step_with_derivative(w);
        let next = if project && near_unit_circle(&w, ecfg.circle_band) {
            next.project_to_unit_circle()
        } else {
            next
        };
        multiplier *= d.unwrap_or(C64::new(f64::INFINITY, 0.0));
        w = next;
        if w.chordal_distance(&start) < ccfg.tol {
            if w.chart() != start.chart() {
                // Change of chart at the closing point: v = 1/u.
                let u = w.value();
                multiplier *= -(u * u).inv();
            }
            return Ok(CycleDetection::Found(CycleReport {
                period: p,
                representative: start,
                points,
                multiplier,
            }));
        }
        points.push(w);
    }
    Ok(CycleDetection::NotFound)
}

/// Attracting strange fixed points of `map`, plus any attracting cycle the
/// free critical orbits settle on. Ids are assigned in that order.
pub fn known_attractors(family: &Family) -> Vec<KnownAttractor> {
    let mut out: Vec<KnownAttractor> = Vec::new();
    let general = match family {
        Family::General(p) => Some(*p),
        Family::Behl(p) => p.to_general().ok(),
    };
    if let Some(g) = general {
        if let Ok(fps) = fixed_points_ank(&g, &PolynomialRootConfig::default()) {
            for f in fps.into_iter().filter(|f| f.strange && f.stability.is_attracting()) {
                out.push(KnownAttractor {
                    id: out.len() as u16,
                    points: vec![f.location],
                    multiplier: f.multiplier,
                });
            }
        }
    }
    if let Some(c) = family.free_critical_point() {
        let cfg = EscapeConfig::default();
        for seed in [ExtendedComplex::finite(c), ExtendedComplex::finite(c).recip()] {
            let Ok(CycleDetection::Found(cycle)) = detect_cycle(family, seed, &CycleConfig::default(), &cfg) else {
                continue;
            };
            if cycle.multiplier.norm() >= 1.0 {
                continue;
            }
            let known = out
                .iter()
                .any(|a| a.points.iter().any(|p| p.chordal_distance(&cycle.representative) < CAPTURE_RADIUS));
            if !known {
                out.push(KnownAttractor {
                    id: out.len() as u16,
                    points: cycle.points,
                    multiplier: cycle.multiplier,
                });
            }
        }
    }
    out
}

/// Computational order of convergence of `step` towards `root`.
///
/// Iterates from `seed`, keeps the errors that stay above
/// `ε·10³·max(1, |root|)` for the scalar's unit roundoff `ε`, and returns
/// `ln(e₂/e₁)/ln(e₁/e₀)` for the last such triple. The kept errors must
/// decrease strictly, which rules out seeds outside the local regime.
pub fn empirical_order<T: Real>(
    mut step: impl FnMut(&Complex<T>) -> Result<Complex<T>>,
    root: &Complex<T>,
    seed: &Complex<T>,
    iters: usize,
) -> Result<f64> {
    let modulus = |z: &Complex<T>| (z.re.clone() * z.re.clone() + z.im.clone() * z.im.clone()).sqrt();
    let ln_err = |z: &Complex<T>| modulus(&(z.clone() - root.clone())).ln_abs();
    let ln_root = modulus(root).ln_abs().max(0.0);
    let floor = T::ln_epsilon() + 1e3f64.ln() + ln_root;

    let first = ln_err(seed);
    let mut errs = vec![first];
    let mut x = seed.clone();
    for _ in 0..iters {
        x = match step(&x) {
            Ok(next) => next,
            Err(_) => break,
        };
        let e = ln_err(&x);
        if !(e > floor) {
            break;
        }
        errs.push(e);
    }
    if errs.len() < 3 {
        return Err(Error::OrderNotMeasurable(format!(
            "only {} errors above the precision floor",
            errs.len()
        )));
    }
    let t = &errs[errs.len() - 3..];
    if errs.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::OrderNotMeasurable("errors are not decreasing".into()));
    }
    Ok((t[2] - t[1]) / (t[1] - t[0]))
}

/// Largest `||w| − 1|` over `iters` iterates of `O_{a,n,k}` started at
/// `theta_samples` equispaced points of the unit circle.
///
/// Runs in 256-bit arithmetic with start points normalized at that
/// precision: the circle is invariant for real `a` but repelling in the
/// normal direction, so double-precision roundoff would be amplified by
/// roughly the local expansion factor at every step. An orbit whose drift
/// exceeds 1/2 is stopped there.
pub fn unit_circle_drift(a: C64, n: u32, k: u32, theta_samples: usize, iters: usize) -> Result<f64> {
    let p = GeneralParams::new(a, n, k)?;
    type W = Wide256;
    let aw = Complex::new(W::from_f64(a.re), W::from_f64(a.im));
    let reduced = p.reduced();
    let one = W::from_f64(1.0);
    let drifts: Vec<f64> = (0..theta_samples)
        .into_par_iter()
        .map(|j| {
            let theta = std::f64::consts::TAU * j as f64 / theta_samples as f64;
            let (x, y) = (W::from_f64(theta.cos()), W::from_f64(theta.sin()));
            let r = (x.clone() * x.clone() + y.clone() * y.clone()).sqrt();
            let mut z = Complex::new(x / r.clone(), y / r);
            let mut worst = 0.0f64;
            for _ in 0..iters {
                let next = match reduced {
                    Some(red) => {
                        let mut acc = Complex::new(W::from_f64(red.sign), W::from_f64(0.0));
                        for _ in 0..red.degree {
                            acc = acc * z.clone();
                        }
                        Some(acc)
                    }
                    None => eval_ank_generic(&aw, n, k, &z),
                };
                let Some(next) = next else {
                    return f64::INFINITY;
                };
                z = next;
                let m = (z.re.clone() * z.re.clone() + z.im.clone() * z.im.clone()).sqrt();
                let d = (m - one.clone()).to_f64().abs();
                worst = worst.max(d);
                if worst > 0.5 {
                    break;
                }
            }
            worst
        })
        .collect();
    Ok(drifts.into_iter().fold(0.0, f64::max))
}

/// One step of Behl's method for `z² + c`, as a closure over any scalar.
pub fn behl_stepper<T: Real>(b: Complex<T>, c: Complex<T>) -> impl FnMut(&Complex<T>) -> Result<Complex<T>> {
    move |x| crate::operator::behl_step_generic(&b, &c, x)
}

/// Convenience: classify the critical orbit of a Behl parameter.
pub fn classify_behl(b: C64, cfg: &EscapeConfig) -> Result<OrbitClassification> {
    let fam = Family::Behl(BehlParams::new(b)?);
    Ok(classify_family(&fam, cfg))
}

/// Critical-orbit classification that also treats the order-five Behl
/// parameters, where `c±` are undefined, as degenerate.
pub fn classify_family(family: &Family, cfg: &EscapeConfig) -> OrbitClassification {
    if family.is_degenerate() {
        return OrbitClassification {
            outcome: Outcome::ToZero,
            iterations: 0,
            witness: ExtendedComplex::ZERO,
            degenerate: true,
        };
    }
    classify_critical_orbit(family, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn general(a: f64, n: u32, k: u32) -> GeneralParams {
        GeneralParams::new(c(a, 0.0), n, k).unwrap()
    }

    #[test]
    fn seeds_near_roots_escape_quickly() {
        let p = general(0.5, 4, 1);
        let cfg = EscapeConfig::default();
        let z = classify_seed(&p, ExtendedComplex::finite(c(1e-4, 0.0)), &cfg, &[]);
        assert_eq!(z.outcome, Outcome::ToZero);
        assert!(z.iterations <= 2);
        let inf = classify_seed(&p, ExtendedComplex::finite(c(1e-4, 0.0)).recip(), &cfg, &[]);
        assert_eq!(inf.outcome, Outcome::ToInfinity);
        assert_eq!(inf.iterations, z.iterations);
    }

    #[test]
    fn superattracting_one_captures_nearby_seed() {
        let p = general(5.0 / 3.0, 4, 1);
        let fam = Family::General(p);
        let attractors = known_attractors(&fam);
        assert!(!attractors.is_empty());
        let one = ExtendedComplex::finite(c(1.0, 0.0));
        let id = attractors
            .iter()
            .find(|a| a.points[0].chordal_distance(&one) < 1e-9)
            .unwrap()
            .id;
        let r = classify_seed(&p, ExtendedComplex::finite(c(1.01, 0.0)), &EscapeConfig::default(), &attractors);
        assert_eq!(r.outcome, Outcome::ToStrange(id));
    }

    #[test]
    fn degenerate_map_has_no_free_orbit() {
        let p = general(0.0, 4, 1);
        let r = classify_critical_orbit(&p, &EscapeConfig::default());
        assert!(r.degenerate);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn cycle_detection_fixed_point_and_escape() {
        let p = general(5.0 / 3.0, 4, 1);
        let found = detect_cycle(&p, ExtendedComplex::finite(c(0.9, 0.1)), &CycleConfig::default(), &EscapeConfig::default()).unwrap();
        let cyc = found.cycle().expect("cycle");
        assert_eq!(cyc.period, 1);
        assert!(cyc.representative.chordal_distance(&ExtendedComplex::finite(c(1.0, 0.0))) < 1e-9);
        let q = general(0.5, 4, 1);
        let esc = detect_cycle(&q, ExtendedComplex::finite(c(2.0, 0.0)), &CycleConfig::default(), &EscapeConfig::default()).unwrap();
        assert!(matches!(esc, CycleDetection::Escaped { outcome: Outcome::ToInfinity, .. }));
    }

    #[test]
    fn quadratic_model_order() {
        let order = empirical_order::<f64>(|z| Ok(z * z), &c(0.0, 0.0), &c(0.5, 0.0), 50).unwrap();
        assert!((order - 2.0).abs() < 0.05, "{order}");
        assert!(empirical_order::<f64>(|z| Ok(z * z), &c(0.0, 0.0), &c(1.5, 0.0), 50).is_err());
    }

    #[test]
    fn monomial_stays_on_circle() {
        let d = unit_circle_drift(c(0.0, 0.0), 3, 2, 64, 20).unwrap();
        assert!(d < 1e-12, "{d}");
    }

    #[test]
    fn escape_config_validation() {
        assert!(EscapeConfig::default().validate().is_ok());
        let bad = EscapeConfig {
            eps_zero: 2.0,
            ..EscapeConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
