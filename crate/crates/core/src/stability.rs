//! Closed-form stability regions of the strange fixed points, their
//! boundary curves, and the real antennas.
//!
//! Every region is described by a continuous real function of the parameter
//! that is negative where the fixed point attracts and vanishes on the
//! indifference curve. Classification applies a tolerance band around zero;
//! [`trace_boundary`] locates the zero set by bisection.

use crate::error::{Error, Result};
use crate::operator::{reparam_a_of_b, BehlParams, SphereMap};
use crate::roots::strange_fixed_zpm_b;
use crate::C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

pub const DEFAULT_REGION_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Attracting,
    Indifferent,
    Repelling,
    NotFixed,
}

impl Region {
    fn from_value(v: f64, tol: f64) -> Region {
        if v.abs() <= tol {
            Region::Indifferent
        } else if v < 0.0 {
            Region::Attracting
        } else {
            Region::Repelling
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WhichPoint {
    Z1,
    Zm1,
    Zpm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parametrization {
    General { n: u32, k: u32 },
    Behl,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityRegionQuery {
    pub which_point: WhichPoint,
    pub parametrization: Parametrization,
    pub parameter: C64,
}

impl StabilityRegionQuery {
    pub fn classify(&self, tol: f64) -> Result<Region> {
        let p = self.parameter;
        match (self.parametrization, self.which_point) {
            (Parametrization::General { n, k }, WhichPoint::Z1) => Ok(region_z1_ank(p, n, k, tol)),
            (Parametrization::General { n, k }, WhichPoint::Zm1) => Ok(region_zm1_ank(p, n, k, tol)),
            (Parametrization::General { n: 4, k: 1 }, WhichPoint::Zpm) => Ok(region_zpm_a(p, tol)),
            (Parametrization::General { .. }, WhichPoint::Zpm) => Err(Error::InvalidArgument(
                "closed-form z± regions exist only for (n, k) = (4, 1)".into(),
            )),
            (Parametrization::Behl, which) => {
                let v = match which {
                    WhichPoint::Z1 => behl_curve_values(p).v_p1,
                    WhichPoint::Zm1 => behl_curve_values(p).v_m1,
                    WhichPoint::Zpm => behl_zpm_multiplier_value(p),
                };
                Ok(v.map_or(Region::NotFixed, |v| Region::from_value(v, tol)))
            }
        }
    }
}

/// Multiplier of `z = 1` for `O_{a,n,k}`: `((n − k)a − (n + k))/(a − 1)`.
pub fn multiplier_z1_ank(a: C64, n: u32, k: u32) -> C64 {
    let (m, s) = (n as f64 - k as f64, (n + k) as f64);
    (m * a - s) / (a - 1.0)
}

/// Signed distance-like value whose sign decides attraction of `z = 1`:
/// a disk for `|n − k| ≥ 2`, the half-planes `Re a > n` / `Re a < −n` for
/// `n − k = ±1`, and the exterior of `|a − 1| = 2k` for `n = k`.
pub fn z1_value(a: C64, n: u32, k: u32) -> f64 {
    let m = n as i64 - k as i64;
    let (nf, kf) = (n as f64, k as f64);
    match m {
        0 => 2.0 * kf - (a - 1.0).norm(),
        1 => nf - a.re,
        -1 => a.re + nf,
        _ => {
            let d = (m * m - 1) as f64;
            let center = (nf * nf - kf * kf - 1.0) / d;
            let radius = 2.0 * kf / d;
            (a - center).norm() - radius
        }
    }
}

pub fn region_z1_ank(a: C64, n: u32, k: u32, tol: f64) -> Region {
    Region::from_value(z1_value(a, n, k), tol)
}

/// `z = −1` is fixed only for odd `n + k`; then its region mirrors that of
/// `z = 1` under `a ↦ −a`.
pub fn region_zm1_ank(a: C64, n: u32, k: u32, tol: f64) -> Region {
    if (n + k) % 2 == 0 {
        Region::NotFixed
    } else {
        region_z1_ank(-a, n, k, tol)
    }
}

/// `β² − ν(α)²` with `ν(α)² = −5 − α² + √(1 + 20α²)`, for `a = α + iβ` and
/// `(n, k) = (4, 1)`. Negative inside the two lenses around `a = ±√5`.
pub fn zpm_value_a(a: C64) -> f64 {
    let (al, be) = (a.re, a.im);
    let nu2 = -5.0 - al * al + (1.0 + 20.0 * al * al).sqrt();
    be * be - nu2
}

pub fn region_zpm_a(a: C64, tol: f64) -> Region {
    Region::from_value(zpm_value_a(a), tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BehlCurveValues {
    /// `|O_b′(−1)| − 1`; `None` at `b = −1`, where `−1` is not fixed.
    pub v_m1: Option<f64>,
    /// `|O_b′(1)| − 1`; `None` at `b = 1 ± 2√2`, where `1` is not fixed.
    pub v_p1: Option<f64>,
    /// The degree-8 indifference polynomial of `z±` at `(α, β)`; negative
    /// where `z±` attract. `None` at `b ∈ {1, −3}`.
    pub v_pm: Option<f64>,
}

/// `O_b′(−1) = (b² + 14b + 9)/(4b + 4)`.
pub fn behl_multiplier_m1(b: C64) -> Option<C64> {
    let den = 4.0 * b + 4.0;
    (den != C64::new(0.0, 0.0)).then(|| (b * b + 14.0 * b + 9.0) / den)
}

/// `O_b′(1) = 4(b − 3)(b + 2)/(b² − 2b − 7)`.
pub fn behl_multiplier_p1(b: C64) -> Option<C64> {
    let den = b * b - 2.0 * b - 7.0;
    let degenerate = BehlParams { b }.reduced().is_some_and(|r| r.sign < 0.0);
    (den != C64::new(0.0, 0.0) && !degenerate).then(|| 4.0 * (b - 3.0) * (b + 2.0) / den)
}

pub fn behl_zpm_polynomial(b: C64) -> f64 {
    let (x, y) = (b.re, b.im);
    let y2 = y * y;
    let horner = |cs: &[f64]| cs.iter().rev().fold(0.0, |acc, &c| acc * x + c);
    let t0 = horner(&[5.0, 10.0, 1.0]) * horner(&[-17.0, -2.0, 3.0]) * horner(&[-67.0, -204.0, -26.0, 36.0, 5.0]);
    let t2 = 4.0 * horner(&[8259.0, 5994.0, 1225.0, -4.0, 709.0, 186.0, 15.0]);
    let t4 = 2.0 * horner(&[6069.0, 1508.0, 1606.0, 372.0, 45.0]);
    let t6 = 4.0 * horner(&[299.0, 62.0, 15.0]);
    t0 + y2 * (t2 + y2 * (t4 + y2 * (t6 + y2 * 15.0)))
}

pub fn behl_curve_values(b: C64) -> BehlCurveValues {
    let zpm_defined = b != C64::new(1.0, 0.0) && b != C64::new(-3.0, 0.0);
    BehlCurveValues {
        v_m1: behl_multiplier_m1(b).map(|l| l.norm() - 1.0),
        v_p1: behl_multiplier_p1(b).map(|l| l.norm() - 1.0),
        v_pm: zpm_defined.then(|| behl_zpm_polynomial(b)),
    }
}

/// `|O_b′(z₊)| − 1`, the direct multiplier test for the strange pair.
pub fn behl_zpm_multiplier_value(b: C64) -> Option<f64> {
    let p = BehlParams::new(b).ok()?;
    let (zp, _) = strange_fixed_zpm_b(b).ok()?;
    let u = if zp.norm() <= 1.0 { zp } else { zp.inv() };
    p.deriv_std(u).map(|l| l.norm() - 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Plane {
    A,
    B,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AntennaIntervals {
    pub plane: Plane,
    /// Open, disjoint, ascending; unbounded ends are `±∞`.
    pub intervals: Vec<(f64, f64)>,
}

impl AntennaIntervals {
    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo < x && x < hi)
    }
}

/// Real `a` for which both free critical points lie on the unit circle.
pub fn antenna_intervals(n: u32, k: u32) -> Result<AntennaIntervals> {
    if n == k {
        return Err(Error::NoAntennaBound);
    }
    let r = ((n + k) as f64 / (n as f64 - k as f64)).abs();
    Ok(AntennaIntervals {
        plane: Plane::A,
        intervals: vec![(-r, -1.0), (1.0, r)],
    })
}

/// Preimage of the `(4, 1)` antenna under `a(b)`, in the Behl `b` plane.
pub fn antenna_b_image() -> AntennaIntervals {
    let r10 = 2.0 * 10f64.sqrt();
    let r2 = 2.0 * 2f64.sqrt();
    AntennaIntervals {
        plane: Plane::B,
        intervals: vec![
            (f64::NEG_INFINITY, -7.0 - r10),
            (-2.0, 1.0 - r2),
            (-1.0, -7.0 + r10),
            (3.0, 1.0 + r2),
        ],
    }
}

/// Which boundary to trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryQuery {
    pub which_point: WhichPoint,
    pub parametrization: Parametrization,
}

impl BoundaryQuery {
    /// The continuous function whose zero set is the indifference curve.
    pub fn value(&self, p: C64) -> f64 {
        match (self.parametrization, self.which_point) {
            (Parametrization::General { n, k }, WhichPoint::Z1) => z1_value(p, n, k),
            (Parametrization::General { n, k }, WhichPoint::Zm1) => z1_value(-p, n, k),
            (Parametrization::General { .. }, WhichPoint::Zpm) => zpm_value_a(p),
            (Parametrization::Behl, WhichPoint::Z1) => behl_multiplier_p1(p).map_or(f64::NAN, |l| l.norm() - 1.0),
            (Parametrization::Behl, WhichPoint::Zm1) => behl_multiplier_m1(p).map_or(f64::NAN, |l| l.norm() - 1.0),
            (Parametrization::Behl, WhichPoint::Zpm) => behl_zpm_polynomial(p),
        }
    }

    /// Parameters where the point is superattracting, used as ray origins.
    pub fn centers(&self) -> Vec<C64> {
        let re = |x: f64| C64::new(x, 0.0);
        let s5 = 5f64.sqrt();
        match (self.parametrization, self.which_point) {
            (Parametrization::General { n, k }, w) if w != WhichPoint::Zpm => {
                if n.abs_diff(k) >= 2 {
                    let c = (n + k) as f64 / (n as f64 - k as f64);
                    vec![if w == WhichPoint::Z1 { re(c) } else { re(-c) }]
                } else {
                    Vec::new()
                }
            }
            (Parametrization::General { .. }, _) => vec![re(-s5), re(s5)],
            (Parametrization::Behl, WhichPoint::Z1) => vec![re(-2.0), re(3.0)],
            (Parametrization::Behl, WhichPoint::Zm1) => {
                let r = 2.0 * 10f64.sqrt();
                vec![re(-7.0 - r), re(-7.0 + r)]
            }
            (Parametrization::Behl, WhichPoint::Zpm) => {
                let (p, q) = ((10.0 - 2.0 * s5).sqrt(), (10.0 + 2.0 * s5).sqrt());
                vec![re(-2.0 - s5 - q), re(-2.0 + s5 - p), re(-2.0 - s5 + q), re(-2.0 + s5 + p)]
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceConfig {
    /// Rays from a center are searched out to this distance.
    pub max_radius: f64,
    /// Coarse steps along each ray or scan line before bisection.
    pub coarse_steps: usize,
    /// Window `[−extent, extent]²` for the axis-grid scan.
    pub extent: f64,
    /// Bisection stops once the bracket is shorter than this.
    pub tol: f64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            max_radius: 10.0,
            coarse_steps: 2000,
            extent: 10.0,
            tol: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    pub query: BoundaryQuery,
    /// Each component is an ordered polyline.
    pub components: Vec<Vec<C64>>,
}

impl Boundary {
    pub fn points(&self) -> impl Iterator<Item = &C64> {
        self.components.iter().flatten()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("re,im\n");
        for p in self.points() {
            let _ = writeln!(s, "{:.17e},{:.17e}", p.re, p.im);
        }
        s
    }

    pub fn to_json(&self) -> String {
        let doc = serde_json::json!({
            "which_point": self.query.which_point,
            "parametrization": self.query.parametrization,
            "point_count": self.points().count(),
            "components": self
                .components
                .iter()
                .map(|c| c.iter().map(|p| [p.re, p.im]).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        });
        serde_json::to_string_pretty(&doc).expect("boundary serializes")
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_text(path, &self.to_csv())
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        write_text(path, &self.to_json())
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Bisects `f(start + t·dir)` on `[lo, hi]`, where the signs differ.
fn bisect(f: &dyn Fn(C64) -> f64, start: C64, dir: C64, mut lo: f64, mut hi: f64, tol: f64) -> C64 {
    let f_lo = f(start + dir * lo);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let v = f(start + dir * mid);
        if (v < 0.0) == (f_lo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    start + dir * (0.5 * (lo + hi))
}

/// All sign changes of `f` along `start + t·dir`, `t ∈ [t0, t1]`.
fn crossings(f: &dyn Fn(C64) -> f64, start: C64, dir: C64, t0: f64, t1: f64, cfg: &TraceConfig, first_only: bool) -> Vec<C64> {
    let mut out = Vec::new();
    let h = (t1 - t0) / cfg.coarse_steps as f64;
    let mut prev_t = t0;
    let mut prev_v = f(start + dir * t0);
    for i in 1..=cfg.coarse_steps {
        let t = t0 + h * i as f64;
        let v = f(start + dir * t);
        if v.is_finite() && prev_v.is_finite() && (v < 0.0) != (prev_v < 0.0) {
            out.push(bisect(f, start, dir, prev_t, t, cfg.tol));
            if first_only {
                break;
            }
        }
        prev_t = t;
        prev_v = v;
    }
    out
}

/// Points on the indifference curve of `query`.
///
/// With superattracting centers, `samples` rays are cast from each center
/// and the first sign change on each ray is refined by bisection, giving
/// one closed polyline per center. Otherwise `samples` horizontal scan lines
/// cover `[−extent, extent]²`; the i-th crossing of every line forms the
/// i-th polyline, ordered bottom to top.
pub fn trace_boundary(query: BoundaryQuery, samples: usize, cfg: &TraceConfig) -> Result<Boundary> {
    if samples < 16 {
        return Err(Error::InvalidArgument(format!("need at least 16 samples, got {samples}")));
    }
    let f = move |p: C64| query.value(p);
    let centers = query.centers();
    let components = if !centers.is_empty() {
        centers
            .iter()
            .map(|&c| {
                (0..samples)
                    .into_par_iter()
                    .filter_map(|j| {
                        let dir = C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / samples as f64);
                        crossings(&f, c, dir, 0.0, cfg.max_radius, cfg, true).pop()
                    })
                    .collect::<Vec<_>>()
            })
            .filter(|c| !c.is_empty())
            .collect()
    } else {
        let e = cfg.extent;
        let lines: Vec<Vec<C64>> = (0..samples)
            .into_par_iter()
            .map(|i| {
                let y = -e + 2.0 * e * (i as f64 + 0.5) / samples as f64;
                crossings(&f, C64::new(0.0, y), C64::new(1.0, 0.0), -e, e, cfg, false)
            })
            .collect();
        let chains = lines.iter().map(Vec::len).max().unwrap_or(0);
        (0..chains)
            .map(|i| lines.iter().filter_map(|l| l.get(i).copied()).collect())
            .collect()
    };
    Ok(Boundary { query, components })
}

/// Image of `b` in the `a` plane, or `None` at the poles `b ∈ {1, −3}`.
pub fn behl_to_a(b: C64) -> Option<C64> {
    reparam_a_of_b(b).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn z1_regimes() {
        assert_eq!(region_z1_ank(c(1.74, 0.0), 4, 1, 1e-9), Region::Attracting);
        assert_eq!(region_z1_ank(c(5.0001, 0.0), 2, 2, 1e-9), Region::Attracting);
        assert_eq!(region_z1_ank(c(3.5, 0.0), 3, 2, 1e-9), Region::Attracting);
        assert_eq!(region_z1_ank(c(2.5, 0.0), 3, 2, 1e-9), Region::Repelling);
        assert_eq!(region_zm1_ank(c(-3.5, 0.0), 3, 2, 1e-9), Region::Attracting);
        assert_eq!(region_zm1_ank(c(-1.74, 0.0), 4, 1, 1e-9), Region::Attracting);
        assert_eq!(region_zm1_ank(c(0.3, 0.0), 4, 2, 1e-9), Region::NotFixed);
        assert_eq!(region_z1_ank(c(2.0, 0.0), 4, 1, 1e-9), Region::Indifferent);
    }

    #[test]
    fn zpm_regions() {
        assert_eq!(region_zpm_a(c(5f64.sqrt(), 0.0), 1e-9), Region::Attracting);
        assert_eq!(region_zpm_a(c(3.0, 0.0), 1e-9), Region::Repelling);
        let nu = (-5.0 - 2.4f64 * 2.4 + (1.0 + 20.0 * 2.4f64 * 2.4).sqrt()).sqrt();
        assert_eq!(region_zpm_a(c(2.4, nu), 1e-9), Region::Indifferent);
    }

    #[test]
    fn behl_curve_fixtures() {
        let v = behl_curve_values(c(-7.0 + 2.0 * 10f64.sqrt(), 0.0));
        assert!((v.v_m1.unwrap() + 1.0).abs() < 1e-12);
        let edge = behl_curve_values(c(-9.0 + 2.0 * 17f64.sqrt(), 0.0));
        assert!(edge.v_m1.unwrap().abs() < 1e-8);
        assert!(behl_curve_values(c(-1.0, 0.0)).v_m1.is_none());
        assert!(behl_curve_values(c(1.0, 0.0)).v_pm.is_none());
        assert!(behl_curve_values(c(1.0 + 2.0 * 2f64.sqrt(), 0.0)).v_p1.is_none());
    }

    #[test]
    fn antenna_tables() {
        let i41 = antenna_intervals(4, 1).unwrap();
        assert_eq!(i41.intervals, vec![(-5.0 / 3.0, -1.0), (1.0, 5.0 / 3.0)]);
        assert_eq!(antenna_intervals(6, 2).unwrap().intervals, vec![(-2.0, -1.0), (1.0, 2.0)]);
        assert!(matches!(antenna_intervals(3, 3), Err(Error::NoAntennaBound)));
        let b = antenna_b_image();
        assert_eq!(b.intervals[0].0, f64::NEG_INFINITY);
        assert!((reparam_a_of_b(c(3.0, 0.0)).unwrap().re - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn traced_disk_is_the_disk() {
        let q = BoundaryQuery {
            which_point: WhichPoint::Z1,
            parametrization: Parametrization::General { n: 4, k: 1 },
        };
        let b = trace_boundary(q, 64, &TraceConfig::default()).unwrap();
        assert_eq!(b.components.len(), 1);
        assert_eq!(b.components[0].len(), 64);
        for p in b.points() {
            assert!(((p - 1.75).norm() - 0.25).abs() < 1e-8);
        }
    }

    #[test]
    fn half_plane_boundary_is_a_line() {
        let q = BoundaryQuery {
            which_point: WhichPoint::Z1,
            parametrization: Parametrization::General { n: 3, k: 2 },
        };
        let b = trace_boundary(q, 32, &TraceConfig::default()).unwrap();
        assert_eq!(b.components.len(), 1);
        for p in b.points() {
            assert!((p.re - 3.0).abs() < 1e-9);
        }
        assert!(trace_boundary(q, 8, &TraceConfig::default()).is_err());
    }
}
