//! Fixed points, critical points and multipliers.

use crate::error::{Error, Result};
use crate::operator::{reciprocal_pair, BehlParams, GeneralParams, SphereMap};
use crate::sphere::ExtendedComplex;
use crate::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Below this `|λ|` a fixed point counts as superattracting.
pub const SUPERATTRACTING_TOL: f64 = 1e-9;
/// Chordal residual allowed for a point passed as "fixed".
pub const FIXEDNESS_TOL: f64 = 1e-8;
pub const DEFAULT_INDIFFERENCE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Superattracting,
    Attracting,
    Indifferent,
    Repelling,
}

impl Stability {
    pub fn from_multiplier(lambda: C64, tol_indiff: f64) -> Stability {
        let m = lambda.norm();
        if m < SUPERATTRACTING_TOL {
            Stability::Superattracting
        } else if (m - 1.0).abs() <= tol_indiff {
            Stability::Indifferent
        } else if m < 1.0 {
            Stability::Attracting
        } else {
            Stability::Repelling
        }
    }

    pub fn is_attracting(self) -> bool {
        matches!(self, Stability::Superattracting | Stability::Attracting)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub location: ExtendedComplex,
    pub multiplier: C64,
    pub stability: Stability,
    /// Not one of the images `0`, `∞` of the roots.
    pub strange: bool,
    pub multiplicity: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Solver {
    Aberth,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialRootConfig {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub solver: Solver,
    pub seed: u64,
    /// Roots closer than this are merged into one with summed multiplicity.
    pub cluster_radius: f64,
}

impl Default for PolynomialRootConfig {
    fn default() -> Self {
        PolynomialRootConfig {
            max_iterations: 200,
            tolerance: 1e-12,
            solver: Solver::Aberth,
            seed: 0x5eed,
            cluster_radius: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalSet {
    /// Critical points that are themselves fixed (`0` and `∞`).
    pub fixed_critical: Vec<(ExtendedComplex, u32)>,
    /// Critical points at the preimages `a` and `1/a` of `0` and `∞`.
    pub preimage_critical: Vec<(ExtendedComplex, u32)>,
    /// `(c₊, c₋)`; absent when the map has collapsed to a monomial.
    pub free: Option<(C64, C64)>,
    pub degenerate: bool,
}

impl CriticalSet {
    pub fn total_multiplicity(&self) -> u32 {
        let pinned: u32 = self
            .fixed_critical
            .iter()
            .chain(&self.preimage_critical)
            .map(|&(_, m)| m)
            .sum();
        pinned + if self.free.is_some() { 2 } else { 0 }
    }
}

fn poly_mul(p: &[C64], q: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); p.len() + q.len() - 1];
    for (i, &x) in p.iter().enumerate() {
        for (j, &y) in q.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_pow(p: &[C64], e: u32) -> Vec<C64> {
    (0..e).fold(vec![C64::new(1.0, 0.0)], |acc, _| poly_mul(&acc, p))
}

/// Value and derivative by Horner; coefficients in ascending order.
fn horner(coeffs: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Rounding-error scale of a Horner evaluation at `z`.
fn horner_error_bound(coeffs: &[C64], z: C64) -> f64 {
    let r = z.norm();
    let mut acc = 0.0;
    for c in coeffs.iter().rev() {
        acc = acc * r + c.norm();
    }
    acc * f64::EPSILON * (4 * coeffs.len()) as f64
}

/// All roots of a polynomial (ascending coefficients, nonzero leading
/// coefficient) by Aberth–Ehrlich simultaneous iteration.
pub fn aberth_roots(coeffs: &[C64], cfg: &PolynomialRootConfig) -> Result<Vec<C64>> {
    let lead = *coeffs.last().expect("nonempty polynomial");
    if lead == C64::new(0.0, 0.0) {
        return Err(Error::InvalidArgument("zero leading coefficient".into()));
    }
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let monic: Vec<C64> = coeffs.iter().map(|&c| c / lead).collect();

    // Fujiwara-type bound gives the starting radius.
    let radius = (0..deg)
        .map(|i| monic[i].norm().powf(1.0 / (deg - i) as f64))
        .fold(0.0f64, f64::max)
        .max(1e-3);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let offset: f64 = rng.gen::<f64>() * TAU;
    let mut z: Vec<C64> = (0..deg)
        .map(|j| {
            let angle = offset + TAU * j as f64 / deg as f64 + rng.gen_range(-0.1..0.1);
            let r = radius * rng.gen_range(0.9..1.1);
            C64::from_polar(r, angle)
        })
        .collect();

    let mut done = vec![false; deg];
    for _ in 0..cfg.max_iterations {
        for i in 0..deg {
            if done[i] {
                continue;
            }
            let (p, dp) = horner(&monic, z[i]);
            if p.norm() <= horner_error_bound(&monic, z[i]) {
                done[i] = true;
                continue;
            }
            let ratio = p / dp;
            let repulsion: C64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (1.0 - ratio * repulsion);
            if !(step.re.is_finite() && step.im.is_finite()) {
                continue;
            }
            z[i] -= step;
            if step.norm() <= cfg.tolerance * z[i].norm().max(1.0) {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            for zi in z.iter_mut() {
                polish(&monic, zi);
            }
            return Ok(z);
        }
    }
    Err(Error::NoConvergence {
        iterations: cfg.max_iterations,
        estimates: z,
    })
}

/// Two guarded Newton steps; a step is kept only if it lowers the residual.
fn polish(coeffs: &[C64], z: &mut C64) {
    for _ in 0..2 {
        let (p, dp) = horner(coeffs, *z);
        if dp == C64::new(0.0, 0.0) {
            return;
        }
        let candidate = *z - p / dp;
        if horner(coeffs, candidate).0.norm() < p.norm() {
            *z = candidate;
        } else {
            return;
        }
    }
}

/// Merges points closer than `radius`, returning centroids with counts.
fn cluster(points: &[C64], radius: f64) -> Vec<(C64, u32)> {
    let mut groups: Vec<(C64, u32)> = Vec::new();
    for &z in points {
        match groups
            .iter_mut()
            .find(|(c, m)| (*c / *m as f64 - z).norm() < radius)
        {
            Some((sum, m)) => {
                *sum += z;
                *m += 1;
            }
            None => groups.push((z, 1)),
        }
    }
    groups.into_iter().map(|(s, m)| (s / m as f64, m)).collect()
}

/// Multiplier and class of a fixed point. Because the maps commute with
/// `z ↦ 1/z`, the multiplier at `z` equals the one at `1/z`; it is read at
/// whichever of the two lies in the closed unit disk (so `∞` uses `0`).
pub fn multiplier_and_class(
    map: &dyn SphereMap,
    z0: ExtendedComplex,
    tol_indiff: f64,
) -> Result<FixedPointReport> {
    let image = map.eval(z0);
    let residual = image.chordal_distance(&z0);
    if !(residual < FIXEDNESS_TOL) {
        return Err(Error::NotFixedPoint { residual });
    }
    let u = match z0.to_complex() {
        Some(z) if z.norm() <= 1.0 => z,
        _ => ExtendedComplex::recip(z0).to_complex().unwrap_or_default(),
    };
    let multiplier = map.deriv_std(u).ok_or(Error::DerivativeAtPole)?;
    Ok(FixedPointReport {
        location: z0,
        multiplier,
        stability: Stability::from_multiplier(multiplier, tol_indiff),
        strange: !(z0.is_zero() || z0.is_infinity()),
        multiplicity: 1,
    })
}

/// `|O(z) − z|` measured in the chart where `|z| ≤ 1`.
fn fixed_residual(map: &dyn SphereMap, z: C64) -> f64 {
    let u = if z.norm() <= 1.0 { z } else { z.inv() };
    match map.eval_std(u).to_complex() {
        Some(v) => (v - u).norm(),
        None => f64::INFINITY,
    }
}

/// All `n + k + 1` fixed points of `O_{a,n,k}` with multiplicity: `0`, `∞`
/// and the roots of `zⁿ⁻¹(z − a)ᵏ − (1 − az)ᵏ`. A degenerate map is
/// treated as its monomial.
pub fn fixed_points_ank(p: &GeneralParams, cfg: &PolynomialRootConfig) -> Result<Vec<FixedPointReport>> {
    let finite: Vec<(C64, u32)> = match p.reduced() {
        Some(r) => {
            // sign·z^d = z  ⇔  z^(d−1) = sign.
            let m = r.degree - 1;
            let base = if r.sign > 0.0 { 0.0 } else { 0.5 };
            (0..m)
                .map(|j| (C64::from_polar(1.0, TAU * (j as f64 + base) / m as f64), 1))
                .collect()
        }
        None => {
            let a = p.a;
            let zn1 = {
                let mut v = vec![C64::new(0.0, 0.0); p.n as usize];
                v[p.n as usize - 1] = C64::new(1.0, 0.0);
                v
            };
            let lhs = poly_mul(&zn1, &poly_pow(&[-a, C64::new(1.0, 0.0)], p.k));
            let rhs = poly_pow(&[C64::new(1.0, 0.0), -a], p.k);
            let mut coeffs = lhs;
            for (i, c) in rhs.into_iter().enumerate() {
                coeffs[i] -= c;
            }
            let roots = aberth_roots(&coeffs, cfg)?;
            cluster(&roots, cfg.cluster_radius)
        }
    };

    let mut reports = Vec::with_capacity(finite.len() + 2);
    for z in [ExtendedComplex::ZERO, ExtendedComplex::INFINITY] {
        reports.push(multiplier_and_class(p, z, DEFAULT_INDIFFERENCE_TOL)?);
    }
    let mut worst = 0.0f64;
    for &(z, m) in &finite {
        worst = worst.max(fixed_residual(p, z));
        let location = ExtendedComplex::finite(z);
        let u = if z.norm() <= 1.0 { z } else { z.inv() };
        let multiplier = p.deriv_std(u).ok_or(Error::DerivativeAtPole)?;
        reports.push(FixedPointReport {
            location,
            multiplier,
            stability: Stability::from_multiplier(multiplier, DEFAULT_INDIFFERENCE_TOL),
            strange: true,
            multiplicity: m,
        });
    }
    if !(worst < cfg.tolerance.max(1e-10)) {
        return Err(Error::NoConvergence {
            iterations: cfg.max_iterations,
            estimates: finite.iter().map(|&(z, _)| z).collect(),
        });
    }
    Ok(reports)
}

/// The strange fixed points `z± = (a ± √(a² − 4))/2` of `O_{a,4,1}`.
pub fn strange_fixed_zpm_a(a: C64) -> (C64, C64) {
    reciprocal_pair(a, (a * a - 4.0).sqrt(), C64::new(2.0, 0.0))
}

/// The two strange fixed points of the Behl operator besides `±1`.
pub fn strange_fixed_zpm_b(b: C64) -> Result<(C64, C64)> {
    let den = 2.0 * (b - 1.0) * (b + 3.0);
    if den == C64::new(0.0, 0.0) {
        return Err(Error::FormulaUndefined(format!("z± at b = {b}")));
    }
    let b2 = b * b;
    let p = 11.0 + 6.0 * b - b2;
    let s = ((5.0 + 10.0 * b + b2) * (17.0 + 2.0 * b - 3.0 * b2)).sqrt();
    Ok(reciprocal_pair(p, s, den))
}

pub fn critical_set_ank(p: &GeneralParams) -> CriticalSet {
    let (n, k) = (p.n, p.k);
    let pinned = |m: u32| {
        vec![
            (ExtendedComplex::ZERO, m),
            (ExtendedComplex::INFINITY, m),
        ]
    };
    match p.reduced() {
        Some(r) => CriticalSet {
            fixed_critical: pinned(r.degree - 1),
            preimage_critical: Vec::new(),
            free: None,
            degenerate: true,
        },
        None => {
            let preimage_critical = if k > 1 {
                vec![
                    (ExtendedComplex::finite(p.a), k - 1),
                    (ExtendedComplex::finite(p.a.inv()), k - 1),
                ]
            } else {
                Vec::new()
            };
            CriticalSet {
                fixed_critical: pinned(n - 1),
                preimage_critical,
                free: p.free_critical_pair(),
                degenerate: false,
            }
        }
    }
}

pub fn critical_points_b(b: C64) -> Result<(C64, C64)> {
    BehlParams::new(b)?.free_critical_pair()
}
