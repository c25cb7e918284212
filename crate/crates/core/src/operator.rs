//! The rational maps under study and the maps that relate them.

use crate::error::{Error, Result};
use crate::precision::Real;
use crate::sphere::{Chart, ExtendedComplex};
use crate::C64;
use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

/// A degenerate operator that collapsed to `sign · z^degree`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reduced {
    pub sign: f64,
    pub degree: u32,
}

impl Reduced {
    fn eval_std(&self, u: C64) -> ExtendedComplex {
        ExtendedComplex::finite(u.powu(self.degree) * self.sign)
    }

    fn deriv_std(&self, u: C64) -> C64 {
        u.powu(self.degree - 1) * (self.sign * self.degree as f64)
    }
}

/// A rational map of the sphere that commutes with `z ↦ 1/z`.
///
/// Implementors only evaluate in the standard chart on `|u| ≤ 2`; the
/// inversion symmetry `O(1/w) = 1/O(w)` supplies the other chart.
pub trait SphereMap: Sync {
    /// `O(u)` for finite `u`.
    fn eval_std(&self, u: C64) -> ExtendedComplex;

    /// `O′(u)`, or `None` at a pole.
    fn deriv_std(&self, u: C64) -> Option<C64>;

    /// The free critical point `c₊`, if the map has one.
    fn free_critical_point(&self) -> Option<C64>;

    /// Whether the map is known to leave the unit circle invariant.
    fn preserves_unit_circle(&self) -> bool;

    fn reduced(&self) -> Option<Reduced>;

    fn eval(&self, z: ExtendedComplex) -> ExtendedComplex {
        let image = self.eval_std(z.value());
        match z.chart() {
            Chart::Standard => image,
            Chart::Inverted => image.recip(),
        }
    }

    /// One step together with the derivative of the map read in the charts
    /// of its input and output. Products of these along an orbit give
    /// multipliers of cycles regardless of which charts the points live in.
    fn step_with_derivative(&self, z: ExtendedComplex) -> (ExtendedComplex, Option<C64>) {
        let u = z.value();
        let image = self.eval_std(u);
        let d = self.deriv_std(u).map(|d| match image.chart() {
            Chart::Standard => d,
            Chart::Inverted => -d * image.value() * image.value(),
        });
        let out = match z.chart() {
            Chart::Standard => image,
            Chart::Inverted => image.recip(),
        };
        (out, d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralParams {
    pub a: C64,
    pub n: u32,
    pub k: u32,
}

impl GeneralParams {
    pub fn new(a: C64, n: u32, k: u32) -> Result<Self> {
        if n < 2 || k < 1 {
            return Err(Error::InvalidArgument(format!(
                "need n ≥ 2 and k ≥ 1, got n = {n}, k = {k}"
            )));
        }
        if !(a.re.is_finite() && a.im.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite a = {a}")));
        }
        Ok(GeneralParams { a, n, k })
    }

    /// `a = 1` gives `(−1)ᵏzⁿ`, `a = −1` gives `zⁿ`, `a = 0` is `zⁿ⁺ᵏ`.
    /// Only exact equality counts.
    pub fn reduced(&self) -> Option<Reduced> {
        let (a, n, k) = (self.a, self.n, self.k);
        if a == C64::new(1.0, 0.0) {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            Some(Reduced { sign, degree: n })
        } else if a == C64::new(-1.0, 0.0) {
            Some(Reduced {
                sign: 1.0,
                degree: n,
            })
        } else if a == C64::zero() {
            Some(Reduced {
                sign: 1.0,
                degree: n + k,
            })
        } else {
            None
        }
    }

    /// The degree drops only at `a = ±1`; `a = 0` keeps the full degree.
    pub fn degree(&self) -> u32 {
        match self.reduced() {
            Some(r) if self.a != C64::zero() => r.degree,
            _ => self.n + self.k,
        }
    }

    /// Free critical points `(c₊, c₋)`, principal square root. `None` at
    /// `a = 0` and `a = ±1`, where no free critical point remains.
    pub fn free_critical_pair(&self) -> Option<(C64, C64)> {
        if self.reduced().is_some() {
            return None;
        }
        let (a, n, k) = (self.a, self.n as f64, self.k as f64);
        let a2 = a * a;
        let p = (n + k) + (n - k) * a2;
        let disc = (a2 - 1.0) * ((n - k) * (n - k) * a2 - (n + k) * (n + k));
        let s = disc.sqrt();
        let den = 2.0 * n * a;
        Some(reciprocal_pair(p, s, den))
    }
}

/// `((p+s)/den, (p−s)/den)` for a pair whose product is known to be 1,
/// computing the smaller one as the reciprocal of the larger.
pub(crate) fn reciprocal_pair(p: C64, s: C64, den: C64) -> (C64, C64) {
    let plus = p + s;
    let minus = p - s;
    if plus.norm() >= minus.norm() {
        let c = plus / den;
        (c, c.inv())
    } else {
        let c = minus / den;
        (c.inv(), c)
    }
}

impl SphereMap for GeneralParams {
    fn eval_std(&self, u: C64) -> ExtendedComplex {
        if let Some(r) = self.reduced() {
            return r.eval_std(u);
        }
        let a = self.a;
        let num = u.powu(self.n) * (u - a).powu(self.k);
        let den = (1.0 - a * u).powu(self.k);
        ExtendedComplex::from_ratio(num, den)
    }

    fn deriv_std(&self, u: C64) -> Option<C64> {
        if let Some(r) = self.reduced() {
            return Some(r.deriv_std(u));
        }
        let (a, n, k) = (self.a, self.n, self.k);
        let pole = 1.0 - a * u;
        if pole == C64::zero() {
            return None;
        }
        let (nf, kf) = (n as f64, k as f64);
        let quad = -a * nf * u * u + ((nf + kf) + a * a * (nf - kf)) * u - a * nf;
        Some(u.powu(n - 1) * (u - a).powu(k - 1) * quad / pole.powu(k + 1))
    }

    fn free_critical_point(&self) -> Option<C64> {
        self.free_critical_pair().map(|(c, _)| c)
    }

    fn preserves_unit_circle(&self) -> bool {
        self.a.im == 0.0
    }

    fn reduced(&self) -> Option<Reduced> {
        GeneralParams::reduced(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BehlParams {
    pub b: C64,
}

pub const BEHL_ORDER_FIVE: [f64; 2] = [3.0 + 2.0 * 2.236_067_977_499_79, 3.0 - 2.0 * 2.236_067_977_499_79];

impl BehlParams {
    pub fn new(b: C64) -> Result<Self> {
        if !(b.re.is_finite() && b.im.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite b = {b}")));
        }
        Ok(BehlParams { b })
    }

    /// `A = b² − 6b − 11`.
    pub fn coeff_a(&self) -> C64 {
        let b = self.b;
        b * b - 6.0 * b - 11.0
    }

    /// `B = b² + 2b − 3 = (b − 1)(b + 3)`.
    pub fn coeff_b(&self) -> C64 {
        let b = self.b;
        b * b + 2.0 * b - 3.0
    }

    /// `z³` at `b ∈ {1, −3}`, `z⁴` at `b = −1`, `−z⁴` at `b = 1 ± 2√2`.
    pub fn reduced(&self) -> Option<Reduced> {
        let b = self.b;
        if b.im != 0.0 {
            return None;
        }
        let x = b.re;
        if x == 1.0 || x == -3.0 {
            Some(Reduced {
                sign: 1.0,
                degree: 3,
            })
        } else if x == -1.0 {
            Some(Reduced {
                sign: 1.0,
                degree: 4,
            })
        } else if x == 1.0 + 2.0 * SQRT_2 || x == 1.0 - 2.0 * SQRT_2 {
            Some(Reduced {
                sign: -1.0,
                degree: 4,
            })
        } else {
            None
        }
    }

    /// Whether `b` is one of the two values `3 ± 2√5` (as rounded to `f64`)
    /// where `A = 0` and the operator is `z⁵`.
    pub fn is_order_five(&self) -> bool {
        self.b.im == 0.0 && BEHL_ORDER_FIVE.contains(&self.b.re)
    }

    /// The equivalent parameter of the general family with `(n, k) = (4, 1)`.
    pub fn to_general(&self) -> Result<GeneralParams> {
        GeneralParams::new(reparam_a_of_b(self.b)?, 4, 1)
    }

    /// Free critical points `(c₊, c₋)`.
    pub fn free_critical_pair(&self) -> Result<(C64, C64)> {
        let b = self.b;
        if self.reduced().is_some() || self.is_order_five() {
            return Err(Error::FormulaUndefined(format!(
                "free critical points of the Behl operator at b = {b}"
            )));
        }
        let (ca, cb) = (self.coeff_a(), self.coeff_b());
        let den = ca * cb;
        if den == C64::zero() {
            return Err(Error::FormulaUndefined(format!(
                "free critical points of the Behl operator at b = {b}"
            )));
        }
        let b2 = b * b;
        let p = -51.0 - 42.0 * b - 4.0 * b2 + 2.0 * b2 * b - b2 * b2;
        let disc = (b - 3.0) * (b + 1.0) * (b + 2.0) * (b2 - 2.0 * b - 7.0) * (b2 + 14.0 * b + 9.0);
        let s = 2.0 * disc.sqrt();
        Ok(reciprocal_pair(p, s, den))
    }
}

impl SphereMap for BehlParams {
    fn eval_std(&self, u: C64) -> ExtendedComplex {
        if let Some(r) = self.reduced() {
            return r.eval_std(u);
        }
        let (ca, cb) = (self.coeff_a(), self.coeff_b());
        let u2 = u * u;
        ExtendedComplex::from_ratio(u2 * u2 * (ca + cb * u), cb + ca * u)
    }

    fn deriv_std(&self, u: C64) -> Option<C64> {
        if let Some(r) = self.reduced() {
            return Some(r.deriv_std(u));
        }
        let b = self.b;
        let (ca, cb) = (self.coeff_a(), self.coeff_b());
        let den = cb + ca * u;
        if den == C64::zero() {
            return None;
        }
        let b2 = b * b;
        let mid = 2.0 * (51.0 + 42.0 * b + 4.0 * b2 - 2.0 * b2 * b + b2 * b2);
        let ab = ca * cb;
        Some(4.0 * u * u * u * (ab + mid * u + ab * u * u) / (den * den))
    }

    fn free_critical_point(&self) -> Option<C64> {
        self.free_critical_pair().ok().map(|(c, _)| c)
    }

    fn preserves_unit_circle(&self) -> bool {
        self.b.im == 0.0
    }

    fn reduced(&self) -> Option<Reduced> {
        BehlParams::reduced(self)
    }
}

/// Either operator family behind one type, for code that handles both.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Family {
    General(GeneralParams),
    Behl(BehlParams),
}

impl Family {
    fn map(&self) -> &dyn SphereMap {
        match self {
            Family::General(p) => p,
            Family::Behl(p) => p,
        }
    }

    /// Whether the free critical orbit is undefined and the map should be
    /// treated through its collapsed form.
    pub fn is_degenerate(&self) -> bool {
        match self {
            Family::General(p) => p.reduced().is_some(),
            Family::Behl(p) => p.reduced().is_some() || p.is_order_five(),
        }
    }
}

impl SphereMap for Family {
    fn eval_std(&self, u: C64) -> ExtendedComplex {
        self.map().eval_std(u)
    }
    fn deriv_std(&self, u: C64) -> Option<C64> {
        self.map().deriv_std(u)
    }
    fn free_critical_point(&self) -> Option<C64> {
        self.map().free_critical_point()
    }
    fn preserves_unit_circle(&self) -> bool {
        self.map().preserves_unit_circle()
    }
    fn reduced(&self) -> Option<Reduced> {
        self.map().reduced()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticTarget {
    pub c: C64,
}

impl QuadraticTarget {
    pub fn new(c: C64) -> Result<Self> {
        if c == C64::zero() {
            return Err(Error::InvalidArgument(
                "c = 0 gives a double root; the conjugacy degenerates".into(),
            ));
        }
        Ok(QuadraticTarget { c })
    }

    /// `i√c`, the root sent to 0 by [`moebius_h`].
    pub fn root(&self) -> C64 {
        C64::i() * self.c.sqrt()
    }
}

pub fn eval_ank(p: &GeneralParams, z: ExtendedComplex) -> ExtendedComplex {
    p.eval(z)
}

pub fn eval_ank_deriv(p: &GeneralParams, z: ExtendedComplex) -> Result<C64> {
    let u = z.to_complex().ok_or(Error::DerivativeAtPole)?;
    p.deriv_std(u).ok_or(Error::DerivativeAtPole)
}

pub fn eval_b(p: &BehlParams, z: ExtendedComplex) -> ExtendedComplex {
    p.eval(z)
}

pub fn eval_b_deriv(p: &BehlParams, z: ExtendedComplex) -> Result<C64> {
    let u = z.to_complex().ok_or(Error::DerivativeAtPole)?;
    p.deriv_std(u).ok_or(Error::DerivativeAtPole)
}

/// `a(b) = (11 + 6b − b²)/(−3 + 2b + b²)`.
pub fn reparam_a_of_b(b: C64) -> Result<C64> {
    let den = b * b + 2.0 * b - 3.0;
    if den == C64::zero() || b == C64::new(1.0, 0.0) || b == C64::new(-3.0, 0.0) {
        return Err(Error::DegenerateParameter(format!(
            "a(b) has a pole at b = {b}"
        )));
    }
    Ok((11.0 + 6.0 * b - b * b) / den)
}

/// Both `b` with `a(b) = a`: the roots of `(a+1)b² + (2a−6)b − (3a+11) = 0`,
/// i.e. `b = ((3 − a) ± 2√(a² + 2a + 5))/(a + 1)`.
pub fn reparam_b_of_a(a: C64) -> Result<(C64, C64)> {
    let lead = a + 1.0;
    let s = 2.0 * (a * a + 2.0 * a + 5.0).sqrt();
    let half_b = 3.0 - a;
    if lead == C64::zero() {
        // Linear equation −8b − 8 = 0.
        return Err(Error::UnboundedBranch {
            finite_root: C64::new(-1.0, 0.0),
        });
    }
    let product = -(3.0 * a + 11.0) / lead;
    // Choose the sign that avoids cancellation, then recover the other root
    // from the product.
    let (plus, minus) = (half_b + s, half_b - s);
    if plus.norm() >= minus.norm() {
        let b1 = plus / lead;
        Ok((b1, product / b1))
    } else {
        let b2 = minus / lead;
        Ok((product / b2, b2))
    }
}

/// One step of Behl's method on `f(z) = z² + c`, in the two-substep form:
/// `y = x − (2/3) f/f′`, then the weighted correction.
pub fn behl_step_generic<T: Real>(b: &Complex<T>, c: &Complex<T>, x: &Complex<T>) -> Result<Complex<T>> {
    let k = |v: f64| Complex::new(T::from_f64(v), T::zero());
    let fx = x.clone() * x.clone() + c.clone();
    let dfx = k(2.0) * x.clone();
    if dfx.is_zero() {
        return Err(Error::IterationSingularity("f′(x) = 0"));
    }
    let y = x.clone() - k(2.0) * fx.clone() / (k(3.0) * dfx.clone());
    let dfy = k(2.0) * y;
    let b = b.clone();
    let b2 = b.clone() * b.clone();
    let w1 = b2.clone() - k(22.0) * b.clone() - k(27.0);
    let w2 = k(3.0) * (b2 + k(10.0) * b.clone() + k(5.0));
    let d1 = b.clone() * dfx.clone() + k(3.0) * dfy.clone();
    let d2 = k(3.0) * (b.clone() + k(1.0)) * dfy.clone() - (b + k(5.0)) * dfx.clone();
    if d1.is_zero() || d2.is_zero() {
        return Err(Error::IterationSingularity("vanishing denominator"));
    }
    let num = (w1 * dfx + w2 * dfy) * fx;
    Ok(x.clone() - num / (k(2.0) * d1 * d2))
}

pub fn behl_step(p: &BehlParams, t: &QuadraticTarget, x: C64) -> Result<C64> {
    behl_step_generic(&p.b, &t.c, &x)
}

/// `h(z) = (z − i√c)/(z + i√c)`: sends `i√c ↦ 0`, `−i√c ↦ ∞`, `∞ ↦ 1`.
pub fn moebius_h(t: &QuadraticTarget, z: ExtendedComplex) -> ExtendedComplex {
    let r = t.root();
    let v = z.value();
    match z.chart() {
        Chart::Standard => ExtendedComplex::from_ratio(v - r, v + r),
        Chart::Inverted => ExtendedComplex::from_ratio(1.0 - r * v, 1.0 + r * v),
    }
}

/// `h⁻¹(u) = i√c (1 + u)/(1 − u)`.
pub fn moebius_h_inv(t: &QuadraticTarget, u: ExtendedComplex) -> ExtendedComplex {
    let r = t.root();
    let v = u.value();
    match u.chart() {
        Chart::Standard => ExtendedComplex::from_ratio(r * (1.0 + v), 1.0 - v),
        Chart::Inverted => ExtendedComplex::from_ratio(r * (v + 1.0), v - 1.0),
    }
}

/// The involution `z ↦ (z + 1)/(z − 1)` that moves `0, ∞` to `−1, 1`.
pub fn cayley(z: ExtendedComplex) -> ExtendedComplex {
    let v = z.value();
    match z.chart() {
        Chart::Standard => ExtendedComplex::from_ratio(v + 1.0, v - 1.0),
        Chart::Inverted => ExtendedComplex::from_ratio(1.0 + v, 1.0 - v),
    }
}

/// `R = h∘O_{a,n,k}∘h` with `h(z) = (z + 1)/(z − 1)`, written out so that no
/// intermediate point passes through `h`. `R` is odd and fixes `±1`.
pub fn eval_r(p: &GeneralParams, z: ExtendedComplex) -> ExtendedComplex {
    let (a, n, k) = (p.a, p.n, p.k);
    let v = z.value();
    let one = C64::new(1.0, 0.0);
    // N = (z+1)ⁿ (z(1−a)+1+a)ᵏ, D = (z−1)ⁿ (z(1−a)−1−a)ᵏ in the standard
    // chart; in the inverted chart both are multiplied by wⁿ⁺ᵏ. At a = −1
    // (standard) or a = 1 (inverted) the k-th power factors share a zero,
    // which is divided out.
    let (num, den) = match z.chart() {
        Chart::Standard => {
            let (fp, fm) = if a == -one {
                (one, one)
            } else {
                (v * (1.0 - a) + 1.0 + a, v * (1.0 - a) - 1.0 - a)
            };
            ((v + 1.0).powu(n) * fp.powu(k), (v - 1.0).powu(n) * fm.powu(k))
        }
        Chart::Inverted => {
            let (fp, fm) = if a == one {
                (one, -one)
            } else {
                ((1.0 - a) + (1.0 + a) * v, (1.0 - a) - (1.0 + a) * v)
            };
            ((1.0 + v).powu(n) * fp.powu(k), (1.0 - v).powu(n) * fm.powu(k))
        }
    };
    ExtendedComplex::from_ratio(num + den, num - den)
}

/// `S(w) = R(√w)²`, well defined because `R` is odd.
pub fn eval_s(p: &GeneralParams, w: ExtendedComplex) -> ExtendedComplex {
    eval_s_branch(p, w, false)
}

/// `R(r)²` for `r = ±√w`; `negate` selects the non-principal root.
pub fn eval_s_branch(p: &GeneralParams, w: ExtendedComplex, negate: bool) -> ExtendedComplex {
    let mut r = ExtendedComplex::from_parts(w.chart(), w.value().sqrt());
    if negate {
        r = r.neg();
    }
    eval_r(p, r).square()
}

/// `O_{a,n,k}(z)` for a finite `z` in any [`Real`] scalar; `None` at a pole.
pub fn eval_ank_generic<T: Real>(a: &Complex<T>, n: u32, k: u32, z: &Complex<T>) -> Option<Complex<T>> {
    let one = Complex::new(T::one(), T::zero());
    let den = pow(&(one - a.clone() * z.clone()), k);
    if den.is_zero() {
        return None;
    }
    let num = pow(z, n) * pow(&(z.clone() - a.clone()), k);
    Some(num / den)
}

fn pow<T: Real>(z: &Complex<T>, e: u32) -> Complex<T> {
    let mut acc = Complex::new(T::one(), T::zero());
    for _ in 0..e {
        acc = acc * z.clone();
    }
    acc
}
