//! Scalar types for computations that must outrun double precision.
//!
//! Measuring convergence order and tracking orbits on a repelling invariant
//! circle both need errors far below `f64::EPSILON`. The iteration formulas
//! are written once over [`Real`] and instantiated with `f64` or with
//! [`Wide`], a fixed-precision binary float.

use dashu_float::round::mode::Zero as RoundToZero;
use dashu_float::FBig;
use num_traits::{Num, One, Zero};
use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

pub trait Real: Clone + Debug + Num + Neg<Output = Self> + PartialOrd {
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn sqrt(&self) -> Self;
    /// `ln |x|` as an `f64`, meaningful even when `|x|` is far outside the
    /// `f64` exponent range. Returns `-inf` for zero.
    fn ln_abs(&self) -> f64;
    /// Natural log of the unit roundoff.
    fn ln_epsilon() -> f64;
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn ln_abs(&self) -> f64 {
        self.abs().ln()
    }
    fn ln_epsilon() -> f64 {
        f64::EPSILON.ln()
    }
}

/// Binary floating point with a `BITS`-bit significand.
#[derive(Clone, Debug, PartialEq)]
pub struct Wide<const BITS: usize>(Big);

type Big = FBig<RoundToZero, 2>;

/// Enough for ~460 decimal digits; used for convergence-order measurement.
pub type Wide1536 = Wide<1536>;
/// Enough to follow 50 expanding iterates on the unit circle with ~40 digits left.
pub type Wide256 = Wide<256>;

impl<const BITS: usize> Wide<BITS> {
    fn wrap(x: Big) -> Self {
        // Exact-zero results from integer-like operands can lose their
        // precision tag; restore it so later divisions stay well defined.
        if x.precision() == BITS {
            Wide(x)
        } else {
            Wide(x.with_precision(BITS).value())
        }
    }

    pub fn inner(&self) -> &Big {
        &self.0
    }
}

impl<const BITS: usize> Real for Wide<BITS> {
    fn from_f64(x: f64) -> Self {
        let v = Big::try_from(x).expect("finite f64 converts exactly");
        Wide(v.with_precision(BITS).value())
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }
    fn sqrt(&self) -> Self {
        Self::wrap(self.0.sqrt())
    }
    fn ln_abs(&self) -> f64 {
        if self.0 == Big::ZERO {
            return f64::NEG_INFINITY;
        }
        let magnitude = if self.0 < Big::ZERO { -self.0.clone() } else { self.0.clone() };
        magnitude.ln().to_f64().value()
    }
    fn ln_epsilon() -> f64 {
        -(BITS as f64) * std::f64::consts::LN_2
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl<const BITS: usize> $tr for Wide<BITS> {
            type Output = Self;
            fn $method(self, rhs: Self) -> Self {
                Self::wrap($tr::$method(self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);
forward_binop!(Rem, rem);

impl<const BITS: usize> Neg for Wide<BITS> {
    type Output = Self;
    fn neg(self) -> Self {
        Wide(-self.0)
    }
}

impl<const BITS: usize> Zero for Wide<BITS> {
    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn is_zero(&self) -> bool {
        self.0 == Big::ZERO
    }
}

impl<const BITS: usize> One for Wide<BITS> {
    fn one() -> Self {
        Self::from_f64(1.0)
    }
}

impl<const BITS: usize> Num for Wide<BITS> {
    type FromStrRadixErr = <Big as Num>::FromStrRadixErr;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        Big::from_str_radix(s, radix).map(Self::wrap)
    }
}

impl<const BITS: usize> PartialOrd for Wide<BITS> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}
