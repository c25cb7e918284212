//! Points of the Riemann sphere in a two-chart representation.
//!
//! A point is stored as a finite complex number together with the chart it
//! lives in: the standard chart `z`, or the inverted chart `w = 1/z`. The
//! stored value always has modulus at most 2, so neither chart ever holds a
//! large number and `(Inverted, 0)` is the point at infinity.

use crate::C64;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Largest modulus a value may have in its active chart.
pub const CHART_LIMIT: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chart {
    Standard,
    Inverted,
}

impl Chart {
    pub fn flipped(self) -> Chart {
        match self {
            Chart::Standard => Chart::Inverted,
            Chart::Inverted => Chart::Standard,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtendedComplex {
    chart: Chart,
    value: C64,
}

impl ExtendedComplex {
    pub const ZERO: ExtendedComplex = ExtendedComplex {
        chart: Chart::Standard,
        value: C64::new(0.0, 0.0),
    };
    pub const INFINITY: ExtendedComplex = ExtendedComplex {
        chart: Chart::Inverted,
        value: C64::new(0.0, 0.0),
    };

    /// The finite point `z`, placed in whichever chart keeps it small.
    pub fn finite(z: C64) -> Self {
        if z.norm() <= CHART_LIMIT {
            ExtendedComplex {
                chart: Chart::Standard,
                value: z,
            }
        } else {
            ExtendedComplex {
                chart: Chart::Inverted,
                value: z.inv(),
            }
        }
    }

    /// The point `1/w`.
    pub fn from_inverted(w: C64) -> Self {
        Self::finite(w).recip()
    }

    /// The point `num/den` on the sphere. A zero denominator yields infinity;
    /// `0/0` is not a point and produces a NaN value.
    pub fn from_ratio(num: C64, den: C64) -> Self {
        if num.norm() <= CHART_LIMIT * den.norm() {
            ExtendedComplex {
                chart: Chart::Standard,
                value: num / den,
            }
        } else {
            ExtendedComplex {
                chart: Chart::Inverted,
                value: den / num,
            }
        }
    }

    /// Builds a point from raw parts, renormalizing if the value is outside
    /// the chart bound.
    pub fn from_parts(chart: Chart, value: C64) -> Self {
        match chart {
            Chart::Standard => Self::finite(value),
            Chart::Inverted => Self::from_inverted(value),
        }
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    /// The stored value in the active chart.
    pub fn value(&self) -> C64 {
        self.value
    }

    pub fn is_infinity(&self) -> bool {
        self.chart == Chart::Inverted && self.value == C64::new(0.0, 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.chart == Chart::Standard && self.value == C64::new(0.0, 0.0)
    }

    /// `1/z`, which only swaps the chart and is therefore exact.
    pub fn recip(self) -> Self {
        ExtendedComplex {
            chart: self.chart.flipped(),
            value: self.value,
        }
    }

    /// `-z`, exact.
    pub fn neg(self) -> Self {
        ExtendedComplex {
            chart: self.chart,
            value: -self.value,
        }
    }

    /// `z²`.
    pub fn square(self) -> Self {
        Self::from_parts(self.chart, self.value * self.value)
    }

    /// The finite value in the standard chart, or `None` at infinity.
    pub fn to_complex(&self) -> Option<C64> {
        match self.chart {
            Chart::Standard => Some(self.value),
            Chart::Inverted if self.value == C64::new(0.0, 0.0) => None,
            Chart::Inverted => Some(self.value.inv()),
        }
    }

    /// `|z|`, infinite at the point at infinity.
    pub fn modulus(&self) -> f64 {
        match self.chart {
            Chart::Standard => self.value.norm(),
            Chart::Inverted => 1.0 / self.value.norm(),
        }
    }

    /// Chordal distance on the unit-diameter-2 sphere, in `[0, 2]`.
    pub fn chordal_distance(&self, other: &ExtendedComplex) -> f64 {
        // Work in the chart of `self`; convert `other` into it when possible.
        let (u, v) = match (self.chart, other.chart) {
            (a, b) if a == b => (self.value, other.value),
            _ => {
                // Different charts: compare in the standard chart unless a
                // point sits at infinity.
                match (self.to_complex(), other.to_complex()) {
                    (Some(z), Some(w)) => (z, w),
                    (None, None) => return 0.0,
                    (None, Some(w)) => return 2.0 / (1.0 + w.norm_sqr()).sqrt(),
                    (Some(z), None) => return 2.0 / (1.0 + z.norm_sqr()).sqrt(),
                }
            }
        };
        // The chordal metric is invariant under z -> 1/z, so the same formula
        // serves both charts.
        2.0 * (u - v).norm() / ((1.0 + u.norm_sqr()) * (1.0 + v.norm_sqr())).sqrt()
    }

    /// Projects onto the unit circle. Both charts represent `|z| = 1` by a
    /// unit-modulus value, so the chart is kept.
    pub fn project_to_unit_circle(self) -> Self {
        let r = self.value.norm();
        if r == 0.0 {
            return self;
        }
        ExtendedComplex {
            chart: self.chart,
            value: self.value / r,
        }
    }

    pub fn is_finite_value(&self) -> bool {
        self.value.re.is_finite() && self.value.im.is_finite()
    }
}

impl From<C64> for ExtendedComplex {
    fn from(z: C64) -> Self {
        Self::finite(z)
    }
}

impl fmt::Display for ExtendedComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_complex() {
            None => write!(f, "∞"),
            Some(z) => write!(f, "{}", crate::format_complex(z)),
        }
    }
}
