//! Dynamics of a family of root-finding operators on the Riemann sphere.
//!
//! The central objects are the rational maps
//! `O_{a,n,k}(z) = zⁿ((z−a)/(1−az))ᵏ` and the Behl operator
//! `O_b(z) = z⁴(A + Bz)/(B + Az)` with `A = b²−6b−11`, `B = b²+2b−3`, which
//! is `O_{a,4,1}` for `a = −A/B`. Both fix `0` and `∞` (the images of the
//! roots of `z² + c`) and commute with `z ↦ 1/z`.
//!
//! Modules, bottom up:
//! - [`sphere`]: two-chart points of the Riemann sphere.
//! - [`precision`]: `f64` and wide binary floats behind one trait.
//! - [`operator`]: the maps, their derivatives, the Behl iteration and the
//!   conjugating Möbius maps.
//! - [`roots`]: fixed points, critical points, multipliers.
//! - [`stability`]: closed-form stability regions, curves and antennas.
//! - [`orbit`]: orbit classification, cycles, convergence order.
//! - [`render`]: parameter and dynamical planes, images, grid files.

pub mod error;
pub mod operator;
pub mod orbit;
pub mod precision;
pub mod render;
pub mod roots;
pub mod sphere;
pub mod stability;

pub use error::{Error, Result};
pub use operator::{BehlParams, Family, GeneralParams, QuadraticTarget, Reduced, SphereMap};
pub use sphere::{Chart, ExtendedComplex};

pub type C64 = num_complex::Complex64;

/// Compact `re±imi` rendering using the shortest round-trip digits.
pub fn format_complex(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}
