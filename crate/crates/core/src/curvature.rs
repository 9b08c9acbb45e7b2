//! The curvature function `s_c` and the constants that depend only on the
//! sign of the curvature.
//!
//! `s_c` solves `u'' + c u = 0` with `u(0) = 0`, `u'(0) = 1`, so it is `t`,
//! `sinh t` or `sin t`. Branches are selected explicitly by the curvature
//! label; nothing here integrates an ODE.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sign of the sectional curvature of a simply connected model space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Curvature {
    /// `c = -1`, the hyperbolic space.
    Hyperbolic,
    /// `c = 0`, Euclidean space.
    Flat,
    /// `c = +1`, the unit sphere.
    Spherical,
}

impl Curvature {
    pub const ALL: [Curvature; 3] = [Curvature::Hyperbolic, Curvature::Flat, Curvature::Spherical];

    /// The integer label `c`.
    pub fn value(self) -> i8 {
        match self {
            Curvature::Hyperbolic => -1,
            Curvature::Flat => 0,
            Curvature::Spherical => 1,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.value())
    }
}

impl TryFrom<i8> for Curvature {
    type Error = Error;

    fn try_from(c: i8) -> Result<Self> {
        match c {
            -1 => Ok(Curvature::Hyperbolic),
            0 => Ok(Curvature::Flat),
            1 => Ok(Curvature::Spherical),
            other => Err(Error::domain(format!("curvature must be -1, 0 or 1, got {other}"))),
        }
    }
}

impl TryFrom<i64> for Curvature {
    type Error = Error;

    fn try_from(c: i64) -> Result<Self> {
        i8::try_from(c)
            .map_err(|_| Error::domain(format!("curvature must be -1, 0 or 1, got {c}")))
            .and_then(Curvature::try_from)
    }
}

impl From<Curvature> for i8 {
    fn from(c: Curvature) -> i8 {
        c.value()
    }
}

impl fmt::Display for Curvature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// A geodesic length that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ExtendedRadius(f64);

impl ExtendedRadius {
    pub const INFINITE: ExtendedRadius = ExtendedRadius(f64::INFINITY);

    pub fn finite(value: f64) -> Result<Self> {
        if value.is_finite() && value >= 0.0 {
            Ok(ExtendedRadius(value))
        } else {
            Err(Error::domain(format!("radius must be finite and >= 0, got {value}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    /// `self / divisor`, staying infinite when `self` is.
    pub fn fraction(self, divisor: f64) -> f64 {
        self.0 / divisor
    }
}

/// The curvature function `s_c(t)`.
#[inline]
pub fn s_c(c: Curvature, t: f64) -> f64 {
    match c {
        Curvature::Flat => t,
        Curvature::Hyperbolic => t.sinh(),
        Curvature::Spherical => t.sin(),
    }
}

/// The derivative `s_c'(t)`.
#[inline]
pub fn s_c_prime(c: Curvature, t: f64) -> f64 {
    match c {
        Curvature::Flat => 1.0,
        Curvature::Hyperbolic => t.cosh(),
        Curvature::Spherical => t.cos(),
    }
}

/// `(ln s_c)'(t) = s_c'(t) / s_c(t)`.
#[inline]
pub fn log_derivative(c: Curvature, t: f64) -> f64 {
    s_c_prime(c, t) / s_c(c, t)
}

/// `δ(X)`: infinite for the two unbounded spaces, `2π` on the sphere so that
/// `δ/2 = π` is the largest polar radius and `δ/4 = π/2` bounds the half-angle.
pub fn delta(c: Curvature) -> ExtendedRadius {
    match c {
        Curvature::Flat | Curvature::Hyperbolic => ExtendedRadius::INFINITE,
        Curvature::Spherical => ExtendedRadius(2.0 * PI),
    }
}

/// Heaviside step with `H(0) = 1`.
#[inline]
pub fn heaviside(s: f64) -> f64 {
    if s >= 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Number of residuals returned by [`identity_residuals`].
pub const IDENTITY_COUNT: usize = 6;

/// Short names of the identities, in the order [`identity_residuals`] returns them.
pub const IDENTITY_NAMES: [&str; IDENTITY_COUNT] = [
    "pythagorean",
    "addition_sine",
    "addition_cosine",
    "double_sine",
    "double_cosine",
    "sum_to_product",
];

/// Residuals of the six identities satisfied by `s_c`, each zero in exact
/// arithmetic:
///
/// 0. `(s')^2 + c s^2 - 1`
/// 1. `s(t+r) - [s(t) s'(r) + s(r) s'(t)]`
/// 2. `s'(t+r) - [s'(t) s'(r) - c s(t) s(r)]`
/// 3. `s(2t) - 2 s(t) s'(t)`
/// 4. `s'(2t) - [1 - 2c s(t)^2]`
/// 5. `s(t) + s(r) - 2 s((t+r)/2) s'((t-r)/2)`
pub fn identity_residuals(c: Curvature, t: f64, r: f64) -> [f64; IDENTITY_COUNT] {
    identity_terms(c, t, r).map(|(lhs, rhs, _)| lhs - rhs)
}

/// Left side, right side and the largest magnitude among the terms of each
/// identity. The scale lets callers judge residuals relative to the terms
/// that were cancelled.
pub fn identity_terms(c: Curvature, t: f64, r: f64) -> [(f64, f64, f64); IDENTITY_COUNT] {
    let k = c.as_f64();
    let (st, sr) = (s_c(c, t), s_c(c, r));
    let (dt, dr) = (s_c_prime(c, t), s_c_prime(c, r));

    let pyth = (dt * dt + k * st * st, 1.0, (dt * dt).max((k * st * st).abs()).max(1.0));

    let a1 = st * dr;
    let a2 = sr * dt;
    let add_s = (s_c(c, t + r), a1 + a2, a1.abs().max(a2.abs()));

    let b1 = dt * dr;
    let b2 = k * st * sr;
    let add_c = (s_c_prime(c, t + r), b1 - b2, b1.abs().max(b2.abs()));

    let dbl_s = (s_c(c, 2.0 * t), 2.0 * st * dt, (2.0 * st * dt).abs());

    let e = 2.0 * k * st * st;
    let dbl_c = (s_c_prime(c, 2.0 * t), 1.0 - e, e.abs().max(1.0));

    let prod = 2.0 * s_c(c, 0.5 * (t + r)) * s_c_prime(c, 0.5 * (t - r));
    let sum = (st + sr, prod, st.abs().max(sr.abs()).max(prod.abs()));

    [pyth, add_s, add_c, dbl_s, dbl_c, sum]
}
