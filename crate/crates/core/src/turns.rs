//! Trigonometry on arguments measured in full turns.
//!
//! Arguments are reduced modulo 1 before being scaled by 2π so that large
//! arguments (long classical orbits, big phase products) keep full precision.

use std::f64::consts::TAU;

use num_complex::Complex64;

/// Reduce `x` into `[0, 1)`.
#[inline]
pub(crate) fn wrap_unit(x: f64) -> f64 {
    let r = x - x.floor();
    // x = -1e-20 rounds to exactly 1.0 after the subtraction.
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

#[inline]
pub(crate) fn sin_turns(x: f64) -> f64 {
    (TAU * wrap_unit(x)).sin()
}

#[inline]
pub(crate) fn cos_turns(x: f64) -> f64 {
    (TAU * wrap_unit(x)).cos()
}

/// `exp(2πi x)`.
#[inline]
pub(crate) fn cis_turns(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * wrap_unit(x))
}
