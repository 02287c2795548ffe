//! Float helpers backed by `libm`.
//!
//! Keeping every transcendental call behind one module makes the crate
//! `no_std`-clean and bit-reproducible across platforms.

pub use libm::{atan2, cos, cosh, exp, expm1, fabs as abs, floor, log as ln, log1p as ln_1p,
               pow as powf, sin, sinh, sqrt, tanh};

pub const PI: f64 = core::f64::consts::PI;
pub const TAU: f64 = 2.0 * core::f64::consts::PI;
pub const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Integer power by repeated multiplication (exact for small exponents).
pub fn powi(x: f64, n: i32) -> f64 {
    if n < 0 {
        return 1.0 / powi(x, -n);
    }
    let mut acc = 1.0;
    let mut base = x;
    let mut k = n as u32;
    while k > 0 {
        if k & 1 == 1 {
            acc *= base;
        }
        base *= base;
        k >>= 1;
    }
    acc
}

pub fn max(a: f64, b: f64) -> f64 {
    if a > b { a } else { b }
}

pub fn min(a: f64, b: f64) -> f64 {
    if a < b { a } else { b }
}

pub fn hypot3(a: f64, b: f64, c: f64) -> f64 {
    sqrt(a * a + b * b + c * c)
}

/// ln(cosh x), safe against overflow for large |x|.
pub fn ln_cosh(x: f64) -> f64 {
    let a = abs(x);
    // cosh x = e^a (1 + e^{-2a}) / 2
    a + ln_1p(exp(-2.0 * a)) - core::f64::consts::LN_2
}

/// Inverse of `ln_cosh` on x ≥ 0: returns ξ ≥ 0 with ln cosh ξ = y.
pub fn ln_cosh_inv(y: f64) -> f64 {
    debug_assert!(y >= 0.0);
    // cosh ξ = e^y  =>  ξ = arcosh(e^y) = y + ln(1 + sqrt(1 - e^{-2y}))
    if y == 0.0 {
        return 0.0;
    }
    y + ln_1p(sqrt(-expm1(-2.0 * y)))
}

/// Relative difference scaled by the magnitude of the inputs.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    abs(a - b) / max(1e-300, max(abs(a), abs(b)))
}
