//! Special functions used by the closed-form expressions: complete elliptic
//! integrals (AGM), the complementary error function, and the thermostat
//! polynomial family `ζ_l` / `Ζ_l`.

use crate::error::{Error, Result};
use crate::math;
use alloc::vec::Vec;

/// Complete elliptic integrals of the first and second kind at modulus `k`.
///
/// Convention: `K(k) = ∫₀^{π/2} dθ/√(1 - k² sin²θ)`, i.e. the argument is
/// the modulus, not the parameter `m = k²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticPair {
    pub k: f64,
    /// First kind, `K(k)`.
    pub first: f64,
    /// Second kind, `E(k)`.
    pub second: f64,
}

const AGM_TOL: f64 = 1e-15;
const AGM_MAX_ITER: usize = 40;

/// `K(k)` and `E(k)` by arithmetic–geometric mean iteration, modulus `k ∈ [0, 1)`.
pub fn elliptic_ke(k: f64) -> Result<EllipticPair> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Domain("elliptic modulus must satisfy 0 <= k < 1"));
    }
    let mut a = 1.0;
    let mut b = math::sqrt(1.0 - k * k);
    // E/K = 1 - Σ_{n≥0} 2^{n-1} c_n², with c_0 = k and c_{n+1} = (a_n - b_n)/2.
    let mut sum = 0.5 * k * k;
    let mut pow2 = 0.5;
    for _ in 0..AGM_MAX_ITER {
        if math::abs(a - b) < AGM_TOL * a {
            break;
        }
        let c = 0.5 * (a - b);
        let an = 0.5 * (a + b);
        b = math::sqrt(a * b);
        a = an;
        pow2 *= 2.0;
        sum += pow2 * c * c;
    }
    let big_k = math::PI / (2.0 * a);
    let big_e = big_k * (1.0 - sum);
    Ok(EllipticPair { k, first: big_k, second: big_e })
}

/// Derivative `dK/dk = (E(k) - (1-k²) K(k)) / (k (1-k²))`.
pub fn elliptic_dk_dk(k: f64) -> Result<f64> {
    if k == 0.0 {
        return Ok(0.0);
    }
    let p = elliptic_ke(k)?;
    Ok((p.second - (1.0 - k * k) * p.first) / (k * (1.0 - k * k)))
}

/// Complementary-modulus integral `K'(k) = K(√(1-k²))`.
pub fn elliptic_k_complement(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Domain("elliptic modulus must satisfy 0 <= k < 1"));
    }
    if k == 0.0 {
        return Err(Error::Domain("K' diverges at k = 0"));
    }
    Ok(elliptic_ke(math::sqrt(1.0 - k * k))?.first)
}

/// Complementary error function, accurate to ~1e-14 relative for |x| ≤ 10.
///
/// Power series for |x| < 2, Laplace continued fraction for |x| ≥ 2; the
/// reflection erfc(-x) = 2 - erfc(x) covers the negative axis.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 2.0 {
        1.0 - erf_series(x)
    } else {
        // erfc(x) = e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
        // evaluated bottom-up with a fixed depth; converges fast for x ≥ 2.
        let mut f = 0.0;
        let mut n = 60usize;
        while n > 0 {
            f = (n as f64) * 0.5 / (x + f);
            n -= 1;
        }
        math::exp(-x * x) / (math::SQRT_PI * (x + f))
    }
}

fn erf_series(x: f64) -> f64 {
    // erf(x) = 2/√π Σ_{n≥0} (-1)^n x^{2n+1} / (n! (2n+1))
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0usize;
    loop {
        n += 1;
        term *= -x2 / n as f64;
        let add = term / (2 * n + 1) as f64;
        sum += add;
        if math::abs(add) < 1e-17 * math::abs(sum) + 1e-300 || n > 200 {
            break;
        }
    }
    2.0 / math::SQRT_PI * sum
}

/// The even polynomial `ζ_l` of the Watanabe–Kobayashi coupling, stored as
/// coefficients in powers of ξ².
///
/// For `l = 2n + 1`, `ζ_l(ξ) = Σ_{j=0..n} (n!/j!) (2T)^{n-j} ξ^{2j}`; it is
/// the degree-n truncation of `(2T)^n n! exp(ξ²/(2T))` and is strictly
/// positive. `ζ_1 ≡ 1` recovers the Nosé–Hoover coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct ZetaPoly {
    pub l: u32,
    pub temperature: f64,
    /// coeffs[j] multiplies ξ^{2j}.
    coeffs: Vec<f64>,
}

impl ZetaPoly {
    pub fn new(l: u32, temperature: f64) -> Result<Self> {
        if l % 2 == 0 || l == 0 {
            return Err(Error::Domain("zeta order l must be odd and positive"));
        }
        if temperature <= 0.0 {
            return Err(Error::Domain("temperature must be positive"));
        }
        let n = ((l - 1) / 2) as usize;
        // coeffs[j] = (n!/j!) (2T)^{n-j}
        let mut coeffs = alloc::vec![0.0; n + 1];
        coeffs[n] = 1.0;
        for j in (0..n).rev() {
            coeffs[j] = coeffs[j + 1] * (j as f64 + 1.0) * 2.0 * temperature;
        }
        Ok(ZetaPoly { l, temperature, coeffs })
    }

    /// ζ_l(ξ) > 0.
    pub fn eval(&self, xi: f64) -> f64 {
        let y = xi * xi;
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * y + c;
        }
        acc
    }

    /// dζ_l/dξ.
    pub fn deriv(&self, xi: f64) -> f64 {
        let y = xi * xi;
        let mut acc = 0.0;
        for (j, &c) in self.coeffs.iter().enumerate().rev() {
            if j == 0 {
                continue;
            }
            acc = acc * y + 2.0 * j as f64 * c;
        }
        // Each retained term carries ξ^{2j-1} = ξ · (ξ²)^{j-1}; the Horner
        // loop above accumulated powers of y starting at j = 1.
        acc * xi
    }

    /// ζ_l(0) = (2T)^n n!.
    pub fn at_zero(&self) -> f64 {
        self.coeffs[0]
    }

    /// The kinetic function `Ζ_l(ξ) = ξ²/2 - T ln(ζ_l(ξ)/ζ_l(0))`.
    ///
    /// `Ζ_1(ξ) = ξ²/2`; `Ζ_l(0) = 0`; even in ξ; grows like ξ²/2 at infinity.
    pub fn big_zeta(&self, xi: f64) -> f64 {
        0.5 * xi * xi - self.temperature * math::ln(self.eval(xi) / self.at_zero())
    }

    /// dΖ_l/dξ. Algebraically equals ξ^l / ζ_l(ξ).
    pub fn big_zeta_deriv(&self, xi: f64) -> f64 {
        math::powi(xi, self.l as i32) / self.eval(xi)
    }

    /// Inverse of `Ζ_l` on ξ ≥ 0 by Newton with bisection fallback.
    pub fn big_zeta_inv(&self, y: f64) -> f64 {
        debug_assert!(y >= 0.0);
        if y == 0.0 {
            return 0.0;
        }
        // Ζ_l(ξ) ≤ ξ²/2, so √(2y) bounds the root from below; expand up.
        let mut lo = math::sqrt(2.0 * y);
        let mut hi = lo;
        while self.big_zeta(hi) < y {
            lo = hi;
            hi *= 2.0;
        }
        while self.big_zeta(lo) > y {
            hi = lo;
            lo *= 0.5;
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..100 {
            let f = self.big_zeta(x) - y;
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let d = self.big_zeta_deriv(x);
            let newton = x - f / d;
            x = if d > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo < 1e-15 * (1.0 + x) {
                break;
            }
        }
        x
    }
}
