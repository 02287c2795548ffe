//! Inverse design: build a Hamiltonian profile `H(σ)` whose averaged
//! Nosé–Hoover potential is a prescribed `Ũ`, the closed-form rational
//! example, and the isochrone width diagnostic `Δ(u)`.
//!
//! The construction inverts `U_T = H - T ln H_σ`:
//!
//! `H(σ) = H₀ - T ln(1 - β I₀ ∫₀^σ e^{-β Ũ} dσ')`
//!
//! with `H₀ = -T ln(∫₀^∞ e^{-β Ũ} / ∫_{σ₁}^∞ e^{-β Ũ})` and
//! `I₀ = T / ∫₀^∞ e^{-β Ũ}`, so that `H(σ₁) = 0` and `H → ∞` on the right.

use crate::error::{Error, Result};
use crate::interp::CubicHermite;
use crate::math;
use crate::quadrature::GlCache;
use crate::special::erfc;
use alloc::vec::Vec;

/// The normalization constants of one design problem.
#[derive(Debug, Clone, Copy)]
pub struct DesignConstants {
    pub beta: f64,
    pub sigma1: f64,
    pub h0: f64,
    pub i0: f64,
}

/// Compute the design constants from the two normalization integrals.
pub fn design_constants<F: Fn(f64) -> f64>(
    u_tilde: &F,
    beta: f64,
    sigma1: f64,
) -> Result<DesignConstants> {
    if beta <= 0.0 {
        return Err(Error::Domain("beta must be positive"));
    }
    let t = 1.0 / beta;
    let mut cache = GlCache::new();
    let full = laplace_tail_integral(u_tilde, beta, sigma1, &mut cache)?;
    let half = laplace_tail_integral(u_tilde, beta, 0.0, &mut cache)?;
    if !(full > half && half > 0.0) {
        return Err(Error::NonintegrableTail);
    }
    Ok(DesignConstants { beta, sigma1, h0: -t * math::ln(half / full), i0: t / half })
}

/// Evaluate `(H(σ), I(σ))` from the defining integrals by fresh quadrature
/// (no tabulation error); the workhorse behind the closed-form checks.
pub fn design_eval<F: Fn(f64) -> f64>(
    u_tilde: &F,
    consts: &DesignConstants,
    sigma: f64,
) -> Result<(f64, f64)> {
    let beta = consts.beta;
    let t = 1.0 / beta;
    let mut cache = GlCache::new();
    // 1 - β I₀ ∫₀^σ = β I₀ ∫_σ^∞, which stays well-conditioned however
    // deep into the right tail σ sits
    let tail = laplace_tail_integral(u_tilde, beta, sigma, &mut cache)?;
    let arg = beta * consts.i0 * tail;
    if arg <= 0.0 {
        return Err(Error::NonintegrableTail);
    }
    let h = consts.h0 - t * math::ln(arg);
    let i = t * math::exp(-beta * u_tilde(sigma)) / tail;
    Ok((h, i))
}

#[derive(Debug, Clone)]
pub struct DesignedHamiltonian {
    pub beta: f64,
    pub sigma1: f64,
    pub h0: f64,
    pub i0: f64,
    pub sigma: Vec<f64>,
    h_interp: CubicHermite,
    i_interp: CubicHermite,
}

impl DesignedHamiltonian {
    pub fn h_of_sigma(&self, s: f64) -> f64 {
        self.h_interp.eval(s)
    }

    pub fn i_of_sigma(&self, s: f64) -> f64 {
        math::exp(self.i_interp.eval(s))
    }

    /// The averaged potential this profile induces, `H - T ln I`, normalized
    /// to vanish at σ = 0; recovering the prescribed `Ũ` is the round trip.
    pub fn recovered_potential(&self, s: f64) -> f64 {
        let t = 1.0 / self.beta;
        (self.h_of_sigma(s) - self.h0) - t * (self.i_interp.eval(s) - math::ln(self.i0))
    }
}

/// Integrate `e^{-β Ũ}` from `a` to `+∞`: panels double in width until the
/// integrand is negligible; a tail that refuses to decay is reported.
fn laplace_tail_integral<F: Fn(f64) -> f64>(
    u: &F,
    beta: f64,
    a: f64,
    cache: &mut GlCache,
) -> Result<f64> {
    let f = |s: f64| math::exp(-beta * u(s));
    let mut total = 0.0;
    let mut lo = a;
    let mut width = math::max(1.0, 4.0 / math::sqrt(beta));
    for _ in 0..80 {
        let hi = lo + width;
        total += cache.integrate_adaptive(lo, hi, 1e-12, 16, 2048, f)?;
        if f(hi) < 1e-19 && f(hi + 0.5 * width) < 1e-19 {
            return Ok(total);
        }
        lo = hi;
        width *= 2.0;
    }
    Err(Error::NonintegrableTail)
}

/// Signed integral `∫₀^σ e^{-β Ũ}`.
fn exp_integral<F: Fn(f64) -> f64>(u: &F, beta: f64, s: f64, cache: &mut GlCache) -> Result<f64> {
    let f = |x: f64| math::exp(-beta * u(x));
    if s >= 0.0 {
        cache.integrate_adaptive(0.0, s, 1e-12, 16, 4096, f)
    } else {
        Ok(-cache.integrate_adaptive(s, 0.0, 1e-12, 16, 4096, f)?)
    }
}

/// Build the designed Hamiltonian profile from the prescribed potential
/// `Ũ` on `(σ₁, ∞)`.
///
/// The table runs on a grid geometric toward `σ₁` and capped where `H`
/// exceeds `H₀` by `8T`; `I(σ) = H_σ` comes with the construction.
pub fn design<F: Fn(f64) -> f64>(u_tilde: F, beta: f64, sigma1: f64) -> Result<DesignedHamiltonian> {
    let consts = design_constants(&u_tilde, beta, sigma1)?;
    let t = 1.0 / beta;
    let mut cache = GlCache::new();
    let half = t / consts.i0;
    let (h0, i0) = (consts.h0, consts.i0);

    // upper cap: H grows like -T ln(1 - cumulative/half); stop near H₀ + 8T
    let target = 1.0 - math::exp(-beta * (h0 + 8.0 * t - h0)); // cumulative/half at the cap
    let mut sigma_hi = 1.0 + math::abs(sigma1);
    let mut run = exp_integral(&u_tilde, beta, sigma_hi, &mut cache)?;
    for _ in 0..60 {
        if run / half >= target {
            break;
        }
        sigma_hi *= 1.5;
        run = exp_integral(&u_tilde, beta, sigma_hi, &mut cache)?;
    }

    // grid: geometric toward σ₁, spread to the cap
    let mut grid = Vec::new();
    let delta = 0.1 * (sigma_hi - sigma1);
    for j in (0..=20).rev() {
        grid.push(sigma1 + delta / math::powi(2.0, j));
    }
    let inner_lo = sigma1 + delta;
    let n_spread = 60;
    for i in 1..=n_spread {
        grid.push(inner_lo + (sigma_hi - inner_lo) * i as f64 / n_spread as f64);
    }

    let mut h_vals = Vec::with_capacity(grid.len());
    let mut i_vals = Vec::with_capacity(grid.len());
    let mut log_i = Vec::with_capacity(grid.len());
    let mut log_i_slope = Vec::with_capacity(grid.len());
    for &s in grid.iter() {
        let tail = laplace_tail_integral(&u_tilde, beta, s, &mut cache)?;
        let arg = beta * i0 * tail;
        if arg <= 0.0 {
            return Err(Error::NonintegrableTail);
        }
        let i = t * math::exp(-beta * u_tilde(s)) / tail;
        h_vals.push(h0 - t * math::ln(arg));
        i_vals.push(i);
        log_i.push(math::ln(i));
        // (ln I)' = β (I - Ũ'), with Ũ' from a centered difference
        let d = 1e-6 * (1.0 + math::abs(s));
        let du = (u_tilde(s + d) - u_tilde(s - d)) / (2.0 * d);
        log_i_slope.push(beta * (i - du));
    }
    // I = H_σ: the slope of H is exactly the tabulated I
    let h_interp = CubicHermite::with_slopes(grid.clone(), h_vals, i_vals.clone(), true)?;
    let i_interp = CubicHermite::with_slopes(grid.clone(), log_i, log_i_slope, false)?;
    Ok(DesignedHamiltonian { beta, sigma1, h0, i0, sigma: grid, h_interp, i_interp })
}

/// The tractable rational case `Ũ(σ) = ((σ+1) - (σ+1)^{-1})²` on `(-1, ∞)`
/// with every constant in closed form through `erfc`.
#[derive(Debug, Clone)]
pub struct RationalExample {
    pub designed: DesignedHamiltonian,
    pub beta: f64,
    pub w0: f64,
    /// (quadrature, closed form) pairs for the two normalization integrals
    pub integral_full: (f64, f64),
    pub integral_half: (f64, f64),
    /// (design constants, closed form) pairs
    pub h0_pair: (f64, f64),
    pub i0_pair: (f64, f64),
}

pub fn rational_potential(sigma: f64) -> f64 {
    let tau = sigma + 1.0;
    let v = tau - 1.0 / tau;
    v * v
}

/// `2W(σ) = e^{4β} erfc(√β (τ + 1/τ)) + erfc(√β (τ - 1/τ))`, τ = σ + 1.
pub fn rational_w(sigma: f64, beta: f64) -> f64 {
    let tau = sigma + 1.0;
    let sb = math::sqrt(beta);
    0.5 * (math::exp(4.0 * beta) * erfc(sb * (tau + 1.0 / tau)) + erfc(sb * (tau - 1.0 / tau)))
}

pub fn rational_example(beta: f64) -> Result<RationalExample> {
    let designed = design(rational_potential, beta, -1.0)?;
    let t = 1.0 / beta;
    let mut cache = GlCache::new();
    let full_quad = laplace_tail_integral(&rational_potential, beta, -1.0, &mut cache)?;
    let half_quad = laplace_tail_integral(&rational_potential, beta, 0.0, &mut cache)?;
    let w0 = rational_w(0.0, beta);
    let root = math::sqrt(math::PI / (4.0 * beta));
    let h0_closed = -t * math::ln(w0);
    let i0_closed = 2.0 * math::sqrt(t) / (math::SQRT_PI * w0);
    Ok(RationalExample {
        beta,
        w0,
        integral_full: (full_quad, root),
        integral_half: (half_quad, root * w0),
        h0_pair: (designed.h0, h0_closed),
        i0_pair: (designed.i0, i0_closed),
        designed,
    })
}

impl RationalExample {
    /// Closed-form `H(σ) = -T ln W(σ)`.
    pub fn h_closed(&self, sigma: f64) -> f64 {
        -math::ln(rational_w(sigma, self.beta)) / self.beta
    }

    /// Closed-form `I(σ) = (2√T/√π) e^{-β(τ - 1/τ)²} / W(σ)`.
    pub fn i_closed(&self, sigma: f64) -> f64 {
        let t = 1.0 / self.beta;
        2.0 * math::sqrt(t) / math::SQRT_PI * math::exp(-self.beta * rational_potential(sigma))
            / rational_w(sigma, self.beta)
    }

    /// Exact width of the rational potential: `Δ(u) = √u` from
    /// `τ±(u) = (±√u + √(u+4))/2`.
    pub fn width_closed(u: f64) -> f64 {
        math::sqrt(u)
    }
}

/// Width table `Δ(u) = σ₊(u) - σ₋(u)` of a unimodal potential on `domain`,
/// by monotone bisection on each flank.
pub fn isochrone_width<F: Fn(f64) -> f64>(
    u: F,
    domain: (f64, f64),
    levels: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let (a, b) = domain;
    if !(b > a) {
        return Err(Error::Domain("empty width domain"));
    }
    // locate the minimum on a fine sample and verify unimodality
    let n = 512;
    let mut vals = Vec::with_capacity(n + 1);
    for i in 0..=n {
        vals.push(u(a + (b - a) * i as f64 / n as f64));
    }
    let min_idx = vals
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.partial_cmp(y.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    for i in 1..min_idx {
        if vals[i] > vals[i - 1] + 1e-12 * (1.0 + math::abs(vals[i])) {
            return Err(Error::Nonunimodal);
        }
    }
    for i in min_idx + 1..=n {
        if vals[i] < vals[i - 1] - 1e-12 * (1.0 + math::abs(vals[i])) {
            return Err(Error::Nonunimodal);
        }
    }
    // refine the minimum inside its bracketing cell by ternary search
    let (mut lo, mut hi) = (
        a + (b - a) * (min_idx.saturating_sub(1)) as f64 / n as f64,
        a + (b - a) * (min_idx + 1).min(n) as f64 / n as f64,
    );
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if u(m1) < u(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
        if hi - lo < 1e-13 * (1.0 + math::abs(lo)) {
            break;
        }
    }
    let s_min = 0.5 * (lo + hi);
    let u_min = u(s_min);

    let mut out = Vec::with_capacity(levels.len());
    for &level in levels {
        let target = u_min + level;
        if target >= u(a) || target >= u(b) {
            return Err(Error::OutOfRange { what: "width level", value: level });
        }
        let solve = |mut lo: f64, mut hi: f64, rising: bool| -> f64 {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let above = u(mid) > target;
                if above == rising {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if math::abs(hi - lo) < 1e-14 * (1.0 + math::abs(mid)) {
                    break;
                }
            }
            0.5 * (lo + hi)
        };
        let right = solve(s_min, b, true);
        let left = solve(a, s_min, false);
        out.push((level, right - left));
    }
    Ok(out)
}
