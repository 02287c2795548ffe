//! First-order averaged dynamics of a thermostated edge: the drift field
//! `R̄₀` on `(I, ξ)`, its Hamiltonian `Ḡ₀,T`, Darboux coordinates `(σ, ξ)`
//! (or `(σ, χ)` for the Watanabe–Kobayashi coupling), thermostatic
//! equilibria, level periods, actions, and twist diagnostics.
//!
//! In Darboux coordinates every variant reduces to a 1-degree-of-freedom
//! system `Ḡ = F_kin(ξ) + U_T(σ)`:
//!
//! * Nosé–Hoover:  `F = ξ²/2`,      `U_T = H - T ln I`,        `dσ = dH/I`
//! * logistic:     `F = ln cosh ξ`, same `U_T` and `σ` as Nosé–Hoover
//! * WK(k, l):     `F = Ζ_l(ξ)`,    `U_T = H - T ln F_k`,      `dσ = dH/F_k`
//! * HSH(μ):       `F = ξ⁴/4`,      `U_T = H - T ln Q_μ`,
//!   `dσ = H_I dH/(Κ + μ f₃ Κ̃₃)`, `d ln Q_μ = (1 + μ f₃) dH/(Κ + μ f₃ Κ̃₃)`
//!
//! The flow integrated here is the canonical one of that reduced system, so
//! conservation of `Ḡ` is limited only by the ODE tolerance.

use crate::error::{Error, Result};
use crate::hamiltonian::AdmissibleTemperatures;
use crate::integrator::{find_crossing_in_step, Direction, IntegratorConfig, Stepper};
use crate::interp::CubicHermite;
use crate::math;
use crate::orbit::ActionProfile;
use crate::quadrature::{GlCache, GlRule};
use crate::special::ZetaPoly;
use crate::thermostats::{ThermostatSpec, Variant};
use alloc::vec;
use alloc::vec::Vec;

/// Kinetic part of the averaged Hamiltonian.
#[derive(Debug, Clone)]
pub enum KineticKind {
    /// ξ²/2
    Quadratic,
    /// ln cosh ξ
    LogCosh,
    /// Ζ_l(ξ) with the area measure dχ = dξ/ζ_l
    Zeta(ZetaPoly),
    /// ξ⁴/4
    Quartic,
}

impl KineticKind {
    pub fn value(&self, xi: f64) -> f64 {
        match self {
            KineticKind::Quadratic => 0.5 * xi * xi,
            KineticKind::LogCosh => math::ln_cosh(xi),
            KineticKind::Zeta(z) => z.big_zeta(xi),
            KineticKind::Quartic => 0.25 * xi * xi * xi * xi,
        }
    }

    pub fn deriv(&self, xi: f64) -> f64 {
        match self {
            KineticKind::Quadratic => xi,
            KineticKind::LogCosh => math::tanh(xi),
            KineticKind::Zeta(z) => z.big_zeta_deriv(xi),
            KineticKind::Quartic => xi * xi * xi,
        }
    }

    /// Inverse on ξ ≥ 0.
    pub fn inverse(&self, y: f64) -> f64 {
        match self {
            KineticKind::Quadratic => math::sqrt(2.0 * y),
            KineticKind::LogCosh => math::ln_cosh_inv(y),
            KineticKind::Zeta(z) => z.big_zeta_inv(y),
            KineticKind::Quartic => math::sqrt(math::sqrt(4.0 * y)),
        }
    }

    /// Reciprocal density of the canonical ξ-measure (1 except for WK,
    /// where dχ = dξ/ζ_l).
    fn chi_density(&self, xi: f64) -> f64 {
        match self {
            KineticKind::Zeta(z) => 1.0 / z.eval(xi),
            _ => 1.0,
        }
    }
}

/// The averaged system of one thermostat on one action profile, anchored at
/// one thermostatic equilibrium.
#[derive(Debug, Clone)]
pub struct AveragedSystem {
    pub variant: Variant,
    pub temperature: f64,
    pub kinetic: KineticKind,
    /// equilibrium energy and action (σ = 0, Ḡ = 0 there)
    pub h0: f64,
    pub i0: f64,
    u_pot: CubicHermite,
    sigma_of_h: Option<CubicHermite>,
    profile: Option<ActionProfile>,
}

/// All thermostatic equilibria of the balance function on the profile:
/// `Κ = T` (NH, logistic), `Κ̃_k = T` (WK), `[Κ-T] + μ f₃ [Κ̃₃-T] = 0` (HSH).
pub fn find_equilibria(
    thermostat: &ThermostatSpec,
    profile: &ActionProfile,
) -> Result<Vec<f64>> {
    let t = thermostat.temperature;
    let balance = |h: f64| -> Result<f64> {
        Ok(match &thermostat.variant {
            Variant::NoseHoover | Variant::Logistic => profile.kappa_of_h(h) - t,
            Variant::WatanabeKobayashi { k, .. } => profile.ktilde_of_h(*k, h)? - t,
            Variant::HooverSprottHoover { mu } => {
                (profile.kappa_of_h(h) - t)
                    + mu * profile.f_of_h(3, h)? * (profile.ktilde_of_h(3, h)? - t)
            }
        })
    };
    let mut roots = Vec::new();
    let grid = &profile.h;
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        let fa = balance(a)?;
        let fb = balance(b)?;
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fa * fb < 0.0 {
            let (mut lo, mut hi) = (a, b);
            let mut flo = fa;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = balance(mid)?;
                if fm * flo <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
                if hi - lo < 1e-12 * (1.0 + math::abs(mid)) {
                    break;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
    }
    Ok(roots)
}

impl AveragedSystem {
    /// Build the averaged system around the equilibrium root `h0`.
    ///
    /// For the Watanabe–Kobayashi thermostat an [`AdmissibleTemperatures`]
    /// set may be supplied; a temperature inside the excluded set is
    /// rejected before any construction happens.
    pub fn build(
        thermostat: &ThermostatSpec,
        profile: &ActionProfile,
        h0: f64,
        admissible: Option<&AdmissibleTemperatures>,
    ) -> Result<Self> {
        let t = thermostat.temperature;
        if let Some(adm) = admissible {
            // excluded values are Richardson extrapolations, accurate to
            // ~1e-8; the guard band reflects that
            for &x in &adm.excluded {
                if math::abs(x - t) <= 1e-6 * (1.0 + t) {
                    return Err(Error::InadmissibleTemperature { t, excluded: x });
                }
            }
        }
        if !profile.contains(h0) {
            return Err(Error::OutOfRange { what: "equilibrium energy", value: h0 });
        }
        let kinetic = match &thermostat.variant {
            Variant::NoseHoover => KineticKind::Quadratic,
            Variant::Logistic => KineticKind::LogCosh,
            Variant::WatanabeKobayashi { .. } => {
                KineticKind::Zeta(thermostat.zeta().unwrap().clone())
            }
            Variant::HooverSprottHoover { .. } => KineticKind::Quartic,
        };

        // dσ/dh and dU/dσ at the profile nodes
        let grid = profile.h.clone();
        let dsdh = |h: f64| -> Result<f64> {
            Ok(match &thermostat.variant {
                Variant::NoseHoover | Variant::Logistic => 1.0 / profile.action_of_h(h),
                Variant::WatanabeKobayashi { k, .. } => 1.0 / profile.fcap_of_h(*k, h)?,
                Variant::HooverSprottHoover { mu } => {
                    let hi = profile.h_i_of_h(h);
                    let denom = profile.kappa_of_h(h)
                        + mu * profile.f_of_h(3, h)? * profile.ktilde_of_h(3, h)?;
                    hi / denom
                }
            })
        };

        // make the equilibrium an exact grid node, so σ(h₀) = 0 and
        // U(0) = 0 hold at a node rather than by interpolation
        let mut grid = grid;
        let pos = grid.partition_point(|&h| h < h0);
        let near = |a: f64, b: f64| math::abs(a - b) < 1e-12 * (1.0 + math::abs(b));
        let anchor = if pos < grid.len() && near(grid[pos], h0) {
            pos
        } else if pos > 0 && near(grid[pos - 1], h0) {
            pos - 1
        } else {
            grid.insert(pos, h0);
            pos
        };
        let n = grid.len();

        // cumulative σ(h) from the equilibrium node by per-interval quadrature
        let rule = GlRule::new(7);
        let mut piece = vec![0.0; n - 1];
        for i in 0..n - 1 {
            let mut acc = 0.0;
            let c = 0.5 * (grid[i] + grid[i + 1]);
            let hw = 0.5 * (grid[i + 1] - grid[i]);
            for (x, w) in rule.nodes.iter().zip(rule.weights.iter()) {
                acc += w * hw * dsdh(c + hw * x)?;
            }
            piece[i] = acc;
        }
        let mut sigma = vec![0.0; n];
        for i in anchor + 1..n {
            sigma[i] = sigma[i - 1] + piece[i - 1];
        }
        for i in (0..anchor).rev() {
            sigma[i] = sigma[i + 1] - piece[i];
        }

        let mut dsig = Vec::with_capacity(n);
        for &h in &grid {
            dsig.push(dsdh(h)?);
        }
        let sigma_interp = CubicHermite::with_slopes(grid.clone(), sigma.clone(), dsig, true)?;

        // potential values and exact slopes at the nodes
        let i0 = profile.action_of_h(h0);
        let mut u_vals = Vec::with_capacity(n);
        let mut u_slopes = Vec::with_capacity(n);
        let u_of_h = |h: f64| -> Result<f64> {
            Ok(match &thermostat.variant {
                Variant::NoseHoover | Variant::Logistic => {
                    (h - h0) - t * math::ln(profile.action_of_h(h) / i0)
                }
                Variant::WatanabeKobayashi { k, .. } => {
                    (h - h0) - t * math::ln(profile.fcap_of_h(*k, h)? / profile.fcap_of_h(*k, h0)?)
                }
                Variant::HooverSprottHoover { mu } => {
                    // ln Q_μ = ln(I + μ F₃) + const, verified at build below
                    let arg = profile.action_of_h(h) + mu * profile.fcap_of_h(3, h)?;
                    let arg0 = i0 + mu * profile.fcap_of_h(3, h0)?;
                    (h - h0) - t * math::ln(arg / arg0)
                }
            })
        };
        for (idx, &h) in grid.iter().enumerate() {
            u_vals.push(u_of_h(h)?);
            // dU/dσ = (1 - T/M(h)) / (dσ/dh) with M the variant mean
            // temperature; expressed through the balance numerator directly
            let du_dh = match &thermostat.variant {
                Variant::NoseHoover | Variant::Logistic => {
                    1.0 - t / profile.kappa_of_h(h)
                }
                Variant::WatanabeKobayashi { k, .. } => 1.0 - t / profile.ktilde_of_h(*k, h)?,
                Variant::HooverSprottHoover { mu } => {
                    let f3 = profile.f_of_h(3, h)?;
                    1.0 - t * (1.0 + mu * f3)
                        / (profile.kappa_of_h(h) + mu * f3 * profile.ktilde_of_h(3, h)?)
                }
            };
            let ds = dsdh(h)?;
            u_slopes.push(du_dh / ds);
            let _ = idx;
        }

        // HSH only: verify the closed form of ln Q_μ against direct
        // quadrature of (1 + μ f₃) dH / (Κ + μ f₃ Κ̃₃)
        if let Variant::HooverSprottHoover { mu } = &thermostat.variant {
            let mut cache = GlCache::new();
            for &h in [grid[n / 4], grid[n / 2], grid[3 * n / 4]].iter() {
                let quad = cache.integrate_adaptive(h0, h, 1e-9, 16, 1024, |hh| {
                    let f3 = profile.f_of_h(3, hh).unwrap();
                    (1.0 + mu * f3)
                        / (profile.kappa_of_h(hh) + mu * f3 * profile.ktilde_of_h(3, hh).unwrap())
                })?;
                let arg = profile.action_of_h(h) + mu * profile.fcap_of_h(3, h)?;
                let arg0 = i0 + mu * profile.fcap_of_h(3, h0)?;
                let closed = math::ln(arg / arg0);
                if math::abs(quad - closed) > 1e-6 * (1.0 + math::abs(closed)) {
                    return Err(Error::ProfileInconsistency {
                        what: "HSH ln Q_mu closed form",
                        defect: math::abs(quad - closed),
                    });
                }
            }
        }

        let u_interp = CubicHermite::with_slopes(sigma, u_vals, u_slopes, false)?;
        Ok(AveragedSystem {
            variant: thermostat.variant.clone(),
            temperature: t,
            kinetic,
            h0,
            i0,
            u_pot: u_interp,
            sigma_of_h: Some(sigma_interp),
            profile: Some(profile.clone()),
        })
    }

    /// Synthetic system from a tabulated potential (twist-estimator control).
    pub fn synthetic(
        temperature: f64,
        kinetic: KineticKind,
        sigma: Vec<f64>,
        u: Vec<f64>,
        u_slopes: Vec<f64>,
    ) -> Result<Self> {
        let u_pot = CubicHermite::with_slopes(sigma, u, u_slopes, false)?;
        Ok(AveragedSystem {
            variant: Variant::NoseHoover,
            temperature,
            kinetic,
            h0: 0.0,
            i0: 1.0,
            u_pot,
            sigma_of_h: None,
            profile: None,
        })
    }

    fn require_profile(&self) -> Result<&ActionProfile> {
        self.profile.as_ref().ok_or(Error::Domain("synthetic averaged system has no profile"))
    }

    /// Darboux coordinate σ(I), with σ(I₀) = 0.
    pub fn darboux_sigma(&self, action: f64) -> Result<f64> {
        let profile = self.require_profile()?;
        let h = profile.h_of_action(action)?;
        Ok(self.sigma_of_h.as_ref().unwrap().eval(h))
    }

    pub fn sigma_at_h(&self, h: f64) -> Result<f64> {
        self.require_profile()?;
        Ok(self.sigma_of_h.as_ref().unwrap().eval(h))
    }

    pub fn h_at_sigma(&self, sigma: f64) -> Result<f64> {
        self.require_profile()?;
        self.sigma_of_h.as_ref().unwrap().invert(sigma)
    }

    /// χ(ξ) = ∫ dξ/ζ_l for the WK coupling (identity otherwise).
    pub fn darboux_chi(&self, xi: f64) -> f64 {
        match &self.kinetic {
            KineticKind::Zeta(z) => {
                let rule = GlRule::new(32);
                rule.integrate(0.0, xi, |x| 1.0 / z.eval(x))
            }
            _ => xi,
        }
    }

    /// Averaged Hamiltonian `Ḡ₀,T(I, ξ)`, normalized to 0 at `(I₀, 0)`.
    pub fn gbar(&self, action: f64, xi: f64) -> Result<f64> {
        Ok(self.kinetic.value(xi) + self.u_pot.eval(self.darboux_sigma(action)?))
    }

    /// The effective potential `U_T(σ)`.
    pub fn potential(&self, sigma: f64) -> f64 {
        self.u_pot.eval(sigma)
    }

    pub fn potential_deriv(&self, sigma: f64) -> f64 {
        self.u_pot.deriv(sigma)
    }

    pub fn sigma_range(&self) -> (f64, f64) {
        (self.u_pot.x_min(), self.u_pot.x_max())
    }

    /// Largest level with a compact σ-interval inside the tabulated range.
    pub fn level_cap(&self) -> f64 {
        let (a, b) = self.sigma_range();
        math::min(self.u_pot.eval(a), self.u_pot.eval(b))
    }

    /// Drift field `R̄₀` in the (I, ξ) chart.
    pub fn rbar_field(&self, action: f64, xi: f64) -> Result<[f64; 2]> {
        let profile = self.require_profile()?;
        let h = profile.h_of_action(action)?;
        let h_i = profile.h_i_of_h(h);
        let t = self.temperature;
        Ok(match &self.variant {
            Variant::NoseHoover => {
                let kap = profile.kappa_of_h(h);
                [-xi * kap / (h_i * h_i), (kap - t) / h_i]
            }
            Variant::Logistic => {
                let kap = profile.kappa_of_h(h);
                [-math::tanh(xi) * kap / (h_i * h_i), (kap - t) / h_i]
            }
            Variant::WatanabeKobayashi { k, l } => {
                let f = profile.f_of_h(*k, h)?;
                let kt = profile.ktilde_of_h(*k, h)?;
                let zeta = match &self.kinetic {
                    KineticKind::Zeta(z) => z.eval(xi),
                    _ => 1.0,
                };
                [
                    -math::powi(xi, *l as i32) * f * kt / (h_i * h_i),
                    zeta * f * (kt - t) / h_i,
                ]
            }
            Variant::HooverSprottHoover { mu } => {
                let kap = profile.kappa_of_h(h);
                let f3 = profile.f_of_h(3, h)?;
                let kt3 = profile.ktilde_of_h(3, h)?;
                [
                    -xi * xi * xi * (kap + mu * f3 * kt3) / (h_i * h_i),
                    ((kap - t) + mu * f3 * (kt3 - t)) / h_i,
                ]
            }
        })
    }

    /// Right-hand side of the reduced flow in `(σ, ξ)`.
    pub fn darboux_field(&self, state: &[f64; 2]) -> [f64; 2] {
        let [sigma, xi] = *state;
        let chi_dot = self.u_pot.deriv(sigma);
        match &self.kinetic {
            KineticKind::Zeta(z) => {
                [-z.big_zeta_deriv(xi) * z.eval(xi), chi_dot * z.eval(xi)]
            }
            k => [-k.deriv(xi), chi_dot],
        }
    }

    /// Period of the level `Ḡ = g` by event-detected return, and the
    /// enclosed canonical action `J(g)` by area quadrature.
    pub fn averaged_period(&self, g: f64) -> Result<(f64, f64)> {
        if g <= 0.0 || g >= self.level_cap() {
            return Err(Error::NoncompactLevel { level: g });
        }
        let sigma_plus = self.invert_potential(g, true)?;
        let t_avg = self.period_by_return(sigma_plus)?;
        let j = self.level_action(g)?;
        Ok((t_avg, j))
    }

    fn invert_potential(&self, g: f64, right: bool) -> Result<f64> {
        let (lo, hi) = if right {
            (0.0, self.sigma_range().1)
        } else {
            (self.sigma_range().0, 0.0)
        };
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            let above = self.u_pot.eval(mid) > g;
            if right == above {
                b = mid;
            } else {
                a = mid;
            }
            if math::abs(b - a) < 1e-14 * (1.0 + math::abs(mid)) {
                break;
            }
        }
        Ok(0.5 * (a + b))
    }

    fn period_by_return(&self, sigma_start: f64) -> Result<f64> {
        let cfg = IntegratorConfig::with_tol(1e-11, 1e-13);
        let field = |_t: f64, y: &[f64; 2]| self.darboux_field(y);
        let mut stepper = Stepper::new(field, 0.0, [sigma_start, 0.0], 1.0e5, cfg);
        let event = |_t: f64, y: &[f64; 2]| y[1];
        loop {
            let step = stepper.step()?;
            if step.t0 > 1e-9 {
                if let Some((t, _)) = find_crossing_in_step(&step, &event, Direction::Up) {
                    if t > 1e-9 {
                        return Ok(t);
                    }
                }
            }
            if stepper.done() {
                return Err(Error::NoCrossing);
            }
        }
    }

    /// Canonical area/2π of `{F_kin + U ≤ g}` by ξ-sliced quadrature.
    fn level_action(&self, g: f64) -> Result<f64> {
        let xi_max = self.kinetic.inverse(g);
        let mut cache = GlCache::new();
        let area = cache.integrate_clustered(0.0, xi_max, 1e-10, 64, 8192, |xi| {
            let u_level = g - self.kinetic.value(xi);
            let width = if u_level <= 0.0 {
                0.0
            } else {
                let sp = self.invert_potential(u_level, true).unwrap_or(0.0);
                let sm = self.invert_potential(u_level, false).unwrap_or(0.0);
                sp - sm
            };
            2.0 * width * self.kinetic.chi_density(xi)
        })?;
        Ok(area / math::TAU)
    }

    /// Analytic Hessian of `Ḡ₀,T` at the equilibrium, in (H, ξ) coordinates:
    /// returns `(∂²Ḡ/∂ξ², ∂²Ḡ/∂H²)`.
    ///
    /// The ξ-part is 1 for a quadratic kinetic term (NH, logistic, WK with
    /// l = 1) and degenerates to 0 for l > 1 and for the quartic HSH term.
    /// The H-part is `T M'(H₀)/M(H₀)²` with `M` the variant's mean
    /// temperature along the orbit.
    pub fn hessian_at_equilibrium(&self) -> Result<(f64, f64)> {
        let profile = self.require_profile()?;
        let h0 = self.h0;
        let t = self.temperature;
        let gxx = match &self.variant {
            Variant::NoseHoover | Variant::Logistic => 1.0,
            Variant::WatanabeKobayashi { l, .. } => {
                if *l == 1 {
                    1.0
                } else {
                    0.0
                }
            }
            Variant::HooverSprottHoover { .. } => 0.0,
        };
        let (m, m_prime) = match &self.variant {
            Variant::NoseHoover | Variant::Logistic => {
                (profile.kappa_of_h(h0), profile.kappa_deriv(h0))
            }
            Variant::WatanabeKobayashi { k, .. } => {
                (profile.ktilde_of_h(*k, h0)?, profile.ktilde_deriv(*k, h0)?)
            }
            Variant::HooverSprottHoover { mu } => {
                // M = (Κ + μ f₃ Κ̃₃)/(1 + μ f₃)
                let f = profile.f_of_h(3, h0)?;
                let kt = profile.ktilde_of_h(3, h0)?;
                let kap = profile.kappa_of_h(h0);
                let fp = {
                    // df₃/dh from the interpolant via a centered difference
                    let d = 1e-6 * (1.0 + math::abs(h0));
                    (profile.f_of_h(3, h0 + d)? - profile.f_of_h(3, h0 - d)?) / (2.0 * d)
                };
                let ktp = profile.ktilde_deriv(3, h0)?;
                let kp = profile.kappa_deriv(h0);
                let num = kap + mu * f * kt;
                let den = 1.0 + mu * f;
                let m = num / den;
                let num_p = kp + mu * (fp * kt + f * ktp);
                let m_p = (num_p * den - num * mu * fp) / (den * den);
                (m, m_p)
            }
        };
        Ok((gxx, t * m_prime / (m * m)))
    }

    /// `Ḡ` as a function of `(h, ξ)` for finite-difference checks.
    pub fn gbar_of_h(&self, h: f64, xi: f64) -> Result<f64> {
        self.require_profile()?;
        Ok(self.kinetic.value(xi) + self.u_pot.eval(self.sigma_of_h.as_ref().unwrap().eval(h)))
    }
}

/// One row of the twist diagnostic.
#[derive(Debug, Clone, Copy)]
pub struct TwistRow {
    pub action: f64,
    pub level: f64,
    pub period: f64,
    pub freq: f64,
    pub twist: f64,
    pub twist_err: f64,
}

#[derive(Debug, Clone)]
pub struct TwistReport {
    pub rows: Vec<TwistRow>,
}

impl TwistReport {
    /// True when |twist| exceeds ten times its error estimate somewhere.
    pub fn significant(&self) -> bool {
        self.rows.iter().any(|r| math::abs(r.twist) > 10.0 * r.twist_err)
    }

    pub fn max_abs_twist(&self) -> f64 {
        self.rows.iter().map(|r| math::abs(r.twist)).fold(0.0, math::max)
    }
}

/// Twist `d²Ḡ/dJ² = dω/dJ` on a level grid in `(g_lo, g_hi)`, by 5-point
/// stencils on the (nonuniform) J grid with a 3-point error estimate.
pub fn twist(system: &AveragedSystem, g_lo: f64, g_hi: f64, n: usize) -> Result<TwistReport> {
    if n < 5 {
        return Err(Error::Domain("twist grid needs at least 5 levels"));
    }
    let mut j = Vec::with_capacity(n);
    let mut omega = Vec::with_capacity(n);
    let mut g_of = Vec::with_capacity(n);
    let mut periods = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev-like clustering tames the stencils near the ends
        let t = 0.5 * (1.0 - math::cos(math::PI * i as f64 / (n - 1) as f64));
        let g = g_lo + (g_hi - g_lo) * t;
        let (t_avg, jg) = system.averaged_period(g)?;
        j.push(jg);
        omega.push(math::TAU / t_avg);
        g_of.push(g);
        periods.push(t_avg);
    }
    let mut rows = Vec::new();
    for i in 2..n - 2 {
        let five = lagrange_deriv(&j[i - 2..=i + 2], &omega[i - 2..=i + 2], j[i]);
        let three = lagrange_deriv(&j[i - 1..=i + 1], &omega[i - 1..=i + 1], j[i]);
        rows.push(TwistRow {
            action: j[i],
            level: g_of[i],
            period: periods[i],
            freq: omega[i],
            twist: five,
            twist_err: math::max(math::abs(five - three), 1e-14 * math::abs(five)),
        });
    }
    Ok(TwistReport { rows })
}

/// Derivative of the Lagrange interpolant of (x, y) at x0.
fn lagrange_deriv(x: &[f64], y: &[f64], x0: f64) -> f64 {
    let n = x.len();
    let mut out = 0.0;
    for (j, &yj) in y.iter().enumerate() {
        // derivative of the j-th basis polynomial at x0
        let mut dl = 0.0;
        for m in 0..n {
            if m == j {
                continue;
            }
            let mut term = 1.0 / (x[j] - x[m]);
            for l in 0..n {
                if l == j || l == m {
                    continue;
                }
                term *= (x0 - x[l]) / (x[j] - x[l]);
            }
            dl += term;
        }
        out += yj * dl;
    }
    out
}

/// Third-order Birkhoff normal-form data of the averaged system over the
/// degenerate monomial well `V = (ω q)^{2n}`:
/// `Ḡ = ω γ J - A γ² J² + B γ³ J³ + O(J⁴)` up to a T-dependent constant.
#[derive(Debug, Clone, Copy)]
pub struct BirkhoffData {
    pub omega: f64,
    pub a: f64,
    pub b: f64,
    /// exact integer resultant of the numerator polynomials of A and B
    pub resultant: i64,
}

pub fn birkhoff_nf(n: u32, temperature: f64) -> Result<BirkhoffData> {
    if n < 2 {
        return Err(Error::Domain("Birkhoff data applies to degenerate wells, n >= 2"));
    }
    if temperature <= 0.0 {
        return Err(Error::Domain("temperature must be positive"));
    }
    let r = 0.5 * (1.0 + 1.0 / n as f64);
    let s = 1.0 - r;
    let h0 = r * temperature;
    let omega = math::powf(h0, 0.5 - s);
    let a = (6.0 * s * s - 6.0 * s + 1.0) / (24.0 * math::powf(h0, 2.0 * s));
    let b = (180.0 * s * s * s * s - 312.0 * s * s * s + 168.0 * s * s - 36.0 * s + 5.0)
        / (1728.0 * math::powf(h0, 3.0 * s + 0.5));
    Ok(BirkhoffData { omega, a, b, resultant: numerator_resultant() })
}

/// Resultant of `6s² - 6s + 1` and `180s⁴ - 312s³ + 168s² - 36s + 5` over
/// the integers (Sylvester determinant, fraction-free elimination).
pub fn numerator_resultant() -> i64 {
    let p = [6i128, -6, 1]; // descending
    let q = [180i128, -312, 168, -36, 5];
    let mut m = [[0i128; 6]; 6];
    for row in 0..4 {
        for (j, &c) in p.iter().enumerate() {
            m[row][row + j] = c;
        }
    }
    for row in 0..2 {
        for (j, &c) in q.iter().enumerate() {
            m[4 + row][row + j] = c;
        }
    }
    // Bareiss fraction-free determinant
    let mut prev = 1i128;
    let mut sign = 1i128;
    for k in 0..5 {
        if m[k][k] == 0 {
            let swap = (k + 1..6).find(|&r| m[r][k] != 0).expect("singular Sylvester matrix");
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..6 {
            for j in k + 1..6 {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    (sign * m[5][5]) as i64
}
