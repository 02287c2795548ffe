//! The four thermostated vector fields `Y_ε = X_H + ε Τ` on `(q, p, ξ)`,
//! their invariant densities `G_β`, and the Liouville identity
//! `β ⟨dG, Y⟩ - div Y = 0` used as a transcription oracle.
//!
//! Couplings (the Hamiltonian part `q̇ = H_p`, `ṗ = -H_q` is common):
//!
//! * Nosé–Hoover:        `ṗ += -ε ξ p`,       `ξ̇ = ε (p H_p - T)`,      `G = H + ξ²/2`
//! * logistic:           `ṗ += -ε tanh(ξ) p`, `ξ̇ = ε (p H_p - T)`,      `G = H + ln cosh ξ`
//! * Watanabe–Kobayashi: `ṗ += -ε ξ^l p^k`,   `ξ̇ = ε p^{k-1}(p H_p - kT) ζ_l(ξ)`, `G = H + ξ²/2`
//! * Hoover–Sprott–Hoover: `q̇ += -ε q ξ³`, `ṗ += -ε μ p³ ξ³`,
//!   `ξ̇ = ε ([q H_q - T] + μ p² [p H_p - 3T])`, `G = H + ξ⁴/4`

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianSpec;
use crate::math;
use crate::special::ZetaPoly;

#[derive(Debug, Clone, PartialEq)]
pub enum Variant {
    NoseHoover,
    Logistic,
    WatanabeKobayashi { k: u32, l: u32 },
    HooverSprottHoover { mu: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermostatSpec {
    pub variant: Variant,
    pub epsilon: f64,
    pub temperature: f64,
    /// ζ_l for the WK coupling, prebuilt from (l, T)
    zeta: Option<ZetaPoly>,
}

/// A point of the extended phase space `(q, p, ξ)`.
pub type ExtendedState = [f64; 3];

impl ThermostatSpec {
    pub fn new(variant: Variant, epsilon: f64, temperature: f64) -> Result<Self> {
        if temperature <= 0.0 {
            return Err(Error::Domain("temperature must be positive"));
        }
        if epsilon < 0.0 {
            return Err(Error::Domain("coupling epsilon must be nonnegative"));
        }
        let zeta = match variant {
            Variant::WatanabeKobayashi { k, l } => {
                if k % 2 == 0 || l % 2 == 0 {
                    return Err(Error::Domain("WK orders k, l must be odd"));
                }
                Some(ZetaPoly::new(l, temperature)?)
            }
            Variant::HooverSprottHoover { mu } => {
                if mu < 0.0 {
                    return Err(Error::Domain("HSH mu must be nonnegative"));
                }
                None
            }
            _ => None,
        };
        Ok(ThermostatSpec { variant, epsilon, temperature, zeta })
    }

    pub fn nose_hoover(epsilon: f64, temperature: f64) -> Result<Self> {
        Self::new(Variant::NoseHoover, epsilon, temperature)
    }

    pub fn logistic(epsilon: f64, temperature: f64) -> Result<Self> {
        Self::new(Variant::Logistic, epsilon, temperature)
    }

    pub fn watanabe_kobayashi(k: u32, l: u32, epsilon: f64, temperature: f64) -> Result<Self> {
        Self::new(Variant::WatanabeKobayashi { k, l }, epsilon, temperature)
    }

    pub fn hoover_sprott_hoover(mu: f64, epsilon: f64, temperature: f64) -> Result<Self> {
        Self::new(Variant::HooverSprottHoover { mu }, epsilon, temperature)
    }

    pub fn zeta(&self) -> Option<&ZetaPoly> {
        self.zeta.as_ref()
    }

    /// Same thermostat at a different coupling.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.variant.clone(), epsilon, self.temperature)
    }

    /// Right-hand side (q̇, ṗ, ξ̇) at the extended state.
    pub fn vector_field(&self, ham: &HamiltonianSpec, x: &ExtendedState) -> ExtendedState {
        let [q, p, xi] = *x;
        let (h_q, h_p) = ham.gradient(q, p);
        let e = self.epsilon;
        let t = self.temperature;
        match &self.variant {
            Variant::NoseHoover => [h_p, -h_q - e * xi * p, e * (p * h_p - t)],
            Variant::Logistic => [h_p, -h_q - e * math::tanh(xi) * p, e * (p * h_p - t)],
            Variant::WatanabeKobayashi { k, l } => {
                let pk = math::powi(p, *k as i32);
                let pk1 = math::powi(p, *k as i32 - 1);
                let xil = math::powi(xi, *l as i32);
                let zeta = self.zeta.as_ref().unwrap().eval(xi);
                [h_p, -h_q - e * xil * pk, e * pk1 * (p * h_p - *k as f64 * t) * zeta]
            }
            Variant::HooverSprottHoover { mu } => {
                let xi3 = xi * xi * xi;
                [
                    h_p - e * q * xi3,
                    -h_q - e * mu * p * p * p * xi3,
                    e * ((q * h_q - t) + mu * p * p * (p * h_p - 3.0 * t)),
                ]
            }
        }
    }

    /// Log-density `G_β` of the candidate invariant measure `e^{-β G} dq dp dξ`.
    pub fn g_density(&self, ham: &HamiltonianSpec, x: &ExtendedState) -> f64 {
        let [q, p, xi] = *x;
        ham.energy(q, p) + self.kinetic_part(xi)
    }

    /// The ξ-part of `G_β`: ξ²/2, ln cosh ξ, ξ²/2, or ξ⁴/4.
    pub fn kinetic_part(&self, xi: f64) -> f64 {
        match &self.variant {
            Variant::NoseHoover | Variant::WatanabeKobayashi { .. } => 0.5 * xi * xi,
            Variant::Logistic => math::ln_cosh(xi),
            Variant::HooverSprottHoover { .. } => 0.25 * xi * xi * xi * xi,
        }
    }

    /// d(kinetic_part)/dξ.
    pub fn kinetic_part_deriv(&self, xi: f64) -> f64 {
        match &self.variant {
            Variant::NoseHoover | Variant::WatanabeKobayashi { .. } => xi,
            Variant::Logistic => math::tanh(xi),
            Variant::HooverSprottHoover { .. } => xi * xi * xi,
        }
    }

    /// Divergence of the full field at the state, from analytic derivatives.
    pub fn divergence(&self, ham: &HamiltonianSpec, x: &ExtendedState) -> f64 {
        let [q, p, xi] = *x;
        let e = self.epsilon;
        // ∂q̇/∂q + ∂ṗ/∂p + ∂ξ̇/∂ξ; the Hamiltonian part cancels (H_pq = H_qp)
        match &self.variant {
            Variant::NoseHoover => -e * xi,
            Variant::Logistic => -e * math::tanh(xi),
            Variant::WatanabeKobayashi { k, l } => {
                let kf = *k as f64;
                let (_, h_p) = ham.gradient(q, p);
                let xil = math::powi(xi, *l as i32);
                let pk1 = math::powi(p, *k as i32 - 1);
                let zeta_d = self.zeta.as_ref().unwrap().deriv(xi);
                -e * kf * xil * pk1 + e * pk1 * (p * h_p - kf * self.temperature) * zeta_d
            }
            Variant::HooverSprottHoover { mu } => {
                let xi3 = xi * xi * xi;
                -e * xi3 - 3.0 * e * mu * p * p * xi3
            }
        }
    }

    /// Liouville defect `β ⟨dG, Y_ε⟩ - div Y_ε`, from analytic derivatives.
    ///
    /// Invariance of `e^{-β G} dq dp dξ` under the flow is equivalent to the
    /// defect vanishing identically; any transcription error in a coupling
    /// or in `ζ_l` shows up here.
    pub fn liouville_defect(&self, ham: &HamiltonianSpec, x: &ExtendedState) -> f64 {
        let [q, p, xi] = *x;
        let field = self.vector_field(ham, x);
        let (h_q, h_p) = ham.gradient(q, p);
        let beta = 1.0 / self.temperature;
        let dg_dot = h_q * field[0] + h_p * field[1] + self.kinetic_part_deriv(xi) * field[2];
        beta * dg_dot - self.divergence(ham, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::HamiltonianSpec;
    use crate::math::abs;

    fn xorshift(state: &mut u64) -> f64 {
        *state ^= *state >> 12;
        *state ^= *state << 25;
        *state ^= *state >> 27;
        (state.wrapping_mul(0x2545F4914F6CDD1D) >> 11) as f64 / (1u64 << 53) as f64
    }

    fn fuzz_state(rng: &mut u64) -> ExtendedState {
        [
            6.0 * (xorshift(rng) - 0.5),
            6.0 * (xorshift(rng) - 0.5),
            6.0 * (xorshift(rng) - 0.5),
        ]
    }

    fn all_variants(eps: f64, t: f64) -> [ThermostatSpec; 4] {
        [
            ThermostatSpec::nose_hoover(eps, t).unwrap(),
            ThermostatSpec::logistic(eps, t).unwrap(),
            ThermostatSpec::watanabe_kobayashi(3, 3, eps, t).unwrap(),
            ThermostatSpec::hoover_sprott_hoover(0.7, eps, t).unwrap(),
        ]
    }

    #[test]
    fn decoupled_limit_is_hamiltonian() {
        let ham = HamiltonianSpec::pendulum();
        let mut rng = 42u64;
        for spec in all_variants(0.0, 1.3) {
            for _ in 0..50 {
                let x = fuzz_state(&mut rng);
                let f = spec.vector_field(&ham, &x);
                let (h_q, h_p) = ham.gradient(x[0], x[1]);
                assert_eq!(f[0], h_p);
                assert_eq!(f[1], -h_q);
                assert_eq!(f[2], 0.0);
                assert_eq!(spec.liouville_defect(&ham, &x), 0.0);
            }
        }
    }

    #[test]
    fn wk_with_unit_orders_is_nose_hoover() {
        let ham = HamiltonianSpec::double_well(1.0);
        let nh = ThermostatSpec::nose_hoover(0.3, 0.8).unwrap();
        let wk = ThermostatSpec::watanabe_kobayashi(1, 1, 0.3, 0.8).unwrap();
        let mut rng = 7u64;
        for _ in 0..1000 {
            let x = fuzz_state(&mut rng);
            let a = nh.vector_field(&ham, &x);
            let b = wk.vector_field(&ham, &x);
            for i in 0..3 {
                assert!(abs(a[i] - b[i]) < 1e-14 * (1.0 + abs(a[i])), "component {i}");
            }
        }
    }

    #[test]
    fn hsh_mu_zero_drops_momentum_channel() {
        let ham = HamiltonianSpec::harmonic(1.0);
        let hsh = ThermostatSpec::hoover_sprott_hoover(0.0, 0.2, 1.0).unwrap();
        let mut rng = 11u64;
        for _ in 0..200 {
            let x = fuzz_state(&mut rng);
            let f = hsh.vector_field(&ham, &x);
            let (h_q, h_p) = ham.gradient(x[0], x[1]);
            // only the (q, ξ³) coupling remains
            let xi3 = x[2] * x[2] * x[2];
            assert!(abs(f[0] - (h_p - 0.2 * x[0] * xi3)) < 1e-15 * (1.0 + abs(f[0])));
            assert_eq!(f[1], -h_q);
            assert!(abs(f[2] - 0.2 * (x[0] * h_q - 1.0)) < 1e-14 * (1.0 + abs(f[2])));
        }
    }

    #[test]
    fn g_density_shapes() {
        let ham = HamiltonianSpec::harmonic(1.0);
        let nh = ThermostatSpec::nose_hoover(0.1, 1.0).unwrap();
        assert_eq!(nh.g_density(&ham, &[0.3, -0.2, 0.0]), ham.energy(0.3, -0.2));
        let hsh = ThermostatSpec::hoover_sprott_hoover(1.0, 0.1, 1.0).unwrap();
        let xi = 1.7;
        assert!(abs(hsh.g_density(&ham, &[0.0, 0.0, xi]) - 0.25 * xi * xi * xi * xi) < 1e-15);
        // logistic G - H is even in ξ and asymptotically |ξ| - ln 2
        let lg = ThermostatSpec::logistic(0.1, 1.0).unwrap();
        for &x in &[0.5, 2.0, 30.0] {
            assert!(abs(lg.kinetic_part(x) - lg.kinetic_part(-x)) < 1e-14);
        }
        assert!(abs(lg.kinetic_part(30.0) - (30.0 - core::f64::consts::LN_2)) < 1e-12);
    }

    #[test]
    fn liouville_defect_vanishes_on_fuzzed_states() {
        // the identity holds exactly in exact arithmetic; floating point
        // leaves cancellation residue that scales with the state magnitude
        let hams = [
            HamiltonianSpec::harmonic(1.0),
            HamiltonianSpec::pendulum(),
            HamiltonianSpec::double_well(1.0),
        ];
        for ham in &hams {
            for spec in all_variants(0.37, 0.9) {
                let mut rng = 1234u64;
                for _ in 0..1000 {
                    let x = fuzz_state(&mut rng);
                    let d = spec.liouville_defect(ham, &x);
                    let norm = math::hypot3(x[0], x[1], x[2]);
                    let bound = 1e-12 * (1.0 + norm * norm * norm);
                    assert!(
                        abs(d) <= bound,
                        "{:?} defect {d:.3e} at |x| = {norm:.2}",
                        spec.variant
                    );
                }
            }
        }
    }

    #[test]
    fn liouville_defect_matches_finite_difference_divergence() {
        // independent oracle: 4th-order central differences for div Y
        let ham = HamiltonianSpec::pendulum();
        let mut rng = 99u64;
        for spec in all_variants(0.21, 1.4) {
            for _ in 0..60 {
                let x = fuzz_state(&mut rng);
                let scale = 1.0 + math::hypot3(x[0], x[1], x[2]);
                let step = 1e-4 * scale;
                let mut div_fd = 0.0;
                for axis in 0..3 {
                    let mut probe = |delta: f64| {
                        let mut y = x;
                        y[axis] += delta;
                        spec.vector_field(&ham, &y)[axis]
                    };
                    div_fd += (-probe(2.0 * step) + 8.0 * probe(step) - 8.0 * probe(-step)
                        + probe(-2.0 * step))
                        / (12.0 * step);
                }
                let div_an = spec.divergence(&ham, &x);
                assert!(
                    abs(div_an - div_fd) < 1e-7 * (1.0 + abs(div_an)) * scale * scale,
                    "{:?}: {div_an} vs {div_fd}",
                    spec.variant
                );
            }
        }
    }

    #[test]
    fn time_reversal_parity_of_the_field() {
        // couplings odd in ξ: under (p, ξ) -> (-p, -ξ) the field reverses
        let ham = HamiltonianSpec::pendulum();
        let nh = ThermostatSpec::nose_hoover(0.4, 1.1).unwrap();
        let mut rng = 5u64;
        for _ in 0..200 {
            let x = fuzz_state(&mut rng);
            let f = nh.vector_field(&ham, &x);
            let y = [x[0], -x[1], -x[2]];
            let g = nh.vector_field(&ham, &y);
            assert!(abs(f[0] + g[0]) < 1e-14 * (1.0 + abs(f[0])));
            assert!(abs(f[1] - g[1]) < 1e-14 * (1.0 + abs(f[1])));
            assert!(abs(f[2] - g[2]) < 1e-14 * (1.0 + abs(f[2])));
        }
    }

    #[test]
    fn nh_time_reversal_maps_trajectories() {
        // S(q, p, ξ) = (q, -p, -ξ) conjugates the flow to its reverse:
        // S(φ_t(x)) = φ_{-t}(S(x))
        use crate::integrator::{integrate, IntegratorConfig};
        let ham = HamiltonianSpec::pendulum();
        let nh = ThermostatSpec::nose_hoover(0.1, 1.0).unwrap();
        let cfg = IntegratorConfig::with_tol(1e-12, 1e-14);
        let field = |_t: f64, y: &[f64; 3]| nh.vector_field(&ham, y);
        let x0 = [0.4, 0.9, -0.3];
        let fwd = integrate(field, 0.0, x0, 10.0, &cfg).unwrap().y_end;
        let sx0 = [x0[0], -x0[1], -x0[2]];
        let back = integrate(field, 0.0, sx0, -10.0, &cfg).unwrap().y_end;
        let mapped = [fwd[0], -fwd[1], -fwd[2]];
        for i in 0..3 {
            assert!(abs(mapped[i] - back[i]) < 1e-8, "component {i}");
        }
    }

    #[test]
    fn constructor_validation() {
        assert!(ThermostatSpec::nose_hoover(0.1, 0.0).is_err());
        assert!(ThermostatSpec::nose_hoover(-0.1, 1.0).is_err());
        assert!(ThermostatSpec::watanabe_kobayashi(2, 1, 0.1, 1.0).is_err());
        assert!(ThermostatSpec::watanabe_kobayashi(1, 4, 0.1, 1.0).is_err());
        assert!(ThermostatSpec::hoover_sprott_hoover(-1.0, 0.1, 1.0).is_err());
    }
}
