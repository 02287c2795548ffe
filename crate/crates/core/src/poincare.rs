//! Poincaré return map of the full thermostated flow on the section
//! `q = q*`, `p > 0`, rotation numbers by weighted Birkhoff averaging, the
//! return-map/averaged-flow agreement experiment, and invariant-torus scans.
//!
//! In the section coordinates `(h, ξ)` the flux form of the invariant
//! measure is exactly `e^{-β G} dh ∧ dξ`, so the return map must preserve
//! it; [`omega_beta_det`] measures that determinant and the scan weights
//! its measure fractions accordingly.

use crate::averaged::AveragedSystem;
use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianSpec;
use crate::integrator::{find_crossing_in_step, Direction, IntegratorConfig, Stepper};
use crate::math;
use crate::orbit::ActionProfile;
use crate::thermostats::{ExtendedState, ThermostatSpec};
use alloc::vec::Vec;

/// The section `q = q*`, crossed with `p > 0`, watched inside a window of
/// the `(h, ξ)` plane.
#[derive(Debug, Clone)]
pub struct SectionSpec {
    pub q_star: f64,
    /// wrap the crossing test mod 2π (circle configuration space)
    pub circle: bool,
    pub window_h: (f64, f64),
    pub window_xi: (f64, f64),
    /// give up on a return after this much flow time
    pub t_cap_per_return: f64,
}

impl SectionSpec {
    pub fn new(q_star: f64, circle: bool, window_h: (f64, f64), window_xi: (f64, f64)) -> Self {
        SectionSpec { q_star, circle, window_h, window_xi, t_cap_per_return: 1e4 }
    }

    /// Lift section coordinates `(h, ξ)` to the extended state
    /// `(q*, +√(2(h - V(q*))), ξ)`.
    pub fn lift(&self, ham: &HamiltonianSpec, h: f64, xi: f64) -> Result<ExtendedState> {
        let gap = h - ham.v(self.q_star);
        if gap <= 0.0 {
            return Err(Error::Domain("section energy below the potential at q*"));
        }
        Ok([self.q_star, math::sqrt(2.0 * gap), xi])
    }

    pub fn contains(&self, h: f64, xi: f64) -> bool {
        h >= self.window_h.0 && h <= self.window_h.1 && xi >= self.window_xi.0 && xi <= self.window_xi.1
    }

    fn event(&self, y: &[f64; 3]) -> f64 {
        if self.circle {
            math::sin(y[0] - self.q_star)
        } else {
            y[0] - self.q_star
        }
    }

    fn crossing_accepted(&self, y: &[f64; 3]) -> bool {
        let ok_branch = y[1] > 0.0;
        if self.circle {
            ok_branch && math::cos(y[0] - self.q_star) > 0.0
        } else {
            ok_branch
        }
    }
}

/// One section crossing: return time (since the previous crossing), state,
/// and section coordinates.
#[derive(Debug, Clone, Copy)]
pub struct Crossing {
    pub t: f64,
    pub state: ExtendedState,
    pub h: f64,
    pub xi: f64,
}

/// `n` successive section crossings of the thermostated flow from `x0`.
///
/// The crossings realize the return map; return times carry the implicit
/// time rescaling of the section normalization. An orbit that leaves the
/// `(h, ξ)` window (or stops returning) yields `WindowEscape` with the
/// index of the last good return.
pub fn return_map(
    ham: &HamiltonianSpec,
    thermostat: &ThermostatSpec,
    section: &SectionSpec,
    x0: ExtendedState,
    n: usize,
    cfg: &IntegratorConfig,
) -> Result<Vec<Crossing>> {
    let mut out = Vec::with_capacity(n);
    let mut sink = |c: Crossing| -> bool {
        out.push(c);
        false
    };
    match return_map_streaming(ham, thermostat, section, x0, n, cfg, &mut sink) {
        Ok(()) => Ok(out),
        Err(e) => Err(e),
    }
}

/// Streaming form of [`return_map`]: `sink` receives each crossing and may
/// stop the iteration early by returning `true`.
pub fn return_map_streaming<S>(
    ham: &HamiltonianSpec,
    thermostat: &ThermostatSpec,
    section: &SectionSpec,
    x0: ExtendedState,
    n: usize,
    cfg: &IntegratorConfig,
    sink: &mut S,
) -> Result<()>
where
    S: FnMut(Crossing) -> bool,
{
    let field = |_t: f64, y: &[f64; 3]| thermostat.vector_field(ham, y);
    let mut t_global = 0.0;
    let mut state = x0;
    for index in 0..n {
        let mut stepper =
            Stepper::new(field, 0.0, state, section.t_cap_per_return, cfg.clone());
        let mut found: Option<(f64, [f64; 3])> = None;
        while !stepper.done() {
            let step = match stepper.step() {
                Ok(s) => s,
                Err(_) => return Err(Error::WindowEscape { index }),
            };
            let event = |_t: f64, y: &[f64; 3]| section.event(y);
            if let Some((t, y)) = find_crossing_in_step(&step, &event, Direction::Up) {
                if t > 1e-10 && section.crossing_accepted(&y) {
                    found = Some((t, y));
                    break;
                }
            }
        }
        let (t_ret, y) = found.ok_or(Error::WindowEscape { index })?;
        let h = ham.energy(y[0], y[1]);
        let xi = y[2];
        if !section.contains(h, xi) {
            return Err(Error::WindowEscape { index });
        }
        t_global += t_ret;
        state = y;
        if sink(Crossing { t: t_global, state, h, xi }) {
            return Ok(());
        }
    }
    Ok(())
}

/// ω_β-determinant of the return map at `(h, ξ)`: the Jacobian in section
/// coordinates times the density ratio `e^{-β(G' - G)}`; exactly 1 for the
/// flow-induced map, so the numerical value checks the whole pipeline.
pub fn omega_beta_det(
    ham: &HamiltonianSpec,
    thermostat: &ThermostatSpec,
    section: &SectionSpec,
    h: f64,
    xi: f64,
) -> Result<f64> {
    let cfg = IntegratorConfig::with_tol(1e-11, 1e-13);
    let one = |hh: f64, xx: f64| -> Result<(f64, f64)> {
        let x0 = section.lift(ham, hh, xx)?;
        let c = return_map(ham, thermostat, section, x0, 1, &cfg)?;
        Ok((c[0].h, c[0].xi))
    };
    let dh = 1e-6 * (1.0 + math::abs(h));
    let dxi = 1e-6 * (1.0 + math::abs(xi));
    let (hp, xp) = one(h + dh, xi)?;
    let (hm, xm) = one(h - dh, xi)?;
    let (hq, xq) = one(h, xi + dxi)?;
    let (hr, xr) = one(h, xi - dxi)?;
    let j11 = (hp - hm) / (2.0 * dh);
    let j21 = (xp - xm) / (2.0 * dh);
    let j12 = (hq - hr) / (2.0 * dxi);
    let j22 = (xq - xr) / (2.0 * dxi);
    let det = j11 * j22 - j12 * j21;
    let (h1, xi1) = one(h, xi)?;
    let beta = 1.0 / thermostat.temperature;
    let x_now = section.lift(ham, h, xi)?;
    let x_img = section.lift(ham, h1, xi1)?;
    let g0 = thermostat.g_density(ham, &x_now);
    let g1 = thermostat.g_density(ham, &x_img);
    Ok(det * math::exp(-beta * (g1 - g0)))
}

/// Defect table of the averaging-agreement experiment: one full-system
/// return versus the time-2π map of `ε R̄₀` from the same section point,
/// for each coupling in `eps_list`.
#[allow(clippy::too_many_arguments)]
pub fn averaging_agreement(
    ham: &HamiltonianSpec,
    thermostat: &ThermostatSpec,
    section: &SectionSpec,
    system: &AveragedSystem,
    profile: &ActionProfile,
    h0: f64,
    xi0: f64,
    eps_list: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let cfg = IntegratorConfig::with_tol(1e-12, 1e-14);
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        if eps == 0.0 {
            rows.push((0.0, 0.0));
            continue;
        }
        let th = thermostat.with_epsilon(eps)?;
        let x0 = section.lift(ham, h0, xi0)?;
        let cross = return_map(ham, &th, section, x0, 1, &cfg)?;
        let i_full = profile.action_of_h(cross[0].h);
        let xi_full = cross[0].xi;
        // averaged section map: flow R̄₀ for time 2πε
        let avg_cfg = IntegratorConfig::with_tol(1e-12, 1e-14);
        let field = |_t: f64, y: &[f64; 2]| {
            system.rbar_field(y[0], y[1]).unwrap_or([f64::NAN, f64::NAN])
        };
        let i_start = profile.action_of_h(h0);
        let traj =
            crate::integrator::integrate(field, 0.0, [i_start, xi0], math::TAU * eps, &avg_cfg)?;
        let defect = math::sqrt(
            (i_full - traj.y_end[0]) * (i_full - traj.y_end[0])
                + (xi_full - traj.y_end[1]) * (xi_full - traj.y_end[1]),
        );
        rows.push((eps, defect));
    }
    Ok(rows)
}

/// Least-squares slope of `ln defect` against `ln ε`.
pub fn log_log_slope(rows: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(e, d)| *e > 0.0 && *d > 0.0)
        .map(|(e, d)| (math::ln(*e), math::ln(*d)))
        .collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Weighted Birkhoff rotation number of a planar sequence around `center`.
///
/// The exponential bump weight makes the average converge superpolynomially
/// on invariant circles; the residual compares the half-sequence estimate
/// with the full one.
pub fn rotation_number(points: &[[f64; 2]], center: [f64; 2]) -> Result<(f64, f64)> {
    if points.len() < 8 {
        return Err(Error::NonwindingSequence);
    }
    // scale the two coordinates so the winding test is aspect-independent
    let mut su = 0.0;
    let mut sv = 0.0;
    for p in points {
        su = math::max(su, math::abs(p[0] - center[0]));
        sv = math::max(sv, math::abs(p[1] - center[1]));
    }
    if su == 0.0 || sv == 0.0 {
        return Err(Error::NonwindingSequence);
    }
    let mut increments = Vec::with_capacity(points.len() - 1);
    let angle = |p: &[f64; 2]| math::atan2((p[1] - center[1]) / sv, (p[0] - center[0]) / su);
    let mut prev = angle(&points[0]);
    for p in &points[1..] {
        let a = angle(p);
        let mut d = a - prev;
        while d > math::PI {
            d -= math::TAU;
        }
        while d < -math::PI {
            d += math::TAU;
        }
        increments.push(d);
        prev = a;
    }
    let total: f64 = increments.iter().sum();
    if math::abs(total) < math::PI {
        return Err(Error::NonwindingSequence);
    }
    let rho_full = birkhoff_mean(&increments);
    let rho_half = birkhoff_mean(&increments[..increments.len() / 2]);
    Ok((rho_full, math::abs(rho_full - rho_half)))
}

fn birkhoff_mean(xs: &[f64]) -> f64 {
    let n = xs.len();
    let mut wsum = 0.0;
    let mut acc = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let t = (i + 1) as f64 / (n + 1) as f64;
        let w = math::exp(-1.0 / (t * (1.0 - t)));
        wsum += w;
        acc += w * x;
    }
    acc / wsum
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointClass {
    TorusCandidate,
    Escaped,
    Irregular,
}

impl PointClass {
    pub fn label(&self) -> &'static str {
        match self {
            PointClass::TorusCandidate => "torus",
            PointClass::Escaped => "escaped",
            PointClass::Irregular => "irregular",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ScanPoint {
    pub h0: f64,
    pub xi0: f64,
    pub class: PointClass,
    pub rho: f64,
    pub residual: f64,
    pub iterations: usize,
    /// true when the point lies inside the boundary margin (excluded from
    /// the summary fractions)
    pub boundary: bool,
}

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub n_iters: usize,
    /// returns used for the companion-separation test
    pub companion_iters: usize,
    pub companion_offset: f64,
    pub residual_threshold: f64,
    pub separation_threshold: f64,
    /// sequences smaller than this diameter count as fixed points (tori of
    /// the trivial or near-trivial map) without a winding test
    pub fixed_point_diameter: f64,
    /// fraction of the window treated as boundary
    pub boundary_margin: f64,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            n_iters: 20_000,
            companion_iters: 4_000,
            companion_offset: 1e-8,
            residual_threshold: 1e-4,
            separation_threshold: 1e-3,
            fixed_point_diameter: 1e-4,
            boundary_margin: 0.02,
            rtol: 1e-8,
            atol: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScanReport {
    pub points: Vec<ScanPoint>,
    pub nh: usize,
    pub nxi: usize,
    /// torus-candidate fraction over interior points
    pub fraction: f64,
    /// fraction weighted by the section density e^{-β G}
    pub fraction_weighted: f64,
}

/// Classify one grid point. Deterministic: no randomness enters anywhere.
pub fn scan_point(
    ham: &HamiltonianSpec,
    thermostat: &ThermostatSpec,
    section: &SectionSpec,
    h_eq: f64,
    h0: f64,
    xi0: f64,
    cfg: &ScanConfig,
) -> ScanPoint {
    let margin_h = cfg.boundary_margin * (section.window_h.1 - section.window_h.0);
    let margin_xi = cfg.boundary_margin * (section.window_xi.1 - section.window_xi.0);
    let boundary = h0 < section.window_h.0 + margin_h
        || h0 > section.window_h.1 - margin_h
        || xi0 < section.window_xi.0 + margin_xi
        || xi0 > section.window_xi.1 - margin_xi;
    let icfg = IntegratorConfig::with_tol(cfg.rtol, cfg.atol);
    let make = |h: f64, xi: f64, n: usize| -> core::result::Result<Vec<[f64; 2]>, usize> {
        let x0 = match section.lift(ham, h, xi) {
            Ok(x) => x,
            Err(_) => return Err(0),
        };
        let mut seq = Vec::with_capacity(n);
        let mut sink = |c: Crossing| {
            seq.push([c.h, c.xi]);
            false
        };
        match return_map_streaming(ham, thermostat, section, x0, n, &icfg, &mut sink) {
            Ok(()) => Ok(seq),
            Err(Error::WindowEscape { index }) => Err(index),
            Err(_) => Err(seq.len()),
        }
    };
    let primary = match make(h0, xi0, cfg.n_iters) {
        Ok(seq) => seq,
        Err(index) => {
            return ScanPoint {
                h0,
                xi0,
                class: PointClass::Escaped,
                rho: f64::NAN,
                residual: f64::NAN,
                iterations: index,
                boundary,
            }
        }
    };
    // a stationary section sequence is an invariant circle of the flow
    // (exactly so at ε = 0); the winding test cannot apply to it
    let mut diameter = 0.0;
    for p in &primary[1..] {
        let d = math::sqrt(
            (p[0] - primary[0][0]) * (p[0] - primary[0][0])
                + (p[1] - primary[0][1]) * (p[1] - primary[0][1]),
        );
        diameter = math::max(diameter, d);
    }
    let fixed_point = diameter < cfg.fixed_point_diameter;
    let (rho, residual) = if fixed_point {
        (0.0, 0.0)
    } else {
        rotation_number(&primary, [h_eq, 0.0]).unwrap_or((f64::NAN, f64::INFINITY))
    };
    // companion separation over the shorter window
    let n_comp = cfg.companion_iters.min(cfg.n_iters);
    let mut separation = 0.0;
    match make(h0, xi0 + cfg.companion_offset, n_comp) {
        Ok(comp) => {
            for (a, b) in primary.iter().zip(comp.iter()) {
                let d = math::sqrt(
                    (a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]),
                );
                separation = math::max(separation, d);
            }
        }
        Err(_) => separation = f64::INFINITY,
    }
    let class = if residual < cfg.residual_threshold && separation < cfg.separation_threshold {
        PointClass::TorusCandidate
    } else {
        PointClass::Irregular
    };
    ScanPoint { h0, xi0, class, rho, residual, iterations: cfg.n_iters, boundary }
}

/// Serial torus scan over an `nh × nξ` grid spanning the window interior.
/// Grid-point work is independent; parallel drivers assemble the same
/// report from [`scan_point`] results in index order.
pub fn torus_scan(
    ham: &HamiltonianSpec,
    thermostat: &ThermostatSpec,
    section: &SectionSpec,
    h_eq: f64,
    nh: usize,
    nxi: usize,
    cfg: &ScanConfig,
) -> ScanReport {
    let mut points = Vec::with_capacity(nh * nxi);
    for (h0, xi0) in scan_grid(section, nh, nxi) {
        points.push(scan_point(ham, thermostat, section, h_eq, h0, xi0, cfg));
    }
    assemble_report(ham, thermostat, section, points, nh, nxi)
}

/// The scan grid in row-major (h outer, ξ inner) order.
pub fn scan_grid(section: &SectionSpec, nh: usize, nxi: usize) -> Vec<(f64, f64)> {
    let mut grid = Vec::with_capacity(nh * nxi);
    for i in 0..nh {
        let th = (i as f64 + 0.5) / nh as f64;
        let h0 = section.window_h.0 + th * (section.window_h.1 - section.window_h.0);
        for j in 0..nxi {
            let tx = (j as f64 + 0.5) / nxi as f64;
            let xi0 = section.window_xi.0 + tx * (section.window_xi.1 - section.window_xi.0);
            grid.push((h0, xi0));
        }
    }
    grid
}

/// Deterministic reduction of per-point results into the report.
pub fn assemble_report(
    ham: &HamiltonianSpec,
    thermostat: &ThermostatSpec,
    section: &SectionSpec,
    points: Vec<ScanPoint>,
    nh: usize,
    nxi: usize,
) -> ScanReport {
    let beta = 1.0 / thermostat.temperature;
    let mut interior = 0usize;
    let mut candidates = 0usize;
    let mut wsum = 0.0;
    let mut wcand = 0.0;
    for p in &points {
        if p.boundary {
            continue;
        }
        interior += 1;
        let w = match section.lift(ham, p.h0, p.xi0) {
            Ok(x) => math::exp(-beta * thermostat.g_density(ham, &x)),
            Err(_) => 0.0,
        };
        wsum += w;
        if p.class == PointClass::TorusCandidate {
            candidates += 1;
            wcand += w;
        }
    }
    ScanReport {
        points,
        nh,
        nxi,
        fraction: if interior > 0 { candidates as f64 / interior as f64 } else { 0.0 },
        fraction_weighted: if wsum > 0.0 { wcand / wsum } else { 0.0 },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::averaged::{find_equilibria, AveragedSystem};
    use crate::math::{abs, PI, TAU};
    use crate::orbit::{build_profile, GridSpec};

    fn harmonic_setup(
        t: f64,
    ) -> (HamiltonianSpec, ActionProfile, AveragedSystem, SectionSpec, f64) {
        let ham = HamiltonianSpec::harmonic(1.0);
        let graph = ham.reeb_graph().unwrap();
        let spec = GridSpec { h_cap: Some(6.0), ..GridSpec::default() };
        let profile = build_profile(&ham, &graph, 0, &spec).unwrap();
        let nh = ThermostatSpec::nose_hoover(0.05, t).unwrap();
        let h_eq = find_equilibria(&nh, &profile).unwrap()[0];
        let sys = AveragedSystem::build(&nh, &profile, h_eq, None).unwrap();
        let section = SectionSpec::new(0.0, false, (0.4 * t, 1.8 * t), (-0.8, 0.8));
        (ham, profile, sys, section, h_eq)
    }

    #[test]
    fn decoupled_return_map_preserves_h_and_xi() {
        let (ham, _, _, section, _) = harmonic_setup(1.0);
        let th = ThermostatSpec::nose_hoover(0.0, 1.0).unwrap();
        let cfg = IntegratorConfig::with_tol(1e-12, 1e-14);
        let x0 = section.lift(&ham, 1.1, 0.3).unwrap();
        let cross = return_map(&ham, &th, &section, x0, 10, &cfg).unwrap();
        for c in &cross {
            assert!(abs(c.h - 1.1) < 1e-9);
            assert!(abs(c.xi - 0.3) < 1e-12);
        }
        // crossings spaced by the harmonic period
        for w in cross.windows(2) {
            assert!(abs(w[1].t - w[0].t - TAU) < 1e-8);
        }
    }

    #[test]
    fn nh_xi_sequence_stays_bounded() {
        let (ham, _, sys, section, h_eq) = harmonic_setup(1.0);
        let th = ThermostatSpec::nose_hoover(0.05, 1.0).unwrap();
        let cfg = IntegratorConfig::with_tol(1e-9, 1e-11);
        let x0 = section.lift(&ham, h_eq, 0.3).unwrap();
        let cross = return_map(&ham, &th, &section, x0, 1000, &cfg).unwrap();
        // bound from the averaged level set through the initial point
        let g0 = sys.gbar(1.0, 0.3).unwrap();
        let xi_bound = libm::sqrt(2.0 * g0) * 1.3 + 0.05;
        for c in &cross {
            assert!(abs(c.xi) < xi_bound, "xi = {} exceeds {}", c.xi, xi_bound);
        }
    }

    #[test]
    fn omega_beta_determinant_is_unimodular() {
        let (ham, _, _, section, _) = harmonic_setup(1.0);
        let th = ThermostatSpec::nose_hoover(0.05, 1.0).unwrap();
        for &(h, xi) in &[(1.0, 0.2), (1.2, -0.3), (0.8, 0.0)] {
            let det = omega_beta_det(&ham, &th, &section, h, xi).unwrap();
            assert!(abs(det - 1.0) < 1e-5, "det = {det} at ({h}, {xi})");
        }
    }

    #[test]
    fn averaging_agreement_order_bound() {
        let (ham, profile, sys, section, h_eq) = harmonic_setup(1.0);
        let th = ThermostatSpec::nose_hoover(0.1, 1.0).unwrap();
        let rows = averaging_agreement(
            &ham,
            &th,
            &section,
            &sys,
            &profile,
            h_eq * 1.15,
            0.25,
            &[0.1, 0.05, 0.025],
        )
        .unwrap();
        let slope = log_log_slope(&rows);
        // the order-2 bound of the averaging theory holds with room to
        // spare: the odd couplings kill the ε² term (ā = 0 by the
        // (p, ξ, t) -> (-p, -ξ, -t) parity), so the measured order is 3
        assert!(
            (1.9..=3.3).contains(&slope),
            "slope {slope}, rows {rows:?}"
        );
        for (eps, defect) in &rows {
            assert!(*defect <= 2.0 * eps * eps, "defect above the order-2 bound at eps = {eps}");
        }
    }

    #[test]
    fn rotation_number_of_rigid_rotation() {
        let alpha = 0.731;
        let mut pts = Vec::new();
        for i in 0..100 {
            let th = alpha * i as f64;
            pts.push([libm::cos(th), libm::sin(th)]);
        }
        let (rho, _res) = rotation_number(&pts, [0.0, 0.0]).unwrap();
        assert!(abs(rho - alpha) < 1e-12);
        // residual decreases with window length on a quasiperiodic signal
        let mut prev_res = f64::INFINITY;
        for &n in &[200usize, 400, 800, 1600] {
            let mut pts = Vec::new();
            for i in 0..n {
                let th = alpha * i as f64;
                let r = 1.0 + 0.3 * libm::cos(3.0 * th + 0.4);
                pts.push([r * libm::cos(th), r * libm::sin(th)]);
            }
            let (_, res) = rotation_number(&pts, [0.0, 0.0]).unwrap();
            assert!(res <= prev_res + 1e-12, "residual grew at n = {n}");
            prev_res = res;
        }
    }

    #[test]
    fn rotation_number_rejects_nonwinding() {
        let pts: Vec<[f64; 2]> = (0..50).map(|i| [1.0 + 0.001 * i as f64, 0.0]).collect();
        assert!(matches!(rotation_number(&pts, [0.0, 0.0]), Err(Error::NonwindingSequence)));
    }

    #[test]
    fn rotation_number_matches_averaged_frequency() {
        let (ham, profile, sys, section, h_eq) = harmonic_setup(1.0);
        let eps = 0.02;
        let th = ThermostatSpec::nose_hoover(eps, 1.0).unwrap();
        let cfg = IntegratorConfig::with_tol(1e-10, 1e-12);
        let h0 = h_eq * 1.2;
        let x0 = section.lift(&ham, h0, 0.0).unwrap();
        let cross = return_map(&ham, &th, &section, x0, 600, &cfg).unwrap();
        let pts: Vec<[f64; 2]> = cross.iter().map(|c| [c.h, c.xi]).collect();
        let (rho, _) = rotation_number(&pts, [h_eq, 0.0]).unwrap();
        // expected: 2πε dḠ/dJ at the level through (I(h0), 0)
        let g = sys.gbar(profile.action_of_h(h0), 0.0).unwrap();
        let (t_avg, _) = sys.averaged_period(g).unwrap();
        let expected = TAU * eps * (TAU / t_avg);
        assert!(
            abs(abs(rho) - expected) < 5.0 * eps * eps + 0.05 * expected,
            "rho {rho} vs {expected}"
        );
    }

    #[test]
    fn scan_decoupled_is_all_tori() {
        let (ham, _, _, section, h_eq) = harmonic_setup(1.0);
        let th = ThermostatSpec::nose_hoover(0.0, 1.0).unwrap();
        let cfg = ScanConfig {
            n_iters: 300,
            companion_iters: 100,
            ..ScanConfig::default()
        };
        let report = torus_scan(&ham, &th, &section, h_eq, 7, 7, &cfg);
        // ε = 0: every point sits on an invariant circle of the trivial map
        for p in report.points.iter().filter(|p| !p.boundary) {
            assert_eq!(p.class, PointClass::TorusCandidate, "at ({}, {})", p.h0, p.xi0);
        }
        assert_eq!(report.fraction, 1.0);
        assert_eq!(report.fraction_weighted, 1.0);
    }

    #[test]
    fn scan_point_deterministic() {
        let (ham, _, _, section, h_eq) = harmonic_setup(1.0);
        let th = ThermostatSpec::nose_hoover(0.05, 1.0).unwrap();
        let cfg = ScanConfig { n_iters: 200, companion_iters: 80, ..ScanConfig::default() };
        let a = scan_point(&ham, &th, &section, h_eq, 1.05, 0.11, &cfg);
        let b = scan_point(&ham, &th, &section, h_eq, 1.05, 0.11, &cfg);
        assert_eq!(a.class, b.class);
        assert_eq!(a.rho.to_bits(), b.rho.to_bits());
        assert_eq!(a.residual.to_bits(), b.residual.to_bits());
    }

    #[test]
    fn pendulum_section_near_separatrix_periods() {
        // crossing spacing equals the orbit period from quadrature
        let ham = HamiltonianSpec::pendulum();
        let graph = ham.reeb_graph().unwrap();
        let th = ThermostatSpec::nose_hoover(0.0, 1.0).unwrap();
        let section = SectionSpec::new(0.0, true, (-1.0, 1.0), (-1.0, 1.0));
        let cfg = IntegratorConfig::with_tol(1e-11, 1e-13);
        let h = 0.95;
        let x0 = section.lift(&ham, h, 0.0).unwrap();
        let cross = return_map(&ham, &th, &section, x0, 4, &cfg).unwrap();
        let cycle = crate::orbit::LevelCycle::on_edge(&ham, &graph, 0, h).unwrap();
        let (t_exact, _) = crate::orbit::period(&ham, &cycle).unwrap();
        for w in cross.windows(2) {
            assert!(abs(w[1].t - w[0].t - t_exact) < 1e-6, "spacing vs period");
        }
    }
}
