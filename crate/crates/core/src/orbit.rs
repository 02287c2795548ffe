//! Level-set quadrature: actions, periods, orbit averages, momentum area
//! moments and per-edge action profiles.
//!
//! Every cycle integral reduces to raw momentum moments
//! `m_j(h) = ∫ p₊(q)^j dq` over the cycle support, with
//! `p₊ = √(2(h - V))`. The substitution `q = a + (b-a)(1 - cos u)/2` on each
//! segment between turning points and interior critical locations makes the
//! integrands analytic in `u`, so Gauss–Legendre converges spectrally:
//!
//! * action        `I = m₁/π` (oscillation), `m₁/2π` (rotation branch)
//! * period        `T = 2 m₋₁` (oscillation), `m₋₁` (rotation)
//! * `Κ = I·H_I = m₁/m₋₁`
//! * `f_k = k ⟨p^{k-1}⟩ = k m_{k-2}/m₋₁`
//! * `Κ̃_k = ⟨p^k H_p⟩ / f_k = m_k/(k m_{k-2})`
//! * `F_k = m_k/π` (oscillation), `m_k/2π` (rotation period cell)

use crate::error::{Error, Result};
use crate::hamiltonian::{CriticalKind, EdgeKind, HamiltonianSpec, ReebGraph};
use crate::interp::CubicHermite;
use crate::math;
use crate::quadrature::GlCache;
use crate::special::elliptic_ke;
use alloc::vec;
use alloc::vec::Vec;

const MOMENT_TOL: f64 = 1e-11;
const MOMENT_N0: usize = 128;
const MOMENT_NMAX: usize = 1024;
const MOMENT_MAX_DEPTH: usize = 28;

/// A regular level-set component at energy `h` on a Reeb edge, cut into
/// segments whose ends are turning points or critical locations of V.
#[derive(Debug, Clone)]
pub struct LevelCycle {
    pub edge_id: usize,
    pub kind: EdgeKind,
    pub h: f64,
    /// segment boundaries, ascending; outermost are the turning points for
    /// oscillation cycles, one full period cell for rotation cycles
    pub breakpoints: Vec<f64>,
}

impl LevelCycle {
    /// Construct the cycle at energy `h` on the given edge.
    pub fn on_edge(ham: &HamiltonianSpec, graph: &ReebGraph, edge_id: usize, h: f64) -> Result<Self> {
        let edge = &graph.edges[edge_id];
        let scale = 1.0 + math::abs(h);
        if h - edge.h_lo < 1e-12 * scale || (edge.h_hi.is_finite() && edge.h_hi - h < 1e-12 * scale) {
            return Err(Error::QuadratureNonconvergence {
                what: "cycle energy too close to a critical value",
                achieved: h,
            });
        }
        if !ham.kinetic.is_quadratic() {
            return Err(Error::Domain("level-set quadrature requires the standard kinetic term"));
        }
        let crit_qs: Vec<f64> =
            graph.vertices.iter().flat_map(|v| v.locations.iter().copied()).collect();
        match edge.kind {
            EdgeKind::Oscillation => {
                let q_lo = turning_point(ham, h, edge.left_stretch, true)?;
                let q_hi = turning_point(ham, h, edge.right_stretch, false)?;
                let mut breakpoints = vec![q_lo];
                let mut inner: Vec<f64> =
                    crit_qs.iter().copied().filter(|&q| q > q_lo && q < q_hi).collect();
                inner.sort_by(|a, b| a.partial_cmp(b).unwrap());
                breakpoints.extend(inner);
                breakpoints.push(q_hi);
                Ok(LevelCycle { edge_id, kind: edge.kind, h, breakpoints })
            }
            EdgeKind::RotationUpper | EdgeKind::RotationLower => {
                let mut qs = crit_qs;
                qs.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let first = qs[0];
                let mut breakpoints = qs;
                breakpoints.push(first + math::TAU);
                Ok(LevelCycle { edge_id, kind: edge.kind, h, breakpoints })
            }
        }
    }

    fn is_rotation(&self) -> bool {
        self.kind != EdgeKind::Oscillation
    }
}

/// Root of V(q) = h inside a monotone stretch, expanding outward when the
/// stretch does not yet bracket it (root edges above the window values).
fn turning_point(ham: &HamiltonianSpec, h: f64, stretch: (f64, f64), left_side: bool) -> Result<f64> {
    let h_rel = h - ham.v_floor();
    let (mut outer, inner) = if left_side { (stretch.0, stretch.1) } else { (stretch.1, stretch.0) };
    let mut step = math::max(math::abs(inner - outer), 1.0);
    let mut tries = 0;
    while ham.v_rel(outer) <= h_rel {
        outer += if left_side { -step } else { step };
        step *= 2.0;
        tries += 1;
        if tries > 200 {
            return Err(Error::Bracketing("turning point: potential does not rise above h"));
        }
    }
    // V(inner) < h < V(outer): bisection with Newton polish
    let (mut lo, mut hi) = (inner, outer);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = ham.v_rel(x) - h_rel;
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = ham.v_prime(x);
        let newton = x - f / d;
        let (a, b) = if lo < hi { (lo, hi) } else { (hi, lo) };
        x = if d != 0.0 && newton > a && newton < b { newton } else { 0.5 * (lo + hi) };
        if math::abs(hi - lo) < 1e-15 * (1.0 + math::abs(x)) {
            break;
        }
    }
    Ok(x)
}

/// Raw moments m_j = ∫ p₊^j dq over the cycle for each j in `js`
/// (j = -1 is integrable only strictly inside an edge).
fn cycle_moments(
    ham: &HamiltonianSpec,
    cycle_h: f64,
    breakpoints: &[f64],
    js: &[i32],
    cache: &mut GlCache,
) -> Result<Vec<f64>> {
    // coarse pass fixes the absolute convergence floor: panels whose
    // refinement noise is far below the whole-cycle magnitude stop early,
    // which bounds the impact of the h - V conditioning limit near saddles
    let mut floors = vec![0.0; js.len()];
    for seg in breakpoints.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        if b - a < 1e-14 {
            continue;
        }
        let coarse = coarse_segment(ham, cycle_h, a, b, js, cache);
        for (f, c) in floors.iter_mut().zip(coarse.iter()) {
            *f += math::abs(*c);
        }
    }
    for f in floors.iter_mut() {
        *f = MOMENT_TOL * math::max(*f, 1e-300) / 8.0;
    }

    let mut out = vec![0.0; js.len()];
    let mut vals = vec![0.0; js.len()];
    for seg in breakpoints.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        if b - a < 1e-14 {
            continue;
        }
        segment_moments(ham, cycle_h, a, b, js, cache, &floors, &mut vals, 0)?;
        for (o, v) in out.iter_mut().zip(vals.iter()) {
            *o += v;
        }
    }
    Ok(out)
}

fn coarse_segment(
    ham: &HamiltonianSpec,
    h: f64,
    a: f64,
    b: f64,
    js: &[i32],
    cache: &mut GlCache,
) -> Vec<f64> {
    let h_rel = h - ham.v_floor();
    let half = 0.5 * (b - a);
    let rule = cache.rule(MOMENT_N0);
    let mut acc = vec![0.0; js.len()];
    for (x, w) in rule.nodes.iter().zip(rule.weights.iter()) {
        let u = 0.5 * math::PI * (1.0 + x);
        let s = math::sin(0.5 * u);
        let q = a + half * 2.0 * s * s;
        let jac = half * math::sin(u) * 0.5 * math::PI * w;
        let p = math::sqrt(2.0 * math::max(h_rel - ham.v_rel(q), 0.0));
        if p > 0.0 {
            for (slot, &j) in acc.iter_mut().zip(js.iter()) {
                *slot += jac * math::powi(p, j);
            }
        }
    }
    acc
}

/// Gauss–Legendre on one segment after the clustering substitution, node
/// doubling up to `MOMENT_NMAX`; if the boundary layer is still unresolved
/// (energies geometrically close to a saddle) the panel is bisected.
/// All requested powers share the p₊ evaluations.
#[allow(clippy::too_many_arguments)]
fn segment_moments(
    ham: &HamiltonianSpec,
    h: f64,
    a: f64,
    b: f64,
    js: &[i32],
    cache: &mut GlCache,
    floors: &[f64],
    out: &mut [f64],
    depth: usize,
) -> Result<()> {
    let h_rel = h - ham.v_floor();
    let half = 0.5 * (b - a);
    // conditioning of the gap h - V in f64: refinement below this noise
    // level cannot gain accuracy, only accumulate cancellation garbage
    let gap_noise = f64::EPSILON * (math::abs(h_rel) + 1.0);
    let mut prev: Option<Vec<f64>> = None;
    let mut prev_diff = f64::INFINITY;
    let mut n = MOMENT_N0;
    loop {
        let rule = cache.rule(n);
        let mut acc = vec![0.0; js.len()];
        let mut noise = vec![0.0; js.len()];
        let ulp_guard = 8.0 * f64::EPSILON * (math::abs(a) + math::abs(b) + 1.0);
        for (x, w) in rule.nodes.iter().zip(rule.weights.iter()) {
            let u = 0.5 * math::PI * (1.0 + x); // map [-1, 1] -> [0, π]
            let s = math::sin(0.5 * u);
            let c = math::cos(0.5 * u);
            let da = half * 2.0 * s * s; // offset from a, no cancellation
            let db = half * 2.0 * c * c; // offset from b
            let q = a + da;
            let jac = half * math::sin(u) * 0.5 * math::PI * w;
            let mut gap = math::max(h_rel - ham.v_rel(q), 0.0);
            if math::min(da, db) < ulp_guard {
                // node within rounding distance of an endpoint: the
                // evaluated V aliases the endpoint value, which at a turning
                // point leaves only root-residual garbage; the first-order
                // growth of h - V off the nearer end is reliable there and
                // harmless (smaller) at a regular endpoint
                let g = if da < db { -ham.v_prime(a) * da } else { ham.v_prime(b) * db };
                gap = math::max(gap, g);
            }
            let p = math::sqrt(2.0 * gap);
            if p > 0.0 {
                for ((slot, noise_slot), &j) in
                    acc.iter_mut().zip(noise.iter_mut()).zip(js.iter())
                {
                    *slot += jac * math::powi(p, j);
                    // |∂ p^j / ∂ gap| δgap = |j| p^{j-2} δgap
                    *noise_slot += math::abs(jac) * math::abs(j as f64)
                        * math::powi(p, j - 2)
                        * gap_noise;
                }
            }
        }
        if let Some(prev_acc) = &prev {
            // worst change across the requested powers, measured against the
            // panel-relative tolerance, the whole-cycle floor, and the
            // propagated conditioning noise of the gap evaluation
            let mut diff = 0.0;
            let mut converged = true;
            for (i, (new, old)) in acc.iter().zip(prev_acc.iter()).enumerate() {
                let scale = math::max(math::abs(*new), 1e-30);
                let d = math::abs(new - old);
                diff = math::max(diff, d / scale);
                if d > math::max(math::max(MOMENT_TOL * scale, floors[i]), 4.0 * noise[i]) {
                    converged = false;
                }
            }
            if converged {
                out.copy_from_slice(&acc);
                return Ok(());
            }
            // roundoff plateau: differences stopped shrinking at a small level
            if diff >= 0.25 * prev_diff && prev_diff <= 1e4 * MOMENT_TOL {
                out.copy_from_slice(prev_acc);
                return Ok(());
            }
            prev_diff = diff;
        }
        prev = Some(acc);
        n *= 2;
        if n > MOMENT_NMAX {
            break;
        }
    }
    if depth >= MOMENT_MAX_DEPTH {
        return Err(Error::QuadratureNonconvergence { what: "cycle moment", achieved: prev_diff });
    }
    let mid = 0.5 * (a + b);
    let mut left = vec![0.0; js.len()];
    let mut right = vec![0.0; js.len()];
    segment_moments(ham, h, a, mid, js, cache, floors, &mut left, depth + 1)?;
    segment_moments(ham, h, mid, b, js, cache, floors, &mut right, depth + 1)?;
    for ((o, l), r) in out.iter_mut().zip(left.iter()).zip(right.iter()) {
        *o = l + r;
    }
    Ok(())
}

/// Loop action `I = (1/2π) ∮ p dq` of the cycle.
pub fn action(ham: &HamiltonianSpec, cycle: &LevelCycle) -> Result<f64> {
    let mut cache = GlCache::new();
    let m = cycle_moments(ham, cycle.h, &cycle.breakpoints, &[1], &mut cache)?;
    Ok(if cycle.is_rotation() { m[0] / math::TAU } else { m[0] / math::PI })
}

/// Orbit period and the frequency `H_I = 2π / T`.
pub fn period(ham: &HamiltonianSpec, cycle: &LevelCycle) -> Result<(f64, f64)> {
    let mut cache = GlCache::new();
    let m = cycle_moments(ham, cycle.h, &cycle.breakpoints, &[-1], &mut cache)?;
    let t = if cycle.is_rotation() { m[0] } else { 2.0 * m[0] };
    Ok((t, math::TAU / t))
}

/// `Κ = I · H_I`, twice the orbit-averaged kinetic energy.
pub fn kappa(ham: &HamiltonianSpec, cycle: &LevelCycle) -> Result<f64> {
    let mut cache = GlCache::new();
    let m = cycle_moments(ham, cycle.h, &cycle.breakpoints, &[1, -1], &mut cache)?;
    Ok(m[0] / m[1])
}

/// Time average `(1/T) ∮ φ(q, p) dt` over one period of the cycle.
pub fn orbit_mean<F: Fn(f64, f64) -> f64>(
    ham: &HamiltonianSpec,
    cycle: &LevelCycle,
    phi: F,
) -> Result<f64> {
    let mut cache = GlCache::new();
    let h_rel = cycle.h - ham.v_floor();
    let rotation = cycle.is_rotation();
    let lower_branch = cycle.kind == EdgeKind::RotationLower;
    let mut weighted = 0.0;
    let mut time = 0.0;
    for seg in cycle.breakpoints.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        if b - a < 1e-14 {
            continue;
        }
        let w = cache.integrate_clustered(a, b, MOMENT_TOL, MOMENT_N0, MOMENT_NMAX, |q| {
            let p = math::sqrt(2.0 * math::max(h_rel - ham.v_rel(q), 0.0));
            if rotation {
                let ps = if lower_branch { -p } else { p };
                phi(q, ps) / p
            } else {
                (phi(q, p) + phi(q, -p)) / p
            }
        })?;
        let t = cache.integrate_clustered(a, b, MOMENT_TOL, MOMENT_N0, MOMENT_NMAX, |q| {
            1.0 / math::sqrt(2.0 * math::max(h_rel - ham.v_rel(q), 0.0))
        })?;
        weighted += w;
        time += if rotation { t } else { 2.0 * t };
    }
    Ok(weighted / time)
}

/// Weighted average temperature `Κ̃_k = ⟨p^k H_p⟩ / f_k`, k odd.
pub fn k_tilde(ham: &HamiltonianSpec, cycle: &LevelCycle, k: u32) -> Result<f64> {
    if k % 2 == 0 {
        return Err(Error::Domain("moment order k must be odd"));
    }
    let mut cache = GlCache::new();
    let m = cycle_moments(ham, cycle.h, &cycle.breakpoints, &[k as i32, k as i32 - 2], &mut cache)?;
    Ok(m[0] / (k as f64 * m[1]))
}

/// Momentum area moment `F_k = (1/2π) ∬ k p^{k-1} dp dq` over the region
/// enclosed by the cycle (oscillation) or its period cell (rotation).
pub fn area_moment(ham: &HamiltonianSpec, cycle: &LevelCycle, k: u32) -> Result<f64> {
    if k % 2 == 0 {
        return Err(Error::Domain("moment order k must be odd"));
    }
    let mut cache = GlCache::new();
    let m = cycle_moments(ham, cycle.h, &cycle.breakpoints, &[k as i32], &mut cache)?;
    Ok(if cycle.is_rotation() { m[0] / math::TAU } else { m[0] / math::PI })
}

/// Grid specification for [`build_profile`].
#[derive(Debug, Clone)]
pub struct GridSpec {
    /// interior grid points
    pub n_interior: usize,
    /// geometric refinement points per finite vertex end
    pub n_geo: usize,
    /// offset of the outermost geometric point, as a fraction of the span
    pub geo_frac: f64,
    /// upper cap for unbounded edges
    pub h_cap: Option<f64>,
    /// odd moment orders tabulated in the profile
    pub ks: Vec<u32>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { n_interior: 41, n_geo: 14, geo_frac: 0.05, h_cap: None, ks: vec![1, 3, 5, 7, 9] }
    }
}

/// Richardson-extrapolated column limits at one vertex end of an edge.
#[derive(Debug, Clone)]
pub struct VertexEnd {
    pub h: f64,
    pub action: f64,
    pub h_i: f64,
    pub kappa: f64,
    /// (k, limit, error estimate) per tabulated k
    pub ktilde: Vec<(u32, f64, f64)>,
}

impl VertexEnd {
    pub fn ktilde_limit(&self, k: u32) -> Option<f64> {
        self.ktilde.iter().find(|(kk, _, _)| *kk == k).map(|(_, v, _)| *v)
    }
}

/// Tabulated `h ↦ (I, H_I, Κ, f_k, Κ̃_k, F_k)` on one Reeb edge with
/// monotone-cubic interpolants and vertex-limit extrapolations.
#[derive(Debug, Clone)]
pub struct ActionProfile {
    pub edge_id: usize,
    pub kind: EdgeKind,
    pub h: Vec<f64>,
    pub ks: Vec<u32>,
    pub vertex_lo: VertexEnd,
    pub vertex_hi: Option<VertexEnd>,
    action: CubicHermite,
    h_i: CubicHermite,
    kappa: CubicHermite,
    f: Vec<CubicHermite>,
    ktilde: Vec<CubicHermite>,
    fcap: Vec<CubicHermite>,
}

impl ActionProfile {
    pub fn h_min(&self) -> f64 {
        self.h[0]
    }

    pub fn h_max(&self) -> f64 {
        self.h[self.h.len() - 1]
    }

    pub fn contains(&self, h: f64) -> bool {
        h >= self.h_min() && h <= self.h_max()
    }

    pub fn action_of_h(&self, h: f64) -> f64 {
        self.action.eval(h)
    }

    /// dI/dh (equals 1/H_I at the nodes by construction).
    pub fn action_deriv(&self, h: f64) -> f64 {
        self.action.deriv(h)
    }

    pub fn h_of_action(&self, i: f64) -> Result<f64> {
        self.action.invert(i)
    }

    pub fn action_range(&self) -> (f64, f64) {
        (self.action_of_h(self.h_min()), self.action_of_h(self.h_max()))
    }

    pub fn h_i_of_h(&self, h: f64) -> f64 {
        self.h_i.eval(h)
    }

    pub fn kappa_of_h(&self, h: f64) -> f64 {
        self.kappa.eval(h)
    }

    pub fn kappa_deriv(&self, h: f64) -> f64 {
        self.kappa.deriv(h)
    }

    fn k_index(&self, k: u32) -> Result<usize> {
        self.ks
            .iter()
            .position(|&kk| kk == k)
            .ok_or(Error::Domain("moment order k not tabulated in this profile"))
    }

    pub fn f_of_h(&self, k: u32, h: f64) -> Result<f64> {
        Ok(self.f[self.k_index(k)?].eval(h))
    }

    pub fn ktilde_of_h(&self, k: u32, h: f64) -> Result<f64> {
        Ok(self.ktilde[self.k_index(k)?].eval(h))
    }

    pub fn ktilde_deriv(&self, k: u32, h: f64) -> Result<f64> {
        Ok(self.ktilde[self.k_index(k)?].deriv(h))
    }

    pub fn fcap_of_h(&self, k: u32, h: f64) -> Result<f64> {
        Ok(self.fcap[self.k_index(k)?].eval(h))
    }

    pub fn fcap_deriv(&self, k: u32, h: f64) -> Result<f64> {
        Ok(self.fcap[self.k_index(k)?].deriv(h))
    }

    /// Raw column values at `h`, in CSV order (I, H_I, K, f.., Ktilde.., F..).
    pub fn row(&self, h: f64) -> Vec<f64> {
        let mut row = vec![self.action.eval(h), self.h_i.eval(h), self.kappa.eval(h)];
        for c in &self.f {
            row.push(c.eval(h));
        }
        for c in &self.ktilde {
            row.push(c.eval(h));
        }
        for c in &self.fcap {
            row.push(c.eval(h));
        }
        row
    }
}

/// Geometric tails toward each finite vertex plus spread interior points;
/// unbounded edges are capped and log-spaced.
fn profile_grid(h_lo: f64, h_hi: f64, spec: &GridSpec) -> Result<Vec<f64>> {
    let bounded = h_hi.is_finite();
    let top = if bounded {
        h_hi
    } else {
        spec.h_cap.ok_or(Error::Domain("unbounded edge requires a grid cap"))?
    };
    if top <= h_lo {
        return Err(Error::Domain("grid cap must exceed the lower edge value"));
    }
    let span = top - h_lo;
    let delta = spec.geo_frac * span;
    let mut grid = Vec::new();
    for j in (0..=spec.n_geo).rev() {
        grid.push(h_lo + delta / math::powi(2.0, j as i32));
    }
    if bounded {
        let inner_lo = h_lo + delta;
        let inner_hi = top - delta;
        for i in 1..spec.n_interior {
            let t = i as f64 / spec.n_interior as f64;
            grid.push(inner_lo + t * (inner_hi - inner_lo));
        }
        for j in 0..=spec.n_geo {
            grid.push(top - delta / math::powi(2.0, j as i32));
        }
    } else {
        let t0 = math::ln(delta);
        let t1 = math::ln(span);
        for i in 1..=spec.n_interior {
            let t = t0 + (t1 - t0) * i as f64 / spec.n_interior as f64;
            grid.push(h_lo + math::exp(t));
        }
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup_by(|a, b| math::abs(*a - *b) < 1e-14 * (1.0 + math::abs(*b)));
    Ok(grid)
}

/// Iterated Richardson extrapolation (ratio 2) on the last four values of a
/// geometric tail ordered farthest-to-closest; returns (limit, error
/// estimate). Two levels cancel `c₁ Δ + c₂ Δ ln Δ` exactly, which is the
/// saddle-end behaviour of the smooth columns.
fn richardson_limit(tail: &[f64]) -> (f64, f64) {
    let n = tail.len();
    debug_assert!(n >= 4);
    let x = &tail[n - 4..];
    let r1 = [2.0 * x[1] - x[0], 2.0 * x[2] - x[1], 2.0 * x[3] - x[2]];
    let r2 = [2.0 * r1[1] - r1[0], 2.0 * r1[2] - r1[1]];
    let r3 = 2.0 * r2[1] - r2[0];
    (r3, math::abs(r3 - r2[1]))
}

/// Build the action profile of one Reeb edge.
pub fn build_profile(
    ham: &HamiltonianSpec,
    graph: &ReebGraph,
    edge_id: usize,
    spec: &GridSpec,
) -> Result<ActionProfile> {
    let edge = &graph.edges[edge_id];
    let grid = profile_grid(edge.h_lo, edge.h_hi, spec)?;
    let nk = spec.ks.len();
    for &k in &spec.ks {
        if k % 2 == 0 {
            return Err(Error::Domain("moment orders must be odd"));
        }
    }

    // moment orders shared across columns: -1, 1, and per k: k-2, k
    let mut js: Vec<i32> = vec![-1, 1];
    for &k in &spec.ks {
        for j in [k as i32 - 2, k as i32] {
            if !js.contains(&j) {
                js.push(j);
            }
        }
    }
    let jpos = |j: i32| js.iter().position(|&x| x == j).unwrap();

    let mut cache = GlCache::new();
    let n = grid.len();
    let mut col_i = Vec::with_capacity(n);
    let mut col_didh = Vec::with_capacity(n);
    let mut col_hi = Vec::with_capacity(n);
    let mut col_kappa = Vec::with_capacity(n);
    let mut col_f = vec![Vec::with_capacity(n); nk];
    let mut col_kt = vec![Vec::with_capacity(n); nk];
    let mut col_fcap = vec![Vec::with_capacity(n); nk];
    let mut col_fcap_d = vec![Vec::with_capacity(n); nk];

    let circ = if edge.kind == EdgeKind::Oscillation { math::PI } else { math::TAU };
    for &h in &grid {
        let cycle = LevelCycle::on_edge(ham, graph, edge_id, h)?;
        let m = cycle_moments(ham, h, &cycle.breakpoints, &js, &mut cache)?;
        let m_t = m[jpos(-1)];
        let m_1 = m[jpos(1)];
        let t_orbit = if edge.kind == EdgeKind::Oscillation { 2.0 * m_t } else { m_t };
        let h_i = math::TAU / t_orbit;
        col_i.push(m_1 / circ);
        col_didh.push(1.0 / h_i);
        col_hi.push(h_i);
        col_kappa.push(m_1 / m_t);
        for (ik, &k) in spec.ks.iter().enumerate() {
            let mk = m[jpos(k as i32)];
            let mk2 = m[jpos(k as i32 - 2)];
            col_f[ik].push(k as f64 * mk2 / m_t);
            col_kt[ik].push(mk / (k as f64 * mk2));
            col_fcap[ik].push(mk / circ);
            col_fcap_d[ik].push(k as f64 * mk2 / circ);
        }
    }

    for w in col_i.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::ProfileInconsistency { what: "I(h) monotone", defect: w[1] - w[0] });
        }
    }

    let action = CubicHermite::with_slopes(grid.clone(), col_i.clone(), col_didh.clone(), true)?;
    let h_i_interp = CubicHermite::pchip(grid.clone(), col_hi.clone())?;
    let kappa_interp = CubicHermite::pchip(grid.clone(), col_kappa.clone())?;
    let mut f_interp = Vec::with_capacity(nk);
    let mut kt_interp = Vec::with_capacity(nk);
    let mut fcap_interp = Vec::with_capacity(nk);
    for ik in 0..nk {
        f_interp.push(CubicHermite::pchip(grid.clone(), col_f[ik].clone())?);
        kt_interp.push(CubicHermite::pchip(grid.clone(), col_kt[ik].clone())?);
        fcap_interp.push(CubicHermite::with_slopes(
            grid.clone(),
            col_fcap[ik].clone(),
            col_fcap_d[ik].clone(),
            true,
        )?);
    }

    // cross-checks: increments of the directly integrated columns against
    // fresh quadratures of the derivative identities dI/dh = 1/H_I and
    // dF_k/dh = f_k/H_I, sampled on a handful of interior intervals
    let n_geo = spec.n_geo;
    let interior: Vec<usize> = ((n_geo + 1)..n.saturating_sub(n_geo + 2)).collect();
    let gl7 = crate::quadrature::GlRule::new(7);
    let stride = math::max(1.0, interior.len() as f64 / 5.0) as usize;
    for &i in interior.iter().step_by(stride) {
        let (ha, hb) = (grid[i], grid[i + 1]);
        // at each sub-node, 1/H_I = m₋₁·(2 or 1)/2π and f_k/H_I = k m_{k-2}/circ
        let mut from_period = 0.0;
        let mut from_f = vec![0.0; nk];
        let c = 0.5 * (ha + hb);
        let half_w = 0.5 * (hb - ha);
        for (x, w) in gl7.nodes.iter().zip(gl7.weights.iter()) {
            let h = c + half_w * x;
            let cycle = LevelCycle::on_edge(ham, graph, edge_id, h)?;
            let m = cycle_moments(ham, h, &cycle.breakpoints, &js, &mut cache)?;
            let t_orb = if edge.kind == EdgeKind::Oscillation { 2.0 * m[jpos(-1)] } else { m[jpos(-1)] };
            from_period += w * half_w * t_orb / math::TAU;
            for (ik, &k) in spec.ks.iter().enumerate() {
                from_f[ik] += w * half_w * k as f64 * m[jpos(k as i32 - 2)] / circ;
            }
        }
        let delta_i = col_i[i + 1] - col_i[i];
        if math::rel_diff(delta_i, from_period) > 1e-5 {
            return Err(Error::ProfileInconsistency {
                what: "dI/dh vs 1/H_I",
                defect: math::rel_diff(delta_i, from_period),
            });
        }
        for ik in 0..nk {
            let delta_f = col_fcap[ik][i + 1] - col_fcap[ik][i];
            if math::rel_diff(delta_f, from_f[ik]) > 1e-5 {
                return Err(Error::ProfileInconsistency {
                    what: "dF_k/dI vs f_k",
                    defect: math::rel_diff(delta_f, from_f[ik]),
                });
            }
        }
    }

    // vertex limits from the geometric tails, ordered farthest-to-closest
    let tail_lo = |col: &[f64]| -> Vec<f64> {
        (0..=n_geo).rev().map(|i| col[i]).collect()
    };
    let tail_hi = |col: &[f64]| -> Vec<f64> {
        ((n - n_geo - 1)..n).map(|i| col[i]).collect()
    };
    let lower_kind = graph.vertices[edge.lower_vertex].kind;
    let vertex_lo = vertex_limits(
        edge.h_lo,
        lower_kind,
        &tail_lo(&col_i),
        &tail_lo(&col_hi),
        &tail_lo(&col_kappa),
        &col_kt.iter().map(|c| tail_lo(c)).collect::<Vec<_>>(),
        &spec.ks,
    );
    let vertex_hi = edge.upper_vertex.map(|uv| {
        vertex_limits(
            edge.h_hi,
            graph.vertices[uv].kind,
            &tail_hi(&col_i),
            &tail_hi(&col_hi),
            &tail_hi(&col_kappa),
            &col_kt.iter().map(|c| tail_hi(c)).collect::<Vec<_>>(),
            &spec.ks,
        )
    });

    Ok(ActionProfile {
        edge_id,
        kind: edge.kind,
        h: grid,
        ks: spec.ks.clone(),
        vertex_lo,
        vertex_hi,
        action,
        h_i: h_i_interp,
        kappa: kappa_interp,
        f: f_interp,
        ktilde: kt_interp,
        fcap: fcap_interp,
    })
}

fn vertex_limits(
    h_v: f64,
    kind: CriticalKind,
    tail_i: &[f64],
    tail_hi: &[f64],
    tail_kappa: &[f64],
    tail_kt: &[Vec<f64>],
    ks: &[u32],
) -> VertexEnd {
    let (i_lim, _) = richardson_limit(tail_i);
    let (hi_lim, _) = richardson_limit(tail_hi);
    let (kappa_lim, _) = richardson_limit(tail_kappa);
    let saddle = kind == CriticalKind::Saddle;
    let mut ktilde = Vec::with_capacity(ks.len());
    for (ik, &k) in ks.iter().enumerate() {
        let (raw, err) = richardson_limit(&tail_kt[ik]);
        // Κ̃_1 = Κ vanishes on the whole vertex set; higher Κ̃_k vanish at
        // minima and keep their finite extrapolated limit at saddles.
        let lim = if k == 1 || kind == CriticalKind::Minimum { 0.0 } else { raw };
        ktilde.push((k, lim, err));
    }
    VertexEnd {
        h: h_v,
        action: i_lim,
        h_i: if saddle { 0.0 } else { hi_lim },
        kappa: if saddle { 0.0 } else { kappa_lim },
        ktilde,
    }
}

/// Closed forms for the planar pendulum `H = p²/2 - cos q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PendulumClosedForm {
    pub action: f64,
    pub h_i: f64,
    pub kappa: f64,
}

/// Oscillation (`-1 < h < 1`, modulus `m² = (1+h)/2`):
/// `I = (8/π)(E - (1-m²)K)`, `H_I = π/(2K)`, `Κ = 4(E - (1-m²)K)/K`.
/// Rotation branch (`h > 1`, modulus `m² = 2/(1+h)`):
/// `I = 4E/(πm)`, `H_I = π/(mK)`, `Κ = 4E/(m²K)`.
///
/// The quadrature engine is the arbiter for these; `docs/pendulum-elliptic.md`
/// records the convention check that pinned them.
pub fn pendulum_closed_forms(h: f64) -> Result<PendulumClosedForm> {
    if math::abs(h - 1.0) < 1e-14 || math::abs(h + 1.0) < 1e-14 {
        return Err(Error::Domain("pendulum closed forms are singular at h = ±1"));
    }
    if h < -1.0 {
        return Err(Error::Domain("pendulum energies start at h = -1"));
    }
    if h < 1.0 {
        let m = math::sqrt(0.5 * (1.0 + h));
        let p = elliptic_ke(m)?;
        let combo = p.second - (1.0 - m * m) * p.first;
        Ok(PendulumClosedForm {
            action: 8.0 / math::PI * combo,
            h_i: math::PI / (2.0 * p.first),
            kappa: 4.0 * combo / p.first,
        })
    } else {
        let m = math::sqrt(2.0 / (1.0 + h));
        let p = elliptic_ke(m)?;
        Ok(PendulumClosedForm {
            action: 4.0 * p.second / (math::PI * m),
            h_i: math::PI / (m * p.first),
            kappa: 4.0 * p.second / (m * m * p.first),
        })
    }
}
