//! Adaptive embedded Runge–Kutta integration (Dormand–Prince 5(4)) with
//! free 4th-order dense output and event (section-crossing) detection.
//!
//! The stepper advances one accepted step at a time and hands back the
//! dense interpolant for that step, so long orbits (Poincaré scans) run in
//! constant memory; [`integrate`] collects the steps into a [`Trajectory`]
//! when the whole path is wanted.

use crate::error::{Error, Result};
use crate::math;
use alloc::vec::Vec;

#[derive(Debug, Clone)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    /// integration aborts with `StateEscape` beyond this norm
    pub escape_norm: f64,
    /// no step acceptance below this fraction of the span
    pub min_step_frac: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rtol: 1e-10,
            atol: 1e-12,
            max_step: f64::INFINITY,
            escape_norm: 1e8,
            min_step_frac: 1e-14,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tol(rtol: f64, atol: f64) -> Self {
        IntegratorConfig { rtol, atol, ..IntegratorConfig::default() }
    }
}

// Dormand–Prince 5(4) tableau
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// error weights b - b*
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// dense-output weights
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// One accepted step with its quartic interpolant.
#[derive(Debug, Clone)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub t1: f64,
    rcont: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    /// Evaluate the dense output at `t` in `[t0, t1]`.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let h = self.t1 - self.t0;
        let theta = if h == 0.0 { 0.0 } else { (t - self.t0) / h };
        let theta1 = 1.0 - theta;
        let mut y = [0.0; N];
        for i in 0..N {
            y[i] = self.rcont[0][i]
                + theta
                    * (self.rcont[1][i]
                        + theta1
                            * (self.rcont[2][i]
                                + theta * (self.rcont[3][i] + theta1 * self.rcont[4][i])));
        }
        y
    }

    pub fn y0(&self) -> [f64; N] {
        self.rcont[0]
    }

    pub fn y1(&self) -> [f64; N] {
        self.eval(self.t1)
    }
}

/// One raw Dormand–Prince step from `(t, y)` with step `h`.
///
/// Returns the 5th-order solution, the embedded error estimate, and the
/// stage slopes needed for dense output; `k1` must be `f(t, y)` (FSAL).
#[allow(clippy::type_complexity)]
pub fn dp54_step<F, const N: usize>(
    f: &mut F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
) -> ([f64; N], [f64; N], [f64; N], [[f64; N]; 5])
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut stage = |coeffs: &[(f64, [f64; N])], c: f64| -> [f64; N] {
        let mut arg = *y;
        for (a, k) in coeffs {
            for i in 0..N {
                arg[i] += h * a * k[i];
            }
        }
        f(t + c * h, &arg)
    };
    let k2 = stage(&[(A21, *k1)], 1.0 / 5.0);
    let k3 = stage(&[(A31, *k1), (A32, k2)], 3.0 / 10.0);
    let k4 = stage(&[(A41, *k1), (A42, k2), (A43, k3)], 4.0 / 5.0);
    let k5 = stage(&[(A51, *k1), (A52, k2), (A53, k3), (A54, k4)], 8.0 / 9.0);
    let k6 = stage(&[(A61, *k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)], 1.0);
    let mut y1 = [0.0; N];
    for i in 0..N {
        y1[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
    }
    let k7 = f(t + h, &y1);
    let mut err = [0.0; N];
    for i in 0..N {
        err[i] = h
            * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    // dense output coefficients
    let mut rcont = [[0.0; N]; 5];
    for i in 0..N {
        let ydiff = y1[i] - y[i];
        let bspl = h * k1[i] - ydiff;
        rcont[0][i] = y[i];
        rcont[1][i] = ydiff;
        rcont[2][i] = bspl;
        rcont[3][i] = ydiff - h * k7[i] - bspl;
        rcont[4][i] = h
            * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
    }
    (y1, err, k7, rcont)
}

/// Single-use adaptive stepper from `t0` to `t_end` (forward or backward).
pub struct Stepper<F, const N: usize> {
    f: F,
    cfg: IntegratorConfig,
    t: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    t_end: f64,
    dir: f64,
    span: f64,
}

impl<F, const N: usize> Stepper<F, N>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    pub fn new(mut f: F, t0: f64, y0: [f64; N], t_end: f64, cfg: IntegratorConfig) -> Self {
        let k1 = f(t0, &y0);
        let span = math::abs(t_end - t0);
        let dir = if t_end >= t0 { 1.0 } else { -1.0 };
        // small initial step; the controller recovers the right scale fast
        let mut fnorm = 0.0;
        let mut ynorm = 0.0;
        for i in 0..N {
            fnorm = math::max(fnorm, math::abs(k1[i]));
            ynorm = math::max(ynorm, math::abs(y0[i]));
        }
        let h0 = math::min(
            math::min(0.01 * (ynorm + 1.0) / (fnorm + 1e-10), 0.1 * span),
            cfg.max_step,
        );
        Stepper { f, cfg, t: t0, y: y0, k1, h: dir * math::max(h0, 1e-12 * span), t_end, dir, span }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    pub fn done(&self) -> bool {
        (self.t_end - self.t) * self.dir <= 0.0
    }

    /// Advance one accepted step; the returned interpolant covers it.
    pub fn step(&mut self) -> Result<DenseStep<N>> {
        if self.done() {
            return Err(Error::NoCrossing);
        }
        let h_min = self.cfg.min_step_frac * self.span;
        loop {
            let mut h = self.h;
            if math::abs(h) > self.cfg.max_step {
                h = self.dir * self.cfg.max_step;
            }
            if (self.t + h - self.t_end) * self.dir > 0.0 {
                h = self.t_end - self.t;
            }
            if math::abs(h) < h_min {
                return Err(Error::StepUnderflow { t: self.t });
            }
            let (y1, err, k7, rcont) = dp54_step(&mut self.f, self.t, &self.y, &self.k1, h);
            // RMS of the componentwise scaled error
            let mut err_norm = 0.0;
            for i in 0..N {
                let sc = self.cfg.atol
                    + self.cfg.rtol * math::max(math::abs(self.y[i]), math::abs(y1[i]));
                err_norm += (err[i] / sc) * (err[i] / sc);
            }
            err_norm = math::sqrt(err_norm / N as f64);
            let factor = if err_norm > 0.0 {
                math::min(5.0, math::max(0.2, 0.9 * math::powf(err_norm, -0.2)))
            } else {
                5.0
            };
            if err_norm <= 1.0 {
                let step = DenseStep { t0: self.t, t1: self.t + h, rcont };
                self.t += h;
                self.y = y1;
                self.k1 = k7;
                self.h = h * factor;
                let mut norm = 0.0;
                for v in &self.y {
                    norm = math::max(norm, math::abs(*v));
                }
                if norm > self.cfg.escape_norm {
                    return Err(Error::StateEscape { t: self.t });
                }
                return Ok(step);
            }
            self.h = h * math::min(factor, 1.0);
        }
    }
}

/// Full trajectory with dense output on every accepted step.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub steps: Vec<DenseStep<N>>,
    pub t0: f64,
    pub t_end: f64,
    pub y_end: [f64; N],
}

impl<const N: usize> Trajectory<N> {
    pub fn eval(&self, t: f64) -> [f64; N] {
        if self.steps.is_empty() {
            return self.y_end;
        }
        let forward = self.t_end >= self.t0;
        let mut lo = 0usize;
        let mut hi = self.steps.len() - 1;
        while lo < hi {
            let mid = (lo + hi) / 2;
            let after = if forward { self.steps[mid].t1 < t } else { self.steps[mid].t1 > t };
            if after {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        self.steps[lo].eval(t)
    }
}

/// Integrate from `t0` to `t_end`, collecting dense output.
pub fn integrate<F, const N: usize>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut stepper = Stepper::new(f, t0, y0, t_end, cfg.clone());
    let mut steps = Vec::new();
    while !stepper.done() {
        steps.push(stepper.step()?);
    }
    Ok(Trajectory { steps, t0, t_end, y_end: *stepper.y() })
}

/// Crossing direction for event functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
    Any,
}

impl Direction {
    fn matches(&self, g0: f64, g1: f64) -> bool {
        match self {
            Direction::Up => g0 < 0.0 && g1 >= 0.0,
            Direction::Down => g0 > 0.0 && g1 <= 0.0,
            Direction::Any => g0 * g1 <= 0.0 && g0 != g1,
        }
    }
}

/// Locate `g(t, x(t)) = 0` inside one dense step: bisection to bracket,
/// Newton on the interpolant to polish, 60-iteration cap.
pub fn find_crossing_in_step<G, const N: usize>(
    step: &DenseStep<N>,
    g: &G,
    direction: Direction,
) -> Option<(f64, [f64; N])>
where
    G: Fn(f64, &[f64; N]) -> f64,
{
    let g0 = g(step.t0, &step.eval(step.t0));
    let g1 = g(step.t1, &step.eval(step.t1));
    if !direction.matches(g0, g1) {
        return None;
    }
    let (mut lo, mut hi) = (step.t0, step.t1);
    let mut glo = g0;
    let mut t = 0.5 * (lo + hi);
    let scale = math::max(math::abs(g0), math::abs(g1)) + 1e-300;
    for _ in 0..60 {
        let x = step.eval(t);
        let gt = g(t, &x);
        if math::abs(gt) <= 1e-12 * scale {
            return Some((t, x));
        }
        if (gt > 0.0) == (glo > 0.0) {
            lo = t;
            glo = gt;
        } else {
            hi = t;
        }
        // secant/Newton estimate from a small finite difference on the
        // interpolant, falling back to bisection when it leaves the bracket
        let dt = 1e-7 * (step.t1 - step.t0);
        let gp = (g(t + dt, &step.eval(t + dt)) - gt) / dt;
        let newton = t - gt / gp;
        let (a, b) = if lo < hi { (lo, hi) } else { (hi, lo) };
        t = if gp != 0.0 && newton > a && newton < b { newton } else { 0.5 * (lo + hi) };
    }
    let x = step.eval(t);
    Some((t, x))
}

/// Find the first crossing of `g` along a stored trajectory.
pub fn find_crossing<G, const N: usize>(
    traj: &Trajectory<N>,
    g: &G,
    direction: Direction,
) -> Result<(f64, [f64; N])>
where
    G: Fn(f64, &[f64; N]) -> f64,
{
    for step in &traj.steps {
        if let Some(hit) = find_crossing_in_step(step, g, direction) {
            return Ok(hit);
        }
    }
    Err(Error::NoCrossing)
}
