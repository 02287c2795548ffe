//! Gauss–Legendre quadrature with node doubling and endpoint-clustering
//! substitutions for integrands with square-root turning points.

use crate::error::{Error, Result};
use crate::math;
use alloc::vec::Vec;

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GlRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GlRule {
    /// Newton iteration on P_n with the classic asymptotic initial guess.
    pub fn new(n: usize) -> Self {
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = math::cos(math::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if math::abs(dx) < 1e-15 {
                    break;
                }
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GlRule { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(self.weights.iter()) {
            s += w * f(c + h * x);
        }
        s * h
    }
}

/// Value and derivative of the Legendre polynomial P_n at x.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Small cache of rules keyed by node count; profiles reuse a handful of
/// sizes, so a linear scan is fine.
#[derive(Debug, Default)]
pub struct GlCache {
    rules: Vec<(usize, GlRule)>,
}

impl GlCache {
    pub fn new() -> Self {
        GlCache { rules: Vec::new() }
    }

    pub fn rule(&mut self, n: usize) -> &GlRule {
        if let Some(pos) = self.rules.iter().position(|(m, _)| *m == n) {
            return &self.rules[pos].1;
        }
        self.rules.push((n, GlRule::new(n)));
        &self.rules.last().unwrap().1
    }

    /// Integrate with node doubling from `n0` until the relative change is
    /// below `tol` (or `n_max` is reached). A roundoff plateau — successive
    /// differences no longer shrinking while already small — is accepted,
    /// since doubling past it only accumulates cancellation noise.
    pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
        &mut self,
        a: f64,
        b: f64,
        tol: f64,
        n0: usize,
        n_max: usize,
        mut f: F,
    ) -> Result<f64> {
        let mut n = n0;
        let mut prev = self.rule(n).integrate(a, b, &mut f);
        let mut prev_diff = f64::INFINITY;
        loop {
            n *= 2;
            if n > n_max {
                return Err(Error::QuadratureNonconvergence {
                    what: "node-doubling integral",
                    achieved: prev_diff,
                });
            }
            let val = self.rule(n).integrate(a, b, &mut f);
            let scale = math::max(math::abs(val), 1e-30);
            let diff = math::abs(val - prev);
            if diff <= tol * scale {
                return Ok(val);
            }
            if diff >= 0.25 * prev_diff && prev_diff <= 1e4 * tol * scale {
                return Ok(prev);
            }
            prev = val;
            prev_diff = diff;
        }
    }

    /// Integrate `f` over [a, b] after the substitution
    /// `x = a + (b-a)(1 - cos u)/2`, which clusters nodes quadratically at
    /// both endpoints and turns square-root endpoint behaviour analytic.
    pub fn integrate_clustered<F: FnMut(f64) -> f64>(
        &mut self,
        a: f64,
        b: f64,
        tol: f64,
        n0: usize,
        n_max: usize,
        mut f: F,
    ) -> Result<f64> {
        let half = 0.5 * (b - a);
        self.integrate_adaptive(0.0, math::PI, tol, n0, n_max, |u| {
            // 1 - cos u = 2 sin²(u/2), exact near the endpoints
            let s = math::sin(0.5 * u);
            let x = a + half * 2.0 * s * s;
            f(x) * half * math::sin(u)
        })
    }
}
