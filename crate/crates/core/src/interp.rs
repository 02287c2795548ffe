//! Piecewise-cubic Hermite interpolation.
//!
//! Two slope sources share one evaluator: shape-preserving slopes in the
//! style of Fritsch–Carlson (monotone data stays monotone), or caller
//! supplied slopes when the derivative is known analytically.

use crate::error::{Error, Result};
use crate::math;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq)]
pub struct CubicHermite {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicHermite {
    /// Shape-preserving interpolant of `(x, y)`; `x` strictly increasing.
    pub fn pchip(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let m = pchip_slopes(&x, &y)?;
        Ok(CubicHermite { x, y, m })
    }

    /// Hermite interpolant with caller-supplied nodal slopes.
    ///
    /// If `limit` is set, slopes are clamped to three times the adjacent
    /// secants so monotone data yields a monotone interpolant.
    pub fn with_slopes(x: Vec<f64>, y: Vec<f64>, mut m: Vec<f64>, limit: bool) -> Result<Self> {
        check_grid(&x)?;
        if y.len() != x.len() || m.len() != x.len() {
            return Err(Error::Domain("interpolation arrays must have equal length"));
        }
        if limit {
            let n = x.len();
            for i in 0..n {
                let dl = if i > 0 { (y[i] - y[i - 1]) / (x[i] - x[i - 1]) } else { f64::INFINITY };
                let dr = if i + 1 < n { (y[i + 1] - y[i]) / (x[i + 1] - x[i]) } else { f64::INFINITY };
                let cap = 3.0 * math::min(math::abs(dl), math::abs(dr));
                if math::abs(m[i]) > cap {
                    m[i] = cap * if m[i] < 0.0 { -1.0 } else { 1.0 };
                }
            }
        }
        Ok(CubicHermite { x, y, m })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x_min(&self) -> f64 {
        self.x[0]
    }

    pub fn x_max(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    pub fn nodes(&self) -> (&[f64], &[f64]) {
        (&self.x, &self.y)
    }

    fn segment(&self, x: f64) -> usize {
        let n = self.x.len();
        if x <= self.x[0] {
            return 0;
        }
        if x >= self.x[n - 2] {
            return n - 2;
        }
        let mut lo = 0usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.x[mid] <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Evaluate; outside the grid the end cubic is extended.
    pub fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.x[i + 1] - self.x[i];
        let t = (x - self.x[i]) / h;
        let (h00, h10, h01, h11) = hermite_basis(t);
        h00 * self.y[i] + h10 * h * self.m[i] + h01 * self.y[i + 1] + h11 * h * self.m[i + 1]
    }

    /// First derivative of the interpolant.
    pub fn deriv(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.x[i + 1] - self.x[i];
        let t = (x - self.x[i]) / h;
        let (d00, d10, d01, d11) = hermite_basis_deriv(t);
        (d00 * self.y[i] + d01 * self.y[i + 1]) / h + d10 * self.m[i] + d11 * self.m[i + 1]
    }

    /// Invert a strictly monotone interpolant: find x with eval(x) = y.
    pub fn invert(&self, y: f64) -> Result<f64> {
        let n = self.x.len();
        let increasing = self.y[n - 1] > self.y[0];
        let (y_lo, y_hi) = if increasing { (self.y[0], self.y[n - 1]) } else { (self.y[n - 1], self.y[0]) };
        let span = y_hi - y_lo;
        if y < y_lo - 1e-12 * span || y > y_hi + 1e-12 * span {
            return Err(Error::OutOfRange { what: "inverse interpolation target", value: y });
        }
        let mut lo = self.x[0];
        let mut hi = self.x[n - 1];
        let mut x = 0.5 * (lo + hi);
        for _ in 0..120 {
            let f = self.eval(x) - y;
            let rising = f > 0.0;
            if rising == increasing {
                hi = x;
            } else {
                lo = x;
            }
            let d = self.deriv(x);
            let newton = x - f / d;
            x = if d != 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo < 1e-15 * (math::abs(x) + 1.0) {
                break;
            }
        }
        Ok(x)
    }
}

fn check_grid(x: &[f64]) -> Result<()> {
    if x.len() < 2 {
        return Err(Error::Domain("interpolation needs at least two nodes"));
    }
    for w in x.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Domain("interpolation grid must be strictly increasing"));
        }
    }
    Ok(())
}

fn hermite_basis(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    (
        2.0 * t3 - 3.0 * t2 + 1.0,
        t3 - 2.0 * t2 + t,
        -2.0 * t3 + 3.0 * t2,
        t3 - t2,
    )
}

fn hermite_basis_deriv(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    (
        6.0 * t2 - 6.0 * t,
        3.0 * t2 - 4.0 * t + 1.0,
        -6.0 * t2 + 6.0 * t,
        3.0 * t2 - 2.0 * t,
    )
}

/// Fritsch–Butland slopes: weighted harmonic-mean interior slopes, zero at
/// local extrema of the data, one-sided three-point estimates at the ends.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    check_grid(x)?;
    if y.len() != x.len() {
        return Err(Error::Domain("interpolation arrays must have equal length"));
    }
    let n = x.len();
    let mut d = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        d.push((y[i + 1] - y[i]) / (x[i + 1] - x[i]));
    }
    if n == 2 {
        return Ok(alloc::vec![d[0], d[0]]);
    }
    let mut m = alloc::vec![0.0; n];
    for i in 1..n - 1 {
        if d[i - 1] * d[i] <= 0.0 {
            m[i] = 0.0;
        } else {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            let w1 = 2.0 * h1 + h0;
            let w2 = h1 + 2.0 * h0;
            m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    m[0] = end_slope(x[1] - x[0], x[2] - x[1], d[0], d[1]);
    m[n - 1] = end_slope(x[n - 1] - x[n - 2], x[n - 2] - x[n - 3], d[n - 2], d[n - 3]);
    Ok(m)
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    // standard PCHIP non-centered boundary rule with monotonicity clamps
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m * d0 <= 0.0 {
        0.0
    } else if d0 * d1 < 0.0 && math::abs(m) > 3.0 * math::abs(d0) {
        3.0 * d0
    } else {
        m
    }
}
