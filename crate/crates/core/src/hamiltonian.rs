//! 1-degree-of-freedom Hamiltonian families, their critical structure, and
//! the Reeb graph of level-set components.
//!
//! A Hamiltonian here is `H(q, p) = F(p) + V(q)` with `F` either the
//! standard kinetic term `p²/2` or an even profile, and `V` one of a small
//! set of proper potentials on the line or the circle. Level sets of a
//! proper `H` with only minima and saddles organize into a finite tree (two
//! unbounded branches on the circle): vertices are critical components,
//! edges are intervals of regular energies.

use crate::error::{Error, Result};
use crate::math;
use alloc::vec;
use alloc::vec::Vec;

/// Kinetic energy: `p²/2`, or an even polynomial profile `Σ c_j p^{2j}`
/// (j ≥ 1) with `F(0) = 0` and `F'(p)/p > 0` for p ≠ 0.
#[derive(Debug, Clone, PartialEq)]
pub enum Kinetic {
    Quadratic,
    EvenProfile(Vec<f64>),
}

impl Kinetic {
    pub fn eval(&self, p: f64) -> f64 {
        match self {
            Kinetic::Quadratic => 0.5 * p * p,
            Kinetic::EvenProfile(c) => {
                let y = p * p;
                let mut acc = 0.0;
                for &cj in c.iter().rev() {
                    acc = (acc + cj) * y;
                }
                acc
            }
        }
    }

    pub fn deriv(&self, p: f64) -> f64 {
        match self {
            Kinetic::Quadratic => p,
            Kinetic::EvenProfile(c) => {
                let y = p * p;
                let mut acc = 0.0;
                for (j, &cj) in c.iter().enumerate().rev() {
                    let pw = 2.0 * (j as f64 + 1.0);
                    acc = acc * y + pw * cj;
                }
                acc * p
            }
        }
    }

    pub fn second(&self, p: f64) -> f64 {
        match self {
            Kinetic::Quadratic => 1.0,
            Kinetic::EvenProfile(c) => {
                let y = p * p;
                let mut acc = 0.0;
                for (j, &cj) in c.iter().enumerate().rev() {
                    let pw = 2.0 * (j as f64 + 1.0);
                    acc = acc * y + pw * (pw - 1.0) * cj;
                }
                acc
            }
        }
    }

    pub fn is_quadratic(&self) -> bool {
        matches!(self, Kinetic::Quadratic)
    }
}

/// The built-in potential families.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    /// ½ ω² q²
    Harmonic { omega: f64 },
    /// (ω q)^{2n}, a degenerate well for n ≥ 2
    Monomial { omega: f64, n: u32 },
    /// -cos q on the circle
    Pendulum,
    /// ¼ (q² - a²)²
    DoubleWell { a: f64 },
    /// Σ c_i q^i on the line; the leading term must be even with c > 0
    Polynomial { coeffs: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    Line,
    Circle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    pub kinetic: Kinetic,
    pub potential: Potential,
    pub domain: DomainKind,
    /// Configuration window scanned for critical points (the full circle
    /// for periodic potentials).
    pub window: (f64, f64),
    /// Resolution of the critical-point scan.
    pub scan_points: usize,
}

impl HamiltonianSpec {
    pub fn new(potential: Potential) -> Self {
        let domain = match potential {
            Potential::Pendulum => DomainKind::Circle,
            _ => DomainKind::Line,
        };
        let window = match &potential {
            Potential::Pendulum => (-math::PI, math::PI),
            Potential::Harmonic { .. } | Potential::Monomial { .. } => (-8.0, 8.0),
            Potential::DoubleWell { a } => (-2.0 * math::abs(*a) - 2.0, 2.0 * math::abs(*a) + 2.0),
            Potential::Polynomial { coeffs } => {
                // Cauchy bound on the roots of V'
                let lead = *coeffs.last().unwrap_or(&1.0);
                let mut b: f64 = 1.0;
                for c in coeffs {
                    b = math::max(b, math::abs(c / lead));
                }
                (-2.0 * b - 2.0, 2.0 * b + 2.0)
            }
        };
        HamiltonianSpec { kinetic: Kinetic::Quadratic, potential, domain, window, scan_points: 4096 }
    }

    pub fn harmonic(omega: f64) -> Self {
        Self::new(Potential::Harmonic { omega })
    }

    pub fn pendulum() -> Self {
        Self::new(Potential::Pendulum)
    }

    pub fn double_well(a: f64) -> Self {
        Self::new(Potential::DoubleWell { a })
    }

    pub fn monomial(omega: f64, n: u32) -> Self {
        Self::new(Potential::Monomial { omega, n })
    }

    pub fn is_mechanical(&self) -> bool {
        self.kinetic.is_quadratic()
    }

    pub fn v(&self, q: f64) -> f64 {
        match &self.potential {
            Potential::Harmonic { omega } => 0.5 * omega * omega * q * q,
            Potential::Monomial { omega, n } => math::powi(omega * q, 2 * *n as i32),
            Potential::Pendulum => -math::cos(q),
            Potential::DoubleWell { a } => {
                let u = q * q - a * a;
                0.25 * u * u
            }
            Potential::Polynomial { coeffs } => {
                let mut acc = 0.0;
                for &c in coeffs.iter().rev() {
                    acc = acc * q + c;
                }
                acc
            }
        }
    }

    /// Analytic global minimum value of V (reference for [`Self::v_rel`]).
    pub fn v_floor(&self) -> f64 {
        match &self.potential {
            Potential::Pendulum => -1.0,
            _ => 0.0,
        }
    }

    /// `V(q) - v_floor()` in a cancellation-free form where the family
    /// allows it; level-set quadrature evaluates `h - V` through this so
    /// cycles geometrically close to a vertex keep full relative accuracy.
    pub fn v_rel(&self, q: f64) -> f64 {
        match &self.potential {
            Potential::Pendulum => {
                let s = math::sin(0.5 * q);
                2.0 * s * s
            }
            _ => self.v(q) - self.v_floor(),
        }
    }

    pub fn v_prime(&self, q: f64) -> f64 {
        match &self.potential {
            Potential::Harmonic { omega } => omega * omega * q,
            Potential::Monomial { omega, n } => {
                2.0 * *n as f64 * omega * math::powi(omega * q, (2 * *n - 1) as i32)
            }
            Potential::Pendulum => math::sin(q),
            Potential::DoubleWell { a } => q * (q * q - a * a),
            Potential::Polynomial { coeffs } => {
                let mut acc = 0.0;
                for (i, &c) in coeffs.iter().enumerate().rev() {
                    if i == 0 {
                        continue;
                    }
                    acc = acc * q + i as f64 * c;
                }
                acc
            }
        }
    }

    pub fn v_second(&self, q: f64) -> f64 {
        match &self.potential {
            Potential::Harmonic { omega } => omega * omega,
            Potential::Monomial { omega, n } => {
                let nf = *n as f64;
                2.0 * nf * (2.0 * nf - 1.0) * omega * omega * math::powi(omega * q, (2 * *n - 2) as i32)
            }
            Potential::Pendulum => math::cos(q),
            Potential::DoubleWell { a } => 3.0 * q * q - a * a,
            Potential::Polynomial { coeffs } => {
                let mut acc = 0.0;
                for (i, &c) in coeffs.iter().enumerate().rev() {
                    if i < 2 {
                        continue;
                    }
                    acc = acc * q + (i * (i - 1)) as f64 * c;
                }
                acc
            }
        }
    }

    pub fn energy(&self, q: f64, p: f64) -> f64 {
        self.kinetic.eval(p) + self.v(q)
    }

    /// (H_q, H_p)
    pub fn gradient(&self, q: f64, p: f64) -> (f64, f64) {
        (self.v_prime(q), self.kinetic.deriv(p))
    }

    /// (H_qq, H_qp, H_pp)
    pub fn hessian(&self, q: f64, p: f64) -> (f64, f64, f64) {
        (self.v_second(q), 0.0, self.kinetic.second(p))
    }

    /// All critical points of V in the window, Newton-refined from
    /// sign-change brackets of V' on a uniform scan.
    pub fn critical_points(&self) -> Result<Vec<CriticalPoint>> {
        let (a, b) = self.window;
        let n = self.scan_points;
        let circle = self.domain == DomainKind::Circle;
        let mut roots: Vec<f64> = Vec::new();
        let step = (b - a) / n as f64;
        // one extra pair past b on the circle so a root at the seam is
        // bracketed (periodic potentials evaluate fine beyond the window)
        let upper = if circle { n + 1 } else { n - 1 };
        let mut prev_q = a;
        let mut prev_f = self.v_prime(prev_q);
        for i in 1..=upper {
            let q = a + step * i as f64;
            let f = self.v_prime(q);
            if prev_f == 0.0 {
                push_unique(&mut roots, prev_q, step);
            } else if prev_f * f < 0.0 {
                let mut r = self.refine_vprime_root(prev_q, q)?;
                if circle && r >= b {
                    r -= b - a;
                }
                push_unique(&mut roots, r, step * 1e-6);
            }
            prev_q = q;
            prev_f = f;
        }
        if !circle && prev_f == 0.0 {
            push_unique(&mut roots, prev_q, step);
        }

        let scale = math::max(1.0, math::abs(self.v(a)) + math::abs(self.v(b)));
        let mut out = Vec::new();
        for q in roots {
            if math::abs(self.v_prime(q)) > 1e-12 * scale {
                return Err(Error::Bracketing("critical point refinement did not converge"));
            }
            out.push(self.classify_critical(q)?);
        }
        out.sort_by(|x, y| x.q.partial_cmp(&y.q).unwrap());
        if out.is_empty() {
            return Err(Error::UnsupportedTopology("no critical points in window"));
        }
        Ok(out)
    }

    fn refine_vprime_root(&self, mut lo: f64, mut hi: f64) -> Result<f64> {
        let mut f_lo = self.v_prime(lo);
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let f = self.v_prime(x);
            if f == 0.0 {
                return Ok(x);
            }
            if f * f_lo < 0.0 {
                hi = x;
            } else {
                lo = x;
                f_lo = f;
            }
            let d = self.v_second(x);
            let newton = x - f / d;
            x = if d != 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo < 1e-15 * (1.0 + math::abs(x)) {
                return Ok(x);
            }
        }
        Ok(x)
    }

    fn classify_critical(&self, q: f64) -> Result<CriticalPoint> {
        let h = self.v(q);
        let v2 = self.v_second(q);
        let scale = math::max(1.0, math::abs(h));
        if math::abs(v2) > 1e-8 * scale {
            let kind = if v2 > 0.0 { CriticalKind::Minimum } else { CriticalKind::Saddle };
            return Ok(CriticalPoint { q, h, kind, degeneracy: None });
        }
        // Degenerate: probe the local growth V(q+δ) - V(q) ~ c δ^{2n} on both
        // sides. Known for the monomial family; fitted otherwise.
        if let Potential::Monomial { n, .. } = self.potential {
            return Ok(CriticalPoint { q, h, kind: CriticalKind::Minimum, degeneracy: Some(n) });
        }
        let d1 = 1e-2;
        let d2 = 5e-3;
        let g1 = self.v(q + d1) - h;
        let g2 = self.v(q + d2) - h;
        let gl = self.v(q - d1) - h;
        if g1 <= 0.0 || g2 <= 0.0 || gl <= 0.0 {
            return Err(Error::UnsupportedTopology("degenerate critical point is not a minimum"));
        }
        let order = math::ln(g1 / g2) / math::ln(d1 / d2);
        let n = (order / 2.0 + 0.5) as u32;
        if n < 2 {
            return Err(Error::UnsupportedTopology("could not classify degenerate critical point"));
        }
        Ok(CriticalPoint { q, h, kind: CriticalKind::Minimum, degeneracy: Some(n) })
    }

    /// Build the Reeb graph of level-set components.
    pub fn reeb_graph(&self) -> Result<ReebGraph> {
        let crits = self.critical_points()?;
        build_reeb(self, &crits)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalKind {
    Minimum,
    Saddle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub q: f64,
    pub h: f64,
    pub kind: CriticalKind,
    /// Well order n for a degenerate minimum V ~ c (q - q_c)^{2n}.
    pub degeneracy: Option<u32>,
}

fn push_unique(roots: &mut Vec<f64>, r: f64, tol: f64) {
    if roots.iter().all(|&x| math::abs(x - r) > tol) {
        roots.push(r);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Oscillation,
    /// p > 0 branch above the top saddle (circle domain).
    RotationUpper,
    /// p < 0 branch.
    RotationLower,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReebVertex {
    pub h: f64,
    pub kind: CriticalKind,
    /// q locations of the critical points in this level component.
    pub locations: Vec<f64>,
    pub degeneracy: Option<u32>,
}

/// A regular-energy edge of the Reeb graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ReebEdge {
    pub id: usize,
    pub kind: EdgeKind,
    pub h_lo: f64,
    /// `f64::INFINITY` on unbounded (root) edges.
    pub h_hi: f64,
    pub lower_vertex: usize,
    pub upper_vertex: Option<usize>,
    /// q of the minima enclosed by the cycle (oscillation edges).
    pub minima: Vec<f64>,
    /// Monotone stretch of V containing the left turning point:
    /// (left bound, leftmost minimum).
    pub left_stretch: (f64, f64),
    /// Monotone stretch containing the right turning point.
    pub right_stretch: (f64, f64),
    /// Edges merging into this edge's lower vertex.
    pub incoming: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReebGraph {
    pub vertices: Vec<ReebVertex>,
    pub edges: Vec<ReebEdge>,
}

impl ReebGraph {
    pub fn oscillation_edges(&self) -> impl Iterator<Item = &ReebEdge> {
        self.edges.iter().filter(|e| e.kind == EdgeKind::Oscillation)
    }

    /// Edges with no upper vertex (one on the line, two on the circle).
    pub fn unbounded_edges(&self) -> impl Iterator<Item = &ReebEdge> {
        self.edges.iter().filter(|e| e.upper_vertex.is_none())
    }
}

struct Component {
    minima: Vec<f64>,
    /// index into the q-sorted critical list, None = window edge / wrap
    left: Option<usize>,
    right: Option<usize>,
    edge: usize,
}

fn build_reeb(ham: &HamiltonianSpec, crits: &[CriticalPoint]) -> Result<ReebGraph> {
    let circle = ham.domain == DomainKind::Circle;
    let (wa, wb) = ham.window;
    let top_crit = crits.iter().map(|c| c.h).fold(f64::NEG_INFINITY, math::max);
    if !circle {
        // properness check at the window boundary
        if ham.v(wa) <= top_crit || ham.v(wb) <= top_crit {
            return Err(Error::UnsupportedTopology("window does not contain the critical structure"));
        }
    }

    // events sorted by value, minima before saddles on ties
    let mut order: Vec<usize> = (0..crits.len()).collect();
    order.sort_by(|&i, &j| {
        crits[i]
            .h
            .partial_cmp(&crits[j].h)
            .unwrap()
            .then_with(|| match (crits[i].kind, crits[j].kind) {
                (CriticalKind::Minimum, CriticalKind::Saddle) => core::cmp::Ordering::Less,
                (CriticalKind::Saddle, CriticalKind::Minimum) => core::cmp::Ordering::Greater,
                _ => core::cmp::Ordering::Equal,
            })
    });

    let mut vertices: Vec<ReebVertex> = Vec::new();
    let mut edges: Vec<ReebEdge> = Vec::new();
    let mut alive: Vec<Component> = Vec::new();

    let neighbor = |i: usize, dir: i32| -> Option<usize> {
        let n = crits.len();
        if circle {
            Some(((i as i32 + dir).rem_euclid(n as i32)) as usize)
        } else {
            let j = i as i32 + dir;
            if j < 0 || j >= n as i32 {
                None
            } else {
                Some(j as usize)
            }
        }
    };

    for &ci in &order {
        let c = &crits[ci];
        match c.kind {
            CriticalKind::Minimum => {
                let vid = vertices.len();
                vertices.push(ReebVertex {
                    h: c.h,
                    kind: CriticalKind::Minimum,
                    locations: vec![c.q],
                    degeneracy: c.degeneracy,
                });
                let eid = edges.len();
                edges.push(ReebEdge {
                    id: eid,
                    kind: EdgeKind::Oscillation,
                    h_lo: c.h,
                    h_hi: f64::INFINITY,
                    lower_vertex: vid,
                    upper_vertex: None,
                    minima: vec![c.q],
                    left_stretch: (0.0, 0.0),
                    right_stretch: (0.0, 0.0),
                    incoming: Vec::new(),
                });
                alive.push(Component {
                    minima: vec![c.q],
                    left: neighbor(ci, -1),
                    right: neighbor(ci, 1),
                    edge: eid,
                });
            }
            CriticalKind::Saddle => {
                let left_comp = alive.iter().position(|k| k.right == Some(ci));
                let right_comp = alive.iter().position(|k| k.left == Some(ci));
                let (li, ri) = match (left_comp, right_comp) {
                    (Some(l), Some(r)) => (l, r),
                    _ => return Err(Error::UnsupportedTopology("saddle without two flanking components")),
                };
                let vid = vertices.len();
                vertices.push(ReebVertex {
                    h: c.h,
                    kind: CriticalKind::Saddle,
                    locations: vec![c.q],
                    degeneracy: None,
                });
                if li == ri {
                    // circle closure: the component wraps onto itself
                    let comp = alive.remove(li);
                    edges[comp.edge].h_hi = c.h;
                    edges[comp.edge].upper_vertex = Some(vid);
                    for kind in [EdgeKind::RotationUpper, EdgeKind::RotationLower] {
                        let eid = edges.len();
                        edges.push(ReebEdge {
                            id: eid,
                            kind,
                            h_lo: c.h,
                            h_hi: f64::INFINITY,
                            lower_vertex: vid,
                            upper_vertex: None,
                            minima: Vec::new(),
                            left_stretch: (0.0, 0.0),
                            right_stretch: (0.0, 0.0),
                            incoming: vec![comp.edge],
                        });
                    }
                    if !alive.is_empty() {
                        return Err(Error::UnsupportedTopology(
                            "components remain after the circle closed",
                        ));
                    }
                } else {
                    // components flanking the saddle: li sits to its left
                    let (a, b) = if li < ri { (li, ri) } else { (ri, li) };
                    let second = alive.remove(b);
                    let first = alive.remove(a);
                    let (left, right) = if li < ri { (first, second) } else { (second, first) };
                    edges[left.edge].h_hi = c.h;
                    edges[left.edge].upper_vertex = Some(vid);
                    edges[right.edge].h_hi = c.h;
                    edges[right.edge].upper_vertex = Some(vid);
                    let mut minima = left.minima.clone();
                    minima.extend_from_slice(&right.minima);
                    minima.sort_by(|x, y| x.partial_cmp(y).unwrap());
                    let eid = edges.len();
                    edges.push(ReebEdge {
                        id: eid,
                        kind: EdgeKind::Oscillation,
                        h_lo: c.h,
                        h_hi: f64::INFINITY,
                        lower_vertex: vid,
                        upper_vertex: None,
                        minima: minima.clone(),
                        left_stretch: (0.0, 0.0),
                        right_stretch: (0.0, 0.0),
                        incoming: vec![left.edge, right.edge],
                    });
                    alive.push(Component { minima, left: left.left, right: right.right, edge: eid });
                }
            }
        }
    }

    if circle {
        if alive.len() > 1 {
            return Err(Error::UnsupportedTopology("circle did not close"));
        }
    } else if alive.len() != 1 {
        return Err(Error::UnsupportedTopology("line sweep should end with one root component"));
    }

    // fill turning-point stretches for oscillation edges
    let crit_qs: Vec<f64> = crits.iter().map(|c| c.q).collect();
    for e in edges.iter_mut() {
        if e.kind != EdgeKind::Oscillation {
            continue;
        }
        let q_min_l = e.minima[0];
        let q_min_r = *e.minima.last().unwrap();
        // nearest critical point strictly left of the leftmost minimum whose
        // value exceeds the edge's energies, else the window edge
        let mut left_bound = wa;
        let mut right_bound = wb;
        if circle {
            left_bound = q_min_l - math::TAU;
            right_bound = q_min_r + math::TAU;
        }
        for (i, &cq) in crit_qs.iter().enumerate() {
            if cq < q_min_l && crits[i].h >= e.h_hi - 1e-14 && cq > left_bound {
                left_bound = cq;
            }
            if cq > q_min_r && crits[i].h >= e.h_hi - 1e-14 && cq < right_bound {
                right_bound = cq;
            }
        }
        if circle {
            // wrap-aware: bounding saddle may sit across the seam
            for (i, &cq) in crit_qs.iter().enumerate() {
                if crits[i].h >= e.h_hi - 1e-14 {
                    for shift in [-math::TAU, 0.0, math::TAU] {
                        let qq = cq + shift;
                        if qq < q_min_l && qq > left_bound {
                            left_bound = qq;
                        }
                        if qq > q_min_r && qq < right_bound {
                            right_bound = qq;
                        }
                    }
                }
            }
        }
        e.left_stretch = (left_bound, q_min_l);
        e.right_stretch = (q_min_r, right_bound);
    }

    // merge saddle vertices connected along the same level
    merge_level_vertices(ham, &mut vertices, &mut edges);

    Ok(ReebGraph { vertices, edges })
}

/// Two saddles at the same critical value belong to one level component iff
/// every critical value between them (in q) is not above it.
fn merge_level_vertices(ham: &HamiltonianSpec, vertices: &mut Vec<ReebVertex>, edges: &mut [ReebEdge]) {
    let scale = 1.0 + vertices.iter().map(|v| math::abs(v.h)).fold(0.0, math::max);
    let mut merged: Vec<Option<usize>> = vec![None; vertices.len()];
    for i in 0..vertices.len() {
        for j in (i + 1)..vertices.len() {
            if vertices[i].kind != CriticalKind::Saddle || vertices[j].kind != CriticalKind::Saddle {
                continue;
            }
            if math::abs(vertices[i].h - vertices[j].h) > 1e-10 * scale {
                continue;
            }
            let qa = vertices[i].locations[0];
            let qb = vertices[j].locations[0];
            let (qa, qb) = if qa < qb { (qa, qb) } else { (qb, qa) };
            // sample V between the two saddles
            let mut connected = true;
            for s in 1..64 {
                let q = qa + (qb - qa) * s as f64 / 64.0;
                if ham.v(q) > vertices[i].h + 1e-9 * scale {
                    connected = false;
                    break;
                }
            }
            if connected && merged[j].is_none() {
                merged[j] = Some(i);
            }
        }
    }
    // rewire edges and drop merged vertices
    let mut remap: Vec<usize> = (0..vertices.len()).collect();
    for (j, m) in merged.iter().enumerate() {
        if let Some(i) = m {
            remap[j] = *i;
            let locs = vertices[j].locations.clone();
            vertices[*i].locations.extend(locs);
        }
    }
    let mut keep: Vec<usize> = Vec::new();
    let mut new_index = vec![0usize; vertices.len()];
    for v in 0..vertices.len() {
        if remap[v] == v {
            new_index[v] = keep.len();
            keep.push(v);
        }
    }
    for e in edges.iter_mut() {
        e.lower_vertex = new_index[remap[e.lower_vertex]];
        e.upper_vertex = e.upper_vertex.map(|u| new_index[remap[u]]);
    }
    let mut out = Vec::with_capacity(keep.len());
    for v in keep {
        let mut vert = vertices[v].clone();
        vert.locations.sort_by(|x, y| x.partial_cmp(y).unwrap());
        out.push(vert);
    }
    *vertices = out;
}

/// Temperatures at which the Watanabe–Kobayashi equilibrium analysis does
/// not apply: the finite set of positive vertex limits of `Κ̃_k` that are
/// single-valued across the incident edges.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleTemperatures {
    pub k: u32,
    /// excluded positive limiting values, ascending
    pub excluded: Vec<f64>,
}

impl AdmissibleTemperatures {
    /// The guard band matches the extrapolation accuracy of the limits.
    pub fn is_admissible(&self, t: f64) -> bool {
        self.excluded.iter().all(|&x| math::abs(x - t) > 1e-6 * (1.0 + t))
    }
}

/// Compute the excluded set for moment order `k` from the vertex-limit
/// extrapolations of the supplied profiles (one per edge incident to the
/// saddles of interest).
///
/// `Κ̃_1 = Κ` vanishes on the whole vertex set and every `Κ̃_k` vanishes at
/// minima, so only saddle vertices with `k ≥ 3` can contribute. A limit is
/// excluded when every incident edge agrees on it (the limit is then
/// single-valued and continuous through the vertex); disagreeing limits lie
/// in the interior of the range and are not excluded.
pub fn admissible_temperatures(
    graph: &ReebGraph,
    profiles: &[crate::orbit::ActionProfile],
    k: u32,
) -> Result<AdmissibleTemperatures> {
    if k % 2 == 0 {
        return Err(Error::Domain("moment order k must be odd"));
    }
    let mut excluded: Vec<f64> = Vec::new();
    if k >= 3 {
        for (vid, vertex) in graph.vertices.iter().enumerate() {
            if vertex.kind != CriticalKind::Saddle {
                continue;
            }
            let mut limits: Vec<f64> = Vec::new();
            for p in profiles {
                let edge = &graph.edges[p.edge_id];
                if edge.upper_vertex == Some(vid) {
                    if let Some(end) = &p.vertex_hi {
                        if let Some(l) = end.ktilde_limit(k) {
                            limits.push(l);
                        }
                    }
                }
                if edge.lower_vertex == vid {
                    if let Some(l) = p.vertex_lo.ktilde_limit(k) {
                        limits.push(l);
                    }
                }
            }
            if limits.len() < 2 {
                continue;
            }
            let mean = limits.iter().sum::<f64>() / limits.len() as f64;
            if mean <= 1e-6 {
                continue;
            }
            let single_valued =
                limits.iter().all(|&l| math::abs(l - mean) <= 1e-2 * (1.0 + mean));
            if single_valued {
                excluded.push(mean);
            }
        }
    }
    excluded.sort_by(|a, b| a.partial_cmp(b).unwrap());
    excluded.dedup_by(|a, b| math::abs(*a - *b) < 1e-9 * (1.0 + math::abs(*b)));
    Ok(AdmissibleTemperatures { k, excluded })
}
