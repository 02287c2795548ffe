//! Numerical toolkit for singly thermostated 1-degree-of-freedom
//! Hamiltonian systems.
//!
//! The crate builds the objects needed to study a mechanical Hamiltonian
//! `H(q, p) = p²/2 + V(q)` coupled to a heat bath through one auxiliary
//! thermostat variable `ξ`:
//!
//! * [`hamiltonian`] — Hamiltonian families, critical points and the Reeb
//!   graph of level-set components;
//! * [`orbit`] — level-set quadrature: actions, periods, orbit averages,
//!   momentum area moments and per-edge action profiles;
//! * [`thermostats`] — the four thermostated vector fields (Nosé–Hoover,
//!   logistic, Watanabe–Kobayashi, Hoover–Sprott–Hoover) with their
//!   invariant densities and a Liouville-identity defect;
//! * [`averaged`] — the first-order averaged system: Darboux coordinates,
//!   effective potential, thermostatic equilibria, periods and twist;
//! * [`integrator`] — adaptive embedded Runge–Kutta with dense output and
//!   event detection;
//! * [`poincare`] — Poincaré return maps, rotation numbers and
//!   invariant-torus scans;
//! * [`reconstruct`] — inverse design of a Hamiltonian from a prescribed
//!   averaged potential;
//! * [`special`] — complete elliptic integrals, `erfc`, and the thermostat
//!   polynomial family.
//!
//! The crate is `no_std`-compatible (with `alloc`); all floating point is
//! routed through `libm` so results are bit-reproducible across platforms.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod averaged;
pub mod error;
pub mod hamiltonian;
pub mod integrator;
pub mod interp;
pub mod math;
pub mod orbit;
pub mod poincare;
pub mod quadrature;
pub mod reconstruct;
pub mod special;
pub mod thermostats;

pub use error::{Error, Result};
