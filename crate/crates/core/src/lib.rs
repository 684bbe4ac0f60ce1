//! Numerical laboratory for the Euler–Nordström system with cosmological
//! constant: a relativistic perfect fluid self-coupled through a scalar
//! gravity potential on a conformally flat metric, evolved as a first-order
//! quasilinear hyperbolic system on a periodic lattice.
//!
//! The crate is organized around the pieces of the continuum theory:
//!
//! - [`eos`]: the polytropic equation of state and the derived functions
//!   (energy density, sound speed) with their admissibility postulates;
//! - [`state`]: the 10-component state vector, weighted/original variable
//!   changes, the constant background solution, and stress-energy tensors;
//! - [`system`]: coefficient matrices of the first-order system, the
//!   linearization inhomogeneities, and pointwise residuals;
//! - [`geometry`]: the characteristic form, its sheets, acoustical metrics,
//!   hyperbolicity tests, and Christoffel symbols of the conformal metric;
//! - [`energy`]: energy currents for variations, their positivity, and the
//!   derivative-free divergence identity;
//! - [`field`]: grids, finite differences, Friedrichs mollification,
//!   spectral Sobolev norms, and Sobolev-calculus inequality checks;
//! - [`solver`]: method-of-lines evolution, linearized evolution, the
//!   mollified Picard iteration, conical energy monitoring, causality and
//!   continuous-dependence experiments;
//! - [`canonical`]: the desk-scale reference scenario shared by the test
//!   suite and the scenario runner.

pub mod canonical;
pub mod energy;
pub mod eos;
pub mod field;
pub mod geometry;
pub mod sampling;
pub mod solver;
pub mod state;
pub mod system;

pub use eos::{CoeffFamily, EosError, PolytropicEos, ThermoPoint};
pub use state::{
    AdmissibleBox, ConstantState, DerivedFluid, Model, OriginalFluid, StateError, StateVector,
    StressEnergy,
};

/// Minkowski metric components in the fixed rectangular frame,
/// signature (-, +, +, +). Indices are raised and lowered with this
/// metric throughout.
pub const MINKOWSKI: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

/// `g(a, b)` for two vectors (or two covectors with the reciprocal metric;
/// the component arrays coincide for a diagonal ±1 metric).
pub fn minkowski_inner(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}
