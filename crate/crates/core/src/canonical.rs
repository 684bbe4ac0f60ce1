//! The canonical desk scenario: γ = 4/3, A(S) = e^{S−1}, S̄ = p̄ = κ = 1.
//!
//! These values make every hand check exact (ρ = 4, σ² = 4/15, Q = 4/3 at
//! the reference state) and are shared between the test suites and the
//! scenario runner.

use crate::eos::{CoeffFamily, PolytropicEos};
use crate::state::{background_solve, AdmissibleBox, ConstantState, Model, StateVector};

pub fn eos() -> PolytropicEos {
    PolytropicEos::new(4.0 / 3.0, CoeffFamily::Exponential).expect("canonical eos is valid")
}

pub fn model() -> Model {
    Model::new(eos(), 1.0)
}

/// The desk state V★ = (S=1, P=1, U=0, φ=0, ψ=0).
pub fn state_star() -> StateVector {
    StateVector::new(1.0, 1.0, [0.0; 3], 0.0, [0.0; 4])
}

/// The canonical quiet-fluid background (φ̄ ≈ −0.30099, P̄ = −φ̄).
pub fn background() -> ConstantState {
    background_solve(&eos(), 1.0, 1.0, 1.0).expect("canonical background exists")
}

/// Box margins around a background state; the iteration tube and the
/// escaped-box guard both derive from these.
pub fn state_box(bg: &ConstantState) -> AdmissibleBox {
    let dp = 0.7 * bg.p_weighted;
    let margin = [0.6, dp, 0.8, 0.8, 0.8, 0.6, 0.8, 0.8, 0.8, 0.8];
    AdmissibleBox::around(&bg.v_bar, &margin)
}

/// Default iteration tube radius: half the sup-norm distance from V̄ to the
/// box boundary.
pub fn tube_radius(bg: &ConstantState) -> f64 {
    0.5 * state_box(bg).margin_from(&bg.v_bar)
}
