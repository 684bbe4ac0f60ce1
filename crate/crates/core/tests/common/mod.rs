//! Helpers shared by the integration suites: a Richardson-extrapolated
//! derivative oracle and an analytic manufactured background/variation
//! pair with exact derivatives.

use enkappa::state::{ConstantState, StateVector};

/// Richardson-extrapolated centered difference.
pub fn richardson<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

/// A smooth spacetime field with hand-coded exact derivatives: value,
/// ∂_t, and ∂_x of every component at (t, x). Amplitudes keep the state
/// admissible.
pub struct Manufactured {
    pub base: StateVector,
}

pub struct PointData {
    pub v: StateVector,
    pub dt: [f64; 10],
    pub dx: [f64; 10],
}

impl Manufactured {
    pub fn around(bg: &ConstantState) -> Self {
        Manufactured { base: bg.v_bar }
    }

    /// Background field: independent sine wiggles per component.
    pub fn background(&self, t: f64, x: f64) -> PointData {
        let mut v = self.base;
        let mut dt = [0.0; 10];
        let mut dx = [0.0; 10];
        // (component, amplitude, k, omega, phase)
        let waves = [
            (0usize, 0.04, 0.7, 0.5, 0.3),
            (1, 0.03, 1.1, 0.8, 1.1),
            (2, 0.05, 0.9, 0.6, 2.0),
            (3, 0.02, 1.3, 0.4, 0.7),
            (5, 0.03, 0.8, 0.9, 1.6),
            (6, 0.02, 1.2, 0.7, 0.2),
            (7, 0.03, 0.6, 1.0, 2.4),
        ];
        for (c, a, k, w, p) in waves {
            let phase = k * x - w * t + p;
            v[c] += a * phase.sin();
            dt[c] += -a * w * phase.cos();
            dx[c] += a * k * phase.cos();
        }
        PointData { v, dt, dx }
    }

    /// Variation field, likewise arbitrary and smooth.
    pub fn variation(&self, t: f64, x: f64) -> PointData {
        let mut v = StateVector([0.0; 10]);
        let mut dt = [0.0; 10];
        let mut dx = [0.0; 10];
        let waves = [
            (0usize, 0.7, 1.0, 0.9, 0.1),
            (1, 0.5, 0.8, 1.1, 1.3),
            (2, 0.6, 1.2, 0.5, 0.9),
            (3, 0.4, 0.5, 0.8, 2.2),
            (4, 0.3, 1.4, 0.6, 0.4),
            (5, 0.5, 0.9, 1.2, 1.8),
            (6, 0.6, 1.1, 0.7, 0.6),
            (7, 0.4, 0.7, 1.0, 2.9),
            (8, 0.3, 1.0, 0.4, 1.5),
            (9, 0.2, 1.3, 0.9, 0.8),
        ];
        for (c, a, k, w, p) in waves {
            let phase = k * x - w * t + p;
            v[c] += a * phase.sin();
            dt[c] += -a * w * phase.cos();
            dx[c] += a * k * phase.cos();
        }
        PointData { v, dt, dx }
    }
}
