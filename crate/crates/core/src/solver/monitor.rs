//! Conical energy monitoring and the Gronwall envelope fit.
//!
//! E(t; r; N) sums the time components of the higher-order energy currents
//! of ∂_α(variation) over the shrinking ball Σ_{t,r−t} = {|s| ≤ r − t}.
//! Masks are sharp: a point is inside or it is not.

use super::{SolverError, Trajectory};
use crate::energy::current_value;
use crate::field::StateField;
use crate::state::{Model, StateVector};
use crate::system::MultiIndex;

/// Past light cone over a ball of radius r: slices Σ_{t,r−t}.
#[derive(Debug, Clone, Copy)]
pub struct ConeSpec {
    pub r: f64,
    pub center: [f64; 3],
}

impl ConeSpec {
    /// Point indices inside the slice at time t.
    pub fn inside(&self, grid: &crate::field::Grid, idx: usize, t: f64) -> bool {
        let x = grid.position(idx);
        let mut d2 = 0.0;
        for a in 0..3 {
            let d = x[a] - self.center[a];
            d2 += d * d;
        }
        d2.sqrt() <= self.r - t
    }
}

/// E(t; r; N) for a variation field against a background field.
pub fn cone_energy(
    model: &Model,
    background: &StateField,
    variation: &StateField,
    cone: &ConeSpec,
    t: f64,
    n_sobolev: usize,
) -> Result<f64, SolverError> {
    let grid = variation.grid;
    let vol = grid.cell_volume();
    let mut total = 0.0;
    for alpha in MultiIndex::up_to(n_sobolev, grid.dim) {
        let mut var_alpha = variation.clone();
        for axis in 0..3 {
            for _ in 0..alpha.0[axis] {
                var_alpha =
                    crate::system::derivative_state(&var_alpha, axis, crate::field::Scheme::Order2)?;
            }
        }
        for i in 0..grid.len() {
            if cone.inside(&grid, i, t) {
                let bg = StateVector(background.data[i]);
                let vdot = StateVector(var_alpha.data[i]);
                let cur = current_value(model, &bg, &vdot).map_err(|e| match e {
                    crate::energy::EnergyError::State(s) => SolverError::State(s),
                    crate::energy::EnergyError::Eos(s) => SolverError::State(s.into()),
                    crate::energy::EnergyError::BoxTouchesBoundary => unreachable!(),
                })?;
                total += cur.j0 * vol;
            }
        }
    }
    Ok(total.max(0.0).sqrt())
}

/// Least C ≥ 0 with E(t) ≤ (E(0) + C·t)·exp(C·t) at every sample, found by
/// bisection (the envelope is monotone in C).
pub fn fit_gronwall(series: &[(f64, f64)]) -> f64 {
    if series.is_empty() {
        return 0.0;
    }
    let e0 = series[0].1;
    let ok = |c: f64| {
        series
            .iter()
            .all(|&(t, e)| e <= (e0 + c * t) * (c * t).exp() * (1.0 + 1e-12) + 1e-300)
    };
    if ok(0.0) {
        return 0.0;
    }
    let mut hi = 1.0;
    while !ok(hi) {
        hi *= 2.0;
        if hi > 1e12 {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Full report of a monitored run.
#[derive(Debug, Clone)]
pub struct MonitorReport {
    pub series: Vec<(f64, f64)>,
    pub gronwall_c: f64,
    /// Largest violation of C_box·E² ≤ ‖V̇‖²_{H^N(Σ)} ≤ E²/C_box across the
    /// stored times (nonpositive when the sandwich holds).
    pub sandwich_excess: f64,
    pub max_increase: f64,
}

/// Monitors E(t;r;N) for `variation` about `background` over the cone,
/// fits the Gronwall envelope, and checks the norm sandwich against a
/// box constant.
pub fn energy_monitor(
    model: &Model,
    background: &Trajectory,
    variation: &Trajectory,
    cone: &ConeSpec,
    n_sobolev: usize,
    c_box: f64,
) -> Result<MonitorReport, SolverError> {
    let t_final = variation.t_final();
    if cone.r < t_final {
        return Err(SolverError::ConeTooSmall {
            r: cone.r,
            t_final,
        });
    }
    let mut series = Vec::with_capacity(variation.times.len());
    let mut sandwich_excess = f64::NEG_INFINITY;
    for (k, &t) in variation.times.iter().enumerate() {
        let bg = background.at_time(t);
        let var = &variation.snapshots[k];
        let e = cone_energy(model, &bg, var, cone, t, n_sobolev)?;
        // H^N(Σ) realized as the masked derivative-sum norm, the same
        // quadrature the energy uses.
        let hn_sigma = masked_sobolev(var, cone, t, n_sobolev)?;
        let lower = c_box * e * e - hn_sigma * hn_sigma;
        let upper = hn_sigma * hn_sigma - e * e / c_box;
        sandwich_excess = sandwich_excess.max(lower).max(upper);
        series.push((t, e));
    }
    let gronwall_c = fit_gronwall(&series);
    let mut max_increase = 0.0f64;
    for w in series.windows(2) {
        max_increase = max_increase.max(w[1].1 - w[0].1);
    }
    Ok(MonitorReport {
        series,
        gronwall_c,
        sandwich_excess,
        max_increase,
    })
}

/// (Σ_{|α|≤N} ∫_Σ |∂_α V̇|²)^{1/2} with the sharp mask.
fn masked_sobolev(
    variation: &StateField,
    cone: &ConeSpec,
    t: f64,
    n_sobolev: usize,
) -> Result<f64, SolverError> {
    let grid = variation.grid;
    let vol = grid.cell_volume();
    let mut total = 0.0;
    for alpha in MultiIndex::up_to(n_sobolev, grid.dim) {
        let mut var_alpha = variation.clone();
        for axis in 0..3 {
            for _ in 0..alpha.0[axis] {
                var_alpha =
                    crate::system::derivative_state(&var_alpha, axis, crate::field::Scheme::Order2)?;
            }
        }
        for i in 0..grid.len() {
            if cone.inside(&grid, i, t) {
                total += var_alpha.data[i].iter().map(|x| x * x).sum::<f64>() * vol;
            }
        }
    }
    Ok(total.sqrt())
}
