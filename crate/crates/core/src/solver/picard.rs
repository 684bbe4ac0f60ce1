//! The mollified Picard iteration.
//!
//! Iterate 0 is the time-constant extension of the data mollified at ε₀;
//! iterate m+1 solves the linearization about iterate m with initial data
//! mollified at ε_{m+1} = 2^{−(m+1)}ε₀. Every iterate must stay inside the
//! Λ-tube around the smoothed data in H^N, which keeps it inside the
//! admissible box.

use super::{solve_linearized, LinearSource, SolverConfig, SolverError, Trajectory};
use crate::field::{mollify_state, state_sobolev_rel, MollifierSpec, StateField};
use crate::state::{Model, StateVector};

/// The iterate ladder and its convergence record.
#[derive(Debug)]
pub struct PicardRun {
    pub iterates: Vec<Trajectory>,
    pub eps: Vec<f64>,
    /// max over time of ‖V^{(m)}(t) − V^{(0)}‖_{H^N} per iterate.
    pub tube_norms: Vec<f64>,
    /// Successive differences d_m = sup-norm of V^{(m)} − V^{(m−1)}.
    pub diffs: Vec<f64>,
    pub tube_radius: f64,
}

impl PicardRun {
    /// Ratios d_{m+1}/d_m for m = 1, 2, ...
    pub fn contraction_ratios(&self) -> Vec<f64> {
        self.diffs
            .windows(2)
            .map(|w| w[1] / w[0].max(f64::MIN_POSITIVE))
            .collect()
    }
}

/// Runs `m_max` iterates at the configured final time.
pub fn picard_sequence(
    model: &Model,
    data: &StateField,
    config: &SolverConfig,
    moll: &MollifierSpec,
    m_max: usize,
) -> Result<PicardRun, SolverError> {
    let smoothed0 = mollify_state(data, moll.eps(0))?;
    let tube = config.tube_radius();
    let h = data.grid.spacing();
    let steps = (config.t_final / (config.cfl * h)).ceil().max(1.0) as usize;
    let dt = config.t_final / steps as f64;

    let norm_vs_smoothed = |traj: &Trajectory| -> Result<f64, SolverError> {
        let mut worst = 0.0f64;
        for snap in &traj.snapshots {
            let diff = snap.sub(&smoothed0);
            let n = state_sobolev_rel(&diff, config.n_sobolev as f64, &StateVector([0.0; 10]))?;
            worst = worst.max(n);
        }
        Ok(worst)
    };

    let mut iterates = vec![Trajectory::constant_in_time(
        smoothed0.clone(),
        config.t_final,
        dt,
    )];
    let mut eps = vec![moll.eps(0)];
    let mut tube_norms = vec![norm_vs_smoothed(&iterates[0])?];
    let mut diffs = Vec::new();
    for m in 0..m_max {
        let data_m = mollify_state(data, moll.eps(m + 1))?;
        let next = solve_linearized(
            model,
            &iterates[m],
            &data_m,
            LinearSource::Linearization,
            config,
        )?;
        // Tube and box conditions on the new iterate.
        let norm = norm_vs_smoothed(&next)?;
        if norm > tube {
            return Err(SolverError::TubeExceeded {
                m: m + 1,
                norm,
                tube,
            });
        }
        for (snap, &t) in next.snapshots.iter().zip(&next.times) {
            for row in &snap.data {
                if !config.bounds.contains(&StateVector(*row)) {
                    return Err(SolverError::EscapedBox { t });
                }
            }
        }
        diffs.push(next.sup_distance(&iterates[m]));
        tube_norms.push(norm);
        eps.push(moll.eps(m + 1));
        iterates.push(next);
    }
    Ok(PicardRun {
        iterates,
        eps,
        tube_norms,
        diffs,
        tube_radius: tube,
    })
}

/// Halves the final time from the configured value until every iterate
/// stays in the tube and the successive differences contract by at least
/// `contraction` per iteration over the requested window. Returns the
/// selected time with the run.
pub fn picard_with_time_selection(
    model: &Model,
    data: &StateField,
    config: &SolverConfig,
    moll: &MollifierSpec,
    m_max: usize,
    contraction: f64,
    max_halvings: usize,
) -> Result<(f64, PicardRun), SolverError> {
    let mut cfg = config.clone();
    let mut last_err = None;
    for _ in 0..=max_halvings {
        match picard_sequence(model, data, &cfg, moll, m_max) {
            Ok(run) => {
                // A difference at the rounding floor counts as converged.
                let floor = 1e-13 * (1.0 + run.tube_radius);
                let contracted = run
                    .diffs
                    .windows(2)
                    .all(|w| w[1] <= contraction * w[0] || w[1] <= floor);
                if contracted {
                    return Ok((cfg.t_final, run));
                }
                last_err = Some(SolverError::TubeExceeded {
                    m: 0,
                    norm: run
                        .contraction_ratios()
                        .iter()
                        .copied()
                        .fold(0.0, f64::max),
                    tube: contraction,
                });
            }
            Err(e @ (SolverError::TubeExceeded { .. } | SolverError::EscapedBox { .. })) => {
                last_err = Some(e);
            }
            Err(e) => return Err(e),
        }
        cfg.t_final *= 0.5;
    }
    Err(last_err.expect("at least one attempt"))
}
