//! Time evolution by the method of lines.
//!
//! Space is discretized with centered differences on the periodic grid and
//! time with the classic 4-stage Runge–Kutta scheme; an optional
//! fourth-difference dissipation term (an O(h³) perturbation) damps the
//! grid modes. The fluid half advances by solving A⁰∂₀W = b − A^k∂_kW
//! pointwise; the scalar-gravity half is the first-order wave reduction.

mod experiments;
mod monitor;
mod picard;

pub use experiments::{
    bump_profile, causality_report, dependence_experiment, pulse_data, richardson_order,
    DependenceReport,
};
pub use monitor::{cone_energy, energy_monitor, fit_gronwall, ConeSpec, MonitorReport};
pub use picard::{picard_sequence, picard_with_time_selection, PicardRun};

use crate::field::{
    derivative, same_grid, state_l2, state_sobolev_rel, FieldError, Scheme, StateField,
};
use crate::state::{AdmissibleBox, Model, StateError, StateVector};
use crate::system::{derivative_state, InhomTerms, SystemError};
use nalgebra::Vector5;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("state escaped the admissible box at t = {t}")]
    EscapedBox { t: f64 },
    #[error("courant number {courant} exceeds the 0.5 stability bound")]
    CflViolated { courant: f64 },
    #[error("iterate {m} left the iteration tube: |V - V0|_HN = {norm} > {tube}")]
    TubeExceeded { m: usize, norm: f64, tube: f64 },
    #[error("cone radius {r} smaller than the final time {t_final}")]
    ConeTooSmall { r: f64, t_final: f64 },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    System(#[from] SystemError),
}

/// Evolution parameters. The box is the compact set the run must stay in;
/// `reference` is the quiet background the diagnostics are measured
/// against.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub cfl: f64,
    pub t_final: f64,
    /// Sobolev order for diagnostics and tube norms.
    pub n_sobolev: usize,
    /// Iteration tube radius; defaults to half the box margin of the
    /// reference state.
    pub lambda: Option<f64>,
    /// Fourth-difference dissipation coefficient.
    pub dissipation: f64,
    pub bounds: AdmissibleBox,
    pub reference: StateVector,
    /// Declared support radius of the initial perturbation.
    pub support_radius: f64,
    /// Cone radius for the conical energy diagnostic.
    pub cone_radius: f64,
    /// Record full diagnostics every this many steps.
    pub diag_every: usize,
}

impl SolverConfig {
    pub fn tube_radius(&self) -> f64 {
        self.lambda
            .unwrap_or_else(|| 0.5 * self.bounds.margin_from(&self.reference))
    }
}

/// One row of the diagnostics stream.
#[derive(Debug, Clone, Copy)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub l2: f64,
    pub hn: f64,
    pub sup: f64,
    pub e_cone: f64,
    pub constraint_defect: f64,
    pub cone_deviation: f64,
}

/// Stored evolution: a snapshot per step plus the diagnostics series.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub snapshots: Vec<StateField>,
    pub diagnostics: Vec<DiagnosticsRow>,
    pub dt: f64,
}

impl Trajectory {
    /// A background that never moves: the same field at every step.
    pub fn constant_in_time(field: StateField, t_final: f64, dt: f64) -> Trajectory {
        let steps = (t_final / dt).round() as usize;
        let times: Vec<f64> = (0..=steps).map(|n| n as f64 * dt).collect();
        let snapshots = vec![field; steps + 1];
        Trajectory {
            times,
            snapshots,
            diagnostics: Vec::new(),
            dt,
        }
    }

    pub fn final_state(&self) -> &StateField {
        self.snapshots.last().expect("non-empty trajectory")
    }

    pub fn t_final(&self) -> f64 {
        *self.times.last().expect("non-empty trajectory")
    }

    /// Linear interpolation between stored snapshots.
    pub fn at_time(&self, t: f64) -> StateField {
        let last = self.times.len() - 1;
        let pos = (t / self.dt).clamp(0.0, last as f64);
        let i = (pos.floor() as usize).min(last.saturating_sub(1));
        let w = pos - i as f64;
        if w.abs() < 1e-12 || i + 1 > last {
            return self.snapshots[i].clone();
        }
        let mut out = self.snapshots[i].clone();
        for (dst, src) in out.data.iter_mut().zip(&self.snapshots[i + 1].data) {
            for c in 0..10 {
                dst[c] = (1.0 - w) * dst[c] + w * src[c];
            }
        }
        out
    }

    /// sup over stored times of the sup-norm distance to another
    /// trajectory with the same grid and step count.
    pub fn sup_distance(&self, other: &Trajectory) -> f64 {
        self.snapshots
            .iter()
            .zip(&other.snapshots)
            .map(|(a, b)| a.sub(b).sup_norm())
            .fold(0.0, f64::max)
    }
}

/// Source selection for the linearized evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearSource {
    /// Homogeneous equations of variation.
    Zero,
    /// The linearization of the full system about the background: this is
    /// the iteration map, with the full state as the unknown.
    Linearization,
}

/// ∂₀V at every point of `coeff_field` (where the principal coefficients
/// and sources are evaluated) applied to `var` (whose spatial derivatives
/// drive the step). For the nonlinear system the two coincide.
fn time_derivative(
    model: &Model,
    coeff_field: &StateField,
    var: &StateField,
    source: LinearSource,
    dissipation: f64,
) -> Result<StateField, SolverError> {
    let grid = var.grid;
    let dim = grid.dim;
    let mut dxs: Vec<StateField> = Vec::with_capacity(dim);
    for axis in 0..dim {
        dxs.push(derivative_state(var, axis, Scheme::Order2)?);
    }
    let mut out = StateField::zeros(grid);
    for i in 0..grid.len() {
        let bg = StateVector(coeff_field.data[i]);
        let coeff = model.coeff_matrices(&bg)?;
        let inhom = match source {
            LinearSource::Zero => InhomTerms::zero(),
            LinearSource::Linearization => model.inhom_linearization(&bg)?,
        };
        // Fluid half: A0 d0W = b - A^k dkW.
        let mut rhs = Vector5::from_row_slice(&inhom.b);
        for (k, dx) in dxs.iter().enumerate() {
            let dw = Vector5::from_row_slice(&dx.data[i][..5]);
            rhs -= coeff.ak[k] * dw;
        }
        let dw0 = coeff
            .a0
            .lu()
            .solve(&rhs)
            .expect("A0 invertible on admissible states");
        let row = &mut out.data[i];
        row[..5].copy_from_slice(dw0.as_slice());
        // Scalar-gravity half.
        let mut div_psi = 0.0;
        for (k, dx) in dxs.iter().enumerate() {
            div_psi += dx.data[i][7 + k];
        }
        row[6] = div_psi - inhom.l[0];
        for j in 0..3 {
            let dpsi0 = if j < dim { dxs[j].data[i][6] } else { 0.0 };
            row[7 + j] = dpsi0 + inhom.l[1 + j];
        }
        row[5] = inhom.l[4];
    }
    if dissipation > 0.0 {
        let h = grid.spacing();
        let scale = dissipation / h;
        let src = var.clone();
        for i in 0..grid.len() {
            for axis in 0..dim {
                let m2 = grid.neighbor(i, axis, -2);
                let m1 = grid.neighbor(i, axis, -1);
                let p1 = grid.neighbor(i, axis, 1);
                let p2 = grid.neighbor(i, axis, 2);
                for c in 0..10 {
                    let d4 = src.data[m2][c] - 4.0 * src.data[m1][c] + 6.0 * src.data[i][c]
                        - 4.0 * src.data[p1][c]
                        + src.data[p2][c];
                    out.data[i][c] -= scale * d4;
                }
            }
        }
    }
    Ok(out)
}

fn rk4_step<F>(field: &StateField, dt: f64, mut rhs: F) -> Result<StateField, SolverError>
where
    F: FnMut(&StateField, f64) -> Result<StateField, SolverError>,
{
    let k1 = rhs(field, 0.0)?;
    let k2 = rhs(&field.axpy(0.5 * dt, &k1), 0.5)?;
    let k3 = rhs(&field.axpy(0.5 * dt, &k2), 0.5)?;
    let k4 = rhs(&field.axpy(dt, &k3), 1.0)?;
    let mut out = field.clone();
    for i in 0..out.data.len() {
        for c in 0..10 {
            out.data[i][c] += dt / 6.0
                * (k1.data[i][c] + 2.0 * k2.data[i][c] + 2.0 * k3.data[i][c] + k4.data[i][c]);
        }
    }
    Ok(out)
}

fn check_box(field: &StateField, bounds: &AdmissibleBox, t: f64) -> Result<(), SolverError> {
    for row in &field.data {
        if !bounds.contains(&StateVector(*row)) {
            return Err(SolverError::EscapedBox { t });
        }
    }
    Ok(())
}

/// Steps and step size for a run: the Courant number is dt/h against the
/// fastest characteristic speed, which the light cone pins at one.
fn time_grid(config: &SolverConfig, h: f64) -> Result<(usize, f64), SolverError> {
    let steps = (config.t_final / (config.cfl * h)).ceil().max(1.0) as usize;
    let dt = config.t_final / steps as f64;
    let courant = dt / h;
    if courant > 0.5 {
        return Err(SolverError::CflViolated { courant });
    }
    Ok((steps, dt))
}

fn diagnostics_row(
    model: &Model,
    field: &StateField,
    t: f64,
    config: &SolverConfig,
) -> Result<DiagnosticsRow, SolverError> {
    let refv = &config.reference;
    let dev = {
        let mut d = field.clone();
        for row in d.data.iter_mut() {
            for c in 0..10 {
                row[c] -= refv.0[c];
            }
        }
        d
    };
    let l2 = state_l2(&dev);
    let hn = state_sobolev_rel(field, config.n_sobolev as f64, refv)?;
    let sup = field.sup_distance(refv);
    let cone = ConeSpec {
        r: config.cone_radius,
        center: [0.0; 3],
    };
    let e_cone = cone_energy(model, field, &dev, &cone, t, config.n_sobolev)?;
    // First-order-reduction defect |psi_j - d_j phi| in L2.
    let mut defect2 = 0.0;
    for axis in 0..field.grid.dim {
        let dphi = derivative(&field.component(5), axis, Scheme::Order2)?;
        let psi = field.component(6 + 1 + axis);
        let d = crate::field::norm_l2(&psi.zip(&dphi, |a, b| a - b));
        defect2 += d * d;
    }
    // Deviation outside the expanding support cone |s| >= r0 + t.
    let mut cone_deviation = 0.0f64;
    for i in 0..field.grid.len() {
        if field.grid.radius(i) >= config.support_radius + t {
            for c in 0..10 {
                cone_deviation = cone_deviation.max((field.data[i][c] - refv.0[c]).abs());
            }
        }
    }
    Ok(DiagnosticsRow {
        t,
        l2,
        hn,
        sup,
        e_cone,
        constraint_defect: defect2.sqrt(),
        cone_deviation,
    })
}

/// Evolves the nonlinear system from `data` to `t_final`.
pub fn integrate_nonlinear(
    model: &Model,
    data: &StateField,
    config: &SolverConfig,
) -> Result<Trajectory, SolverError> {
    let (steps, dt) = time_grid(config, data.grid.spacing())?;
    check_box(data, &config.bounds, 0.0)?;
    let mut snapshots = Vec::with_capacity(steps + 1);
    let mut times = Vec::with_capacity(steps + 1);
    let mut diagnostics = Vec::new();
    let mut current = data.clone();
    for n in 0..=steps {
        let t = n as f64 * dt;
        if n % config.diag_every == 0 || n == steps {
            diagnostics.push(diagnostics_row(model, &current, t, config)?);
        }
        times.push(t);
        snapshots.push(current.clone());
        if n == steps {
            break;
        }
        let next = rk4_step(&current, dt, |f, _| {
            time_derivative(model, f, f, LinearSource::Linearization, config.dissipation)
        })?;
        check_box(&next, &config.bounds, t + dt)?;
        current = next;
    }
    Ok(Trajectory {
        times,
        snapshots,
        diagnostics,
        dt,
    })
}

/// Evolves the linearized system about a stored background trajectory.
/// The background must lie in the box; the evolved field is a variation
/// (or a full iterate, for the `Linearization` source) and is not box- or
/// admissibility-checked here.
pub fn solve_linearized(
    model: &Model,
    background: &Trajectory,
    data: &StateField,
    source: LinearSource,
    config: &SolverConfig,
) -> Result<Trajectory, SolverError> {
    same_grid(&data.grid, &background.final_state().grid)?;
    for (snap, &t) in background.snapshots.iter().zip(&background.times) {
        check_box(snap, &config.bounds, t)?;
    }
    let (steps, dt) = time_grid(config, data.grid.spacing())?;
    let mut snapshots = Vec::with_capacity(steps + 1);
    let mut times = Vec::with_capacity(steps + 1);
    let mut current = data.clone();
    for n in 0..=steps {
        let t = n as f64 * dt;
        times.push(t);
        snapshots.push(current.clone());
        if n == steps {
            break;
        }
        current = rk4_step(&current, dt, |f, stage| {
            let bg = background.at_time(t + stage * dt);
            time_derivative(model, &bg, f, source, config.dissipation)
        })?;
    }
    Ok(Trajectory {
        times,
        snapshots,
        diagnostics: Vec::new(),
        dt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical;
    use crate::field::Grid;

    fn quick_config(bg: &crate::state::ConstantState, t_final: f64) -> SolverConfig {
        SolverConfig {
            cfl: 0.4,
            t_final,
            n_sobolev: 3,
            lambda: None,
            dissipation: 0.01,
            bounds: canonical::state_box(bg),
            reference: bg.v_bar,
            support_radius: 1.0,
            cone_radius: 6.0,
            diag_every: 8,
        }
    }

    #[test]
    fn equilibrium_is_preserved() {
        let model = canonical::model();
        let bg = canonical::background();
        let grid = Grid::new_1d(64, 8.0).unwrap();
        let data = StateField::constant(grid, &bg.v_bar);
        let config = quick_config(&bg, 2.0);
        let traj = integrate_nonlinear(&model, &data, &config).unwrap();
        let drift = traj.final_state().sup_distance(&bg.v_bar);
        let steps = traj.times.len() as f64;
        assert!(drift < 1e-12 * steps, "drift {drift}");
    }

    #[test]
    fn zero_data_zero_sources_stays_zero() {
        let model = canonical::model();
        let bg = canonical::background();
        let grid = Grid::new_1d(64, 8.0).unwrap();
        let backgrounds =
            Trajectory::constant_in_time(StateField::constant(grid, &bg.v_bar), 0.5, 0.4 * grid.spacing());
        let config = quick_config(&bg, 0.5);
        let traj = solve_linearized(
            &model,
            &backgrounds,
            &StateField::zeros(grid),
            LinearSource::Zero,
            &config,
        )
        .unwrap();
        assert_eq!(traj.final_state().sup_norm(), 0.0);
    }

    #[test]
    fn cfl_guard() {
        let bg = canonical::background();
        let mut config = quick_config(&bg, 1.0);
        config.cfl = 0.8;
        let grid = Grid::new_1d(64, 8.0).unwrap();
        let err = time_grid(&config, grid.spacing()).unwrap_err();
        assert!(matches!(err, SolverError::CflViolated { .. }));
    }

    #[test]
    fn escaped_box_is_reported() {
        let model = canonical::model();
        let bg = canonical::background();
        let grid = Grid::new_1d(64, 8.0).unwrap();
        let mut data = StateField::constant(grid, &bg.v_bar);
        // Push one component outside the box.
        data.data[3][crate::state::IDX_S] = bg.v_bar.s() + 10.0;
        let config = quick_config(&bg, 0.5);
        assert!(matches!(
            integrate_nonlinear(&model, &data, &config),
            Err(SolverError::EscapedBox { .. })
        ));
    }

    #[test]
    fn reruns_are_bit_identical() {
        let model = canonical::model();
        let bg = canonical::background();
        let grid = Grid::new_1d(128, 8.0).unwrap();
        let data = canonical_pulse(&bg, grid, 5e-4);
        let config = quick_config(&bg, 0.25);
        let a = integrate_nonlinear(&model, &data, &config).unwrap();
        let b = integrate_nonlinear(&model, &data, &config).unwrap();
        for (x, y) in a.snapshots.iter().zip(&b.snapshots) {
            assert_eq!(x.data, y.data);
        }
    }

    /// Shared pulse helper for solver tests.
    pub fn canonical_pulse(
        bg: &crate::state::ConstantState,
        grid: Grid,
        amplitude: f64,
    ) -> StateField {
        crate::solver::experiments::pulse_data(bg, grid, amplitude)
    }
}
