//! The built-in scenarios. Each one writes its CSV payloads and returns
//! the checks it performed; tolerances are pinned here and match the
//! acceptance suite.

use crate::{CheckRecord, CliError, Context, ReportBundle};
use enkappa::energy::{current_form, current_value, uniform_constant};
use enkappa::field::{
    commutator_ratio, composition_diff_ratio, gn_ratio, interpolation_ratio, product_ratio, Grid,
    MollifierSpec, ScalarField, StateField,
};
use enkappa::geometry::{
    acoustical_metrics, characteristic_form, hyperbolic_roots, Covector, DEFAULT_SHEET_TOL,
};
use enkappa::sampling;
use enkappa::solver::{
    causality_report, dependence_experiment, energy_monitor, integrate_nonlinear,
    picard_with_time_selection, pulse_data, richardson_order, ConeSpec, SolverConfig, Trajectory,
};
use enkappa::state::{AdmissibleBox, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::path::PathBuf;

const PULSE_AMPLITUDE: f64 = 5e-4;
const PICARD_AMPLITUDE: f64 = 5e-5;
const PICARD_EPS0: f64 = 0.1;
const SUPPORT_RADIUS: f64 = 1.2;

fn rng(ctx: &Context, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(ctx.config.seed.wrapping_add(stream))
}

fn write_csv(
    ctx: &Context,
    name: &str,
    header: &str,
    rows: &[String],
) -> Result<PathBuf, CliError> {
    let path = ctx.out_dir.join(name);
    let mut file = std::io::BufWriter::new(
        std::fs::File::create(&path).map_err(|e| CliError::Runtime(format!("{name}: {e}")))?,
    );
    writeln!(file, "{header}").map_err(|e| CliError::Runtime(e.to_string()))?;
    for row in rows {
        writeln!(file, "{row}").map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    Ok(path)
}

fn grid(ctx: &Context) -> Result<Grid, CliError> {
    Grid::new(ctx.config.grid.dim, ctx.config.grid.points, ctx.config.grid.extent)
        .map_err(|e| CliError::InvalidConfig(e.to_string()))
}

fn state_box(ctx: &Context) -> AdmissibleBox {
    enkappa::canonical::state_box(&ctx.background)
}

fn solver_config(ctx: &Context, t_final: f64) -> SolverConfig {
    SolverConfig {
        cfl: ctx.config.solver.cfl,
        t_final,
        n_sobolev: ctx.config.solver.sobolev_order,
        lambda: ctx.config.solver.lambda,
        dissipation: ctx.config.solver.dissipation,
        bounds: state_box(ctx),
        reference: ctx.background.v_bar,
        support_radius: SUPPORT_RADIUS,
        cone_radius: (ctx.config.grid.extent - 1.0).min(6.0),
        diag_every: 8,
    }
}

fn internal<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

pub fn background_residual(ctx: &Context) -> Result<ReportBundle, CliError> {
    let bg = &ctx.background;
    let mut checks = vec![CheckRecord::le("background/residual", bg.residual, 1e-12)];
    let thermo = ctx
        .model
        .eos
        .thermo_from_p(bg.s_bar, bg.p_bar)
        .map_err(internal)?;
    let source = thermo.rho - 3.0 * bg.p_bar;
    let canonical = (source - 1.0).abs() < 1e-12 && (bg.kappa - 1.0).abs() < 1e-12;
    if canonical {
        checks.push(CheckRecord::le(
            "background/phi-band",
            (bg.phi_bar + 0.3005).abs(),
            5e-4,
        ));
        checks.push(CheckRecord::le(
            "background/p-weighted-is-minus-phi",
            (bg.p_weighted + bg.phi_bar).abs(),
            1e-10,
        ));
    }
    let rows = vec![
        format!("phi_bar,{}", bg.phi_bar),
        format!("p_weighted,{}", bg.p_weighted),
        format!("residual,{}", bg.residual),
        format!("source,{}", source),
    ];
    let path = write_csv(ctx, "background.csv", "quantity,value", &rows)?;
    Ok(ReportBundle {
        checks,
        files: vec![path],
    })
}

pub fn char_geometry_sweep(ctx: &Context) -> Result<ReportBundle, CliError> {
    let eos = &ctx.model.eos;
    let mut rng = rng(ctx, 1);
    let mut rows = Vec::new();
    let mut worst_product = 0.0f64;
    let mut worst_im = 0.0f64;
    let mut real_failures = 0usize;
    let mut samples = 0usize;
    while samples < 1000 {
        let v = sampling::admissible_state(&mut rng);
        let xi = sampling::core_covector(&mut rng);
        let ups = sampling::any_covector(&mut rng);
        let d = characteristic_form(eos, &v, &xi, DEFAULT_SHEET_TOL).map_err(internal)?;
        // Product of factors against the assembled value: exact identity
        // of the decomposition.
        let rebuilt = d.xi0.powi(3) * d.u_dot_xi.powi(3) * d.hinv_xx * d.ginv_xx;
        worst_product =
            worst_product.max((rebuilt - d.value).abs() / d.value.abs().max(1e-300));
        match hyperbolic_roots(eos, &v, &xi, &ups) {
            Ok(r) => {
                let scale = r.roots.iter().fold(1e-12f64, |m, c| m.max(c.norm()));
                for root in &r.roots {
                    worst_im = worst_im.max(root.im.abs() / scale);
                }
                if !r.hyperbolic {
                    real_failures += 1;
                }
                rows.push(format!(
                    "{samples},{},{},{},{},{},{},{}",
                    xi.0[0],
                    xi.0[1],
                    xi.0[2],
                    xi.0[3],
                    d.value,
                    d.sheets.len(),
                    r.roots.len()
                ));
                samples += 1;
            }
            Err(enkappa::geometry::GeometryError::ParallelDirections) => {}
            Err(e) => return Err(internal(e)),
        }
    }
    // Canonical sheet classifications at the desk state.
    let star = enkappa::canonical::state_star();
    let time = characteristic_form(eos, &star, &Covector([1.0, 0.0, 0.0, 0.0]), DEFAULT_SHEET_TOL)
        .map_err(internal)?;
    let null = characteristic_form(eos, &star, &Covector([1.0, 1.0, 0.0, 0.0]), DEFAULT_SHEET_TOL)
        .map_err(internal)?;
    let plane = characteristic_form(eos, &star, &Covector([0.0, 1.0, 0.0, 0.0]), DEFAULT_SHEET_TOL)
        .map_err(internal)?;

    // Cone inclusions by direct sampling.
    let mut cone_ok = true;
    let mut hits = 0;
    while hits < 1000 {
        let v = sampling::admissible_state(&mut rng);
        let pair = acoustical_metrics(eos, &v).map_err(internal)?;
        let xi = sampling::any_covector(&mut rng);
        if xi.minkowski_sq() < 0.0 {
            hits += 1;
            cone_ok &= pair.hinv_form(&xi) < 0.0;
        }
    }

    let checks = vec![
        CheckRecord::le("char/factorization-defect", worst_product, 1e-12),
        CheckRecord::le("char/max-imaginary-part", worst_im, 1e-7),
        CheckRecord::flag("char/all-roots-real", real_failures == 0),
        CheckRecord::le("char/canonical-time-value", (time.value - 3.75).abs(), 1e-12),
        CheckRecord::le("char/canonical-null-value", null.value.abs(), 1e-12),
        CheckRecord::flag(
            "char/canonical-plane-sheets",
            plane.sheets
                == vec![
                    enkappa::geometry::Sheet::PlaneU,
                    enkappa::geometry::Sheet::PlaneTime,
                ],
        ),
        CheckRecord::flag("char/cotimelike-inclusion", cone_ok),
    ];
    let path = write_csv(
        ctx,
        "char_sweep.csv",
        "sample,xi0,xi1,xi2,xi3,value,sheets,roots",
        &rows,
    )?;
    Ok(ReportBundle {
        checks,
        files: vec![path],
    })
}

pub fn energy_positivity_sweep(ctx: &Context) -> Result<ReportBundle, CliError> {
    let model = &ctx.model;
    let mut rng = rng(ctx, 2);
    let states: Vec<StateVector> = (0..1000).map(|_| sampling::admissible_state(&mut rng)).collect();
    let covectors: Vec<Covector> = (0..1000).map(|_| sampling::core_covector(&mut rng)).collect();
    let mut pd_failures = 0usize;
    let mut min_eig = f64::INFINITY;
    for (i, v) in states.iter().enumerate() {
        for (j, xi) in covectors.iter().enumerate() {
            let form = current_form(model, v, xi).map_err(internal)?;
            if !form.is_positive_definite() {
                pd_failures += 1;
            }
            if (i + j) % 101 == 0 {
                min_eig = min_eig.min(form.min_eigenvalue());
            }
        }
    }
    let bx = state_box(ctx);
    let uc = uniform_constant(model, &bx, 1000, &mut rng).map_err(internal)?;
    let mut sandwich_ok = true;
    for _ in 0..1000 {
        let mut v = [0.0; 10];
        for c in 0..10 {
            v[c] = rng.gen_range(bx.lower[c]..=bx.upper[c]);
        }
        let vdot = sampling::unit_variation(&mut rng);
        let j0 = current_value(model, &StateVector(v), &vdot)
            .map_err(internal)?
            .j0;
        sandwich_ok &= j0 >= uc.c_box - 1e-12 && j0 <= 1.0 / uc.c_box + 1e-12;
    }
    let star = enkappa::canonical::state_star();
    let uc_star = uniform_constant(model, &AdmissibleBox::new(star.0, star.0), 10, &mut rng)
        .map_err(internal)?;

    let checks = vec![
        CheckRecord::flag("energy/positive-definite-1e6-pairs", pd_failures == 0),
        CheckRecord::ge("energy/min-sampled-eigenvalue", min_eig, 1e-12),
        CheckRecord::flag("energy/c-box-in-unit-interval", uc.c_box > 0.0 && uc.c_box < 1.0),
        CheckRecord::flag("energy/sandwich-1000-variations", sandwich_ok),
        CheckRecord::le("energy/point-box-constant", (uc_star.c_box - 0.2).abs(), 1e-12),
    ];
    let argmin: Vec<String> = uc.argmin_state.0.iter().map(|x| x.to_string()).collect();
    let rows = vec![
        format!("c_box,{}", uc.c_box),
        format!("lambda_min,{}", uc.lambda_min),
        format!("lambda_max,{}", uc.lambda_max),
        format!("argmin_state,{}", argmin.join(";")),
        format!("pd_failures,{pd_failures}"),
    ];
    let path = write_csv(ctx, "energy_sweep.csv", "quantity,value", &rows)?;
    Ok(ReportBundle {
        checks,
        files: vec![path],
    })
}

pub fn gaussian_pulse_1d(ctx: &Context) -> Result<ReportBundle, CliError> {
    let model = &ctx.model;
    let bg = &ctx.background;
    let grid = grid(ctx)?;

    // Equilibrium preservation over 1000 steps.
    let dt = ctx.config.solver.cfl * grid.spacing();
    let mut cfg = solver_config(ctx, 1000.0 * dt);
    cfg.diag_every = usize::MAX;
    let quiet = integrate_nonlinear(model, &StateField::constant(grid, &bg.v_bar), &cfg)
        .map_err(internal)?;
    let drift = quiet.final_state().sup_distance(&bg.v_bar);

    // Pulse run with the diagnostics stream.
    let mut cfg = solver_config(ctx, ctx.config.solver.t_final.min(2.0));
    cfg.diag_every = 8;
    let data = pulse_data(bg, grid, PULSE_AMPLITUDE);
    let traj = integrate_nonlinear(model, &data, &cfg).map_err(internal)?;
    let rows: Vec<String> = traj
        .diagnostics
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{},{},{}",
                r.t, r.l2, r.hn, r.sup, r.e_cone, r.constraint_defect, r.cone_deviation
            )
        })
        .collect();
    let path = write_csv(
        ctx,
        "pulse_diagnostics.csv",
        "t,L2,HN,sup,E_cone,constraint_defect,cone_deviation",
        &rows,
    )?;

    // Convergence order across grid doublings.
    let order = richardson_order(model, bg, grid.points, PULSE_AMPLITUDE, &solver_config(ctx, 0.5))
        .map_err(internal)?;

    // psi-constraint defect at the h^2 scale.
    let h = grid.spacing();
    let psi_defect = traj
        .diagnostics
        .iter()
        .map(|r| r.constraint_defect)
        .fold(0.0f64, f64::max);

    // Conical energy: Gronwall fit stable under dt halving, sandwich
    // against the box constant, and exact non-increase for the
    // sourceless variation on the quiet background.
    let cone = ConeSpec {
        r: (ctx.config.grid.extent - 1.0).min(6.0),
        center: [0.0; 3],
    };
    let mut sample_rng = rng(ctx, 3);
    let c_box = uniform_constant(model, &state_box(ctx), 1000, &mut sample_rng)
        .map_err(internal)?
        .c_box;
    let mut gronwall = Vec::new();
    let mut sandwich_excess = f64::NEG_INFINITY;
    for halving in [1.0, 2.0] {
        let mut cfg = solver_config(ctx, 1.0);
        cfg.cfl /= halving;
        cfg.diag_every = usize::MAX;
        let traj = integrate_nonlinear(model, &pulse_data(bg, grid, PULSE_AMPLITUDE), &cfg)
            .map_err(internal)?;
        let var = subtract_reference(&traj, &bg.v_bar);
        let report = energy_monitor(model, &traj, &var, &cone, cfg.n_sobolev, c_box)
            .map_err(internal)?;
        sandwich_excess = sandwich_excess.max(report.sandwich_excess);
        gronwall.push(report.gronwall_c);
    }
    let gronwall_spread =
        (gronwall[0] - gronwall[1]).abs() / gronwall[0].abs().max(gronwall[1].abs()).max(1e-300);

    let quiet_increase = {
        let mut cfg = solver_config(ctx, 1.0);
        cfg.dissipation = 0.0;
        cfg.diag_every = usize::MAX;
        let dtq = cfg.t_final
            / (cfg.t_final / (cfg.cfl * grid.spacing())).ceil();
        let background =
            Trajectory::constant_in_time(StateField::constant(grid, &bg.v_bar), cfg.t_final, dtq);
        let packet = {
            let mut f = StateField::zeros(grid);
            let shape = ScalarField::from_fn(grid, |x| {
                1e-2 * (-x[0] * x[0] / 0.5).exp() * (3.0 * x[0]).cos()
            });
            f.set_component(6, &shape);
            f
        };
        let traj = enkappa::solver::solve_linearized(
            model,
            &background,
            &packet,
            enkappa::solver::LinearSource::Zero,
            &cfg,
        )
        .map_err(internal)?;
        energy_monitor(model, &background, &traj, &cone, cfg.n_sobolev, c_box)
            .map_err(internal)?
            .max_increase
    };

    let checks = vec![
        CheckRecord::le("pulse/equilibrium-drift-per-step", drift / 1000.0, 1e-12),
        CheckRecord::le("pulse/richardson-order-error", (order - 2.0).abs(), 0.3),
        CheckRecord::le("pulse/psi-constraint-defect", psi_defect, h * h),
        CheckRecord::le("pulse/gronwall-dt-spread", gronwall_spread, 0.2),
        CheckRecord::le("pulse/energy-sandwich-excess", sandwich_excess, 1e-10),
        CheckRecord::le("pulse/quiet-cone-energy-increase", quiet_increase, 1e-8),
    ];
    Ok(ReportBundle {
        checks,
        files: vec![path],
    })
}

fn subtract_reference(traj: &Trajectory, reference: &StateVector) -> Trajectory {
    Trajectory {
        times: traj.times.clone(),
        snapshots: traj
            .snapshots
            .iter()
            .map(|s| {
                let mut d = s.clone();
                for row in d.data.iter_mut() {
                    for c in 0..10 {
                        row[c] -= reference.0[c];
                    }
                }
                d
            })
            .collect(),
        diagnostics: Vec::new(),
        dt: traj.dt,
    }
}

pub fn picard_contraction(ctx: &Context) -> Result<ReportBundle, CliError> {
    let model = &ctx.model;
    let bg = &ctx.background;
    let grid = grid(ctx)?;
    let data = pulse_data(bg, grid, PICARD_AMPLITUDE);
    let moll = MollifierSpec::new(PICARD_EPS0);
    let (t_star, run) = picard_with_time_selection(
        model,
        &data,
        &solver_config(ctx, ctx.config.solver.t_final),
        &moll,
        6,
        0.5,
        6,
    )
    .map_err(internal)?;
    let floor = 1e-13 * (1.0 + run.tube_radius);
    let contraction_ok = run
        .diffs
        .windows(2)
        .all(|w| w[1] <= 0.5 * w[0] || w[1] <= floor);
    let tube_ok = run.tube_norms.iter().all(|n| *n <= run.tube_radius);
    let eps_ok = run
        .eps
        .iter()
        .enumerate()
        .all(|(m, &e)| e == PICARD_EPS0 * 0.5f64.powi(m as i32));
    let rows: Vec<String> = (0..run.eps.len())
        .map(|m| {
            format!(
                "{m},{},{},{}",
                run.eps[m],
                run.tube_norms[m],
                if m == 0 {
                    0.0
                } else {
                    run.diffs[m - 1]
                }
            )
        })
        .collect();
    let path = write_csv(ctx, "picard.csv", "m,eps,tube_norm,diff", &rows)?;
    let checks = vec![
        CheckRecord::flag("picard/contraction-halves", contraction_ok),
        CheckRecord::flag("picard/iterates-in-tube", tube_ok),
        CheckRecord::flag("picard/eps-ladder-exact", eps_ok),
        CheckRecord::ge("picard/selected-time", t_star, 1e-3),
    ];
    Ok(ReportBundle {
        checks,
        files: vec![path],
    })
}

pub fn causality(ctx: &Context) -> Result<ReportBundle, CliError> {
    let model = &ctx.model;
    let bg = &ctx.background;
    let mut devs = Vec::new();
    let mut reports = Vec::new();
    for factor in [1usize, 2] {
        let grid = Grid::new(ctx.config.grid.dim, ctx.config.grid.points * factor, ctx.config.grid.extent)
            .map_err(internal)?;
        let data = pulse_data(bg, grid, PULSE_AMPLITUDE);
        let traj = integrate_nonlinear(model, &data, &solver_config(ctx, 2.0)).map_err(internal)?;
        let report = causality_report(&traj, &bg.v_bar, SUPPORT_RADIUS);
        devs.push(report.iter().map(|r| r.1).fold(0.0f64, f64::max));
        reports.push(report);
    }
    let rows: Vec<String> = reports[0]
        .iter()
        .map(|(t, d)| {
            // The finer run stores twice as many steps; sample every other.
            let idx = reports[1]
                .iter()
                .position(|(tf, _)| (tf - t).abs() < 1e-9)
                .unwrap_or(0);
            format!("{t},{d},{}", reports[1][idx].1)
        })
        .collect();
    let path = write_csv(ctx, "causality.csv", "t,deviation,deviation_refined", &rows)?;
    let checks = vec![
        CheckRecord::le("causality/max-deviation", devs[0], 1e-6),
        CheckRecord::flag("causality/decreases-under-refinement", devs[1] < devs[0]),
    ];
    Ok(ReportBundle {
        checks,
        files: vec![path],
    })
}

pub fn dependence(ctx: &Context) -> Result<ReportBundle, CliError> {
    let model = &ctx.model;
    let bg = &ctx.background;
    let grid = grid(ctx)?;
    let data = pulse_data(bg, grid, PULSE_AMPLITUDE);
    let pert = pulse_data(bg, grid, PULSE_AMPLITUDE).sub(&StateField::constant(grid, &bg.v_bar));
    let n_prime = ctx.config.solver.sobolev_order - 1;
    let report = dependence_experiment(
        model,
        &data,
        &pert,
        &[1e-2, 1e-3, 1e-4],
        &solver_config(ctx, 0.5),
        n_prime,
    )
    .map_err(internal)?;
    let rows: Vec<String> = report
        .ratios
        .iter()
        .map(|(l, r)| format!("{l},{r}"))
        .collect();
    let path = write_csv(ctx, "dependence.csv", "lambda,ratio", &rows)?;
    let checks = vec![
        CheckRecord::le("dependence/lipschitz-spread", report.ratio_spread, 2.0),
        CheckRecord::le(
            "dependence/interpolation-exponent-error",
            (report.exponent - report.exponent_expected).abs(),
            0.25,
        ),
    ];
    Ok(ReportBundle {
        checks,
        files: vec![path],
    })
}

pub fn appendix_inequalities(ctx: &Context) -> Result<ReportBundle, CliError> {
    let grid = Grid::new_1d(256, std::f64::consts::PI).map_err(internal)?;
    let family: Vec<(f64, f64)> = [0.1, 0.5, 1.0, 2.0]
        .iter()
        .flat_map(|&a| (1..=5).map(move |k| (a, k as f64)))
        .collect();
    let mut rows = Vec::new();
    let mut sup = [0.0f64; 4];
    for &(a, k) in &family {
        let f = ScalarField::from_fn(grid, |x| a * (k * x[0]).sin());
        let gn = gn_ratio(&f, 1, 2).map_err(internal)?.ratio;
        let v = vec![f.clone()];
        let g = vec![
            ScalarField::from_fn(grid, |x| (2.0 * x[0]).cos()),
            ScalarField::from_fn(grid, |x| (3.0 * x[0]).sin()),
        ];
        let fm = |vals: &[f64]| {
            vec![
                vec![1.0 + vals[0] * vals[0], 0.3 * vals[0]],
                vec![0.3 * vals[0], 1.0 + vals[0] * vals[0]],
            ]
        };
        let product = product_ratio(&fm, &v, &g, 3).map_err(internal)?.ratio;
        let v2 = vec![f.map(|x| x + 0.05)];
        let comp = composition_diff_ratio(&|vals: &[f64]| vals[0].exp(), &v, &v2, 2)
            .map_err(internal)?
            .ratio;
        let comm = commutator_ratio(
            &|vals: &[f64]| 1.0 + vals[0] * vals[0],
            &v,
            &g[0],
            3,
            &[2, 0, 0],
        )
        .map_err(internal)?
        .ratio;
        for (slot, r) in sup.iter_mut().zip([gn, product, comp, comm]) {
            *slot = slot.max(r);
        }
        rows.push(format!("{a},{k},{gn},{product},{comp},{comm}"));
    }
    let f = ScalarField::from_fn(grid, |x| (2.0 * x[0]).sin() + 0.4 * (5.0 * x[0]).cos());
    let interp = interpolation_ratio(&f, 0.0, 3.0).map_err(internal)?;
    let path = write_csv(
        ctx,
        "appendix.csv",
        "amplitude,frequency,gn,product,composition_diff,commutator",
        &rows,
    )?;
    let checks = vec![
        CheckRecord::le("appendix/gn-sup-ratio", sup[0], 1e3),
        CheckRecord::le("appendix/product-sup-ratio", sup[1], 1e3),
        CheckRecord::le("appendix/composition-sup-ratio", sup[2], 1e3),
        CheckRecord::le("appendix/commutator-sup-ratio", sup[3], 1e3),
        CheckRecord::le(
            "appendix/interpolation-identity",
            (interp.ratio - 1.0).abs(),
            1e-10,
        ),
    ];
    Ok(ReportBundle {
        checks,
        files: vec![path],
    })
}
