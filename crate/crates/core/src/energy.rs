//! Energy currents for variations.
//!
//! Given a background state and a variation V̇, the current J̇ is quadratic
//! in V̇, its time component controls |V̇|², and its divergence contains no
//! derivatives of V̇ — the working substitute for symmetric-hyperbolic
//! energy estimates.

use crate::state::{AdmissibleBox, DerivedFluid, Model, StateError, StateVector};
use crate::geometry::Covector;
use nalgebra::SMatrix;
use rand::Rng;
use thiserror::Error;

pub type Matrix10 = SMatrix<f64, 10, 10>;

#[derive(Debug, Error, PartialEq)]
pub enum EnergyError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Eos(#[from] crate::eos::EosError),
    #[error("box touches the admissibility boundary (S or P floor is not positive)")]
    BoxTouchesBoundary,
}

/// Pointwise value of the current: time component and spatial components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentValue {
    pub j0: f64,
    pub j: [f64; 3],
}

/// The symmetric matrix M with ξ_μ J̇^μ(V̇, V̇) = V̇ᵀ M V̇.
#[derive(Debug, Clone)]
pub struct FormMatrix {
    pub m: Matrix10,
}

impl FormMatrix {
    pub fn eval(&self, vdot: &StateVector) -> f64 {
        let x = nalgebra::SVector::<f64, 10>::from_row_slice(&vdot.0);
        (x.transpose() * self.m * x)[(0, 0)]
    }

    pub fn eigenvalues(&self) -> [f64; 10] {
        let eig = self.m.symmetric_eigen();
        let mut out = [0.0; 10];
        for (dst, src) in out.iter_mut().zip(eig.eigenvalues.iter()) {
            *dst = *src;
        }
        out.sort_by(f64::total_cmp);
        out
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// λ_min > 0, decided by Cholesky.
    pub fn is_positive_definite(&self) -> bool {
        nalgebra::Cholesky::new(self.m).is_some()
    }
}

/// Uniform two-sided bound for J̇⁰ over a box: C|V̇|² ≤ J̇⁰ ≤ C⁻¹|V̇|².
#[derive(Debug, Clone)]
pub struct UniformConstant {
    pub c_box: f64,
    pub samples: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub argmin_state: StateVector,
}

/// J̇ = (J̇⁰, J̇^j) for the variation `vdot` with coefficients at `bg`.
pub fn current_value(
    model: &Model,
    bg: &StateVector,
    vdot: &StateVector,
) -> Result<CurrentValue, EnergyError> {
    let d = model.complete_state(bg)?;
    let u4 = bg.u4();
    let u0 = u4[0];
    let sdot = vdot.s();
    let pdot = vdot.p();
    let udot = vdot.u();
    let phidot = vdot.phi();
    let psidot = vdot.psi();
    let u_dot_udot: f64 = (0..3).map(|k| u4[k + 1] * udot[k]).sum();
    let udot_sq: f64 = udot.iter().map(|x| x * x).sum();
    let fluid_bracket = udot_sq - (u_dot_udot / u0).powi(2);
    let psi_sq: f64 = phidot * phidot + psidot.iter().map(|x| x * x).sum::<f64>();

    let j0 = u0 * sdot * sdot
        + u0 / d.q * pdot * pdot
        + 2.0 * (u_dot_udot / u0) * pdot
        + (d.r + bg.p()) * u0 * fluid_bracket
        + 0.5 * psi_sq;
    let mut j = [0.0; 3];
    for k in 0..3 {
        j[k] = u4[k + 1] * sdot * sdot
            + u4[k + 1] / d.q * pdot * pdot
            + 2.0 * udot[k] * pdot
            + (d.r + bg.p()) * u4[k + 1] * fluid_bracket
            - psidot[0] * psidot[k + 1];
    }
    Ok(CurrentValue { j0, j })
}

/// Assembles the form matrix of ξ_μJ̇^μ at a background state.
pub fn current_form(
    model: &Model,
    bg: &StateVector,
    xi: &Covector,
) -> Result<FormMatrix, EnergyError> {
    let d = model.complete_state(bg)?;
    Ok(form_from_derived(&d, bg, xi))
}

fn form_from_derived(d: &DerivedFluid, bg: &StateVector, xi: &Covector) -> FormMatrix {
    let u4 = bg.u4();
    let u0 = u4[0];
    let u_dot_xi: f64 = u4[0] * xi.0[0] + u4[1] * xi.0[1] + u4[2] * xi.0[2] + u4[3] * xi.0[3];
    let rp = d.r + bg.p();
    let mut m = Matrix10::zeros();
    m[(0, 0)] = u_dot_xi;
    m[(1, 1)] = u_dot_xi / d.q;
    for k in 0..3 {
        let ck = xi.0[0] * u4[k + 1] / u0 + xi.0[k + 1];
        m[(1, 2 + k)] = ck;
        m[(2 + k, 1)] = ck;
        for l in 0..3 {
            let delta = if k == l { 1.0 } else { 0.0 };
            m[(2 + k, 2 + l)] = u_dot_xi * rp * (delta - u4[k + 1] * u4[l + 1] / (u0 * u0));
        }
    }
    m[(5, 5)] = 0.5 * xi.0[0];
    m[(6, 6)] = 0.5 * xi.0[0];
    for j in 0..3 {
        m[(7 + j, 7 + j)] = 0.5 * xi.0[0];
        m[(6, 7 + j)] = -0.5 * xi.0[j + 1];
        m[(7 + j, 6)] = -0.5 * xi.0[j + 1];
    }
    FormMatrix { m }
}

/// Samples the box and returns C = min over samples of
/// min(λ_min(M₀), 1/λ_max(M₀)) for the ξ = (1,0,0,0) form, clamped into
/// (0, 1). Sampling is deterministic for a fixed generator state.
pub fn uniform_constant<R: Rng>(
    model: &Model,
    bx: &AdmissibleBox,
    samples: usize,
    rng: &mut R,
) -> Result<UniformConstant, EnergyError> {
    if !bx.strictly_admissible() {
        return Err(EnergyError::BoxTouchesBoundary);
    }
    let xi = Covector::time();
    let mut c = f64::INFINITY;
    let mut lambda_min = f64::INFINITY;
    let mut lambda_max = f64::NEG_INFINITY;
    let mut argmin = StateVector([0.0; 10]);
    let visit = |v: StateVector,
                     c: &mut f64,
                     lambda_min: &mut f64,
                     lambda_max: &mut f64,
                     argmin: &mut StateVector|
     -> Result<(), EnergyError> {
        let form = current_form(model, &v, &xi)?;
        let eigs = form.eigenvalues();
        let (lo, hi) = (eigs[0], eigs[9]);
        *lambda_min = lambda_min.min(lo);
        *lambda_max = lambda_max.max(hi);
        let cand = lo.min(1.0 / hi);
        if cand < *c {
            *c = cand;
            *argmin = v;
        }
        Ok(())
    };
    // Corners stress the extremes; the rest of the budget is uniform draws.
    for corner in 0..(1usize << 10).min(samples) {
        let mut v = [0.0; 10];
        for i in 0..10 {
            v[i] = if corner >> i & 1 == 1 {
                bx.upper[i]
            } else {
                bx.lower[i]
            };
        }
        visit(StateVector(v), &mut c, &mut lambda_min, &mut lambda_max, &mut argmin)?;
    }
    for _ in 0..samples {
        let mut v = [0.0; 10];
        for i in 0..10 {
            v[i] = rng.gen_range(bx.lower[i]..=bx.upper[i]);
        }
        visit(StateVector(v), &mut c, &mut lambda_min, &mut lambda_max, &mut argmin)?;
    }
    let c_box = c.clamp(f64::MIN_POSITIVE, 1.0 - 1e-12);
    Ok(UniformConstant {
        c_box,
        samples,
        lambda_min,
        lambda_max,
        argmin_state: argmin,
    })
}

/// Inputs for the divergence identity at one grid point: the background,
/// all ten of its first spacetime derivatives, the variation, and the
/// inhomogeneities of the linearized system it solves.
#[derive(Debug, Clone, Copy)]
pub struct DivergencePoint {
    pub bg: StateVector,
    /// dbg[μ][c] = ∂_μ of component c of the background.
    pub dbg: [[f64; 10]; 4],
    pub vdot: StateVector,
    /// b = (f, g, h¹, h², h³).
    pub b: [f64; 5],
    /// l = (l⁰, l¹, l², l³, l⁴).
    pub l: [f64; 5],
}

/// The closed form of ∂_μJ̇^μ: every coefficient derivative is expanded via
/// the chain rule, and no derivative of the variation appears.
pub fn divergence_rhs(model: &Model, pt: &DivergencePoint) -> Result<f64, EnergyError> {
    let bg = &pt.bg;
    let d = model.complete_state(bg)?;
    let e4 = (4.0 * bg.phi()).exp();
    let p_orig = bg.p() / e4;
    let s = bg.s();

    // Partials of R = 𝕽(S,P,φ) and Q = 𝔔(S,P,φ).
    let rho_p = model.eos.rho_p(s, p_orig)?;
    let rho_s = model.eos.rho_s(s, p_orig)?;
    let sig2 = d.sigma * d.sigma;
    let sig2_p = model.eos.sigma2_p(s, p_orig)?;
    let sig2_s = model.eos.sigma2_s(s, p_orig)?;
    let r_s = e4 * rho_s;
    let r_p = rho_p;
    let r_phi = 4.0 * (d.r - bg.p() * rho_p);
    let rp_sum = d.r + bg.p();
    let q_s = sig2_s * rp_sum + sig2 * r_s;
    let q_p = sig2_p / e4 * rp_sum + sig2 * (r_p + 1.0);
    let q_phi = sig2_p * (-4.0 * p_orig) * rp_sum + sig2 * r_phi;

    let u4 = bg.u4();
    let u0 = u4[0];
    // ∂_μ of S, P, φ, U^k read straight from the derivative table.
    let ds = |mu: usize| pt.dbg[mu][0];
    let dp = |mu: usize| pt.dbg[mu][1];
    let dphi = |mu: usize| pt.dbg[mu][5];
    let du = |mu: usize, k: usize| pt.dbg[mu][2 + k];

    let dq = |mu: usize| q_s * ds(mu) + q_p * dp(mu) + q_phi * dphi(mu);
    let dr = |mu: usize| r_s * ds(mu) + r_p * dp(mu) + r_phi * dphi(mu);
    let du0 = |mu: usize| (0..3).map(|k| u4[k + 1] * du(mu, k)).sum::<f64>() / u0;

    let div_u = du0(0) + (0..3).map(|k| du(k + 1, k)).sum::<f64>();
    let u_grad = |f: &dyn Fn(usize) -> f64| (0..4).map(|mu| u4[mu] * f(mu)).sum::<f64>();

    let sdot = pt.vdot.s();
    let pdot = pt.vdot.p();
    let udot = pt.vdot.u();
    let phidot = pt.vdot.phi();
    let psidot = pt.vdot.psi();
    let u_dot_udot: f64 = (0..3).map(|k| u4[k + 1] * udot[k]).sum();
    let udot_sq: f64 = udot.iter().map(|x| x * x).sum();
    let fluid_bracket = udot_sq - (u_dot_udot / u0).powi(2);

    // ∂₀(U_k/U⁰) U̇^k.
    let mut d0_uk_over_u0_udot = 0.0;
    for k in 0..3 {
        d0_uk_over_u0_udot += (du(0, k) / u0 - u4[k + 1] * du0(0) / (u0 * u0)) * udot[k];
    }
    // E_j U̇^j with E_j = U^μ ∂_μ(U_j/U⁰).
    let mut e_udot = 0.0;
    for j in 0..3 {
        let e_j = (0..4)
            .map(|mu| u4[mu] * (du(mu, j) / u0 - u4[j + 1] * du0(mu) / (u0 * u0)))
            .sum::<f64>();
        e_udot += e_j * udot[j];
    }

    let div_u_over_q = div_u / d.q - u_grad(&dq) / (d.q * d.q);
    let div_rp_u = u_grad(&|mu| dr(mu) + dp(mu)) + rp_sum * div_u;

    let u_h: f64 = (0..3).map(|j| u4[j + 1] * pt.b[2 + j]).sum();
    let udot_h: f64 = (0..3).map(|k| udot[k] * pt.b[2 + k]).sum();
    let psidot_l: f64 = (0..3).map(|k| psidot[k + 1] * pt.l[1 + k]).sum();

    Ok(div_u * sdot * sdot
        + div_u_over_q * pdot * pdot
        + 2.0 * d0_uk_over_u0_udot * pdot
        + div_rp_u * fluid_bracket
        - 2.0 * u_dot_udot * rp_sum * e_udot / u0
        + 2.0 * sdot * pt.b[0]
        + 2.0 * pdot * pt.b[1] / d.q
        + 2.0 * udot_h
        - 2.0 * u_h * u_dot_udot / (u0 * u0)
        - psidot[0] * pt.l[0]
        + psidot_l
        + phidot * pt.l[4])
}
