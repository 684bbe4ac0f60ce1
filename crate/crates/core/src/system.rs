//! The first-order system and its linearization.
//!
//! The fluid half (S, P, U) is carried in matrix form A^μ(V)∂_μW = b(V);
//! the scalar-gravity half is a constant-coefficient first-order reduction
//! of the wave equation with source terms l(V). This module evaluates the
//! coefficient matrices, the linearization inhomogeneities, pointwise
//! residuals of both the nonlinear and linearized systems, and the
//! commutator terms that appear when the fluid half is differentiated.

use crate::field::{derivative, same_grid, FieldError, Scheme, StateField};
use crate::state::{Model, StateError, StateVector};
use nalgebra::{Matrix5, Vector5};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SystemError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("derivative order {got} exceeds the configured maximum {max}")]
    OrderTooHigh { got: usize, max: usize },
}

/// The four 5×5 coefficient matrices of the fluid half, evaluated at one
/// background state, with the scalars the determinant formula needs.
#[derive(Debug, Clone)]
pub struct CoeffMatrices {
    pub a0: Matrix5<f64>,
    pub ak: [Matrix5<f64>; 3],
    pub q: f64,
    pub r: f64,
    pub p: f64,
    pub u0: f64,
    /// (h⁻¹)⁰⁰ = −1 − (σ⁻² − 1)(U⁰)².
    pub hinv00: f64,
}

impl CoeffMatrices {
    /// −Q(R+P)²(U⁰)³, the state prefactor in the symbol determinant
    /// det(A^μξ_μ) = −Q(R+P)² (U·ξ)³ h⁻¹(ξ,ξ); at ξ = (1,0,0,0) the
    /// determinant reduces to this prefactor times (h⁻¹)⁰⁰.
    pub fn symbol_prefactor(&self) -> f64 {
        let rp = self.r + self.p;
        -self.q * rp * rp * self.u0.powi(3)
    }

    /// Closed form of det A⁰: −Q(R+P)²(U⁰)³ · (h⁻¹)⁰⁰. Positive on
    /// admissible states, so A⁰ is invertible there.
    pub fn det_a0_closed(&self) -> f64 {
        self.symbol_prefactor() * self.hinv00
    }

    /// LU determinant of the assembled A⁰, the numeric route.
    pub fn det_a0_numeric(&self) -> f64 {
        self.a0.determinant()
    }
}

/// Inhomogeneous terms of the linearized system at one point:
/// b = (f, g, h¹, h², h³) for the fluid half, l = (l⁰, .., l⁴) for the
/// scalar-gravity half.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InhomTerms {
    pub b: [f64; 5],
    pub l: [f64; 5],
}

impl InhomTerms {
    pub fn zero() -> Self {
        InhomTerms {
            b: [0.0; 5],
            l: [0.0; 5],
        }
    }
}

/// A spatial derivative multi-index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultiIndex(pub [usize; 3]);

impl MultiIndex {
    pub fn order(&self) -> usize {
        self.0.iter().sum()
    }

    /// All multi-indices with |α| ≤ n over the first `dim` axes.
    pub fn up_to(n: usize, dim: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let cap = |d: usize| if d < dim { n } else { 0 };
        for a in 0..=cap(0) {
            for b in 0..=cap(1) {
                for c in 0..=cap(2) {
                    if a + b + c <= n {
                        out.push(MultiIndex([a, b, c]));
                    }
                }
            }
        }
        out.sort_by_key(|m| m.order());
        out
    }
}

/// Inhomogeneities of the differentiated fluid half:
/// b_α = A⁰ ∂_α((A⁰)⁻¹ b) + k_α with k_α the commutator defect.
#[derive(Debug, Clone)]
pub struct DifferentiatedInhom {
    pub b_alpha: Vec<[f64; 5]>,
    pub k_alpha: Vec<[f64; 5]>,
    pub alpha: MultiIndex,
}

impl Model {
    /// A⁰ and the three A^k at a background state. A⁰ follows the printed
    /// form; the A^k are read off the spatial-derivative coefficients of
    /// the three fluid equations (transport row, pressure row with the
    /// Q-weighted divergence, momentum rows with the projection).
    pub fn coeff_matrices(&self, v: &StateVector) -> Result<CoeffMatrices, SystemError> {
        let d = self.complete_state(v)?;
        let u4 = v.u4();
        let u0 = u4[0];
        let rp = d.r + v.p();
        let mut a0 = Matrix5::zeros();
        a0[(0, 0)] = u0;
        a0[(1, 1)] = u0;
        for k in 0..3 {
            a0[(1, 2 + k)] = d.q * u4[1 + k] / u0;
            a0[(2 + k, 1)] = d.pi[0][1 + k];
            a0[(2 + k, 2 + k)] = rp * u0;
        }
        let mut ak = [Matrix5::zeros(); 3];
        for k in 0..3 {
            let m = &mut ak[k];
            m[(0, 0)] = u4[1 + k];
            m[(1, 1)] = u4[1 + k];
            m[(1, 2 + k)] = d.q;
            for j in 0..3 {
                m[(2 + j, 1)] = d.pi[1 + k][1 + j];
                m[(2 + j, 2 + j)] = rp * u4[1 + k];
            }
        }
        let sigma2 = d.sigma * d.sigma;
        let hinv00 = -1.0 - (1.0 / sigma2 - 1.0) * u0 * u0;
        Ok(CoeffMatrices {
            a0,
            ak,
            q: d.q,
            r: d.r,
            p: v.p(),
            u0,
            hinv00,
        })
    }

    /// Linearization sources evaluated at the background state itself:
    /// f = 0, g = (4P−3Q)U^μψ_μ, h^j = (3P−R)Π^{μj}ψ_μ,
    /// l⁰ = κ²φ + R − 3P, l^j = 0, l⁴ = ψ₀.
    pub fn inhom_linearization(&self, v: &StateVector) -> Result<InhomTerms, SystemError> {
        let d = self.complete_state(v)?;
        let u4 = v.u4();
        let psi = v.psi();
        let u_psi: f64 = (0..4).map(|mu| u4[mu] * psi[mu]).sum();
        let mut b = [0.0; 5];
        b[1] = (4.0 * v.p() - 3.0 * d.q) * u_psi;
        for j in 0..3 {
            let pi_psi: f64 = (0..4).map(|mu| d.pi[mu][1 + j] * psi[mu]).sum();
            b[2 + j] = (3.0 * v.p() - d.r) * pi_psi;
        }
        let mut l = [0.0; 5];
        l[0] = self.kappa2() * v.phi() + d.r - 3.0 * v.p();
        l[4] = psi[0];
        Ok(InhomTerms { b, l })
    }

    /// Sources of the linearized system solved by the difference between an
    /// iterate and the time-independent smoothed data ⁰V̊: the background
    /// sources plus transport of the frozen data gradients.
    pub fn inhom_iterate_difference(
        &self,
        v: &StateVector,
        dsmoothed: &[[f64; 10]; 3],
    ) -> Result<InhomTerms, SystemError> {
        let d = self.complete_state(v)?;
        let base = self.inhom_linearization(v)?;
        let u4 = v.u4();
        let mut b = base.b;
        let mut l = base.l;
        for k in 0..3 {
            b[0] -= u4[1 + k] * dsmoothed[k][0];
            b[1] -= u4[1 + k] * dsmoothed[k][1] + d.q * dsmoothed[k][2 + k];
            for j in 0..3 {
                b[2 + j] -= (d.r + v.p()) * u4[1 + k] * dsmoothed[k][2 + j]
                    + d.pi[1 + k][1 + j] * dsmoothed[k][1];
            }
            // ∂^k = ∂_k for spatial indices.
            l[0] -= dsmoothed[k][6 + 1 + k];
        }
        for j in 0..3 {
            l[1 + j] = dsmoothed[j][6];
        }
        Ok(InhomTerms { b, l })
    }
}

/// Residual of the nonlinear system at every grid point: left side minus
/// right side of each of the ten scalar equations, with the supplied
/// first-derivative fields standing in for ∂₀ and ∂_k.
pub fn residual_nonlinear(
    model: &Model,
    v: &StateField,
    dt_v: &StateField,
    dx_v: &[StateField; 3],
) -> Result<StateField, SystemError> {
    same_grid(&v.grid, &dt_v.grid)?;
    for d in dx_v {
        same_grid(&v.grid, &d.grid)?;
    }
    let mut out = StateField::zeros(v.grid);
    for i in 0..v.data.len() {
        let vi = StateVector(v.data[i]);
        let inhom = model.inhom_linearization(&vi)?;
        let coeff = model.coeff_matrices(&vi)?;
        out.data[i] = residual_point(
            &coeff,
            &inhom,
            &dt_v.data[i],
            [&dx_v[0].data[i], &dx_v[1].data[i], &dx_v[2].data[i]],
        );
    }
    Ok(out)
}

/// Residual of the linearized system about a background field, for a
/// variation with supplied derivatives and sources.
pub fn residual_linearized(
    model: &Model,
    bg: &StateField,
    vdot: &StateField,
    dt_vdot: &StateField,
    dx_vdot: &[StateField; 3],
    inhom: &[InhomTerms],
) -> Result<StateField, SystemError> {
    same_grid(&bg.grid, &vdot.grid)?;
    same_grid(&bg.grid, &dt_vdot.grid)?;
    for d in dx_vdot {
        same_grid(&bg.grid, &d.grid)?;
    }
    let mut out = StateField::zeros(bg.grid);
    for i in 0..bg.data.len() {
        let bgi = StateVector(bg.data[i]);
        let coeff = model.coeff_matrices(&bgi)?;
        out.data[i] = residual_point(
            &coeff,
            &inhom[i],
            &dt_vdot.data[i],
            [&dx_vdot[0].data[i], &dx_vdot[1].data[i], &dx_vdot[2].data[i]],
        );
    }
    Ok(out)
}

/// One-point residual shared by the nonlinear system (coefficients at the
/// point itself, sources = linearization sources there) and the linearized
/// system (coefficients at the background, supplied sources).
fn residual_point(
    coeff: &CoeffMatrices,
    inhom: &InhomTerms,
    dt: &[f64; 10],
    dx: [&[f64; 10]; 3],
) -> [f64; 10] {
    let mut res = [0.0; 10];
    // Fluid half: A⁰ ∂₀W + A^k ∂_kW − b.
    for row in 0..5 {
        let mut acc = -inhom.b[row];
        for col in 0..5 {
            acc += coeff.a0[(row, col)] * dt[col];
            for k in 0..3 {
                acc += coeff.ak[k][(row, col)] * dx[k][col];
            }
        }
        res[row] = acc;
    }
    // Scalar-gravity half.
    // −∂₀ψ₀ + Σ_j ∂_jψ_j = l⁰.
    res[5 + 1] = -dt[6] + dx[0][7] + dx[1][8] + dx[2][9] - inhom.l[0];
    // ∂₀ψ_j − ∂_jψ₀ = l^j.
    for j in 0..3 {
        res[5 + 2 + j] = dt[7 + j] - dx[j][6] - inhom.l[1 + j];
    }
    // ∂₀φ = l⁴.
    res[5] = dt[5] - inhom.l[4];
    res
}

/// b_α = A⁰ ∂_α((A⁰)⁻¹ b) + k_α over a background field, with
/// k_α = A⁰ [ (A⁰)⁻¹A^k ∂_k(∂_α Ẇ) − ∂_α((A⁰)⁻¹A^k ∂_k Ẇ) ].
///
/// On a spatially constant background both matrices commute with the
/// finite differences exactly, so k_α vanishes identically.
pub fn differentiated_inhom(
    model: &Model,
    bg: &StateField,
    w_dot: &StateField,
    b: &[[f64; 5]],
    alpha: &MultiIndex,
    max_order: usize,
) -> Result<DifferentiatedInhom, SystemError> {
    if alpha.order() > max_order {
        return Err(SystemError::OrderTooHigh {
            got: alpha.order(),
            max: max_order,
        });
    }
    same_grid(&bg.grid, &w_dot.grid)?;
    let n = bg.data.len();
    let dim = bg.grid.dim;

    // Pointwise matrices.
    let mut a0_inv_b: Vec<[f64; 5]> = vec![[0.0; 5]; n];
    let mut g_terms: Vec<[f64; 5]> = vec![[0.0; 5]; n]; // (A⁰)⁻¹ A^k ∂_k Ẇ
    let mut coeffs = Vec::with_capacity(n);
    let dwx: Vec<StateField> = (0..3)
        .map(|ax| derivative_state(w_dot, ax, Scheme::Order2))
        .collect::<Result<_, _>>()?;
    for i in 0..n {
        let vi = StateVector(bg.data[i]);
        let coeff = model.coeff_matrices(&vi)?;
        let lu = coeff.a0.lu();
        let bi = Vector5::from_row_slice(&b[i]);
        let solved = lu.solve(&bi).expect("A0 invertible on admissible states");
        a0_inv_b[i] = solved.into();
        let mut acc = Vector5::zeros();
        for k in 0..dim {
            let dk = Vector5::from_row_slice(&dwx[k].data[i][..5]);
            acc += lu
                .solve(&(coeff.ak[k] * dk))
                .expect("A0 invertible on admissible states");
        }
        g_terms[i] = acc.into();
        coeffs.push(coeff);
    }

    let alpha_field = |data: Vec<[f64; 5]>| -> Result<Vec<[f64; 5]>, SystemError> {
        let mut f = StateField::zeros(bg.grid);
        for (dst, src) in f.data.iter_mut().zip(&data) {
            dst[..5].copy_from_slice(src);
        }
        let mut cur = f;
        for ax in 0..3 {
            for _ in 0..alpha.0[ax] {
                cur = derivative_state(&cur, ax, Scheme::Order2)?;
            }
        }
        Ok(cur.data.iter().map(|row| row[..5].try_into().expect("width 5")).collect())
    };

    // A⁰ ∂_α((A⁰)⁻¹ b).
    let d_alpha_ab = alpha_field(a0_inv_b)?;
    // ∂_α((A⁰)⁻¹ A^k ∂_k Ẇ).
    let d_alpha_g = alpha_field(g_terms)?;
    // (A⁰)⁻¹ A^k ∂_k(∂_α Ẇ).
    let mut w_alpha = w_dot.clone();
    for ax in 0..3 {
        for _ in 0..alpha.0[ax] {
            w_alpha = derivative_state(&w_alpha, ax, Scheme::Order2)?;
        }
    }
    let dwax: Vec<StateField> = (0..3)
        .map(|ax| derivative_state(&w_alpha, ax, Scheme::Order2))
        .collect::<Result<_, _>>()?;

    let mut b_alpha = vec![[0.0; 5]; n];
    let mut k_alpha = vec![[0.0; 5]; n];
    for i in 0..n {
        let coeff = &coeffs[i];
        let lu = coeff.a0.lu();
        let mut acc = Vector5::zeros();
        for k in 0..dim {
            let dk = Vector5::from_row_slice(&dwax[k].data[i][..5]);
            acc += lu
                .solve(&(coeff.ak[k] * dk))
                .expect("A0 invertible on admissible states");
        }
        let bracket = acc - Vector5::from_row_slice(&d_alpha_g[i]);
        let k_i = coeff.a0 * bracket;
        let b_i = coeff.a0 * Vector5::from_row_slice(&d_alpha_ab[i]) + k_i;
        k_alpha[i] = k_i.into();
        b_alpha[i] = b_i.into();
    }
    Ok(DifferentiatedInhom {
        b_alpha,
        k_alpha,
        alpha: *alpha,
    })
}

/// Componentwise finite difference of a state field.
pub fn derivative_state(
    f: &StateField,
    axis: usize,
    scheme: Scheme,
) -> Result<StateField, FieldError> {
    let mut out = StateField::zeros(f.grid);
    for c in 0..10 {
        let d = derivative(&f.component(c), axis, scheme)?;
        out.set_component(c, &d);
    }
    Ok(out)
}
