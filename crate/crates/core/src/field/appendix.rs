//! Numerical checks of the Sobolev-calculus inequalities.
//!
//! Each check returns the left side, the constant-free right-hand
//! combination, and their ratio; sweeping a function family gives an
//! empirical constant that should stay bounded.

use super::spectral::{norm_l2, norm_lp, norm_sobolev, spectral_derivative};
use super::{derivative_multi, FieldError, ScalarField, Scheme};

/// One inequality evaluation: lhs, the right side with the constant
/// stripped, and lhs/rhs.
#[derive(Debug, Clone, Copy)]
pub struct RatioRecord {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl RatioRecord {
    fn new(lhs: f64, rhs: f64) -> Self {
        RatioRecord {
            lhs,
            rhs,
            ratio: lhs / rhs,
        }
    }
}

/// All spatial multi-indices of exact order `k` over `dim` axes.
fn exact_order(k: usize, dim: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    let cap = |d: usize| if d < dim { k } else { 0 };
    for a in 0..=cap(0) {
        for b in 0..=cap(1) {
            for c in 0..=cap(2) {
                if a + b + c == k {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

/// Pointwise Euclidean magnitude of the array of all order-k spectral
/// derivatives.
fn gradient_magnitude(f: &ScalarField, k: usize) -> Result<ScalarField, FieldError> {
    let mut mag2 = ScalarField::zeros(f.grid);
    for orders in exact_order(k, f.grid.dim) {
        let mut d = f.clone();
        for axis in 0..3 {
            if orders[axis] > 0 {
                d = spectral_derivative(&d, axis, orders[axis])?;
            }
        }
        for (dst, &x) in mag2.data.iter_mut().zip(&d.data) {
            *dst += x * x;
        }
    }
    Ok(mag2.map(f64::sqrt))
}

/// Gagliardo–Nirenberg: ‖∇^{(i)}V‖_{L^{2k/i}} ≤ C ‖V‖_∞^{1−i/k} ‖∇^{(k)}V‖_{L²}^{i/k}
/// for 1 ≤ i ≤ k.
pub fn gn_ratio(v: &ScalarField, i: usize, k: usize) -> Result<RatioRecord, FieldError> {
    if i == 0 || i > k {
        return Err(FieldError::HypothesisViolated(format!(
            "need 1 <= i <= k, got i={i}, k={k}"
        )));
    }
    let p = 2.0 * k as f64 / i as f64;
    let lhs = norm_lp(&gradient_magnitude(v, i)?, p);
    let sup = norm_lp(v, f64::INFINITY);
    let top = norm_l2(&gradient_magnitude(v, k)?);
    let theta = i as f64 / k as f64;
    Ok(RatioRecord::new(lhs, sup.powf(1.0 - theta) * top.powf(theta)))
}

/// H^j norm of a component list (root sum of squares).
fn hj(fields: &[ScalarField], j: f64) -> Result<f64, FieldError> {
    let mut acc = 0.0;
    for f in fields {
        let n = norm_sobolev(f, j)?;
        acc += n * n;
    }
    Ok(acc.sqrt())
}

/// Composition-product estimate: for F ∈ C_b^j and V, G ∈ H^j with j > d/2,
/// ‖(F∘V)G‖_{H^j} ≤ C (1 + ‖V‖_{H^j}^j) ‖G‖_{H^j}.
///
/// `f` maps the V components at a point to a q×q matrix applied to the G
/// components.
pub fn product_ratio(
    f: &dyn Fn(&[f64]) -> Vec<Vec<f64>>,
    v: &[ScalarField],
    g: &[ScalarField],
    j: usize,
) -> Result<RatioRecord, FieldError> {
    let grid = v[0].grid;
    let d_half = grid.dim as f64 / 2.0;
    if (j as f64) <= d_half {
        return Err(FieldError::HypothesisViolated(format!(
            "need j > d/2, got j={j}, d={}",
            grid.dim
        )));
    }
    let q = g.len();
    let n = grid.len();
    let mut out: Vec<ScalarField> = (0..q).map(|_| ScalarField::zeros(grid)).collect();
    let mut vals = vec![0.0; v.len()];
    for idx in 0..n {
        for (c, field) in v.iter().enumerate() {
            vals[c] = field.data[idx];
        }
        let m = f(&vals);
        for row in 0..q {
            let mut acc = 0.0;
            for col in 0..q {
                acc += m[row][col] * g[col].data[idx];
            }
            out[row].data[idx] = acc;
        }
    }
    let lhs = hj(&out, j as f64)?;
    let vnorm = hj(v, j as f64)?;
    let gnorm = hj(g, j as f64)?;
    Ok(RatioRecord::new(
        lhs,
        (1.0 + vnorm.powi(j as i32)) * gnorm,
    ))
}

/// Composition difference: ‖F∘V − F∘Ṽ‖_{H^j} ≤ C ‖V − Ṽ‖_{H^j} for F ∈
/// C_b^{j+1} on a convex box containing both ranges, j > d/2.
pub fn composition_diff_ratio(
    f: &dyn Fn(&[f64]) -> f64,
    v: &[ScalarField],
    v2: &[ScalarField],
    j: usize,
) -> Result<RatioRecord, FieldError> {
    let grid = v[0].grid;
    if (j as f64) <= grid.dim as f64 / 2.0 {
        return Err(FieldError::HypothesisViolated(format!(
            "need j > d/2, got j={j}, d={}",
            grid.dim
        )));
    }
    let n = grid.len();
    let mut comp = ScalarField::zeros(grid);
    let mut vals = vec![0.0; v.len()];
    let mut vals2 = vec![0.0; v.len()];
    for idx in 0..n {
        for c in 0..v.len() {
            vals[c] = v[c].data[idx];
            vals2[c] = v2[c].data[idx];
        }
        comp.data[idx] = f(&vals) - f(&vals2);
    }
    let lhs = norm_sobolev(&comp, j as f64)?;
    let diff: Vec<ScalarField> = v
        .iter()
        .zip(v2)
        .map(|(a, b)| a.zip(b, |x, y| x - y))
        .collect();
    Ok(RatioRecord::new(lhs, hj(&diff, j as f64)?))
}

/// Commutator estimate: for j > d/2 + 1, 1 ≤ |α| ≤ j, and G ∈ H^{j−1},
/// ‖∂_α((F∘V)G) − (F∘V)∂_αG‖_{L²} ≤ C (‖V‖_{H^j} + ‖V‖_{H^j}^j) ‖G‖_{H^{j−1}}.
pub fn commutator_ratio(
    f: &dyn Fn(&[f64]) -> f64,
    v: &[ScalarField],
    g: &ScalarField,
    j: usize,
    alpha: &[usize; 3],
) -> Result<RatioRecord, FieldError> {
    let grid = v[0].grid;
    let k: usize = alpha.iter().sum();
    if (j as f64) <= grid.dim as f64 / 2.0 + 1.0 || k == 0 || k > j {
        return Err(FieldError::HypothesisViolated(format!(
            "need j > d/2 + 1 and 1 <= |alpha| <= j, got j={j}, |alpha|={k}"
        )));
    }
    let n = grid.len();
    let mut comp = ScalarField::zeros(grid);
    let mut vals = vec![0.0; v.len()];
    for idx in 0..n {
        for c in 0..v.len() {
            vals[c] = v[c].data[idx];
        }
        comp.data[idx] = f(&vals);
    }
    let prod = comp.zip(g, |a, b| a * b);
    let d_prod = derivative_multi(&prod, alpha, Scheme::Order2)?;
    let d_g = derivative_multi(g, alpha, Scheme::Order2)?;
    let commutator = d_prod.zip(&comp.zip(&d_g, |a, b| a * b), |x, y| x - y);
    let lhs = norm_l2(&commutator);
    let vnorm = hj(v, j as f64)?;
    let rhs = (vnorm + vnorm.powi(j as i32)) * norm_sobolev(g, j as f64 - 1.0)?;
    Ok(RatioRecord::new(lhs, rhs))
}

/// Interpolation: for 0 ≤ N' ≤ N, ‖F‖_{H^{N'}} ≤ C ‖F‖_{L²}^{1−N'/N} ‖F‖_{H^N}^{N'/N}.
pub fn interpolation_ratio(
    f: &ScalarField,
    n_prime: f64,
    n: f64,
) -> Result<RatioRecord, FieldError> {
    if !(0.0 <= n_prime && n_prime <= n && n > 0.0) {
        return Err(FieldError::HypothesisViolated(format!(
            "need 0 <= N' <= N, got N'={n_prime}, N={n}"
        )));
    }
    let lhs = norm_sobolev(f, n_prime)?;
    let theta = n_prime / n;
    let rhs = norm_l2(f).powf(1.0 - theta) * norm_sobolev(f, n)?.powf(theta);
    Ok(RatioRecord::new(lhs, rhs))
}
