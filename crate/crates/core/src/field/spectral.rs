//! Spectral norms and derivatives via the discrete Fourier multiplier.
//!
//! H^s is realized as the multiplier (1 + |k|²)^{s/2} with k the physical
//! wavenumbers π·m/extent, so sobolev(0) reproduces the L² quadrature norm
//! to roundoff (Plancherel).

use super::{FieldError, Grid, ScalarField, StateField};
use crate::state::StateVector;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// Norm selector for scalar fields. `SobolevRel` subtracts a constant
/// before the H^s norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    L2,
    Sup,
    Sobolev(f64),
    SobolevRel(f64, f64),
}

pub fn norm(f: &ScalarField, kind: NormKind) -> Result<f64, FieldError> {
    match kind {
        NormKind::L2 => Ok(norm_l2(f)),
        NormKind::Sup => Ok(f.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))),
        NormKind::Sobolev(s) => norm_sobolev(f, s),
        NormKind::SobolevRel(s, c) => norm_sobolev(&f.map(|x| x - c), s),
    }
}

/// Quadrature L² norm, (h^d Σ f²)^{1/2}.
pub fn norm_l2(f: &ScalarField) -> f64 {
    (f.grid.cell_volume() * f.data.iter().map(|x| x * x).sum::<f64>()).sqrt()
}

/// L^p quadrature norm; p = ∞ is the sup norm.
pub fn norm_lp(f: &ScalarField, p: f64) -> f64 {
    if p.is_infinite() {
        return f.data.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    }
    (f.grid.cell_volume() * f.data.iter().map(|x| x.abs().powf(p)).sum::<f64>()).powf(1.0 / p)
}

/// Forward DFT of the field, normalized by 1/N, together with the physical
/// wavenumber squared per bin.
fn transform(f: &ScalarField) -> Result<(Vec<Complex64>, Vec<f64>), FieldError> {
    if !f.grid.periodic {
        return Err(FieldError::NonPeriodicUnsupported);
    }
    let n = f.grid.points;
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let mut data: Vec<Complex64> = f.data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    match f.grid.dim {
        1 => fft.process(&mut data),
        3 => {
            // Separable passes along each axis.
            for axis in 0..3 {
                let stride = n.pow(axis as u32);
                let mut line = vec![Complex64::default(); n];
                for block in 0..n.pow(2) {
                    // Decompose the two passive axes.
                    let lo = block % stride.max(1);
                    let hi = block / stride.max(1);
                    let base = hi * stride * n + lo;
                    for j in 0..n {
                        line[j] = data[base + j * stride];
                    }
                    fft.process(&mut line);
                    for j in 0..n {
                        data[base + j * stride] = line[j];
                    }
                }
            }
        }
        d => return Err(FieldError::BadDimension(d)),
    }
    let scale = 1.0 / f.grid.len() as f64;
    for x in data.iter_mut() {
        *x *= scale;
    }
    let k0 = std::f64::consts::PI / f.grid.extent;
    let mode = |j: usize| -> f64 {
        let m = if j <= n / 2 { j as isize } else { j as isize - n as isize };
        (m as f64) * k0
    };
    let mut k2 = vec![0.0; f.grid.len()];
    for (i, slot) in k2.iter_mut().enumerate() {
        let mut acc = 0.0;
        for axis in 0..f.grid.dim {
            let j = (i / n.pow(axis as u32)) % n;
            let k = mode(j);
            acc += k * k;
        }
        *slot = acc;
    }
    Ok((data, k2))
}

/// H^s norm via the (1 + |k|²)^{s/2} multiplier; s may be any real number.
pub fn norm_sobolev(f: &ScalarField, s: f64) -> Result<f64, FieldError> {
    let (hat, k2) = transform(f)?;
    let vol = (2.0 * f.grid.extent).powi(f.grid.dim as i32);
    let sum: f64 = hat
        .iter()
        .zip(&k2)
        .map(|(c, &kk)| (1.0 + kk).powf(s) * c.norm_sqr())
        .sum();
    Ok((vol * sum).sqrt())
}

/// Spectral derivative of integer order along one axis (ik)^order.
pub fn spectral_derivative(
    f: &ScalarField,
    axis: usize,
    order: usize,
) -> Result<ScalarField, FieldError> {
    if axis >= f.grid.dim {
        return Ok(ScalarField::zeros(f.grid));
    }
    let (mut hat, _) = transform(f)?;
    let n = f.grid.points;
    let k0 = std::f64::consts::PI / f.grid.extent;
    for (i, c) in hat.iter_mut().enumerate() {
        let j = (i / n.pow(axis as u32)) % n;
        let m = if j <= n / 2 { j as isize } else { j as isize - n as isize };
        // The unmatched Nyquist mode of odd derivatives is dropped.
        let m = if j == n / 2 && order % 2 == 1 { 0 } else { m };
        let ik = Complex64::new(0.0, m as f64 * k0);
        *c *= ik.powu(order as u32);
    }
    inverse(f.grid, hat)
}

fn inverse(grid: Grid, mut hat: Vec<Complex64>) -> Result<ScalarField, FieldError> {
    let n = grid.points;
    let mut planner = FftPlanner::new();
    let ifft = planner.plan_fft_inverse(n);
    match grid.dim {
        1 => ifft.process(&mut hat),
        3 => {
            let mut line = vec![Complex64::default(); n];
            for axis in 0..3 {
                let stride = n.pow(axis as u32);
                for block in 0..n.pow(2) {
                    let lo = block % stride.max(1);
                    let hi = block / stride.max(1);
                    let base = hi * stride * n + lo;
                    for j in 0..n {
                        line[j] = hat[base + j * stride];
                    }
                    ifft.process(&mut line);
                    for j in 0..n {
                        hat[base + j * stride] = line[j];
                    }
                }
            }
        }
        d => return Err(FieldError::BadDimension(d)),
    }
    Ok(ScalarField {
        grid,
        data: hat.iter().map(|c| c.re).collect(),
    })
}

/// L² norm of a state field: root sum of squares over the 10 components.
pub fn state_l2(f: &StateField) -> f64 {
    let vol = f.grid.cell_volume();
    (vol * f
        .data
        .iter()
        .map(|row| row.iter().map(|x| x * x).sum::<f64>())
        .sum::<f64>())
    .sqrt()
}

/// H^s norm of a state field.
pub fn state_sobolev(f: &StateField, s: f64) -> Result<f64, FieldError> {
    let mut acc = 0.0;
    for c in 0..10 {
        let n = norm_sobolev(&f.component(c), s)?;
        acc += n * n;
    }
    Ok(acc.sqrt())
}

/// H^s norm of the deviation from a constant state.
pub fn state_sobolev_rel(f: &StateField, s: f64, v: &StateVector) -> Result<f64, FieldError> {
    let mut acc = 0.0;
    for c in 0..10 {
        let n = norm_sobolev(&f.component(c).map(|x| x - v.0[c]), s)?;
        acc += n * n;
    }
    Ok(acc.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{derivative, Scheme};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn zero_field_norms() {
        let g = Grid::new_1d(32, 2.0).unwrap();
        let f = ScalarField::zeros(g);
        for kind in [NormKind::L2, NormKind::Sup, NormKind::Sobolev(3.0)] {
            assert_eq!(norm(&f, kind).unwrap(), 0.0);
        }
    }

    #[test]
    fn sobolev_zero_is_l2() {
        let g = Grid::new_1d(64, 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let f = ScalarField::from_fn(g, |_| rng.gen_range(-1.0..1.0));
        let a = norm_l2(&f);
        let b = norm_sobolev(&f, 0.0).unwrap();
        assert!((a - b).abs() < 1e-12 * a);
    }

    #[test]
    fn single_mode_h3() {
        // For sin(2x) on extent pi, the H^3 norm is (1+4)^{3/2} times L2.
        let g = Grid::new_1d(64, PI).unwrap();
        let f = ScalarField::from_fn(g, |x| (2.0 * x[0]).sin());
        let l2 = norm_l2(&f);
        let h3 = norm_sobolev(&f, 3.0).unwrap();
        assert!((h3 - 5.0f64.powf(1.5) * l2).abs() < 1e-10 * h3);
    }

    #[test]
    fn three_dimensional_plancherel() {
        let g = Grid::new_3d(8, 1.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let f = ScalarField::from_fn(g, |_| rng.gen_range(-1.0..1.0));
        let a = norm_l2(&f);
        let b = norm_sobolev(&f, 0.0).unwrap();
        assert!((a - b).abs() < 1e-12 * a, "{a} vs {b}");
    }

    #[test]
    fn spectral_derivative_is_exact_on_modes() {
        let g = Grid::new_1d(32, PI).unwrap();
        let f = ScalarField::from_fn(g, |x| (3.0 * x[0]).sin());
        let d = spectral_derivative(&f, 0, 1).unwrap();
        for (i, &v) in d.data.iter().enumerate() {
            let expect = 3.0 * (3.0 * g.position(i)[0]).cos();
            assert!((v - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn spectral_and_finite_difference_seminorms_agree() {
        // Band-limited random field with a decaying spectrum: the two H^1
        // seminorm routes agree within 2%.
        let g = Grid::new_1d(512, 8.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let cutoff = g.points / 4;
        let amps: Vec<(f64, f64, f64)> = (1..cutoff)
            .map(|m| {
                let a = rng.gen_range(-1.0..1.0) / (1.0 + m as f64).powi(2);
                let ph = rng.gen_range(0.0..2.0 * PI);
                (m as f64 * PI / g.extent, a, ph)
            })
            .collect();
        let f = ScalarField::from_fn(g, |x| {
            amps.iter().map(|(k, a, ph)| a * (k * x[0] + ph).sin()).sum()
        });
        let spectral = {
            let d = spectral_derivative(&f, 0, 1).unwrap();
            norm_l2(&d)
        };
        let fd = norm_l2(&derivative(&f, 0, Scheme::Order2).unwrap());
        assert!(
            (spectral - fd).abs() < 0.02 * spectral,
            "spectral {spectral} vs fd {fd}"
        );
    }
}
