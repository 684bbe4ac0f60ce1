//! Friedrichs mollification on the lattice.
//!
//! The profile is the standard bump exp(−1/(1−|s|²)) supported in the unit
//! ball, normalized to unit integral; Ψ_ε rescales it to radius ε. The
//! discrete kernel weights are renormalized to sum to exactly one cell
//! volume inverse, so convolution preserves constants to roundoff and is an
//! L² contraction (nonnegative weights, unit mass).

use super::{FieldError, Grid, ScalarField, StateField};

/// The mollifier profile and its base radius ε₀, with ε_m = 2^{−m}ε₀.
#[derive(Debug, Clone, Copy)]
pub struct MollifierSpec {
    pub eps0: f64,
}

impl MollifierSpec {
    pub fn new(eps0: f64) -> Self {
        MollifierSpec { eps0 }
    }

    pub fn eps(&self, m: usize) -> f64 {
        self.eps0 * 0.5f64.powi(m as i32)
    }

    /// Unnormalized bump, zero outside |s| < 1.
    pub fn bump(r: f64) -> f64 {
        if r.abs() < 1.0 {
            (-1.0 / (1.0 - r * r)).exp()
        } else {
            0.0
        }
    }

    /// Normalization constant 1/∫bump over the unit ball in `dim`
    /// dimensions, by composite Simpson quadrature.
    pub fn normalization(dim: usize) -> f64 {
        let n = 4000;
        let h = 1.0 / n as f64;
        let simpson = |f: &dyn Fn(f64) -> f64| {
            let mut acc = f(0.0) + f(1.0);
            for i in 1..n {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * f(i as f64 * h);
            }
            acc * h / 3.0
        };
        let integral = match dim {
            1 => 2.0 * simpson(&|r| Self::bump(r)),
            3 => 4.0 * std::f64::consts::PI * simpson(&|r| r * r * Self::bump(r)),
            _ => f64::NAN,
        };
        1.0 / integral
    }

    /// The normalized continuum profile at radius r in `dim` dimensions.
    pub fn profile(dim: usize, r: f64) -> f64 {
        Self::normalization(dim) * Self::bump(r)
    }
}

/// Discrete kernel offsets and weights for radius eps on a grid. Weights
/// sum to 1 (mass-preserving by construction).
fn kernel(grid: &Grid, eps: f64) -> Result<Vec<(Vec<isize>, f64)>, FieldError> {
    if !grid.periodic {
        return Err(FieldError::NonPeriodicUnsupported);
    }
    if eps >= grid.extent / 4.0 {
        return Err(FieldError::RadiusTooLarge {
            radius: eps,
            extent: grid.extent,
        });
    }
    let h = grid.spacing();
    let reach = (eps / h).floor() as isize;
    let mut entries = Vec::new();
    let mut total = 0.0;
    let mut push = |off: Vec<isize>| {
        let r2: f64 = off.iter().map(|&o| (o as f64 * h / eps).powi(2)).sum();
        let w = MollifierSpec::bump(r2.sqrt());
        if w > 0.0 {
            total += w;
            entries.push((off, w));
        }
    };
    match grid.dim {
        1 => {
            for i in -reach..=reach {
                push(vec![i]);
            }
        }
        3 => {
            for i in -reach..=reach {
                for j in -reach..=reach {
                    for k in -reach..=reach {
                        push(vec![i, j, k]);
                    }
                }
            }
        }
        d => return Err(FieldError::BadDimension(d)),
    }
    for (_, w) in entries.iter_mut() {
        *w /= total;
    }
    Ok(entries)
}

/// Discrete convolution with the normalized bump of radius eps.
pub fn mollify(f: &ScalarField, eps: f64) -> Result<ScalarField, FieldError> {
    let entries = kernel(&f.grid, eps)?;
    let mut out = ScalarField::zeros(f.grid);
    for i in 0..f.data.len() {
        let mut acc = 0.0;
        for (off, w) in &entries {
            let mut j = i;
            for (axis, &o) in off.iter().enumerate() {
                if o != 0 {
                    j = f.grid.neighbor(j, axis, o);
                }
            }
            acc += w * f.data[j];
        }
        out.data[i] = acc;
    }
    Ok(out)
}

/// Componentwise mollification of a state field. Positive unit-mass weights
/// keep the samples inside any convex box the input occupies.
pub fn mollify_state(f: &StateField, eps: f64) -> Result<StateField, FieldError> {
    let mut out = StateField::zeros(f.grid);
    for c in 0..10 {
        let m = mollify(&f.component(c), eps)?;
        out.set_component(c, &m);
    }
    Ok(out)
}
