//! Discrete calculus on periodic lattices.
//!
//! Grids are uniform and periodic, 1D or 3D, covering [-extent, extent) per
//! axis. Scalar fields and 10-component state fields share the indexing;
//! norms, mollification, and the Sobolev-calculus checks live in the
//! submodules.

mod appendix;
mod io;
mod mollify;
mod spectral;

pub use appendix::{
    commutator_ratio, composition_diff_ratio, gn_ratio, interpolation_ratio, product_ratio,
    RatioRecord,
};
pub use io::{
    read_scalar_csv, read_state_raw, write_scalar_csv, write_state_csv, write_state_raw,
    read_state_csv,
};
pub use mollify::{mollify, mollify_state, MollifierSpec};
pub use spectral::{
    norm, norm_l2, norm_lp, norm_sobolev, spectral_derivative, state_l2, state_sobolev,
    state_sobolev_rel, NormKind,
};

use crate::state::StateVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    #[error("grids do not match: {0:?} vs {1:?}")]
    GridMismatch(Grid, Grid),
    #[error("operation requires a periodic grid")]
    NonPeriodicUnsupported,
    #[error("grid needs at least 8 points per axis, and an even count; got {0}")]
    BadPointCount(usize),
    #[error("grid dimension must be 1 or 3, got {0}")]
    BadDimension(usize),
    #[error("mollifier radius {radius} too large for extent {extent}")]
    RadiusTooLarge { radius: f64, extent: f64 },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("io: {0}")]
    Io(String),
}

/// A uniform periodic lattice over [-extent, extent)^dim.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub points: usize,
    pub extent: f64,
    pub periodic: bool,
}

impl Grid {
    pub fn new_1d(points: usize, extent: f64) -> Result<Grid, FieldError> {
        Self::new(1, points, extent)
    }

    pub fn new_3d(points: usize, extent: f64) -> Result<Grid, FieldError> {
        Self::new(3, points, extent)
    }

    pub fn new(dim: usize, points: usize, extent: f64) -> Result<Grid, FieldError> {
        if dim != 1 && dim != 3 {
            return Err(FieldError::BadDimension(dim));
        }
        if points < 8 || points % 2 != 0 {
            return Err(FieldError::BadPointCount(points));
        }
        Ok(Grid {
            dim,
            points,
            extent,
            periodic: true,
        })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / self.points as f64
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Index along one axis of a flattened point.
    fn axis_index(&self, idx: usize, axis: usize) -> usize {
        (idx / self.points.pow(axis as u32)) % self.points
    }

    /// Flattened index shifted by `offset` cells along `axis`, wrapping.
    pub fn neighbor(&self, idx: usize, axis: usize, offset: isize) -> usize {
        let n = self.points as isize;
        let stride = self.points.pow(axis as u32) as isize;
        let i = self.axis_index(idx, axis) as isize;
        let j = (i + offset).rem_euclid(n);
        (idx as isize + (j - i) * stride) as usize
    }

    /// Physical position of a point (unused axes report 0).
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let mut x = [0.0; 3];
        let h = self.spacing();
        for axis in 0..self.dim {
            x[axis] = -self.extent + h * self.axis_index(idx, axis) as f64;
        }
        x
    }

    /// Euclidean distance from the origin over the active axes.
    pub fn radius(&self, idx: usize) -> f64 {
        let x = self.position(idx);
        (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
    }
}

pub fn same_grid(a: &Grid, b: &Grid) -> Result<(), FieldError> {
    if a == b {
        Ok(())
    } else {
        Err(FieldError::GridMismatch(*a, *b))
    }
}

/// A scalar sample per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub data: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        ScalarField {
            grid,
            data: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        ScalarField {
            grid,
            data: vec![value; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut([f64; 3]) -> f64) -> Self {
        ScalarField {
            grid,
            data: (0..grid.len()).map(|i| f(grid.position(i))).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarField {
            grid: self.grid,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn zip(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Self {
        ScalarField {
            grid: self.grid,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

/// A 10-component state sample per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct StateField {
    pub grid: Grid,
    pub data: Vec<[f64; 10]>,
}

impl StateField {
    pub fn zeros(grid: Grid) -> Self {
        StateField {
            grid,
            data: vec![[0.0; 10]; grid.len()],
        }
    }

    pub fn constant(grid: Grid, v: &StateVector) -> Self {
        StateField {
            grid,
            data: vec![v.0; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut([f64; 3]) -> StateVector) -> Self {
        StateField {
            grid,
            data: (0..grid.len()).map(|i| f(grid.position(i)).0).collect(),
        }
    }

    pub fn component(&self, c: usize) -> ScalarField {
        ScalarField {
            grid: self.grid,
            data: self.data.iter().map(|row| row[c]).collect(),
        }
    }

    pub fn set_component(&mut self, c: usize, f: &ScalarField) {
        for (row, &x) in self.data.iter_mut().zip(&f.data) {
            row[c] = x;
        }
    }

    pub fn state(&self, idx: usize) -> StateVector {
        StateVector(self.data[idx])
    }

    /// self + scale * other, componentwise.
    pub fn axpy(&self, scale: f64, other: &StateField) -> StateField {
        let mut out = self.clone();
        for (dst, src) in out.data.iter_mut().zip(&other.data) {
            for c in 0..10 {
                dst[c] += scale * src[c];
            }
        }
        out
    }

    pub fn sub(&self, other: &StateField) -> StateField {
        self.axpy(-1.0, other)
    }

    /// Largest |component| over the field.
    pub fn sup_norm(&self) -> f64 {
        self.data
            .iter()
            .flat_map(|row| row.iter())
            .fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Largest sup-distance from a constant state.
    pub fn sup_distance(&self, v: &StateVector) -> f64 {
        self.data
            .iter()
            .map(|row| {
                (0..10)
                    .map(|c| (row[c] - v.0[c]).abs())
                    .fold(0.0f64, f64::max)
            })
            .fold(0.0f64, f64::max)
    }
}

/// Finite-difference scheme order for `derivative`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    Order2,
    Order4,
}

/// Centered finite difference along an axis. Axes beyond the grid dimension
/// carry no variation and return a zero field.
pub fn derivative(f: &ScalarField, axis: usize, scheme: Scheme) -> Result<ScalarField, FieldError> {
    if !f.grid.periodic {
        return Err(FieldError::NonPeriodicUnsupported);
    }
    let mut out = ScalarField::zeros(f.grid);
    if axis >= f.grid.dim {
        return Ok(out);
    }
    let h = f.grid.spacing();
    match scheme {
        Scheme::Order2 => {
            for i in 0..f.data.len() {
                let p = f.data[f.grid.neighbor(i, axis, 1)];
                let m = f.data[f.grid.neighbor(i, axis, -1)];
                out.data[i] = (p - m) / (2.0 * h);
            }
        }
        Scheme::Order4 => {
            for i in 0..f.data.len() {
                let p1 = f.data[f.grid.neighbor(i, axis, 1)];
                let m1 = f.data[f.grid.neighbor(i, axis, -1)];
                let p2 = f.data[f.grid.neighbor(i, axis, 2)];
                let m2 = f.data[f.grid.neighbor(i, axis, -2)];
                out.data[i] = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
            }
        }
    }
    Ok(out)
}

/// Repeated finite differences for a spatial multi-index.
pub fn derivative_multi(
    f: &ScalarField,
    orders: &[usize; 3],
    scheme: Scheme,
) -> Result<ScalarField, FieldError> {
    let mut cur = f.clone();
    for axis in 0..3 {
        for _ in 0..orders[axis] {
            cur = derivative(&cur, axis, scheme)?;
        }
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn grid_validation_and_geometry() {
        assert!(Grid::new_1d(6, 1.0).is_err());
        assert!(Grid::new_1d(9, 1.0).is_err());
        assert!(Grid::new(2, 16, 1.0).is_err());
        let g = Grid::new_1d(16, 4.0).unwrap();
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.position(0)[0], -4.0);
        assert_eq!(g.neighbor(0, 0, -1), 15);
        let g = Grid::new_3d(8, 1.0).unwrap();
        assert_eq!(g.len(), 512);
        let idx = g.neighbor(0, 2, -1);
        assert_eq!(g.position(idx)[2], g.position(g.len() - g.points * g.points)[2]);
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let g = Grid::new_1d(32, 2.0).unwrap();
        let f = ScalarField::constant(g, 3.5);
        for scheme in [Scheme::Order2, Scheme::Order4] {
            let d = derivative(&f, 0, scheme).unwrap();
            assert!(d.data.iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn derivative_of_sine() {
        let g = Grid::new_1d(64, PI).unwrap();
        let f = ScalarField::from_fn(g, |x| x[0].sin());
        let d = derivative(&f, 0, Scheme::Order2).unwrap();
        let h = g.spacing();
        let max_err = d
            .data
            .iter()
            .enumerate()
            .map(|(i, &v)| (v - g.position(i)[0].cos()).abs())
            .fold(0.0f64, f64::max);
        assert!(max_err < h * h, "err {max_err} vs h^2 {}", h * h);
    }

    #[test]
    fn richardson_ratio_is_four() {
        let mut errs = Vec::new();
        for points in [64usize, 128] {
            let g = Grid::new_1d(points, PI).unwrap();
            let f = ScalarField::from_fn(g, |x| x[0].sin());
            let d = derivative(&f, 0, Scheme::Order2).unwrap();
            let err = d
                .data
                .iter()
                .enumerate()
                .map(|(i, &v)| (v - g.position(i)[0].cos()).abs())
                .fold(0.0f64, f64::max);
            errs.push(err);
        }
        let ratio = errs[0] / errs[1];
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn derivative_beyond_dimension_is_zero() {
        let g = Grid::new_1d(16, 1.0).unwrap();
        let f = ScalarField::from_fn(g, |x| x[0]);
        let d = derivative(&f, 1, Scheme::Order2).unwrap();
        assert!(d.data.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn three_dimensional_derivatives() {
        let g = Grid::new_3d(16, PI).unwrap();
        for axis in 0..3 {
            let f = ScalarField::from_fn(g, |x| x[axis].sin());
            let d = derivative(&f, axis, Scheme::Order4).unwrap();
            let max_err = d
                .data
                .iter()
                .enumerate()
                .map(|(i, &v)| (v - g.position(i)[axis].cos()).abs())
                .fold(0.0f64, f64::max);
            assert!(max_err < 1e-3, "axis {axis}: {max_err}");
        }
    }
}
