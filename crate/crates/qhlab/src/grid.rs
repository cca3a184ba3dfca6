//! Periodic spatial grid and the real/complex fields living on it.
//!
//! The grid is uniform with nodes x_j = -L/2 + j*dx, j = 0..n, dx = L/n,
//! and the domain is treated as periodic. n must be a power of two so the
//! wavenumber-space transforms used everywhere else stay fast and exact.
//! Grids are immutable after creation and cheap to clone; every field keeps
//! a handle to its grid so mismatched-resolution bugs surface immediately.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug)]
struct GridInner {
    n_points: usize,
    length: f64,
    spacing: f64,
    nodes: Vec<f64>,
}

/// Uniform periodic grid centered on the origin.
#[derive(Clone, Debug)]
pub struct Grid {
    inner: Arc<GridInner>,
}

impl Grid {
    /// Build a grid with `n_points` nodes (power of two, >= 8) spanning
    /// `length` centered on 0.
    pub fn new(n_points: usize, length: f64) -> Result<Self> {
        if n_points < 8 || !n_points.is_power_of_two() {
            return Err(Error::config(
                "n_points",
                format!("n_points not a power of two >= 8 (got {n_points})"),
            ));
        }
        if !length.is_finite() || length <= 0.0 {
            return Err(Error::config(
                "length",
                format!("length must be positive and finite (got {length})"),
            ));
        }
        let spacing = length / n_points as f64;
        let nodes = (0..n_points)
            .map(|j| -0.5 * length + j as f64 * spacing)
            .collect();
        Ok(Self {
            inner: Arc::new(GridInner {
                n_points,
                length,
                spacing,
                nodes,
            }),
        })
    }

    pub fn n_points(&self) -> usize {
        self.inner.n_points
    }

    pub fn length(&self) -> f64 {
        self.inner.length
    }

    pub fn spacing(&self) -> f64 {
        self.inner.spacing
    }

    pub fn nodes(&self) -> &[f64] {
        &self.inner.nodes
    }

    pub fn node(&self, j: usize) -> f64 {
        self.inner.nodes[j]
    }

    /// True when both handles describe the same discretization.
    pub fn same_as(&self, other: &Grid) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.n_points == other.inner.n_points
                && self.inner.length == other.inner.length)
    }

    /// Wrap a position into the fundamental domain [-L/2, L/2).
    pub fn wrap(&self, x: f64) -> f64 {
        let l = self.inner.length;
        let mut w = x - l * ((x + 0.5 * l) / l).floor();
        // floor can land exactly on the right edge through rounding
        if w >= 0.5 * l {
            w -= l;
        }
        if w < -0.5 * l {
            w += l;
        }
        w
    }

    /// Angular wavenumbers in FFT ordering:
    /// (2π/L) * [0, 1, .., n/2-1, -n/2, .., -1].
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.inner.n_points;
        let dk = 2.0 * std::f64::consts::PI / self.inner.length;
        (0..n)
            .map(|i| {
                if i < n / 2 {
                    i as f64 * dk
                } else {
                    (i as i64 - n as i64) as f64 * dk
                }
            })
            .collect()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

/// Real-valued field sampled on grid nodes (ρ, S, u, v, Q, pressures, ...).
#[derive(Clone, Debug)]
pub struct RealField {
    grid: Grid,
    values: Vec<f64>,
}

impl RealField {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![0.0; grid.n_points()],
        }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: grid.clone(),
            values: grid.nodes().iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn from_values(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::GridMismatch(format!(
                "field has {} values for a {}-point grid",
                values.len(),
                grid.n_points()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Periodic rectangle quadrature dx * Σ f_j (spectrally accurate for
    /// smooth periodic or decaying integrands).
    pub fn integrate(&self) -> f64 {
        self.grid.spacing() * self.values.iter().sum::<f64>()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, &v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RealField {
        RealField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &RealField, f: impl Fn(f64, f64) -> f64) -> RealField {
        debug_assert!(self.grid.same_as(&other.grid));
        RealField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

/// Complex-valued field on grid nodes; the wave function is one of these.
#[derive(Clone, Debug)]
pub struct ComplexField {
    grid: Grid,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![Complex64::new(0.0, 0.0); grid.n_points()],
        }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> Complex64) -> Self {
        Self {
            grid: grid.clone(),
            values: grid.nodes().iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn from_values(grid: &Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::GridMismatch(format!(
                "field has {} values for a {}-point grid",
                values.len(),
                grid.n_points()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Discrete norm Σ|ψ|² dx.
    pub fn norm(&self) -> f64 {
        self.grid.spacing() * self.values.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// |ψ|² as a real field.
    pub fn abs_squared(&self) -> RealField {
        RealField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|z| z.norm_sqr()).collect(),
        }
    }

    /// Rescale so the discrete norm is exactly 1.
    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidInput(format!(
                "cannot normalize field with norm {n}"
            )));
        }
        let s = 1.0 / n.sqrt();
        for z in &mut self.values {
            *z *= s;
        }
        Ok(self)
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Max pointwise modulus of the difference (grids must match).
    pub fn linf_distance(&self, other: &ComplexField) -> f64 {
        debug_assert!(self.grid.same_as(&other.grid));
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).norm()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_nodes_match_definition() {
        let g = Grid::new(8, 8.0).unwrap();
        assert_eq!(g.spacing(), 1.0);
        assert_eq!(g.nodes(), &[-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn grid_spacing_exact() {
        let g = Grid::new(1024, 40.0).unwrap();
        assert_eq!(g.spacing(), 0.0390625);
    }

    #[test]
    fn grid_rejects_bad_inputs() {
        assert!(Grid::new(7, 8.0).is_err());
        assert!(Grid::new(1000, 8.0).is_err());
        assert!(Grid::new(4, 8.0).is_err());
        assert!(Grid::new(8, 0.0).is_err());
        assert!(Grid::new(8, -1.0).is_err());
    }

    #[test]
    fn grid_mirror_symmetry_is_exact() {
        // Centered periodic layout: x_j + x_{n-1-j} = -dx and
        // x_j + x_{n-j} = 0 for j >= 1, both exactly representable.
        let g = Grid::new(1024, 40.0).unwrap();
        let n = g.n_points();
        for j in 0..n {
            assert_eq!(g.node(j) + g.node(n - 1 - j), -g.spacing());
        }
        for j in 1..n {
            assert_eq!(g.node(j) + g.node(n - j), 0.0);
        }
    }

    #[test]
    fn wrap_stays_in_domain() {
        let g = Grid::new(8, 8.0).unwrap();
        assert_eq!(g.wrap(4.0), -4.0);
        assert_eq!(g.wrap(-4.0), -4.0);
        assert_eq!(g.wrap(9.0), 1.0);
        assert_eq!(g.wrap(-13.0), 3.0);
    }

    #[test]
    fn wavenumber_layout() {
        let g = Grid::new(8, 8.0).unwrap();
        let k = g.wavenumbers();
        let dk = 2.0 * std::f64::consts::PI / 8.0;
        assert_eq!(k[0], 0.0);
        assert!((k[1] - dk).abs() < 1e-15);
        assert!((k[4] + 4.0 * dk).abs() < 1e-15);
        assert!((k[7] + dk).abs() < 1e-15);
    }

    #[test]
    fn field_length_checked() {
        let g = Grid::new(8, 8.0).unwrap();
        assert!(RealField::from_values(&g, vec![0.0; 7]).is_err());
        assert!(ComplexField::from_values(&g, vec![Complex64::new(0.0, 0.0); 9]).is_err());
    }
}
