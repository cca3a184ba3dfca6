//! External potentials: free, harmonic, or tabulated on the grid.

use crate::config::PhysicsConfig;
use crate::error::{Error, Result};
use crate::grid::{Grid, RealField};
use crate::spectral;

#[derive(Clone, Debug)]
pub enum Potential {
    Free,
    Harmonic { omega: f64 },
    Tabulated(RealField),
}

impl Potential {
    /// Sample U on the grid. Free is identically zero; harmonic is
    /// (1/2) m ω² x²; a tabulated potential must share the grid.
    pub fn evaluate(&self, grid: &Grid, cfg: &PhysicsConfig) -> Result<RealField> {
        match self {
            Potential::Free => Ok(RealField::zeros(grid)),
            Potential::Harmonic { omega } => {
                if !omega.is_finite() || *omega < 0.0 {
                    return Err(Error::config(
                        "potential.omega",
                        format!("harmonic frequency must be >= 0 (got {omega})"),
                    ));
                }
                let c = 0.5 * cfg.mass * omega * omega;
                Ok(RealField::from_fn(grid, |x| c * x * x))
            }
            Potential::Tabulated(field) => {
                if !field.grid().same_as(grid) {
                    return Err(Error::GridMismatch(
                        "tabulated potential sampled on a different grid".into(),
                    ));
                }
                Ok(field.clone())
            }
        }
    }

    /// ∂U/∂x on the grid. Analytic for free/harmonic (x² is not periodic, so
    /// a spectral derivative would ring at the seam); finite differences for
    /// tabulated data.
    pub fn gradient(&self, grid: &Grid, cfg: &PhysicsConfig) -> Result<RealField> {
        match self {
            Potential::Free => Ok(RealField::zeros(grid)),
            Potential::Harmonic { omega } => {
                let c = cfg.mass * omega * omega;
                Ok(RealField::from_fn(grid, |x| c * x))
            }
            Potential::Tabulated(field) => {
                let f = self.evaluate(grid, cfg)?;
                let _ = field;
                Ok(spectral::derivative_fd4(&f, 1))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_potential_is_zero() {
        let grid = Grid::new(16, 8.0).unwrap();
        let cfg = PhysicsConfig::default();
        let u = Potential::Free.evaluate(&grid, &cfg).unwrap();
        assert_eq!(u.max_abs(), 0.0);
    }

    #[test]
    fn harmonic_value_at_x2() {
        let grid = Grid::new(8, 8.0).unwrap();
        let cfg = PhysicsConfig::default();
        let u = Potential::Harmonic { omega: 1.0 }
            .evaluate(&grid, &cfg)
            .unwrap();
        // node x = 2 is index 6
        assert_eq!(grid.node(6), 2.0);
        assert_eq!(u.values()[6], 2.0);
    }

    #[test]
    fn tabulated_grid_mismatch_rejected() {
        let grid = Grid::new(16, 8.0).unwrap();
        let other = Grid::new(32, 8.0).unwrap();
        let cfg = PhysicsConfig::default();
        let table = RealField::zeros(&other);
        assert!(Potential::Tabulated(table)
            .evaluate(&grid, &cfg)
            .is_err());
    }

    #[test]
    fn negative_omega_rejected() {
        let grid = Grid::new(16, 8.0).unwrap();
        let cfg = PhysicsConfig::default();
        assert!(Potential::Harmonic { omega: -1.0 }
            .evaluate(&grid, &cfg)
            .is_err());
    }
}
