//! Closed-form spreading Gaussian for the free particle, used as ground
//! truth for the solver and every diagnostic.
//!
//! The packet ρ(x,t) = exp(-x²/2σ²)/(σ√(2π)) with
//! σ²(t) = σ₀² + (ħt/2mσ₀)² solves the free Schrödinger equation, with
//!
//!   u = (ħ/2mσ₀)² x t / σ²,      v = ħ x / (2mσ²),
//!   p = (ρ/m)(ħ/2σ)²,            p_g = (ρ/m)(ħx/2σ²)²,
//!   p_v = (ρ/m)(ħ/2σ)² (1 - (x/σ)²),
//!   F̄/m = (Du/Dt)(3 - (x/σ)²),  Du/Dt = (ħ/2m)² x/σ⁴,
//!
//! and mean free energy K+I = (1/2)(ħ/2mσ₀)². The Bohm potential is filled
//! through the enthalpy identity Q = (m/2)v² + p_v/ρ so the oracle's field
//! set is mutually consistent by construction; tests check it once against
//! the directly differentiated closed form.

use serde::Serialize;

use crate::config::PhysicsConfig;
use crate::error::{Error, Result};
use crate::grid::{Grid, RealField};
use crate::madelung::{node_mask, MadelungFields, EPS_NODE_REL};

/// Width parameter σ₀ plus the physical constants.
#[derive(Clone, Copy, Debug)]
pub struct GaussianParams {
    pub sigma0: f64,
    pub cfg: PhysicsConfig,
}

impl GaussianParams {
    pub fn new(sigma0: f64, cfg: PhysicsConfig) -> Result<Self> {
        cfg.validate()?;
        if !sigma0.is_finite() || sigma0 <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "sigma0 must be > 0 (got {sigma0})"
            )));
        }
        Ok(Self { sigma0, cfg })
    }

    /// σ(t) = √(σ₀² + (ħt/2mσ₀)²), valid for all real t.
    pub fn sigma(&self, t: f64) -> f64 {
        let spread = self.cfg.hbar * t / (2.0 * self.cfg.mass * self.sigma0);
        (self.sigma0 * self.sigma0 + spread * spread).sqrt()
    }

    /// d ln σ / dt; u(x,t) = x · dlnσ/dt.
    pub fn dln_sigma_dt(&self, t: f64) -> f64 {
        let s2 = self.sigma(t).powi(2);
        let c = self.cfg.hbar / (2.0 * self.cfg.mass * self.sigma0);
        c * c * t / s2
    }

    /// Mean free energy K + I = (1/2)(ħ/2mσ₀)², conserved for the free packet.
    pub fn free_energy(&self) -> f64 {
        let c = self.cfg.hbar / (2.0 * self.cfg.mass * self.sigma0);
        0.5 * c * c
    }

    /// Acceleration of the mean flow Du/Dt = (ħ/2m)² x/σ⁴ at unit x.
    pub fn flow_acceleration_per_x(&self, t: f64) -> f64 {
        let c = self.cfg.hbar / (2.0 * self.cfg.mass);
        let s = self.sigma(t);
        c * c / (s * s * s * s)
    }

    /// All diagnostic fields at time t, sampled on `grid`.
    pub fn analytic_fields(&self, t: f64, grid: &Grid) -> MadelungFields {
        let m = self.cfg.mass;
        let hbar = self.cfg.hbar;
        let s = self.sigma(t);
        let s2 = s * s;
        let dln = self.dln_sigma_dt(t);
        let norm = 1.0 / (s * (2.0 * std::f64::consts::PI).sqrt());
        let p_over_rho = (hbar / (2.0 * s)).powi(2) / m;
        let dudt_per_x = self.flow_acceleration_per_x(t);

        let rho = RealField::from_fn(grid, |x| norm * (-x * x / (2.0 * s2)).exp());
        let u = RealField::from_fn(grid, |x| dln * x);
        let v = RealField::from_fn(grid, |x| hbar * x / (2.0 * m * s2));
        // S anchored to 0 at the packet center
        let phase_s = RealField::from_fn(grid, |x| 0.5 * m * dln * x * x);
        let p_total = rho.map(|r| r * p_over_rho);
        let p_gas = RealField::from_fn(grid, |x| {
            let r = norm * (-x * x / (2.0 * s2)).exp();
            (hbar * x / (2.0 * s2)).powi(2) * r / m
        });
        let p_vacuum = RealField::from_fn(grid, |x| {
            let r = norm * (-x * x / (2.0 * s2)).exp();
            r * p_over_rho * (1.0 - x * x / s2)
        });
        // Q via the enthalpy identity: (m/2)v² + p_v/ρ
        let bohm_q = RealField::from_fn(grid, |x| {
            let vv = hbar * x / (2.0 * m * s2);
            0.5 * m * vv * vv + p_over_rho * (1.0 - x * x / s2)
        });
        let force_local =
            RealField::from_fn(grid, |x| m * dudt_per_x * x * (3.0 - x * x / s2));
        let (mask, eps_node) = node_mask(&rho, EPS_NODE_REL);
        MadelungFields {
            time: t,
            rho,
            phase_s,
            u,
            v,
            bohm_q,
            p_total,
            p_gas,
            p_vacuum,
            force_local,
            mask,
            eps_node,
        }
    }
}

/// ∞- and L²-norms of one field difference.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ErrorNorm {
    pub linf: f64,
    pub l2: f64,
}

/// Per-field error norms from [`compare`].
#[derive(Clone, Debug, Serialize)]
pub struct FieldErrorNorms {
    pub rho: ErrorNorm,
    pub phase_s: ErrorNorm,
    pub u: ErrorNorm,
    pub v: ErrorNorm,
    pub bohm_q: ErrorNorm,
    pub p_total: ErrorNorm,
    pub p_gas: ErrorNorm,
    pub p_vacuum: ErrorNorm,
    pub force_local: ErrorNorm,
}

impl FieldErrorNorms {
    /// Largest ∞-norm across all fields.
    pub fn max_linf(&self) -> f64 {
        [
            self.rho.linf,
            self.phase_s.linf,
            self.u.linf,
            self.v.linf,
            self.bohm_q.linf,
            self.p_total.linf,
            self.p_gas.linf,
            self.p_vacuum.linf,
            self.force_local.linf,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl GaussianParams {
    /// Field-by-field error norms restricted to |x| <= window_sigmas·σ(t).
    /// The phase is gauge-aligned at the node nearest the center before
    /// differencing (a global phase shift is not an error). Errors on grid
    /// or time mismatch.
    pub fn compare(
        &self,
        numeric: &MadelungFields,
        analytic: &MadelungFields,
        window_sigmas: f64,
    ) -> Result<FieldErrorNorms> {
        if !numeric.rho.grid().same_as(analytic.rho.grid()) {
            return Err(Error::GridMismatch(
                "compare needs both field sets on one grid".into(),
            ));
        }
        if (numeric.time - analytic.time).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "compare needs matching times (got {} vs {})",
                numeric.time, analytic.time
            )));
        }
        let grid = numeric.rho.grid();
        let half_window = window_sigmas * self.sigma(numeric.time);
        let in_window: Vec<bool> = grid.nodes().iter().map(|&x| x.abs() <= half_window).collect();

        let center = grid
            .nodes()
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap();
        let gauge = numeric.phase_s.values()[center] - analytic.phase_s.values()[center];

        let norms = |a: &RealField, b: &RealField, offset: f64| -> ErrorNorm {
            let dx = grid.spacing();
            let mut linf = 0.0_f64;
            let mut l2 = 0.0_f64;
            for (j, sel) in in_window.iter().enumerate() {
                if *sel {
                    let d = a.values()[j] - b.values()[j] - offset;
                    linf = linf.max(d.abs());
                    l2 += d * d * dx;
                }
            }
            ErrorNorm {
                linf,
                l2: l2.sqrt(),
            }
        };

        Ok(FieldErrorNorms {
            rho: norms(&numeric.rho, &analytic.rho, 0.0),
            phase_s: norms(&numeric.phase_s, &analytic.phase_s, gauge),
            u: norms(&numeric.u, &analytic.u, 0.0),
            v: norms(&numeric.v, &analytic.v, 0.0),
            bohm_q: norms(&numeric.bohm_q, &analytic.bohm_q, 0.0),
            p_total: norms(&numeric.p_total, &analytic.p_total, 0.0),
            p_gas: norms(&numeric.p_gas, &analytic.p_gas, 0.0),
            p_vacuum: norms(&numeric.p_vacuum, &analytic.p_vacuum, 0.0),
            force_local: norms(&numeric.force_local, &analytic.force_local, 0.0),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> GaussianParams {
        GaussianParams::new(1.0, PhysicsConfig::default()).unwrap()
    }

    #[test]
    fn sigma_values() {
        let p = params();
        assert_eq!(p.sigma(0.0), 1.0);
        assert!((p.sigma(2.0) - 2.0_f64.sqrt()).abs() < 1e-15);
        assert_eq!(p.sigma(-3.0), p.sigma(3.0));
    }

    #[test]
    fn sigma_ode_residual_vanishes() {
        // σ σ̈ = (ħ/2mσ)² checked with analytic time derivatives of σ²
        let p = params();
        for &t in &[0.0, 0.5, 1.0, 5.0] {
            let h = 1e-5;
            let sdd = (p.sigma(t + h) - 2.0 * p.sigma(t) + p.sigma(t - h)) / (h * h);
            let rhs = (p.cfg.hbar / (2.0 * p.cfg.mass * p.sigma(t))).powi(2);
            assert!((p.sigma(t) * sdd - rhs).abs() < 1e-5);
        }
    }

    #[test]
    fn u_closed_form_matches_log_derivative_route() {
        // x dlnσ/dt equals (ħ/2mσ₀)² xt/σ² = xt/((2mσ₀²/ħ)² + t²)
        // identically (rearranged with σ² eliminated through its closed form)
        let p = params();
        let grid = Grid::new(256, 40.0).unwrap();
        for &t in &[0.0, 0.3, 1.0, 10.0] {
            let dln = p.dln_sigma_dt(t);
            let direct = |x: f64| {
                let a = 2.0 * p.cfg.mass * p.sigma0 * p.sigma0 / p.cfg.hbar;
                x * t / (a * a + t * t)
            };
            for &x in grid.nodes().iter().step_by(17) {
                assert!((dln * x - direct(x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn v_is_scaled_u_over_t() {
        // v = (2mσ₀²/ħ) u/t for t ≠ 0
        let p = params();
        let t = 0.7;
        let x = 1.3;
        let u = p.dln_sigma_dt(t) * x;
        let v = p.cfg.hbar * x / (2.0 * p.cfg.mass * p.sigma(t).powi(2));
        let scale = 2.0 * p.cfg.mass * p.sigma0 * p.sigma0 / p.cfg.hbar;
        assert!((v - scale * u / t).abs() < 1e-12);
    }

    #[test]
    fn asymptotic_regimes_of_u() {
        let p = params();
        let x = 1.0;
        // short times: u ≈ (ħ/2mσ₀²)² x t
        let t = 1e-3;
        let early = (p.cfg.hbar / (2.0 * p.cfg.mass * p.sigma0 * p.sigma0)).powi(2) * x * t;
        let u_early = p.dln_sigma_dt(t) * x;
        assert!((u_early / early - 1.0).abs() < 1e-5);
        // long times: u ≈ x/t
        let t = 1e3;
        let u_late = p.dln_sigma_dt(t) * x;
        assert!((u_late / (x / t) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn free_energy_scaling() {
        let p = params();
        assert!((p.free_energy() - 0.125).abs() < 1e-15);
        let wider = GaussianParams::new(2.0, PhysicsConfig::default()).unwrap();
        assert!((wider.free_energy() - 0.125 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn t0_fields_match_quoted_forms() {
        let p = params();
        let grid = Grid::new(512, 40.0).unwrap();
        let f = p.analytic_fields(0.0, &grid);
        for (j, &x) in grid.nodes().iter().enumerate() {
            if x.abs() > 5.0 {
                continue;
            }
            let r = f.rho.values()[j];
            assert!(f.u.values()[j].abs() < 1e-15);
            assert!((f.v.values()[j] - 0.5 * x).abs() < 1e-12);
            assert!((f.p_vacuum.values()[j] - 0.25 * r * (1.0 - x * x)).abs() < 1e-12);
            assert!((f.force_local.values()[j] - 0.25 * x * (3.0 - x * x)).abs() < 1e-12);
        }
    }

    #[test]
    fn u_at_t1_consistent_with_spreading() {
        // natural units, σ₀ = 1: σ²(1) = 5/4, so u(x, 1) = x/5 and
        // v = (2mσ₀²/ħ) u/t = 2u = 2x/5
        let p = params();
        let grid = Grid::new(256, 40.0).unwrap();
        let f = p.analytic_fields(1.0, &grid);
        for (j, &x) in grid.nodes().iter().enumerate() {
            assert!((f.u.values()[j] - 0.2 * x).abs() < 1e-12);
            assert!((f.v.values()[j] - 0.4 * x).abs() < 1e-12);
        }
    }

    #[test]
    fn compare_self_is_zero_and_checks_time() {
        let p = params();
        let grid = Grid::new(256, 40.0).unwrap();
        let f = p.analytic_fields(1.0, &grid);
        let norms = p.compare(&f, &f, 4.0).unwrap();
        assert_eq!(norms.max_linf(), 0.0);
        let g = p.analytic_fields(2.0, &grid);
        assert!(p.compare(&f, &g, 4.0).is_err());
    }

    #[test]
    fn force_partition_crossover_density() {
        // where ∂p_g/∂x = 0 (|x| = √2 σ) the density is 1/(√(2π) σ e)
        let p = params();
        let t = 0.8;
        let s = p.sigma(t);
        let x_star = 2.0_f64.sqrt() * s;
        let rho_at = (-x_star * x_star / (2.0 * s * s)).exp()
            / (s * (2.0 * std::f64::consts::PI).sqrt());
        let expected = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * s * std::f64::consts::E);
        assert!((rho_at - expected).abs() < 1e-15);
    }
}
