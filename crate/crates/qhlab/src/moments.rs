//! Global expectation values and the force-moment ladder.
//!
//! The local mean force F̄ = m(ħ/2m)² ρ'''/ρ weighted by ρ makes the force
//! moments ⟨X^k F⟩ = (ħ²/4m) ∫ x^k ρ''' dx. Repeated integration by parts of
//! the decaying density yields the ladder
//!
//!   ⟨X^{k+3} F⟩ = -(1/m)(ħ/2)² (k+1)(k+2)(k+3) ⟨X^k⟩,
//!
//! whose first rungs are ⟨F⟩ = ⟨XF⟩ = ⟨X²F⟩ = 0 and ⟨X³F⟩ = -3ħ²/2m.
//! This module computes both sides by quadrature, the energy partition
//! E = K + I + U (with K from u, I from v), and the Heisenberg-like product
//! √⟨Ẋ²⟩·√⟨X²⟩ with ⟨Ẋ²⟩ = ∫ρ(u²+v²)dx.

use serde::Serialize;

use crate::config::PhysicsConfig;
use crate::error::{Error, Result};
use crate::grid::RealField;
use crate::madelung;
use crate::schrodinger::{EvolutionResult, WaveFunction};
use crate::spectral::SpectralOps;

/// Boundary density above this value triggers the decay warning: the moment
/// integrals assume the density has died off before the periodic edge.
pub const DECAY_GUARD: f64 = 1e-12;

/// ⟨X^k⟩ and ⟨X^k F⟩ for k = 0..=k_max plus the ladder residuals
/// |⟨X^{k+3}F⟩ + (1/m)(ħ/2)²(k+1)(k+2)(k+3)⟨X^k⟩|.
#[derive(Clone, Debug, Serialize)]
pub struct MomentReport {
    pub time: f64,
    pub x_moments: Vec<f64>,
    pub force_moments: Vec<f64>,
    pub ladder_residuals: Vec<f64>,
    /// Set when the boundary density exceeds the decay guard.
    pub decay_warning: bool,
}

/// Energy partition: kinetic K = ∫ρ(m/2)u², internal I = ∫ρ(m/2)v²,
/// potential U = ∫ρU. `total` is K+I+U by construction; `total_psi_form`
/// evaluates the same energy from ψ in wavenumber space.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EnergyReport {
    pub kinetic_k: f64,
    pub internal_i: f64,
    pub potential_u: f64,
    pub total: f64,
    pub total_psi_form: f64,
    pub form_discrepancy: f64,
}

/// Quadrature of ∫ x^k ρ dx on the grid.
pub fn global_moment(rho: &RealField, k: u32) -> f64 {
    let dx = rho.grid().spacing();
    dx * rho
        .grid()
        .nodes()
        .iter()
        .zip(rho.values())
        .map(|(&x, &r)| x.powi(k as i32) * r)
        .sum::<f64>()
}

/// True when the density has decayed below [`DECAY_GUARD`] at the domain edge.
pub fn boundary_decay_ok(rho: &RealField) -> bool {
    let v = rho.values();
    let n = v.len();
    v[0].abs() <= DECAY_GUARD && v[n - 1].abs() <= DECAY_GUARD
}

/// ⟨X^k F⟩ = (ħ²/4m) ∫ x^k ρ''' dx with a spectral third derivative.
pub fn force_moment(rho: &RealField, cfg: &PhysicsConfig, k: u32) -> f64 {
    let ops = SpectralOps::new(rho.grid());
    force_moment_with(rho, cfg, k, &ops)
}

pub(crate) fn force_moment_with(
    rho: &RealField,
    cfg: &PhysicsConfig,
    k: u32,
    ops: &SpectralOps,
) -> f64 {
    let d3 = ops.derivative(rho, 3);
    let coeff = cfg.hbar * cfg.hbar / (4.0 * cfg.mass);
    let dx = rho.grid().spacing();
    coeff
        * dx
        * rho
            .grid()
            .nodes()
            .iter()
            .zip(d3.values())
            .map(|(&x, &d)| x.powi(k as i32) * d)
            .sum::<f64>()
}

/// Fill the ladder report for k = 0..=k_max (k_max >= 3).
pub fn verify_moment_ladder(
    rho: &RealField,
    cfg: &PhysicsConfig,
    k_max: u32,
    time: f64,
) -> Result<MomentReport> {
    if k_max < 3 {
        return Err(Error::InvalidInput(format!(
            "ladder needs k_max >= 3 (got {k_max})"
        )));
    }
    let ops = SpectralOps::new(rho.grid());
    let x_moments: Vec<f64> = (0..=k_max).map(|k| global_moment(rho, k)).collect();
    let force_moments: Vec<f64> = (0..=k_max)
        .map(|k| force_moment_with(rho, cfg, k, &ops))
        .collect();
    let c = cfg.hbar * cfg.hbar / (4.0 * cfg.mass);
    let ladder_residuals: Vec<f64> = (0..=k_max - 3)
        .map(|k| {
            let rhs = -c
                * ((k + 1) as f64)
                * ((k + 2) as f64)
                * ((k + 3) as f64)
                * x_moments[k as usize];
            (force_moments[(k + 3) as usize] - rhs).abs()
        })
        .collect();
    Ok(MomentReport {
        time,
        x_moments,
        force_moments,
        ladder_residuals,
        decay_warning: !boundary_decay_ok(rho),
    })
}

/// Characteristic function ρ̃(q) = ∫ ρ e^{-iqx} dx.
pub fn characteristic_function(rho: &RealField, q: f64) -> num_complex::Complex64 {
    let dx = rho.grid().spacing();
    let mut acc = num_complex::Complex64::new(0.0, 0.0);
    for (&x, &r) in rho.grid().nodes().iter().zip(rho.values()) {
        acc += num_complex::Complex64::from_polar(r, -q * x);
    }
    acc * dx
}

/// Total energy from ψ in wavenumber space:
/// (dx/n) Σ_k (ħ²k²/2m)|ψ̂_k|² + dx Σ_j U_j |ψ_j|².
pub(crate) fn psi_form_energy(
    psi: &WaveFunction,
    potential: &RealField,
    cfg: &PhysicsConfig,
    ops: &SpectralOps,
) -> f64 {
    let spectrum = ops.transform(psi);
    let n = spectrum.len() as f64;
    let dx = psi.grid().spacing();
    let ck = 0.5 * cfg.hbar * cfg.hbar / cfg.mass;
    let kinetic: f64 = spectrum
        .iter()
        .zip(ops.wavenumbers())
        .map(|(c, &k)| ck * k * k * c.norm_sqr())
        .sum::<f64>()
        * dx
        / n;
    let pot: f64 = dx
        * psi
            .values()
            .iter()
            .zip(potential.values())
            .map(|(z, &u)| u * z.norm_sqr())
            .sum::<f64>();
    kinetic + pot
}

/// Energy partition computed both ways: hydrodynamic K+I+U from (u, v) and
/// the wavenumber-space ψ form. The two are independent discretizations of
/// the same energy and agree to spectral accuracy on smooth states.
pub fn total_energy(
    psi: &WaveFunction,
    potential: &RealField,
    cfg: &PhysicsConfig,
) -> EnergyReport {
    let ops = SpectralOps::new(psi.grid());
    let rho = madelung::density(psi);
    let u = madelung::drift_velocity_with(psi, cfg, &ops);
    let v = madelung::osmotic_velocity_with(&rho, cfg, &ops);
    let dx = psi.grid().spacing();
    let half_m = 0.5 * cfg.mass;
    let kinetic_k = dx
        * rho
            .values()
            .iter()
            .zip(u.values())
            .map(|(&r, &uj)| r * half_m * uj * uj)
            .sum::<f64>();
    let internal_i = dx
        * rho
            .values()
            .iter()
            .zip(v.values())
            .map(|(&r, &vj)| r * half_m * vj * vj)
            .sum::<f64>();
    let potential_u = dx
        * rho
            .values()
            .iter()
            .zip(potential.values())
            .map(|(&r, &uj)| r * uj)
            .sum::<f64>();
    let total = kinetic_k + internal_i + potential_u;
    let total_psi_form = psi_form_energy(psi, potential, cfg, &ops);
    EnergyReport {
        kinetic_k,
        internal_i,
        potential_u,
        total,
        total_psi_form,
        form_discrepancy: (total - total_psi_form).abs(),
    }
}

/// Heisenberg-like series √⟨Ẋ²⟩·√⟨X²⟩ per snapshot and its time average
/// over the run window (trapezoid in time).
#[derive(Clone, Debug, Serialize)]
pub struct HeisenbergSeries {
    pub series: Vec<(f64, f64)>,
    pub time_average: f64,
}

pub fn heisenberg_series(
    evolution: &EvolutionResult,
    cfg: &PhysicsConfig,
) -> Result<HeisenbergSeries> {
    if evolution.snapshots.len() < 2 {
        return Err(Error::InvalidInput(
            "heisenberg series needs at least 2 snapshots".into(),
        ));
    }
    let mut series = Vec::with_capacity(evolution.snapshots.len());
    for (t, psi) in &evolution.snapshots {
        let ops = SpectralOps::new(psi.grid());
        let rho = madelung::density(psi);
        let u = madelung::drift_velocity_with(psi, cfg, &ops);
        let v = madelung::osmotic_velocity_with(&rho, cfg, &ops);
        let dx = psi.grid().spacing();
        let xdot_sq = dx
            * rho
                .values()
                .iter()
                .zip(u.values().iter().zip(v.values()))
                .map(|(&r, (&uj, &vj))| r * (uj * uj + vj * vj))
                .sum::<f64>();
        let x_sq = global_moment(&rho, 2);
        series.push((*t, xdot_sq.sqrt() * x_sq.sqrt()));
    }
    let (t0, tn) = (series[0].0, series.last().unwrap().0);
    let mut integral = 0.0;
    for w in series.windows(2) {
        integral += 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0);
    }
    let time_average = if tn > t0 {
        integral / (tn - t0)
    } else {
        series[0].1
    };
    Ok(HeisenbergSeries {
        series,
        time_average,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::schrodinger::{init_gaussian, plane_wave};

    fn setup() -> (Grid, PhysicsConfig) {
        (Grid::new(1024, 40.0).unwrap(), PhysicsConfig::default())
    }

    fn gaussian_rho(grid: &Grid, cfg: &PhysicsConfig) -> RealField {
        madelung::density(&init_gaussian(grid, cfg, 1.0, 0.0, 0.0).unwrap())
    }

    #[test]
    fn normalization_and_variance() {
        let (grid, cfg) = setup();
        let rho = gaussian_rho(&grid, &cfg);
        assert!((global_moment(&rho, 0) - 1.0).abs() < 1e-12);
        assert!((global_moment(&rho, 2) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn low_force_moments_vanish() {
        let (grid, cfg) = setup();
        let rho = gaussian_rho(&grid, &cfg);
        for k in 0..=2 {
            assert!(
                force_moment(&rho, &cfg, k).abs() < 1e-10,
                "k = {k} moment should vanish"
            );
        }
    }

    #[test]
    fn third_force_moment_is_minus_three_halves() {
        let (grid, cfg) = setup();
        let rho = gaussian_rho(&grid, &cfg);
        assert!((force_moment(&rho, &cfg, 3) + 1.5).abs() < 1e-9);
    }

    #[test]
    fn ladder_k2_gives_minus_fifteen_sigma_sq() {
        let (grid, cfg) = setup();
        let rho = gaussian_rho(&grid, &cfg);
        let report = verify_moment_ladder(&rho, &cfg, 6, 0.0).unwrap();
        assert!((report.force_moments[5] + 15.0).abs() < 1e-7);
        for (k, res) in report.ladder_residuals.iter().enumerate() {
            assert!(*res < 1e-7, "ladder residual k={k} too large: {res}");
        }
        assert!(!report.decay_warning);
    }

    #[test]
    fn ladder_requires_kmax_3() {
        let (grid, cfg) = setup();
        let rho = gaussian_rho(&grid, &cfg);
        assert!(verify_moment_ladder(&rho, &cfg, 2, 0.0).is_err());
    }

    #[test]
    fn characteristic_function_values() {
        let (grid, cfg) = setup();
        let rho = gaussian_rho(&grid, &cfg);
        let at0 = characteristic_function(&rho, 0.0);
        assert!((at0.re - 1.0).abs() < 1e-12 && at0.im.abs() < 1e-14);
        let at1 = characteristic_function(&rho, 1.0);
        // Gaussian: ρ̃(1) = e^{-1/2}
        assert!((at1.re - 0.6065306597126334).abs() < 1e-10);
        assert!(at1.im.abs() < 1e-12);
        // Hermitian symmetry for real densities
        let plus = characteristic_function(&rho, 0.7);
        let minus = characteristic_function(&rho, -0.7);
        assert!((plus - minus.conj()).norm() < 1e-14);
    }

    #[test]
    fn plane_wave_energy_is_kinetic_only() {
        let (grid, cfg) = setup();
        let mode = 5;
        let k = 2.0 * std::f64::consts::PI * mode as f64 / grid.length();
        let psi = plane_wave(&grid, mode);
        let u = RealField::zeros(&grid);
        let rep = total_energy(&psi, &u, &cfg);
        let expect = 0.5 * cfg.hbar * cfg.hbar * k * k / cfg.mass;
        assert!((rep.kinetic_k - expect).abs() < 1e-10);
        assert!(rep.internal_i.abs() < 1e-12);
        assert!(rep.potential_u.abs() < 1e-14);
        assert!(rep.form_discrepancy < 1e-10);
    }

    #[test]
    fn gaussian_free_energy_at_t0() {
        let (grid, cfg) = setup();
        let psi = init_gaussian(&grid, &cfg, 1.0, 0.0, 0.0).unwrap();
        let u = RealField::zeros(&grid);
        let rep = total_energy(&psi, &u, &cfg);
        // K + I = (1/2)(ħ/2mσ₀)² = 1/8
        assert!((rep.kinetic_k + rep.internal_i - 0.125).abs() < 1e-8);
        assert!(rep.form_discrepancy < 1e-10);
    }

    #[test]
    fn decay_guard_fires_on_wide_density() {
        let (grid, cfg) = setup();
        // almost uniform density: clearly not decayed at the edge
        let rho = RealField::from_fn(&grid, |_| 1.0 / grid.length());
        let report = verify_moment_ladder(&rho, &cfg, 3, 0.0).unwrap();
        assert!(report.decay_warning);
        let _ = cfg;
    }
}
