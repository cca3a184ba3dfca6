//! Hydrodynamic diagnostics of a wave function.
//!
//! With ψ = √ρ e^{iS/ħ} this module extracts, on the grid:
//!
//! - ρ = |ψ|² and the unwrapped phase action S,
//! - drift velocity u = (ħ/m) Im(ψ* ∂ψ/∂x)/|ψ|² (= ∂S/∂x / m),
//! - osmotic velocity v = -(ħ/2m) ∂ ln ρ/∂x,
//! - Bohm potential Q = -(ħ²/2m) (√ρ)''/√ρ,
//! - pressure split p = p_g + p_v with p_g = ρ m v² (diluted-gas part) and
//!   p_v = -(1/m)(ħ/2)² ρ'' (vacuum part),
//! - local mean stochastic force F̄ = m (ħ/2m)² ρ'''/ρ,
//!
//! plus discrete residuals of the continuity and momentum-form equations
//! assembled from consecutive snapshots.
//!
//! Quantities that divide by ρ are masked (set to 0, flagged) where
//! ρ <= ε_node = EPS_NODE_REL · max ρ. Spatial derivatives act on smooth
//! globally-decaying fields (ψ, ρ, √ρ) in wavenumber space; ratios are formed
//! pointwise afterwards so mask edges cannot ring through the spectrum.
//!
//! Ratio-valued fields are assembled from quotients of g = √ρ
//! (ρ'/ρ = 2g'/g, ρ''/ρ = 2[(g'/g)² + g''/g], ρ'''/ρ = 6g'g''/g² + 2g'''/g):
//! algebraically identical to the ρ-derivative forms but the FFT roundoff is
//! divided by √ρ instead of ρ, which keeps the packet tails clean. The raw
//! pressure p_v stays a plain second derivative of ρ, so identity checks that
//! pit it against the g-route quantities compare two independent transforms.

use crate::config::PhysicsConfig;
use crate::error::{Error, Result};
use crate::grid::RealField;
use crate::potential::Potential;
use crate::schrodinger::WaveFunction;
use crate::spectral::{derivative_fd4, SpectralOps};

/// Relative node threshold: masked where ρ <= EPS_NODE_REL · max ρ.
pub const EPS_NODE_REL: f64 = 1e-12;

/// The full diagnostic field set at one time.
#[derive(Clone, Debug)]
pub struct MadelungFields {
    pub time: f64,
    pub rho: RealField,
    pub phase_s: RealField,
    pub u: RealField,
    pub v: RealField,
    pub bohm_q: RealField,
    pub p_total: RealField,
    pub p_gas: RealField,
    pub p_vacuum: RealField,
    pub force_local: RealField,
    /// true where ρ > ε_node; ratio fields are zeroed elsewhere.
    pub mask: Vec<bool>,
    pub eps_node: f64,
}

/// Probability density ρ = |ψ|².
pub fn density(psi: &WaveFunction) -> RealField {
    psi.abs_squared()
}

/// Node mask for a density: true where ρ > eps_rel · max ρ.
/// Returns the mask and the absolute threshold used.
pub fn node_mask(rho: &RealField, eps_rel: f64) -> (Vec<bool>, f64) {
    let eps = eps_rel * rho.max_abs();
    (rho.values().iter().map(|&r| r > eps).collect(), eps)
}

/// Unwrapped phase action S = ħ arg ψ, continuous wherever ρ > ε_node.
///
/// Unwrapping starts at the density maximum and accumulates principal-value
/// increments outward; inside node regions the raw principal value is kept
/// (those points carry the mask flag). Rejects an identically zero ψ.
pub fn phase(psi: &WaveFunction, cfg: &PhysicsConfig) -> Result<RealField> {
    let rho = density(psi);
    if rho.max_abs() == 0.0 {
        return Err(Error::InvalidInput(
            "phase of an identically zero wave function".into(),
        ));
    }
    let (mask, _) = node_mask(&rho, EPS_NODE_REL);
    let n = psi.grid().n_points();
    let raw: Vec<f64> = psi.values().iter().map(|z| z.arg()).collect();
    let anchor = rho
        .values()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();

    let two_pi = 2.0 * std::f64::consts::PI;
    let wrap = |d: f64| d - two_pi * (d / two_pi).round();

    let mut s = vec![0.0; n];
    s[anchor] = raw[anchor];
    for j in anchor + 1..n {
        s[j] = s[j - 1] + wrap(raw[j] - raw[j - 1]);
    }
    for j in (0..anchor).rev() {
        s[j] = s[j + 1] + wrap(raw[j] - raw[j + 1]);
    }
    for j in 0..n {
        if !mask[j] {
            s[j] = raw[j];
        }
        s[j] *= cfg.hbar;
    }
    RealField::from_values(psi.grid(), s)
}

/// Drift velocity u = (ħ/m) Im(ψ* ∂ψ/∂x)/|ψ|², masked at nodes.
/// This form needs no phase unwrapping and is immune to branch cuts.
pub fn drift_velocity(psi: &WaveFunction, cfg: &PhysicsConfig) -> RealField {
    let ops = SpectralOps::new(psi.grid());
    drift_velocity_with(psi, cfg, &ops)
}

pub(crate) fn drift_velocity_with(
    psi: &WaveFunction,
    cfg: &PhysicsConfig,
    ops: &SpectralOps,
) -> RealField {
    let rho = density(psi);
    let (mask, _) = node_mask(&rho, EPS_NODE_REL);
    let dpsi = ops.derivative_complex(psi, 1);
    let coeff = cfg.hbar / cfg.mass;
    let mut out = RealField::zeros(psi.grid());
    for (j, o) in out.values_mut().iter_mut().enumerate() {
        if mask[j] {
            let num = (psi.values()[j].conj() * dpsi.values()[j]).im;
            *o = coeff * num / rho.values()[j];
        }
    }
    out
}

/// Osmotic velocity v = -(ħ/2m) ∂ln ρ/∂x, masked at nodes.
/// Assembled as -(ħ/m) (√ρ)'/√ρ.
pub fn osmotic_velocity(rho: &RealField, cfg: &PhysicsConfig) -> RealField {
    let ops = SpectralOps::new(rho.grid());
    osmotic_velocity_with(rho, cfg, &ops)
}

pub(crate) fn osmotic_velocity_with(
    rho: &RealField,
    cfg: &PhysicsConfig,
    ops: &SpectralOps,
) -> RealField {
    let (mask, _) = node_mask(rho, EPS_NODE_REL);
    let g = rho.map(f64::sqrt);
    let d1g = ops.derivative(&g, 1);
    let coeff = -cfg.hbar / cfg.mass;
    let mut out = RealField::zeros(rho.grid());
    for (j, o) in out.values_mut().iter_mut().enumerate() {
        if mask[j] {
            *o = coeff * d1g.values()[j] / g.values()[j];
        }
    }
    out
}

/// Bohm potential Q = -(ħ²/2m) (√ρ)''/√ρ, masked at nodes.
pub fn bohm_potential(rho: &RealField, cfg: &PhysicsConfig) -> RealField {
    let ops = SpectralOps::new(rho.grid());
    bohm_potential_with(rho, cfg, &ops)
}

pub(crate) fn bohm_potential_with(
    rho: &RealField,
    cfg: &PhysicsConfig,
    ops: &SpectralOps,
) -> RealField {
    let (mask, _) = node_mask(rho, EPS_NODE_REL);
    let g = rho.map(f64::sqrt);
    let d2g = ops.derivative(&g, 2);
    let coeff = -0.5 * cfg.hbar * cfg.hbar / cfg.mass;
    let mut out = RealField::zeros(rho.grid());
    for (j, o) in out.values_mut().iter_mut().enumerate() {
        if mask[j] {
            *o = coeff * d2g.values()[j] / g.values()[j];
        }
    }
    out
}

/// The pressure split p = p_g + p_v.
#[derive(Clone, Debug)]
pub struct Pressures {
    pub total: RealField,
    pub gas: RealField,
    pub vacuum: RealField,
}

/// p_g = ρ m v² (masked through v) and p_v = -(1/m)(ħ/2)² ρ'' (raw: needs no
/// division); the total is their pointwise sum.
pub fn pressures(rho: &RealField, cfg: &PhysicsConfig) -> Pressures {
    let ops = SpectralOps::new(rho.grid());
    pressures_with(rho, cfg, &ops)
}

pub(crate) fn pressures_with(rho: &RealField, cfg: &PhysicsConfig, ops: &SpectralOps) -> Pressures {
    let v = osmotic_velocity_with(rho, cfg, ops);
    let d2rho = ops.derivative(rho, 2);
    let cvac = -(cfg.hbar * cfg.hbar) / (4.0 * cfg.mass);
    let gas = rho.zip_map(&v, |r, vv| r * cfg.mass * vv * vv);
    let vacuum = d2rho.map(|d| cvac * d);
    let total = gas.zip_map(&vacuum, |a, b| a + b);
    Pressures {
        total,
        gas,
        vacuum,
    }
}

/// Independent route to p/ρ: -(1/m)(ħ/2)² ∂² ln ρ/∂x², differentiated with
/// 4th-order finite differences. ln ρ of a localized packet has a corner at
/// the periodic seam, so the global spectral route does not apply; the local
/// stencil is exact when ln ρ is polynomial (Gaussian states) and carries
/// O(dx⁴) truncation otherwise. Masked at nodes.
pub fn pressure_over_rho_log_form(rho: &RealField, cfg: &PhysicsConfig) -> RealField {
    let (mask, _) = node_mask(rho, EPS_NODE_REL);
    let ln_rho = rho.map(|r| if r > 0.0 { r.ln() } else { f64::MIN_POSITIVE.ln() });
    let d2 = derivative_fd4(&ln_rho, 2);
    let coeff = -(cfg.hbar * cfg.hbar) / (4.0 * cfg.mass);
    let mut out = RealField::zeros(rho.grid());
    for (j, o) in out.values_mut().iter_mut().enumerate() {
        if mask[j] {
            *o = coeff * d2.values()[j];
        }
    }
    out
}

/// Local mean stochastic force F̄ = m (ħ/2m)² (∂³ρ/∂x³)/ρ, masked at nodes.
/// The ratio is assembled as 6g'g''/g² + 2g'''/g with g = √ρ.
pub fn local_mean_force(rho: &RealField, cfg: &PhysicsConfig) -> RealField {
    let ops = SpectralOps::new(rho.grid());
    local_mean_force_with(rho, cfg, &ops)
}

pub(crate) fn local_mean_force_with(
    rho: &RealField,
    cfg: &PhysicsConfig,
    ops: &SpectralOps,
) -> RealField {
    let (mask, _) = node_mask(rho, EPS_NODE_REL);
    let g = rho.map(f64::sqrt);
    let d1 = ops.derivative(&g, 1);
    let d2 = ops.derivative(&g, 2);
    let d3 = ops.derivative(&g, 3);
    let coeff = cfg.hbar * cfg.hbar / (4.0 * cfg.mass);
    let mut out = RealField::zeros(rho.grid());
    for (j, o) in out.values_mut().iter_mut().enumerate() {
        if mask[j] {
            let gj = g.values()[j];
            let ratio = 6.0 * d1.values()[j] * d2.values()[j] / (gj * gj)
                + 2.0 * d3.values()[j] / gj;
            *o = coeff * ratio;
        }
    }
    out
}

/// ρ v² as a smooth unmasked product, (ħ/m)² ((√ρ)')². Equals the gas
/// pressure over m everywhere ρ > 0 but carries no mask-edge jump, so it can
/// be differentiated spectrally without ringing.
pub fn rho_v_squared(rho: &RealField, cfg: &PhysicsConfig) -> RealField {
    let ops = SpectralOps::new(rho.grid());
    let g = rho.map(f64::sqrt);
    let d1 = ops.derivative(&g, 1);
    let c = (cfg.hbar / cfg.mass).powi(2);
    d1.map(|d| c * d * d)
}

/// Pointwise defect of the enthalpy identity Q - (m/2)v² - p_v/ρ, masked at
/// nodes. Q and v enter through the √ρ transform while p_v/ρ is rebuilt from
/// ψ via ρ''/ρ = 2Re(ψ*ψ'')/ρ + 2|ψ'|²/ρ, so the two sides ride independent
/// transforms and stay conditioned deep into the tails.
pub fn enthalpy_defect(psi: &WaveFunction, cfg: &PhysicsConfig) -> RealField {
    let ops = SpectralOps::new(psi.grid());
    let rho = density(psi);
    let (mask, _) = node_mask(&rho, EPS_NODE_REL);
    let q = bohm_potential_with(&rho, cfg, &ops);
    let v = osmotic_velocity_with(&rho, cfg, &ops);
    let d1psi = ops.derivative_complex(psi, 1);
    let d2psi = ops.derivative_complex(psi, 2);
    let cvac = -(cfg.hbar * cfg.hbar) / (4.0 * cfg.mass);
    let mut out = RealField::zeros(psi.grid());
    for (j, o) in out.values_mut().iter_mut().enumerate() {
        if mask[j] {
            let r = rho.values()[j];
            let d2rho_over_rho = 2.0 * (psi.values()[j].conj() * d2psi.values()[j]).re / r
                + 2.0 * d1psi.values()[j].norm_sqr() / r;
            let pv_over_rho = cvac * d2rho_over_rho;
            let vj = v.values()[j];
            *o = q.values()[j] - 0.5 * cfg.mass * vj * vj - pv_over_rho;
        }
    }
    out
}

/// Split-form p/ρ = m v² + p_v/ρ assembled from the √ρ quotients:
/// (ħ²/2m)[(g'/g)² - g''/g]. One side of the two-route pressure check;
/// the other side is the ln ρ stencil route. Masked at nodes.
pub fn pressure_over_rho_split(rho: &RealField, cfg: &PhysicsConfig) -> RealField {
    let ops = SpectralOps::new(rho.grid());
    let (mask, _) = node_mask(rho, EPS_NODE_REL);
    let g = rho.map(f64::sqrt);
    let d1 = ops.derivative(&g, 1);
    let d2 = ops.derivative(&g, 2);
    let coeff = 0.5 * cfg.hbar * cfg.hbar / cfg.mass;
    let mut out = RealField::zeros(rho.grid());
    for (j, o) in out.values_mut().iter_mut().enumerate() {
        if mask[j] {
            let gj = g.values()[j];
            let r1 = d1.values()[j] / gj;
            *o = coeff * (r1 * r1 - d2.values()[j] / gj);
        }
    }
    out
}

/// Compute the whole diagnostic set at once (one FFT plan, shared mask).
pub fn diagnostics(psi: &WaveFunction, cfg: &PhysicsConfig, time: f64) -> Result<MadelungFields> {
    let ops = SpectralOps::new(psi.grid());
    let rho = density(psi);
    let (mask, eps_node) = node_mask(&rho, EPS_NODE_REL);
    let phase_s = phase(psi, cfg)?;
    let u = drift_velocity_with(psi, cfg, &ops);
    let v = osmotic_velocity_with(&rho, cfg, &ops);
    let bohm_q = bohm_potential_with(&rho, cfg, &ops);
    let prs = pressures_with(&rho, cfg, &ops);
    let force_local = local_mean_force_with(&rho, cfg, &ops);
    Ok(MadelungFields {
        time,
        rho,
        phase_s,
        u,
        v,
        bohm_q,
        p_total: prs.total,
        p_gas: prs.gas,
        p_vacuum: prs.vacuum,
        force_local,
        mask,
        eps_node,
    })
}

/// -(1/m) ∂Q/∂x evaluated from √ρ by the quotient rule
/// (∂x(g''/g) = g'''/g - g'' g'/g²), masked at nodes. Derivatives act on the
/// smooth decaying g = √ρ, never on masked ratios.
pub fn bohm_force(rho: &RealField, cfg: &PhysicsConfig) -> RealField {
    let ops = SpectralOps::new(rho.grid());
    bohm_force_with(rho, cfg, &ops)
}

pub(crate) fn bohm_force_with(
    rho: &RealField,
    cfg: &PhysicsConfig,
    ops: &SpectralOps,
) -> RealField {
    let (mask, _) = node_mask(rho, EPS_NODE_REL);
    let g = rho.map(f64::sqrt);
    let d1 = ops.derivative(&g, 1);
    let d2 = ops.derivative(&g, 2);
    let d3 = ops.derivative(&g, 3);
    let coeff = 0.5 * cfg.hbar * cfg.hbar / (cfg.mass * cfg.mass);
    let mut out = RealField::zeros(rho.grid());
    for (j, o) in out.values_mut().iter_mut().enumerate() {
        if mask[j] {
            let gj = g.values()[j];
            let dq_over_minus_half = d3.values()[j] / gj
                - d2.values()[j] * d1.values()[j] / (gj * gj);
            // Q = -(ħ²/2m) g''/g  ⇒  -(1/m) ∂Q/∂x = (ħ²/2m²) ∂x(g''/g)
            *o = coeff * dq_over_minus_half;
        }
    }
    out
}

fn check_pair(a: &MadelungFields, b: &MadelungFields) -> Result<f64> {
    if !a.rho.grid().same_as(b.rho.grid()) {
        return Err(Error::GridMismatch(
            "residuals need snapshots on the same grid".into(),
        ));
    }
    let dt = b.time - a.time;
    if !(dt > 0.0) {
        return Err(Error::InvalidInput(format!(
            "residuals need increasing times (got {} then {})",
            a.time, b.time
        )));
    }
    Ok(dt)
}

/// Discrete residual of the momentum-form equation
/// m(∂u/∂t + u ∂u/∂x) + ∂(Q+U)/∂x, centered between two snapshots.
/// ∂u/∂x is assembled as (w' - u ρ')/ρ with w = ρu so derivatives act on
/// smooth fields; reported on the joint mask, zero elsewhere.
pub fn momentum_residual(
    a: &MadelungFields,
    b: &MadelungFields,
    potential: &Potential,
    cfg: &PhysicsConfig,
) -> Result<RealField> {
    let dt = check_pair(a, b)?;
    let grid = a.rho.grid().clone();
    let ops = SpectralOps::new(&grid);
    let du_force = potential.gradient(&grid, cfg)?;

    let du_dx_at = |f: &MadelungFields| -> RealField {
        let w = f.rho.zip_map(&f.u, |r, u| r * u);
        let dw = ops.derivative(&w, 1);
        let drho = ops.derivative(&f.rho, 1);
        let mut out = RealField::zeros(&grid);
        for (j, o) in out.values_mut().iter_mut().enumerate() {
            if f.mask[j] {
                *o = (dw.values()[j] - f.u.values()[j] * drho.values()[j]) / f.rho.values()[j];
            }
        }
        out
    };
    let dudx_a = du_dx_at(a);
    let dudx_b = du_dx_at(b);
    let bohm_a = bohm_force_with(&a.rho, cfg, &ops);
    let bohm_b = bohm_force_with(&b.rho, cfg, &ops);

    let mut out = RealField::zeros(&grid);
    for (j, o) in out.values_mut().iter_mut().enumerate() {
        if a.mask[j] && b.mask[j] {
            let du_dt = (b.u.values()[j] - a.u.values()[j]) / dt;
            let u_mid = 0.5 * (a.u.values()[j] + b.u.values()[j]);
            let dudx_mid = 0.5 * (dudx_a.values()[j] + dudx_b.values()[j]);
            // -(1/m) ∂Q/∂x averaged at the midpoint
            let bohm_mid = 0.5 * (bohm_a.values()[j] + bohm_b.values()[j]);
            *o = cfg.mass * (du_dt + u_mid * dudx_mid) - cfg.mass * bohm_mid
                + du_force.values()[j];
        }
    }
    Ok(out)
}

/// Discrete residual of the continuity equation ∂ρ/∂t + ∂(ρu)/∂x, centered
/// between two snapshots.
pub fn continuity_residual(a: &MadelungFields, b: &MadelungFields) -> Result<RealField> {
    let dt = check_pair(a, b)?;
    let grid = a.rho.grid().clone();
    let ops = SpectralOps::new(&grid);
    let w_mid = a
        .rho
        .zip_map(&a.u, |r, u| r * u)
        .zip_map(&b.rho.zip_map(&b.u, |r, u| r * u), |x, y| 0.5 * (x + y));
    let dw = ops.derivative(&w_mid, 1);
    let mut out = RealField::zeros(&grid);
    for (j, o) in out.values_mut().iter_mut().enumerate() {
        if a.mask[j] && b.mask[j] {
            let drho_dt = (b.rho.values()[j] - a.rho.values()[j]) / dt;
            *o = drho_dt + dw.values()[j];
        }
    }
    Ok(out)
}

/// Max |f| over nodes where the mask holds and ρ exceeds `rho_floor`
/// (identity norms use an absolute floor so 1/ρ noise cannot dominate).
pub fn masked_linf(f: &RealField, rho: &RealField, mask: &[bool], rho_floor: f64) -> f64 {
    f.values()
        .iter()
        .zip(rho.values())
        .zip(mask)
        .filter(|((_, &r), &m)| m && r > rho_floor)
        .fold(0.0_f64, |acc, ((&x, _), _)| acc.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::schrodinger::{init_gaussian, plane_wave};
    use num_complex::Complex64;

    fn setup() -> (Grid, PhysicsConfig) {
        (Grid::new(1024, 40.0).unwrap(), PhysicsConfig::default())
    }

    #[test]
    fn uniform_state_diagnostics_vanish() {
        let (grid, cfg) = setup();
        let psi = plane_wave(&grid, 0);
        let rho = density(&psi);
        assert!((rho.values()[0] - 1.0 / grid.length()).abs() < 1e-15);
        assert!((rho.integrate() - 1.0).abs() < 1e-12);
        assert!(osmotic_velocity(&rho, &cfg).max_abs() < 1e-12);
        assert!(bohm_potential(&rho, &cfg).max_abs() < 1e-12);
        assert!(local_mean_force(&rho, &cfg).max_abs() < 1e-10);
        let prs = pressures(&rho, &cfg);
        assert!(prs.total.max_abs() < 1e-12);
        assert!(prs.gas.max_abs() < 1e-12);
        assert!(prs.vacuum.max_abs() < 1e-12);
    }

    #[test]
    fn real_state_has_zero_phase_and_drift() {
        let (grid, cfg) = setup();
        let psi = init_gaussian(&grid, &cfg, 1.0, 0.0, 0.0).unwrap();
        let rho = density(&psi);
        let s = phase(&psi, &cfg).unwrap();
        let (mask, _) = node_mask(&rho, EPS_NODE_REL);
        for (j, &m) in mask.iter().enumerate() {
            if m {
                assert!(s.values()[j].abs() < 1e-12);
            }
        }
        // deep tails divide FFT roundoff by a tiny rho, so bound u on the
        // identity region rather than everywhere
        let u = drift_velocity(&psi, &cfg);
        assert!(masked_linf(&u, &rho, &mask, 1e-8) < 1e-10);
    }

    #[test]
    fn plane_wave_linear_phase_and_drift() {
        let (grid, cfg) = setup();
        let mode = 7;
        let k = 2.0 * std::f64::consts::PI * mode as f64 / grid.length();
        let psi = plane_wave(&grid, mode);
        let s = phase(&psi, &cfg).unwrap();
        // continuous (no 2π jumps): increments all equal ħ k dx
        let dx = grid.spacing();
        for w in s.values().windows(2) {
            assert!((w[1] - w[0] - cfg.hbar * k * dx).abs() < 1e-10);
        }
        let u = drift_velocity(&psi, &cfg);
        for &uj in u.values() {
            assert!((uj - cfg.hbar * k / cfg.mass).abs() < 1e-9);
        }
    }

    #[test]
    fn gaussian_t0_closed_forms() {
        let (grid, cfg) = setup();
        let psi = init_gaussian(&grid, &cfg, 1.0, 0.0, 0.0).unwrap();
        let rho = density(&psi);
        let v = osmotic_velocity(&rho, &cfg);
        let q = bohm_potential(&rho, &cfg);
        let f = local_mean_force(&rho, &cfg);
        let prs = pressures(&rho, &cfg);
        for (j, &x) in grid.nodes().iter().enumerate() {
            if x.abs() > 4.0 {
                continue;
            }
            let rj = rho.values()[j];
            // v = x/2
            assert!((v.values()[j] - 0.5 * x).abs() < 1e-8, "v at x={x}");
            // Q = (1/4)(1 - x²/2) from direct differentiation
            assert!((q.values()[j] - 0.25 * (1.0 - 0.5 * x * x)).abs() < 1e-8);
            // F̄ = (x/4)(3 - x²)
            assert!((f.values()[j] - 0.25 * x * (3.0 - x * x)).abs() < 1e-7);
            // p = ρ/4, p_g = ρx²/4, p_v = (ρ/4)(1-x²)
            assert!((prs.total.values()[j] - 0.25 * rj).abs() < 1e-9);
            assert!((prs.gas.values()[j] - 0.25 * rj * x * x).abs() < 1e-9);
            assert!((prs.vacuum.values()[j] - 0.25 * rj * (1.0 - x * x)).abs() < 1e-9);
        }
    }

    #[test]
    fn all_zero_psi_rejected_by_phase() {
        let (grid, cfg) = setup();
        let psi = WaveFunction::from_values(
            &grid,
            vec![Complex64::new(0.0, 0.0); grid.n_points()],
        )
        .unwrap();
        assert!(phase(&psi, &cfg).is_err());
    }

    #[test]
    fn residuals_reject_bad_pairs() {
        let (grid, cfg) = setup();
        let psi = init_gaussian(&grid, &cfg, 1.0, 0.0, 0.0).unwrap();
        let f0 = diagnostics(&psi, &cfg, 0.0).unwrap();
        let f1 = diagnostics(&psi, &cfg, 0.0).unwrap();
        assert!(continuity_residual(&f0, &f1).is_err());
        assert!(momentum_residual(&f0, &f1, &Potential::Free, &cfg).is_err());
    }
}
