//! Norm-preserving split-step (Strang) spectral integrator for
//! iħ ∂ψ/∂t = (-ħ²/2m ∂²/∂x² + U) ψ on the periodic grid.
//!
//! One step applies exp(-iV dt/2ħ) · exp(-iT dt/ħ) · exp(-iV dt/2ħ), the
//! kinetic phase acting in wavenumber space. Each factor is a pointwise
//! phase, so the step is exactly unitary and second order in dt.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::Fft;

use crate::config::PhysicsConfig;
use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid, RealField};
use crate::moments;
use crate::potential::Potential;
use crate::spectral::SpectralOps;

/// Complex amplitude on the grid at one time instant.
pub type WaveFunction = ComplexField;

/// Time-ordered solver output: wave-function snapshots plus the total energy
/// evaluated with the same discrete Hamiltonian that advances the state.
#[derive(Clone, Debug)]
pub struct EvolutionResult {
    /// Strictly increasing times starting at t = 0.
    pub snapshots: Vec<(f64, WaveFunction)>,
    /// (time, total energy) at each snapshot.
    pub energy_series: Vec<(f64, f64)>,
}

impl EvolutionResult {
    pub fn final_state(&self) -> &(f64, WaveFunction) {
        self.snapshots.last().expect("evolution has >= 1 snapshot")
    }

    /// Snapshot whose time matches `t` within 1e-9.
    pub fn at_time(&self, t: f64) -> Option<&(f64, WaveFunction)> {
        self.snapshots.iter().find(|(ti, _)| (ti - t).abs() < 1e-9)
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|(t, _)| *t).collect()
    }
}

/// Gaussian packet: |ψ|² has width sigma0, center x0; the phase carries a
/// plane-wave factor exp(i k0 x). The discrete norm is rescaled to 1.
pub fn init_gaussian(
    grid: &Grid,
    cfg: &PhysicsConfig,
    sigma0: f64,
    x0: f64,
    k0: f64,
) -> Result<WaveFunction> {
    cfg.validate()?;
    if !sigma0.is_finite() || sigma0 <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "sigma0 must be > 0 (got {sigma0})"
        )));
    }
    let required = x0.abs() + 5.0 * sigma0;
    let available = 0.5 * grid.length();
    if required >= available {
        return Err(Error::PacketTooWide {
            required,
            available,
        });
    }
    let amp = (2.0 * std::f64::consts::PI * sigma0 * sigma0).powf(-0.25);
    let inv_4s2 = 1.0 / (4.0 * sigma0 * sigma0);
    ComplexField::from_fn(grid, |x| {
        let d = x - x0;
        let r = amp * (-d * d * inv_4s2).exp();
        Complex64::from_polar(r, k0 * x)
    })
    .normalized()
}

/// Ground state of a harmonic potential with frequency `omega`:
/// a stationary Gaussian with sigma0² = ħ/(2 m ω).
pub fn init_harmonic_ground(grid: &Grid, cfg: &PhysicsConfig, omega: f64) -> Result<WaveFunction> {
    if !omega.is_finite() || omega <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "harmonic ground state needs omega > 0 (got {omega})"
        )));
    }
    let sigma0 = (0.5 * cfg.hbar / (cfg.mass * omega)).sqrt();
    init_gaussian(grid, cfg, sigma0, 0.0, 0.0)
}

/// Real positive packet with density ρ ∝ exp(-x²/2σ₀²)(1 + ε sin(w x))²,
/// a smooth asymmetric density for moment checks.
pub fn init_skewed_gaussian(
    grid: &Grid,
    cfg: &PhysicsConfig,
    sigma0: f64,
    epsilon: f64,
    wavenumber: f64,
) -> Result<WaveFunction> {
    cfg.validate()?;
    if !sigma0.is_finite() || sigma0 <= 0.0 {
        return Err(Error::InvalidInput("sigma0 must be > 0".into()));
    }
    if !epsilon.is_finite() || epsilon.abs() >= 1.0 {
        return Err(Error::InvalidInput(
            "skewed packet needs |epsilon| < 1 so the density stays positive".into(),
        ));
    }
    if 5.0 * sigma0 >= 0.5 * grid.length() {
        return Err(Error::PacketTooWide {
            required: 5.0 * sigma0,
            available: 0.5 * grid.length(),
        });
    }
    let inv_4s2 = 1.0 / (4.0 * sigma0 * sigma0);
    ComplexField::from_fn(grid, |x| {
        Complex64::new((-x * x * inv_4s2).exp() * (1.0 + epsilon * (wavenumber * x).sin()), 0.0)
    })
    .normalized()
}

/// Box-normalized plane wave exp(i k x) with k = 2π·mode/L (periodic modes
/// only). Mostly useful as a momentum eigenstate in tests.
pub fn plane_wave(grid: &Grid, mode: i64) -> WaveFunction {
    let k = 2.0 * std::f64::consts::PI * mode as f64 / grid.length();
    let amp = 1.0 / grid.length().sqrt();
    ComplexField::from_fn(grid, |x| Complex64::from_polar(amp, k * x))
}

/// Reusable Strang stepper: phase tables and FFT plans for one (V, dt) pair.
pub struct SplitStepper {
    grid: Grid,
    dt: f64,
    half_v: Vec<Complex64>,
    /// Kinetic phase with the inverse-FFT 1/n normalization folded in.
    kinetic: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl SplitStepper {
    /// `dt` may be negative (time-reversed stepping conjugates every phase);
    /// it must be finite and nonzero.
    pub fn new(potential: &RealField, cfg: &PhysicsConfig, dt: f64) -> Result<Self> {
        cfg.validate()?;
        if !dt.is_finite() || dt == 0.0 {
            return Err(Error::InvalidInput(format!(
                "step size must be finite and nonzero (got {dt})"
            )));
        }
        let grid = potential.grid().clone();
        let ops = SpectralOps::new(&grid);
        let half_v: Vec<Complex64> = potential
            .values()
            .iter()
            .map(|&v| Complex64::from_polar(1.0, -v * dt / (2.0 * cfg.hbar)))
            .collect();
        let n = grid.n_points() as f64;
        let kin_coeff = cfg.hbar * dt / (2.0 * cfg.mass);
        let kinetic: Vec<Complex64> = ops
            .wavenumbers()
            .iter()
            .map(|&k| Complex64::from_polar(1.0 / n, -kin_coeff * k * k))
            .collect();
        let forward = ops.forward_plan().clone();
        let inverse = ops.inverse_plan().clone();
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Ok(Self {
            grid,
            dt,
            half_v,
            kinetic,
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advance ψ by one step in place. `t_after` labels the state for the
    /// non-finite-amplitude diagnostic.
    pub fn step(&mut self, psi: &mut WaveFunction, t_after: f64) -> Result<()> {
        if !psi.grid().same_as(&self.grid) {
            return Err(Error::GridMismatch(
                "wave function and stepper live on different grids".into(),
            ));
        }
        let values = psi.values_mut();
        for (z, h) in values.iter_mut().zip(&self.half_v) {
            *z *= h;
        }
        self.forward
            .process_with_scratch(values, &mut self.scratch);
        for (z, k) in values.iter_mut().zip(&self.kinetic) {
            *z *= k;
        }
        self.inverse
            .process_with_scratch(values, &mut self.scratch);
        for (z, h) in values.iter_mut().zip(&self.half_v) {
            *z *= h;
        }
        if !psi.all_finite() {
            return Err(Error::NumericalAbort {
                time: t_after,
                message: "non-finite amplitude after split step".into(),
            });
        }
        Ok(())
    }
}

/// Single Strang step; builds a throwaway stepper. Use [`SplitStepper`] or
/// [`evolve`] for long runs.
pub fn step_split_fourier(
    psi: &WaveFunction,
    potential: &RealField,
    cfg: &PhysicsConfig,
    dt: f64,
) -> Result<WaveFunction> {
    if !psi.grid().same_as(potential.grid()) {
        return Err(Error::GridMismatch(
            "wave function and potential live on different grids".into(),
        ));
    }
    let mut stepper = SplitStepper::new(potential, cfg, dt)?;
    let mut out = psi.clone();
    stepper.step(&mut out, dt)?;
    Ok(out)
}

/// Evolve `psi0` to `t_final`, keeping a snapshot every `stride` steps plus
/// the final state. When dt does not divide t_final a shorter final step
/// lands exactly on t_final. Step failures carry the failing time.
pub fn evolve(
    psi0: &WaveFunction,
    potential: &Potential,
    cfg: &PhysicsConfig,
    dt: f64,
    t_final: f64,
    stride: usize,
) -> Result<EvolutionResult> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidInput(format!("dt must be > 0 (got {dt})")));
    }
    if !t_final.is_finite() || t_final < 0.0 {
        return Err(Error::InvalidInput(format!(
            "t_final must be >= 0 (got {t_final})"
        )));
    }
    if stride == 0 {
        return Err(Error::InvalidInput("stride must be >= 1".into()));
    }
    let grid = psi0.grid().clone();
    let u_field = potential.evaluate(&grid, cfg)?;
    let ops = SpectralOps::new(&grid);

    let n_steps = (t_final / dt + 1e-9).floor() as usize;
    let rem = t_final - n_steps as f64 * dt;
    let has_partial = rem > 1e-9 * dt;

    let mut psi = psi0.clone();
    let mut snapshots: Vec<(f64, WaveFunction)> = vec![(0.0, psi.clone())];

    if n_steps > 0 {
        let mut stepper = SplitStepper::new(&u_field, cfg, dt)?;
        for i in 1..=n_steps {
            let t_i = i as f64 * dt;
            stepper.step(&mut psi, t_i)?;
            let is_final = i == n_steps && !has_partial;
            if is_final {
                snapshots.push((t_final, psi.clone()));
            } else if i % stride == 0 {
                snapshots.push((t_i, psi.clone()));
            }
        }
    }
    if has_partial {
        let mut tail = SplitStepper::new(&u_field, cfg, rem)?;
        tail.step(&mut psi, t_final)?;
        snapshots.push((t_final, psi.clone()));
    }
    if t_final == 0.0 {
        // single snapshot at t = 0 already stored
    }

    let energy_series = snapshots
        .iter()
        .map(|(t, s)| (*t, moments::psi_form_energy(s, &u_field, cfg, &ops)))
        .collect();

    Ok(EvolutionResult {
        snapshots,
        energy_series,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (Grid, PhysicsConfig) {
        (Grid::new(1024, 40.0).unwrap(), PhysicsConfig::default())
    }

    #[test]
    fn gaussian_density_peak_matches_closed_form() {
        let (grid, cfg) = setup();
        let psi = init_gaussian(&grid, &cfg, 1.0, 0.0, 0.0).unwrap();
        let rho = psi.abs_squared();
        // peak value 1/√(2π) at x = 0 (node n/2)
        let peak = rho.values()[grid.n_points() / 2];
        assert!((peak - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn gaussian_norm_is_one() {
        let (grid, cfg) = setup();
        for (s, x0, k0) in [(1.0, 0.0, 0.0), (0.5, 3.0, 2.0), (2.0, -4.0, -1.5)] {
            let psi = init_gaussian(&grid, &cfg, s, x0, k0).unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn packet_too_wide_is_rejected() {
        let (grid, cfg) = setup();
        match init_gaussian(&grid, &cfg, 4.0, 1.0, 0.0) {
            Err(Error::PacketTooWide { .. }) => {}
            other => panic!("expected PacketTooWide, got {other:?}"),
        }
    }

    #[test]
    fn plane_wave_step_is_pure_phase() {
        let (grid, cfg) = setup();
        let mode = 11;
        let k = 2.0 * std::f64::consts::PI * mode as f64 / grid.length();
        let psi = plane_wave(&grid, mode);
        let u = RealField::zeros(&grid);
        let dt = 1e-2;
        let stepped = step_split_fourier(&psi, &u, &cfg, dt).unwrap();
        let phase = Complex64::from_polar(1.0, -cfg.hbar * k * k * dt / (2.0 * cfg.mass));
        for (a, b) in stepped.values().iter().zip(psi.values()) {
            assert!((a - b * phase).norm() < 1e-12);
        }
    }

    #[test]
    fn step_is_reversible() {
        let (grid, cfg) = setup();
        let psi = init_gaussian(&grid, &cfg, 1.0, 1.0, 0.5).unwrap();
        let u = RealField::zeros(&grid);
        let fwd = step_split_fourier(&psi, &u, &cfg, 1e-2).unwrap();
        let back = step_split_fourier(&fwd, &u, &cfg, -1e-2).unwrap();
        assert!(back.linf_distance(&psi) < 1e-12);
    }

    #[test]
    fn norm_preserved_per_step() {
        let (grid, cfg) = setup();
        let psi = init_gaussian(&grid, &cfg, 1.0, 0.0, 1.0).unwrap();
        let pot = Potential::Harmonic { omega: 1.0 };
        let u = pot.evaluate(&grid, &cfg).unwrap();
        let stepped = step_split_fourier(&psi, &u, &cfg, 1e-3).unwrap();
        assert!((stepped.norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn evolve_zero_time_single_snapshot() {
        let (grid, cfg) = setup();
        let psi = init_gaussian(&grid, &cfg, 1.0, 0.0, 0.0).unwrap();
        let res = evolve(&psi, &Potential::Free, &cfg, 1e-3, 0.0, 10).unwrap();
        assert_eq!(res.snapshots.len(), 1);
        assert_eq!(res.snapshots[0].0, 0.0);
    }

    #[test]
    fn evolve_final_time_exact_with_partial_step() {
        let (grid, cfg) = setup();
        let psi = init_gaussian(&grid, &cfg, 1.0, 0.0, 0.0).unwrap();
        // dt does not divide t_final
        let res = evolve(&psi, &Potential::Free, &cfg, 3e-3, 0.01, 2).unwrap();
        assert_eq!(res.final_state().0, 0.01);
        // dt divides t_final
        let res = evolve(&psi, &Potential::Free, &cfg, 1e-3, 2.0, 100).unwrap();
        assert_eq!(res.final_state().0, 2.0);
        let times = res.times();
        for w in times.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn nan_abort_reports_time() {
        let (grid, cfg) = setup();
        let psi = init_gaussian(&grid, &cfg, 1.0, 0.0, 0.0).unwrap();
        let mut bad = RealField::zeros(&grid);
        bad.values_mut()[3] = f64::INFINITY;
        match evolve(&psi, &Potential::Tabulated(bad), &cfg, 1e-3, 0.01, 1) {
            Err(Error::NumericalAbort { time, .. }) => {
                assert!((time - 1e-3).abs() < 1e-12);
            }
            other => panic!("expected NumericalAbort, got {other:?}"),
        }
    }
}
