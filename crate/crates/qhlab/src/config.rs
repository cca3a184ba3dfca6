//! Run configuration: physical constants plus the JSON config-file format
//! consumed by the CLI and the examples.
//!
//! A config file is a single JSON object:
//!
//! ```json
//! {
//!   "grid":          { "n_points": 1024, "length": 40.0 },
//!   "physics":       { "hbar": 1.0, "mass": 1.0 },
//!   "potential":     { "kind": "free" },
//!   "initial_state": { "kind": "gaussian", "sigma0": 1.0, "x0": 0.0, "k0": 0.0 },
//!   "evolution":     { "dt": 1e-3, "t_final": 2.0, "snapshot_stride": 10 },
//!   "ensemble":      { "n_particles": 100000, "seed": 42 }
//! }
//! ```
//!
//! `potential.kind` is one of `free`, `harmonic` (with `omega`), or
//! `tabulated` (with `values`, one per grid node). `initial_state.kind` is
//! `gaussian`, `harmonic_ground`, or `skewed_gaussian`. Everything under
//! `ensemble` has defaults; see [`EnsembleConfig`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, RealField};
use crate::potential::Potential;

/// Physical constants ħ and m; natural units (both 1) by default.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicsConfig {
    pub hbar: f64,
    pub mass: f64,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
        }
    }
}

impl PhysicsConfig {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        let cfg = Self { hbar, mass };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.hbar.is_finite() || self.hbar <= 0.0 {
            return Err(Error::config("physics.hbar", "hbar must be > 0"));
        }
        if !self.mass.is_finite() || self.mass <= 0.0 {
            return Err(Error::config("physics.mass", "mass must be > 0"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n_points: usize,
    pub length: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialConfig {
    Free,
    Harmonic { omega: f64 },
    Tabulated { values: Vec<f64> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialStateConfig {
    /// √ρ Gaussian of width sigma0 centered at x0 with carrier wavenumber k0.
    Gaussian {
        sigma0: f64,
        #[serde(default)]
        x0: f64,
        #[serde(default)]
        k0: f64,
    },
    /// Ground state of the configured harmonic potential.
    HarmonicGround,
    /// ρ ∝ exp(-x²/2σ₀²)(1 + ε sin(w x))², a smooth asymmetric test density.
    SkewedGaussian {
        sigma0: f64,
        epsilon: f64,
        wavenumber: f64,
    },
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub t_final: f64,
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
}

fn default_stride() -> usize {
    10
}

/// Ensemble-run knobs; every field has a default so presets can omit the
/// whole section.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleConfig {
    pub n_particles: usize,
    pub seed: u64,
    /// Particle time step; defaults to the solver dt.
    pub dt: Option<f64>,
    /// Ensemble horizon; defaults to the full evolution window.
    pub t_final: Option<f64>,
    /// Windowed-velocity sample time; defaults to half the run.
    pub checkpoint_time: Option<f64>,
    /// Velocity windows in units of the particle dt (a decade scan).
    pub window_scan_steps: Vec<usize>,
    /// KDE bandwidth; None selects Silverman's rule 1.06 σ̂ N^{-1/5}.
    pub kde_bandwidth: Option<f64>,
    /// Histogram bins for local means over the domain.
    pub n_bins: usize,
    /// Bins with fewer samples are flagged empty.
    pub min_bin_count: usize,
    /// Compare KDE density against the solver every this many snapshots.
    pub l1_check_stride: usize,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            n_particles: 100_000,
            seed: 42,
            dt: None,
            t_final: None,
            checkpoint_time: None,
            window_scan_steps: vec![10, 20, 50, 100],
            kde_bandwidth: None,
            n_bins: 128,
            min_bin_count: 100,
            l1_check_stride: 10,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    #[serde(default)]
    pub physics: PhysicsConfig,
    pub potential: PotentialConfig,
    pub initial_state: InitialStateConfig,
    pub evolution: EvolutionConfig,
    #[serde(default)]
    pub ensemble: EnsembleConfig,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)
            .map_err(|e| Error::config("<config>", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| {
            Error::config(
                "<config>",
                format!("cannot read {}: {e}", path.as_ref().display()),
            )
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.n_points < 8 || !self.grid.n_points.is_power_of_two() {
            return Err(Error::config(
                "grid.n_points",
                format!(
                    "n_points not a power of two >= 8 (got {})",
                    self.grid.n_points
                ),
            ));
        }
        if !self.grid.length.is_finite() || self.grid.length <= 0.0 {
            return Err(Error::config("grid.length", "length must be > 0"));
        }
        self.physics.validate()?;
        match &self.potential {
            PotentialConfig::Free => {}
            PotentialConfig::Harmonic { omega } => {
                if !omega.is_finite() || *omega < 0.0 {
                    return Err(Error::config("potential.omega", "omega must be >= 0"));
                }
            }
            PotentialConfig::Tabulated { values } => {
                if values.len() != self.grid.n_points {
                    return Err(Error::config(
                        "potential.values",
                        format!(
                            "tabulated potential has {} values for a {}-point grid",
                            values.len(),
                            self.grid.n_points
                        ),
                    ));
                }
            }
        }
        let half = 0.5 * self.grid.length;
        match &self.initial_state {
            InitialStateConfig::Gaussian { sigma0, x0, .. } => {
                if !sigma0.is_finite() || *sigma0 <= 0.0 {
                    return Err(Error::config("initial_state.sigma0", "sigma0 must be > 0"));
                }
                if x0.abs() + 5.0 * sigma0 >= half {
                    return Err(Error::config(
                        "initial_state",
                        format!(
                            "packet does not fit: |x0| + 5 sigma0 = {} >= L/2 = {half}",
                            x0.abs() + 5.0 * sigma0
                        ),
                    ));
                }
            }
            InitialStateConfig::HarmonicGround => match &self.potential {
                PotentialConfig::Harmonic { omega } if *omega > 0.0 => {
                    let sigma = (0.5 * self.physics.hbar / (self.physics.mass * omega)).sqrt();
                    if 5.0 * sigma >= half {
                        return Err(Error::config(
                            "initial_state",
                            "harmonic ground state does not fit the domain",
                        ));
                    }
                }
                _ => {
                    return Err(Error::config(
                        "initial_state",
                        "harmonic_ground requires a harmonic potential with omega > 0",
                    ));
                }
            },
            InitialStateConfig::SkewedGaussian {
                sigma0, epsilon, ..
            } => {
                if !sigma0.is_finite() || *sigma0 <= 0.0 {
                    return Err(Error::config("initial_state.sigma0", "sigma0 must be > 0"));
                }
                if !epsilon.is_finite() || epsilon.abs() >= 1.0 {
                    return Err(Error::config(
                        "initial_state.epsilon",
                        "epsilon must satisfy |epsilon| < 1 so the density stays positive",
                    ));
                }
                if 5.0 * sigma0 >= half {
                    return Err(Error::config(
                        "initial_state",
                        "packet does not fit: 5 sigma0 >= L/2",
                    ));
                }
            }
        }
        if !self.evolution.dt.is_finite() || self.evolution.dt <= 0.0 {
            return Err(Error::config("evolution.dt", "dt must be > 0"));
        }
        if !self.evolution.t_final.is_finite() || self.evolution.t_final < 0.0 {
            return Err(Error::config("evolution.t_final", "t_final must be >= 0"));
        }
        if self.evolution.snapshot_stride == 0 {
            return Err(Error::config(
                "evolution.snapshot_stride",
                "snapshot_stride must be >= 1",
            ));
        }
        if self.ensemble.n_particles == 0 {
            return Err(Error::config(
                "ensemble.n_particles",
                "n_particles must be >= 1",
            ));
        }
        if let Some(dt) = self.ensemble.dt {
            if !dt.is_finite() || dt <= 0.0 {
                return Err(Error::config("ensemble.dt", "dt must be > 0"));
            }
        }
        if let Some(tf) = self.ensemble.t_final {
            if !tf.is_finite() || tf <= 0.0 {
                return Err(Error::config("ensemble.t_final", "t_final must be > 0"));
            }
        }
        if self.ensemble.n_bins < 2 {
            return Err(Error::config("ensemble.n_bins", "n_bins must be >= 2"));
        }
        if self.ensemble.window_scan_steps.is_empty()
            || self.ensemble.window_scan_steps.iter().any(|&w| w == 0)
        {
            return Err(Error::config(
                "ensemble.window_scan_steps",
                "window scan must be a nonempty list of positive step counts",
            ));
        }
        if let Some(h) = self.ensemble.kde_bandwidth {
            if !h.is_finite() || h <= 0.0 {
                return Err(Error::config("ensemble.kde_bandwidth", "bandwidth must be > 0"));
            }
        }
        Ok(())
    }

    pub fn build_grid(&self) -> Result<Grid> {
        Grid::new(self.grid.n_points, self.grid.length)
    }

    pub fn build_potential(&self, grid: &Grid) -> Result<Potential> {
        match &self.potential {
            PotentialConfig::Free => Ok(Potential::Free),
            PotentialConfig::Harmonic { omega } => Ok(Potential::Harmonic { omega: *omega }),
            PotentialConfig::Tabulated { values } => Ok(Potential::Tabulated(
                RealField::from_values(grid, values.clone())?,
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "grid": { "n_points": 256, "length": 40.0 },
        "potential": { "kind": "free" },
        "initial_state": { "kind": "gaussian", "sigma0": 1.0 },
        "evolution": { "dt": 1e-3, "t_final": 0.5 }
    }"#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = RunConfig::from_json(MINIMAL).unwrap();
        assert_eq!(cfg.physics, PhysicsConfig::default());
        assert_eq!(cfg.ensemble.n_particles, 100_000);
        assert_eq!(cfg.evolution.snapshot_stride, 10);
    }

    #[test]
    fn bad_n_points_names_the_field() {
        let text = MINIMAL.replace("256", "1000");
        match RunConfig::from_json(&text) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "grid.n_points"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn packet_fit_enforced() {
        let text = MINIMAL.replace("\"sigma0\": 1.0", "\"sigma0\": 5.0");
        assert!(RunConfig::from_json(&text).is_err());
    }

    #[test]
    fn harmonic_ground_needs_harmonic_potential() {
        let text = MINIMAL.replace(
            r#"{ "kind": "gaussian", "sigma0": 1.0 }"#,
            r#"{ "kind": "harmonic_ground" }"#,
        );
        assert!(RunConfig::from_json(&text).is_err());
    }

    #[test]
    fn malformed_json_is_a_config_error() {
        match RunConfig::from_json("{ not json") {
            Err(Error::Config { .. }) => {}
            other => panic!("expected config error, got {other:?}"),
        }
    }
}
