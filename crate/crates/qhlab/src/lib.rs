//! # qhlab — a 1D quantum hydrodynamics laboratory
//!
//! Evolves the Schrödinger equation on a periodic grid with a split-step
//! spectral integrator, extracts the hydrodynamic diagnostic fields of the
//! polar decomposition ψ = √ρ e^{iS/ħ} (drift and osmotic velocities, the
//! Bohm potential, the gas/vacuum pressure split, the local mean stochastic
//! force), verifies the moment identities and energy partitions against a
//! closed-form spreading Gaussian, and propagates particle ensembles under
//! candidate stochastic laws to test which ensemble-mean properties each
//! law reproduces.
//!
//! Start with the runnable examples (`cargo run --release -p qhlab
//! --example <name>`):
//!
//! - `evolve_gaussian` — wave-packet spreading against the closed form
//! - `madelung_fields` — the full diagnostic field set and its identities
//! - `moment_ladder` — the force-moment ladder on three test densities
//! - `gaussian_oracle` — the closed-form solution and its self-consistency
//! - `heisenberg_bound` — the time-averaged uncertainty-like product
//! - `ensemble_laws` — candidate-law reports side by side
//! - `harmonic_stationary` — stationarity and dt-convergence quality gates
//!
//! The same functionality is scriptable through the `qhlab` binary
//! (`evolve | verify | ensemble | gaussian`, see the README).

pub mod cli;
pub mod config;
pub mod ensemble;
pub mod error;
pub mod export;
pub mod gaussian;
pub mod grid;
pub mod madelung;
pub mod moments;
pub mod potential;
pub mod rng;
pub mod schrodinger;
pub mod spectral;
pub mod tolerances;

pub use config::{PhysicsConfig, RunConfig};
pub use ensemble::{CandidateLaw, EnsembleState, LawReport};
pub use error::{Error, Result};
pub use gaussian::GaussianParams;
pub use grid::{ComplexField, Grid, RealField};
pub use madelung::MadelungFields;
pub use moments::{EnergyReport, MomentReport};
pub use potential::Potential;
pub use schrodinger::{evolve, EvolutionResult, WaveFunction};
