//! File artifacts: CSV field dumps, JSON reports, and the run manifest.
//!
//! Numbers are written with Rust's shortest-roundtrip float formatting, so
//! files are bit-identical across reruns of the same configuration and can
//! be diffed directly. The manifest lists every emitted file with its sha256.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::ensemble::LawReport;
use crate::error::Result;
use crate::madelung::MadelungFields;
use crate::moments::MomentReport;
use crate::schrodinger::EvolutionResult;

/// Wave-function snapshots as rows (t, x, Re ψ, Im ψ).
pub fn write_snapshots_csv(path: &Path, evolution: &EvolutionResult) -> Result<()> {
    let mut out = String::from("t,x,re_psi,im_psi\n");
    for (t, psi) in &evolution.snapshots {
        for (x, z) in psi.grid().nodes().iter().zip(psi.values()) {
            out.push_str(&format!("{t},{x},{},{}\n", z.re, z.im));
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Diagnostic fields as rows (t, x, rho, u, v, q, p, p_g, p_v, f_bar, mask).
pub fn write_fields_csv(path: &Path, fields: &[MadelungFields]) -> Result<()> {
    let mut out = String::from("t,x,rho,u,v,q,p,p_g,p_v,f_bar,mask\n");
    for f in fields {
        let grid = f.rho.grid();
        for (j, &x) in grid.nodes().iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                f.time,
                x,
                f.rho.values()[j],
                f.u.values()[j],
                f.v.values()[j],
                f.bohm_q.values()[j],
                f.p_total.values()[j],
                f.p_gas.values()[j],
                f.p_vacuum.values()[j],
                f.force_local.values()[j],
                u8::from(f.mask[j]),
            ));
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Energy series as rows (t, e_total).
pub fn write_energy_csv(path: &Path, evolution: &EvolutionResult) -> Result<()> {
    let mut out = String::from("t,e_total\n");
    for (t, e) in &evolution.energy_series {
        out.push_str(&format!("{t},{e}\n"));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Ladder table as rows (k, x_moment, force_moment_k_plus_3, residual).
pub fn write_ladder_csv(path: &Path, report: &MomentReport) -> Result<()> {
    let mut out = String::from("k,x_moment,force_moment_k_plus_3,residual\n");
    for (k, res) in report.ladder_residuals.iter().enumerate() {
        out.push_str(&format!(
            "{k},{},{},{res}\n",
            report.x_moments[k],
            report.force_moments[k + 3],
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Law-report time series as rows (t, l1_density_error).
pub fn write_law_series_csv(path: &Path, report: &LawReport) -> Result<()> {
    let mut out = String::from("t,l1_density_error\n");
    for (t, l1) in &report.l1_series {
        out.push_str(&format!("{t},{l1}\n"));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Windowed-velocity panels as rows
/// (window, bin_center, count, mean_forward, var_forward, mean_centered,
///  var_centered, u_ref, u_fwd_ref, u_minus_v_fwd_ref, v_sq_ref).
pub fn write_velocity_panels_csv(path: &Path, report: &LawReport) -> Result<()> {
    let mut out = String::from(
        "window,bin_center,count,mean_forward,var_forward,mean_centered,var_centered,u_ref,u_fwd_ref,u_minus_v_fwd_ref,v_sq_ref\n",
    );
    for panel in &report.velocity_panels {
        for r in &panel.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                panel.window,
                r.bin_center,
                r.count,
                r.mean_forward,
                r.var_forward,
                r.mean_centered,
                r.var_centered,
                r.u_ref,
                r.u_fwd_ref,
                r.u_minus_v_fwd_ref,
                r.v_sq_ref,
            ));
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Subsampled trajectories as rows (t, particle, x).
pub fn write_trajectories_csv(path: &Path, report: &LawReport) -> Result<()> {
    let mut out = String::from("t,particle,x\n");
    for (t, positions) in report
        .trajectory_times
        .iter()
        .zip(&report.trajectory_positions)
    {
        for (p, x) in positions.iter().enumerate() {
            out.push_str(&format!("{t},{p},{x}\n"));
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Pretty-printed JSON artifact.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn sha256_hex(path: &Path) -> Result<String> {
    let bytes = fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}

/// Collects emitted files and per-phase timings, then writes manifest.json.
/// File hashes are stable across reruns with identical configuration;
/// timings are informational and excluded from that contract.
pub struct ManifestBuilder {
    out_dir: PathBuf,
    config: serde_json::Value,
    files: Vec<(String, String)>,
    timings: BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a serde_json::Value,
    files: Vec<ManifestFile<'a>>,
    timings_secs: &'a BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct ManifestFile<'a> {
    path: &'a str,
    sha256: &'a str,
}

impl ManifestBuilder {
    pub fn new(out_dir: &Path, config: serde_json::Value) -> Self {
        Self {
            out_dir: out_dir.to_path_buf(),
            config,
            files: Vec::new(),
            timings: BTreeMap::new(),
        }
    }

    /// Register an already-written file (path relative to the out dir).
    pub fn add_file(&mut self, name: &str) -> Result<()> {
        let hash = sha256_hex(&self.out_dir.join(name))?;
        self.files.push((name.to_string(), hash));
        Ok(())
    }

    pub fn add_timing(&mut self, phase: &str, secs: f64) {
        self.timings.insert(phase.to_string(), secs);
    }

    pub fn write(mut self) -> Result<PathBuf> {
        self.files.sort();
        let manifest = Manifest {
            tool: "qhlab",
            version: env!("CARGO_PKG_VERSION"),
            config: &self.config,
            files: self
                .files
                .iter()
                .map(|(p, h)| ManifestFile {
                    path: p,
                    sha256: h,
                })
                .collect(),
            timings_secs: &self.timings,
        };
        let path = self.out_dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        let mut f = fs::File::create(&path)?;
        f.write_all(text.as_bytes())?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_roundtrips() {
        // shortest-roundtrip display must reparse to the same bits
        for &v in &[0.1, 1.0 / 3.0, 2.0_f64.sqrt(), 1e-300, -0.0, 6.02e23] {
            let s = format!("{v}");
            let back: f64 = s.parse().unwrap();
            assert_eq!(v.to_bits(), back.to_bits());
        }
    }
}
