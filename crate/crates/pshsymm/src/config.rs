//! Run configuration: one seed, window and budget knobs, output selection.
//!
//! Every report embeds the effective configuration, and identical
//! configurations produce byte-identical outputs.

use std::collections::BTreeSet;
use std::path::PathBuf;

use serde::Serialize;

use crate::volume::VolumeConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Single 64-bit seed; all Monte Carlo streams derive from it.
    pub seed: u64,
    /// Depth of the symmetrization grid (`t` runs from ~0 down to here).
    pub t_floor: f64,
    /// Window floor for the volume route to the integrability index.
    pub vol_fit_depth: f64,
    pub mc_samples: usize,
    pub mc_shells: usize,
    pub quad_rel_tol: f64,
    pub quad_node_budget: usize,
    /// Points per slope-regression window.
    pub slope_points: usize,
    /// Absolute floor of every PASS tolerance on slopes.
    pub pass_tol_abs: f64,
    pub out_dir: PathBuf,
    pub formats: BTreeSet<OutputFormat>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let mut formats = BTreeSet::new();
        formats.insert(OutputFormat::Json);
        formats.insert(OutputFormat::Csv);
        formats.insert(OutputFormat::Svg);
        RunConfig {
            seed: 42,
            t_floor: -80.0,
            vol_fit_depth: -60.0,
            mc_samples: 1_000_000,
            mc_shells: 32,
            quad_rel_tol: 1e-6,
            quad_node_budget: 400_000,
            slope_points: 48,
            pass_tol_abs: 0.05,
            out_dir: PathBuf::from("out"),
            formats,
        }
    }
}

impl RunConfig {
    pub fn volume(&self) -> VolumeConfig {
        VolumeConfig {
            quad_rel_tol: self.quad_rel_tol,
            quad_node_budget: self.quad_node_budget,
            mc_samples: self.mc_samples,
            mc_shells: self.mc_shells,
            seed: self.seed,
        }
    }

    /// Reduced budgets for unit tests.
    pub fn fast() -> Self {
        RunConfig {
            mc_samples: 200_000,
            ..Default::default()
        }
    }

    /// The echo embedded in every report.
    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            seed: self.seed,
            t_floor: self.t_floor,
            vol_fit_depth: self.vol_fit_depth,
            mc_samples: self.mc_samples,
            mc_shells: self.mc_shells,
            quad_rel_tol: self.quad_rel_tol,
            quad_node_budget: self.quad_node_budget,
            slope_points: self.slope_points,
            pass_tol_abs: self.pass_tol_abs,
        }
    }
}

/// Serialized copy of the numeric configuration.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub seed: u64,
    pub t_floor: f64,
    pub vol_fit_depth: f64,
    pub mc_samples: usize,
    pub mc_shells: usize,
    pub quad_rel_tol: f64,
    pub quad_node_budget: usize,
    pub slope_points: usize,
    pub pass_tol_abs: f64,
}
