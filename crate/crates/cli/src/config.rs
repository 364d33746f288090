//! Run configs. Every table rejects unknown keys; `seed` and `out` may be
//! overridden from the command line.

use crate::run::UsageError;
use anyhow::Result;
use circlab_core::dense::{Entangler, TrotterOrder};
use circlab_core::monitored::Boundary;
use circlab_core::scaling::CollapseOptions;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| UsageError::new(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| UsageError::new(format!("{}: {e}", path.display())))
}

fn one() -> usize {
    1
}
fn two() -> usize {
    2
}
fn four() -> usize {
    4
}
fn yes() -> bool {
    true
}
fn half() -> f64 {
    0.5
}
fn twenty() -> usize {
    20
}
fn periodic() -> Boundary {
    Boundary::Periodic
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanObservables {
    #[serde(default = "yes")]
    pub s_half: bool,
    #[serde(default = "yes")]
    pub i3: bool,
    #[serde(default)]
    pub i2: bool,
}

impl Default for ScanObservables {
    fn default() -> Self {
        Self { s_half: true, i3: true, i2: false }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub l: Vec<usize>,
    pub p: Vec<f64>,
    pub trajectories: usize,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    /// `T = steps_per_site · L`.
    #[serde(default = "four")]
    pub steps_per_site: usize,
    #[serde(default = "one")]
    pub record_every: usize,
    /// Record only the last `L` steps.
    #[serde(default)]
    pub steady_state: bool,
    #[serde(default = "periodic")]
    pub boundary: Boundary,
    #[serde(default)]
    pub observables: ScanObservables,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollapseConfig {
    pub inputs: Vec<PathBuf>,
    pub observable: String,
    pub bootstrap: usize,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub options: CollapseOptions,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PurifyConfig {
    pub l: Vec<usize>,
    pub p: Vec<f64>,
    pub trajectories: usize,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    #[serde(default = "four")]
    pub steps_per_site: usize,
    #[serde(default = "half")]
    pub threshold_bits: f64,
    #[serde(default = "periodic")]
    pub boundary: Boundary,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeFileConfig {
    pub l: Vec<usize>,
    pub p: Vec<f64>,
    pub trajectories: usize,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    /// Scrambling steps before attaching, per site.
    #[serde(default = "two")]
    pub t0_per_site: usize,
    /// Steps after attaching, per site.
    #[serde(default = "two")]
    pub t1_per_site: usize,
    /// Probes at the ends of an open chain.
    #[serde(default)]
    pub surface: bool,
    /// Critical point for the exponent fit; no fit if absent.
    pub p_c: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HydroConfig {
    pub l: usize,
    #[serde(default = "half")]
    pub dt: f64,
    #[serde(default)]
    pub order: TrotterOrder,
    pub t_max: f64,
    /// Recording interval; a multiple of `dt`. Defaults to `dt`.
    pub t_step: Option<f64>,
    pub realizations: usize,
    #[serde(default = "twenty")]
    pub depth: usize,
    #[serde(default)]
    pub source: usize,
    /// Compute the exact trace alongside.
    #[serde(default)]
    pub exact: bool,
    /// CSV `t,value` of the exact autocorrelation at `source`.
    pub reference: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub l: usize,
    #[serde(default = "twenty")]
    pub depth: usize,
    #[serde(default)]
    pub entangler: Entangler,
    pub realizations: usize,
    /// Bitstrings drawn per realization.
    pub samples: usize,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}
