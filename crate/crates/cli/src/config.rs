//! Experiment configuration: a single JSON file with an `experiment`
//! discriminator; command-line flags may only override scalar parameters.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    AmplifyVerify,
    GtildeVerify,
    LocalHam,
    TrotterSweep,
    SearchBench,
    LatticeScan,
    McMix,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::AmplifyVerify => "amplify-verify",
            ExperimentKind::GtildeVerify => "gtilde-verify",
            ExperimentKind::LocalHam => "local-ham",
            ExperimentKind::TrotterSweep => "trotter-sweep",
            ExperimentKind::SearchBench => "search-bench",
            ExperimentKind::LatticeScan => "lattice-scan",
            ExperimentKind::McMix => "mc-mix",
        }
    }
}

/// Raw configuration as stored on disk. Unknown top-level keys are
/// rejected; per-experiment parameter structs reject unknown keys too.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path)
            .with_context(|| format!("cannot open config {}", path.display()))?;
        let cfg: ExperimentConfig =
            serde_json::from_reader(BufReader::new(file)).context("malformed config")?;
        Ok(cfg)
    }

    /// Apply `key=value` overrides; only scalar parameters may be
    /// replaced (sweep lists are data, not flags).
    pub fn apply_overrides(&mut self, overrides: &[String]) -> Result<()> {
        for item in overrides {
            let Some((key, raw)) = item.split_once('=') else {
                bail!("override `{item}` is not of the form key=value");
            };
            if let Some(existing) = self.params.get(key) {
                if existing.is_array() || existing.is_object() {
                    bail!("parameter `{key}` is not scalar; edit the config file instead");
                }
            }
            let value: Value = match serde_json::from_str(raw) {
                Ok(v @ (Value::Number(_) | Value::Bool(_) | Value::Null)) => v,
                _ => Value::String(raw.to_string()),
            };
            self.params.insert(key.to_string(), value);
        }
        Ok(())
    }

    /// Deserialize the parameter block into a typed struct, rejecting
    /// unknown keys.
    pub fn typed_params<T: serde::de::DeserializeOwned>(&self) -> Result<T> {
        let value = Value::Object(
            self.params
                .iter()
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        );
        serde_json::from_value(value).with_context(|| {
            format!("invalid parameters for experiment {}", self.experiment.name())
        })
    }
}

fn default_degree() -> usize {
    8
}

fn default_lambda_max() -> f64 {
    0.75
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplifyVerifyParams {
    #[serde(default = "AmplifyVerifyParams::default_instances")]
    pub instances: usize,
    #[serde(default = "AmplifyVerifyParams::default_max_dim")]
    pub max_dim: usize,
    #[serde(default = "AmplifyVerifyParams::default_max_terms")]
    pub max_terms: usize,
}

impl AmplifyVerifyParams {
    fn default_instances() -> usize {
        50
    }
    fn default_max_dim() -> usize {
        64
    }
    fn default_max_terms() -> usize {
        8
    }
}

pub type GtildeVerifyParams = AmplifyVerifyParams;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalHamParams {
    #[serde(default = "LocalHamParams::default_dim")]
    pub dim: usize,
    #[serde(default = "LocalHamParams::default_terms")]
    pub terms: usize,
    #[serde(default = "LocalHamParams::default_d_exponent")]
    pub d_exponent: f64,
}

impl LocalHamParams {
    fn default_dim() -> usize {
        2
    }
    fn default_terms() -> usize {
        6
    }
    fn default_d_exponent() -> f64 {
        2.0
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrotterSweepParams {
    #[serde(default = "TrotterSweepParams::default_t_values")]
    pub t_values: Vec<f64>,
    #[serde(default = "TrotterSweepParams::default_orders")]
    pub orders: Vec<u32>,
    #[serde(default = "TrotterSweepParams::default_steps")]
    pub steps: Vec<usize>,
    /// When set, also sweep for the minimal step count reaching this
    /// accuracy and report measured calls.
    #[serde(default)]
    pub eps: Option<f64>,
}

impl TrotterSweepParams {
    fn default_t_values() -> Vec<f64> {
        vec![1.0, 2.0, 4.0]
    }
    fn default_orders() -> Vec<u32> {
        vec![1, 2]
    }
    fn default_steps() -> Vec<usize> {
        vec![8, 16, 32, 64]
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchBenchParams {
    #[serde(default = "SearchBenchParams::default_m_values")]
    pub m_values: Vec<usize>,
    #[serde(default = "default_degree")]
    pub degree: usize,
    #[serde(default = "default_lambda_max")]
    pub lambda_max: f64,
    #[serde(default = "SearchBenchParams::default_trials")]
    pub trials: u64,
    /// Also amplify each instance and record the end-to-end gap. The
    /// largest sizes take tens of seconds of dense diagonalization.
    #[serde(default = "SearchBenchParams::default_amplify")]
    pub amplify: bool,
}

impl SearchBenchParams {
    fn default_m_values() -> Vec<usize> {
        vec![8, 16, 32, 64]
    }
    fn default_trials() -> u64 {
        10_000
    }
    fn default_amplify() -> bool {
        true
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeScanParams {
    #[serde(default = "LatticeScanParams::default_sides")]
    pub sides: Vec<usize>,
    #[serde(default = "LatticeScanParams::default_dims")]
    pub dims: usize,
    #[serde(default = "LatticeScanParams::default_c_max")]
    pub c_max: f64,
    #[serde(default = "LatticeScanParams::default_grid")]
    pub grid: usize,
    #[serde(default = "LatticeScanParams::default_tol")]
    pub tol: f64,
}

impl LatticeScanParams {
    fn default_sides() -> Vec<usize> {
        vec![2, 3]
    }
    fn default_dims() -> usize {
        5
    }
    fn default_c_max() -> f64 {
        0.5
    }
    fn default_grid() -> usize {
        24
    }
    fn default_tol() -> f64 {
        1e-3
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McMixParams {
    #[serde(default = "McMixParams::default_m_values")]
    pub m_values: Vec<usize>,
    #[serde(default = "default_degree")]
    pub degree: usize,
    #[serde(default = "default_lambda_max")]
    pub lambda_max: f64,
    #[serde(default = "McMixParams::default_chains")]
    pub chains: usize,
    #[serde(default = "McMixParams::default_max_steps")]
    pub max_steps: u64,
    #[serde(default = "McMixParams::default_stoquastic_draws")]
    pub stoquastic_draws: usize,
    #[serde(default = "McMixParams::default_stoquastic_sizes")]
    pub stoquastic_sizes: Vec<usize>,
}

impl McMixParams {
    fn default_m_values() -> Vec<usize> {
        vec![16, 32, 64, 128, 256]
    }
    fn default_chains() -> usize {
        15
    }
    fn default_max_steps() -> u64 {
        30_000_000
    }
    fn default_stoquastic_draws() -> usize {
        20
    }
    fn default_stoquastic_sizes() -> Vec<usize> {
        vec![16, 64, 256]
    }
}
