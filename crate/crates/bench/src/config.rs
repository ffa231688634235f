//! Experiment configuration documents.

use std::path::{Path, PathBuf};

use bass_core::estimators::EstimatorParams;
use bass_core::{Family, FamilyParams, Mode, SimConfig, TruncationRule};
use serde::{Deserialize, Serialize};

/// One simulator variant run on every circuit instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Arm {
    pub name: String,
    pub mode: Mode,
    #[serde(default)]
    pub truncation: TruncationRule,
}

impl Arm {
    pub fn new(name: &str, mode: Mode, truncation: TruncationRule) -> Self {
        Self {
            name: name.to_owned(),
            mode,
            truncation,
        }
    }
}

fn default_arms() -> Vec<Arm> {
    vec![
        Arm::new("fixed", Mode::Fixed, TruncationRule::TopK),
        Arm::new("adaptive", Mode::Adaptive, TruncationRule::TopK),
    ]
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeedPolicy {
    pub base_seed: u64,
    /// Trial `t` uses index `trial_offset + t` in seed derivation.
    pub trial_offset: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StatsOptions {
    pub bootstrap_resamples: usize,
    pub confidence_level: f64,
    pub estimator: EstimatorParams,
}

impl Default for StatsOptions {
    fn default() -> Self {
        Self {
            bootstrap_resamples: 1000,
            confidence_level: 0.95,
            estimator: EstimatorParams::FITTED,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment_id: String,
    pub family: Family,
    #[serde(default)]
    pub family_params: FamilyParams,
    pub n_qubits: Vec<usize>,
    pub k: Vec<usize>,
    /// Paired variants; the first is the baseline of every ratio.
    #[serde(default = "default_arms")]
    pub arms: Vec<Arm>,
    pub trials: usize,
    #[serde(default)]
    pub seeds: SeedPolicy,
    /// `k`, `mode`, `truncation` and `seed` are overwritten per run.
    #[serde(default)]
    pub sim: SimConfig,
    #[serde(default)]
    pub stats: StatsOptions,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if self.experiment_id.is_empty()
            || !self
                .experiment_id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return invalid(format!("experiment_id {:?} must be non-empty [A-Za-z0-9_-]", self.experiment_id));
        }
        if self.n_qubits.is_empty() || self.k.is_empty() || self.arms.is_empty() {
            return invalid("n_qubits, k and arms must be non-empty".into());
        }
        if self.trials == 0 {
            return invalid("trials must be positive".into());
        }
        for (i, arm) in self.arms.iter().enumerate() {
            if arm.name.is_empty() || self.arms[..i].iter().any(|a| a.name == arm.name) {
                return invalid(format!("arm name {:?} is empty or repeated", arm.name));
            }
        }
        for &n in &self.n_qubits {
            let probe = bass_core::generate_circuit(self.family, n, &self.family_params, 0);
            if let Err(e) = probe {
                return invalid(format!("{} at N = {n}: {e}", self.family));
            }
        }
        for &k in &self.k {
            let sim = SimConfig { k, ..self.sim.clone() };
            sim.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        if !(self.stats.confidence_level > 0.0 && self.stats.confidence_level < 1.0) || self.stats.bootstrap_resamples == 0
        {
            return invalid("confidence_level must lie in (0, 1) and bootstrap_resamples must be positive".into());
        }
        self.stats
            .estimator
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn baseline(&self) -> &Arm {
        &self.arms[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "experiment_id": "bw_small",
        "family": "Brickwork1D",
        "n_qubits": [6, 8],
        "k": [16],
        "trials": 3
    }"#;

    #[test]
    fn minimal_document_gets_defaults() {
        let c = ExperimentConfig::from_json(MINIMAL).unwrap();
        assert_eq!(c.arms, default_arms());
        assert_eq!(c.seeds, SeedPolicy::default());
        assert_eq!(c.stats.bootstrap_resamples, 1000);
        assert_eq!(c.baseline().mode, Mode::Fixed);
    }

    #[test]
    fn round_trip() {
        let mut c = ExperimentConfig::from_json(MINIMAL).unwrap();
        c.sim.two_qubit_pass = true;
        c.arms.push(Arm::new("schmidt1", Mode::Fixed, TruncationRule::Schmidt1));
        let back = ExperimentConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_bad_documents() {
        let cases = [
            MINIMAL.replace("\"trials\": 3", "\"trials\": 0"),
            MINIMAL.replace("[16]", "[0]"),
            MINIMAL.replace("[6, 8]", "[0]"),
            MINIMAL.replace("[6, 8]", "[31]"),
            MINIMAL.replace("bw_small", "bad id"),
            MINIMAL.replace("Brickwork1D", "mps"),
            MINIMAL.replace("\"trials\": 3", "\"trials\": 3, \"unknown\": 1"),
            "[]".to_owned(),
        ];
        for text in cases {
            assert!(ExperimentConfig::from_json(&text).is_err(), "{text}");
        }
    }
}
