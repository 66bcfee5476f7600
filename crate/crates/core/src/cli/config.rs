use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::bench::CaseId;
use crate::net::ActivationKind;
use crate::optim::{AdamConfig, LbfgsConfig};
use crate::sampling::{SamplerKind, DEFAULT_KOROBOV_GENERATOR};

/// Everything a run needs. Seeded samplers and network initialization both
/// draw from `seed`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case: CaseId,
    pub sampler: SamplerKind,
    pub n_interior: usize,
    pub n_per_face: usize,
    pub hidden_widths: Vec<usize>,
    pub activation: ActivationKind,
    pub adam: AdamConfig,
    pub lbfgs: LbfgsConfig,
    pub eval_grid: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            case: CaseId::Case1Exponential,
            sampler: SamplerKind::LatinHypercube { seed: 0 },
            n_interior: 3000,
            n_per_face: 300,
            hidden_widths: vec![30, 30],
            activation: ActivationKind::Arctan,
            adam: AdamConfig::default(),
            lbfgs: LbfgsConfig::default(),
            eval_grid: 21,
            seed: 0,
            output_dir: PathBuf::from("dcm-run"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("config key `{key}`: {message}")]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    fn new(key: &str, message: impl Into<String>) -> Self {
        ConfigError {
            key: key.to_string(),
            message: message.into(),
        }
    }
}

/// On-disk form of [`RunConfig`]. Enumerations are plain names so that the
/// document reads naturally and parse errors can name the key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigDocument {
    pub case: String,
    pub sampler: String,
    pub korobov_generator: u64,
    pub n_interior: usize,
    pub n_per_face: usize,
    pub hidden_widths: Vec<usize>,
    pub activation: String,
    pub swish_beta: f64,
    pub eval_grid: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub adam: AdamConfig,
    pub lbfgs: LbfgsConfig,
}

impl Default for ConfigDocument {
    fn default() -> Self {
        ConfigDocument::from(&RunConfig::default())
    }
}

impl From<&RunConfig> for ConfigDocument {
    fn from(cfg: &RunConfig) -> Self {
        let korobov_generator = match cfg.sampler {
            SamplerKind::KorobovLattice { generator } => generator,
            _ => DEFAULT_KOROBOV_GENERATOR,
        };
        let swish_beta = match cfg.activation {
            ActivationKind::Swish { beta } => beta,
            _ => 1.0,
        };
        ConfigDocument {
            case: cfg.case.name().to_string(),
            sampler: cfg.sampler.name().to_string(),
            korobov_generator,
            n_interior: cfg.n_interior,
            n_per_face: cfg.n_per_face,
            hidden_widths: cfg.hidden_widths.clone(),
            activation: cfg.activation.name().to_string(),
            swish_beta,
            eval_grid: cfg.eval_grid,
            seed: cfg.seed,
            output_dir: cfg.output_dir.clone(),
            adam: cfg.adam,
            lbfgs: cfg.lbfgs,
        }
    }
}

impl ConfigDocument {
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let case = self
            .case
            .parse::<CaseId>()
            .map_err(|e| ConfigError::new("case", e.to_string()))?;
        let sampler = match self
            .sampler
            .parse::<SamplerKind>()
            .map_err(|e| ConfigError::new("sampler", e.to_string()))?
        {
            SamplerKind::KorobovLattice { .. } => SamplerKind::KorobovLattice {
                generator: self.korobov_generator,
            },
            other => other.reseeded(self.seed),
        };
        let activation = match self
            .activation
            .parse::<ActivationKind>()
            .map_err(|e| ConfigError::new("activation", e.to_string()))?
        {
            ActivationKind::Swish { .. } => {
                ActivationKind::swish(self.swish_beta).map_err(|e| ConfigError::new("swish_beta", e.to_string()))?
            }
            other => other,
        };
        let cfg = RunConfig {
            case,
            sampler,
            n_interior: self.n_interior,
            n_per_face: self.n_per_face,
            hidden_widths: self.hidden_widths.clone(),
            activation,
            adam: self.adam,
            lbfgs: self.lbfgs,
            eval_grid: self.eval_grid,
            seed: self.seed,
            output_dir: self.output_dir.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_interior == 0 {
            return Err(ConfigError::new("n_interior", "must be at least 1"));
        }
        if self.n_per_face == 0 {
            return Err(ConfigError::new("n_per_face", "must be at least 1"));
        }
        if self.hidden_widths.is_empty() || self.hidden_widths.contains(&0) {
            return Err(ConfigError::new(
                "hidden_widths",
                "needs at least one layer and no zero widths",
            ));
        }
        if self.eval_grid < 2 {
            return Err(ConfigError::new("eval_grid", "must be at least 2"));
        }
        if let SamplerKind::KorobovLattice { generator } = self.sampler {
            if generator == 0 {
                return Err(ConfigError::new("korobov_generator", "must be positive"));
            }
        }
        self.adam
            .validate()
            .map_err(|e| ConfigError::new("adam", e.to_string()))?;
        self.lbfgs
            .validate()
            .map_err(|e| ConfigError::new("lbfgs", e.to_string()))?;
        Ok(())
    }

    /// Same config with a new seed, propagated to seeded samplers.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.sampler = self.sampler.reseeded(seed);
        self
    }

    /// The effective config as a TOML document that parses back to `self`.
    pub fn to_toml(&self) -> String {
        toml::to_string(&ConfigDocument::from(self)).expect("config document serializes")
    }
}

/// Parses a TOML run document. Missing keys take their defaults; unknown
/// keys, type mismatches and bad names are errors naming the key.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let de = toml::Deserializer::parse(text).map_err(|e| ConfigError::new("<document>", e.to_string()))?;
    let doc: ConfigDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        ConfigError::new(&path, inner.message().to_string())
    })?;
    doc.resolve()
}
