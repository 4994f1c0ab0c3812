use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{NoiseKind, NoiseModel};

/// Environment variable overriding the worker count of a configuration file.
pub const WORKERS_ENV: &str = "SURFMC_WORKERS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    StandardMwpm,
    EnhancedMwpm,
    SingleTemperature,
    FreeEnergy,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] =
        [Algorithm::StandardMwpm, Algorithm::EnhancedMwpm, Algorithm::SingleTemperature, Algorithm::FreeEnergy];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::StandardMwpm => "standard_mwpm",
            Algorithm::EnhancedMwpm => "enhanced_mwpm",
            Algorithm::SingleTemperature => "single_temperature",
            Algorithm::FreeEnergy => "free_energy",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm `{s}`")))
    }

    pub fn is_sampler(self) -> bool {
        matches!(self, Algorithm::SingleTemperature | Algorithm::FreeEnergy)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn model_name(kind: NoiseKind) -> &'static str {
    match kind {
        NoiseKind::Depolarizing => "depolarizing",
        NoiseKind::IndependentXz => "independent_xz",
        NoiseKind::GeneralPauli => "general_pauli",
    }
}

fn default_model() -> NoiseKind {
    NoiseKind::Depolarizing
}

fn default_algorithms() -> Vec<Algorithm> {
    vec![Algorithm::StandardMwpm, Algorithm::EnhancedMwpm, Algorithm::SingleTemperature]
}

fn default_free_energy_points() -> usize {
    21
}

fn default_max_trials() -> u64 {
    1_000_000
}

fn default_batch_size() -> u64 {
    256
}

/// Campaign settings, as read from a TOML file and amended by flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub distances: Vec<usize>,
    #[serde(default = "default_model")]
    pub model: NoiseKind,
    /// Physical error rates. For independent noise both species use `p`.
    #[serde(default)]
    pub p: Vec<f64>,
    /// Relative X, Y, Z weights for the general model.
    #[serde(default)]
    pub pauli_ratio: Option<[f64; 3]>,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<Algorithm>,
    /// Metropolis steps per class; `L⁴` when absent.
    #[serde(default)]
    pub n_sample: Option<u64>,
    /// `β* / β̄`; 0.85 for independent noise and 1 otherwise when absent.
    #[serde(default)]
    pub beta_star_factor: Option<f64>,
    #[serde(default = "default_free_energy_points")]
    pub free_energy_points: usize,
    /// Metropolis steps per class and temperature; `n_sample` when absent.
    #[serde(default)]
    pub free_energy_samples: Option<u64>,
    /// Stop once every algorithm has this many failures.
    #[serde(default)]
    pub target_logical_errors: Option<u64>,
    /// Fixed number of trials per point.
    #[serde(default)]
    pub trials: Option<u64>,
    /// Cap on trials per point under `target_logical_errors`.
    #[serde(default = "default_max_trials")]
    pub max_trials: u64,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default = "default_batch_size")]
    pub batch_size: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub plot_dir: Option<PathBuf>,
    /// Per-trial log (one row per trial and algorithm).
    #[serde(default)]
    pub trial_log: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        toml::from_str("").expect("all fields have defaults")
    }
}

/// How a campaign point decides it is done.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopRule {
    Fixed(u64),
    TargetErrors { target: u64, max_trials: u64 },
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.distances.is_empty() {
            return bad("no code distances given".into());
        }
        if let Some(&l) = self.distances.iter().find(|&&l| l < 2) {
            return bad(format!("code distance must be at least 2, got {l}"));
        }
        if self.p.is_empty() {
            return bad("no error rates given".into());
        }
        if self.algorithms.is_empty() {
            return bad("no algorithms selected".into());
        }
        if self.seed.is_none() {
            return bad("a master seed is required".into());
        }
        for &p in &self.p {
            self.noise_model(p)?.beta_bar().map_err(|e| Error::Config(e.to_string()))?;
        }
        if self.model == NoiseKind::GeneralPauli && self.pauli_ratio.is_none() {
            return bad("the general model needs pauli_ratio = [x, y, z]".into());
        }
        if self.n_sample == Some(0) || self.free_energy_samples == Some(0) {
            return bad("sample counts must be positive".into());
        }
        if let Some(f) = self.beta_star_factor {
            if !(f.is_finite() && f >= 0.0) {
                return bad(format!("beta_star_factor must be finite and non-negative, got {f}"));
            }
        }
        if self.algorithms.contains(&Algorithm::FreeEnergy)
            && (self.free_energy_points < 3 || self.free_energy_points.is_multiple_of(2))
        {
            return bad(format!("free_energy_points must be odd and at least 3, got {}", self.free_energy_points));
        }
        if self.batch_size == 0 {
            return bad("batch_size must be positive".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be positive".into());
        }
        self.stop_rule()?;
        Ok(())
    }

    pub fn stop_rule(&self) -> Result<StopRule> {
        match (self.trials, self.target_logical_errors) {
            (Some(_), Some(_)) => Err(Error::Config("set either trials or target_logical_errors, not both".into())),
            (None, None) => Err(Error::Config("a stop rule is required: trials or target_logical_errors".into())),
            (Some(0), _) | (_, Some(0)) => Err(Error::Config("the stop rule must be positive".into())),
            (Some(n), None) => Ok(StopRule::Fixed(n)),
            (None, Some(t)) => {
                if self.max_trials == 0 {
                    return Err(Error::Config("max_trials must be positive".into()));
                }
                Ok(StopRule::TargetErrors { target: t, max_trials: self.max_trials })
            }
        }
    }

    pub fn noise_model(&self, p: f64) -> Result<NoiseModel<f64>> {
        let m = match self.model {
            NoiseKind::Depolarizing => NoiseModel::depolarizing(p),
            NoiseKind::IndependentXz => NoiseModel::independent(p, p),
            NoiseKind::GeneralPauli => {
                let r = self.pauli_ratio.unwrap_or([1.0; 3]);
                let s: f64 = r.iter().sum();
                if !(s > 0.0) || r.iter().any(|&x| x < 0.0) {
                    return Err(Error::Config(format!(
                        "pauli_ratio must be non-negative with a positive sum, got {r:?}"
                    )));
                }
                NoiseModel::general(p * r[0] / s, p * r[1] / s, p * r[2] / s)
            }
        };
        m.map_err(|e| Error::Config(e.to_string()))
    }

    /// Replaces `workers` with the value of [`WORKERS_ENV`] when it is set.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var(WORKERS_ENV) {
            match v.trim().parse::<usize>() {
                Ok(w) if w > 0 => self.workers = Some(w),
                _ => return Err(Error::Config(format!("{WORKERS_ENV} must be a positive integer, got `{v}`"))),
            }
        }
        Ok(())
    }

    /// Worker threads; all cores when unset.
    pub fn resolved_workers(&self) -> usize {
        self.workers.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
    }
}
