use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// The named experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    EntropyValue,
    GrowthCurve,
    Shattering,
    ProperFraction,
    PropertyM,
    Contiguity,
    ExpectedCount,
    NearCancellation,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::EntropyValue,
        Experiment::GrowthCurve,
        Experiment::Shattering,
        Experiment::ProperFraction,
        Experiment::PropertyM,
        Experiment::Contiguity,
        Experiment::ExpectedCount,
        Experiment::NearCancellation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::EntropyValue => "entropy-value",
            Experiment::GrowthCurve => "growth-curve",
            Experiment::Shattering => "shattering",
            Experiment::ProperFraction => "proper-fraction",
            Experiment::PropertyM => "property-m",
            Experiment::Contiguity => "contiguity",
            Experiment::ExpectedCount => "expected-count",
            Experiment::NearCancellation => "near-cancellation",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown experiment '{s}'")))
    }
}

/// Parameters of one run. Fields not used by an experiment keep their
/// defaults and are still echoed into `config.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub d: usize,
    pub k: usize,
    /// Number of vertices.
    pub n: usize,
    pub r: usize,
    pub eps: f64,
    /// Upper end of the weight band or the cancellation scale; `None` means
    /// "compute from the sign change of the growth curve".
    pub delta: Option<f64>,
    pub eta: f64,
    pub trials: usize,
    pub seed: u64,
    /// Uniform codewords averaged per trial for edge-marginal TV.
    pub codeword_samples: usize,
    /// Target density of the separated set (Property M) or of W (near-cancellation).
    pub density: f64,
    pub s_max: f64,
    /// Number of grid intervals on `[0, s_max]` for the growth curve.
    pub grid: usize,
}

impl ExperimentConfig {
    /// The acceptance-scale defaults for `experiment`.
    pub fn defaults(experiment: Experiment) -> Self {
        let base = ExperimentConfig {
            experiment,
            d: 3,
            k: 4,
            n: 3000,
            r: 1,
            eps: 0.05,
            delta: None,
            eta: 0.0,
            trials: 20,
            seed: 1,
            codeword_samples: 32,
            density: 0.01,
            s_max: crate::entropy::DEFAULT_S_MAX,
            grid: 2000,
        };
        match experiment {
            Experiment::EntropyValue | Experiment::PropertyM => base,
            Experiment::GrowthCurve => ExperimentConfig { k: 6, trials: 1, ..base },
            Experiment::Shattering => ExperimentConfig { n: 40, trials: 200, ..base },
            Experiment::ProperFraction => ExperimentConfig { r: 2, ..base },
            Experiment::Contiguity => ExperimentConfig { n: 1200, trials: 100, ..base },
            Experiment::ExpectedCount => ExperimentConfig { d: 2, k: 3, n: 6, trials: 1, ..base },
            Experiment::NearCancellation => {
                ExperimentConfig { n: 1200, trials: 100, eps: 0.5, delta: Some(0.01), ..base }
            }
        }
    }

    /// Checks hard constraints and returns warnings for soft ones.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        if self.k < 2 || self.d < 1 {
            return Err(Error::invalid(format!("need d >= 1 and k >= 2, got d={}, k={}", self.d, self.k)));
        }
        if self.experiment != Experiment::GrowthCurve && (self.n < self.k || self.n % self.k != 0) {
            return Err(Error::invalid(format!("k={} must divide n={}", self.k, self.n)));
        }
        if self.experiment == Experiment::ExpectedCount {
            if self.d >= self.k {
                warnings.push(format!("d={} >= k={}: outside the regime k > d", self.d, self.k));
            }
        } else {
            if self.d < 2 || self.d >= self.k {
                return Err(Error::invalid(format!("need k > d >= 2, got d={}, k={}", self.d, self.k)));
            }
            if self.d == 2 {
                warnings.push("d=2 lies outside the regime k > d >= 3 (contrast run)".to_string());
            }
        }
        if self.experiment != Experiment::GrowthCurve && self.trials == 0 {
            return Err(Error::invalid("trials must be positive"));
        }
        for (name, v) in [("eps", self.eps), ("eta", self.eta), ("density", self.density)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!("{name}={v} outside [0, 1]")));
            }
        }
        if let Some(delta) = self.delta {
            if !(0.0..=1.0).contains(&delta) {
                return Err(Error::invalid(format!("delta={delta} outside [0, 1]")));
            }
        }
        if !(self.s_max >= 1.0) || self.grid == 0 {
            return Err(Error::invalid("need s_max >= 1 and a positive grid size"));
        }
        if self.codeword_samples == 0 {
            return Err(Error::invalid("codeword_samples must be positive"));
        }
        Ok(warnings)
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(&Sha256::digest(&json)[..8])
    }
}
