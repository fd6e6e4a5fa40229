//! Declarative run configuration (JSON).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analytic::{IntensityModel, PathLoss, SystemParams};
use crate::error::{Error, Result};

/// Spacing of an evaluation grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Log,
    Linear,
}

/// Which variable the grid is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GridDomain {
    /// Distance-normalized SINR `γ = SINR·r_T^α`.
    #[default]
    Gamma,
    /// SINR itself.
    Sinr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
    #[serde(default)]
    pub domain: GridDomain,
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.points == 0 {
            return Err(Error::Config("γ grid is empty".into()));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.max >= self.min) {
            return Err(Error::Config(format!("γ grid bounds [{}, {}] are invalid", self.min, self.max)));
        }
        if self.points == 1 {
            return Ok(vec![self.min]);
        }
        let n = (self.points - 1) as f64;
        Ok(match self.spacing {
            Spacing::Linear => (0..self.points).map(|k| self.min + (self.max - self.min) * k as f64 / n).collect(),
            Spacing::Log => {
                if !(self.min > 0.0) {
                    return Err(Error::Config("log-spaced grid needs a positive minimum".into()));
                }
                let r = (self.max / self.min).ln();
                (0..self.points).map(|k| self.min * (r * k as f64 / n).exp()).collect()
            }
        })
    }
}

/// Output destinations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    /// Curve report CSV; standard output when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<PathBuf>,
    /// Raw sorted SINR samples, one per line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<PathBuf>,
}

/// `(L, ρ)` pairs for the antenna scaling demonstration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingSpec {
    pub antennas: Vec<u32>,
    pub densities: Vec<f64>,
}

/// Guard-zone optimization settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuardSpec {
    pub parent_density: f64,
    pub outage_targets: Vec<f64>,
    pub max_radius: f64,
    pub grid_points: usize,
}

/// A complete run description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemParams,
    pub model: IntensityModel,
    pub gamma_grid: GridSpec,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub outputs: Outputs,
    /// Interferer path loss for direct simulation; `r^{−α}` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pathloss: Option<PathLoss>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ScalingSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard: Option<GuardSpec>,
    /// Bound on the CDF bias from window truncation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bias_tolerance: Option<f64>,
    /// Sup-deviation tolerance for `compare`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate().map_err(|e| Error::Config(format!("system: {e}")))?;
        self.model.validate(self.system.alpha).map_err(|e| Error::Config(format!("model: {e}")))?;
        self.gamma_grid.values()?;
        if let Some(p) = &self.pathloss {
            p.validate().map_err(|e| Error::Config(format!("pathloss: {e}")))?;
        }
        if let Some(s) = &self.scaling {
            if s.antennas.is_empty() || s.antennas.len() != s.densities.len() {
                return Err(Error::Config("scaling: antennas and densities must be nonempty and of equal length".into()));
            }
        }
        if let Some(g) = &self.guard {
            if g.outage_targets.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
                return Err(Error::Config("guard: outage targets must lie in (0, 1)".into()));
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, hex encoded. Output paths are
    /// excluded since they do not affect results.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(&RunConfig { outputs: Outputs::default(), ..self.clone() }).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    /// Grid converted to `γ`.
    pub fn gamma_values(&self) -> Result<Vec<f64>> {
        let v = self.gamma_grid.values()?;
        Ok(match self.gamma_grid.domain {
            GridDomain::Gamma => v,
            GridDomain::Sinr => v.into_iter().map(|s| self.system.to_gamma(s)).collect(),
        })
    }
}
