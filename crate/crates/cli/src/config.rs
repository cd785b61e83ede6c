//! Run configuration: a TOML file merged with command-line overrides.

use std::path::Path;

use anyhow::Context as _;
use lma_core::floor::{DEFAULT_DEPTH_AXIS, DEFAULT_TAU, DEFAULT_UP_AXIS};
use lma_core::forest::{ForestParams, ParamGrid};
use lma_core::motion::DEFAULT_MAX_GAP;
use lma_core::LmaConfig;
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_FOLDS: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub lma: LmaConfig,
    pub forest: ForestParams,
    pub grid: ParamGrid,
    pub cv: CvSettings,
    pub floor: FloorSettings,
    pub repair: RepairSettings,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvSettings {
    pub folds: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FloorSettings {
    pub tau: f64,
    pub up_axis: usize,
    pub depth_axis: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RepairSettings {
    /// Longest run of missing frames that is interpolated.
    pub max_gap: usize,
    /// Resample every sequence to this rate before extraction.
    pub target_fps: Option<f64>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            lma: LmaConfig::default(),
            forest: ForestParams::default(),
            grid: ParamGrid::default(),
            cv: CvSettings::default(),
            floor: FloorSettings::default(),
            repair: RepairSettings::default(),
        }
    }
}

impl Default for CvSettings {
    fn default() -> Self {
        Self {
            folds: DEFAULT_FOLDS,
        }
    }
}

impl Default for FloorSettings {
    fn default() -> Self {
        Self {
            tau: DEFAULT_TAU,
            up_axis: DEFAULT_UP_AXIS,
            depth_axis: DEFAULT_DEPTH_AXIS,
        }
    }
}

impl Default for RepairSettings {
    fn default() -> Self {
        Self {
            max_gap: DEFAULT_MAX_GAP,
            target_fps: None,
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        toml::from_str(text).map_err(|e| crate::usage(format!("config: {e}")))
    }

    /// Loads `path` (if any), applies the seed override and validates.
    /// The forest seed always follows the master seed.
    pub fn resolve(path: Option<&Path>, seed: Option<u64>) -> anyhow::Result<Self> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                Self::from_toml(&text).with_context(|| p.display().to_string())?
            }
            None => Self::default(),
        };
        if let Some(s) = seed {
            cfg.seed = s;
        }
        cfg.forest.seed = cfg.seed;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.lma
            .validate()
            .map_err(|e| crate::usage(format!("config [lma]: {e}")))?;
        self.forest
            .validate()
            .map_err(|e| crate::usage(format!("config [forest]: {e}")))?;
        if self.cv.folds < 2 {
            return Err(crate::usage("config [cv]: folds must be >= 2"));
        }
        if !(self.floor.tau > 0.0 && self.floor.tau < 1.0) {
            return Err(crate::usage("config [floor]: tau must lie in (0, 1)"));
        }
        if let Some(f) = self.repair.target_fps {
            if !(f.is_finite() && f > 0.0) {
                return Err(crate::usage("config [repair]: target_fps must be > 0"));
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = Config::default();
        assert_eq!(Config::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn partial_file_and_override() {
        let cfg = Config::from_toml("seed = 7\n[lma.window]\nw = 30\nstride = 5\n").unwrap();
        assert_eq!(cfg.lma.window.w, 30);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.forest, ForestParams::default());
    }

    #[test]
    fn unknown_keys_are_usage_errors() {
        let err = Config::from_toml("sed = 1\n").unwrap_err();
        assert_eq!(crate::exit_code(&err), crate::EXIT_USAGE);
    }
}
