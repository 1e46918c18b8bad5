//! Scenario configuration: JSON file, presets and flag overrides.

use std::path::{Path, PathBuf};

use modwave::model::{ModelConfig, PotentialModel, ResonanceData};
use modwave::{Axis, DeltaWell, Error, ModulatedPacket, PhysicsConstants, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Potential {
    Free,
    Delta,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Probe {
    FixedX(f64),
    FixedT(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub min: f64,
    pub max: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    Exact,
    Components,
    BeatsApprox,
    TwoLevel,
    Delay,
    Oracle,
}

/// A Δk value, or the token `"k"` for Δk = k (the k₋ channel closed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DkValue {
    Value(f64),
    Token(String),
}

impl DkValue {
    pub fn parse(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s == "k" {
            return Ok(Self::Token("k".into()));
        }
        s.parse::<f64>().map(Self::Value).map_err(|e| format!("invalid dk `{s}`: {e}"))
    }

    pub fn resolve(&self, k: f64) -> Result<f64> {
        match self {
            Self::Value(v) => Ok(*v),
            Self::Token(t) if t == "k" => Ok(k),
            Self::Token(t) => Err(Error::Config(format!("dk token `{t}` is not `k`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub potential: Potential,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_energy")]
    pub energy: f64,
    #[serde(default = "dk_zero")]
    pub dk: DkValue,
    #[serde(default = "one")]
    pub mass_ratio: f64,
    pub probe: Probe,
    pub grid: GridConfig,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<Output>,
    /// Δk values for the delay sweep.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dk_list: Vec<DkValue>,
    /// Resonance CSV for the custom potential.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resonances: Option<PathBuf>,
    /// Range L of the custom potential (Å).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
}

fn default_lambda() -> f64 {
    4.27
}
fn default_energy() -> f64 {
    0.08
}
fn dk_zero() -> DkValue {
    DkValue::Value(0.0)
}
fn one() -> f64 {
    1.0
}
fn default_outputs() -> Vec<Output> {
    vec![Output::Exact]
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            potential: Potential::Delta,
            lambda: 4.27,
            energy: 0.08,
            dk: dk_zero(),
            mass_ratio: 1.0,
            probe: Probe::FixedX(0.0),
            grid: GridConfig { min: 0.0, max: 1.0, samples: 1001 },
            outputs: default_outputs(),
            dk_list: Vec::new(),
            resonances: None,
            length: None,
        }
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn constants(&self) -> Result<PhysicsConstants> {
        self.model_config(0.0).constants()
    }

    fn model_config(&self, dk: f64) -> ModelConfig {
        ModelConfig { lambda: self.lambda, energy: self.energy, dk, mass_ratio: self.mass_ratio, ..Default::default() }
    }

    /// Packet with Δk from `dk`.
    pub fn packet(&self) -> Result<ModulatedPacket> {
        let k = self.constants()?.wavenumber(self.energy);
        self.model_config(self.dk.resolve(k)?).packet()
    }

    pub fn packet_with(&self, dk: &DkValue) -> Result<ModulatedPacket> {
        let k = self.constants()?.wavenumber(self.energy);
        self.model_config(dk.resolve(k)?).packet()
    }

    pub fn well(&self) -> Result<DeltaWell> {
        self.model_config(0.0).well()
    }

    pub fn model(&self) -> Result<PotentialModel> {
        Ok(match self.potential {
            Potential::Free => PotentialModel::Free,
            Potential::Delta => PotentialModel::Delta(self.well()?),
            Potential::Custom => {
                let path = self
                    .resonances
                    .as_ref()
                    .ok_or_else(|| Error::Config("custom potential needs a resonance file".into()))?;
                let length = self.length.ok_or_else(|| Error::Config("custom potential needs its length L".into()))?;
                PotentialModel::custom(ResonanceData::from_csv_file(length, path)?)
            }
        })
    }

    pub fn axis(&self) -> Axis {
        match self.probe {
            Probe::FixedX(x) => Axis::Time { x },
            Probe::FixedT(t) => Axis::Space { t },
        }
    }

    /// Checks everything that can be checked without evaluating the solution.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.grid.samples < 2 {
            return bad(format!("grid.samples must be >= 2, got {}", self.grid.samples));
        }
        if !(self.grid.min.is_finite() && self.grid.max.is_finite() && self.grid.min < self.grid.max) {
            return bad(format!("grid needs min < max, got [{}, {}]", self.grid.min, self.grid.max));
        }
        if !(self.energy > 0.0) || !(self.mass_ratio > 0.0) {
            return bad("energy and mass_ratio must be positive".into());
        }
        if self.potential == Potential::Delta && !(self.lambda > 0.0) {
            return bad(format!("lambda must be positive, got {}", self.lambda));
        }
        let x_min = match self.potential {
            Potential::Custom => self.length.unwrap_or(0.0),
            _ => 0.0,
        };
        match self.probe {
            Probe::FixedX(x) => {
                if !(x >= x_min) || !x.is_finite() {
                    return bad(format!("fixed_x = {x} lies outside the transmission region x >= {x_min}"));
                }
                if self.grid.min < 0.0 {
                    return bad(format!("time grid starts at {} < 0", self.grid.min));
                }
            }
            Probe::FixedT(t) => {
                if !(t >= 0.0) || !t.is_finite() {
                    return bad(format!("fixed_t = {t} must be >= 0"));
                }
                if self.grid.min < x_min {
                    return bad(format!("space grid starts at {} < {x_min}", self.grid.min));
                }
            }
        }
        let p = self.packet()?;
        if p.dk < 0.0 || p.dk > p.k {
            return bad(format!("dk must lie in [0, k = {}], got {}", p.k, p.dk));
        }
        for dk in &self.dk_list {
            let v = dk.resolve(p.k)?;
            if !(v >= 0.0 && v <= p.k) {
                return bad(format!("dk_list entry {v} outside [0, k = {}]", p.k));
            }
        }
        self.model()?;
        Ok(())
    }
}
