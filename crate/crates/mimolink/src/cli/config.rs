//! JSON run configuration and flag/file/default precedence.
//!
//! Every field is optional in the file; command-line flags override file
//! values, which override defaults. Physical quantities carry unit suffixes
//! in their key names. The optional `axes` array turns the run into a sweep;
//! each element is a single-key object naming one swept parameter, and axis
//! order fixes the grid order.

use crate::capacity::CapacityAveraging;
use crate::corrchan::{LosPowerMode, ScenarioKind};
use crate::error::{Error, Result};
use crate::linkctl::{CsiPolicy, LinkConfig};
use crate::phy::{DetectorKind, TxMode};
use crate::sweep::AxisValues;
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub mode: Option<String>,
    pub detector: Option<String>,
    pub snr_db: Option<f64>,
    pub scenario: Option<String>,
    pub k_factor: Option<f64>,
    pub los_mode: Option<String>,
    pub speed_kmh: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub csi: Option<String>,
    pub n_subcarriers: Option<usize>,
    pub n_symbols: Option<usize>,
    pub subcarrier_spacing_hz: Option<f64>,
    pub subframe_period_s: Option<f64>,
    pub carrier_hz: Option<f64>,
    pub harq_enabled: Option<bool>,
    pub max_retransmissions: Option<u32>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub subframes: Option<usize>,
    pub capacity_samples: Option<usize>,
    pub capacity_averaging: Option<String>,
    pub axes: Option<Vec<serde_json::Map<String, serde_json::Value>>>,
}

pub fn load_file(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn parse_f64_list(name: &str, v: &serde_json::Value) -> Result<Vec<f64>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Config(format!("axis '{name}' must be an array")))?;
    arr.iter()
        .map(|x| {
            x.as_f64()
                .ok_or_else(|| Error::Config(format!("axis '{name}' holds a non-number: {x}")))
        })
        .collect()
}

fn parse_str_list<T>(name: &str, v: &serde_json::Value) -> Result<Vec<T>>
where
    T: std::str::FromStr<Err = Error>,
{
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Config(format!("axis '{name}' must be an array")))?;
    arr.iter()
        .map(|x| {
            x.as_str()
                .ok_or_else(|| Error::Config(format!("axis '{name}' holds a non-string: {x}")))?
                .parse()
        })
        .collect()
}

pub fn parse_axes(raw: &[serde_json::Map<String, serde_json::Value>]) -> Result<Vec<AxisValues>> {
    raw.iter()
        .map(|entry| {
            if entry.len() != 1 {
                return Err(Error::Config(
                    "each axis entry must hold exactly one parameter".into(),
                ));
            }
            let (name, values) = entry.iter().next().unwrap();
            match name.as_str() {
                "snr_db" => Ok(AxisValues::SnrDb(parse_f64_list(name, values)?)),
                "k_factor" => Ok(AxisValues::KFactor(parse_f64_list(name, values)?)),
                "speed_kmh" => Ok(AxisValues::SpeedKmh(parse_f64_list(name, values)?)),
                "scenario" => Ok(AxisValues::Scenario(parse_str_list::<ScenarioKind>(
                    name, values,
                )?)),
                "mode" => Ok(AxisValues::Mode(parse_str_list::<TxMode>(name, values)?)),
                "detector" => Ok(AxisValues::Detector(parse_str_list::<DetectorKind>(
                    name, values,
                )?)),
                other => Err(Error::Config(format!(
                    "unknown axis '{other}' (swept parameters: snr_db, k_factor, speed_kmh, scenario, mode, detector)"
                ))),
            }
        })
        .collect()
}

/// Command-line overrides, already parsed to plain values.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub mode: Option<String>,
    pub detector: Option<String>,
    pub snr_db: Option<f64>,
    pub scenario: Option<String>,
    pub k_factor: Option<f64>,
    pub los_mode: Option<String>,
    pub speed_kmh: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub csi: Option<String>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub subframes: Option<usize>,
    pub capacity_samples: Option<usize>,
    pub capacity_averaging: Option<String>,
}

/// Seed default when neither flags nor file provide one.
pub fn env_seed() -> Result<Option<u64>> {
    match std::env::var("MIMOLINK_SEED") {
        Ok(s) => s
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| Error::Config(format!("MIMOLINK_SEED must be a u64, got '{s}'"))),
        Err(_) => Ok(None),
    }
}

/// Budget knobs resolved alongside the link config.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub trials: usize,
    pub subframes: usize,
    pub capacity_samples: usize,
    pub capacity_averaging: CapacityAveraging,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            trials: 200,
            subframes: 50,
            capacity_samples: 10_000,
            capacity_averaging: CapacityAveraging::default(),
        }
    }
}

/// flag > file > default, field by field.
pub fn resolve(
    file: &FileConfig,
    flags: &Overrides,
) -> Result<(LinkConfig, Budget, Option<Vec<AxisValues>>)> {
    let mut cfg = LinkConfig::default();
    if let Some(m) = flags.mode.as_deref().or(file.mode.as_deref()) {
        cfg.mode = m.parse()?;
    }
    if let Some(d) = flags.detector.as_deref().or(file.detector.as_deref()) {
        cfg.detector = d.parse()?;
    }
    if let Some(s) = flags.scenario.as_deref().or(file.scenario.as_deref()) {
        cfg.scenario = s.parse()?;
    }
    if let Some(l) = flags.los_mode.as_deref().or(file.los_mode.as_deref()) {
        cfg.los_mode = l.parse::<LosPowerMode>()?;
    }
    if let Some(c) = flags.csi.as_deref().or(file.csi.as_deref()) {
        cfg.csi = c.parse::<CsiPolicy>()?;
    }
    if let Some(v) = flags.snr_db.or(file.snr_db) {
        cfg.snr_db = v;
    }
    if let Some(v) = flags.k_factor.or(file.k_factor) {
        cfg.k_factor = v;
    }
    if let Some(v) = flags.speed_kmh.or(file.speed_kmh) {
        cfg.speed_kmh = v;
    }
    if flags.alpha.is_some() || file.alpha.is_some() {
        cfg.alpha = flags.alpha.or(file.alpha);
    }
    if flags.beta.is_some() || file.beta.is_some() {
        cfg.beta = flags.beta.or(file.beta);
    }
    if let Some(v) = file.n_subcarriers {
        cfg.grid.n_subcarriers = v;
    }
    if let Some(v) = file.n_symbols {
        cfg.grid.n_symbols = v;
    }
    if let Some(v) = file.subcarrier_spacing_hz {
        cfg.grid.subcarrier_spacing_hz = v;
    }
    if let Some(v) = file.subframe_period_s {
        cfg.grid.subframe_period_s = v;
    }
    if let Some(v) = file.carrier_hz {
        cfg.carrier_hz = v;
    }
    if let Some(v) = file.harq_enabled {
        cfg.harq.enabled = v;
    }
    if let Some(v) = file.max_retransmissions {
        cfg.harq.max_retransmissions = v;
    }
    cfg.seed = match flags.seed.or(file.seed) {
        Some(s) => s,
        None => env_seed()?.unwrap_or(0),
    };
    cfg.validate()?;

    let defaults = Budget::default();
    let budget = Budget {
        trials: flags.trials.or(file.trials).unwrap_or(defaults.trials),
        subframes: flags
            .subframes
            .or(file.subframes)
            .unwrap_or(defaults.subframes),
        capacity_samples: flags
            .capacity_samples
            .or(file.capacity_samples)
            .unwrap_or(defaults.capacity_samples),
        capacity_averaging: match flags
            .capacity_averaging
            .as_deref()
            .or(file.capacity_averaging.as_deref())
        {
            Some(v) => v.parse()?,
            None => defaults.capacity_averaging,
        },
    };
    let axes = file.axes.as_deref().map(parse_axes).transpose()?;
    Ok((cfg, budget, axes))
}
