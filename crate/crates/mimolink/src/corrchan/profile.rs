//! Multipath tap layouts for the two scattering scenarios.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// One discrete multipath component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TapProfile {
    /// Excess delay in seconds.
    pub delay_s: f64,
    /// Linear fraction of the total channel power.
    pub power: f64,
    /// Whether the Rician line-of-sight component rides on this tap.
    pub carries_los: bool,
}

/// An ordered tap list with unit total power.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipathProfile {
    pub taps: Vec<TapProfile>,
    pub name: String,
}

impl MultipathProfile {
    pub fn new(taps: Vec<TapProfile>, name: impl Into<String>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::InvalidParameter("profile needs at least one tap".into()));
        }
        let total: f64 = taps.iter().map(|t| t.power).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "tap powers sum to {total}, expected 1"
            )));
        }
        for t in &taps {
            if t.delay_s < 0.0 || t.power <= 0.0 {
                return Err(Error::InvalidParameter(
                    "taps need delay >= 0 and power > 0".into(),
                ));
            }
        }
        for w in taps.windows(2) {
            if w[1].delay_s <= w[0].delay_s {
                return Err(Error::InvalidParameter(
                    "tap delays must be strictly increasing".into(),
                ));
            }
        }
        if taps.iter().filter(|t| t.carries_los).count() > 1 {
            return Err(Error::InvalidParameter(
                "at most one tap may carry the LOS component".into(),
            ));
        }
        Ok(MultipathProfile {
            taps,
            name: name.into(),
        })
    }

    pub fn los_tap(&self) -> Option<usize> {
        self.taps.iter().position(|t| t.carries_los)
    }

    pub fn delays(&self) -> Vec<f64> {
        self.taps.iter().map(|t| t.delay_s).collect()
    }
}

/// The two scattering environments under study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Rural, 4 multipath components over 2 us.
    PoorScattering,
    /// Urban microcellular, 12 components over 5 us.
    RichScattering,
}

impl ScenarioKind {
    pub fn label(&self) -> &'static str {
        match self {
            ScenarioKind::PoorScattering => "poor",
            ScenarioKind::RichScattering => "rich",
        }
    }
}

impl std::str::FromStr for ScenarioKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poor" => Ok(ScenarioKind::PoorScattering),
            "rich" => Ok(ScenarioKind::RichScattering),
            other => Err(Error::Config(format!(
                "unknown scenario '{other}' (expected 'poor' or 'rich')"
            ))),
        }
    }
}

const DECAY_RMS_TARGET_S: f64 = 1e-6;

/// Tap layout for a scenario: delays uniformly spaced over the scenario span,
/// powers on an exponential decay with a 1 us RMS-delay-spread target,
/// renormalized to unit total; the first tap carries the LOS flag.
pub fn scenario_profile(kind: ScenarioKind) -> MultipathProfile {
    let (n, span) = match kind {
        ScenarioKind::PoorScattering => (4usize, 2e-6),
        ScenarioKind::RichScattering => (12usize, 5e-6),
    };
    let delays: Vec<f64> = (0..n)
        .map(|i| span * i as f64 / (n - 1) as f64)
        .collect();
    let raw: Vec<f64> = delays.iter().map(|d| (-d / DECAY_RMS_TARGET_S).exp()).collect();
    let total: f64 = raw.iter().sum();
    let taps = delays
        .iter()
        .zip(raw.iter())
        .enumerate()
        .map(|(i, (&d, &p))| TapProfile {
            delay_s: d,
            power: p / total,
            carries_los: i == 0,
        })
        .collect();
    MultipathProfile::new(taps, kind.label()).expect("preset profiles satisfy invariants")
}
