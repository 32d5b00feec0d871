//! Correlated Rayleigh/Rician tap-gain generation and the per-subcarrier
//! frequency response of the tapped delay line.

use crate::corrchan::correlation::{correlation_root, kronecker_correlation, CorrelationSpec};
use crate::corrchan::doppler::{DopplerSpec, FadingProcess};
use crate::corrchan::profile::MultipathProfile;
use crate::error::{Error, Result};
use crate::linalg::{c64, Mat2};
use crate::rng::Stream;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FadingKind {
    Rayleigh,
    Rician,
}

/// How the Rician line-of-sight power enters the link budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LosPowerMode {
    /// Total tap power stays fixed; K redistributes it.
    Normalized,
    /// The LOS component adds power on top of unit-power scatter.
    Additive,
}

impl std::str::FromStr for LosPowerMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normalized" => Ok(LosPowerMode::Normalized),
            "additive" => Ok(LosPowerMode::Additive),
            other => Err(Error::Config(format!(
                "unknown los mode '{other}' (expected 'normalized' or 'additive')"
            ))),
        }
    }
}

impl LosPowerMode {
    pub fn label(&self) -> &'static str {
        match self {
            LosPowerMode::Normalized => "normalized",
            LosPowerMode::Additive => "additive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingSpec {
    pub kind: FadingKind,
    /// Linear LOS-to-scatter power ratio; 0 for Rayleigh.
    pub k_factor: f64,
    pub los_power_mode: LosPowerMode,
}

impl FadingSpec {
    /// k = 0 yields Rayleigh; k > 0 Rician.
    pub fn new(k_factor: f64, los_power_mode: LosPowerMode) -> Result<Self> {
        if !(k_factor >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "k_factor must be >= 0, got {k_factor}"
            )));
        }
        Ok(FadingSpec {
            kind: if k_factor == 0.0 {
                FadingKind::Rayleigh
            } else {
                FadingKind::Rician
            },
            k_factor,
            los_power_mode,
        })
    }

    pub fn rayleigh() -> Self {
        Self::new(0.0, LosPowerMode::Additive).unwrap()
    }
}

/// Time series of 2x2 tap gain matrices, one row per tap.
#[derive(Debug, Clone)]
pub struct TapGainSeries {
    /// gains[tap][time_sample], rx-by-tx.
    pub gains: Vec<Vec<Mat2>>,
    pub sample_period: f64,
    /// Tap delays, parallel to `gains`.
    pub delays_s: Vec<f64>,
    /// Which tap carries the constant LOS phasor, when Rician.
    pub los_tap: Option<usize>,
}

impl TapGainSeries {
    pub fn n_taps(&self) -> usize {
        self.gains.len()
    }

    pub fn n_samples(&self) -> usize {
        self.gains.first().map_or(0, |g| g.len())
    }

    /// Sum of tap matrices at one time sample (flat-equivalent channel).
    pub fn aggregate(&self, t: usize) -> Mat2 {
        let mut h = Mat2::zero();
        for tap in &self.gains {
            h = h.add(&tap[t]);
        }
        h
    }
}

/// Phase-aligned rank-1 LOS matrix (all entries 1).
fn los_matrix() -> Mat2 {
    Mat2([[c64(1.0, 0.0); 2]; 2])
}

/// Generates the correlated tap-gain series. For each tap, four independent
/// unit-power fading processes are colored by L = root(kron(corr)) and scaled
/// by the tap power; the flagged tap gets the Rician LOS term according to
/// `fading.los_power_mode`. Streams: `stream.child(tap).child(pair)`.
pub fn generate_channel(
    profile: &MultipathProfile,
    fading: &FadingSpec,
    corr: &CorrelationSpec,
    doppler: &DopplerSpec,
    n_samples: usize,
    sample_period: f64,
    stream: Stream,
) -> Result<TapGainSeries> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    if sample_period <= 0.0 {
        return Err(Error::InvalidParameter("sample period must be > 0".into()));
    }
    let rician = fading.kind == FadingKind::Rician && fading.k_factor > 0.0;
    let los_tap = profile.los_tap();
    if rician && los_tap.is_none() {
        return Err(Error::InvalidParameter(
            "Rician fading requested but no tap carries the LOS flag".into(),
        ));
    }
    let l = correlation_root(&kronecker_correlation(corr)?)?;
    let fd = doppler.max_doppler_hz();
    let k = fading.k_factor;

    let mut gains = Vec::with_capacity(profile.taps.len());
    for (tap_idx, tap) in profile.taps.iter().enumerate() {
        let tap_stream = stream.child(tap_idx as u64);
        let procs: Vec<Vec<Complex64>> = (0..4)
            .map(|pair| FadingProcess::new(fd, tap_stream.child(pair as u64)).sample(n_samples, sample_period))
            .collect();
        let is_los = rician && los_tap == Some(tap_idx);
        let (scatter_scale, los_scale) = if is_los {
            match fading.los_power_mode {
                LosPowerMode::Normalized => (
                    (tap.power / (k + 1.0)).sqrt(),
                    (tap.power * k / (k + 1.0)).sqrt(),
                ),
                LosPowerMode::Additive => (tap.power.sqrt(), (tap.power * k).sqrt()),
            }
        } else {
            (tap.power.sqrt(), 0.0)
        };
        let los = los_matrix().scale(c64(los_scale, 0.0));
        let mut series = Vec::with_capacity(n_samples);
        for t in 0..n_samples {
            let g = [procs[0][t], procs[1][t], procs[2][t], procs[3][t]];
            let colored = l.mul_vec(g);
            let mut h = Mat2::from_vec4(colored).scale(c64(scatter_scale, 0.0));
            if is_los {
                h = h.add(&los);
            }
            series.push(h);
        }
        gains.push(series);
    }
    Ok(TapGainSeries {
        gains,
        sample_period,
        delays_s: profile.delays(),
        los_tap: if rician { los_tap } else { None },
    })
}

/// Per-OFDM-symbol, per-subcarrier 2x2 frequency response.
#[derive(Debug, Clone)]
pub struct ChannelGrid {
    /// h[symbol][subcarrier].
    pub h: Vec<Vec<Mat2>>,
    pub subcarrier_spacing_hz: f64,
}

impl ChannelGrid {
    pub fn n_symbols(&self) -> usize {
        self.h.len()
    }

    pub fn n_subcarriers(&self) -> usize {
        self.h.first().map_or(0, |row| row.len())
    }

    /// Copy with every symbol's response replaced by the first symbol's
    /// (stale channel-state information held from the subframe start).
    pub fn held_at_first_symbol(&self) -> ChannelGrid {
        ChannelGrid {
            h: vec![self.h[0].clone(); self.h.len()],
            subcarrier_spacing_hz: self.subcarrier_spacing_hz,
        }
    }
}

/// h[s][k] = sum_l H_l(t_s) exp(-j 2 pi k df tau_l).
pub fn freq_response(
    series: &TapGainSeries,
    n_symbols: usize,
    n_subcarriers: usize,
    subcarrier_spacing_hz: f64,
    symbol_period_s: f64,
) -> Result<ChannelGrid> {
    if series.n_samples() < n_symbols {
        return Err(Error::Dimension(format!(
            "series has {} samples, need {n_symbols}",
            series.n_samples()
        )));
    }
    if (series.sample_period - symbol_period_s).abs() > 1e-9 * symbol_period_s.abs() {
        return Err(Error::Dimension(format!(
            "series sampled at {} s, grid symbol period is {} s",
            series.sample_period, symbol_period_s
        )));
    }
    let n_taps = series.n_taps();
    // Twiddle per (tap, subcarrier); evaluated directly so the grid equals
    // term-by-term summation to rounding.
    let mut twiddle = vec![vec![Complex64::default(); n_subcarriers]; n_taps];
    for (l, row) in twiddle.iter_mut().enumerate() {
        for (kidx, w) in row.iter_mut().enumerate() {
            let angle = -TAU * kidx as f64 * subcarrier_spacing_hz * series.delays_s[l];
            *w = Complex64::new(angle.cos(), angle.sin());
        }
    }
    let mut h = vec![vec![Mat2::zero(); n_subcarriers]; n_symbols];
    for (s, row) in h.iter_mut().enumerate() {
        for (kidx, slot) in row.iter_mut().enumerate() {
            let mut acc = Mat2::zero();
            for l in 0..n_taps {
                acc = acc.add(&series.gains[l][s].scale(twiddle[l][kidx]));
            }
            *slot = acc;
        }
    }
    Ok(ChannelGrid {
        h,
        subcarrier_spacing_hz,
    })
}
