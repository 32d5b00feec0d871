//! Shannon capacity of the two transmission modes: open-loop equal-power
//! log-det for spatial multiplexing, the Alamouti effective scalar channel
//! for transmit diversity. Ergodic values are Monte Carlo means over
//! flat-equivalent channel draws (sum of tap matrices).

use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::linkctl::LinkConfig;
use crate::phy::TxMode;
use crate::rng::Stream;
use serde::{Deserialize, Serialize};

/// How each ergodic-capacity draw is reduced to a number. The aggregate
/// (flat-equivalent) channel and the per-subcarrier average give the same
/// mean for power-normalized profiles; both are kept for cross-checking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapacityAveraging {
    /// One instantaneous capacity per draw from the sum of tap matrices.
    #[default]
    Aggregate,
    /// Mean instantaneous capacity across the subcarrier grid per draw.
    PerSubcarrier,
}

impl std::str::FromStr for CapacityAveraging {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aggregate" => Ok(CapacityAveraging::Aggregate),
            "per_subcarrier" => Ok(CapacityAveraging::PerSubcarrier),
            other => Err(Error::Config(format!(
                "unknown capacity averaging '{other}' (expected 'aggregate' or 'per_subcarrier')"
            ))),
        }
    }
}

impl CapacityAveraging {
    pub fn label(&self) -> &'static str {
        match self {
            CapacityAveraging::Aggregate => "aggregate",
            CapacityAveraging::PerSubcarrier => "per_subcarrier",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacitySample {
    pub bits_per_s_per_hz: f64,
    pub mode: TxMode,
    pub snr_db: f64,
}

impl CapacitySample {
    pub fn compute(h: &Mat2, snr_db: f64, mode: TxMode) -> CapacitySample {
        CapacitySample {
            bits_per_s_per_hz: instantaneous_capacity(h, 10f64.powf(snr_db / 10.0), mode),
            mode,
            snr_db,
        }
    }
}

/// SM: log2 det(I + (rho/2) H H^H). TD: log2(1 + (rho/2) ||H||_F^2).
pub fn instantaneous_capacity(h: &Mat2, snr_linear: f64, mode: TxMode) -> f64 {
    let rho = snr_linear.max(0.0);
    match mode {
        TxMode::Sm => {
            let hh = h.mul(&h.adjoint());
            let g = rho / 2.0;
            // det(I + g*HH^H) for a 2x2 Hermitian HH^H, evaluated in reals.
            let a = hh.0[0][0].re;
            let d = hh.0[1][1].re;
            let bsq = hh.0[0][1].norm_sqr();
            let det = (1.0 + g * a) * (1.0 + g * d) - g * g * bsq;
            det.max(1.0).log2()
        }
        TxMode::Td => (1.0 + rho / 2.0 * h.frob_sq()).log2(),
    }
}

/// Monte Carlo mean and standard error of the instantaneous capacity over
/// independent channel draws at the config's operating point.
pub fn ergodic_capacity_with(
    cfg: &LinkConfig,
    n_samples: usize,
    averaging: CapacityAveraging,
    stream: Stream,
) -> Result<(f64, f64)> {
    if n_samples < 100 {
        return Err(Error::InvalidParameter(format!(
            "need at least 100 samples for an ergodic estimate, got {n_samples}"
        )));
    }
    let profile = cfg.profile();
    let fading = cfg.fading_spec();
    let corr = cfg.correlation_spec();
    let doppler = cfg.doppler_spec();
    let rho = 10f64.powf(cfg.snr_db / 10.0);
    let dt = cfg.grid.symbol_period_s();
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for i in 0..n_samples {
        let series = crate::corrchan::generate_channel(
            &profile,
            &fading,
            &corr,
            &doppler,
            1,
            dt,
            stream.child(i as u64),
        )?;
        let c = match averaging {
            CapacityAveraging::Aggregate => {
                instantaneous_capacity(&series.aggregate(0), rho, cfg.mode)
            }
            CapacityAveraging::PerSubcarrier => {
                let grid = crate::corrchan::freq_response(
                    &series,
                    1,
                    cfg.grid.n_subcarriers,
                    cfg.grid.subcarrier_spacing_hz,
                    dt,
                )?;
                grid.h[0]
                    .iter()
                    .map(|h| instantaneous_capacity(h, rho, cfg.mode))
                    .sum::<f64>()
                    / cfg.grid.n_subcarriers as f64
            }
        };
        // Welford running moments.
        let delta = c - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (c - mean);
    }
    let var = m2 / (n_samples - 1) as f64;
    Ok((mean, (var / n_samples as f64).sqrt()))
}

/// Ergodic capacity over flat-equivalent aggregate channel draws.
pub fn ergodic_capacity(cfg: &LinkConfig, n_samples: usize, stream: Stream) -> Result<(f64, f64)> {
    ergodic_capacity_with(cfg, n_samples, CapacityAveraging::Aggregate, stream)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corrchan::ScenarioKind;
    use crate::linalg::c64;

    #[test]
    fn identity_channel_closed_forms() {
        let h = Mat2::identity();
        let rho = 10.0;
        let sm = instantaneous_capacity(&h, rho, TxMode::Sm);
        let td = instantaneous_capacity(&h, rho, TxMode::Td);
        assert!((sm - 2.0 * 6.0f64.log2()).abs() < 1e-12);
        assert!((td - 11.0f64.log2()).abs() < 1e-12);
        // General identity-channel forms at a few more SNRs.
        for &r in &[0.5, 2.0, 100.0] {
            assert!(
                (instantaneous_capacity(&h, r, TxMode::Sm) - 2.0 * (1.0 + r / 2.0).log2()).abs()
                    < 1e-12
            );
            assert!(
                (instantaneous_capacity(&h, r, TxMode::Td) - (1.0 + r).log2()).abs() < 1e-12
            );
        }
    }

    #[test]
    fn samples_stay_finite_and_nonnegative() {
        let h = Mat2([[c64(2.0, -1.0), c64(0.5, 0.0)], [c64(0.0, 3.0), c64(-1.0, 0.2)]]);
        for mode in [TxMode::Sm, TxMode::Td] {
            for snr_db in [-30.0, 0.0, 14.0, 60.0] {
                let s = CapacitySample::compute(&h, snr_db, mode);
                assert!(s.bits_per_s_per_hz.is_finite());
                assert!(s.bits_per_s_per_hz >= 0.0);
                assert_eq!(s.snr_db, snr_db);
            }
        }
    }

    #[test]
    fn zero_channel_and_zero_snr_give_zero() {
        for mode in [TxMode::Sm, TxMode::Td] {
            assert_eq!(instantaneous_capacity(&Mat2::zero(), 10.0, mode), 0.0);
            let h = Mat2([[c64(0.3, 0.1), c64(0.2, 0.0)], [c64(0.0, 0.5), c64(1.0, 0.0)]]);
            assert_eq!(instantaneous_capacity(&h, 0.0, mode), 0.0);
        }
    }

    #[test]
    fn capacity_is_increasing_in_snr() {
        let h = Mat2([[c64(0.8, 0.3), c64(-0.2, 0.4)], [c64(0.1, -0.7), c64(0.5, 0.2)]]);
        for mode in [TxMode::Sm, TxMode::Td] {
            let mut prev = -1.0;
            for i in 0..40 {
                let rho = 10f64.powf(i as f64 / 10.0 - 1.0);
                let c = instantaneous_capacity(&h, rho, mode);
                assert!(c > prev, "{mode:?} not strictly increasing");
                prev = c;
            }
        }
    }

    fn cap_cfg(mode: TxMode, scenario: ScenarioKind, snr_db: f64) -> LinkConfig {
        LinkConfig {
            mode,
            scenario,
            snr_db,
            speed_kmh: 0.0,
            ..LinkConfig::default()
        }
    }

    #[test]
    fn rejects_tiny_sample_budgets() {
        let cfg = cap_cfg(TxMode::Sm, ScenarioKind::PoorScattering, 10.0);
        assert!(ergodic_capacity(&cfg, 99, Stream::root(1)).is_err());
    }

    #[test]
    fn uncorrelated_rayleigh_high_snr_slope() {
        // Multiplexing gain 2: between 20 and 30 dB the ergodic capacity
        // grows by about 2 bits per 3 dB (0.60..0.72 bits per dB).
        let mut cfg = cap_cfg(TxMode::Sm, ScenarioKind::PoorScattering, 20.0);
        cfg.alpha = Some(0.0);
        cfg.beta = Some(0.0);
        let (c20, _) = ergodic_capacity(&cfg, 20_000, Stream::root(2)).unwrap();
        cfg.snr_db = 30.0;
        let (c30, _) = ergodic_capacity(&cfg, 20_000, Stream::root(2)).unwrap();
        let slope = (c30 - c20) / 10.0;
        assert!(
            (0.60..=0.72).contains(&slope),
            "high-SNR slope {slope} bits/dB"
        );
    }

    #[test]
    fn full_correlation_costs_capacity() {
        // Rank-1 correlation collapses the second eigenmode; paired draws.
        let mut low = cap_cfg(TxMode::Sm, ScenarioKind::PoorScattering, 20.0);
        low.alpha = Some(0.0);
        low.beta = Some(0.0);
        let mut high = low.clone();
        high.alpha = Some(1.0);
        high.beta = Some(1.0);
        let (c_low, e1) = ergodic_capacity(&low, 20_000, Stream::root(3)).unwrap();
        let (c_high, e2) = ergodic_capacity(&high, 20_000, Stream::root(3)).unwrap();
        assert!(
            c_high + 5.0 * (e1 + e2) < c_low,
            "full correlation {c_high} should sit well below iid {c_low}"
        );
    }

    #[test]
    fn per_subcarrier_average_agrees_with_aggregate_mean() {
        // Both reductions see the same marginal distribution per draw for a
        // power-normalized profile, so the ergodic means coincide.
        for scenario in [ScenarioKind::PoorScattering, ScenarioKind::RichScattering] {
            let cfg = cap_cfg(TxMode::Sm, scenario, 15.0);
            let (agg, e1) =
                ergodic_capacity_with(&cfg, 8000, CapacityAveraging::Aggregate, Stream::root(8))
                    .unwrap();
            let (per, e2) = ergodic_capacity_with(
                &cfg,
                8000,
                CapacityAveraging::PerSubcarrier,
                Stream::root(9),
            )
            .unwrap();
            assert!(
                (agg - per).abs() < 4.0 * (e1 + e2),
                "{scenario:?}: aggregate {agg} vs per-subcarrier {per}"
            );
        }
    }

    #[test]
    fn sm_beats_td_at_high_snr_in_every_scenario() {
        for scenario in [ScenarioKind::PoorScattering, ScenarioKind::RichScattering] {
            let sm = cap_cfg(TxMode::Sm, scenario, 25.0);
            let td = cap_cfg(TxMode::Td, scenario, 25.0);
            let (c_sm, _) = ergodic_capacity(&sm, 10_000, Stream::root(4)).unwrap();
            let (c_td, _) = ergodic_capacity(&td, 10_000, Stream::root(4)).unwrap();
            assert!(c_sm > c_td, "{scenario:?}: SM {c_sm} vs TD {c_td}");
        }
    }
}
