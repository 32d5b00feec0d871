//! Self-validation estimators over generated tap-gain data: sample spatial
//! correlation, per-tap power, moment-method K, and the empirical Doppler
//! autocorrelation. Consumed by the `validate` subcommand and the test suite.

use crate::corrchan::channel::TapGainSeries;
use crate::linalg::{c64, Mat2, Mat4};
use num_complex::Complex64;

/// Minimum sample count for the estimates to mean much.
pub const MEANINGFUL_SAMPLES: usize = 10_000;

#[derive(Debug, Clone)]
pub struct ChannelStats {
    /// Sample correlation of vec(H), pooled over taps and time, normalized
    /// to unit diagonal.
    pub spatial_correlation: Mat4,
    /// Mean per-entry power of each tap (matches the tap's power fraction).
    pub tap_mean_power: Vec<f64>,
    /// Moment-method K estimate per tap: |sample mean|^2 / sample variance,
    /// pooled over the four matrix entries.
    pub k_estimates: Vec<f64>,
    /// Real part of the normalized autocorrelation, lag 0..=max_lag, pooled
    /// over taps and entries.
    pub doppler_autocorr: Vec<f64>,
    pub n_samples: usize,
    /// Set when the series is too short for trustworthy estimates.
    pub low_sample_warning: bool,
}

/// Accumulates vec(H) outer products into a unit-diagonal sample correlation.
#[derive(Debug, Clone)]
pub struct CorrelationAccumulator {
    m: Mat4,
    n: usize,
}

impl CorrelationAccumulator {
    pub fn new() -> Self {
        CorrelationAccumulator {
            m: Mat4::zero(),
            n: 0,
        }
    }

    pub fn push(&mut self, h: &Mat2) {
        let v = h.vec4();
        for i in 0..4 {
            for j in 0..4 {
                self.m.0[i][j] += v[i] * v[j].conj();
            }
        }
        self.n += 1;
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// D^{-1/2} M D^{-1/2}; exact unit diagonal regardless of tap weighting.
    pub fn finish(&self) -> Mat4 {
        let mut out = Mat4::zero();
        let d: Vec<f64> = (0..4).map(|i| self.m.0[i][i].re.max(1e-300)).collect();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = self.m.0[i][j] / c64((d[i] * d[j]).sqrt(), 0.0);
            }
        }
        out
    }
}

impl Default for CorrelationAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

pub fn estimate_statistics(s: &TapGainSeries) -> ChannelStats {
    let n = s.n_samples();
    let n_taps = s.n_taps();

    let mut corr = CorrelationAccumulator::new();
    for tap in &s.gains {
        for h in tap {
            corr.push(h);
        }
    }

    let tap_mean_power: Vec<f64> = s
        .gains
        .iter()
        .map(|tap| tap.iter().map(|h| h.frob_sq() / 4.0).sum::<f64>() / n as f64)
        .collect();

    let k_estimates: Vec<f64> = s
        .gains
        .iter()
        .map(|tap| {
            let mut mu = [Complex64::default(); 4];
            for h in tap {
                let v = h.vec4();
                for e in 0..4 {
                    mu[e] += v[e];
                }
            }
            for m in mu.iter_mut() {
                *m /= n as f64;
            }
            let mut var = 0.0;
            for h in tap {
                let v = h.vec4();
                for e in 0..4 {
                    var += (v[e] - mu[e]).norm_sqr();
                }
            }
            let num: f64 = mu.iter().map(|m| m.norm_sqr()).sum();
            num / (var / n as f64).max(1e-300)
        })
        .collect();

    let max_lag = (n / 2).min(1024);
    let mut doppler_autocorr = Vec::with_capacity(max_lag + 1);
    let power: f64 = s
        .gains
        .iter()
        .flat_map(|tap| tap.iter().map(|h| h.frob_sq()))
        .sum::<f64>()
        / (n * n_taps) as f64;
    for lag in 0..=max_lag {
        let mut acc = Complex64::default();
        let mut cnt = 0usize;
        for tap in &s.gains {
            for t in 0..(n - lag) {
                for i in 0..2 {
                    for j in 0..2 {
                        acc += tap[t + lag].0[i][j] * tap[t].0[i][j].conj();
                    }
                }
                cnt += 1;
            }
        }
        doppler_autocorr.push(acc.re / cnt as f64 / power);
    }

    ChannelStats {
        spatial_correlation: corr.finish(),
        tap_mean_power,
        k_estimates,
        doppler_autocorr,
        n_samples: n,
        low_sample_warning: n < MEANINGFUL_SAMPLES,
    }
}

impl TapGainSeries {
    pub fn stats(&self) -> ChannelStats {
        estimate_statistics(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corrchan::channel::{generate_channel, FadingSpec};
    use crate::corrchan::correlation::{kronecker_correlation, CorrelationSpec};
    use crate::corrchan::doppler::DopplerSpec;
    use crate::corrchan::profile::{scenario_profile, ScenarioKind};
    use crate::rng::Stream;

    #[test]
    fn constant_series_has_flat_autocorrelation() {
        let s = generate_channel(
            &scenario_profile(ScenarioKind::PoorScattering),
            &FadingSpec::rayleigh(),
            &CorrelationSpec::uncorrelated(),
            &DopplerSpec::from_kmh(0.0, 2e9).unwrap(),
            64,
            1e-4,
            Stream::root(1),
        )
        .unwrap();
        let stats = s.stats();
        assert!(stats.low_sample_warning);
        for rho in &stats.doppler_autocorr {
            assert!((rho - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn sample_correlation_converges_to_target() {
        // Pool taps from independent single-sample draws; 1e5 vec samples.
        let profile = scenario_profile(ScenarioKind::PoorScattering);
        let corr = CorrelationSpec::real(0.7, 0.7).unwrap();
        let target = kronecker_correlation(&corr).unwrap().r;
        let mut acc = CorrelationAccumulator::new();
        let draws = 25_000;
        for i in 0..draws {
            let s = generate_channel(
                &profile,
                &FadingSpec::rayleigh(),
                &corr,
                &DopplerSpec::from_kmh(0.0, 2e9).unwrap(),
                1,
                1e-4,
                Stream::root(55).child(i as u64),
            )
            .unwrap();
            for tap in &s.gains {
                acc.push(&tap[0]);
            }
        }
        assert!(acc.len() >= 100_000);
        let dist = acc.finish().frob_dist(&target);
        assert!(dist < 0.05, "Frobenius distance {dist}");
    }

    #[test]
    fn rayleigh_k_estimate_is_small() {
        let s = generate_channel(
            &scenario_profile(ScenarioKind::PoorScattering),
            &FadingSpec::rayleigh(),
            &CorrelationSpec::uncorrelated(),
            &DopplerSpec::from_kmh(120.0, 2e9).unwrap(),
            20_000,
            1e-4,
            Stream::root(21),
        )
        .unwrap();
        let stats = s.stats();
        assert!(!stats.low_sample_warning);
        for k in &stats.k_estimates {
            assert!(*k < 0.2, "K estimate {k} should be near zero");
        }
        // Time samples are Doppler-correlated, so the per-tap power
        // estimate carries a few percent of noise; this is a sanity bound.
        for (est, tap) in stats
            .tap_mean_power
            .iter()
            .zip(scenario_profile(ScenarioKind::PoorScattering).taps.iter())
        {
            assert!(
                (est - tap.power).abs() < (0.3 * tap.power).max(0.03),
                "tap power estimate {est} vs {}",
                tap.power
            );
        }
    }
}
