//! Experiment harness: figure presets, parameter grids, deterministic
//! Monte Carlo orchestration over a worker pool, and CSV emission.

use crate::capacity::{ergodic_capacity_with, CapacityAveraging};
use crate::corrchan::ScenarioKind;
use crate::error::{Error, Result};
use crate::linkctl::{harq_run, LinkConfig};
use crate::phy::{DetectorKind, TxMode};
use crate::rng::Stream;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};

/// One swept parameter and its values, in grid order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisValues {
    SnrDb(Vec<f64>),
    KFactor(Vec<f64>),
    SpeedKmh(Vec<f64>),
    Scenario(Vec<ScenarioKind>),
    Mode(Vec<TxMode>),
    Detector(Vec<DetectorKind>),
}

impl AxisValues {
    pub fn len(&self) -> usize {
        match self {
            AxisValues::SnrDb(v) | AxisValues::KFactor(v) | AxisValues::SpeedKmh(v) => v.len(),
            AxisValues::Scenario(v) => v.len(),
            AxisValues::Mode(v) => v.len(),
            AxisValues::Detector(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn apply(&self, idx: usize, cfg: &mut LinkConfig) {
        match self {
            AxisValues::SnrDb(v) => cfg.snr_db = v[idx],
            AxisValues::KFactor(v) => cfg.k_factor = v[idx],
            AxisValues::SpeedKmh(v) => cfg.speed_kmh = v[idx],
            AxisValues::Scenario(v) => cfg.scenario = v[idx],
            AxisValues::Mode(v) => cfg.mode = v[idx],
            AxisValues::Detector(v) => cfg.detector = v[idx],
        }
    }
}

/// A parameter grid over a base configuration plus the Monte Carlo budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Preset name, or "custom".
    pub preset: String,
    pub base: LinkConfig,
    /// Cartesian product, row-major in axis order.
    pub axes: Vec<AxisValues>,
    /// Independent trials per grid point.
    pub trials: usize,
    /// Subframes per trial.
    pub subframes: usize,
    /// Channel draws for the ergodic capacity estimate.
    pub capacity_samples: usize,
    /// Reduction per capacity draw; both choices share the same mean.
    #[serde(default)]
    pub capacity_averaging: CapacityAveraging,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() {
            return Err(Error::Config("a sweep needs at least one axis".into()));
        }
        if self.axes.iter().any(|a| a.is_empty()) {
            return Err(Error::Config("every axis needs at least one value".into()));
        }
        if self.trials == 0 || self.subframes == 0 {
            return Err(Error::Config("trials and subframes must be >= 1".into()));
        }
        if self.capacity_samples < 100 {
            return Err(Error::Config(
                "capacity_samples must be >= 100 for a meaningful standard error".into(),
            ));
        }
        self.base.validate()?;
        for p in 0..self.n_points() {
            self.point_config(p).validate()?;
        }
        Ok(())
    }

    pub fn n_points(&self) -> usize {
        self.axes.iter().map(|a| a.len()).product()
    }

    /// Configuration at grid point `p` (row-major over the axes).
    pub fn point_config(&self, p: usize) -> LinkConfig {
        let mut cfg = self.base.clone();
        let mut rem = p;
        for axis in self.axes.iter().rev() {
            let idx = rem % axis.len();
            rem /= axis.len();
            axis.apply(idx, &mut cfg);
        }
        cfg
    }
}

/// One CSV row: the resolved point parameters plus both metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub preset: String,
    pub mode: TxMode,
    pub detector: DetectorKind,
    pub scenario: ScenarioKind,
    pub snr_db: f64,
    pub k_factor: f64,
    pub los_mode: String,
    pub speed_kmh: f64,
    pub csi: String,
    pub trials: usize,
    pub subframes: usize,
    /// Derived per-point seed; rerunning this point alone reproduces it.
    pub seed: u64,
    pub throughput_fraction: f64,
    pub capacity_mean: f64,
    pub capacity_stderr: f64,
}

pub const CSV_HEADER: &str = "preset,mode,detector,scenario,snr_db,k_factor,los_mode,speed_kmh,csi,trials,subframes,seed,throughput_fraction,capacity_mean,capacity_stderr";

fn eval_point(spec: &SweepSpec, p: usize) -> Result<SweepRow> {
    let cfg = spec.point_config(p);
    let point = Stream::root(spec.base.seed).child(p as u64);
    let throughput = point.child(0);
    let mut delivered = 0u64;
    let mut offered = 0u64;
    for trial in 0..spec.trials {
        let (stats, _) = harq_run(&cfg, spec.subframes, throughput.child(trial as u64))?;
        delivered += stats.delivered_bits;
        offered += stats.offered_bits;
    }
    let (cap_mean, cap_stderr) = ergodic_capacity_with(
        &cfg,
        spec.capacity_samples,
        spec.capacity_averaging,
        point.child(1),
    )?;
    Ok(SweepRow {
        preset: spec.preset.clone(),
        mode: cfg.mode,
        detector: cfg.detector,
        scenario: cfg.scenario,
        snr_db: cfg.snr_db,
        k_factor: cfg.k_factor,
        los_mode: cfg.los_mode.label().to_string(),
        speed_kmh: cfg.speed_kmh,
        csi: cfg.csi.label().to_string(),
        trials: spec.trials,
        subframes: spec.subframes,
        seed: point.state(),
        throughput_fraction: delivered as f64 / offered as f64,
        capacity_mean: cap_mean,
        capacity_stderr: cap_stderr,
    })
}

/// Evaluates the whole grid on a bounded worker pool. Rows come back in grid
/// order and are bitwise independent of the worker count; progress goes to
/// standard error.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let total = spec.n_points();
    let done = AtomicUsize::new(0);
    let eval = |p: usize| -> Result<SweepRow> {
        let row = eval_point(spec, p).map_err(|e| {
            Error::InvalidParameter(format!("sweep point {p} of {total} failed: {e}"))
        })?;
        let n = done.fetch_add(1, Ordering::Relaxed) + 1;
        eprintln!("[sweep {}] point {n}/{total} done", spec.preset);
        Ok(row)
    };
    let results: Vec<Result<SweepRow>> = if workers == 1 {
        (0..total).map(eval).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
        pool.install(|| (0..total).into_par_iter().map(eval).collect())
    };
    results.into_iter().collect()
}

fn fmt_metric(v: f64) -> String {
    format!("{v:.6}")
}

pub fn csv_line(row: &SweepRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        row.preset,
        row.mode.label(),
        row.detector.label(),
        row.scenario.label(),
        row.snr_db,
        row.k_factor,
        row.los_mode,
        row.speed_kmh,
        row.csi,
        row.trials,
        row.subframes,
        row.seed,
        fmt_metric(row.throughput_fraction),
        fmt_metric(row.capacity_mean),
        fmt_metric(row.capacity_stderr),
    )
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(w, "{}", csv_line(row))?;
    }
    Ok(())
}

fn snr_axis(max_db: f64) -> Vec<f64> {
    let mut v = Vec::new();
    let mut s = 0.0;
    while s <= max_db + 1e-9 {
        v.push(s);
        s += 2.0;
    }
    v
}

fn k_axis() -> Vec<f64> {
    (0..=12).map(|i| i as f64 * 0.5).collect()
}

const THROUGHPUT_SNR_MAX_DB: f64 = 48.0;
const CAPACITY_SNR_MAX_DB: f64 = 30.0;

pub const PRESET_NAMES: [&str; 10] = [
    "fig2_1", "fig2_2", "fig2_3", "fig2_4", "fig2_5", "fig2_6", "fig3_1", "fig3_2", "fig4_1",
    "fig4_2",
];

pub fn preset_description(name: &str) -> &'static str {
    match name {
        "fig2_1" => "SM throughput fraction vs SNR, Rayleigh, poor and rich scattering",
        "fig2_2" => "SM throughput fraction vs SNR, Rician K=6, poor and rich scattering",
        "fig2_3" => "SM throughput fraction vs K factor at 14 dB, poor scattering",
        "fig2_4" => "TD throughput fraction vs SNR, Rayleigh, poor and rich scattering",
        "fig2_5" => "TD throughput fraction vs SNR, Rician K=6, poor and rich scattering",
        "fig2_6" => "TD throughput fraction vs K factor at 7 dB, poor scattering",
        "fig3_1" => "SM throughput fraction vs SNR at 3/20/40/60 km/h, poor scattering",
        "fig3_2" => "TD throughput fraction vs SNR at 3/20/40/60 km/h, poor scattering",
        "fig4_1" => "SM ergodic capacity vs SNR, scenarios x K in {0, 6}",
        "fig4_2" => "TD ergodic capacity vs SNR, scenarios x K in {0, 6}",
        _ => "",
    }
}

/// The sweep grid behind each study figure. Mobility figures keep the
/// default stale-CSI policy and sweep speed; the static figures pin the
/// terminal at 0 km/h.
pub fn figure_preset(name: &str) -> Result<SweepSpec> {
    let throughput_budget = (200usize, 50usize);
    let capacity_budget = (50usize, 20usize);
    let mut base = LinkConfig {
        speed_kmh: 0.0,
        ..LinkConfig::default()
    };
    let (mode, axes, trials, subframes) = match name {
        "fig2_1" | "fig2_2" | "fig2_4" | "fig2_5" => {
            base.k_factor = if name.ends_with('2') || name.ends_with('5') {
                6.0
            } else {
                0.0
            };
            let mode = if name == "fig2_1" || name == "fig2_2" {
                TxMode::Sm
            } else {
                TxMode::Td
            };
            (
                mode,
                vec![
                    AxisValues::Scenario(vec![
                        ScenarioKind::PoorScattering,
                        ScenarioKind::RichScattering,
                    ]),
                    AxisValues::SnrDb(snr_axis(THROUGHPUT_SNR_MAX_DB)),
                ],
                throughput_budget.0,
                throughput_budget.1,
            )
        }
        "fig2_3" => {
            base.snr_db = 14.0;
            (
                TxMode::Sm,
                vec![AxisValues::KFactor(k_axis())],
                throughput_budget.0,
                throughput_budget.1,
            )
        }
        "fig2_6" => {
            base.snr_db = 7.0;
            (
                TxMode::Td,
                vec![AxisValues::KFactor(k_axis())],
                throughput_budget.0,
                throughput_budget.1,
            )
        }
        "fig3_1" | "fig3_2" => (
            if name == "fig3_1" { TxMode::Sm } else { TxMode::Td },
            vec![
                AxisValues::SpeedKmh(vec![3.0, 20.0, 40.0, 60.0]),
                AxisValues::SnrDb(snr_axis(THROUGHPUT_SNR_MAX_DB)),
            ],
            throughput_budget.0,
            throughput_budget.1,
        ),
        "fig4_1" | "fig4_2" => (
            if name == "fig4_1" { TxMode::Sm } else { TxMode::Td },
            vec![
                AxisValues::Scenario(vec![
                    ScenarioKind::PoorScattering,
                    ScenarioKind::RichScattering,
                ]),
                AxisValues::KFactor(vec![0.0, 6.0]),
                AxisValues::SnrDb(snr_axis(CAPACITY_SNR_MAX_DB)),
            ],
            capacity_budget.0,
            capacity_budget.1,
        ),
        other => {
            return Err(Error::UnknownPreset(
                other.to_string(),
                PRESET_NAMES.join(", "),
            ))
        }
    };
    base.mode = mode;
    Ok(SweepSpec {
        preset: name.to_string(),
        base,
        axes,
        trials,
        subframes,
        capacity_samples: 10_000,
        capacity_averaging: CapacityAveraging::default(),
    })
}
