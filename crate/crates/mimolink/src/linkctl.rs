//! Subframe loop with transport-block allocation, retransmission-only HARQ,
//! and the averaged throughput fraction: delivered payload bits over offered
//! bits, gated by the per-subframe CRC outcome.

use crate::corrchan::{
    freq_response, generate_channel, ChannelGrid, CorrelationSpec, DopplerSpec, FadingSpec,
    LosPowerMode, MultipathProfile, ScenarioKind, scenario_profile,
};
use crate::error::{Error, Result};
use crate::phy::{
    apply_channel, crc24_attach, crc24_check, noise_variance, qam16_demap, qam16_map,
    sfbc_decode, sfbc_encode, sm_detect, sm_encode, DetectorKind, TxMode,
};
use crate::rng::Stream;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Resource grid dimensions. The desk-scale default is 72 subcarriers by 14
/// symbols per 1 ms subframe at 15 kHz spacing; the full 10 MHz grid (600
/// subcarriers) is available through config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridDims {
    pub n_subcarriers: usize,
    pub n_symbols: usize,
    pub subcarrier_spacing_hz: f64,
    pub subframe_period_s: f64,
}

impl Default for GridDims {
    fn default() -> Self {
        GridDims {
            n_subcarriers: 72,
            n_symbols: 14,
            subcarrier_spacing_hz: 15e3,
            subframe_period_s: 1e-3,
        }
    }
}

impl GridDims {
    pub fn symbol_period_s(&self) -> f64 {
        self.subframe_period_s / self.n_symbols as f64
    }
}

/// Which channel snapshot the detector sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CsiPolicy {
    /// Genie CSI sampled at OFDM symbol 0 while the channel keeps evolving.
    SubframeStart,
    /// Genie CSI per symbol.
    Perfect,
}

impl CsiPolicy {
    pub fn label(&self) -> &'static str {
        match self {
            CsiPolicy::SubframeStart => "subframe_start",
            CsiPolicy::Perfect => "perfect",
        }
    }
}

impl std::str::FromStr for CsiPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subframe_start" => Ok(CsiPolicy::SubframeStart),
            "perfect" => Ok(CsiPolicy::Perfect),
            other => Err(Error::Config(format!(
                "unknown csi policy '{other}' (expected 'subframe_start' or 'perfect')"
            ))),
        }
    }
}

/// Retransmission-only HARQ (no soft combining): a failed transport block is
/// retransmitted with fresh channel and noise up to `max_retransmissions`
/// times, then dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarqConfig {
    pub enabled: bool,
    pub max_retransmissions: u32,
}

impl Default for HarqConfig {
    fn default() -> Self {
        HarqConfig {
            enabled: true,
            max_retransmissions: 3,
        }
    }
}

/// Scenario correlation presets; richer scattering decorrelates the antennas.
pub fn scenario_correlation(scenario: ScenarioKind) -> (f64, f64) {
    match scenario {
        ScenarioKind::PoorScattering => (0.85, 0.85),
        ScenarioKind::RichScattering => (0.50, 0.50),
    }
}

pub const DEFAULT_CARRIER_HZ: f64 = 2e9;

/// Everything one grid point of the study needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkConfig {
    pub mode: TxMode,
    pub detector: DetectorKind,
    pub snr_db: f64,
    pub scenario: ScenarioKind,
    /// Linear Rician K; 0 means Rayleigh.
    pub k_factor: f64,
    pub los_mode: LosPowerMode,
    pub speed_kmh: f64,
    /// Real correlation overrides; None takes the scenario preset.
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub grid: GridDims,
    pub carrier_hz: f64,
    pub csi: CsiPolicy,
    pub harq: HarqConfig,
    pub seed: u64,
}

impl Default for LinkConfig {
    fn default() -> Self {
        LinkConfig {
            mode: TxMode::Sm,
            detector: DetectorKind::Mmse,
            snr_db: 10.0,
            scenario: ScenarioKind::PoorScattering,
            k_factor: 0.0,
            los_mode: LosPowerMode::Additive,
            speed_kmh: 3.0,
            alpha: None,
            beta: None,
            grid: GridDims::default(),
            carrier_hz: DEFAULT_CARRIER_HZ,
            csi: CsiPolicy::SubframeStart,
            harq: HarqConfig::default(),
            seed: 0,
        }
    }
}

impl LinkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_factor < 0.0 || !self.k_factor.is_finite() {
            return Err(Error::Config(format!(
                "k_factor must satisfy k_factor >= 0, got {}",
                self.k_factor
            )));
        }
        if self.speed_kmh < 0.0 || !self.speed_kmh.is_finite() {
            return Err(Error::Config(format!(
                "speed_kmh must satisfy speed_kmh >= 0, got {}",
                self.speed_kmh
            )));
        }
        if self.snr_db.is_nan() || (self.snr_db.is_infinite() && self.snr_db < 0.0) {
            return Err(Error::Config("snr_db must be finite or +inf".into()));
        }
        if self.grid.n_subcarriers < 2 || self.grid.n_subcarriers % 2 != 0 {
            return Err(Error::Config(format!(
                "n_subcarriers must be even and >= 2, got {}",
                self.grid.n_subcarriers
            )));
        }
        if self.grid.n_symbols == 0 {
            return Err(Error::Config("n_symbols must be >= 1".into()));
        }
        if self.grid.subcarrier_spacing_hz <= 0.0 || self.grid.subframe_period_s <= 0.0 {
            return Err(Error::Config(
                "subcarrier spacing and subframe period must be > 0".into(),
            ));
        }
        if self.carrier_hz <= 0.0 {
            return Err(Error::Config("carrier_hz must be > 0".into()));
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if let Some(v) = v {
                if !(-1.0..=1.0).contains(&v) {
                    return Err(Error::Config(format!(
                        "{name} must lie in [-1, 1], got {v}"
                    )));
                }
            }
        }
        tbs_for_grid(&self.grid, self.mode)?;
        Ok(())
    }

    pub fn correlation_spec(&self) -> CorrelationSpec {
        let preset = scenario_correlation(self.scenario);
        CorrelationSpec::real(
            self.alpha.unwrap_or(preset.0),
            self.beta.unwrap_or(preset.1),
        )
        .expect("validated")
    }

    pub fn fading_spec(&self) -> FadingSpec {
        FadingSpec::new(self.k_factor, self.los_mode).expect("validated")
    }

    pub fn doppler_spec(&self) -> DopplerSpec {
        DopplerSpec::from_kmh(self.speed_kmh, self.carrier_hz).expect("validated")
    }

    pub fn profile(&self) -> MultipathProfile {
        scenario_profile(self.scenario)
    }

    /// One subframe's evolving channel, sampled at the OFDM symbol rate.
    pub fn subframe_channel(&self, stream: Stream) -> Result<ChannelGrid> {
        let series = generate_channel(
            &self.profile(),
            &self.fading_spec(),
            &self.correlation_spec(),
            &self.doppler_spec(),
            self.grid.n_symbols,
            self.grid.symbol_period_s(),
            stream,
        )?;
        freq_response(
            &series,
            self.grid.n_symbols,
            self.grid.n_subcarriers,
            self.grid.subcarrier_spacing_hz,
            self.grid.symbol_period_s(),
        )
    }
}

/// Payload bits that fill the grid at 4 bits per symbol, minus the 24 CRC
/// parity bits. SFBC carries one payload symbol per resource element, SM two.
pub fn tbs_for_grid(dims: &GridDims, mode: TxMode) -> Result<usize> {
    let res = dims.n_symbols * dims.n_subcarriers * mode.symbols_per_re();
    let bits = res * 4;
    if bits <= 24 {
        return Err(Error::InvalidParameter(format!(
            "grid of {res} symbols cannot fit a payload beyond the 24 CRC bits"
        )));
    }
    Ok(bits - 24)
}

/// One transport block's payload. 16-QAM alignment requires the payload
/// plus 24 CRC parity bits to split into whole symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportBlock {
    payload_bits: Vec<u8>,
}

impl TransportBlock {
    pub fn new(payload_bits: Vec<u8>) -> Result<Self> {
        if payload_bits.is_empty() {
            return Err(Error::InvalidParameter("transport block cannot be empty".into()));
        }
        if (payload_bits.len() + 24) % 4 != 0 {
            return Err(Error::InvalidParameter(format!(
                "tbs {} + 24 parity bits is not 16-QAM aligned",
                payload_bits.len()
            )));
        }
        if payload_bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidParameter("payload bits must be 0 or 1".into()));
        }
        Ok(TransportBlock { payload_bits })
    }

    pub fn random(tbs: usize, stream: Stream) -> Result<Self> {
        Self::new(random_bits(tbs, stream))
    }

    pub fn tbs(&self) -> usize {
        self.payload_bits.len()
    }

    pub fn payload(&self) -> &[u8] {
        &self.payload_bits
    }
}

/// What happened in one subframe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubframeReport {
    pub index: usize,
    /// Offered transport-block bits; 0 means no allocation this subframe.
    pub tbs: usize,
    pub crc_pass: bool,
    /// 1 for a first transmission, counting up per HARQ retransmission.
    pub harq_attempt: u32,
}

/// Aggregate over a subframe window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThroughputStats {
    pub delivered_bits: u64,
    pub offered_bits: u64,
    pub throughput_fraction: f64,
    pub n_subframes: usize,
    pub subframe_start: usize,
    pub subframe_stop: usize,
}

fn random_bits(n: usize, stream: Stream) -> Vec<u8> {
    let mut rng = stream.rng();
    (0..n).map(|_| rng.gen_range(0..=1u8)).collect()
}

/// End-to-end pipeline for one subframe with a given payload. Returns the
/// CRC verdict; detector erasures fail the block outright.
fn subframe_once(
    cfg: &LinkConfig,
    channel: &ChannelGrid,
    payload: &[u8],
    noise_stream: Stream,
) -> Result<bool> {
    let coded = crc24_attach(payload)?;
    let symbols = qam16_map(&coded)?;
    let (s, k) = (cfg.grid.n_symbols, cfg.grid.n_subcarriers);
    let tx = match cfg.mode {
        TxMode::Sm => sm_encode(&symbols, s, k)?,
        TxMode::Td => sfbc_encode(&symbols, s, k)?,
    };
    let rx = apply_channel(&tx, channel, cfg.snr_db, noise_stream)?;
    let csi = match cfg.csi {
        CsiPolicy::Perfect => channel.clone(),
        CsiPolicy::SubframeStart => channel.held_at_first_symbol(),
    };
    let detected = match cfg.mode {
        TxMode::Sm => sm_detect(&rx, &csi, cfg.detector, noise_variance(cfg.snr_db))?,
        TxMode::Td => sfbc_decode(&rx, &csi)?,
    };
    if detected.erasures > 0 {
        return Ok(false);
    }
    let bits = qam16_demap(&detected.symbols);
    crc24_check(&bits)
}

/// Runs one subframe with a fresh random payload.
pub fn run_subframe(
    cfg: &LinkConfig,
    channel: &ChannelGrid,
    stream: Stream,
) -> Result<SubframeReport> {
    let tbs = tbs_for_grid(&cfg.grid, cfg.mode)?;
    let tb = TransportBlock::random(tbs, stream.child(2))?;
    let crc_pass = subframe_once(cfg, channel, tb.payload(), stream.child(1))?;
    Ok(SubframeReport {
        index: 0,
        tbs,
        crc_pass,
        harq_attempt: 1,
    })
}

/// Runs the subframe window. Every subframe consumes one allocation; a CRC
/// failure keeps the same payload alive for retransmission (fresh channel
/// and noise) until it succeeds or exhausts `1 + max_retransmissions`
/// attempts. Delivered bits count each transport block once, on success.
pub fn harq_run(
    cfg: &LinkConfig,
    n_subframes: usize,
    stream: Stream,
) -> Result<(ThroughputStats, Vec<SubframeReport>)> {
    if n_subframes == 0 {
        return Err(Error::InvalidParameter("need at least one subframe".into()));
    }
    let tbs = tbs_for_grid(&cfg.grid, cfg.mode)?;
    let mut reports = Vec::with_capacity(n_subframes);
    let mut pending: Option<(TransportBlock, u32)> = None;
    for sf in 0..n_subframes {
        let sfs = stream.child(sf as u64);
        let channel = cfg.subframe_channel(sfs.child(0))?;
        let (tb, attempt) = match pending.take() {
            Some((p, a)) => (p, a),
            None => (TransportBlock::random(tbs, sfs.child(2))?, 1),
        };
        let crc_pass = subframe_once(cfg, &channel, tb.payload(), sfs.child(1))?;
        reports.push(SubframeReport {
            index: sf,
            tbs,
            crc_pass,
            harq_attempt: attempt,
        });
        if !crc_pass && cfg.harq.enabled && attempt <= cfg.harq.max_retransmissions {
            pending = Some((tb, attempt + 1));
        }
    }
    let fraction = throughput_fraction(&reports)?;
    let delivered: u64 = reports
        .iter()
        .filter(|r| r.tbs > 0 && r.crc_pass)
        .map(|r| r.tbs as u64)
        .sum();
    let offered: u64 = reports.iter().map(|r| r.tbs as u64).sum();
    Ok((
        ThroughputStats {
            delivered_bits: delivered,
            offered_bits: offered,
            throughput_fraction: fraction,
            n_subframes,
            subframe_start: 0,
            subframe_stop: n_subframes - 1,
        },
        reports,
    ))
}

/// Delivered over offered bits across the report list. Zero-allocation
/// subframes are excluded; a window with no allocation at all has no
/// defined average. With retransmission-only HARQ a passing subframe is
/// always a block's first success, so passes count delivered bits directly.
pub fn throughput_fraction(reports: &[SubframeReport]) -> Result<f64> {
    let offered: u64 = reports.iter().map(|r| r.tbs as u64).sum();
    if offered == 0 {
        return Err(Error::UndefinedAverage);
    }
    let delivered: u64 = reports
        .iter()
        .filter(|r| r.tbs > 0 && r.crc_pass)
        .map(|r| r.tbs as u64)
        .sum();
    Ok(delivered as f64 / offered as f64)
}
