//! Spatially correlated, Doppler-faded, Rayleigh/Rician multipath channel
//! generation and its per-subcarrier frequency response.

pub mod channel;
pub mod correlation;
pub mod doppler;
pub mod profile;
pub mod stats;

pub use channel::{
    freq_response, generate_channel, ChannelGrid, FadingKind, FadingSpec, LosPowerMode,
    TapGainSeries,
};
pub use correlation::{
    correlation_root, kronecker_correlation, CorrelationSpec, SpatialCorrelation,
};
pub use doppler::{fading_process, DopplerSpec, FadingProcess, NUM_SINUSOIDS, SPEED_OF_LIGHT};
pub use profile::{scenario_profile, MultipathProfile, ScenarioKind, TapProfile};
pub use stats::{estimate_statistics, ChannelStats, CorrelationAccumulator, MEANINGFUL_SAMPLES};
