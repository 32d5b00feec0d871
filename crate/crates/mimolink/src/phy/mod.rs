//! Transmit and receive processing for one subframe: CRC, 16-QAM, layer
//! mapping or SFBC, channel application with noise, and detection back to
//! bits.

pub mod crc;
pub mod detect;
pub mod encode;
pub mod qam;
pub mod txrx;

pub use crc::{crc24_attach, crc24_check};
pub use detect::{sfbc_decode, sm_detect, Detected, DetectorKind};
pub use encode::{sfbc_encode, sm_encode, LayerGrid, TxMode};
pub use qam::{qam16_demap, qam16_map, qam16_slice};
pub use txrx::{apply_channel, noise_variance, RxGrid};
