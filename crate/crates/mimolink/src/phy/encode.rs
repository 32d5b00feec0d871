//! Layer mapping: spatial multiplexing splits the symbol stream across the
//! two transmit antennas; transmit diversity applies the Alamouti code across
//! adjacent subcarriers (space-frequency block coding). Both normalize to
//! unit total transmit power per subcarrier.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TxMode {
    /// Spatial multiplexing: independent streams per antenna.
    Sm,
    /// Transmit diversity via SFBC.
    Td,
}

impl TxMode {
    pub fn label(&self) -> &'static str {
        match self {
            TxMode::Sm => "sm",
            TxMode::Td => "td",
        }
    }

    /// Payload symbols carried per resource element.
    pub fn symbols_per_re(&self) -> usize {
        match self {
            TxMode::Sm => 2,
            TxMode::Td => 1,
        }
    }
}

impl std::str::FromStr for TxMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sm" => Ok(TxMode::Sm),
            "td" => Ok(TxMode::Td),
            other => Err(Error::Config(format!(
                "unknown mode '{other}' (expected 'sm' or 'td')"
            ))),
        }
    }
}

/// Per-layer transmit symbols, x[symbol][subcarrier] = [layer0, layer1].
#[derive(Debug, Clone)]
pub struct LayerGrid {
    pub x: Vec<Vec<[Complex64; 2]>>,
    pub mode: TxMode,
}

impl LayerGrid {
    pub fn n_symbols(&self) -> usize {
        self.x.len()
    }

    pub fn n_subcarriers(&self) -> usize {
        self.x.first().map_or(0, |row| row.len())
    }
}

/// Even-indexed symbols to layer 0, odd to layer 1, scaled by 1/sqrt(2).
pub fn sm_encode(symbols: &[Complex64], n_symbols: usize, n_subcarriers: usize) -> Result<LayerGrid> {
    let need = 2 * n_symbols * n_subcarriers;
    if symbols.len() != need {
        return Err(Error::Dimension(format!(
            "sm_encode needs {need} symbols for a {n_symbols}x{n_subcarriers} grid, got {}",
            symbols.len()
        )));
    }
    let g = FRAC_1_SQRT_2;
    let mut x = vec![vec![[Complex64::default(); 2]; n_subcarriers]; n_symbols];
    for s in 0..n_symbols {
        for k in 0..n_subcarriers {
            let base = 2 * (s * n_subcarriers + k);
            x[s][k] = [symbols[base] * g, symbols[base + 1] * g];
        }
    }
    Ok(LayerGrid { x, mode: TxMode::Sm })
}

/// Alamouti across each adjacent subcarrier pair: for input pair (s1, s2),
/// layer 0 carries (s1, s2)/sqrt(2) and layer 1 carries (-s2*, s1*)/sqrt(2).
pub fn sfbc_encode(symbols: &[Complex64], n_symbols: usize, n_subcarriers: usize) -> Result<LayerGrid> {
    if n_subcarriers % 2 != 0 {
        return Err(Error::Dimension(format!(
            "SFBC needs an even subcarrier count, got {n_subcarriers}"
        )));
    }
    let need = n_symbols * n_subcarriers;
    if symbols.len() != need {
        return Err(Error::Dimension(format!(
            "sfbc_encode needs {need} symbols for a {n_symbols}x{n_subcarriers} grid, got {}",
            symbols.len()
        )));
    }
    let g = FRAC_1_SQRT_2;
    let mut x = vec![vec![[Complex64::default(); 2]; n_subcarriers]; n_symbols];
    for s in 0..n_symbols {
        for pair in 0..n_subcarriers / 2 {
            let s1 = symbols[s * n_subcarriers + 2 * pair];
            let s2 = symbols[s * n_subcarriers + 2 * pair + 1];
            x[s][2 * pair] = [s1 * g, -s2.conj() * g];
            x[s][2 * pair + 1] = [s2 * g, s1.conj() * g];
        }
    }
    Ok(LayerGrid { x, mode: TxMode::Td })
}
