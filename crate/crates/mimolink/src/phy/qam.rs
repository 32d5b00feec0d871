//! Gray-mapped 16-QAM with unit mean symbol energy.
//!
//! Bits b0 b1 b2 b3 map to (I, Q): b0 b1 select I from {+1, +3, -1, -3}/sqrt(10)
//! in that order (Gray over the amplitude axis), b2 b3 likewise select Q.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Amplitude levels indexed by the two selector bits.
const LEVELS: [f64; 4] = [1.0, 3.0, -1.0, -3.0];

fn norm() -> f64 {
    10.0f64.sqrt()
}

pub fn qam16_map(bits: &[u8]) -> Result<Vec<Complex64>> {
    if bits.len() % 4 != 0 {
        return Err(Error::InvalidParameter(format!(
            "bit count {} is not a multiple of 4",
            bits.len()
        )));
    }
    let s = norm();
    Ok(bits
        .chunks_exact(4)
        .map(|b| {
            let i = LEVELS[(b[0] * 2 + b[1]) as usize] / s;
            let q = LEVELS[(b[2] * 2 + b[3]) as usize] / s;
            Complex64::new(i, q)
        })
        .collect())
}

/// Hard minimum-distance slicing of one axis. Ties fall to the smaller level:
/// exactly between -3 and -1 decides -3, between -1 and +1 decides -1,
/// between +1 and +3 decides +1.
fn slice_axis(x: f64) -> (f64, [u8; 2]) {
    let k = 1.0 / norm();
    if x <= -2.0 * k {
        (-3.0 * k, [1, 1])
    } else if x <= 0.0 {
        (-k, [1, 0])
    } else if x <= 2.0 * k {
        (k, [0, 0])
    } else {
        (3.0 * k, [0, 1])
    }
}

pub fn qam16_demap(symbols: &[Complex64]) -> Vec<u8> {
    let mut bits = Vec::with_capacity(symbols.len() * 4);
    for s in symbols {
        let (_, bi) = slice_axis(s.re);
        let (_, bq) = slice_axis(s.im);
        bits.extend_from_slice(&bi);
        bits.extend_from_slice(&bq);
    }
    bits
}

/// Nearest constellation point (same tie rule as the demapper).
pub fn qam16_slice(s: Complex64) -> Complex64 {
    Complex64::new(slice_axis(s.re).0, slice_axis(s.im).0)
}
