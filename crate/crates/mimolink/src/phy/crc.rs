//! CRC-24A error detection (generator 0x1864CFB, zero initial register).
//! Bits are u8 values 0/1, most significant first.

use crate::error::{Error, Result};

const POLY_TAIL: u32 = 0x86_4CFB; // generator with the leading x^24 dropped
const MASK24: u32 = 0xFF_FFFF;

fn remainder(bits: &[u8]) -> u32 {
    let mut reg: u32 = 0;
    for &b in bits {
        let top = (reg >> 23) & 1;
        reg = (reg << 1) & MASK24;
        if top ^ u32::from(b) == 1 {
            reg ^= POLY_TAIL;
        }
    }
    reg
}

/// Appends 24 parity bits so that `crc24_check` accepts the result.
pub fn crc24_attach(bits: &[u8]) -> Result<Vec<u8>> {
    if bits.is_empty() {
        return Err(Error::InvalidParameter("cannot attach CRC to empty payload".into()));
    }
    let rem = remainder(bits);
    let mut out = Vec::with_capacity(bits.len() + 24);
    out.extend_from_slice(bits);
    for i in (0..24).rev() {
        out.push(((rem >> i) & 1) as u8);
    }
    Ok(out)
}

/// True iff the codeword divides the generator exactly.
pub fn crc24_check(codeword: &[u8]) -> Result<bool> {
    if codeword.len() < 25 {
        return Err(Error::InvalidParameter(format!(
            "codeword of {} bits is shorter than payload + 24 parity bits",
            codeword.len()
        )));
    }
    Ok(remainder(codeword) == 0)
}
