//! Kronecker spatial correlation for the 2x2 link.
//!
//! The base-station side contributes a 2x2 matrix with off-diagonal `alpha`,
//! the mobile side one with `beta`; their Kronecker product is the 4x4
//! correlation of the vectorized channel. Vectorization is column-major over
//! the rx-by-tx matrix, i.e. (h00, h10, h01, h11), so entry (2t+r, 2t'+r')
//! equals R_bs[t][t'] * R_ms[r][r'].

use crate::error::{Error, Result};
use crate::linalg::{c64, cholesky4, eigh4, Mat4};
use num_complex::Complex64;

/// Per-side antenna correlation coefficients. Magnitudes must not exceed 1;
/// real values in [0, 1] are the usual choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationSpec {
    /// Base-station (transmit) antenna correlation.
    pub alpha: Complex64,
    /// Mobile-station (receive) antenna correlation.
    pub beta: Complex64,
}

impl CorrelationSpec {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        if alpha.norm() > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "|alpha| = {} exceeds 1",
                alpha.norm()
            )));
        }
        if beta.norm() > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "|beta| = {} exceeds 1",
                beta.norm()
            )));
        }
        Ok(CorrelationSpec { alpha, beta })
    }

    pub fn real(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(c64(alpha, 0.0), c64(beta, 0.0))
    }

    /// Zero correlation on both sides.
    pub fn uncorrelated() -> Self {
        CorrelationSpec {
            alpha: Complex64::default(),
            beta: Complex64::default(),
        }
    }
}

/// The 4x4 Kronecker correlation matrix. Hermitian, unit diagonal, PSD.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialCorrelation {
    pub r: Mat4,
}

/// Builds the full correlation matrix R_bs (x) R_ms:
///
/// ```text
/// [ 1     b     a     ab  ]
/// [ b*    1     ab*   a   ]
/// [ a*    a*b   1     b   ]
/// [ a*b*  a*    b*    1   ]
/// ```
pub fn kronecker_correlation(spec: &CorrelationSpec) -> Result<SpatialCorrelation> {
    // Revalidate so directly-constructed specs cannot smuggle bad values in.
    let spec = CorrelationSpec::new(spec.alpha, spec.beta)?;
    let one = c64(1.0, 0.0);
    let bs = [[one, spec.alpha], [spec.alpha.conj(), one]];
    let ms = [[one, spec.beta], [spec.beta.conj(), one]];
    let mut r = Mat4::zero();
    for t in 0..2 {
        for tp in 0..2 {
            for rx in 0..2 {
                for rp in 0..2 {
                    r.0[2 * t + rx][2 * tp + rp] = bs[t][tp] * ms[rx][rp];
                }
            }
        }
    }
    Ok(SpatialCorrelation { r })
}

/// Coloring matrix L with L L^H = r. Takes the triangular route when the
/// matrix is positive definite; otherwise falls back to an eigendecomposition
/// with negative eigenvalues clipped at zero, which handles the legal
/// singular inputs (|alpha| = 1 or |beta| = 1).
pub fn correlation_root(corr: &SpatialCorrelation) -> Result<Mat4> {
    if corr.r.hermitian_defect() > 1e-9 {
        return Err(Error::InvalidParameter(
            "correlation matrix is not Hermitian".into(),
        ));
    }
    if let Some(l) = cholesky4(&corr.r) {
        return Ok(l);
    }
    let (w, v) = eigh4(&corr.r);
    let mut l = Mat4::zero();
    for i in 0..4 {
        for j in 0..4 {
            l.0[i][j] = v.0[i][j] * c64(w[j].max(0.0).sqrt(), 0.0);
        }
    }
    Ok(l)
}
