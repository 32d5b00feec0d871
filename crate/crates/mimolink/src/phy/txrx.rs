//! Channel application: y = H x + n per resource element, with circularly
//! symmetric complex Gaussian noise of per-antenna variance 10^(-SNR/10)
//! (unit total transmit power). An infinite SNR disables the noise entirely.

use crate::corrchan::ChannelGrid;
use crate::error::{Error, Result};
use crate::phy::encode::LayerGrid;
use crate::rng::Stream;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone)]
pub struct RxGrid {
    /// y[symbol][subcarrier] = [rx0, rx1].
    pub y: Vec<Vec<[Complex64; 2]>>,
    /// Per-receive-antenna noise variance actually applied.
    pub noise_var: f64,
}

pub fn noise_variance(snr_db: f64) -> f64 {
    if snr_db.is_infinite() && snr_db > 0.0 {
        0.0
    } else {
        10f64.powf(-snr_db / 10.0)
    }
}

pub fn apply_channel(
    tx: &LayerGrid,
    h: &ChannelGrid,
    snr_db: f64,
    stream: Stream,
) -> Result<RxGrid> {
    if tx.n_symbols() != h.n_symbols() || tx.n_subcarriers() != h.n_subcarriers() {
        return Err(Error::Dimension(format!(
            "transmit grid {}x{} vs channel grid {}x{}",
            tx.n_symbols(),
            tx.n_subcarriers(),
            h.n_symbols(),
            h.n_subcarriers()
        )));
    }
    let nv = noise_variance(snr_db);
    let sigma = (nv / 2.0).sqrt();
    let mut rng = stream.rng();
    let mut y = vec![vec![[Complex64::default(); 2]; tx.n_subcarriers()]; tx.n_symbols()];
    for (s, row) in y.iter_mut().enumerate() {
        for (k, slot) in row.iter_mut().enumerate() {
            let hx = h.h[s][k].mul_vec(tx.x[s][k]);
            for (rx, out) in slot.iter_mut().enumerate() {
                let n = if sigma > 0.0 {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re * sigma, im * sigma)
                } else {
                    Complex64::default()
                };
                *out = hx[rx] + n;
            }
        }
    }
    Ok(RxGrid { y, noise_var: nv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, Mat2};
    use crate::phy::encode::sm_encode;

    fn flat_grid(h: Mat2, n_symbols: usize, n_subcarriers: usize) -> ChannelGrid {
        ChannelGrid {
            h: vec![vec![h; n_subcarriers]; n_symbols],
            subcarrier_spacing_hz: 15e3,
        }
    }

    fn some_symbols(n: usize) -> Vec<Complex64> {
        (0..n).map(|i| c64((i % 5) as f64 - 2.0, (i % 3) as f64)).collect()
    }

    #[test]
    fn noise_free_is_exact_matrix_product() {
        let tx = sm_encode(&some_symbols(2 * 3 * 4), 3, 4).unwrap();
        let h = Mat2([[c64(0.5, 0.2), c64(-0.1, 0.9)], [c64(1.2, 0.0), c64(0.3, -0.4)]]);
        let rx = apply_channel(&tx, &flat_grid(h, 3, 4), f64::INFINITY, Stream::root(1)).unwrap();
        assert_eq!(rx.noise_var, 0.0);
        for s in 0..3 {
            for k in 0..4 {
                let want = h.mul_vec(tx.x[s][k]);
                assert!((rx.y[s][k][0] - want[0]).norm() < 1e-15);
                assert!((rx.y[s][k][1] - want[1]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn identity_channel_no_noise_passes_symbols_through() {
        let tx = sm_encode(&some_symbols(2 * 2 * 2), 2, 2).unwrap();
        let rx =
            apply_channel(&tx, &flat_grid(Mat2::identity(), 2, 2), f64::INFINITY, Stream::root(2))
                .unwrap();
        for s in 0..2 {
            for k in 0..2 {
                assert!((rx.y[s][k][0] - tx.x[s][k][0]).norm() < 1e-15);
                assert!((rx.y[s][k][1] - tx.x[s][k][1]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn measured_noise_variance_at_10db() {
        // Zero channel isolates the noise; 1e5 resource elements, 3 sigma.
        let n_sym = 100;
        let n_sc = 500;
        let tx = sm_encode(&vec![Complex64::default(); 2 * n_sym * n_sc], n_sym, n_sc).unwrap();
        let rx =
            apply_channel(&tx, &flat_grid(Mat2::zero(), n_sym, n_sc), 10.0, Stream::root(3)).unwrap();
        let mut acc = 0.0;
        let mut cnt = 0usize;
        for row in &rx.y {
            for re in row {
                acc += re[0].norm_sqr() + re[1].norm_sqr();
                cnt += 2;
            }
        }
        let measured = acc / cnt as f64;
        let sigma_est = 0.1 / (cnt as f64).sqrt();
        assert!(
            (measured - 0.1).abs() < 3.0 * sigma_est,
            "noise variance {measured} vs 0.1 +- {}",
            3.0 * sigma_est
        );
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let tx = sm_encode(&some_symbols(2 * 2 * 2), 2, 2).unwrap();
        let res = apply_channel(&tx, &flat_grid(Mat2::identity(), 2, 3), 10.0, Stream::root(4));
        assert!(matches!(res, Err(Error::Dimension(_))));
    }
}
