//! Receive processing: linear ZF/MMSE detection for spatial multiplexing and
//! Alamouti combining (pair-averaged CSI) for SFBC. Both return the payload
//! symbol stream in the encoder's input order plus an erasure count; any
//! erasure marks the transport block as failed upstream.

use crate::corrchan::ChannelGrid;
use crate::error::{Error, Result};
use crate::linalg::c64;
use crate::phy::txrx::RxGrid;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorKind {
    Zf,
    Mmse,
}

impl DetectorKind {
    pub fn label(&self) -> &'static str {
        match self {
            DetectorKind::Zf => "zf",
            DetectorKind::Mmse => "mmse",
        }
    }
}

impl std::str::FromStr for DetectorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zf" => Ok(DetectorKind::Zf),
            "mmse" => Ok(DetectorKind::Mmse),
            other => Err(Error::Config(format!(
                "unknown detector '{other}' (expected 'zf' or 'mmse')"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Detected {
    /// Symbol estimates in the encoder's input order.
    pub symbols: Vec<Complex64>,
    /// Number of resource elements that could not be detected.
    pub erasures: usize,
}

fn dims_match(rx: &RxGrid, csi: &ChannelGrid) -> Result<(usize, usize)> {
    let (s, k) = (rx.y.len(), rx.y.first().map_or(0, |r| r.len()));
    if s != csi.n_symbols() || k != csi.n_subcarriers() {
        return Err(Error::Dimension(format!(
            "receive grid {s}x{k} vs CSI grid {}x{}",
            csi.n_symbols(),
            csi.n_subcarriers()
        )));
    }
    Ok((s, k))
}

/// x_hat = sqrt(2) (H^H H + 2 nv I)^{-1} H^H y; nv = 0 gives zero forcing.
/// The sqrt(2) undoes the per-layer power split. A numerically singular
/// normal matrix flags the element as erased.
pub fn sm_detect(
    rx: &RxGrid,
    csi: &ChannelGrid,
    kind: DetectorKind,
    noise_var: f64,
) -> Result<Detected> {
    if noise_var < 0.0 {
        return Err(Error::InvalidParameter("noise_var must be >= 0".into()));
    }
    let (n_sym, n_sc) = dims_match(rx, csi)?;
    let reg = match kind {
        DetectorKind::Zf => 0.0,
        DetectorKind::Mmse => 2.0 * noise_var,
    };
    let mut symbols = Vec::with_capacity(2 * n_sym * n_sc);
    let mut erasures = 0usize;
    for s in 0..n_sym {
        for k in 0..n_sc {
            let h = &csi.h[s][k];
            let hh = h.adjoint();
            let mut a = hh.mul(h);
            a.0[0][0] += c64(reg, 0.0);
            a.0[1][1] += c64(reg, 0.0);
            let det = a.det();
            let tr = a.trace().re;
            if tr <= 0.0 || det.norm() <= (tr * 0.5).powi(2) * 1e-24 {
                erasures += 1;
                symbols.push(Complex64::default());
                symbols.push(Complex64::default());
                continue;
            }
            let rhs = hh.mul_vec(rx.y[s][k]);
            let inv_det = c64(1.0, 0.0) / det;
            let x0 = (a.0[1][1] * rhs[0] - a.0[0][1] * rhs[1]) * inv_det;
            let x1 = (a.0[0][0] * rhs[1] - a.0[1][0] * rhs[0]) * inv_det;
            symbols.push(x0 * SQRT_2);
            symbols.push(x1 * SQRT_2);
        }
    }
    Ok(Detected { symbols, erasures })
}

/// Alamouti combining over each subcarrier pair using the average of the
/// pair's CSI matrices. Exact on a pair-flat channel; the post-combining SNR
/// scales with the squared Frobenius norm of the channel.
pub fn sfbc_decode(rx: &RxGrid, csi: &ChannelGrid) -> Result<Detected> {
    let (n_sym, n_sc) = dims_match(rx, csi)?;
    if n_sc % 2 != 0 {
        return Err(Error::Dimension(format!(
            "SFBC needs an even subcarrier count, got {n_sc}"
        )));
    }
    let mut symbols = Vec::with_capacity(n_sym * n_sc);
    let mut erasures = 0usize;
    for s in 0..n_sym {
        for pair in 0..n_sc / 2 {
            let ka = 2 * pair;
            let kb = ka + 1;
            let hbar = csi.h[s][ka].add(&csi.h[s][kb]).scale(c64(0.5, 0.0));
            let fro = hbar.frob_sq();
            if fro <= 1e-24 {
                erasures += 1;
                symbols.push(Complex64::default());
                symbols.push(Complex64::default());
                continue;
            }
            let ya = rx.y[s][ka];
            let yb = rx.y[s][kb];
            let mut s1 = Complex64::default();
            let mut s2 = Complex64::default();
            for r in 0..2 {
                let h0 = hbar.0[r][0];
                let h1 = hbar.0[r][1];
                s1 += h0.conj() * ya[r] + h1 * yb[r].conj();
                s2 += -h1 * ya[r].conj() + h0.conj() * yb[r];
            }
            let g = SQRT_2 / fro;
            symbols.push(s1 * g);
            symbols.push(s2 * g);
        }
    }
    Ok(Detected { symbols, erasures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat2;
    use crate::phy::encode::{sfbc_encode, sm_encode};
    use crate::phy::txrx::apply_channel;
    use crate::rng::Stream;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn flat_grid(h: Mat2, n_symbols: usize, n_subcarriers: usize) -> ChannelGrid {
        ChannelGrid {
            h: vec![vec![h; n_subcarriers]; n_symbols],
            subcarrier_spacing_hz: 15e3,
        }
    }

    fn random_channel(rng: &mut ChaCha8Rng) -> Mat2 {
        let mut m = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * 2.0;
            }
        }
        m
    }

    fn random_symbols(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|_| c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * 2.0)
            .collect()
    }

    #[test]
    fn zf_on_scaled_identity_recovers_example() {
        // Channel 2*I, received (2, 4): the transmitted layer pair was
        // (sqrt(2), 2 sqrt(2)) before the power split.
        let csi = flat_grid(Mat2::identity().scale(c64(2.0, 0.0)), 1, 1);
        let rx = RxGrid {
            y: vec![vec![[c64(2.0, 0.0), c64(4.0, 0.0)]]],
            noise_var: 0.0,
        };
        let det = sm_detect(&rx, &csi, DetectorKind::Zf, 0.0).unwrap();
        assert_eq!(det.erasures, 0);
        assert!((det.symbols[0] - c64(SQRT_2, 0.0)).norm() < 1e-12);
        assert!((det.symbols[1] - c64(2.0 * SQRT_2, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn noise_free_round_trip_over_random_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for trial in 0..1000 {
            let h = random_channel(&mut rng);
            if h.det().norm() < 1e-3 {
                continue; // skip the rare near-singular draw; covered below
            }
            let syms = random_symbols(&mut rng, 4);
            let tx = sm_encode(&syms, 1, 2).unwrap();
            let csi = flat_grid(h, 1, 2);
            let rx = apply_channel(&tx, &csi, f64::INFINITY, Stream::root(trial)).unwrap();
            for kind in [DetectorKind::Zf, DetectorKind::Mmse] {
                let det = sm_detect(&rx, &csi, kind, 0.0).unwrap();
                for (got, want) in det.symbols.iter().zip(syms.iter()) {
                    assert!((got - want).norm() < 1e-9, "trial {trial}");
                }
            }
        }
    }

    #[test]
    fn mmse_equals_zf_at_zero_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        for _ in 0..200 {
            let h = random_channel(&mut rng);
            if h.det().norm() < 1e-2 {
                continue;
            }
            let csi = flat_grid(h, 1, 1);
            let rx = RxGrid {
                y: vec![vec![[
                    c64(rng.gen::<f64>(), rng.gen::<f64>()),
                    c64(rng.gen::<f64>(), rng.gen::<f64>()),
                ]]],
                noise_var: 0.0,
            };
            let zf = sm_detect(&rx, &csi, DetectorKind::Zf, 0.0).unwrap();
            let mmse = sm_detect(&rx, &csi, DetectorKind::Mmse, 0.0).unwrap();
            for (a, b) in zf.symbols.iter().zip(mmse.symbols.iter()) {
                assert!((a - b).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn singular_channel_is_erased_under_zf() {
        let mut h = Mat2::zero();
        h.0[0][0] = c64(1.0, 0.0);
        h.0[0][1] = c64(1.0, 0.0);
        h.0[1][0] = c64(1.0, 0.0);
        h.0[1][1] = c64(1.0, 0.0);
        let csi = flat_grid(h, 1, 1);
        let rx = RxGrid {
            y: vec![vec![[c64(1.0, 0.0), c64(1.0, 0.0)]]],
            noise_var: 0.0,
        };
        let det = sm_detect(&rx, &csi, DetectorKind::Zf, 0.0).unwrap();
        assert_eq!(det.erasures, 1);
        // MMSE with real noise regularizes through it.
        let det = sm_detect(&rx, &csi, DetectorKind::Mmse, 0.1).unwrap();
        assert_eq!(det.erasures, 0);
    }

    #[test]
    fn alamouti_flat_channel_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for trial in 0..1000 {
            let h = random_channel(&mut rng);
            if h.frob_sq() < 1e-3 {
                continue;
            }
            let syms = random_symbols(&mut rng, 4);
            let tx = sfbc_encode(&syms, 1, 4).unwrap();
            let csi = flat_grid(h, 1, 4);
            let rx = apply_channel(&tx, &csi, f64::INFINITY, Stream::root(5000 + trial)).unwrap();
            let det = sfbc_decode(&rx, &csi).unwrap();
            assert_eq!(det.erasures, 0);
            for (got, want) in det.symbols.iter().zip(syms.iter()) {
                assert!((got - want).norm() < 1e-9, "trial {trial}");
            }
        }
    }

    #[test]
    fn alamouti_single_path_still_recovers() {
        let mut h = Mat2::zero();
        h.0[0][1] = c64(0.8, -0.6);
        let syms = vec![c64(1.0, 1.0), c64(-1.0, 0.5)];
        let tx = sfbc_encode(&syms, 1, 2).unwrap();
        let csi = flat_grid(h, 1, 2);
        let rx = apply_channel(&tx, &csi, f64::INFINITY, Stream::root(9)).unwrap();
        let det = sfbc_decode(&rx, &csi).unwrap();
        assert_eq!(det.erasures, 0);
        for (got, want) in det.symbols.iter().zip(syms.iter()) {
            assert!((got - want).norm() < 1e-9);
        }
    }

    #[test]
    fn alamouti_zero_channel_is_erased() {
        let csi = flat_grid(Mat2::zero(), 1, 2);
        let rx = RxGrid {
            y: vec![vec![[c64(0.1, 0.0); 2]; 2]],
            noise_var: 0.0,
        };
        let det = sfbc_decode(&rx, &csi).unwrap();
        assert_eq!(det.erasures, 1);
    }

    #[test]
    fn alamouti_orthogonality_no_cross_symbol_leakage() {
        // With s2 = 0 on a pair-flat channel, the s2 estimate must be
        // numerically zero (and vice versa).
        let mut rng = ChaCha8Rng::seed_from_u64(54);
        for _ in 0..200 {
            let h = random_channel(&mut rng);
            if h.frob_sq() < 1e-3 {
                continue;
            }
            let syms = vec![c64(1.3, -0.7), Complex64::default()];
            let tx = sfbc_encode(&syms, 1, 2).unwrap();
            let csi = flat_grid(h, 1, 2);
            let rx = apply_channel(&tx, &csi, f64::INFINITY, Stream::root(77)).unwrap();
            let det = sfbc_decode(&rx, &csi).unwrap();
            assert!(det.symbols[1].norm() < 1e-10, "cross leakage {}", det.symbols[1].norm());
        }
    }

    #[test]
    fn pair_varying_channel_matches_joint_least_squares() {
        // When the channel differs across the pair, the combiner leaves
        // residual interference. The joint least-squares solution over the
        // widely-linear 2-subcarrier system is exact noise-free; the
        // combiner must stay within a bound proportional to the variation.
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let mut worst_ratio: f64 = 0.0;
        for _ in 0..200 {
            let h0 = random_channel(&mut rng);
            if h0.frob_sq() < 0.5 {
                continue;
            }
            let eps = 0.05;
            let mut h1 = h0;
            for i in 0..2 {
                for j in 0..2 {
                    h1.0[i][j] += c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * (2.0 * eps);
                }
            }
            let syms = random_symbols(&mut rng, 2);
            let tx = sfbc_encode(&syms, 1, 2).unwrap();
            let csi = ChannelGrid {
                h: vec![vec![h0, h1]],
                subcarrier_spacing_hz: 15e3,
            };
            let rx = apply_channel(&tx, &csi, f64::INFINITY, Stream::root(99)).unwrap();

            // Joint LS oracle in real coordinates: unknowns
            // (Re s1, Im s1, Re s2, Im s2), 8 real equations.
            let g = 1.0 / SQRT_2;
            let mut a = [[0.0f64; 4]; 8];
            let mut b = [0.0f64; 8];
            for r in 0..2 {
                // y_r(ka) = g*(h0[r][0] s1 - h0[r][1] s2*)
                let (c1, c2) = (h0.0[r][0] * g, -h0.0[r][1] * g);
                a[2 * r][0] = c1.re;
                a[2 * r][1] = -c1.im;
                a[2 * r][2] = c2.re;
                a[2 * r][3] = c2.im; // acts on conj(s2)
                a[2 * r + 1][0] = c1.im;
                a[2 * r + 1][1] = c1.re;
                a[2 * r + 1][2] = c2.im;
                a[2 * r + 1][3] = -c2.re;
                b[2 * r] = rx.y[0][0][r].re;
                b[2 * r + 1] = rx.y[0][0][r].im;
                // y_r(kb) = g*(h1[r][0] s2 + h1[r][1] s1*)
                let (d2, d1) = (h1.0[r][0] * g, h1.0[r][1] * g);
                a[4 + 2 * r][0] = d1.re;
                a[4 + 2 * r][1] = d1.im; // conj(s1)
                a[4 + 2 * r][2] = d2.re;
                a[4 + 2 * r][3] = -d2.im;
                a[4 + 2 * r + 1][0] = d1.im;
                a[4 + 2 * r + 1][1] = -d1.re;
                a[4 + 2 * r + 1][2] = d2.im;
                a[4 + 2 * r + 1][3] = d2.re;
                b[4 + 2 * r] = rx.y[0][1][r].re;
                b[4 + 2 * r + 1] = rx.y[0][1][r].im;
            }
            // Normal equations, 4x4 Gaussian elimination.
            let mut ata = [[0.0f64; 5]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    ata[i][j] = (0..8).map(|r| a[r][i] * a[r][j]).sum();
                }
                ata[i][4] = (0..8).map(|r| a[r][i] * b[r]).sum();
            }
            for col in 0..4 {
                let piv = (col..4)
                    .max_by(|&x, &y| ata[x][col].abs().partial_cmp(&ata[y][col].abs()).unwrap())
                    .unwrap();
                ata.swap(col, piv);
                for row in 0..4 {
                    if row != col {
                        let f = ata[row][col] / ata[col][col];
                        for j in col..5 {
                            ata[row][j] -= f * ata[col][j];
                        }
                    }
                }
            }
            let ls = [
                c64(ata[0][4] / ata[0][0], ata[1][4] / ata[1][1]),
                c64(ata[2][4] / ata[2][2], ata[3][4] / ata[3][3]),
            ];
            for (got, want) in ls.iter().zip(syms.iter()) {
                assert!((got - want).norm() < 1e-8, "joint LS must be exact");
            }

            let det = sfbc_decode(&rx, &csi).unwrap();
            let err: f64 = det
                .symbols
                .iter()
                .zip(syms.iter())
                .map(|(g, w)| (g - w).norm())
                .fold(0.0, f64::max);
            let scale = syms.iter().map(|s| s.norm()).fold(0.0, f64::max);
            let ratio = err / (eps * scale).max(1e-12);
            worst_ratio = worst_ratio.max(ratio);
        }
        // Residual interference stays proportional to the cross-pair
        // variation; the constant here is an empirical envelope.
        assert!(
            worst_ratio < 12.0,
            "combiner residual ratio {worst_ratio} exceeded the envelope"
        );
    }

    #[test]
    fn mmse_never_loses_to_zf_on_symbol_errors() {
        // Aggregate raw symbol errors at several SNRs over random correlated
        // channels: MMSE <= ZF.
        use crate::corrchan::{generate_channel, CorrelationSpec, DopplerSpec, FadingSpec};
        use crate::corrchan::{scenario_profile, ScenarioKind};
        use crate::phy::qam::{qam16_map, qam16_slice};

        let profile = scenario_profile(ScenarioKind::PoorScattering);
        let corr = CorrelationSpec::real(0.7, 0.7).unwrap();
        let dop = DopplerSpec::from_kmh(0.0, 2e9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        for &snr in &[0.0, 5.0, 10.0, 15.0, 20.0] {
            let mut zf_errors = 0usize;
            let mut mmse_errors = 0usize;
            let nv = crate::phy::txrx::noise_variance(snr);
            for trial in 0..200 {
                let series = generate_channel(
                    &profile,
                    &FadingSpec::rayleigh(),
                    &corr,
                    &dop,
                    1,
                    1e-4,
                    Stream::root(7000).child(trial),
                )
                .unwrap();
                let grid = crate::corrchan::freq_response(&series, 1, 8, 15e3, 1e-4).unwrap();
                let bits: Vec<u8> = (0..2 * 8 * 4).map(|_| rng.gen_range(0..=1u8)).collect();
                let syms = qam16_map(&bits).unwrap();
                let tx = sm_encode(&syms, 1, 8).unwrap();
                let rx = apply_channel(&tx, &grid, snr, Stream::root(8000).child(trial)).unwrap();
                for (kind, count) in [
                    (DetectorKind::Zf, &mut zf_errors),
                    (DetectorKind::Mmse, &mut mmse_errors),
                ] {
                    let det = sm_detect(&rx, &grid, kind, nv).unwrap();
                    *count += det
                        .symbols
                        .iter()
                        .zip(syms.iter())
                        .filter(|(g, w)| (qam16_slice(**g) - **w).norm() > 1e-9)
                        .count();
                }
            }
            assert!(
                mmse_errors <= zf_errors,
                "at {snr} dB: MMSE {mmse_errors} > ZF {zf_errors}"
            );
        }
    }
}
