//! Small fixed-size complex linear algebra: 2x2 channel matrices, 4x4
//! correlation matrices, a Cholesky factorization with a Hermitian-eigen
//! fallback, and a Bessel J0 evaluation used by the Doppler checks.

use num_complex::Complex64;
use std::f64::consts::PI;

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// 2x2 complex matrix, row-major. Rows index receive antennas, columns
/// transmit antennas throughout the simulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn zero() -> Self {
        Mat2([[Complex64::default(); 2]; 2])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        m.0[0][0] = c64(1.0, 0.0);
        m.0[1][1] = c64(1.0, 0.0);
        m
    }

    pub fn scale(&self, s: Complex64) -> Mat2 {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        out
    }

    pub fn add(&self, other: &Mat2) -> Mat2 {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] += other.0[i][j];
            }
        }
        out
    }

    pub fn adjoint(&self) -> Mat2 {
        Mat2([
            [self.0[0][0].conj(), self.0[1][0].conj()],
            [self.0[0][1].conj(), self.0[1][1].conj()],
        ])
    }

    pub fn mul(&self, other: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &other.0;
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }

    pub fn mul_vec(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Squared Frobenius norm.
    pub fn frob_sq(&self) -> f64 {
        self.0.iter().flatten().map(|v| v.norm_sqr()).sum()
    }

    /// Column-major vectorization: (h00, h10, h01, h11).
    pub fn vec4(&self) -> [Complex64; 4] {
        [self.0[0][0], self.0[1][0], self.0[0][1], self.0[1][1]]
    }

    /// Inverse of `vec4`.
    pub fn from_vec4(v: [Complex64; 4]) -> Mat2 {
        Mat2([[v[0], v[2]], [v[1], v[3]]])
    }
}

/// 4x4 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat4(pub [[Complex64; 4]; 4]);

impl Mat4 {
    pub fn zero() -> Self {
        Mat4([[Complex64::default(); 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.0[i][i] = c64(1.0, 0.0);
        }
        m
    }

    pub fn adjoint(&self) -> Mat4 {
        let mut out = Mat4::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = self.0[j][i].conj();
            }
        }
        out
    }

    pub fn mul(&self, other: &Mat4) -> Mat4 {
        let mut out = Mat4::zero();
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = Complex64::default();
                for k in 0..4 {
                    acc += self.0[i][k] * other.0[k][j];
                }
                out.0[i][j] = acc;
            }
        }
        out
    }

    pub fn mul_vec(&self, v: [Complex64; 4]) -> [Complex64; 4] {
        let mut out = [Complex64::default(); 4];
        for i in 0..4 {
            for k in 0..4 {
                out[i] += self.0[i][k] * v[k];
            }
        }
        out
    }

    /// Frobenius norm of the difference.
    pub fn frob_dist(&self, other: &Mat4) -> f64 {
        let mut acc = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                acc += (self.0[i][j] - other.0[i][j]).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Largest |a[i][j] - conj(a[j][i])| over all entries.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.0[i][j] - self.0[j][i].conj()).norm());
            }
        }
        worst
    }
}

/// Lower-triangular Cholesky factor of a Hermitian positive-definite matrix.
/// Returns None when a pivot is not safely positive (singular or indefinite).
pub fn cholesky4(a: &Mat4) -> Option<Mat4> {
    let mut l = Mat4::zero();
    let scale: f64 = (0..4).map(|i| a.0[i][i].re.abs()).sum::<f64>().max(1e-300);
    for j in 0..4 {
        let mut d = a.0[j][j].re;
        for k in 0..j {
            d -= l.0[j][k].norm_sqr();
        }
        if d <= scale * 1e-12 {
            return None;
        }
        let d = d.sqrt();
        l.0[j][j] = c64(d, 0.0);
        for i in (j + 1)..4 {
            let mut s = a.0[i][j];
            for k in 0..j {
                s -= l.0[i][k] * l.0[j][k].conj();
            }
            l.0[i][j] = s / d;
        }
    }
    Some(l)
}

/// Eigendecomposition of a Hermitian 4x4 matrix by cyclic complex Jacobi
/// rotations. Returns (eigenvalues, V) with A = V diag(w) V^H; V unitary.
pub fn eigh4(a: &Mat4) -> ([f64; 4], Mat4) {
    let mut a = *a;
    let mut v = Mat4::identity();
    for _ in 0..64 {
        let mut off = 0.0;
        for p in 0..4 {
            for q in (p + 1)..4 {
                off += a.0[p][q].norm_sqr();
            }
        }
        if off < 1e-28 {
            break;
        }
        for p in 0..4 {
            for q in (p + 1)..4 {
                let apq = a.0[p][q];
                if apq.norm() < 1e-300 {
                    continue;
                }
                // Phase-align the pivot, then a real Jacobi rotation.
                let phi = apq.arg();
                let m = apq.norm();
                let theta = 0.5 * (2.0 * m).atan2(a.0[p][p].re - a.0[q][q].re);
                let (s, c) = theta.sin_cos();
                let ep = c64(phi.cos(), -phi.sin()); // e^{-i phi}
                // Unitary U embedded at (p,q): U[p][p]=c, U[p][q]=-s,
                // U[q][p]=e^{-i phi} s, U[q][q]=e^{-i phi} c.
                let upp = c64(c, 0.0);
                let upq = c64(-s, 0.0);
                let uqp = ep * s;
                let uqq = ep * c;
                // A <- U^H A U: columns first, then rows.
                for i in 0..4 {
                    let aip = a.0[i][p];
                    let aiq = a.0[i][q];
                    a.0[i][p] = aip * upp + aiq * uqp;
                    a.0[i][q] = aip * upq + aiq * uqq;
                }
                for j in 0..4 {
                    let apj = a.0[p][j];
                    let aqj = a.0[q][j];
                    a.0[p][j] = upp.conj() * apj + uqp.conj() * aqj;
                    a.0[q][j] = upq.conj() * apj + uqq.conj() * aqj;
                }
                for i in 0..4 {
                    let vip = v.0[i][p];
                    let viq = v.0[i][q];
                    v.0[i][p] = vip * upp + viq * uqp;
                    v.0[i][q] = vip * upq + viq * uqq;
                }
            }
        }
    }
    let w = [a.0[0][0].re, a.0[1][1].re, a.0[2][2].re, a.0[3][3].re];
    (w, v)
}

/// Zeroth-order Bessel function of the first kind. Power series below |x|=12,
/// Hankel asymptotic expansion above; absolute error comfortably under 1e-6
/// everywhere, far inside the tolerances of the Doppler checks that use it.
pub fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 12.0 {
        let mut sum = 1.0;
        let mut term = 1.0;
        let q = x * x / 4.0;
        for k in 1..80 {
            term *= -q / ((k * k) as f64);
            sum += term;
            if term.abs() < 1e-17 {
                break;
            }
        }
        sum
    } else {
        let z = 8.0 / ax;
        let z2 = z * z;
        let p0 = 1.0 - 0.1098628627e-2 * z2 + 0.2734510407e-4 * z2 * z2
            - 0.2073370639e-5 * z2 * z2 * z2;
        let q0 = -0.1562499995e-1 * z + 0.1430488765e-3 * z * z2 - 0.6911147651e-5 * z * z2 * z2;
        let xx = ax - PI / 4.0;
        (2.0 / (PI * ax)).sqrt() * (xx.cos() * p0 - xx.sin() * q0)
    }
}
