//! Eigenvalues of 4×4 Hermitian matrices.
//!
//! The complex matrix `H = A + iB` is embedded in the real symmetric 8×8
//! matrix `[[A, -B], [B, A]]`, whose spectrum is that of `H` with every
//! eigenvalue doubled, and diagonalized with cyclic Jacobi rotations.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Entry-wise Hermiticity tolerance, `|h_ij - conj(h_ji)|`.
pub const HERMITIAN_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianMatrix4 {
    entries: [[Complex64; 4]; 4],
}

impl HermitianMatrix4 {
    pub fn new(entries: [[Complex64; 4]; 4]) -> Result<Self> {
        for i in 0..4 {
            for j in i..4 {
                let d = (entries[i][j] - entries[j][i].conj()).norm();
                if !(d <= HERMITIAN_TOL) {
                    return Err(Error::validation(format!(
                        "matrix is not Hermitian: |h[{i}][{j}] - conj(h[{j}][{i}])| = {d:e}"
                    )));
                }
            }
        }
        Ok(Self { entries })
    }

    /// `re + i * im` for a real symmetric `re` and real antisymmetric `im`.
    pub fn from_parts(re: &[[f64; 4]; 4], im: &[[f64; 4]; 4]) -> Result<Self> {
        let mut e = [[Complex64::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                e[i][j] = Complex64::new(re[i][j], im[i][j]);
            }
        }
        Self::new(e)
    }

    pub fn entries(&self) -> &[[Complex64; 4]; 4] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i][j]
    }

    /// All four eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut m = [[0.0; 8]; 8];
        for i in 0..4 {
            for j in 0..4 {
                let h = self.entries[i][j];
                // symmetrize to absorb the tolerated asymmetry
                let hs = 0.5 * (h + self.entries[j][i].conj());
                m[i][j] = hs.re;
                m[i + 4][j + 4] = hs.re;
                m[i][j + 4] = -hs.im;
                m[i + 4][j] = hs.im;
            }
        }
        let mut d = jacobi_eigenvalues(m);
        d.sort_by(f64::total_cmp);
        [
            0.5 * (d[0] + d[1]),
            0.5 * (d[2] + d[3]),
            0.5 * (d[4] + d[5]),
            0.5 * (d[6] + d[7]),
        ]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }
}

/// Smallest eigenvalue of a 4×4 Hermitian matrix.
pub fn min_eigenvalue_hermitian4(m: &HermitianMatrix4) -> f64 {
    m.min_eigenvalue()
}

fn jacobi_eigenvalues<const N: usize>(mut a: [[f64; N]; N]) -> [f64; N] {
    let scale: f64 = a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    if scale == 0.0 {
        return [0.0; N];
    }
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..N)
            .flat_map(|i| (0..N).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * scale {
            break;
        }
        for p in 0..N - 1 {
            for q in p + 1..N {
                let apq = a[p][q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut d = [0.0; N];
    for i in 0..N {
        d[i] = a[i][i];
    }
    d
}
