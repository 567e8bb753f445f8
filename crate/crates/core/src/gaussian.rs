//! Two-mode Gaussian states in the quadrature ordering `(X1, P1, X2, P2)`.
//!
//! Covariances use the convention where the vacuum has variance 1/2 per
//! quadrature.

use crate::error::{Error, Result};
use crate::numerics::HermitianMatrix4;

pub type Mat4 = [[f64; 4]; 4];

/// Default tolerance on the uncertainty-relation eigenvalue.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// Symmetry tolerance on covariance entries.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Which block-diagonal symplectic form enters `cov + (i/2) Ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymplecticForm {
    /// `ω ⊕ ω`: the uncertainty relation.
    Physicality,
    /// `ω ⊕ ω^T`: the partially transposed state (PPT test).
    Ppt,
}

impl SymplecticForm {
    pub fn matrix(self) -> Mat4 {
        let mut m = [[0.0; 4]; 4];
        m[0][1] = 1.0;
        m[1][0] = -1.0;
        let s = match self {
            SymplecticForm::Physicality => 1.0,
            SymplecticForm::Ppt => -1.0,
        };
        m[2][3] = s;
        m[3][2] = -s;
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeGaussianState {
    pub mean: [f64; 4],
    pub cov: Mat4,
}

impl TwoModeGaussianState {
    /// Checks finiteness and symmetry of `cov`; physicality is checked
    /// separately with [`is_physical`].
    pub fn new(mean: [f64; 4], cov: Mat4) -> Result<Self> {
        if mean.iter().chain(cov.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::validation("state contains non-finite entries"));
        }
        for i in 0..4 {
            for j in i + 1..4 {
                if (cov[i][j] - cov[j][i]).abs() > SYMMETRY_TOL {
                    return Err(Error::validation(format!(
                        "covariance is not symmetric at ({i}, {j}): {} vs {}",
                        cov[i][j], cov[j][i]
                    )));
                }
            }
        }
        Ok(Self { mean, cov })
    }

    pub fn vacuum() -> Self {
        let mut cov = [[0.0; 4]; 4];
        for (i, row) in cov.iter_mut().enumerate() {
            row[i] = 0.5;
        }
        Self { mean: [0.0; 4], cov }
    }

    /// Smallest eigenvalue of `cov + (i/2) Ω` for the chosen form.
    pub fn symplectic_margin(&self, form: SymplecticForm) -> f64 {
        symplectic_margin(&self.cov, form)
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.cov[i][i]).sum()
    }

    pub fn determinant(&self) -> f64 {
        det4(&self.cov)
    }
}

/// Smallest eigenvalue of `cov + (i/2) Ω`.
pub fn symplectic_margin(cov: &Mat4, form: SymplecticForm) -> f64 {
    let omega = form.matrix();
    let mut im = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            im[i][j] = 0.5 * omega[i][j];
        }
    }
    let mut re = *cov;
    // exact symmetrization; asymmetry is bounded by SYMMETRY_TOL on construction
    for i in 0..4 {
        for j in i + 1..4 {
            let s = 0.5 * (re[i][j] + re[j][i]);
            re[i][j] = s;
            re[j][i] = s;
        }
    }
    HermitianMatrix4::from_parts(&re, &im)
        .expect("symmetric real part plus antisymmetric imaginary part is Hermitian")
        .min_eigenvalue()
}

/// Canonical-form covariance `[[A, C], [C, B]]` with `A = diag(a, a)`,
/// `B = diag(b, b)`, `C = diag(c1, c2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalCovariance {
    a: f64,
    b: f64,
    c1: f64,
    c2: f64,
}

impl CanonicalCovariance {
    /// Requires `a, b > 0` and a covariance satisfying the uncertainty
    /// relation to within [`PHYSICALITY_TOL`].
    pub fn new(a: f64, b: f64, c1: f64, c2: f64) -> Result<Self> {
        if ![a, b, c1, c2].iter().all(|v| v.is_finite()) {
            return Err(Error::validation("canonical parameters must be finite"));
        }
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::validation(format!(
                "canonical parameters need a, b > 0 (got a = {a}, b = {b})"
            )));
        }
        let c = Self { a, b, c1, c2 };
        let margin = symplectic_margin(&c.matrix(), SymplecticForm::Physicality);
        if margin < -PHYSICALITY_TOL {
            return Err(Error::validation(format!(
                "canonical covariance (a={a}, b={b}, c1={c1}, c2={c2}) violates the \
                 uncertainty relation (min eigenvalue {margin:e})"
            )));
        }
        Ok(c)
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c1(&self) -> f64 {
        self.c1
    }
    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn matrix(&self) -> Mat4 {
        [
            [self.a, 0.0, self.c1, 0.0],
            [0.0, self.a, 0.0, self.c2],
            [self.c1, 0.0, self.b, 0.0],
            [0.0, self.c2, 0.0, self.b],
        ]
    }
}

/// Twin-beam (two-mode squeezed vacuum) parameters for squeezing `r`.
pub fn make_twb(r: f64) -> Result<CanonicalCovariance> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::validation(format!(
            "twin-beam squeezing must be finite and non-negative (got {r})"
        )));
    }
    let a = 0.5 * (2.0 * r).cosh();
    let c = 0.5 * (2.0 * r).sinh();
    // Pure state: built directly, it saturates the uncertainty bound.
    Ok(CanonicalCovariance {
        a,
        b: a,
        c1: c,
        c2: -c,
    })
}

/// Zero-mean state with the canonical covariance `c`.
pub fn assemble(c: &CanonicalCovariance) -> Result<TwoModeGaussianState> {
    let s = TwoModeGaussianState::new([0.0; 4], c.matrix())?;
    if !is_physical(&s, PHYSICALITY_TOL) {
        return Err(Error::validation("assembled covariance is unphysical"));
    }
    Ok(s)
}

/// Uncertainty relation: `cov + (i/2)(ω ⊕ ω) >= -tol`.
pub fn is_physical(s: &TwoModeGaussianState, tol: f64) -> bool {
    s.symplectic_margin(SymplecticForm::Physicality) >= -tol
}

/// Local phase-space rotation `R ⊕ R` with `R = [[cos, sin], [-sin, cos]]`:
/// `mean -> (R⊕R)^T mean`, `cov -> (R⊕R)^T cov (R⊕R)`.
pub fn rotate(s: &TwoModeGaussianState, angle: f64) -> TwoModeGaussianState {
    let rr = rotation_matrix(angle);
    let rt = transpose(&rr);
    let mut mean = [0.0; 4];
    for (i, m) in mean.iter_mut().enumerate() {
        *m = (0..4).map(|k| rt[i][k] * s.mean[k]).sum();
    }
    let mut cov = mat_mul(&mat_mul(&rt, &s.cov), &rr);
    for i in 0..4 {
        for j in i + 1..4 {
            let v = 0.5 * (cov[i][j] + cov[j][i]);
            cov[i][j] = v;
            cov[j][i] = v;
        }
    }
    TwoModeGaussianState { mean, cov }
}

/// `R ⊕ R` for the given angle.
pub fn rotation_matrix(angle: f64) -> Mat4 {
    let (s, c) = angle.sin_cos();
    [
        [c, s, 0.0, 0.0],
        [-s, c, 0.0, 0.0],
        [0.0, 0.0, c, s],
        [0.0, 0.0, -s, c],
    ]
}

pub(crate) fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub(crate) fn transpose(a: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[j][i];
        }
    }
    out
}

pub(crate) fn det4(m: &Mat4) -> f64 {
    // Laplace expansion along the first row
    fn det3(m: [[f64; 3]; 3]) -> f64 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
    let mut total = 0.0;
    for col in 0..4 {
        let mut minor = [[0.0; 3]; 3];
        for i in 1..4 {
            let mut jj = 0;
            for j in 0..4 {
                if j == col {
                    continue;
                }
                minor[i - 1][jj] = m[i][j];
                jj += 1;
            }
        }
        let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * m[0][col] * det3(minor);
    }
    total
}
