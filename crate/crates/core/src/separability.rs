//! PPT separability of two-mode Gaussian states and the twin-beam
//! separability function `S(τ)`, with `S ≥ 0` meaning separable.

use crate::error::{Error, Result};
use crate::gaussian::{make_twb, CanonicalCovariance, SymplecticForm, TwoModeGaussianState};
use crate::numerics::bisect;
use crate::reservoir::{gamma_markov, integrated_delta, integrated_gamma, thermal_occupation, NoiseMode, ReservoirSpec};

/// Margins within this band of zero are reported as boundary cases.
pub const BOUNDARY_BAND: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerdictMethod {
    Spectral,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparabilityVerdict {
    pub separable: bool,
    /// Smallest PPT eigenvalue (spectral) or `2ν̃₋ - 1` (closed form).
    pub margin: f64,
    pub method: VerdictMethod,
}

impl SeparabilityVerdict {
    /// True when `|margin|` is inside [`BOUNDARY_BAND`].
    pub fn is_boundary(&self) -> bool {
        self.margin.abs() <= BOUNDARY_BAND
    }
}

/// PPT test by the smallest eigenvalue of `cov + (i/2)(ω ⊕ ω^T)`.
///
/// For two-mode Gaussian states PPT is necessary and sufficient.
pub fn ppt_spectral(s: &TwoModeGaussianState, tol: f64) -> SeparabilityVerdict {
    let margin = s.symplectic_margin(SymplecticForm::Ppt);
    SeparabilityVerdict {
        separable: margin >= -tol,
        margin,
        method: VerdictMethod::Spectral,
    }
}

/// `2ν̃₋ - 1` for the canonical state `c` after the channel, where `ν̃₋` is
/// the smaller symplectic eigenvalue of the partially transposed evolved
/// covariance. Separable iff the result is `≥ 0`.
pub fn ppt_closed_form(c: &CanonicalCovariance, big_gamma: f64, delta_gamma: f64) -> Result<f64> {
    if !(big_gamma >= 0.0 && delta_gamma >= 0.0) {
        return Err(Error::validation(format!(
            "big_gamma and delta_gamma must be non-negative (got {big_gamma}, {delta_gamma})"
        )));
    }
    let e = (-big_gamma).exp();
    let a = c.a() * e + 0.5 * delta_gamma;
    let b = c.b() * e + 0.5 * delta_gamma;
    let c1 = c.c1() * e;
    let c2 = c.c2() * e;

    let det = (a * b - c1 * c1) * (a * b - c2 * c2);
    let seralian = a * a + b * b - 2.0 * c1 * c2;
    let disc = seralian * seralian - 4.0 * det;
    if disc < -1e-12 * seralian * seralian {
        return Err(Error::validation(format!("negative discriminant {disc:e} in PPT closed form")));
    }
    let root = disc.max(0.0).sqrt();
    // ν̃₋² = (Δ̃ - √disc)/2, written without the cancellation
    let nu_minus_sq = 2.0 * det / (seralian + root);
    Ok(2.0 * nu_minus_sq.max(0.0).sqrt() - 1.0)
}

pub fn ppt_closed_form_verdict(c: &CanonicalCovariance, big_gamma: f64, delta_gamma: f64) -> Result<SeparabilityVerdict> {
    let margin = ppt_closed_form(c, big_gamma, delta_gamma)?;
    Ok(SeparabilityVerdict {
        separable: margin >= 0.0,
        margin,
        method: VerdictMethod::ClosedForm,
    })
}

/// `S = e^{-2r} e^{-Γ} + Δ_Γ - 1`.
pub fn s_exact(r: f64, big_gamma: f64, delta_gamma: f64) -> f64 {
    (-2.0 * r - big_gamma).exp() + delta_gamma - 1.0
}

/// Short-time form `e^{-2r}(1 - ∫γ) + ∫Δ - 1`.
pub fn s_short_time(spec: &ReservoirSpec, r: f64, tau: f64, mode: NoiseMode) -> Result<f64> {
    let sq = (-2.0 * r).exp();
    Ok(sq * (1.0 - integrated_gamma(spec, tau)) + integrated_delta(spec, tau, mode)? - 1.0)
}

/// The damping term `e^{-2r} ∫γ` that the high-temperature form omits.
pub fn short_time_gamma_term(spec: &ReservoirSpec, r: f64, tau: f64) -> f64 {
    (-2.0 * r).exp() * integrated_gamma(spec, tau)
}

/// High-temperature closed form of `S(τ)`.
pub fn s_high_t(spec: &ReservoirSpec, r: f64, tau: f64) -> f64 {
    let (a2, x, theta) = (spec.alpha2(), spec.x(), spec.theta());
    let x2 = x * x;
    let (s, c) = (tau / x).sin_cos();
    let decay = (-tau).exp();
    let brace = tau - (x2 - 1.0) / (x2 + 1.0) * (1.0 - decay * c) - 2.0 * x / (x2 + 1.0) * decay * s;
    a2 * theta * x2 / (1.0 + x2) * brace + (-2.0 * r).exp() - 1.0
}

/// Markovian comparator `S_M(τ) = (τ/2) α² x/(1+x²) (1 + 2xθ) + e^{-2r} - 1`.
pub fn s_markovian(spec: &ReservoirSpec, r: f64, tau: f64) -> f64 {
    let (a2, x, theta) = (spec.alpha2(), spec.x(), spec.theta());
    0.5 * tau * a2 * x / (1.0 + x * x) * (1.0 + 2.0 * x * theta) + (-2.0 * r).exp() - 1.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeparabilityTime {
    Finite(f64),
    /// A zero-temperature Markovian reservoir never separates the twin beam.
    Infinite,
}

impl SeparabilityTime {
    pub fn finite(self) -> Option<f64> {
        match self {
            SeparabilityTime::Finite(t) => Some(t),
            SeparabilityTime::Infinite => None,
        }
    }
}

/// `t_s = ln(1 + (1 - e^{-2r}) / 2N) / γ_M` for the Markovian channel.
pub fn markov_separability_time(spec: &ReservoirSpec, r: f64) -> Result<SeparabilityTime> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::validation(format!(
            "squeezing must be positive for a separability time (got {r})"
        )));
    }
    let n = thermal_occupation(spec);
    if n == 0.0 {
        return Ok(SeparabilityTime::Infinite);
    }
    let t = (-(-2.0 * r).exp_m1() / (2.0 * n)).ln_1p() / gamma_markov(spec);
    Ok(if t.is_finite() {
        SeparabilityTime::Finite(t)
    } else {
        SeparabilityTime::Infinite
    })
}

/// Twin-beam separability function from the channel's `(Γ, Δ_Γ)`, via the
/// closed form.
pub fn twb_closed_form(r: f64, big_gamma: f64, delta_gamma: f64) -> Result<f64> {
    ppt_closed_form(&make_twb(r)?, big_gamma, delta_gamma)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Entangled to separable.
    Up,
    /// Separable to entangled.
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub tau: f64,
    pub direction: Direction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtremumKind {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub tau: f64,
    pub value: f64,
    pub kind: ExtremumKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparabilityTrace {
    pub taus: Vec<f64>,
    pub values: Vec<f64>,
    pub crossings: Vec<Crossing>,
    /// First up-crossing.
    pub separability_time: Option<f64>,
    /// Intervals after the first up-crossing where `S < 0` again.
    pub revivals: Vec<(f64, f64)>,
    pub extrema: Vec<Extremum>,
}

impl SeparabilityTrace {
    /// Spacings between consecutive extrema of the same kind.
    pub fn extremum_spacings(&self, kind: ExtremumKind) -> Vec<f64> {
        let t: Vec<f64> = self.extrema.iter().filter(|e| e.kind == kind).map(|e| e.tau).collect();
        t.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Samples `s` on `[0, tau_max]` at `step`, locating sign changes by
/// bisection and local extrema by parabolic refinement.
pub fn trace_and_analyze<F>(s: F, tau_max: f64, step: f64) -> Result<SeparabilityTrace>
where
    F: Fn(f64) -> f64,
{
    if !(tau_max > 0.0 && tau_max.is_finite()) || !(step > 0.0 && step <= tau_max) {
        return Err(Error::validation(format!(
            "need 0 < step <= tau_max (got step {step}, tau_max {tau_max})"
        )));
    }
    let n = (tau_max / step + 1e-9).floor() as usize;
    let taus: Vec<f64> = (0..=n).map(|i| i as f64 * step).collect();
    let values: Vec<f64> = taus.iter().map(|&t| s(t)).collect();

    let separable = |v: f64| v >= 0.0;
    let mut crossings = Vec::new();
    for i in 0..n {
        let (v0, v1) = (values[i], values[i + 1]);
        if separable(v0) == separable(v1) {
            continue;
        }
        let direction = if separable(v1) { Direction::Up } else { Direction::Down };
        let tol = 1e-13 * taus[i + 1].max(1.0);
        let b = bisect(|t| if separable(s(t)) { 1.0 } else { -1.0 }, taus[i], taus[i + 1], tol)?;
        crossings.push(Crossing { tau: b.root(), direction });
    }

    let first_up = crossings.iter().position(|c| c.direction == Direction::Up);
    let separability_time = first_up.map(|i| crossings[i].tau);
    let mut revivals = Vec::new();
    if let Some(i) = first_up {
        let mut k = i + 1;
        while k < crossings.len() {
            let start = crossings[k].tau;
            let end = crossings.get(k + 1).map_or(taus[n], |c| c.tau);
            revivals.push((start, end));
            k += 2;
        }
    }

    let mut extrema = Vec::new();
    for i in 1..n {
        let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
        let kind = if a < b && b >= c {
            ExtremumKind::Max
        } else if a > b && b <= c {
            ExtremumKind::Min
        } else {
            continue;
        };
        let curv = a - 2.0 * b + c;
        let shift = if curv != 0.0 { 0.5 * (a - c) / curv } else { 0.0 };
        let shift = shift.clamp(-1.0, 1.0);
        extrema.push(Extremum {
            tau: taus[i] + shift * step,
            value: b - 0.25 * (a - c) * shift,
            kind,
        });
    }

    Ok(SeparabilityTrace {
        taus,
        values,
        crossings,
        separability_time,
        revivals,
        extrema,
    })
}
