//! Ohmic Lorentz–Drude reservoir: spectral density, noise and dissipation
//! kernels, and the time-dependent diffusion and damping coefficients.
//!
//! Units: the cutoff frequency is 1, so the mode frequency is `1/x`, times
//! are `tau = ω_c t` and rates are in units of `ω_c`. Temperature is
//! `theta = k_B T / ħω_c`.

pub mod exact;

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A spectral density `J(ω)` in cutoff units.
pub trait SpectralDensity: Sync {
    fn density(&self, omega: f64) -> f64;
}

/// `J(ω) = (ω/π) / (1 + ω²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LorentzDrude;

impl SpectralDensity for LorentzDrude {
    fn density(&self, omega: f64) -> f64 {
        omega / PI / (1.0 + omega * omega)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirSpec {
    alpha2: f64,
    x: f64,
    theta: f64,
}

impl ReservoirSpec {
    /// `alpha2` is the squared coupling, `x = ω_c/ω₀`, `theta = k_B T/ħω_c`.
    pub fn new(alpha2: f64, x: f64, theta: f64) -> Result<Self> {
        if !(alpha2 > 0.0 && alpha2.is_finite()) {
            return Err(Error::validation(format!("alpha2 must be positive (got {alpha2})")));
        }
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::validation(format!("x must be positive (got {x})")));
        }
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::validation(format!("theta must be non-negative (got {theta})")));
        }
        Ok(Self { alpha2, x, theta })
    }

    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }
    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Mode frequency `ω₀ = 1/x` in cutoff units.
    pub fn mode_frequency(&self) -> f64 {
        1.0 / self.x
    }

    pub fn with_x(&self, x: f64) -> Result<Self> {
        Self::new(self.alpha2, x, self.theta)
    }
    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(self.alpha2, self.x, theta)
    }
    pub fn with_alpha2(&self, alpha2: f64) -> Result<Self> {
        Self::new(alpha2, self.x, self.theta)
    }
}

/// One sample of the master-equation coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSample {
    pub tau: f64,
    pub delta: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseMode {
    /// Full `coth` thermal weight, by quadrature.
    Exact,
    /// `coth(ω/2θ) ≈ 2θ/ω`, closed form.
    HighT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DissipationMode {
    Exact,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovLimits {
    pub delta: f64,
    pub gamma: f64,
}

/// Lorentz–Drude spectral density at `omega` (cutoff units).
pub fn spectral_density(_spec: &ReservoirSpec, omega: f64) -> f64 {
    LorentzDrude.density(omega)
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::validation(format!("tau must be finite and non-negative (got {tau})")));
    }
    Ok(())
}

/// Noise kernel `κ(τ) = α² ∫ J(ω) coth(ω/2θ) cos(ωτ) dω`.
///
/// The exact kernel diverges logarithmically at `τ = 0` (the thermal weight
/// tends to 1 at large ω) so exact mode requires `τ > 0`.
pub fn noise_kernel(spec: &ReservoirSpec, tau: f64, mode: NoiseMode) -> Result<f64> {
    check_tau(tau)?;
    match mode {
        NoiseMode::HighT => Ok(spec.alpha2 * spec.theta * (-tau).exp()),
        NoiseMode::Exact => exact::noise_kernel(spec, &LorentzDrude, tau),
    }
}

/// Dissipation kernel `μ(τ) = α² ∫ J(ω) sin(ωτ) dω`; closed form `α² e^{-τ}/2`.
pub fn dissipation_kernel(spec: &ReservoirSpec, tau: f64, mode: DissipationMode) -> Result<f64> {
    check_tau(tau)?;
    match mode {
        DissipationMode::ClosedForm => Ok(0.5 * spec.alpha2 * (-tau).exp()),
        DissipationMode::Exact => exact::dissipation_kernel(spec, &LorentzDrude, tau),
    }
}

/// Damping coefficient `γ(τ) = ∫_0^τ μ(s) sin(s/x) ds` in closed form.
pub fn gamma_coefficient(spec: &ReservoirSpec, tau: f64) -> f64 {
    let k = spec.mode_frequency();
    let (s, c) = (k * tau).sin_cos();
    gamma_markov(spec) * (1.0 - (-tau).exp() * (c + spec.x * s))
}

/// Diffusion coefficient `Δ(τ) = ∫_0^τ κ(s) cos(s/x) ds`.
pub fn delta_coefficient(spec: &ReservoirSpec, tau: f64, mode: NoiseMode) -> Result<f64> {
    check_tau(tau)?;
    match mode {
        NoiseMode::HighT => Ok(delta_high_t(spec, tau)),
        NoiseMode::Exact => exact::delta_coefficient(spec, &LorentzDrude, tau),
    }
}

/// High-temperature closed form of `Δ(τ)`.
pub fn delta_high_t(spec: &ReservoirSpec, tau: f64) -> f64 {
    let k = spec.mode_frequency();
    let (s, c) = (k * tau).sin_cos();
    delta_markov_high_t(spec) * (1.0 - (-tau).exp() * (c - k * s))
}

/// `γ_M = (α²/2) x / (1 + x²)`.
pub fn gamma_markov(spec: &ReservoirSpec) -> f64 {
    let x = spec.x;
    0.5 * spec.alpha2 * x / (1.0 + x * x)
}

/// `Δ_M = α² θ x² / (1 + x²)` (high-temperature stationary value).
pub fn delta_markov_high_t(spec: &ReservoirSpec) -> f64 {
    let x = spec.x;
    spec.alpha2 * spec.theta * x * x / (1.0 + x * x)
}

/// Stationary values `(Δ_M, γ_M)`.
///
/// In exact mode `Δ_M` is read off the large-τ plateau of the quadrature
/// and fails with [`Error::PlateauNotReached`] if it has not settled.
pub fn markov_limits(spec: &ReservoirSpec, mode: NoiseMode) -> Result<MarkovLimits> {
    let gamma = gamma_markov(spec);
    let delta = match mode {
        NoiseMode::HighT => delta_markov_high_t(spec),
        NoiseMode::Exact => exact::delta_plateau(spec, &LorentzDrude)?,
    };
    Ok(MarkovLimits { delta, gamma })
}

/// Mean thermal occupation of the mode, `1 / (e^{1/(xθ)} - 1)`; zero at `θ = 0`.
pub fn thermal_occupation(spec: &ReservoirSpec) -> f64 {
    if spec.theta == 0.0 {
        return 0.0;
    }
    1.0 / (1.0 / (spec.x * spec.theta)).exp_m1()
}

/// `∫_0^τ e^{-s} cos(k s) ds`.
pub fn damped_cos_integral(tau: f64, k: f64) -> f64 {
    let (s, c) = (k * tau).sin_cos();
    (1.0 - (-tau).exp() * (c - k * s)) / (1.0 + k * k)
}

/// `∫_0^τ e^{-s} sin(k s) ds`.
pub fn damped_sin_integral(tau: f64, k: f64) -> f64 {
    let (s, c) = (k * tau).sin_cos();
    (k - (-tau).exp() * (s + k * c)) / (1.0 + k * k)
}

/// `∫_0^τ γ(s) ds` in closed form.
pub fn integrated_gamma(spec: &ReservoirSpec, tau: f64) -> f64 {
    let k = spec.mode_frequency();
    gamma_markov(spec) * (tau - damped_cos_integral(tau, k) - spec.x * damped_sin_integral(tau, k))
}

/// `∫_0^τ Δ_highT(s) ds` in closed form.
pub fn integrated_delta_high_t(spec: &ReservoirSpec, tau: f64) -> f64 {
    let k = spec.mode_frequency();
    delta_markov_high_t(spec) * (tau - damped_cos_integral(tau, k) + k * damped_sin_integral(tau, k))
}

/// `∫_0^τ Δ(s) ds` for either noise mode.
pub fn integrated_delta(spec: &ReservoirSpec, tau: f64, mode: NoiseMode) -> Result<f64> {
    check_tau(tau)?;
    match mode {
        NoiseMode::HighT => Ok(integrated_delta_high_t(spec, tau)),
        NoiseMode::Exact => exact::integrated_delta(spec, &LorentzDrude, tau),
    }
}

/// Samples `(τ, Δ, γ)` at the requested times.
pub fn sample_coefficients(spec: &ReservoirSpec, taus: &[f64], mode: NoiseMode) -> Result<Vec<CoefficientSample>> {
    taus.iter()
        .map(|&tau| {
            Ok(CoefficientSample {
                tau,
                delta: delta_coefficient(spec, tau, mode)?,
                gamma: gamma_coefficient(spec, tau),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1(x: f64) -> ReservoirSpec {
        ReservoirSpec::new(0.01, x, 100.0).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(ReservoirSpec::new(0.0, 1.0, 1.0).is_err());
        assert!(ReservoirSpec::new(0.01, -1.0, 1.0).is_err());
        assert!(ReservoirSpec::new(0.01, 1.0, -1.0).is_err());
        assert!(ReservoirSpec::new(0.01, 1.0, 0.0).is_ok());
    }

    #[test]
    fn spectral_density_values() {
        let s = fig1(10.0);
        assert_eq!(spectral_density(&s, 0.0), 0.0);
        assert!((spectral_density(&s, 1.0) - 1.0 / (2.0 * PI)).abs() < 1e-15);
        let w = 1e6;
        assert!((spectral_density(&s, w) * PI * w - 1.0).abs() < 1e-11);
    }

    #[test]
    fn high_t_noise_kernel() {
        let s = fig1(10.0);
        assert!((noise_kernel(&s, 0.0, NoiseMode::HighT).unwrap() - 1.0).abs() < 1e-15);
        let v = noise_kernel(&s, 3.0, NoiseMode::HighT).unwrap();
        assert!((v - (-3.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn closed_form_dissipation_kernel() {
        let s = fig1(10.0);
        assert_eq!(dissipation_kernel(&s, 0.0, DissipationMode::ClosedForm).unwrap(), 0.005);
        let v = dissipation_kernel(&s, 1.0, DissipationMode::ClosedForm).unwrap();
        assert!((v - 0.001_839_397_205_857_211_6).abs() < 1e-15);
        assert_eq!(dissipation_kernel(&s, 0.0, DissipationMode::Exact).unwrap(), 0.0);
    }

    #[test]
    fn gamma_limits() {
        let s = fig1(10.0);
        assert_eq!(gamma_coefficient(&s, 0.0), 0.0);
        let gm = 0.005 * 10.0 / 101.0;
        assert!((gamma_markov(&s) - gm).abs() < 1e-18);
        assert!((gamma_coefficient(&s, 60.0) - gm).abs() < 1e-18);
        assert!((gm - 4.950_495e-4).abs() < 1e-9);
    }

    #[test]
    fn delta_limits() {
        let s = fig1(10.0);
        assert_eq!(delta_coefficient(&s, 0.0, NoiseMode::HighT).unwrap(), 0.0);
        assert_eq!(delta_coefficient(&s, 0.0, NoiseMode::Exact).unwrap(), 0.0);
        let dm = markov_limits(&s, NoiseMode::HighT).unwrap().delta;
        assert!((dm - 100.0 / 101.0).abs() < 1e-14);
        assert!((delta_high_t(&s, 60.0) - dm).abs() < 1e-14);
    }

    #[test]
    fn markov_limits_vanish_for_small_x() {
        let s = ReservoirSpec::new(0.01, 1e-9, 100.0).unwrap();
        let m = markov_limits(&s, NoiseMode::HighT).unwrap();
        assert!(m.gamma < 1e-11 && m.delta < 1e-15);
    }

    #[test]
    fn thermal_occupation_values() {
        assert_eq!(thermal_occupation(&ReservoirSpec::new(0.01, 10.0, 0.0).unwrap()), 0.0);
        let n = thermal_occupation(&fig1(10.0));
        assert!((n - 999.500_083_333_33).abs() < 1e-6, "{n}");
        let s = ReservoirSpec::new(0.01, 10.0, 100.0).unwrap();
        let xt = s.x() * s.theta();
        assert!(((thermal_occupation(&s) - (xt - 0.5)) / xt).abs() < 1e-3);
    }

    #[test]
    fn closed_form_integrals_match_quadrature() {
        use crate::numerics::integrate_adaptive;
        for &x in &[0.01, 0.3, 10.0] {
            let s = fig1(x);
            for &tau in &[0.05, 0.7, 3.0] {
                let g = integrate_adaptive(|t| gamma_coefficient(&s, t), 0.0, tau, 1e-16, 1e-13).unwrap();
                assert!((g.value - integrated_gamma(&s, tau)).abs() < 1e-14);
                let d = integrate_adaptive(|t| delta_high_t(&s, t), 0.0, tau, 1e-14, 1e-13).unwrap();
                assert!((d.value - integrated_delta_high_t(&s, tau)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn negative_tau_is_rejected() {
        let s = fig1(10.0);
        assert!(delta_coefficient(&s, -1.0, NoiseMode::HighT).is_err());
        assert!(noise_kernel(&s, f64::NAN, NoiseMode::HighT).is_err());
    }
}
