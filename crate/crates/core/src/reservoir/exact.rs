//! Frequency-domain quadrature for the exact (full `coth`) coefficients.
//!
//! The time integrals are done analytically, leaving one oscillatory
//! ω-integral per value:
//!
//! * `κ(τ) = α² ∫ J coth cos(ωτ) dω`
//! * `Δ(τ) = α² ∫ J coth ½[S(ω-k) + S(ω+k)] dω`, `S(λ) = sin(λτ)/λ`
//! * `γ(τ) = α² ∫ J ½[S(ω-k) - S(ω+k)] dω`
//! * `∫_0^τ Δ = α² ∫ J coth ½[C(ω-k) + C(ω+k)] dω`, `C(λ) = (1 - cos λτ)/λ²`
//!
//! with `k = 1/x` and `coth = coth(ω/2θ)`.

use std::f64::consts::PI;

use super::{ReservoirSpec, SpectralDensity};
use crate::error::{Error, Result};
use crate::numerics::quadrature::{
    integrate_adaptive_limit, integrate_oscillatory, integrate_semi_infinite, MAX_SUBDIVISIONS,
};

const REL_TOL: f64 = 1e-12;
/// Relative agreement required between `Δ(τ)` and `Δ(2τ)` for a plateau.
pub const PLATEAU_REL_TOL: f64 = 1e-6;
const PLATEAU_START: f64 = 40.0;
const PLATEAU_MAX: f64 = 5120.0;

/// `ω coth(ω / 2θ)`, finite at `ω = 0` and equal to `|ω|` at `θ = 0`.
pub fn omega_coth(omega: f64, theta: f64) -> f64 {
    if theta == 0.0 {
        return omega.abs();
    }
    let z = omega / (2.0 * theta);
    if z.abs() < 1e-4 {
        2.0 * theta * (1.0 + z * z / 3.0)
    } else if z.abs() > 20.0 {
        omega.abs()
    } else {
        omega / z.tanh()
    }
}

/// `sin(λτ) / λ`, equal to `τ` at `λ = 0`.
fn sin_over(lambda: f64, tau: f64) -> f64 {
    let u = lambda * tau;
    if u.abs() < 1e-4 {
        tau * (1.0 - u * u / 6.0)
    } else {
        u.sin() / lambda
    }
}

/// `(1 - cos λτ) / λ²`, equal to `τ²/2` at `λ = 0`.
fn one_minus_cos_over_sq(lambda: f64, tau: f64) -> f64 {
    let u = lambda * tau;
    if u.abs() < 1e-3 {
        0.5 * tau * tau * (1.0 - u * u / 12.0)
    } else {
        let h = (0.5 * u).sin();
        2.0 * h * h / (lambda * lambda)
    }
}

fn tolerance(spec: &ReservoirSpec) -> f64 {
    1e-12 * spec.alpha2() * (1.0 + spec.theta())
}

/// Frequency beyond which the integrands have settled into their asymptotic
/// oscillation.
fn settle_point(spec: &ReservoirSpec) -> f64 {
    2.0 * spec.mode_frequency() + 10.0 + 4.0 * spec.theta()
}

/// `J(ω) coth(ω/2θ)` for a density of the form `ω g(ω)`.
fn thermal_density<J: SpectralDensity>(j: &J, omega: f64, theta: f64) -> f64 {
    if omega == 0.0 {
        // J(ω)/ω at 0 times 2θ
        let h = 1e-8;
        return j.density(h) / h * omega_coth(0.0, theta);
    }
    j.density(omega) / omega * omega_coth(omega, theta)
}

/// Sum of adaptive panels of width `half_period` over `[lo, hi]`.
fn panel_sum<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, half_period: f64, abs_tol: f64) -> Result<f64> {
    let n = ((hi - lo) / half_period).ceil().max(1.0) as usize;
    let w = (hi - lo) / n as f64;
    let panel_tol = abs_tol / n as f64;
    let mut sum = 0.0;
    for i in 0..n {
        let a = lo + i as f64 * w;
        let b = if i + 1 == n { hi } else { a + w };
        sum += integrate_adaptive_limit(f, a, b, panel_tol, REL_TOL, MAX_SUBDIVISIONS)?.value;
    }
    Ok(sum)
}

pub fn noise_kernel<J: SpectralDensity>(spec: &ReservoirSpec, j: &J, tau: f64) -> Result<f64> {
    if tau == 0.0 {
        return Err(Error::validation(
            "the exact noise kernel diverges at tau = 0; use tau > 0",
        ));
    }
    let theta = spec.theta();
    let f = |w: f64| thermal_density(j, w, theta) * (w * tau).cos();
    let r = integrate_oscillatory(f, 0.0, PI / tau, settle_point(spec), tolerance(spec) / spec.alpha2())?;
    Ok(spec.alpha2() * r.value)
}

/// `μ(τ)` by quadrature. At exactly `τ = 0` the integral is zero; the kernel
/// jumps to `α²/2` for any `τ > 0`.
pub fn dissipation_kernel<J: SpectralDensity>(spec: &ReservoirSpec, j: &J, tau: f64) -> Result<f64> {
    if tau == 0.0 {
        return Ok(0.0);
    }
    let f = |w: f64| j.density(w) * (w * tau).sin();
    let r = integrate_oscillatory(f, 0.0, PI / tau, 10.0, 1e-13)?;
    Ok(spec.alpha2() * r.value)
}

pub fn delta_coefficient<J: SpectralDensity>(spec: &ReservoirSpec, j: &J, tau: f64) -> Result<f64> {
    if tau == 0.0 {
        return Ok(0.0);
    }
    let (k, theta) = (spec.mode_frequency(), spec.theta());
    let f = |w: f64| {
        thermal_density(j, w, theta) * 0.5 * (sin_over(w - k, tau) + sin_over(w + k, tau))
    };
    let r = integrate_oscillatory(f, 0.0, PI / tau, settle_point(spec), tolerance(spec) / spec.alpha2())?;
    Ok(spec.alpha2() * r.value)
}

/// `γ(τ)` by quadrature, the cross-check for the closed form.
pub fn gamma_coefficient<J: SpectralDensity>(spec: &ReservoirSpec, j: &J, tau: f64) -> Result<f64> {
    if tau == 0.0 {
        return Ok(0.0);
    }
    let k = spec.mode_frequency();
    let f = |w: f64| j.density(w) * 0.5 * (sin_over(w - k, tau) - sin_over(w + k, tau));
    let r = integrate_oscillatory(f, 0.0, PI / tau, 2.0 * k + 10.0, 1e-14)?;
    Ok(spec.alpha2() * r.value)
}

pub fn integrated_delta<J: SpectralDensity>(spec: &ReservoirSpec, j: &J, tau: f64) -> Result<f64> {
    if tau == 0.0 {
        return Ok(0.0);
    }
    let (k, theta) = (spec.mode_frequency(), spec.theta());
    let tol = tolerance(spec) / spec.alpha2();
    let hp = PI / tau;
    let split = settle_point(spec);

    let near = |w: f64| {
        thermal_density(j, w, theta)
            * 0.5
            * (one_minus_cos_over_sq(w - k, tau) + one_minus_cos_over_sq(w + k, tau))
    };
    let head = panel_sum(&near, 0.0, split, hp, tol)?;

    // beyond the split ω > 2k, so the two pieces of C can be separated
    let smooth = |w: f64| {
        let (a, b) = (w - k, w + k);
        thermal_density(j, w, theta) * 0.5 * (1.0 / (a * a) + 1.0 / (b * b))
    };
    let wavy = |w: f64| {
        let (a, b) = (w - k, w + k);
        -thermal_density(j, w, theta) * 0.5 * ((a * tau).cos() / (a * a) + (b * tau).cos() / (b * b))
    };
    let tail_smooth = integrate_semi_infinite(smooth, split, split, tol)?;
    let tail_wavy = integrate_oscillatory(wavy, split, hp, split, tol)?;
    Ok(spec.alpha2() * (head + tail_smooth.value + tail_wavy.value))
}

/// Large-τ plateau of the exact `Δ(τ)`.
///
/// `Δ` is evaluated at `τ` and `2τ`, doubling `τ` from 40 until the two
/// agree to [`PLATEAU_REL_TOL`].
pub fn delta_plateau<J: SpectralDensity>(spec: &ReservoirSpec, j: &J) -> Result<f64> {
    let mut tau = PLATEAU_START;
    let mut short = delta_coefficient(spec, j, tau)?;
    loop {
        let long = delta_coefficient(spec, j, 2.0 * tau)?;
        if (long - short).abs() <= PLATEAU_REL_TOL * long.abs() + 1e-15 {
            return Ok(long);
        }
        if 2.0 * tau >= PLATEAU_MAX {
            return Err(Error::PlateauNotReached {
                tau_short: tau,
                value_short: short,
                tau_long: 2.0 * tau,
                value_long: long,
            });
        }
        tau *= 2.0;
        short = long;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reservoir::{
        delta_high_t, gamma_coefficient as gamma_closed, integrated_delta_high_t, LorentzDrude,
    };

    /// Matsubara expansion of the Lorentz–Drude noise kernel,
    /// `κ(τ)/α² = ½cot(1/2θ) e^{-τ} - (2θ) Σ_n ν_n e^{-ν_n τ}/(1 - ν_n²)`
    /// with `ν_n = 2πnθ`.
    fn matsubara_noise_kernel(alpha2: f64, theta: f64, tau: f64) -> f64 {
        let mut sum = 0.5 / (0.5 / theta).tan() * (-tau).exp();
        let mut n = 1;
        loop {
            let nu = 2.0 * PI * n as f64 * theta;
            let term = 2.0 * theta * nu * (-nu * tau).exp() / (1.0 - nu * nu);
            sum -= term;
            if nu * tau > 40.0 && term.abs() < 1e-18 {
                break;
            }
            n += 1;
        }
        alpha2 * sum
    }

    /// `Δ(τ)` from the Matsubara series with the time integral done term by term.
    fn matsubara_delta(alpha2: f64, x: f64, theta: f64, tau: f64) -> f64 {
        let k = 1.0 / x;
        let damped = |rate: f64| {
            // ∫_0^τ e^{-rate s} cos(ks) ds
            let (s, c) = (k * tau).sin_cos();
            (rate - (-rate * tau).exp() * (rate * c - k * s)) / (rate * rate + k * k)
        };
        let mut sum = 0.5 / (0.5 / theta).tan() * damped(1.0);
        const N: usize = 400_000;
        for n in 1..=N {
            let nu = 2.0 * PI * n as f64 * theta;
            sum -= 2.0 * theta * nu * damped(nu) / (1.0 - nu * nu);
        }
        // terms approach -1/(2π²θn²); add the remaining tail of that
        let n = N as f64;
        sum += (1.0 / n - 0.5 / (n * n)) / (2.0 * PI * PI * theta);
        alpha2 * sum
    }

    #[test]
    fn omega_coth_limits() {
        assert_eq!(omega_coth(3.0, 0.0), 3.0);
        assert!((omega_coth(0.0, 2.0) - 4.0).abs() < 1e-15);
        assert!((omega_coth(1.0, 0.5) - 1.0 / 1f64.tanh()).abs() < 1e-15);
        assert_eq!(omega_coth(100.0, 1.0), 100.0);
    }

    #[test]
    fn noise_kernel_matches_matsubara_series() {
        let spec = ReservoirSpec::new(1.0, 10.0, 0.7).unwrap();
        for &tau in &[0.3, 1.0, 2.5] {
            let q = noise_kernel(&spec, &LorentzDrude, tau).unwrap();
            let m = matsubara_noise_kernel(1.0, 0.7, tau);
            assert!((q - m).abs() < 1e-9, "tau={tau}: {q} vs {m}");
        }
    }

    #[test]
    fn noise_kernel_rejects_origin() {
        let spec = ReservoirSpec::new(1.0, 10.0, 0.7).unwrap();
        assert!(noise_kernel(&spec, &LorentzDrude, 0.0).is_err());
    }

    #[test]
    fn dissipation_kernel_matches_closed_form() {
        let spec = ReservoirSpec::new(0.3, 1.0, 0.0).unwrap();
        for &tau in &[0.2, 1.0, 4.0] {
            let q = dissipation_kernel(&spec, &LorentzDrude, tau).unwrap();
            assert!((q - 0.15 * (-tau).exp()).abs() < 1e-11, "{tau}: {q}");
        }
    }

    #[test]
    fn gamma_quadrature_matches_closed_form() {
        for &x in &[0.01, 1.0, 10.0] {
            let spec = ReservoirSpec::new(0.01, x, 100.0).unwrap();
            for &tau in &[0.1, 1.3, 6.0] {
                let q = gamma_coefficient(&spec, &LorentzDrude, tau).unwrap();
                let c = gamma_closed(&spec, tau);
                assert!((q - c).abs() < 1e-12, "x={x} tau={tau}: {q} vs {c}");
            }
        }
    }

    #[test]
    fn delta_matches_matsubara_series() {
        for &(x, theta, tau) in &[(10.0, 1.0, 2.0), (1.0, 0.3, 0.7), (0.5, 2.0, 4.0)] {
            let spec = ReservoirSpec::new(1.0, x, theta).unwrap();
            let q = delta_coefficient(&spec, &LorentzDrude, tau).unwrap();
            let m = matsubara_delta(1.0, x, theta, tau);
            assert!((q - m).abs() < 1e-8 * m.abs().max(1.0), "x={x} θ={theta} τ={tau}: {q} vs {m}");
        }
    }

    #[test]
    fn delta_reference_values() {
        // independent brute-force double quadrature
        for &(x, theta, tau, want) in &[(10.0, 1.0, 2.0, 0.873_166_426_804_08), (0.5, 2.0, 4.0, 0.448_027_657_031_67)] {
            let s = ReservoirSpec::new(1.0, x, theta).unwrap();
            let v = delta_coefficient(&s, &LorentzDrude, tau).unwrap();
            assert!((v - want).abs() < 1e-9, "{v}");
        }
    }

    #[test]
    fn exact_delta_approaches_high_t_form() {
        let spec = ReservoirSpec::new(0.01, 10.0, 100.0).unwrap();
        for &tau in &[0.5, 2.0] {
            let e = delta_coefficient(&spec, &LorentzDrude, tau).unwrap();
            let h = delta_high_t(&spec, tau);
            assert!(((e - h) / h).abs() < 2e-3, "{tau}: {e} vs {h}");
        }
    }

    #[test]
    fn integrated_delta_matches_time_quadrature() {
        let spec = ReservoirSpec::new(1.0, 2.0, 0.8).unwrap();
        let tau = 1.7;
        let direct = crate::numerics::integrate_adaptive(
            |t| delta_coefficient(&spec, &LorentzDrude, t).unwrap(),
            0.0,
            tau,
            1e-11,
            1e-10,
        )
        .unwrap()
        .value;
        let kernel = integrated_delta(&spec, &LorentzDrude, tau).unwrap();
        assert!((direct - kernel).abs() < 1e-9, "{direct} vs {kernel}");
    }

    #[test]
    fn integrated_delta_tracks_high_t_closed_form() {
        let spec = ReservoirSpec::new(0.01, 10.0, 100.0).unwrap();
        let e = integrated_delta(&spec, &LorentzDrude, 0.65).unwrap();
        let h = integrated_delta_high_t(&spec, 0.65);
        assert!(((e - h) / h).abs() < 2e-3, "{e} vs {h}");
    }

    #[test]
    fn plateau_equals_coth_markov_value() {
        let spec = ReservoirSpec::new(0.01, 2.0, 0.5).unwrap();
        let p = delta_plateau(&spec, &LorentzDrude).unwrap();
        let x = spec.x();
        let want = 0.5 * 0.01 * x / (1.0 + x * x) / (1.0 / (2.0 * x * 0.5)).tanh();
        assert!(((p - want) / want).abs() < 1e-6, "{p} vs {want}");
    }
}
