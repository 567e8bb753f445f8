//! The secular two-mode thermal channel.
//!
//! Each mode sees an identical, uncorrelated reservoir. After time `τ` the
//! state is damped by `e^{-Γ(τ)}`, rotated by `τ/x` and receives isotropic
//! noise `Δ_Γ(τ)/2`, where
//!
//! * `Γ(τ) = 2 ∫_0^τ γ(s) ds`
//! * `Δ_Γ(τ) = ∫_0^τ e^{-(Γ(τ) - Γ(s))} Δ(s) ds`
//!
//! The Markovian comparator uses `Γ = γ_M τ` and `Δ_Γ = (2N+1)(1 - e^{-γ_M τ})`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaussian::{is_physical, rotate, TwoModeGaussianState, PHYSICALITY_TOL};
use crate::reservoir::{
    delta_coefficient, gamma_coefficient, gamma_markov, integrated_gamma, thermal_occupation,
    NoiseMode, ReservoirSpec,
};

/// Default table step in `τ`.
pub const DEFAULT_STEP: f64 = 5e-4;

/// Upper bound on table length, to catch runaway `tau_max / step`.
pub const MAX_TABLE_LEN: usize = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelMode {
    NonMarkovianExact,
    NonMarkovianHighT,
    Markovian,
}

impl ChannelMode {
    pub fn noise_mode(self) -> Option<NoiseMode> {
        match self {
            ChannelMode::NonMarkovianExact => Some(NoiseMode::Exact),
            ChannelMode::NonMarkovianHighT => Some(NoiseMode::HighT),
            ChannelMode::Markovian => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableSample {
    pub tau: f64,
    pub gamma: f64,
    pub delta: f64,
    pub big_gamma: f64,
    pub delta_gamma: f64,
}

/// Coefficients on the uniform grid `τ_i = i * step`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    step: f64,
    tau_max: f64,
    samples: Vec<TableSample>,
}

impl CoefficientTable {
    pub fn step(&self) -> f64 {
        self.step
    }

    /// Requested upper end of the range; the last sample may lie just beyond.
    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    pub fn samples(&self) -> &[TableSample] {
        &self.samples
    }

    /// Piecewise-linear interpolation of every column at `tau`.
    pub fn interpolate(&self, tau: f64) -> Result<TableSample> {
        if !(tau >= 0.0 && tau <= self.tau_max) {
            return Err(Error::OutOfRange {
                tau,
                tau_max: self.tau_max,
            });
        }
        let pos = tau / self.step;
        let i = (pos.floor() as usize).min(self.samples.len() - 2);
        let w = pos - i as f64;
        let (a, b) = (&self.samples[i], &self.samples[i + 1]);
        if w == 0.0 {
            return Ok(*a);
        }
        let lerp = |p: f64, q: f64| p + w * (q - p);
        Ok(TableSample {
            tau,
            gamma: lerp(a.gamma, b.gamma),
            delta: lerp(a.delta, b.delta),
            big_gamma: lerp(a.big_gamma, b.big_gamma),
            delta_gamma: lerp(a.delta_gamma, b.delta_gamma),
        })
    }
}

/// Largest table step accepted for the non-Markovian modes.
pub fn max_step(x: f64) -> f64 {
    0.02f64.min(x / 20.0)
}

/// Samples the channel coefficients on `[0, tau_max]`.
///
/// For the non-Markovian modes `step` must not exceed [`max_step`] so the
/// `τ/x` oscillation is resolved.
pub fn build_table(spec: &ReservoirSpec, mode: ChannelMode, tau_max: f64, step: f64) -> Result<CoefficientTable> {
    if !(tau_max > 0.0 && tau_max.is_finite()) {
        return Err(Error::validation(format!("tau_max must be positive (got {tau_max})")));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::validation(format!("step must be positive (got {step})")));
    }
    if mode != ChannelMode::Markovian && step > max_step(spec.x()) {
        return Err(Error::validation(format!(
            "step {step} is too coarse for x = {}; need step <= {}",
            spec.x(),
            max_step(spec.x())
        )));
    }
    let ratio = tau_max / step;
    if ratio > MAX_TABLE_LEN as f64 {
        return Err(Error::validation(format!(
            "table would need {ratio:.0} samples (limit {MAX_TABLE_LEN})"
        )));
    }
    // enough intervals to cover tau_max, forgiving rounding in tau_max / step
    let n = ((ratio - 1e-9).ceil() as usize).max(1);
    let taus: Vec<f64> = (0..=n).map(|i| i as f64 * step).collect();

    let samples = match mode.noise_mode() {
        None => markovian_samples(spec, &taus),
        Some(noise) => non_markovian_samples(spec, noise, &taus, step)?,
    };
    Ok(CoefficientTable {
        step,
        tau_max,
        samples,
    })
}

fn markovian_samples(spec: &ReservoirSpec, taus: &[f64]) -> Vec<TableSample> {
    let gm = gamma_markov(spec);
    let level = 2.0 * thermal_occupation(spec) + 1.0;
    taus.iter()
        .map(|&tau| TableSample {
            tau,
            gamma: gm,
            delta: gm * level,
            big_gamma: gm * tau,
            delta_gamma: -level * (-gm * tau).exp_m1(),
        })
        .collect()
}

fn non_markovian_samples(
    spec: &ReservoirSpec,
    noise: NoiseMode,
    taus: &[f64],
    step: f64,
) -> Result<Vec<TableSample>> {
    let n = taus.len() - 1;
    // Δ at nodes (even indices) and midpoints (odd indices)
    let delta: Vec<f64> = (0..=2 * n)
        .into_par_iter()
        .map(|j| delta_coefficient(spec, 0.5 * j as f64 * step, noise))
        .collect::<Result<_>>()?;
    let big_gamma = |tau: f64| 2.0 * integrated_gamma(spec, tau);

    let mut samples = Vec::with_capacity(n + 1);
    let mut dg = 0.0;
    let mut g_prev = 0.0;
    for (i, &tau) in taus.iter().enumerate() {
        let g = big_gamma(tau);
        if i > 0 {
            // Simpson on [τ_{i-1}, τ_i] of e^{-(Γ(τ_i) - Γ(s))} Δ(s)
            let g_mid = big_gamma(tau - 0.5 * step);
            let carry = (g_prev - g).exp();
            let panel = step / 6.0
                * (carry * delta[2 * i - 2] + 4.0 * (g_mid - g).exp() * delta[2 * i - 1] + delta[2 * i]);
            dg = carry * dg + panel;
        }
        samples.push(TableSample {
            tau,
            gamma: gamma_coefficient(spec, tau),
            delta: delta[2 * i],
            big_gamma: g,
            delta_gamma: dg,
        });
        g_prev = g;
    }
    Ok(samples)
}

/// A reservoir, a channel mode and the frozen coefficient table.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelState {
    reservoir: ReservoirSpec,
    mode: ChannelMode,
    table: CoefficientTable,
}

impl ChannelState {
    pub fn build(reservoir: ReservoirSpec, mode: ChannelMode, tau_max: f64, step: f64) -> Result<Self> {
        let table = build_table(&reservoir, mode, tau_max, step)?;
        Ok(Self {
            reservoir,
            mode,
            table,
        })
    }

    pub fn reservoir(&self) -> &ReservoirSpec {
        &self.reservoir
    }
    pub fn mode(&self) -> ChannelMode {
        self.mode
    }
    pub fn table(&self) -> &CoefficientTable {
        &self.table
    }

    /// All coefficients at `tau`: interpolated from the table, except in
    /// Markovian mode where the closed forms are evaluated directly.
    pub fn coefficients(&self, tau: f64) -> Result<TableSample> {
        let c = self.table.interpolate(tau)?;
        if self.mode == ChannelMode::Markovian {
            return Ok(markovian_samples(&self.reservoir, &[tau])[0]);
        }
        Ok(c)
    }

    pub fn big_gamma(&self, tau: f64) -> Result<f64> {
        Ok(self.coefficients(tau)?.big_gamma)
    }

    pub fn delta_gamma(&self, tau: f64) -> Result<f64> {
        Ok(self.coefficients(tau)?.delta_gamma)
    }

    /// Evolves `s0` to time `tau`. With `include_rotation` off the free
    /// rotation `τ/x` is skipped, which leaves every PPT quantity unchanged.
    pub fn evolve(&self, s0: &TwoModeGaussianState, tau: f64, include_rotation: bool) -> Result<TwoModeGaussianState> {
        if !is_physical(s0, PHYSICALITY_TOL) {
            return Err(Error::validation("initial state violates the uncertainty relation"));
        }
        let c = self.coefficients(tau)?;
        let angle = if include_rotation { tau / self.reservoir.x() } else { 0.0 };
        let out = apply_channel(s0, c.big_gamma, c.delta_gamma, angle);
        if !is_physical(&out, PHYSICALITY_TOL) {
            return Err(Error::Consistency(format!(
                "evolved state at tau = {tau} is unphysical (margin {:e})",
                out.symplectic_margin(crate::gaussian::SymplecticForm::Physicality)
            )));
        }
        Ok(out)
    }
}

pub fn big_gamma(state: &ChannelState, tau: f64) -> Result<f64> {
    state.big_gamma(tau)
}

pub fn delta_gamma(state: &ChannelState, tau: f64) -> Result<f64> {
    state.delta_gamma(tau)
}

pub fn evolve(
    state: &ChannelState,
    s0: &TwoModeGaussianState,
    tau: f64,
    include_rotation: bool,
) -> Result<TwoModeGaussianState> {
    state.evolve(s0, tau, include_rotation)
}

/// The channel map for given `Γ`, `Δ_Γ` and rotation angle, without checks.
pub fn apply_channel(s0: &TwoModeGaussianState, big_gamma: f64, delta_gamma: f64, angle: f64) -> TwoModeGaussianState {
    let r = if angle == 0.0 { *s0 } else { rotate(s0, angle) };
    let damp = (-big_gamma).exp();
    let amp = (-0.5 * big_gamma).exp();
    let mut out = r;
    for i in 0..4 {
        out.mean[i] = amp * r.mean[i];
        for j in 0..4 {
            out.cov[i][j] = damp * r.cov[i][j];
        }
        out.cov[i][i] += 0.5 * delta_gamma;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{assemble, make_twb, SymplecticForm};
    use crate::reservoir::{delta_high_t, integrated_delta_high_t};

    fn fig1(x: f64) -> ReservoirSpec {
        ReservoirSpec::new(0.01, x, 100.0).unwrap()
    }

    #[test]
    fn first_row_is_zero() {
        for mode in [ChannelMode::NonMarkovianHighT, ChannelMode::Markovian] {
            let t = build_table(&fig1(10.0), mode, 1.0, 1e-3).unwrap();
            let s = t.samples()[0];
            assert_eq!((s.tau, s.big_gamma, s.delta_gamma), (0.0, 0.0, 0.0));
            if mode != ChannelMode::Markovian {
                assert_eq!((s.gamma, s.delta), (0.0, 0.0));
            }
        }
    }

    #[test]
    fn grid_covers_range() {
        let t = build_table(&fig1(10.0), ChannelMode::Markovian, 1.0, 3e-3).unwrap();
        let last = t.samples().last().unwrap().tau;
        assert!((1.0..1.0 + 3e-3).contains(&last));
        assert!(t.interpolate(1.0).is_ok());
        assert!(matches!(t.interpolate(1.0 + 1e-9), Err(Error::OutOfRange { .. })));
        assert!(matches!(t.interpolate(-1e-12), Err(Error::OutOfRange { .. })));
        let t = build_table(&fig1(10.0), ChannelMode::Markovian, 1.0, 1e-3).unwrap();
        assert_eq!(t.samples().len(), 1001);
    }

    #[test]
    fn coarse_step_is_rejected() {
        let e = build_table(&fig1(0.01), ChannelMode::NonMarkovianHighT, 1.0, 1e-3).unwrap_err();
        assert!(matches!(e, Error::Validation(_)));
        assert!(build_table(&fig1(0.01), ChannelMode::NonMarkovianHighT, 1.0, 5e-4).is_ok());
        assert!(build_table(&fig1(10.0), ChannelMode::NonMarkovianHighT, 1.0, 0.021).is_err());
        assert!(build_table(&fig1(0.01), ChannelMode::Markovian, 1.0, 0.1).is_ok());
        assert!(build_table(&fig1(1.0), ChannelMode::Markovian, 0.0, 0.1).is_err());
        assert!(build_table(&fig1(1.0), ChannelMode::Markovian, 1.0, -0.1).is_err());
    }

    #[test]
    fn markovian_columns() {
        let s = fig1(10.0);
        let ch = ChannelState::build(s, ChannelMode::Markovian, 100.0, 0.05).unwrap();
        let gm = gamma_markov(&s);
        assert!((gm - 4.9505e-4).abs() < 1e-8);
        let n = thermal_occupation(&s);
        for &tau in &[0.0, 0.3, 7.77, 55.0, 100.0] {
            assert!((ch.big_gamma(tau).unwrap() - gm * tau).abs() < 1e-12);
            let want = (2.0 * n + 1.0) * (1.0 - (-gm * tau).exp());
            assert!((ch.delta_gamma(tau).unwrap() - want).abs() < 1e-9 * want.max(1.0));
        }
        for row in ch.table().samples() {
            assert_eq!(row.gamma, gm);
        }
    }

    #[test]
    fn markovian_delta_gamma_saturates() {
        let s = fig1(10.0);
        let gm = gamma_markov(&s);
        let tau = 20.0 / gm;
        let ch = ChannelState::build(s, ChannelMode::Markovian, tau, tau / 1000.0).unwrap();
        let level = 2.0 * thermal_occupation(&s) + 1.0;
        assert!((ch.delta_gamma(tau).unwrap() / level - 1.0).abs() < 1e-6);
    }

    #[test]
    fn high_t_delta_gamma_near_crossing() {
        let s = fig1(10.0);
        let ch = ChannelState::build(s, ChannelMode::NonMarkovianHighT, 1.0, DEFAULT_STEP).unwrap();
        let dg = ch.delta_gamma(0.65).unwrap();
        assert!((dg - 0.1720).abs() < 5e-4, "{dg}");
        // Γ is tiny here, so Δ_Γ ≈ ∫Δ
        assert!((dg - integrated_delta_high_t(&s, 0.65)).abs() < 1e-4);
    }

    /// Independent route: brute-force `e^{-Γ(τ)} ∫ e^{Γ(s)} Δ(s) ds` by
    /// adaptive quadrature of the closed forms.
    #[test]
    fn delta_gamma_matches_direct_quadrature() {
        let s = ReservoirSpec::new(0.3, 0.7, 2.0).unwrap();
        let ch = ChannelState::build(s, ChannelMode::NonMarkovianHighT, 4.0, 1e-3).unwrap();
        for &tau in &[0.5, 2.0, 4.0] {
            let gt = 2.0 * integrated_gamma(&s, tau);
            let direct = crate::numerics::integrate_adaptive(
                |u| (2.0 * integrated_gamma(&s, u) - gt).exp() * delta_high_t(&s, u),
                0.0,
                tau,
                1e-14,
                1e-13,
            )
            .unwrap()
            .value;
            let table = ch.delta_gamma(tau).unwrap();
            assert!((table - direct).abs() < 1e-10 * direct.max(1.0), "{tau}: {table} vs {direct}");
        }
    }

    #[test]
    fn big_gamma_lags_markovian_line() {
        let s = fig1(10.0);
        let ch = ChannelState::build(s, ChannelMode::NonMarkovianHighT, 30.0, 0.01).unwrap();
        let x = s.x();
        let gm = gamma_markov(&s);
        let lag = 2.0 * x * x / (1.0 + x * x);
        let g30 = ch.big_gamma(30.0).unwrap();
        assert!((g30 - 2.0 * gm * (30.0 - lag)).abs() < 1e-12, "{g30}");
    }

    #[test]
    fn evolve_at_zero_is_identity() {
        let s0 = assemble(&make_twb(0.1).unwrap()).unwrap();
        let ch = ChannelState::build(fig1(10.0), ChannelMode::NonMarkovianHighT, 1.0, 1e-3).unwrap();
        assert_eq!(ch.evolve(&s0, 0.0, true).unwrap(), s0);
        assert_eq!(ch.evolve(&s0, 0.0, false).unwrap(), s0);
    }

    #[test]
    fn strong_damping_reaches_thermal_state() {
        let mut s0 = assemble(&make_twb(0.8).unwrap()).unwrap();
        s0.mean = [1.0, -2.0, 0.5, 3.0];
        let out = apply_channel(&s0, 800.0, 7.0, 0.4);
        for i in 0..4 {
            assert!(out.mean[i].abs() < 1e-150);
            for j in 0..4 {
                let want = if i == j { 3.5 } else { 0.0 };
                assert!((out.cov[i][j] - want).abs() < 1e-150);
            }
        }
    }

    #[test]
    fn markovian_separability_time_sits_on_ppt_boundary() {
        let s = fig1(10.0);
        let r: f64 = 0.1;
        let gm = gamma_markov(&s);
        let n = thermal_occupation(&s);
        let ts = (1.0 + (1.0 - (-2.0 * r).exp()) / (2.0 * n)).ln() / gm;
        let ch = ChannelState::build(s, ChannelMode::Markovian, 1.0, 1e-3).unwrap();
        let s0 = assemble(&make_twb(r).unwrap()).unwrap();
        let out = ch.evolve(&s0, ts, false).unwrap();
        assert!(out.symplectic_margin(SymplecticForm::Ppt).abs() < 1e-6);
    }

    #[test]
    fn unphysical_input_is_rejected() {
        let mut s0 = TwoModeGaussianState::vacuum();
        s0.cov[0][0] = 0.1;
        let ch = ChannelState::build(fig1(10.0), ChannelMode::Markovian, 1.0, 1e-3).unwrap();
        assert!(matches!(ch.evolve(&s0, 0.5, false), Err(Error::Validation(_))));
    }
}
