//! The secure transmission chain.
//!
//! Alice precodes `m_t` streams with `W = sqrt(phi P / m_t) I`, maps them onto
//! the selected dominant beams `u_t_sel`, puts artificial noise (AN) of total
//! power `(1 - phi) P` on every beam outside `u_t`, and leaves the remaining
//! dominant beams silent. Bob and Eve observe the result through their
//! selected receive beams; Eve is noiseless (worst case).

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::channel::{self, seeded_rng, ChannelSlices, SparsityPattern};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::linalg::Estimate;

pub type ComplexVector = DVector<Complex64>;

/// Power split between confidential signal and AN.
///
/// Unlike [`SystemConfig`], which requires `0 < phi < 1`, this accepts the
/// closed range so the boundary cases can be exercised.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit {
    /// `phi P`.
    pub signal: f64,
    /// `(1 - phi) P`.
    pub an: f64,
}

impl PowerSplit {
    pub fn new(power: f64, phi: f64) -> Result<Self> {
        if !(power >= 0.0 && power.is_finite()) || !(0.0..=1.0).contains(&phi) {
            return Err(Error::Domain(format!(
                "power split needs power >= 0 and phi in [0, 1], got power={power}, phi={phi}"
            )));
        }
        Ok(PowerSplit { signal: phi * power, an: (1.0 - phi) * power })
    }

    pub fn from_config(cfg: &SystemConfig) -> Self {
        PowerSplit { signal: cfg.phi * cfg.power, an: (1.0 - cfg.phi) * cfg.power }
    }

    /// Per-stream signal variance `phi P / m_t`.
    pub fn signal_per_stream(&self, m_t: usize) -> f64 {
        self.signal / m_t as f64
    }

    /// Per-beam AN variance `(1 - phi) P / (n_t - l_t)`; zero without AN beams.
    pub fn an_per_beam(&self, an_beams: usize) -> f64 {
        if an_beams == 0 {
            0.0
        } else {
            self.an / an_beams as f64
        }
    }
}

/// One transmitted symbol vector and its building blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmitFrame {
    /// Confidential symbols, `CN(0, I)`, one per RF chain.
    pub s: ComplexVector,
    /// Precoded signal `W s`.
    pub x_tilde: ComplexVector,
    /// Artificial noise on the `n_t - l_t` nondominant beams.
    pub an: ComplexVector,
    /// Beamspace transmit vector of length `n_t`.
    pub x_v: ComplexVector,
}

/// Draws a frame for an explicit power split.
pub fn build_frame_with<R: Rng + ?Sized>(
    split: PowerSplit,
    n_t: usize,
    pattern: &SparsityPattern,
    rng: &mut R,
) -> TransmitFrame {
    let m_t = pattern.u_t_sel.len();
    let an_beams = pattern.an_beams(n_t);
    let s = ComplexVector::from_fn(m_t, |_, _| channel::complex_normal(rng, 1.0));
    let x_tilde = &s * Complex64::new(split.signal_per_stream(m_t).sqrt(), 0.0);
    let an_var = split.an_per_beam(an_beams.len());
    let an = ComplexVector::from_fn(an_beams.len(), |_, _| channel::complex_normal(rng, an_var));
    let mut x_v = ComplexVector::zeros(n_t);
    for (k, &j) in pattern.u_t_sel.iter().enumerate() {
        x_v[j] = x_tilde[k];
    }
    for (k, &j) in an_beams.iter().enumerate() {
        x_v[j] = an[k];
    }
    TransmitFrame { s, x_tilde, an, x_v }
}

/// Draws a frame for `cfg`. Deterministic in `seed`.
pub fn build_frame(cfg: &SystemConfig, pattern: &SparsityPattern, seed: u64) -> Result<TransmitFrame> {
    cfg.ensure_structurally_valid()?;
    pattern.check(cfg)?;
    Ok(build_frame_with(PowerSplit::from_config(cfg), cfg.n_t, pattern, &mut seeded_rng(seed)))
}

fn check_dims(what: &str, bar: (usize, usize), hat: (usize, usize), frame: &TransmitFrame) -> Result<()> {
    if bar.1 != frame.x_tilde.len() || hat.1 != frame.an.len() || bar.0 != hat.0 {
        return Err(Error::Dimension(format!(
            "{what}: slices {}x{} and {}x{} do not fit signal {} / AN {}",
            bar.0,
            bar.1,
            hat.0,
            hat.1,
            frame.x_tilde.len(),
            frame.an.len()
        )));
    }
    Ok(())
}

/// Bob's detection vector for an explicit generator.
pub fn receive_bob_with<R: Rng + ?Sized>(
    frame: &TransmitFrame,
    slices: &ChannelSlices,
    noise_var: f64,
    rng: &mut R,
) -> Result<ComplexVector> {
    check_dims("bob", slices.g_bar.shape(), slices.g_hat.shape(), frame)?;
    let mut y = &slices.g_bar * &frame.x_tilde + &slices.g_hat * &frame.an;
    if noise_var > 0.0 {
        for v in y.iter_mut() {
            *v += channel::complex_normal(rng, noise_var);
        }
    }
    Ok(y)
}

/// `G_bar x_tilde + G_hat an + n`, with `n ~ CN(0, noise_var I)` drawn in the
/// beamspace directly. Deterministic in `seed`.
pub fn receive_bob(
    frame: &TransmitFrame,
    slices: &ChannelSlices,
    noise_var: f64,
    seed: u64,
) -> Result<ComplexVector> {
    receive_bob_with(frame, slices, noise_var, &mut seeded_rng(seed))
}

/// `H_bar x_tilde + H_hat an`. Eve's thermal noise is neglected.
pub fn receive_eve(frame: &TransmitFrame, slices: &ChannelSlices) -> Result<ComplexVector> {
    check_dims("eve", slices.h_bar.shape(), slices.h_hat.shape(), frame)?;
    Ok(&slices.h_bar * &frame.x_tilde + &slices.h_hat * &frame.an)
}

/// Expected leaked power as a fraction of `P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeakageReport {
    /// `E ||G_hat an||^2 / P`: AN arriving on Bob's selected beams.
    pub an_to_bob: f64,
    /// `E ||H_bar x_tilde||^2 / P`: signal arriving on Eve's selected beams.
    pub info_to_eve: f64,
}

/// Closed-form leakage for explicit parameters, `phi` in `[0, 1]`.
///
/// Each `G_hat` entry has variance `eta` and the AN beams share `(1 - phi) P`,
/// so `an_to_bob = (1 - phi) eta m_r`. A selected transmit beam is dominant
/// for Eve with probability `l_t / n_t`, so `info_to_eve = phi m_e (l_t +
/// eta (n_t - l_t)) / n_t`.
pub fn leakage_fractions(
    phi: f64,
    eta: f64,
    n_t: usize,
    l_t: usize,
    m_r: usize,
    m_e: usize,
) -> LeakageReport {
    let an_to_bob = if l_t < n_t { (1.0 - phi) * eta * m_r as f64 } else { 0.0 };
    let dominant = l_t as f64 + eta * (n_t - l_t) as f64;
    let info_to_eve = phi * m_e as f64 * dominant / n_t as f64;
    LeakageReport { an_to_bob, info_to_eve }
}

/// Closed-form leakage for `cfg`.
pub fn leakage(cfg: &SystemConfig) -> Result<LeakageReport> {
    cfg.ensure_structurally_valid()?;
    Ok(leakage_fractions(cfg.phi, cfg.eta, cfg.n_t, cfg.l_t, cfg.m_r, cfg.m_e))
}

/// Monte Carlo leakage estimate with standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeakageEstimate {
    pub an_to_bob: Estimate,
    pub info_to_eve: Estimate,
}

/// Averages `||G_hat an||^2 / P` and `||H_bar x_tilde||^2 / P` over fresh
/// patterns, channels and frames. Trial `t` draws from `trial_rng(seed, t)`.
pub fn leakage_monte_carlo(cfg: &SystemConfig, trials: usize, seed: u64) -> Result<LeakageEstimate> {
    cfg.ensure_structurally_valid()?;
    if trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    let split = PowerSplit::from_config(cfg);
    let samples: Vec<(f64, f64)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = channel::trial_rng(seed, t);
            let pattern = channel::sample_pattern_with(cfg, &mut rng);
            let slices = channel::sample_slices_with(cfg, &pattern, &mut rng);
            let frame = build_frame_with(split, cfg.n_t, &pattern, &mut rng);
            let to_bob = (&slices.g_hat * &frame.an).norm_squared() / cfg.power;
            let to_eve = (&slices.h_bar * &frame.x_tilde).norm_squared() / cfg.power;
            (to_bob, to_eve)
        })
        .collect();
    let (bob, eve): (Vec<f64>, Vec<f64>) = samples.into_iter().unzip();
    Ok(LeakageEstimate {
        an_to_bob: Estimate::from_samples(&bob),
        info_to_eve: Estimate::from_samples(&eve),
    })
}
