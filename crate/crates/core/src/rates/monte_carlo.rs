//! Monte Carlo log-det estimates of Bob's rate and Eve's capacity.
//!
//! Each trial draws a fresh sparsity pattern, fresh selectors and fresh
//! channel slices from `trial_rng(seed, t)`, so the estimate depends only on
//! `(cfg, trials, seed)` and not on how rayon schedules the work.

use rayon::prelude::*;

use crate::channel::{sample_pattern_with, sample_slices_with, trial_rng, ChannelSlices};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::linalg::{self, hermitize, log2_det_hpd, log2_det_well_conditioned, scaled_gram, Estimate};
use crate::scheme::PowerSplit;

use super::{positive_part, Method, RateReport};

/// Redraws allowed for a single trial before giving up.
pub const MAX_RETRIES: usize = 64;

/// Instantaneous rates of one channel realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRates {
    pub bob: f64,
    pub eve: f64,
}

fn add_identity(k: &mut crate::channel::ComplexMatrix, v: f64) {
    for i in 0..k.nrows() {
        k[(i, i)].re += v;
    }
}

/// `log2|K_interf + bar C bar^H| - log2|K_interf|`, `None` when `K_interf` is
/// numerically singular.
fn log_det_ratio(
    bar: &crate::channel::ComplexMatrix,
    cx: f64,
    mut interf: crate::channel::ComplexMatrix,
) -> Option<f64> {
    hermitize(&mut interf);
    let interf_det = log2_det_well_conditioned(&interf)?;
    let mut total = scaled_gram(bar, cx) + &interf;
    hermitize(&mut total);
    let rate = log2_det_hpd(&total)? - interf_det;
    Some(rate.max(0.0))
}

/// `log2|I + G_bar C_X G_bar^H (G_hat C_AN G_hat^H + s2 I)^-1|` with
/// `C_X = cx I`, `C_AN = can I`. `None` if the interference-plus-noise
/// covariance is numerically singular.
pub fn bob_trial_rate(slices: &ChannelSlices, cx: f64, can: f64, noise_var: f64) -> Option<f64> {
    let mut interf = scaled_gram(&slices.g_hat, can);
    add_identity(&mut interf, noise_var);
    log_det_ratio(&slices.g_bar, cx, interf)
}

/// `log2|I + H_bar C_X H_bar^H (H_hat C_AN H_hat^H)^-1|` for a noiseless Eve.
///
/// Without AN the capacity is unbounded and the call is unsupported; a
/// numerically singular AN covariance is reported as divergent.
pub fn eve_trial_capacity(slices: &ChannelSlices, cx: f64, can: f64) -> Result<f64> {
    if !(can > 0.0) || slices.h_hat.ncols() == 0 {
        return Err(Error::Unsupported("Eve's capacity needs artificial noise to be finite".into()));
    }
    if slices.h_hat.ncols() < slices.h_hat.nrows() {
        return Err(Error::Unsupported(format!(
            "{} AN beams cannot cover {} eavesdropper chains",
            slices.h_hat.ncols(),
            slices.h_hat.nrows()
        )));
    }
    log_det_ratio(&slices.h_bar, cx, scaled_gram(&slices.h_hat, can))
        .ok_or_else(|| Error::Divergent("AN covariance at Eve is numerically singular".into()))
}

struct Covariances {
    cx: f64,
    can: f64,
}

fn covariances(cfg: &SystemConfig) -> Covariances {
    let split = PowerSplit::from_config(cfg);
    Covariances { cx: split.signal_per_stream(cfg.m_t), can: split.an_per_beam(cfg.an_beams()) }
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    Ok(())
}

fn exhausted(t: u64) -> Error {
    Error::Divergent(format!("trial {t}: covariance stayed singular after {MAX_RETRIES} redraws"))
}

/// Runs one trial, redrawing with the same generator while a covariance is
/// ill-conditioned. Returns the rates and the number of redraws.
fn secrecy_trial(cfg: &SystemConfig, cov: &Covariances, seed: u64, t: u64) -> Result<(TrialRates, usize)> {
    let mut rng = trial_rng(seed, t);
    for retries in 0..=MAX_RETRIES {
        let pattern = sample_pattern_with(cfg, &mut rng);
        let slices = sample_slices_with(cfg, &pattern, &mut rng);
        let Some(bob) = bob_trial_rate(&slices, cov.cx, cov.can, cfg.noise_var) else {
            continue;
        };
        match eve_trial_capacity(&slices, cov.cx, cov.can) {
            Ok(eve) => return Ok((TrialRates { bob, eve }, retries)),
            Err(Error::Divergent(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(exhausted(t))
}

/// Monte Carlo estimate of `R_U`, `C_E` and `R_S` over `trials` independent
/// realizations. `std_err` is the standard error of the per-trial
/// difference `R_U - C_E`.
pub fn rate_monte_carlo(cfg: &SystemConfig, trials: usize, seed: u64) -> Result<RateReport> {
    cfg.ensure_valid()?;
    check_trials(trials)?;
    let cov = covariances(cfg);
    let outcomes: Vec<(TrialRates, usize)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| secrecy_trial(cfg, &cov, seed, t))
        .collect::<Result<_>>()?;
    let n = trials as f64;
    let r_u = linalg::neumaier_sum(outcomes.iter().map(|(r, _)| r.bob)) / n;
    let c_e = linalg::neumaier_sum(outcomes.iter().map(|(r, _)| r.eve)) / n;
    let diffs: Vec<f64> = outcomes.iter().map(|(r, _)| r.bob - r.eve).collect();
    Ok(RateReport {
        r_u,
        c_e,
        r_s: positive_part(r_u - c_e),
        method: Method::MonteCarlo,
        trials,
        std_err: Estimate::from_samples(&diffs).std_err,
        retries: outcomes.iter().map(|(_, k)| k).sum(),
        warning: None,
    })
}

/// Monte Carlo estimate of Bob's rate alone. Needs only structural validity,
/// so `l_t = n_t` (no AN beams) is allowed.
pub fn bob_rate_monte_carlo(cfg: &SystemConfig, trials: usize, seed: u64) -> Result<Estimate> {
    cfg.ensure_structurally_valid()?;
    check_trials(trials)?;
    let cov = covariances(cfg);
    let rates: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            for _ in 0..=MAX_RETRIES {
                let pattern = sample_pattern_with(cfg, &mut rng);
                let slices = sample_slices_with(cfg, &pattern, &mut rng);
                if let Some(r) = bob_trial_rate(&slices, cov.cx, cov.can, cfg.noise_var) {
                    return Ok(r);
                }
            }
            Err(exhausted(t))
        })
        .collect::<Result<_>>()?;
    Ok(Estimate::from_samples(&rates))
}
