//! Sparsity metrics `chi_l`, `chi_h`, the optimal angle-domain sparsity, the
//! secrecy-rate upper bounds built from them, and their derivatives.

use crate::config::SystemConfig;
use crate::error::{Error, Result};

use super::positive_part;

/// `eta` at which the curvature of `chi_l` in `rho`, evaluated at `rho = 1`,
/// changes sign: the root of `2 - 2 eta + ln eta = 0` in `(0, 1)`.
pub const SECOND_DERIVATIVE_THRESHOLD: f64 = 0.203_187_869_979_979_4;

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Domain(format!("eta = {eta} outside (0, 1]")));
    }
    Ok(())
}

fn check_rho_closed(rho: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::Domain(format!("rho = {rho} outside [0, 1]")));
    }
    Ok(())
}

/// Low-SNR sparsity metric `eta^(rho - 1) (eta + (1 - eta) rho)`, on
/// `rho in [0, 1]`, `eta in (0, 1]`.
pub fn chi_low(rho: f64, eta: f64) -> Result<f64> {
    check_rho_closed(rho)?;
    check_eta(eta)?;
    Ok(eta.powf(rho - 1.0) * (eta + (1.0 - eta) * rho))
}

/// High-SNR sparsity metric
/// `eta^(rho - 2) (eta + (1 - eta) rho) / (1 - m_r / (n_t (1 - rho)))`,
/// defined for `rho < 1 - m_r / n_t`.
pub fn chi_high(rho: f64, eta: f64, m_r_over_n_t: f64) -> Result<f64> {
    check_rho_closed(rho)?;
    check_eta(eta)?;
    let headroom = headroom(rho, m_r_over_n_t)?;
    Ok(eta.powf(rho - 2.0) * (eta + (1.0 - eta) * rho) / headroom)
}

fn headroom(rho: f64, m_r_over_n_t: f64) -> Result<f64> {
    if !(rho < 1.0 - m_r_over_n_t) {
        return Err(Error::Unsupported(format!(
            "chi_h needs rho < 1 - m_r/n_t (rho = {rho}, m_r/n_t = {m_r_over_n_t})"
        )));
    }
    Ok(1.0 - m_r_over_n_t / (1.0 - rho))
}

/// Angle-domain sparsity maximizing `chi_l`: `-1/ln(eta) - eta/(1 - eta)`.
pub fn rho_star(eta: f64) -> Result<f64> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Domain(format!("eta = {eta} outside (0, 1)")));
    }
    Ok(-1.0 / eta.ln() - eta / (1.0 - eta))
}

/// `n_t rho*` rounded to the nearest integer (ties up), clamped to
/// `[m_t, n_t - m_r - 1]` so that `chi_h` stays defined.
pub fn l_t_star(rho_star: f64, cfg: &SystemConfig) -> usize {
    let raw = (cfg.n_t as f64 * rho_star + 0.5).floor().max(0.0) as usize;
    let hi = cfg.n_t.saturating_sub(cfg.m_r + 1).max(cfg.m_t);
    raw.clamp(cfg.m_t, hi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparsityMetrics {
    pub chi_l: f64,
    pub chi_h: f64,
    pub rho_star: f64,
    pub l_t_star: usize,
}

/// Both metrics at `(rho, eta)` plus the optimum; `cfg` supplies `n_t`,
/// `m_t`, `m_r`.
pub fn chi_metrics(rho: f64, eta: f64, cfg: &SystemConfig) -> Result<SparsityMetrics> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Domain(format!("rho = {rho} outside (0, 1)")));
    }
    let rho_star = rho_star(eta)?;
    let ratio = cfg.m_r as f64 / cfg.n_t as f64;
    Ok(SparsityMetrics {
        chi_l: chi_low(rho, eta)?,
        chi_h: chi_high(rho, eta, ratio)?,
        rho_star,
        l_t_star: l_t_star(rho_star, cfg),
    })
}

/// Closed-form partial derivatives of the metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiDerivatives {
    pub d_chi_l_d_rho: f64,
    pub d_chi_l_d_eta: f64,
    pub d_chi_h_d_rho: f64,
    pub d_chi_h_d_eta: f64,
    pub d_rho_star_d_eta: f64,
}

/// Derivatives at an interior point `rho in (0, 1 - m_r/n_t)`, `eta in (0, 1)`.
pub fn chi_derivatives(rho: f64, eta: f64, m_r_over_n_t: f64) -> Result<ChiDerivatives> {
    if !(rho > 0.0 && rho < 1.0 && eta > 0.0 && eta < 1.0) {
        return Err(Error::Domain(format!("({rho}, {eta}) is not an interior point")));
    }
    let r = m_r_over_n_t;
    let gap = 1.0 - rho - r;
    if !(gap > 0.0) {
        return Err(Error::Unsupported(format!("chi_h needs rho < 1 - m_r/n_t, got rho = {rho}")));
    }
    let ln = eta.ln();
    let q = eta + (1.0 - eta) * rho;
    let inv_headroom = (1.0 - rho) / gap;
    let d_chi_l_d_rho = eta.powf(rho - 1.0) * (1.0 - eta + ln * q);
    let d_chi_l_d_eta = -(1.0 - rho) * rho * (1.0 - eta) * eta.powf(rho - 2.0);
    // Product rule on eta^(rho-2) q and (1 - rho) / (1 - rho - r).
    let d_chi_h_d_rho = eta.powf(rho - 2.0) / (gap * gap)
        * ((1.0 - eta + ln * q) * (1.0 - rho) * gap + r * q);
    let d_chi_h_d_eta =
        (rho * (rho - 2.0) - eta * (rho - 1.0).powi(2)) * eta.powf(rho - 3.0) * inv_headroom;
    let s = eta.sqrt();
    let d_rho_star_d_eta =
        (1.0 / s - s + ln) * (1.0 / s - s - ln) / ((1.0 - eta) * ln).powi(2);
    Ok(ChiDerivatives { d_chi_l_d_rho, d_chi_l_d_eta, d_chi_h_d_rho, d_chi_h_d_eta, d_rho_star_d_eta })
}

/// `d^2 chi_l / d rho^2 = eta^(rho-1) ln(eta) (2 - 2 eta + ln(eta) q)`.
pub fn chi_low_second_derivative(rho: f64, eta: f64) -> Result<f64> {
    check_rho_closed(rho)?;
    check_eta(eta)?;
    let ln = eta.ln();
    Ok(eta.powf(rho - 1.0) * ln * (2.0 - 2.0 * eta + ln * (eta + (1.0 - eta) * rho)))
}

/// Upper bounds on the ergodic secrecy rate at low and high SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecrecyBounds {
    pub low: f64,
    pub high: f64,
}

/// `m_t [log2(1 + m_r phi P/(m_t s2)) - log2(phi m_e / ((1 - phi) m_t)) + log2 chi_l]^+`.
pub fn low_snr_bound(cfg: &SystemConfig) -> Result<f64> {
    cfg.ensure_structurally_valid()?;
    let m_t = cfg.m_t as f64;
    let bob = (1.0 + cfg.m_r as f64 * cfg.phi * cfg.snr() / m_t).log2();
    let eve = (cfg.phi * cfg.m_e as f64 / ((1.0 - cfg.phi) * m_t)).log2();
    let bonus = chi_low(cfg.rho(), cfg.eta)?.log2();
    Ok(m_t * positive_part(bob - eve + bonus))
}

/// `m_t [log2(m_r / m_e) + log2 chi_h]^+`.
pub fn high_snr_bound(cfg: &SystemConfig) -> Result<f64> {
    cfg.ensure_structurally_valid()?;
    let chi = chi_high(cfg.rho(), cfg.eta, cfg.m_r as f64 / cfg.n_t as f64)?;
    Ok(cfg.m_t as f64 * positive_part((cfg.m_r as f64 / cfg.m_e as f64).log2() + chi.log2()))
}

pub fn bounds(cfg: &SystemConfig) -> Result<SecrecyBounds> {
    Ok(SecrecyBounds { low: low_snr_bound(cfg)?, high: high_snr_bound(cfg)? })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Low,
    High,
}

/// Secrecy-rate difference `m_t log2(chi(p1) / chi(p2))` between two
/// channels with sparsity `(rho, eta)`.
pub fn rate_gap(p1: (f64, f64), p2: (f64, f64), cfg: &SystemConfig, regime: Regime) -> Result<f64> {
    let chi = |(rho, eta): (f64, f64)| -> Result<f64> {
        if !(rho > 0.0 && rho < 1.0 && eta > 0.0 && eta < 1.0) {
            return Err(Error::Domain(format!("({rho}, {eta}) is outside the metric domain")));
        }
        match regime {
            Regime::Low => chi_low(rho, eta),
            Regime::High => chi_high(rho, eta, cfg.m_r as f64 / cfg.n_t as f64),
        }
    };
    Ok(cfg.m_t as f64 * (chi(p1)? / chi(p2)?).log2())
}
