//! Ergodic rates of Bob and Eve, computed by Monte Carlo over the log-det
//! expressions, in exact closed form, and in low/high-SNR asymptotic form;
//! plus the sparsity metrics built on top of them.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

mod closed_form;
mod monte_carlo;
mod sparsity;

pub use closed_form::{
    bob_interference_factor, bob_rate_closed_form, eve_asymptotic, f_functional, rate_high_snr, rate_low_snr,
    rate_theorem1, wishart_moments, EveAsymptotic, WishartMoments, HIGH_SNR_WARN_DB,
    LOW_SNR_WARN_DB,
};
pub use monte_carlo::{
    bob_rate_monte_carlo, bob_trial_rate, eve_trial_capacity, rate_monte_carlo, TrialRates,
    MAX_RETRIES,
};
pub use sparsity::{
    bounds, chi_derivatives, chi_high, chi_low, chi_low_second_derivative, chi_metrics,
    high_snr_bound, l_t_star, low_snr_bound, rate_gap, rho_star, ChiDerivatives, Regime,
    SecrecyBounds, SparsityMetrics, SECOND_DERIVATIVE_THRESHOLD,
};

/// How a [`RateReport`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    MonteCarlo,
    Theorem1,
    AsymptoticLow,
    AsymptoticHigh,
    BoundLow,
    BoundHigh,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::MonteCarlo,
        Method::Theorem1,
        Method::AsymptoticLow,
        Method::AsymptoticHigh,
        Method::BoundLow,
        Method::BoundHigh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::MonteCarlo => "monte-carlo",
            Method::Theorem1 => "theorem1",
            Method::AsymptoticLow => "asymptotic-low",
            Method::AsymptoticHigh => "asymptotic-high",
            Method::BoundLow => "bound-low",
            Method::BoundHigh => "bound-high",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s || m.name().replace('-', "_") == s)
            .ok_or_else(|| Error::Parse(format!("unknown rate method `{s}`")))
    }
}

/// Bob's rate, Eve's capacity and the secrecy rate, in bits/s/Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub r_u: f64,
    pub c_e: f64,
    /// `max(0, r_u - c_e)`.
    pub r_s: f64,
    pub method: Method,
    /// Number of Monte Carlo trials; 0 for analytic methods.
    pub trials: usize,
    /// Standard error of the per-trial secrecy difference (Monte Carlo only).
    pub std_err: f64,
    /// Trials redrawn because a covariance was numerically singular.
    pub retries: usize,
    /// Set when an asymptotic form is used outside its intended SNR regime.
    pub warning: Option<String>,
}

impl RateReport {
    pub fn analytic(method: Method, r_u: f64, c_e: f64) -> Self {
        RateReport {
            r_u,
            c_e,
            r_s: positive_part(r_u - c_e),
            method,
            trials: 0,
            std_err: 0.0,
            retries: 0,
            warning: None,
        }
    }
}

/// `[x]^+`.
pub fn positive_part(x: f64) -> f64 {
    x.max(0.0)
}
