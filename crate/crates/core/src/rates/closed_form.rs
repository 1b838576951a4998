use crate::config::{linear_to_db, SystemConfig};
use crate::error::{Error, Result};

use super::{Method, RateReport};

/// `rate_low_snr` flags system SNRs above this.
pub const LOW_SNR_WARN_DB: f64 = 0.0;
/// `rate_high_snr` flags system SNRs below this.
pub const HIGH_SNR_WARN_DB: f64 = 20.0;

/// `F(x, y) = (sqrt(x (1 + sqrt y)^2 + 1) - sqrt(x (1 - sqrt y)^2 + 1))^2`.
///
/// Evaluated as `16 x^2 y / (sqrt(A) + sqrt(B))^2`, which is the same
/// quantity without the cancellation between the two radicals.
pub fn f_functional(x: f64, y: f64) -> Result<f64> {
    if !(x >= 0.0 && y >= 0.0) || !x.is_finite() || !y.is_finite() {
        return Err(Error::Domain(format!("F(x, y) needs x, y >= 0, got ({x}, {y})")));
    }
    let sy = y.sqrt();
    let a = x * (1.0 + sy).powi(2) + 1.0;
    let b = x * (1.0 - sy).powi(2) + 1.0;
    let s = a.sqrt() + b.sqrt();
    Ok(16.0 * x * x * y / (s * s))
}

/// `1 - F(alpha, beta) / (4 alpha beta)`: the asymptotic per-stream SINR loss
/// of Bob caused by AN leaking through `G_hat`.
///
/// `alpha = 0` (no AN power) and `beta = inf` (no AN beams) give 1.
pub fn bob_interference_factor(alpha: f64, beta: f64) -> f64 {
    if alpha == 0.0 || beta.is_infinite() {
        return 1.0;
    }
    // With nu = 1/alpha and s = sqrt((1+√β)² + ν) + sqrt((1-√β)² + ν), the
    // factor is (s - 2)(s + 2) / s². s - 2 is accumulated from nonnegative
    // parts so it stays accurate when alpha is large.
    let nu = 1.0 / alpha;
    let sb = beta.sqrt();
    let upper = 1.0 + sb;
    let lower = (1.0 - sb).abs();
    let ra = (upper * upper + nu).sqrt();
    let rb = (lower * lower + nu).sqrt();
    let s = ra + rb;
    let s_minus_2 = 2.0 * (sb.max(1.0) - 1.0) + nu / (ra + upper) + nu / (rb + lower);
    s_minus_2 * (s + 2.0) / (s * s)
}

/// Degrees of freedom `a` and scale `b` of the single Wishart matrix that
/// matches the first two moments of `H_hat H_hat^H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WishartMoments {
    pub a: f64,
    pub b: f64,
}

impl WishartMoments {
    /// Asymptotic diagonal of `(H_hat H_hat^H)^{-1}`: `1 / ((a - m_e) b)`.
    pub fn inverse_diagonal(&self, m_e: usize) -> f64 {
        1.0 / ((self.a - m_e as f64) * self.b)
    }
}

/// Moment-matched Wishart parameters; errors unless `a > m_e`.
pub fn wishart_moments(cfg: &SystemConfig) -> Result<WishartMoments> {
    cfg.ensure_structurally_valid()?;
    let n = cfg.n_t as f64;
    let l = cfg.l_t as f64;
    let k = n - l;
    let first = l + cfg.eta * k;
    let second = l + cfg.eta * cfg.eta * k;
    let a = first * first * k / (n * second);
    let b = second / first;
    if a <= cfg.m_e as f64 {
        return Err(Error::Unsupported(format!(
            "Wishart degrees a = {a:.4} do not exceed m_e = {}",
            cfg.m_e
        )));
    }
    Ok(WishartMoments { a, b })
}

fn reject_full_signal_power(cfg: &SystemConfig) -> Result<()> {
    if cfg.phi >= 1.0 {
        return Err(Error::Divergent(
            "Eve's capacity is unbounded without artificial noise (phi = 1)".into(),
        ));
    }
    Ok(())
}

fn alpha_beta(cfg: &SystemConfig) -> (f64, f64) {
    let alpha = (1.0 - cfg.phi) * cfg.eta * cfg.snr();
    let beta = if cfg.an_beams() == 0 {
        f64::INFINITY
    } else {
        cfg.m_r as f64 / cfg.an_beams() as f64
    };
    (alpha, beta)
}

/// Bob's large-array ergodic rate alone. Also defined where Eve's capacity
/// is not (for example `n_t - l_t < m_e`, or no AN beams at all).
pub fn bob_rate_closed_form(cfg: &SystemConfig) -> Result<f64> {
    cfg.ensure_structurally_valid()?;
    let (alpha, beta) = alpha_beta(cfg);
    let m_t = cfg.m_t as f64;
    Ok(m_t * (1.0 + cfg.m_r as f64 * cfg.phi * cfg.snr() / m_t * bob_interference_factor(alpha, beta)).log2())
}

/// Exact large-array ergodic rates.
///
/// `r_u = m_t log2(1 + m_r phi P / (m_t sigma^2) (1 - F / (4 alpha beta)))`
/// and Eve's capacity splits the `m_t` streams into a fraction `l_t/n_t` on
/// her dominant beams and the rest on nondominant ones.
pub fn rate_theorem1(cfg: &SystemConfig) -> Result<RateReport> {
    reject_full_signal_power(cfg)?;
    cfg.ensure_valid()?;
    let moments = wishart_moments(cfg)?;
    let r_u = bob_rate_closed_form(cfg)?;
    let m_t = cfg.m_t as f64;

    let n = cfg.n_t as f64;
    let l = cfg.l_t as f64;
    let c = cfg.phi * (n - l) * cfg.m_e as f64
        / ((1.0 - cfg.phi) * m_t * (moments.a - cfg.m_e as f64) * moments.b);
    let c_e = l * m_t / n * (1.0 + c).log2() + (n - l) * m_t / n * (1.0 + c * cfg.eta).log2();
    if !c_e.is_finite() || !r_u.is_finite() {
        return Err(Error::Divergent(format!("non-finite rate (r_u = {r_u}, c_e = {c_e})")));
    }
    Ok(RateReport::analytic(Method::Theorem1, r_u, c_e))
}

/// Eve's capacity for `n_t >> m_e`, split into the dominant-beam part `t1`
/// and the nondominant part `t2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EveAsymptotic {
    pub t1: f64,
    pub t2: f64,
}

impl EveAsymptotic {
    pub fn total(&self) -> f64 {
        self.t1 + self.t2
    }
}

pub fn eve_asymptotic(cfg: &SystemConfig) -> Result<EveAsymptotic> {
    reject_full_signal_power(cfg)?;
    cfg.ensure_structurally_valid()?;
    let rho = cfg.rho();
    let m_t = cfg.m_t as f64;
    let spread = rho + cfg.eta * (1.0 - rho);
    let c = cfg.phi * cfg.m_e as f64 / ((1.0 - cfg.phi) * m_t * spread);
    Ok(EveAsymptotic {
        t1: m_t * rho * (1.0 + c).log2(),
        t2: m_t * (1.0 - rho) * (1.0 + c * cfg.eta).log2(),
    })
}

/// Low-SNR form: Bob's AN loss is dropped, `r_u = m_t log2(1 + m_r phi P /
/// (m_t sigma^2))`. Eve uses [`eve_asymptotic`].
pub fn rate_low_snr(cfg: &SystemConfig) -> Result<RateReport> {
    let eve = eve_asymptotic(cfg)?;
    let m_t = cfg.m_t as f64;
    let r_u = m_t * (1.0 + cfg.m_r as f64 * cfg.phi * cfg.snr() / m_t).log2();
    let mut report = RateReport::analytic(Method::AsymptoticLow, r_u, eve.total());
    let db = linear_to_db(cfg.snr());
    if db > LOW_SNR_WARN_DB {
        report.warning = Some(format!("low-SNR form used at {db:.1} dB (> {LOW_SNR_WARN_DB} dB)"));
    }
    Ok(report)
}

/// High-SNR form: Bob is AN limited,
/// `r_u = m_t log2(1 + m_r phi / (m_t (1 - phi) eta (1 - m_r / (n_t (1 - rho)))))`.
pub fn rate_high_snr(cfg: &SystemConfig) -> Result<RateReport> {
    let eve = eve_asymptotic(cfg)?;
    let m_t = cfg.m_t as f64;
    let rho = cfg.rho();
    let headroom = 1.0 - cfg.m_r as f64 / (cfg.n_t as f64 * (1.0 - rho));
    if !(headroom > 0.0) {
        return Err(Error::Unsupported(format!(
            "high-SNR rate needs m_r < n_t - l_t (m_r = {}, n_t - l_t = {})",
            cfg.m_r,
            cfg.an_beams()
        )));
    }
    let r_u = m_t * (1.0 + cfg.m_r as f64 * cfg.phi / (m_t * (1.0 - cfg.phi) * cfg.eta * headroom)).log2();
    let mut report = RateReport::analytic(Method::AsymptoticHigh, r_u, eve.total());
    let db = linear_to_db(cfg.snr());
    if db < HIGH_SNR_WARN_DB {
        report.warning = Some(format!("high-SNR form used at {db:.1} dB (< {HIGH_SNR_WARN_DB} dB)"));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::db_to_linear;

    fn fig2(snr_db: f64) -> SystemConfig {
        SystemConfig::symmetric(128, 28, 4, 16, 16, 1.0, 0.6, 0.1).with_snr_db(snr_db)
    }

    #[test]
    fn f_vanishes_at_zero_y() {
        for x in [0.0, 0.3, 10.0, 1e8] {
            assert_eq!(f_functional(x, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn f_at_one_one() {
        // (sqrt 5 - 1)^2
        let expected = (5f64.sqrt() - 1.0).powi(2);
        assert!((f_functional(1.0, 1.0).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 1.527864).abs() < 1e-6);
    }

    #[test]
    fn f_rejects_negative() {
        assert!(matches!(f_functional(-1.0, 0.5), Err(Error::Domain(_))));
        assert!(matches!(f_functional(1.0, -0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn factor_matches_direct_form() {
        for (alpha, beta) in [(0.01, 0.3), (1.0, 0.5), (3.0, 2.0), (50.0, 0.9), (0.2, 1.0)] {
            let direct = 1.0 - f_functional(alpha, beta).unwrap() / (4.0 * alpha * beta);
            assert!((bob_interference_factor(alpha, beta) - direct).abs() < 1e-12, "{alpha} {beta}");
        }
    }

    #[test]
    fn factor_large_alpha_limit() {
        // 1 - G(nu, beta) ~ nu / (1 - beta) for small nu.
        let v = bob_interference_factor(1e6, 0.5);
        assert!((v - 2e-6).abs() < 1e-11, "{v}");
    }

    #[test]
    fn wishart_single_collapse() {
        let mut cfg = fig2(0.0);
        cfg.eta = 1.0 - 1e-15;
        let m = wishart_moments(&cfg).unwrap();
        assert!((m.a - 100.0).abs() < 1e-9 && (m.b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wishart_reference_values() {
        let mut cfg = fig2(0.0);
        cfg.l_t = 88;
        cfg.l_r = 88;
        cfg.l_e = 88;
        let m = wishart_moments(&cfg).unwrap();
        // (92^2 * 40) / (128 * 88.4), 88.4 / 92
        assert!((m.a - 338560.0 / 11315.2).abs() < 1e-10);
        assert!((m.a - 29.9208).abs() < 1e-4);
        assert!((m.b - 0.96087).abs() < 1e-5);
    }

    #[test]
    fn wishart_unsupported_regime() {
        let mut cfg = SystemConfig::symmetric(64, 40, 4, 8, 24, 1.0, 0.6, 0.1);
        cfg.l_e = 40;
        assert!(matches!(wishart_moments(&cfg), Err(Error::Unsupported(_))));
        assert!(matches!(rate_theorem1(&cfg), Err(Error::Unsupported(_))));
    }

    #[test]
    fn theorem1_diverges_without_an() {
        let mut cfg = fig2(10.0);
        cfg.phi = 1.0;
        assert!(matches!(rate_theorem1(&cfg), Err(Error::Divergent(_))));
        // Grows without bound as phi approaches one.
        let c = |phi: f64| {
            let mut cfg = fig2(10.0);
            cfg.phi = phi;
            rate_theorem1(&cfg).unwrap().c_e
        };
        assert!(c(1.0 - 1e-9) > c(1.0 - 1e-6) && c(1.0 - 1e-6) > c(0.99));
    }

    #[test]
    fn theorem1_small_eta_reduces_to_noise_limited() {
        let mut cfg = SystemConfig::symmetric(128, 128 - 16 - 1, 4, 16, 16, db_to_linear(10.0), 0.6, 1e-12);
        cfg.l_r = 111;
        let r_u = bob_rate_closed_form(&cfg).unwrap();
        let expected = 4.0 * (1.0 + 16.0 * 0.6 * cfg.snr() / 4.0).log2();
        assert!((r_u - expected).abs() < 1e-8, "{r_u} vs {expected}");
    }

    #[test]
    fn secrecy_is_positive_part() {
        for db in [-10.0, 0.0, 10.0, 30.0] {
            let r = rate_theorem1(&fig2(db)).unwrap();
            assert_eq!(r.r_s, (r.r_u - r.c_e).max(0.0));
            assert!(r.r_u >= 0.0 && r.c_e >= 0.0);
        }
    }

    #[test]
    fn eve_terms_at_full_rho() {
        let mut cfg = fig2(0.0);
        cfg.l_t = 128;
        cfg.l_r = 128;
        cfg.l_e = 128;
        let e = eve_asymptotic(&cfg).unwrap();
        assert_eq!(e.t2, 0.0);
        assert!(e.t1 > 0.0);
    }

    #[test]
    fn guardrail_warnings() {
        assert!(rate_low_snr(&fig2(-20.0)).unwrap().warning.is_none());
        assert!(rate_low_snr(&fig2(5.0)).unwrap().warning.is_some());
        assert!(rate_high_snr(&fig2(40.0)).unwrap().warning.is_none());
        assert!(rate_high_snr(&fig2(10.0)).unwrap().warning.is_some());
    }

    #[test]
    fn high_snr_needs_headroom() {
        let mut cfg = fig2(30.0);
        cfg.m_r = 100;
        cfg.l_r = 100;
        assert!(matches!(rate_high_snr(&cfg), Err(Error::Unsupported(_))));
    }
}
