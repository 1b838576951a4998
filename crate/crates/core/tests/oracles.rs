//! Closed forms checked against independent numerical oracles.

use approx::assert_relative_eq;
use sparsesec::channel::{sample_pattern_with, sample_slices_with, trial_rng};
use sparsesec::experiments::{beam_selection_compare, figure, Figure, Strategy};
use sparsesec::linalg::{hermitize, inverse_hpd, scaled_gram};
use sparsesec::rates::{
    bob_rate_closed_form, chi_high, chi_low, f_functional, low_snr_bound, rate_monte_carlo, rate_theorem1,
    wishart_moments, Regime,
};
use sparsesec::SystemConfig;

fn fig3_style(l_t: usize, snr_db: f64) -> SystemConfig {
    SystemConfig::symmetric(128, l_t, 4, 16, 16, 1.0, 0.6, 0.1).with_snr_db(snr_db)
}

#[test]
fn f_functional_matches_radical_difference() {
    // Direct evaluation is fine away from cancellation.
    for (x, y) in [(1.0, 1.0), (0.3, 2.0), (5.0, 0.1), (2.0, 0.7)] {
        let direct: f64 = ((x * (1.0 + f64::sqrt(y)).powi(2) + 1.0).sqrt()
            - (x * (1.0 - f64::sqrt(y)).powi(2) + 1.0).sqrt())
        .powi(2);
        assert_relative_eq!(f_functional(x, y).unwrap(), direct, max_relative = 1e-12);
    }
    assert_relative_eq!(f_functional(1.0, 1.0).unwrap(), 1.527_864_045, max_relative = 1e-9);
}

#[test]
fn wishart_inverse_diagonal_matches_sampling() {
    let cfg = SystemConfig::symmetric(128, 88, 4, 16, 16, 1.0, 0.6, 0.1);
    let w = wishart_moments(&cfg).unwrap();
    assert_relative_eq!(w.a, 29.9208, max_relative = 1e-4);
    assert_relative_eq!(w.b, 0.96087, max_relative = 1e-4);
    let draws = 1000;
    let mut acc = 0.0;
    for t in 0..draws {
        let mut rng = trial_rng(3, t);
        let p = sample_pattern_with(&cfg, &mut rng);
        let s = sample_slices_with(&cfg, &p, &mut rng);
        let mut g = scaled_gram(&s.h_hat, 1.0);
        hermitize(&mut g);
        acc += inverse_hpd(&g).unwrap().trace().re / cfg.m_e as f64;
    }
    let empirical = acc / draws as f64;
    assert_relative_eq!(empirical, w.inverse_diagonal(cfg.m_e), max_relative = 0.05);
}

#[test]
fn theorem1_tracks_monte_carlo_at_20_db() {
    for l_t in [28, 48, 88] {
        let cfg = fig3_style(l_t, 20.0);
        let mc = rate_monte_carlo(&cfg, 2000, 17).unwrap();
        let th = rate_theorem1(&cfg).unwrap();
        let tol = (0.05 * th.r_s).max(3.0 * mc.std_err);
        assert!((mc.r_s - th.r_s).abs() <= tol, "l_t={l_t}: {} vs {}", mc.r_s, th.r_s);
    }
}

#[test]
fn monte_carlo_is_not_below_theorem1_at_10_db() {
    for l_t in [28, 48, 88] {
        let cfg = fig3_style(l_t, 10.0);
        let mc = rate_monte_carlo(&cfg, 2000, 23).unwrap();
        let th = rate_theorem1(&cfg).unwrap();
        assert!(mc.r_s >= th.r_s - 2.0 * mc.std_err, "l_t={l_t}: {} < {}", mc.r_s, th.r_s);
    }
}

#[test]
fn small_eta_removes_an_penalty() {
    let mut cfg = SystemConfig::symmetric(128, 111, 4, 16, 16, 10.0, 0.6, 1e-12);
    cfg.l_t = cfg.n_t - cfg.m_e - 1;
    let reduced = 4.0 * (1.0 + 16.0 * 0.6 * 10.0 / 4.0f64).log2();
    assert_relative_eq!(bob_rate_closed_form(&cfg).unwrap(), reduced, max_relative = 1e-9);
}

#[test]
fn low_bound_dominates_exact_rate_on_fig7_sweep() {
    let spec = figure(Figure::Fig7);
    for snr_db in [-5.0, 0.0, 2.0, 5.0] {
        for &l_t in &spec.grid {
            let mut cfg = spec.base.with_snr_db(snr_db);
            cfg.l_t = l_t as usize;
            let Ok(exact) = rate_theorem1(&cfg) else { continue };
            let bound = low_snr_bound(&cfg).unwrap();
            assert!(bound >= exact.r_s, "l_t={l_t}, {snr_db} dB: bound {bound} < {}", exact.r_s);
        }
    }
}

#[test]
fn high_metric_approaches_scaled_low_metric() {
    // chi_h eta (1 - m_r / (n_t (1 - rho))) = chi_l exactly; the correction
    // vanishes as n_t grows.
    let (rho, eta, m_r) = (0.5, 0.1, 32.0);
    let mut last = f64::INFINITY;
    for n_t in [512.0, 2048.0, 8192.0, 65536.0] {
        let ratio = chi_high(rho, eta, m_r / n_t).unwrap() * eta / chi_low(rho, eta).unwrap();
        assert_relative_eq!(ratio * (1.0 - m_r / (n_t * (1.0 - rho))), 1.0, max_relative = 1e-12);
        assert!(ratio > 1.0 && ratio < last);
        last = ratio;
    }
    assert!(last - 1.0 < 0.01);
}

#[test]
fn greedy_is_close_to_exhaustive_on_small_instance() {
    let cfg = SystemConfig::symmetric(16, 6, 4, 4, 4, 10.0, 0.6, 0.1);
    let exhaustive = beam_selection_compare(&cfg, 200, 5, Strategy::Exhaustive).unwrap();
    let greedy = beam_selection_compare(&cfg, 200, 5, Strategy::Greedy).unwrap();
    let random = beam_selection_compare(&cfg, 200, 5, Strategy::Random).unwrap();
    let (ex, gr, ra) = (exhaustive.r_u - exhaustive.c_e, greedy.r_u - greedy.c_e, random.r_u - random.c_e);
    assert!(ex >= gr && ex >= ra, "exhaustive {ex}, greedy {gr}, random {ra}");
    assert!((ex - gr).abs() <= 0.05 * ex.abs(), "greedy {gr} vs exhaustive {ex}");
}

#[test]
fn gap_is_exact_metric_ratio() {
    let cfg = figure(Figure::Fig9).base;
    let g = sparsesec::rates::rate_gap((0.2, 0.1), (0.4, 0.3), &cfg, Regime::Low).unwrap();
    let expected = 4.0 * (chi_low(0.2, 0.1).unwrap() / chi_low(0.4, 0.3).unwrap()).log2();
    assert_relative_eq!(g, expected, max_relative = 1e-14);
}
