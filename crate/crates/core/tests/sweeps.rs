use sparsesec::experiments::{figure, run_sweep, Figure, Metric};
use sparsesec::rates::Method;

#[test]
fn fig2_exact_curves_rise_then_saturate() {
    let mut spec = figure(Figure::Fig2);
    spec.metrics = vec![Metric::Rate(Method::Theorem1)];
    spec.grid = (-10..=60).step_by(5).map(f64::from).collect();
    let r = run_sweep(&spec).unwrap();
    for curve in &spec.curves {
        let ys = r.column(&format!("theorem1.r_s[{}]", curve.label())).unwrap();
        assert!(ys.windows(2).all(|w| w[1] >= w[0]), "{}: {ys:?}", curve.label());
        let tail = ys[ys.len() - 1] - ys[ys.len() - 2];
        let head = ys.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        assert!(tail < 0.05 * head, "{}: not saturating", curve.label());
    }
    // The densest channel does worst.
    let at = |l: &str| r.column(&format!("theorem1.r_s[l_t={l}]")).unwrap()[8];
    assert!(at("28") > at("88") && at("48") > at("88"));
}

#[test]
fn fig3_exact_curves_increase_in_m_t() {
    let mut spec = figure(Figure::Fig3);
    spec.metrics = vec![Metric::Rate(Method::Theorem1)];
    let r = run_sweep(&spec).unwrap();
    for curve in &spec.curves {
        let ys = r.column(&format!("theorem1.r_s[{}]", curve.label())).unwrap();
        assert!(ys.windows(2).all(|w| w[1] > w[0]), "{}: {ys:?}", curve.label());
    }
}

#[test]
fn monte_carlo_sweep_is_reproducible() {
    let mut spec = figure(Figure::Fig4);
    spec.metrics = vec![Metric::Rate(Method::MonteCarlo)];
    spec.trials = 50;
    spec.seed = 99;
    let a = run_sweep(&spec).unwrap().to_csv();
    let b = run_sweep(&spec).unwrap().to_csv();
    assert_eq!(a, b);
    spec.seed = 100;
    assert_ne!(run_sweep(&spec).unwrap().to_csv(), a);
}

#[test]
fn leakage_sweep_follows_power_split() {
    let mut spec = figure(Figure::Fig5);
    spec.trials = 300;
    let r = run_sweep(&spec).unwrap();
    for curve in &spec.curves {
        let an = r.column(&format!("leakage.an_to_bob[{}]", curve.label())).unwrap();
        let info = r.column(&format!("leakage.info_to_eve[{}]", curve.label())).unwrap();
        assert!(an.windows(2).all(|w| w[1] < w[0]));
        assert!(info.windows(2).all(|w| w[1] > w[0]));
        let an_mc = r.column(&format!("leakage-monte-carlo.an_to_bob[{}]", curve.label())).unwrap();
        let se = r.column(&format!("leakage-monte-carlo.an_to_bob_std_err[{}]", curve.label())).unwrap();
        for i in 0..an.len() {
            assert!((an[i] - an_mc[i]).abs() <= 4.0 * se[i] + 1e-12, "phi point {i}");
        }
    }
}
