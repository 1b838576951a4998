"""Smoke test for the Python bindings. Run after installing crates/py."""

import math

import sparsesec_py as ss


def main():
    cfg = ss.SystemConfig(n_t=512, eta=0.1)
    m = ss.chi_metrics(0.3, cfg.eta, cfg)
    assert m["l_t_star"] == 165, m
    assert abs(m["rho_star"] - 0.323183) < 1e-6, m
    print("chi_metrics:", m)

    ref = ss.SystemConfig().with_snr_db(20.0)
    assert ref.validate() == []
    exact = ss.rate_theorem1(ref)
    mc = ss.rate_monte_carlo(ref, trials=200, seed=1)
    assert exact.method == "theorem1" and mc.method == "monte-carlo"
    assert mc.trials == 200 and mc.std_err > 0
    assert abs(mc.r_s - exact.r_s) < 0.1 * exact.r_s, (mc, exact)
    assert mc.r_s == ss.rate_monte_carlo(ref, trials=200, seed=1).r_s
    print("rates:", exact, mc)

    low, high = ss.bounds(ref)
    assert math.isfinite(low) and math.isfinite(high)
    print("bounds:", low, high)

    bad = ss.SystemConfig(m_t=40)
    assert any("m_t <= l_t" in v for v in bad.validate()), bad.validate()
    try:
        ss.rate(bad)
    except ss.InvalidConfigError as e:
        print("rejected:", e)
    else:
        raise AssertionError("invalid config accepted")

    assert ss.SystemConfig.parse(str(ref)) == ref

    csv = ss.figure_csv("fig3", trials=10, seed=7)
    lines = csv.splitlines()
    assert lines[0].startswith("# axis=m_t") and lines[1].startswith("m_t,")
    assert len(lines) == 2 + 6
    print("figure csv:", len(lines), "lines")
    print("smoke test passed")


if __name__ == "__main__":
    main()
