use pyo3::ffi::c_str;
use pyo3::prelude::*;
use sparsesec_py::sparsesec_py;

#[test]
fn module_exposes_core_operations() {
    pyo3::append_to_inittab!(sparsesec_py);
    Python::initialize();
    Python::attach(|py| {
        py.run(
            c_str!(
                r#"
import sparsesec_py as ss
cfg = ss.SystemConfig(n_t=512, eta=0.1)
m = ss.chi_metrics(0.3, 0.1, cfg)
assert m["l_t_star"] == 165, m
ref = ss.SystemConfig().with_snr_db(20.0)
r = ss.rate(ref, "theorem1")
assert r.r_s == max(0.0, r.r_u - r.c_e)
assert ss.rate(ref, "monte-carlo", trials=20, seed=3).trials == 20
try:
    ss.rate(ss.SystemConfig(m_t=40))
    raise SystemExit("accepted invalid config")
except ss.InvalidConfigError:
    pass
try:
    ss.rate_theorem1(ss.SystemConfig.symmetric(64, 44, 4, 4, 16, 1.0, 0.6, 0.1))
    raise SystemExit("accepted unsupported regime")
except ss.UnsupportedRegimeError:
    pass
"#
            ),
            None,
            None,
        )
        .unwrap();
    });
}
