//! Parameter sweeps and their CSV form.
//!
//! A sweep evaluates a set of metrics along one axis for one or more
//! curves. A curve is a set of overrides applied to the base config before
//! the axis value. Points where a metric is undefined (for example the exact
//! Eve capacity when `a <= m_e`) are written as `NaN`; a point whose config
//! is invalid aborts the whole sweep.

use std::fmt::{self, Write as _};
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::config::{db_to_linear, SystemConfig, KEYS};
use crate::error::{Error, Result};
use crate::rates::{self, Method, RateReport};
use crate::scheme;

mod beam;
mod presets;

pub use beam::{beam_selection_compare, binomial, Strategy, EVE_EXHAUSTIVE_CAP, EXHAUSTIVE_CAP, MAX_SWAP_EVALUATIONS};
pub use presets::{figure, Figure, BEAM_SELECTION_TRIALS, DEFAULT_TRIALS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    SnrDb,
    MT,
    ME,
    LT,
    Phi,
    /// Sets `l_t = round(rho n_t)`.
    Rho,
    Eta,
}

impl Axis {
    pub const ALL: [Axis; 7] = [Axis::SnrDb, Axis::MT, Axis::ME, Axis::LT, Axis::Phi, Axis::Rho, Axis::Eta];

    pub fn name(self) -> &'static str {
        match self {
            Axis::SnrDb => "snr_db",
            Axis::MT => "m_t",
            Axis::ME => "m_e",
            Axis::LT => "l_t",
            Axis::Phi => "phi",
            Axis::Rho => "rho",
            Axis::Eta => "eta",
        }
    }

    fn is_integer(self) -> bool {
        matches!(self, Axis::MT | Axis::ME | Axis::LT)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Axis::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown sweep axis `{s}`")))
    }
}

/// Sets `key` on `cfg`. Besides the config keys this understands `snr_db`
/// (sets `power`) and `rho` (sets `l_t`).
pub fn apply_override(cfg: &mut SystemConfig, key: &str, value: f64) -> Result<()> {
    match key {
        "snr_db" => cfg.power = db_to_linear(value) * cfg.noise_var,
        "rho" => {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::Sweep(format!("rho = {value} is not a valid sparsity")));
            }
            cfg.l_t = (value * cfg.n_t as f64).round() as usize;
        }
        _ if KEYS.contains(&key) => {
            let is_count = !matches!(key, "power" | "noise_var" | "phi" | "eta");
            if is_count && (value.fract() != 0.0 || value < 0.0) {
                return Err(Error::Sweep(format!("{key} = {value} must be a nonnegative integer")));
            }
            cfg.set(key, &value.to_string())?;
        }
        _ => return Err(Error::Sweep(format!("unknown override key `{key}`"))),
    }
    Ok(())
}

/// A named set of overrides, e.g. `snr_db=6` or `rho=0.1 eta=0.1`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Curve {
    pub overrides: Vec<(String, f64)>,
}

impl Curve {
    pub fn new<K: Into<String>>(overrides: impl IntoIterator<Item = (K, f64)>) -> Self {
        Curve { overrides: overrides.into_iter().map(|(k, v)| (k.into(), v)).collect() }
    }

    pub fn label(&self) -> String {
        self.overrides.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
    }

    pub fn apply(&self, cfg: &mut SystemConfig) -> Result<()> {
        self.overrides.iter().try_for_each(|(k, v)| apply_override(cfg, k, *v))
    }
}

impl FromStr for Curve {
    type Err = Error;

    /// Parses `key=value` pairs separated by spaces or commas.
    fn from_str(s: &str) -> Result<Self> {
        let mut overrides = Vec::new();
        for item in s.split([' ', ',']).filter(|t| !t.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value in curve, got `{item}`")))?;
            let v: f64 = v.parse().map_err(|_| Error::Parse(format!("invalid curve value `{v}`")))?;
            overrides.push((k.to_string(), v));
        }
        Ok(Curve { overrides })
    }
}

/// Something evaluated at each sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Rate(Method),
    /// Closed-form leakage fractions.
    Leakage,
    LeakageMonteCarlo,
    BeamSelection(Strategy),
}

impl Metric {
    pub fn name(self) -> String {
        match self {
            Metric::Rate(m) => m.name().to_string(),
            Metric::Leakage => "leakage".into(),
            Metric::LeakageMonteCarlo => "leakage-monte-carlo".into(),
            Metric::BeamSelection(s) => format!("beam-{s}"),
        }
    }

    fn columns(self) -> Vec<String> {
        let base = self.name();
        let fields: &[&str] = match self {
            Metric::Rate(Method::MonteCarlo) | Metric::BeamSelection(_) => &["r_u", "c_e", "r_s", "r_s_std_err"],
            Metric::Rate(_) => &["r_u", "c_e", "r_s"],
            Metric::Leakage => &["an_to_bob", "info_to_eve"],
            Metric::LeakageMonteCarlo => &["an_to_bob", "info_to_eve", "an_to_bob_std_err", "info_to_eve_std_err"],
        };
        fields.iter().map(|f| format!("{base}.{f}")).collect()
    }

    fn evaluate(self, cfg: &SystemConfig, trials: usize, seed: u64) -> Result<Vec<f64>> {
        let width = self.columns().len();
        let rate_cells = |r: RateReport| {
            let mut v = vec![r.r_u, r.c_e, r.r_s];
            if width == 4 {
                v.push(r.std_err);
            }
            v
        };
        let out = match self {
            Metric::Rate(m) => evaluate_rate(m, cfg, trials, seed).map(rate_cells),
            Metric::BeamSelection(s) => beam_selection_compare(cfg, trials, seed, s).map(rate_cells),
            Metric::Leakage => scheme::leakage(cfg).map(|l| vec![l.an_to_bob, l.info_to_eve]),
            Metric::LeakageMonteCarlo => scheme::leakage_monte_carlo(cfg, trials, seed).map(|l| {
                vec![l.an_to_bob.mean, l.info_to_eve.mean, l.an_to_bob.std_err, l.info_to_eve.std_err]
            }),
        };
        match out {
            Ok(v) => Ok(v),
            Err(Error::Unsupported(_) | Error::Divergent(_)) => Ok(vec![f64::NAN; width]),
            Err(e) => Err(e),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "leakage" => Ok(Metric::Leakage),
            "leakage-monte-carlo" | "leakage_monte_carlo" => Ok(Metric::LeakageMonteCarlo),
            _ => match s.strip_prefix("beam-").or_else(|| s.strip_prefix("beam_")) {
                Some(rest) => rest.parse().map(Metric::BeamSelection),
                None => s.parse().map(Metric::Rate),
            },
        }
    }
}

/// Dispatches one rate method.
pub fn evaluate_rate(method: Method, cfg: &SystemConfig, trials: usize, seed: u64) -> Result<RateReport> {
    match method {
        Method::MonteCarlo => rates::rate_monte_carlo(cfg, trials, seed),
        Method::Theorem1 => rates::rate_theorem1(cfg),
        Method::AsymptoticLow => rates::rate_low_snr(cfg),
        Method::AsymptoticHigh => rates::rate_high_snr(cfg),
        Method::BoundLow => {
            cfg.ensure_valid()?;
            let low = rates::low_snr_bound(cfg)?;
            Ok(RateReport { r_u: f64::NAN, c_e: f64::NAN, r_s: low, ..RateReport::analytic(method, 0.0, 0.0) })
        }
        Method::BoundHigh => {
            cfg.ensure_valid()?;
            let high = rates::high_snr_bound(cfg)?;
            Ok(RateReport { r_u: f64::NAN, c_e: f64::NAN, r_s: high, ..RateReport::analytic(method, 0.0, 0.0) })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: SystemConfig,
    pub axis: Axis,
    pub grid: Vec<f64>,
    /// At least one; a single empty curve means "base only".
    pub curves: Vec<Curve>,
    pub metrics: Vec<Metric>,
    pub trials: usize,
    pub seed: u64,
}

impl SweepSpec {
    pub fn new(base: SystemConfig, axis: Axis, grid: Vec<f64>, metrics: Vec<Metric>) -> Self {
        SweepSpec { base, axis, grid, curves: vec![Curve::default()], metrics, trials: DEFAULT_TRIALS, seed: 0 }
    }

    pub fn check(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Sweep("grid is empty".into()));
        }
        if self.grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::Sweep("grid contains a non-finite value".into()));
        }
        if let Some(w) = self.grid.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Sweep(format!("grid is not strictly increasing at {} -> {}", w[0], w[1])));
        }
        if self.axis.is_integer() {
            if let Some(v) = self.grid.iter().find(|v| v.fract() != 0.0 || **v < 0.0) {
                return Err(Error::Sweep(format!("{} grid value {v} is not a nonnegative integer", self.axis)));
            }
        }
        if self.curves.is_empty() {
            return Err(Error::Sweep("no curves".into()));
        }
        if self.metrics.is_empty() {
            return Err(Error::Sweep("no metrics".into()));
        }
        Ok(())
    }

    /// Config at one grid point of one curve, validated.
    pub fn point(&self, curve: &Curve, value: f64) -> Result<SystemConfig> {
        let mut cfg = self.base;
        curve.apply(&mut cfg)?;
        apply_override(&mut cfg, self.axis.name(), value)?;
        cfg.ensure_valid().map_err(|e| {
            let at = if curve.overrides.is_empty() { String::new() } else { format!(" ({})", curve.label()) };
            Error::Sweep(format!("{}={value}{at}: {e}", self.axis))
        })?;
        Ok(cfg)
    }

    /// `key=value;...` echo of everything needed to rerun the sweep.
    pub fn metadata(&self) -> String {
        let mut s = format!("axis={};grid=", self.axis);
        s.push_str(&self.grid.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","));
        s.push_str(";curves=");
        s.push_str(&self.curves.iter().map(Curve::label).collect::<Vec<_>>().join("|"));
        s.push_str(";metrics=");
        s.push_str(&self.metrics.iter().map(|m| m.name()).collect::<Vec<_>>().join(","));
        let _ = write!(s, ";trials={};seed={}", self.trials, self.seed);
        for key in KEYS {
            let _ = write!(s, ";{key}={}", self.base.get(key).unwrap_or(f64::NAN));
        }
        s
    }

    fn headers(&self) -> Vec<String> {
        let mut h = vec![self.axis.name().to_string()];
        for curve in &self.curves {
            let suffix = if curve.overrides.is_empty() { String::new() } else { format!("[{}]", curve.label()) };
            for m in &self.metrics {
                h.extend(m.columns().into_iter().map(|c| format!("{c}{suffix}")));
            }
        }
        h
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Column index by exact header.
    pub fn column(&self, header: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == header)?;
        if i == 0 {
            return Some(self.rows.iter().map(|r| r.axis_value).collect());
        }
        Some(self.rows.iter().map(|r| r.values[i - 1]).collect())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("# {}\n{}\n", self.spec.metadata(), self.columns.join(","));
        for row in &self.rows {
            s.push_str(&row.axis_value.to_string());
            for v in &row.values {
                let _ = write!(s, ",{v:.9e}");
            }
            s.push('\n');
        }
        s
    }
}

/// Evaluates every metric at every grid point of every curve. Points run in
/// parallel; Monte Carlo metrics use `spec.seed` at every point so curves are
/// comparable.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.check()?;
    // Validate all points up front so an invalid one is reported before any
    // expensive work starts.
    for &v in &spec.grid {
        for curve in &spec.curves {
            spec.point(curve, v)?;
        }
    }
    let rows: Vec<SweepRow> = spec
        .grid
        .par_iter()
        .map(|&v| {
            let mut values = Vec::new();
            for curve in &spec.curves {
                let cfg = spec.point(curve, v)?;
                for m in &spec.metrics {
                    values.extend(m.evaluate(&cfg, spec.trials, spec.seed)?);
                }
            }
            Ok(SweepRow { axis_value: v, values })
        })
        .collect::<Result<_>>()?;
    Ok(SweepResult { spec: spec.clone(), columns: spec.headers(), rows })
}
