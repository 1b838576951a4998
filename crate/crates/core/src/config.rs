//! System parameterization shared by every other module.
//!
//! A [`SystemConfig`] holds antenna, RF-chain and dominant-beam counts for the
//! transmitter (Alice), the legitimate receiver (Bob) and the eavesdropper
//! (Eve), together with the power budget and the two sparsity knobs. It is a
//! plain value type: construct it, run [`validate`], then share it freely.
//!
//! The on-disk form is a flat `key=value` text file whose keys are the field
//! names; see [`SystemConfig::parse`].

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Full parameter set of the secure transmission system.
///
/// Powers are linear (watts); SNR conversions from dB happen at the CLI
/// boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    /// Antennas at Alice.
    pub n_t: usize,
    /// Antennas at Bob.
    pub n_r: usize,
    /// Antennas at Eve.
    pub n_e: usize,
    /// RF chains at Alice (also the number of data streams).
    pub m_t: usize,
    /// RF chains at Bob.
    pub m_r: usize,
    /// RF chains at Eve.
    pub m_e: usize,
    /// Dominant transmit beams (shared by Bob's and Eve's channels).
    pub l_t: usize,
    /// Dominant receive beams at Bob.
    pub l_r: usize,
    /// Dominant receive beams at Eve.
    pub l_e: usize,
    /// Total transmit power `P`.
    pub power: f64,
    /// Bob's thermal noise variance.
    pub noise_var: f64,
    /// Fraction of `P` spent on the confidential signal.
    pub phi: f64,
    /// Power ratio of nondominant to dominant beams.
    pub eta: f64,
}

/// Field names in file order. Also the set of accepted config-file keys.
pub const KEYS: [&str; 13] = [
    "n_t",
    "n_r",
    "n_e",
    "m_t",
    "m_r",
    "m_e",
    "l_t",
    "l_r",
    "l_e",
    "power",
    "noise_var",
    "phi",
    "eta",
];

impl SystemConfig {
    /// Symmetric form used throughout the numerical experiments:
    /// `n_r = n_e = n_t` and `l_r = l_e = l_t`.
    #[allow(clippy::too_many_arguments)]
    pub fn symmetric(
        n: usize,
        l: usize,
        m_t: usize,
        m_r: usize,
        m_e: usize,
        snr: f64,
        phi: f64,
        eta: f64,
    ) -> Self {
        SystemConfig {
            n_t: n,
            n_r: n,
            n_e: n,
            m_t,
            m_r,
            m_e,
            l_t: l,
            l_r: l,
            l_e: l,
            power: snr,
            noise_var: 1.0,
            phi,
            eta,
        }
    }

    /// Angle-domain sparsity `l_t / n_t`.
    pub fn rho(&self) -> f64 {
        self.l_t as f64 / self.n_t as f64
    }

    /// Linear system SNR `P / noise_var`.
    pub fn snr(&self) -> f64 {
        self.power / self.noise_var
    }

    /// System SNR in dB.
    pub fn snr_db(&self) -> f64 {
        10.0 * self.snr().log10()
    }

    /// Sets `power` so that the system SNR equals `snr_db`, keeping `noise_var`.
    pub fn with_snr_db(mut self, snr_db: f64) -> Self {
        self.power = db_to_linear(snr_db) * self.noise_var;
        self
    }

    /// Number of nondominant transmit beams, which carry the artificial noise.
    pub fn an_beams(&self) -> usize {
        self.n_t.saturating_sub(self.l_t)
    }

    /// Fails with [`Error::InvalidConfig`] unless every invariant holds.
    pub fn ensure_valid(&self) -> Result<(), Error> {
        let report = validate(self);
        if report.passes() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(report))
        }
    }

    /// Like [`ensure_valid`](Self::ensure_valid) but tolerates the one
    /// violation that only matters for Eve's capacity (`n_t - l_t < m_e`).
    /// Bob-side and channel-sampling code uses this.
    pub fn ensure_structurally_valid(&self) -> Result<(), Error> {
        let report = validate(self);
        if report.structurally_valid() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(report))
        }
    }

    /// Sets a field by its config-file key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), Error> {
        let value = value.trim();
        let bad = |_| Error::Parse(format!("invalid value `{value}` for key `{key}`"));
        let slot = match key {
            "n_t" => &mut self.n_t,
            "n_r" => &mut self.n_r,
            "n_e" => &mut self.n_e,
            "m_t" => &mut self.m_t,
            "m_r" => &mut self.m_r,
            "m_e" => &mut self.m_e,
            "l_t" => &mut self.l_t,
            "l_r" => &mut self.l_r,
            "l_e" => &mut self.l_e,
            "power" | "noise_var" | "phi" | "eta" => {
                let v: f64 = value
                    .parse()
                    .map_err(|_| Error::Parse(format!("invalid value `{value}` for key `{key}`")))?;
                match key {
                    "power" => self.power = v,
                    "noise_var" => self.noise_var = v,
                    "phi" => self.phi = v,
                    _ => self.eta = v,
                }
                return Ok(());
            }
            _ => return Err(Error::Parse(format!("unknown key `{key}`"))),
        };
        *slot = value.parse().map_err(bad)?;
        Ok(())
    }

    /// Value of a field by key, as `f64`.
    pub fn get(&self, key: &str) -> Option<f64> {
        Some(match key {
            "n_t" => self.n_t as f64,
            "n_r" => self.n_r as f64,
            "n_e" => self.n_e as f64,
            "m_t" => self.m_t as f64,
            "m_r" => self.m_r as f64,
            "m_e" => self.m_e as f64,
            "l_t" => self.l_t as f64,
            "l_r" => self.l_r as f64,
            "l_e" => self.l_e as f64,
            "power" => self.power,
            "noise_var" => self.noise_var,
            "phi" => self.phi,
            "eta" => self.eta,
            _ => return None,
        })
    }

    /// Parses `key=value` lines on top of `base`.
    ///
    /// Blank lines and lines starting with `#` are ignored. Keys not in
    /// [`KEYS`] and repeated keys are errors. Keys absent from the text keep
    /// their value from `base`. The result is not validated.
    pub fn parse_with_base(text: &str, base: SystemConfig) -> Result<Self, Error> {
        let mut cfg = base;
        let mut seen = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("line {}: expected key=value, got `{line}`", lineno + 1))
            })?;
            let key = key.trim();
            if seen.contains(&key) {
                return Err(Error::Parse(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
            cfg.set(key, value)
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            seen.push(key);
        }
        Ok(cfg)
    }

    /// Parses a complete config: every key in [`KEYS`] must be present.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let cfg = Self::parse_with_base(text, SystemConfig::default())?;
        for key in KEYS {
            let present = text.lines().any(|l| {
                let l = l.trim();
                !l.starts_with('#') && l.split_once('=').is_some_and(|(k, _)| k.trim() == key)
            });
            if !present {
                return Err(Error::Parse(format!("missing key `{key}`")));
            }
        }
        Ok(cfg)
    }
}

impl Default for SystemConfig {
    /// The reference configuration of the SNR sweep: 128 antennas everywhere,
    /// 28 dominant beams, 4/16/16 RF chains, `phi = 0.6`, `eta = 0.1`, 0 dB.
    fn default() -> Self {
        SystemConfig::symmetric(128, 28, 4, 16, 16, 1.0, 0.6, 0.1)
    }
}

impl fmt::Display for SystemConfig {
    /// Writes the config-file form, one `key=value` per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for key in KEYS {
            writeln!(f, "{key}={}", self.get(key).expect("known key"))?;
        }
        Ok(())
    }
}

impl FromStr for SystemConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SystemConfig::parse(s)
    }
}

/// A single violated invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// A count that must be at least one is zero.
    ZeroCount(&'static str),
    /// `rf <= dominant <= antennas` fails for one terminal.
    Ordering {
        side: &'static str,
        rf: usize,
        dominant: usize,
        antennas: usize,
    },
    /// `n_t - l_t >= m_e` fails, so Eve's AN covariance is rank deficient.
    EveRank { an_beams: usize, m_e: usize },
    /// A real parameter is outside its allowed range.
    Range { name: &'static str, value: f64, expected: &'static str },
}

impl Violation {
    /// Whether the violation only blocks Eve-side evaluation.
    pub fn eve_only(&self) -> bool {
        matches!(self, Violation::EveRank { .. })
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroCount(name) => write!(f, "{name} must be positive"),
            Violation::Ordering { side, rf, dominant, antennas } => {
                let (m, l, n) = match *side {
                    "transmit" => ("m_t", "l_t", "n_t"),
                    "bob" => ("m_r", "l_r", "n_r"),
                    _ => ("m_e", "l_e", "n_e"),
                };
                if rf > dominant {
                    write!(f, "{m} <= {l} violated ({rf} > {dominant})")
                } else {
                    write!(f, "{l} <= {n} violated ({dominant} > {antennas})")
                }
            }
            Violation::EveRank { an_beams, m_e } => {
                write!(f, "n_t - l_t >= m_e violated ({an_beams} < {m_e})")
            }
            Violation::Range { name, value, expected } => {
                write!(f, "{name} = {value} outside {expected}")
            }
        }
    }
}

/// Outcome of [`validate`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn structurally_valid(&self) -> bool {
        self.violations.iter().all(Violation::eve_only)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passes() {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Checks every invariant of `cfg` and lists the ones that fail.
pub fn validate(cfg: &SystemConfig) -> ValidationReport {
    let mut violations = Vec::new();
    for key in ["n_t", "n_r", "n_e", "m_t", "m_r", "m_e", "l_t", "l_r", "l_e"] {
        if cfg.get(key) == Some(0.0) {
            violations.push(Violation::ZeroCount(key));
        }
    }
    for (side, rf, dominant, antennas) in [
        ("transmit", cfg.m_t, cfg.l_t, cfg.n_t),
        ("bob", cfg.m_r, cfg.l_r, cfg.n_r),
        ("eve", cfg.m_e, cfg.l_e, cfg.n_e),
    ] {
        if rf > dominant || dominant > antennas {
            violations.push(Violation::Ordering { side, rf, dominant, antennas });
        }
    }
    if cfg.l_t <= cfg.n_t && cfg.n_t - cfg.l_t < cfg.m_e {
        violations.push(Violation::EveRank { an_beams: cfg.n_t - cfg.l_t, m_e: cfg.m_e });
    }
    for (name, value) in [("power", cfg.power), ("noise_var", cfg.noise_var)] {
        if !(value.is_finite() && value > 0.0) {
            violations.push(Violation::Range { name, value, expected: "(0, inf)" });
        }
    }
    for (name, value) in [("phi", cfg.phi), ("eta", cfg.eta)] {
        if !(value > 0.0 && value < 1.0) {
            violations.push(Violation::Range { name, value, expected: "(0, 1)" });
        }
    }
    ValidationReport { violations }
}

/// Angle-domain sparsity of a config.
pub fn rho(cfg: &SystemConfig) -> f64 {
    cfg.rho()
}

/// Linear system SNR of a config.
pub fn snr(cfg: &SystemConfig) -> f64 {
    cfg.snr()
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2() -> SystemConfig {
        SystemConfig::symmetric(128, 28, 4, 16, 16, 1.0, 0.6, 0.1)
    }

    #[test]
    fn reference_config_passes() {
        assert!(validate(&fig2()).passes());
    }

    #[test]
    fn rf_chains_above_dominant_beams() {
        let mut cfg = fig2();
        cfg.m_t = 5;
        cfg.l_t = 4;
        let report = validate(&cfg);
        assert!(!report.passes());
        assert!(report.to_string().contains("m_t <= l_t"), "{report}");
    }

    #[test]
    fn eve_rank_violation_is_reported_but_structural() {
        let mut cfg = fig2();
        cfg.n_t = 64;
        cfg.l_t = 60;
        cfg.m_e = 8;
        let report = validate(&cfg);
        assert_eq!(report.violations, vec![Violation::EveRank { an_beams: 4, m_e: 8 }]);
        assert!(report.structurally_valid());
        assert!(report.to_string().contains("n_t - l_t >= m_e"));
    }

    #[test]
    fn interior_ranges() {
        for (phi, eta) in [(0.0, 0.1), (1.0, 0.1), (0.5, 0.0), (0.5, 1.0)] {
            let mut cfg = fig2();
            cfg.phi = phi;
            cfg.eta = eta;
            assert!(!validate(&cfg).passes());
        }
    }

    #[test]
    fn rho_and_snr() {
        let mut cfg = fig2();
        cfg.n_t = 512;
        cfg.l_t = 512;
        assert_eq!(cfg.rho(), 1.0);
        cfg.n_t = 256;
        cfg.l_t = 28;
        assert_eq!(rho(&cfg), 0.109375);
        cfg.power = 2.0;
        cfg.noise_var = 1.0;
        assert_eq!(snr(&cfg), 2.0);
        assert!((cfg.snr_db() - 3.0103).abs() < 1e-4);
    }

    #[test]
    fn validate_is_idempotent() {
        let mut cfg = fig2();
        cfg.m_r = 40;
        assert_eq!(validate(&cfg), validate(&cfg));
    }

    #[test]
    fn parse_round_trip() {
        let cfg = fig2().with_snr_db(10.0);
        let text = cfg.to_string();
        assert_eq!(SystemConfig::parse(&text).unwrap(), cfg);
    }

    #[test]
    fn parse_rejects_unknown_and_missing_keys() {
        let err = SystemConfig::parse_with_base("n_t=4\nfoo=1\n", fig2()).unwrap_err();
        assert!(err.to_string().contains("unknown key `foo`"));
        let err = SystemConfig::parse("n_t=4\n").unwrap_err();
        assert!(err.to_string().contains("missing key"));
        let err = SystemConfig::parse_with_base("n_t=4\nn_t=5\n", fig2()).unwrap_err();
        assert!(err.to_string().contains("duplicate"));
        let err = SystemConfig::parse_with_base("phi=abc\n", fig2()).unwrap_err();
        assert!(err.to_string().contains("invalid value"));
    }

    #[test]
    fn parse_skips_comments() {
        let cfg = SystemConfig::parse_with_base("# note\n\n  eta = 0.2 \n", fig2()).unwrap();
        assert_eq!(cfg.eta, 0.2);
    }
}
