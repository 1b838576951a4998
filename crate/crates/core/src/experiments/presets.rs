//! Ready-made sweeps for the published figures.

use std::fmt;
use std::str::FromStr;

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::rates::Method;

use super::{Axis, Curve, Metric, Strategy, SweepSpec};

pub const DEFAULT_TRIALS: usize = 2000;
/// Trials per point of the beam-selection preset, whose trials search subsets.
pub const BEAM_SELECTION_TRIALS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Figure {
    /// Secrecy rate vs SNR for several `l_t`.
    Fig2,
    /// Secrecy rate vs `m_t` at 6, 7, 8 dB.
    Fig3,
    /// Secrecy rate vs `m_e` at 6, 7, 8 dB.
    Fig4,
    /// Leakage fractions vs `phi`.
    Fig5,
    /// Random vs CSI-driven beam selection vs SNR.
    Fig6,
    /// Secrecy rate and bound vs `l_t`, low SNR.
    Fig7,
    /// Secrecy rate and bound vs `l_t`, high SNR.
    Fig8,
    /// Secrecy rate vs SNR for three `(rho, eta)` channels, low SNR.
    Fig9,
    /// Secrecy rate vs `phi` for three `(rho, eta)` channels, high SNR.
    Fig10,
    /// Secrecy rate vs `rho` for several `eta`, at 2 and 5 dB.
    Fig12,
}

impl Figure {
    pub const ALL: [Figure; 10] = [
        Figure::Fig2,
        Figure::Fig3,
        Figure::Fig4,
        Figure::Fig5,
        Figure::Fig6,
        Figure::Fig7,
        Figure::Fig8,
        Figure::Fig9,
        Figure::Fig10,
        Figure::Fig12,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
            Figure::Fig8 => "fig8",
            Figure::Fig9 => "fig9",
            Figure::Fig10 => "fig10",
            Figure::Fig12 => "fig12",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown figure `{s}`")))
    }
}

fn range(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step).round() as usize;
    (0..=n).map(|k| start + k as f64 * step).map(|v| (v * 1e9).round() / 1e9).collect()
}

fn each(key: &str, values: &[f64]) -> Vec<Curve> {
    values.iter().map(|&v| Curve::new([(key, v)])).collect()
}

fn rate(methods: &[Method]) -> Vec<Metric> {
    methods.iter().copied().map(Metric::Rate).collect()
}

/// The three channels compared in the rate-gap figures.
const GAP_CHANNELS: [(f64, f64); 3] = [(0.1, 0.1), (0.3, 0.1), (0.3, 0.2)];

fn gap_curves() -> Vec<Curve> {
    GAP_CHANNELS.iter().map(|&(rho, eta)| Curve::new([("rho", rho), ("eta", eta)])).collect()
}

/// Large arrays where only `n_t` and the RF-chain counts matter: every
/// receive beam is dominant so `m_r`, `m_e` never exceed `l_r`, `l_e`.
fn wide(n_t: usize, l_t: usize, m_t: usize, m_r: usize, m_e: usize, phi: f64) -> SystemConfig {
    SystemConfig { l_r: n_t, l_e: n_t, ..SystemConfig::symmetric(n_t, l_t, m_t, m_r, m_e, 1.0, phi, 0.1) }
}

/// The sweep behind one figure, with seed 0 and [`DEFAULT_TRIALS`] trials
/// ([`BEAM_SELECTION_TRIALS`] for the beam-selection figure).
pub fn figure(fig: Figure) -> SweepSpec {
    use Method::*;
    let (base, axis, grid, curves, metrics) = match fig {
        Figure::Fig2 => (
            SystemConfig::symmetric(128, 28, 4, 16, 16, 1.0, 0.6, 0.1),
            Axis::SnrDb,
            range(-10.0, 30.0, 5.0),
            each("l_t", &[28.0, 48.0, 88.0]),
            rate(&[MonteCarlo, Theorem1]),
        ),
        Figure::Fig3 => (
            SystemConfig::symmetric(256, 28, 4, 20, 20, 1.0, 0.6, 0.1),
            Axis::MT,
            vec![2.0, 4.0, 8.0, 12.0, 16.0, 20.0],
            each("snr_db", &[6.0, 7.0, 8.0]),
            rate(&[MonteCarlo, Theorem1]),
        ),
        Figure::Fig4 => (
            SystemConfig::symmetric(256, 28, 4, 16, 16, 1.0, 0.6, 0.1),
            Axis::ME,
            vec![4.0, 8.0, 12.0, 16.0, 20.0, 24.0],
            each("snr_db", &[6.0, 7.0, 8.0]),
            rate(&[MonteCarlo, Theorem1]),
        ),
        Figure::Fig5 => (
            SystemConfig::symmetric(128, 88, 4, 16, 16, 1.0, 0.6, 0.1),
            Axis::Phi,
            range(0.05, 0.95, 0.05),
            each("eta", &[0.1, 0.2, 0.3]),
            vec![Metric::Leakage, Metric::LeakageMonteCarlo],
        ),
        Figure::Fig6 => (
            SystemConfig::symmetric(128, 40, 32, 32, 32, 1.0, 0.6, 0.1),
            Axis::SnrDb,
            range(-10.0, 30.0, 5.0),
            vec![Curve::default()],
            vec![Metric::BeamSelection(Strategy::Random), Metric::BeamSelection(Strategy::Greedy)],
        ),
        Figure::Fig7 => (
            wide(512, 165, 4, 96, 16, 0.9),
            Axis::LT,
            range(16.0, 480.0, 16.0),
            each("snr_db", &[2.0, 5.0]),
            rate(&[MonteCarlo, Theorem1, AsymptoticLow, BoundLow]),
        ),
        Figure::Fig8 => (
            wide(512, 165, 4, 32, 8, 0.9).with_snr_db(30.0),
            Axis::LT,
            range(16.0, 464.0, 16.0),
            vec![Curve::default()],
            rate(&[MonteCarlo, Theorem1, AsymptoticHigh, BoundHigh]),
        ),
        Figure::Fig9 => (
            wide(512, 51, 4, 192, 16, 0.9),
            Axis::SnrDb,
            range(-10.0, 10.0, 1.0),
            gap_curves(),
            rate(&[MonteCarlo, Theorem1, AsymptoticLow]),
        ),
        Figure::Fig10 => (
            wide(512, 51, 4, 32, 12, 0.9).with_snr_db(25.0),
            Axis::Phi,
            range(0.1, 0.9, 0.1),
            gap_curves(),
            rate(&[MonteCarlo, Theorem1, AsymptoticHigh]),
        ),
        Figure::Fig12 => (
            wide(512, 51, 4, 192, 16, 0.9),
            Axis::Rho,
            range(0.05, 0.9, 0.05),
            [2.0, 5.0]
                .iter()
                .flat_map(|&snr| {
                    [0.05, 0.1, 0.2, 0.3, 0.5].map(|eta| Curve::new([("snr_db", snr), ("eta", eta)]))
                })
                .collect(),
            rate(&[Theorem1]),
        ),
    };
    let trials = if fig == Figure::Fig6 { BEAM_SELECTION_TRIALS } else { DEFAULT_TRIALS };
    SweepSpec { base, axis, grid, curves, metrics, trials, seed: 0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::run_sweep;

    /// `key=value` pairs of `spec.base` for the listed keys, comma-joined.
    fn params(spec: &SweepSpec, keys: &[&str]) -> String {
        keys.iter()
            .map(|k| match *k {
                "snr_db" => format!("snr_db={}", spec.base.snr_db().round()),
                _ => format!("{k}={}", spec.base.get(k).unwrap()),
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    #[test]
    fn caption_parameters() {
        let cases: [(Figure, &[&str], &str); 10] = [
            (Figure::Fig2, &["n_t", "m_t", "m_r", "m_e", "phi", "eta"], "n_t=128,m_t=4,m_r=16,m_e=16,phi=0.6,eta=0.1"),
            (Figure::Fig3, &["n_t", "l_t", "m_r", "m_e", "phi", "eta"], "n_t=256,l_t=28,m_r=20,m_e=20,phi=0.6,eta=0.1"),
            (Figure::Fig4, &["n_t", "l_t", "m_t", "m_r", "phi", "eta"], "n_t=256,l_t=28,m_t=4,m_r=16,phi=0.6,eta=0.1"),
            (Figure::Fig5, &["n_t", "l_t", "l_r", "l_e", "m_t", "m_r", "m_e"], "n_t=128,l_t=88,l_r=88,l_e=88,m_t=4,m_r=16,m_e=16"),
            (Figure::Fig6, &["m_t", "m_r", "m_e", "l_t", "phi", "eta"], "m_t=32,m_r=32,m_e=32,l_t=40,phi=0.6,eta=0.1"),
            (Figure::Fig7, &["n_t", "m_t", "m_r", "m_e", "phi", "eta"], "n_t=512,m_t=4,m_r=96,m_e=16,phi=0.9,eta=0.1"),
            (Figure::Fig8, &["n_t", "m_t", "m_e", "snr_db", "phi", "eta"], "n_t=512,m_t=4,m_e=8,snr_db=30,phi=0.9,eta=0.1"),
            (Figure::Fig9, &["n_t", "m_t", "m_r", "m_e", "phi"], "n_t=512,m_t=4,m_r=192,m_e=16,phi=0.9"),
            (Figure::Fig10, &["n_t", "m_t", "m_r", "m_e", "snr_db"], "n_t=512,m_t=4,m_r=32,m_e=12,snr_db=25"),
            (Figure::Fig12, &["n_t", "m_t", "m_r", "m_e", "phi"], "n_t=512,m_t=4,m_r=192,m_e=16,phi=0.9"),
        ];
        for (fig, keys, expected) in cases {
            assert_eq!(params(&figure(fig), keys), expected, "{fig}");
        }
    }

    #[test]
    fn swept_values() {
        let f2 = figure(Figure::Fig2);
        assert_eq!(f2.curves.iter().map(Curve::label).collect::<Vec<_>>(), ["l_t=28", "l_t=48", "l_t=88"]);
        let f3 = figure(Figure::Fig3);
        assert_eq!(f3.curves.iter().map(Curve::label).collect::<Vec<_>>(), ["snr_db=6", "snr_db=7", "snr_db=8"]);
        assert_eq!(f3.axis, Axis::MT);
        assert_eq!(figure(Figure::Fig4).axis, Axis::ME);
        assert_eq!(figure(Figure::Fig5).grid.len(), 19);
        assert_eq!(figure(Figure::Fig7).grid[..3], [16.0, 32.0, 48.0]);
    }

    #[test]
    fn every_preset_is_a_valid_sweep() {
        for fig in Figure::ALL {
            let spec = figure(fig);
            spec.check().unwrap();
            for &v in &spec.grid {
                for c in &spec.curves {
                    spec.point(c, v).unwrap_or_else(|e| panic!("{fig}: {e}"));
                }
            }
            assert_eq!(fig.name().parse::<Figure>().unwrap(), fig);
        }
    }

    #[test]
    fn analytic_preset_runs() {
        let mut spec = figure(Figure::Fig12);
        spec.grid.truncate(3);
        let r = run_sweep(&spec).unwrap();
        assert_eq!(r.rows.len(), 3);
        assert_eq!(r.columns.len(), 1 + 3 * 10);
    }
}
