//! Virtual (angle-domain) channel model.
//!
//! Bob's channel `G` (`n_r x n_t`) and Eve's channel `H` (`n_e x n_t`) are
//! generated directly in the beamspace: entries on the dominant rows x
//! dominant columns are `CN(0, 1)`, everything else is `CN(0, eta)`. The
//! physical channel is `A_R G A_T^H` with unitary DFT steering matrices.
//!
//! All index sets are 0-based and sorted.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::config::SystemConfig;
use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Default antenna spacing in wavelengths.
pub const HALF_WAVELENGTH: f64 = 0.5;

/// Dominant-beam index sets and RF-chain selectors for Bob and Eve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsityPattern {
    /// Dominant transmit beams of `G` (size `l_t`).
    pub u_t: Vec<usize>,
    /// Dominant receive beams of `G` (size `l_r`).
    pub u_r: Vec<usize>,
    /// Dominant transmit beams of `H` (size `l_t`).
    pub e_t: Vec<usize>,
    /// Dominant receive beams of `H` (size `l_e`).
    pub e_r: Vec<usize>,
    /// Alice's RF-chain selector, a subset of `u_t` (size `m_t`).
    pub u_t_sel: Vec<usize>,
    /// Bob's RF-chain selector, a subset of `u_r` (size `m_r`).
    pub u_r_sel: Vec<usize>,
    /// Eve's RF-chain selector, a subset of `e_r` (size `m_e`).
    pub e_r_sel: Vec<usize>,
}

impl SparsityPattern {
    /// Transmit beams outside `u_t`, which carry the artificial noise.
    pub fn an_beams(&self, n_t: usize) -> Vec<usize> {
        complement(&self.u_t, n_t)
    }

    /// Checks sizes, bounds, ordering and subset relations against `cfg`.
    pub fn check(&self, cfg: &SystemConfig) -> Result<()> {
        let sets: [(&str, &[usize], usize, usize); 7] = [
            ("u_t", &self.u_t, cfg.l_t, cfg.n_t),
            ("u_r", &self.u_r, cfg.l_r, cfg.n_r),
            ("e_t", &self.e_t, cfg.l_t, cfg.n_t),
            ("e_r", &self.e_r, cfg.l_e, cfg.n_e),
            ("u_t_sel", &self.u_t_sel, cfg.m_t, cfg.n_t),
            ("u_r_sel", &self.u_r_sel, cfg.m_r, cfg.n_r),
            ("e_r_sel", &self.e_r_sel, cfg.m_e, cfg.n_e),
        ];
        for (name, set, len, bound) in sets {
            if set.len() != len {
                return Err(Error::Dimension(format!("{name} has {} entries, expected {len}", set.len())));
            }
            if !set.windows(2).all(|w| w[0] < w[1]) || set.last().is_some_and(|&i| i >= bound) {
                return Err(Error::Dimension(format!("{name} must be sorted, distinct and < {bound}")));
            }
        }
        for (name, sub, sup) in [
            ("u_t_sel", &self.u_t_sel, &self.u_t),
            ("u_r_sel", &self.u_r_sel, &self.u_r),
            ("e_r_sel", &self.e_r_sel, &self.e_r),
        ] {
            if !is_subset(sub, sup) {
                return Err(Error::Dimension(format!("{name} is not a subset of its dominant set")));
            }
        }
        Ok(())
    }
}

/// Realized virtual channels of Bob and Eve.
#[derive(Debug, Clone, PartialEq)]
pub struct VirtualChannelPair {
    pub g: ComplexMatrix,
    pub h: ComplexMatrix,
    pub pattern: SparsityPattern,
    pub eta: f64,
}

/// The four submatrices that enter the received signals.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSlices {
    /// `G[u_r_sel, u_t_sel]`, `m_r x m_t`.
    pub g_bar: ComplexMatrix,
    /// `G[u_r_sel, not u_t]`, `m_r x (n_t - l_t)`.
    pub g_hat: ComplexMatrix,
    /// `H[e_r_sel, u_t_sel]`, `m_e x m_t`.
    pub h_bar: ComplexMatrix,
    /// `H[e_r_sel, not u_t]`, `m_e x (n_t - l_t)`.
    pub h_hat: ComplexMatrix,
}

/// Generator for one seed. Every seeded entry point goes through here.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for trial `t` of a run seeded with `seed`: the seeded key on
/// its own stream `t`, so trials never share draws within or across seeds.
pub fn trial_rng(seed: u64, t: u64) -> ChaCha8Rng {
    let mut rng = seeded_rng(seed);
    rng.set_stream(t);
    rng
}

/// Draws `CN(0, var)`: independent real and imaginary parts of variance `var / 2`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

fn random_subset<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    let mut v = index::sample(rng, n, k).into_vec();
    v.sort_unstable();
    v
}

fn random_subset_of<R: Rng + ?Sized>(rng: &mut R, set: &[usize], k: usize) -> Vec<usize> {
    let mut v: Vec<usize> = index::sample(rng, set.len(), k).into_iter().map(|i| set[i]).collect();
    v.sort_unstable();
    v
}

/// Sorted complement of `set` in `0..n`.
pub fn complement(set: &[usize], n: usize) -> Vec<usize> {
    let mut mask = vec![true; n];
    for &i in set {
        mask[i] = false;
    }
    (0..n).filter(|&i| mask[i]).collect()
}

fn is_subset(sub: &[usize], sup: &[usize]) -> bool {
    sub.iter().all(|i| sup.binary_search(i).is_ok())
}

/// Samples a pattern with an explicit generator. `cfg` must be structurally valid.
pub fn sample_pattern_with<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> SparsityPattern {
    let u_t = random_subset(rng, cfg.n_t, cfg.l_t);
    let u_r = random_subset(rng, cfg.n_r, cfg.l_r);
    let e_t = random_subset(rng, cfg.n_t, cfg.l_t);
    let e_r = random_subset(rng, cfg.n_e, cfg.l_e);
    let u_t_sel = random_subset_of(rng, &u_t, cfg.m_t);
    let u_r_sel = random_subset_of(rng, &u_r, cfg.m_r);
    let e_r_sel = random_subset_of(rng, &e_r, cfg.m_e);
    SparsityPattern { u_t, u_r, e_t, e_r, u_t_sel, u_r_sel, e_r_sel }
}

/// Independent uniform sparsity patterns for Bob and Eve plus uniform
/// RF-chain selectors. Deterministic in `seed`.
pub fn sample_pattern(cfg: &SystemConfig, seed: u64) -> Result<SparsityPattern> {
    cfg.ensure_structurally_valid()?;
    Ok(sample_pattern_with(cfg, &mut seeded_rng(seed)))
}

fn mixed_variance_matrix<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    dominant_rows: &[usize],
    dominant_cols: &[usize],
    eta: f64,
) -> ComplexMatrix {
    let mut row_dom = vec![false; rows];
    dominant_rows.iter().for_each(|&i| row_dom[i] = true);
    let mut col_dom = vec![false; cols];
    dominant_cols.iter().for_each(|&j| col_dom[j] = true);
    // Filled column by column so the draw order matches nalgebra's storage.
    ComplexMatrix::from_fn(rows, cols, |i, j| {
        let var = if row_dom[i] && col_dom[j] { 1.0 } else { eta };
        complex_normal(rng, var)
    })
}

pub fn sample_channels_with<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    pattern: &SparsityPattern,
    rng: &mut R,
) -> VirtualChannelPair {
    let g = mixed_variance_matrix(rng, cfg.n_r, cfg.n_t, &pattern.u_r, &pattern.u_t, cfg.eta);
    let h = mixed_variance_matrix(rng, cfg.n_e, cfg.n_t, &pattern.e_r, &pattern.e_t, cfg.eta);
    VirtualChannelPair { g, h, pattern: pattern.clone(), eta: cfg.eta }
}

/// Full virtual channel realizations for a given pattern. Deterministic in `seed`.
pub fn sample_channels(
    cfg: &SystemConfig,
    pattern: &SparsityPattern,
    seed: u64,
) -> Result<VirtualChannelPair> {
    cfg.ensure_structurally_valid()?;
    pattern.check(cfg)?;
    Ok(sample_channels_with(cfg, pattern, &mut seeded_rng(seed)))
}

/// Draws only the four working submatrices.
///
/// Has the same distribution as `slice(sample_channels_with(..))` but touches
/// `O(m (n_t - l_t))` entries instead of `O(n n_t)`, which is what the
/// Monte Carlo estimators use.
pub fn sample_slices_with<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    pattern: &SparsityPattern,
    rng: &mut R,
) -> ChannelSlices {
    let an = pattern.an_beams(cfg.n_t);
    let eta = cfg.eta;
    let in_e_t = |j: usize| pattern.e_t.binary_search(&j).is_ok();
    let g_bar = ComplexMatrix::from_fn(cfg.m_r, cfg.m_t, |_, _| complex_normal(rng, 1.0));
    let g_hat = ComplexMatrix::from_fn(cfg.m_r, an.len(), |_, _| complex_normal(rng, eta));
    let bar_var: Vec<f64> = pattern.u_t_sel.iter().map(|&j| if in_e_t(j) { 1.0 } else { eta }).collect();
    let hat_var: Vec<f64> = an.iter().map(|&j| if in_e_t(j) { 1.0 } else { eta }).collect();
    let h_bar = ComplexMatrix::from_fn(cfg.m_e, cfg.m_t, |_, j| complex_normal(rng, bar_var[j]));
    let h_hat = ComplexMatrix::from_fn(cfg.m_e, an.len(), |_, j| complex_normal(rng, hat_var[j]));
    ChannelSlices { g_bar, g_hat, h_bar, h_hat }
}

fn submatrix(m: &ComplexMatrix, rows: &[usize], cols: &[usize]) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Extracts `G_bar`, `G_hat`, `H_bar`, `H_hat` from a realization.
pub fn slice(pair: &VirtualChannelPair) -> Result<ChannelSlices> {
    let p = &pair.pattern;
    let n_t = pair.g.ncols();
    if pair.h.ncols() != n_t {
        return Err(Error::Dimension(format!(
            "G has {n_t} columns but H has {}",
            pair.h.ncols()
        )));
    }
    let out_of = |set: &[usize], n: usize| set.iter().any(|&i| i >= n);
    if out_of(&p.u_t, n_t)
        || out_of(&p.e_t, n_t)
        || out_of(&p.u_r_sel, pair.g.nrows())
        || out_of(&p.e_r_sel, pair.h.nrows())
    {
        return Err(Error::Dimension("pattern indices exceed channel dimensions".into()));
    }
    let an = p.an_beams(n_t);
    Ok(ChannelSlices {
        g_bar: submatrix(&pair.g, &p.u_r_sel, &p.u_t_sel),
        g_hat: submatrix(&pair.g, &p.u_r_sel, &an),
        h_bar: submatrix(&pair.h, &p.e_r_sel, &p.u_t_sel),
        h_hat: submatrix(&pair.h, &p.e_r_sel, &an),
    })
}

/// Normalized spatial frequencies `(j - (n-1)/2) / n` of the DFT grid.
pub fn spatial_frequencies(n: usize) -> Vec<f64> {
    let centre = (n as f64 - 1.0) / 2.0;
    (0..n).map(|j| (j as f64 - centre) / n as f64).collect()
}

/// Array response matrix: column `j` is the steering vector of the `j`-th
/// grid direction scaled by `1/sqrt(n)`. Unitary.
pub fn steering_matrix(n: usize) -> ComplexMatrix {
    let freqs = spatial_frequencies(n);
    let scale = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, n, |k, j| {
        Complex64::from_polar(scale, -2.0 * PI * k as f64 * freqs[j])
    })
}

/// Physical angles (radians) of the grid directions for antenna spacing
/// `spacing` in wavelengths. Informational only.
pub fn beam_angles(n: usize, spacing: f64) -> Vec<f64> {
    spatial_frequencies(n)
        .into_iter()
        .map(|v| (v / spacing).clamp(-1.0, 1.0).asin())
        .collect()
}

/// Maps a virtual channel to the antenna domain: `A_rx V A_tx^H`.
pub fn to_physical(virtual_channel: &ComplexMatrix) -> ComplexMatrix {
    let a_rx = steering_matrix(virtual_channel.nrows());
    let a_tx = steering_matrix(virtual_channel.ncols());
    a_rx * virtual_channel * a_tx.adjoint()
}

/// Inverse of [`to_physical`]: `A_rx^H P A_tx`.
pub fn to_virtual(physical: &ComplexMatrix) -> ComplexMatrix {
    let a_rx = steering_matrix(physical.nrows());
    let a_tx = steering_matrix(physical.ncols());
    a_rx.adjoint() * physical * a_tx
}

/// Writes a matrix as CSV with header `i,j,re,im`, one row per entry,
/// 0-based indices, row-major order, values in `{:e}` round-trip form.
pub fn write_matrix_csv<W: Write>(m: &ComplexMatrix, mut out: W) -> Result<()> {
    writeln!(out, "i,j,re,im")?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            writeln!(out, "{i},{j},{:e},{:e}", z.re, z.im)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SystemConfig {
        SystemConfig::symmetric(10, 6, 4, 4, 4, 1.0, 0.6, 0.1)
    }

    #[test]
    fn full_dominant_set_is_forced() {
        let mut cfg = small();
        cfg.l_t = 10;
        cfg.m_e = 0;
        let mut rng = seeded_rng(3);
        let p = sample_pattern_with(&cfg, &mut rng);
        let all: Vec<usize> = (0..10).collect();
        assert_eq!(p.u_t, all);
        assert_eq!(p.e_t, all);
    }

    #[test]
    fn pattern_is_deterministic_and_consistent() {
        let cfg = small();
        let a = sample_pattern(&cfg, 42).unwrap();
        let b = sample_pattern(&cfg, 42).unwrap();
        assert_eq!(a, b);
        a.check(&cfg).unwrap();
        assert_ne!(a, sample_pattern(&cfg, 43).unwrap());
    }

    #[test]
    fn slice_dimensions() {
        let cfg = small();
        let p = sample_pattern(&cfg, 1).unwrap();
        let pair = sample_channels(&cfg, &p, 2).unwrap();
        let s = slice(&pair).unwrap();
        assert_eq!(s.g_bar.shape(), (4, 4));
        assert_eq!(s.g_hat.shape(), (4, 4));
        assert_eq!(s.h_bar.shape(), (4, 4));
        assert_eq!(s.h_hat.shape(), (4, 4));
    }

    #[test]
    fn no_complement_when_every_beam_is_dominant() {
        let mut cfg = small();
        cfg.l_t = 10;
        let p = sample_pattern_with(&cfg, &mut seeded_rng(0));
        let pair = sample_channels_with(&cfg, &p, &mut seeded_rng(1));
        let s = slice(&pair).unwrap();
        assert_eq!(s.g_hat.ncols(), 0);
        assert_eq!(s.h_hat.ncols(), 0);
    }

    #[test]
    fn slices_re_embed_to_original_entries() {
        let cfg = small();
        let p = sample_pattern(&cfg, 5).unwrap();
        let pair = sample_channels(&cfg, &p, 6).unwrap();
        let s = slice(&pair).unwrap();
        let an = p.an_beams(cfg.n_t);
        let mut g = ComplexMatrix::zeros(cfg.n_r, cfg.n_t);
        for (a, &i) in p.u_r_sel.iter().enumerate() {
            for (b, &j) in p.u_t_sel.iter().enumerate() {
                g[(i, j)] = s.g_bar[(a, b)];
            }
            for (b, &j) in an.iter().enumerate() {
                g[(i, j)] = s.g_hat[(a, b)];
            }
        }
        for &i in &p.u_r_sel {
            for j in p.u_t_sel.iter().chain(&an) {
                assert_eq!(g[(i, *j)], pair.g[(i, *j)]);
            }
        }
    }

    #[test]
    fn slice_rejects_mismatched_pattern() {
        let cfg = small();
        let p = sample_pattern(&cfg, 5).unwrap();
        let mut pair = sample_channels(&cfg, &p, 6).unwrap();
        pair.h = ComplexMatrix::zeros(10, 9);
        assert!(matches!(slice(&pair), Err(Error::Dimension(_))));
    }

    #[test]
    fn steering_trivial_and_unitary() {
        let one = steering_matrix(1);
        assert_eq!(one.shape(), (1, 1));
        assert!((one[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        for n in [2, 7, 8, 33] {
            let a = steering_matrix(n);
            let err = (a.adjoint() * &a - ComplexMatrix::identity(n, n)).norm();
            assert!(err < 1e-12, "n={n}: {err}");
        }
    }

    #[test]
    fn physical_round_trip() {
        let cfg = SystemConfig::symmetric(16, 6, 4, 4, 4, 1.0, 0.6, 0.1);
        let p = sample_pattern(&cfg, 9).unwrap();
        let pair = sample_channels(&cfg, &p, 10).unwrap();
        let back = to_virtual(&to_physical(&pair.g));
        assert!((back - &pair.g).norm() < 1e-10);
    }

    #[test]
    fn angles_at_half_wavelength() {
        let a = beam_angles(4, HALF_WAVELENGTH);
        // frequencies -3/8, -1/8, 1/8, 3/8
        assert!((a[3] - (0.75f64).asin()).abs() < 1e-15);
        assert!((a[0] + a[3]).abs() < 1e-15);
    }

    #[test]
    fn csv_dump_format() {
        let m = ComplexMatrix::from_row_slice(1, 2, &[Complex64::new(1.0, -0.5), Complex64::new(0.0, 2.0)]);
        let mut buf = Vec::new();
        write_matrix_csv(&m, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "i,j,re,im\n0,0,1e0,-5e-1\n0,1,0e0,2e0\n");
    }
}
