//! Random versus CSI-driven beam selection.
//!
//! Every strategy sees the same pattern and channel draw in a given trial.
//! Eve always picks her receive beams to maximize her own capacity given
//! Alice's choice.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::channel::{sample_channels_with, sample_pattern_with, slice, trial_rng, SparsityPattern, VirtualChannelPair};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::linalg::{neumaier_sum, Estimate};
use crate::rates::{bob_trial_rate, eve_trial_capacity, positive_part, Method, RateReport};
use crate::scheme::PowerSplit;

/// Upper limit on the subsets examined per trial by the exhaustive strategy.
pub const EXHAUSTIVE_CAP: u64 = 1_000_000;
/// Candidate evaluations allowed in the greedy strategy's column-swap search.
pub const MAX_SWAP_EVALUATIONS: usize = 64;
/// Eve searches her receive subsets exhaustively up to this many, greedily beyond.
pub const EVE_EXHAUSTIVE_CAP: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Uniform subsets of the dominant beams (statistical CSI only).
    Random,
    /// Alice's dominant columns ranked by Bob-to-Eve energy ratio and refined
    /// by single swaps; Bob keeps his strongest rows for those columns.
    Greedy,
    /// Joint search over all Alice column and Bob row subsets.
    Exhaustive,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Random, Strategy::Greedy, Strategy::Exhaustive];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::Greedy => "greedy",
            Strategy::Exhaustive => "exhaustive",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown beam-selection strategy `{s}`")))
    }
}

/// `C(n, k)`, saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Calls `f` on every sorted `k`-subset of `set` in lexicographic order.
fn for_each_subset(set: &[usize], k: usize, mut f: impl FnMut(&[usize])) {
    let n = set.len();
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut buf = vec![0; k];
    loop {
        for (b, &i) in buf.iter_mut().zip(&idx) {
            *b = set[i];
        }
        f(&buf);
        let Some(p) = (0..k).rev().find(|&p| idx[p] != p + n - k) else {
            return;
        };
        idx[p] += 1;
        for q in p + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// The `k` entries of `set` with the largest `score`, sorted by index. Ties
/// keep the lower index.
fn top_k(set: &[usize], k: usize, score: impl Fn(usize) -> f64) -> Vec<usize> {
    let mut ranked: Vec<(f64, usize)> = set.iter().map(|&i| (score(i), i)).collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut out: Vec<usize> = ranked.into_iter().take(k).map(|(_, i)| i).collect();
    out.sort_unstable();
    out
}

struct Evaluator<'a> {
    pair: &'a VirtualChannelPair,
    cx: f64,
    can: f64,
    noise_var: f64,
}

impl Evaluator<'_> {
    fn with(&self, alice: &[usize], bob: &[usize], eve: &[usize]) -> VirtualChannelPair {
        let mut pair = self.pair.clone();
        pair.pattern.u_t_sel = alice.to_vec();
        pair.pattern.u_r_sel = bob.to_vec();
        pair.pattern.e_r_sel = eve.to_vec();
        pair
    }

    fn bob(&self, alice: &[usize], bob: &[usize]) -> Result<f64> {
        let pair = self.with(alice, bob, &self.pair.pattern.e_r_sel);
        let slices = slice(&pair)?;
        bob_trial_rate(&slices, self.cx, self.can, self.noise_var)
            .ok_or_else(|| Error::Divergent("Bob's interference covariance is singular".into()))
    }

    fn eve(&self, alice: &[usize], eve: &[usize]) -> Result<f64> {
        let pair = self.with(alice, &self.pair.pattern.u_r_sel, eve);
        eve_trial_capacity(&slice(&pair)?, self.cx, self.can)
    }

    /// Eve's capacity under her best receive subset for Alice's columns.
    fn eve_best(&self, alice: &[usize], m_e: usize) -> Result<f64> {
        let p = &self.pair.pattern;
        if binomial(p.e_r.len(), m_e) <= EVE_EXHAUSTIVE_CAP {
            let mut best = f64::NEG_INFINITY;
            let mut err = None;
            for_each_subset(&p.e_r, m_e, |rows| match self.eve(alice, rows) {
                Ok(c) => best = best.max(c),
                Err(e) => err = Some(e),
            });
            return match err {
                Some(e) => Err(e),
                None => Ok(best),
            };
        }
        let h = &self.pair.h;
        let rows = top_k(&p.e_r, m_e, |i| alice.iter().map(|&j| h[(i, j)].norm_sqr()).sum());
        self.eve(alice, &rows)
    }
}

fn trial(cfg: &SystemConfig, pattern: &SparsityPattern, pair: &VirtualChannelPair, strategy: Strategy) -> Result<(f64, f64)> {
    let split = PowerSplit::from_config(cfg);
    let ev = Evaluator {
        pair,
        cx: split.signal_per_stream(cfg.m_t),
        can: split.an_per_beam(cfg.an_beams()),
        noise_var: cfg.noise_var,
    };
    match strategy {
        Strategy::Random => Ok((ev.bob(&pattern.u_t_sel, &pattern.u_r_sel)?, ev.eve_best(&pattern.u_t_sel, cfg.m_e)?)),
        Strategy::Greedy => {
            let (g, h) = (&pair.g, &pair.h);
            let mut alice = top_k(&pattern.u_t, cfg.m_t, |j| {
                let bob: f64 = pattern.u_r.iter().map(|&i| g[(i, j)].norm_sqr()).sum();
                let eve: f64 = pattern.e_r.iter().map(|&i| h[(i, j)].norm_sqr()).sum();
                bob / eve
            });
            let rows_for = |alice: &[usize]| {
                top_k(&pattern.u_r, cfg.m_r, |i| alice.iter().map(|&j| g[(i, j)].norm_sqr()).sum())
            };
            let score = |alice: &[usize]| -> Result<(f64, f64)> {
                Ok((ev.bob(alice, &rows_for(alice))?, ev.eve_best(alice, cfg.m_e)?))
            };
            let mut best = score(&alice)?;
            // First-improvement single-column swaps on the instantaneous secrecy rate.
            let mut budget = MAX_SWAP_EVALUATIONS;
            'search: loop {
                for k in 0..alice.len() {
                    for &j in pattern.u_t.iter().filter(|j| !alice.contains(j)) {
                        if budget == 0 {
                            break 'search;
                        }
                        budget -= 1;
                        let mut cand = alice.clone();
                        cand[k] = j;
                        cand.sort_unstable();
                        let s = score(&cand)?;
                        if s.0 - s.1 > best.0 - best.1 + 1e-12 {
                            best = s;
                            alice = cand;
                            continue 'search;
                        }
                    }
                }
                break;
            }
            Ok(best)
        }
        Strategy::Exhaustive => {
            let mut best: Option<(f64, f64)> = None;
            let mut err = None;
            for_each_subset(&pattern.u_t, cfg.m_t, |alice| {
                if err.is_some() {
                    return;
                }
                let eve = match ev.eve_best(alice, cfg.m_e) {
                    Ok(c) => c,
                    Err(e) => return err = Some(e),
                };
                for_each_subset(&pattern.u_r, cfg.m_r, |bob_rows| match ev.bob(alice, bob_rows) {
                    Ok(r) if best.is_none_or(|(b, e)| r - eve > b - e) => best = Some((r, eve)),
                    Ok(_) => {}
                    Err(e) => err = Some(e),
                });
            });
            match err {
                Some(e) => Err(e),
                None => best.ok_or_else(|| Error::Domain("no selector subsets".into())),
            }
        }
    }
}

fn exhaustive_count(cfg: &SystemConfig) -> u64 {
    let alice = binomial(cfg.l_t, cfg.m_t);
    let bob = binomial(cfg.l_r, cfg.m_r);
    let eve = binomial(cfg.l_e, cfg.m_e).min(EVE_EXHAUSTIVE_CAP);
    alice.saturating_mul(bob.saturating_add(eve))
}

/// Average instantaneous rates when Alice and Bob pick their RF-chain beams
/// with `strategy`. Trial `t` draws its pattern and full channels from
/// `trial_rng(seed, t)`, so strategies compared under one seed see the same
/// realizations. `std_err` refers to the per-trial `R_U - C_E`.
pub fn beam_selection_compare(cfg: &SystemConfig, trials: usize, seed: u64, strategy: Strategy) -> Result<RateReport> {
    cfg.ensure_valid()?;
    if trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    if strategy == Strategy::Exhaustive {
        let count = exhaustive_count(cfg);
        if count > EXHAUSTIVE_CAP {
            return Err(Error::Unsupported(format!(
                "exhaustive selection needs {count} subset evaluations per trial (cap {EXHAUSTIVE_CAP})"
            )));
        }
    }
    let rates: Vec<(f64, f64)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let pattern = sample_pattern_with(cfg, &mut rng);
            let pair = sample_channels_with(cfg, &pattern, &mut rng);
            trial(cfg, &pattern, &pair, strategy)
        })
        .collect::<Result<_>>()?;
    let n = trials as f64;
    let r_u = neumaier_sum(rates.iter().map(|r| r.0)) / n;
    let c_e = neumaier_sum(rates.iter().map(|r| r.1)) / n;
    let diffs: Vec<f64> = rates.iter().map(|(b, e)| b - e).collect();
    Ok(RateReport {
        r_u,
        c_e,
        r_s: positive_part(r_u - c_e),
        method: Method::MonteCarlo,
        trials,
        std_err: Estimate::from_samples(&diffs).std_err,
        retries: 0,
        warning: None,
    })
}
