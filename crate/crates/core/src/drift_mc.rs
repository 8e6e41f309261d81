//! Excitation drift in pure SWAP circuits.
//!
//! At `J = pi` every gate swaps its two sites, so a single excitation hops whenever a
//! gate touches it. Walking it through the gate order until it has wound the ring
//! once gives a gate count `g`; the drift is `N / (g / N)` sites per period.
//!
//! The typical drift is reported as `N^2 / <g>`, the ring length over the mean
//! winding time. The mean of per-permutation ratios `<N^2 / g>` is reported
//! alongside it.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Exact enumeration is used up to this many permutations (N <= 10).
pub const EXACT_LIMIT: u64 = 4_000_000;

const BATCH: u64 = 1 << 14;

/// Gates applied until the excitation starting at `floor(N/2)` reaches a net
/// displacement of `+-N`, or `None` if it has not after `N^3` periods.
pub fn winding_gate_count(perm: &[usize]) -> Option<u64> {
    let n = perm.len();
    let mut x = n / 2;
    let mut disp: i64 = 0;
    let mut g: u64 = 0;
    let cap = (n * n * n).max(8) as u64;
    for _ in 0..cap {
        for &b in perm {
            g += 1;
            let right = (b + 1) % n;
            if x == b {
                x = right;
                disp += 1;
            } else if x == right {
                x = b;
                disp -= 1;
            } else {
                continue;
            }
            if disp.unsigned_abs() as usize == n {
                return Some(g);
            }
        }
    }
    None
}

/// `N^2 / g` for one bond order.
pub fn drift_of_permutation(perm: &[usize]) -> Result<f64> {
    check_permutation(perm)?;
    let n = perm.len() as f64;
    let g = winding_gate_count(perm)
        .ok_or_else(|| Error::InvalidInput(format!("excitation never winds for {perm:?}")))?;
    Ok(n * n / g as f64)
}

/// Bond order that carries the excitation once around the ring per period (drift N).
pub fn staircase(n: usize) -> Vec<usize> {
    (0..n).map(|j| (n / 2 + j) % n).collect()
}

/// Bond order that moves the excitation by one site per period, backwards.
/// Drift `N^2 / (N^2 - 2N + 2)`.
pub fn reversed_staircase(n: usize) -> Vec<usize> {
    (0..n).map(|j| (n / 2 + n - 1 + j) % n).collect()
}

fn check_permutation(perm: &[usize]) -> Result<()> {
    let n = perm.len();
    if n < 2 {
        return Err(Error::InvalidInput("need at least 2 bonds".into()));
    }
    let mut seen = vec![false; n];
    for &b in perm {
        if b >= n || std::mem::replace(&mut seen[b], true) {
            return Err(Error::InvalidInput(format!("{perm:?} is not a permutation")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftEstimate {
    pub n_sites: usize,
    pub samples: u64,
    /// `N^2 / <g>`.
    pub mean_drift: f64,
    /// Delta-method standard error of `mean_drift`; zero when exact.
    pub stderr: f64,
    /// `<N^2 / g>`.
    pub mean_of_ratios: f64,
    pub mean_gates: f64,
    /// All `N!` permutations enumerated.
    pub exact: bool,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    count: u64,
    sum_g: f64,
    sum_g2: f64,
    sum_ratio: f64,
}

impl Tally {
    fn push(&mut self, n: usize, g: u64) {
        let g = g as f64;
        self.count += 1;
        self.sum_g += g;
        self.sum_g2 += g * g;
        self.sum_ratio += (n * n) as f64 / g;
    }

    fn merge(mut self, o: Tally) -> Tally {
        self.count += o.count;
        self.sum_g += o.sum_g;
        self.sum_g2 += o.sum_g2;
        self.sum_ratio += o.sum_ratio;
        self
    }
}

fn factorial(n: usize) -> Option<u64> {
    (1..=n as u64).try_fold(1u64, |a, k| a.checked_mul(k))
}

/// Typical drift over uniformly random bond orders.
///
/// Enumerates all `N!` orders when that is at most [`EXACT_LIMIT`]; otherwise draws
/// `n_samples` orders. Sampling is split into fixed batches, each on its own ChaCha8
/// stream keyed by one seed drawn from `rng`, so the result does not depend on the
/// thread count.
pub fn typical_drift<R: Rng + ?Sized>(n: usize, n_samples: u64, rng: &mut R) -> Result<DriftEstimate> {
    if n < 2 {
        return Err(Error::InvalidInput("need at least 2 sites".into()));
    }
    let exact = factorial(n).is_some_and(|f| f <= EXACT_LIMIT);
    let tally = if exact {
        enumerate_all(n)?
    } else {
        if n_samples == 0 {
            return Err(Error::InvalidInput("n_samples must be at least 1".into()));
        }
        sample(n, n_samples, rng.random())?
    };
    let nn = (n * n) as f64;
    let k = tally.count as f64;
    let mean_g = tally.sum_g / k;
    let mean_drift = nn / mean_g;
    let stderr = if exact || tally.count < 2 {
        0.0
    } else {
        let var_g = (tally.sum_g2 - k * mean_g * mean_g).max(0.0) / (k - 1.0);
        mean_drift * (var_g / k).sqrt() / mean_g
    };
    Ok(DriftEstimate {
        n_sites: n,
        samples: tally.count,
        mean_drift,
        stderr,
        mean_of_ratios: tally.sum_ratio / k,
        mean_gates: mean_g,
        exact,
    })
}

fn sample(n: usize, n_samples: u64, seed: u64) -> Result<Tally> {
    let batches = n_samples.div_ceil(BATCH);
    let tallies: Vec<Result<Tally>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let len = BATCH.min(n_samples - b * BATCH);
            let mut perm: Vec<usize> = (0..n).collect();
            let mut t = Tally::default();
            for _ in 0..len {
                perm.shuffle(&mut rng);
                t.push(n, gates_or_err(&perm)?);
            }
            Ok(t)
        })
        .collect();
    tallies.into_iter().try_fold(Tally::default(), |a, t| Ok(a.merge(t?)))
}

fn gates_or_err(perm: &[usize]) -> Result<u64> {
    winding_gate_count(perm).ok_or_else(|| Error::InvalidInput(format!("excitation never winds for {perm:?}")))
}

fn enumerate_all(n: usize) -> Result<Tally> {
    // One task per leading bond; the rest in lexicographic order.
    let tallies: Vec<Result<Tally>> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut perm: Vec<usize> = std::iter::once(first).chain((0..n).filter(|&b| b != first)).collect();
            let mut t = Tally::default();
            loop {
                t.push(n, gates_or_err(&perm)?);
                if !next_permutation(&mut perm[1..]) {
                    break;
                }
            }
            Ok(t)
        })
        .collect();
    tallies.into_iter().try_fold(Tally::default(), |a, t| Ok(a.merge(t?)))
}

/// Advances to the next lexicographic permutation; false after the last one.
pub fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}
