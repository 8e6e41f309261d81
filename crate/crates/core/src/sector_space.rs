//! Fixed-magnetization sector of an N-site spin-1/2 ring.
//!
//! A basis state is an N-bit integer: bit n set means site n is up, site 0 is the
//! least significant bit. States are ordered by integer value and indexed by their
//! combinadic rank, `rank(b) = sum_j C(p_j, j + 1)` over the set-bit positions
//! `p_0 < p_1 < ...`.

use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::{Error, Result, C64};

/// Largest ring held in memory as a sector vector (d = C(28, 14) ~ 4e7).
pub const MAX_SITES: usize = 28;

/// `C(n_sites, n_up)` computed exactly in integer arithmetic.
pub fn sector_dimension(n_sites: usize, n_up: usize) -> Result<u64> {
    if n_sites > 64 {
        return Err(Error::TooManySites { n_sites, max: 64 });
    }
    if n_up > n_sites {
        return Err(Error::InvalidSector { n_sites, n_up });
    }
    let k = n_up.min(n_sites - n_up);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc = C(n, i) here, so the division is exact.
        acc = acc * (n_sites - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).map_err(|_| Error::Overflow { n: n_sites, k: n_up })
}

/// Enumeration of the `C(N, n_up)` basis states of one sector.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    n_sites: usize,
    n_up: usize,
    states: Vec<u64>,
    // (n_sites + 1)^2 table, binom[n * (n_sites + 1) + k] = C(n, k), zero for k > n.
    binom: Vec<u64>,
}

impl SectorBasis {
    pub fn new(n_sites: usize, n_up: usize) -> Result<Self> {
        if n_sites > MAX_SITES {
            return Err(Error::TooManySites { n_sites, max: MAX_SITES });
        }
        if n_sites == 0 || n_up > n_sites {
            return Err(Error::InvalidSector { n_sites, n_up });
        }
        let dim = sector_dimension(n_sites, n_up)? as usize;

        let w = n_sites + 1;
        let mut binom = vec![0u64; w * w];
        for n in 0..=n_sites {
            binom[n * w] = 1;
            for k in 1..=n {
                binom[n * w + k] = binom[(n - 1) * w + k - 1] + binom[(n - 1) * w + k];
            }
        }

        let mut states = Vec::with_capacity(dim);
        if n_up == 0 {
            states.push(0);
        } else {
            // Gosper's hack: next integer with the same popcount.
            let limit = 1u64 << n_sites;
            let mut s = (1u64 << n_up) - 1;
            while s < limit {
                states.push(s);
                let c = s & s.wrapping_neg();
                let r = s + c;
                s = (((r ^ s) >> 2) / c) | r;
            }
        }
        debug_assert_eq!(states.len(), dim);
        Ok(Self { n_sites, n_up, states, binom })
    }

    /// Sector with total `S^z = magnetization`, i.e. `n_up = N/2 + M`.
    pub fn with_magnetization(n_sites: usize, magnetization: f64) -> Result<Self> {
        let n_up = n_sites as f64 / 2.0 + magnetization;
        let rounded = n_up.round();
        if (n_up - rounded).abs() > 1e-9 || rounded < 0.0 || rounded > n_sites as f64 {
            return Err(Error::InvalidMagnetization { n_sites, magnetization });
        }
        Self::new(n_sites, rounded as usize)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn n_up(&self) -> usize {
        self.n_up
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// Total magnetization `M = n_up - N/2`.
    pub fn magnetization(&self) -> f64 {
        self.n_up as f64 - self.n_sites as f64 / 2.0
    }

    /// Basis bitstrings in index order.
    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn unrank(&self, index: usize) -> Result<u64> {
        self.states
            .get(index)
            .copied()
            .ok_or(Error::IndexOutOfRange { index, dim: self.dim() })
    }

    pub fn rank(&self, bits: u64) -> Result<usize> {
        let found = bits.count_ones();
        if found as usize != self.n_up || bits >> self.n_sites != 0 {
            return Err(Error::WrongPopcount { bits, found, expected: self.n_up });
        }
        Ok(self.rank_unchecked(bits))
    }

    #[inline]
    pub(crate) fn rank_unchecked(&self, mut bits: u64) -> usize {
        let mut r = 0u64;
        let mut j = 0usize;
        while bits != 0 {
            let p = bits.trailing_zeros() as usize;
            j += 1;
            r += self.binomial(p, j);
            bits &= bits - 1;
        }
        r as usize
    }

    /// `C(n, k)` for `n <= N`; zero when `k > n`.
    #[inline]
    pub(crate) fn binomial(&self, n: usize, k: usize) -> u64 {
        if k > n {
            0
        } else {
            self.binom[n * (self.n_sites + 1) + k]
        }
    }
}

/// Amplitude vector over a [`SectorBasis`].
#[derive(Debug, Clone)]
pub struct SectorState {
    basis: Arc<SectorBasis>,
    amps: Vec<C64>,
}

impl SectorState {
    pub fn new(basis: Arc<SectorBasis>, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), found: amps.len() });
        }
        Ok(Self { basis, amps })
    }

    pub fn zeros(basis: Arc<SectorBasis>) -> Self {
        let amps = vec![C64::new(0.0, 0.0); basis.dim()];
        Self { basis, amps }
    }

    /// Computational basis state `|bits>`.
    pub fn basis_state(basis: Arc<SectorBasis>, bits: u64) -> Result<Self> {
        let i = basis.rank(bits)?;
        let mut s = Self::zeros(basis);
        s.amps[i] = C64::new(1.0, 0.0);
        Ok(s)
    }

    /// Equal-weight superposition of every basis state.
    pub fn uniform(basis: Arc<SectorBasis>) -> Self {
        let a = 1.0 / (basis.dim() as f64).sqrt();
        let amps = vec![C64::new(a, 0.0); basis.dim()];
        Self { basis, amps }
    }

    /// Typical state with equal moduli and independent uniform phases.
    ///
    /// Its magnetization profile is exactly the sector average, with no
    /// `d^{-1/2}` fluctuations.
    pub fn random_phase<R: Rng + ?Sized>(basis: Arc<SectorBasis>, rng: &mut R) -> Self {
        let a = 1.0 / (basis.dim() as f64).sqrt();
        let phase = Uniform::new(-std::f64::consts::PI, std::f64::consts::PI).unwrap();
        let amps = (0..basis.dim()).map(|_| C64::from_polar(a, phase.sample(rng))).collect();
        Self { basis, amps }
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn n_sites(&self) -> usize {
        self.basis.n_sites()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Rescales to unit norm and returns the previous norm.
    pub fn normalize(&mut self) -> f64 {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            let inv = 1.0 / n;
            self.amps.iter_mut().for_each(|c| *c *= inv);
        }
        n
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &SectorState) -> Result<C64> {
        if self.amps.len() != other.amps.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amps.len(),
                found: other.amps.len(),
            });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn profile(&self) -> Vec<f64> {
        measure_profile(self)
    }
}

/// Normalized state with i.i.d. standard complex Gaussian amplitudes.
pub fn random_sector_state<R: Rng + ?Sized>(basis: &Arc<SectorBasis>, rng: &mut R) -> SectorState {
    let amps = (0..basis.dim())
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re, im)
        })
        .collect();
    let mut s = SectorState { basis: Arc::clone(basis), amps };
    s.normalize();
    s
}

/// Projects onto `site` up and drops that site.
///
/// The result lives on `N - 1` sites with `n_up - 1` up spins, in the same relative
/// order. Returns the normalized projection and its weight `Lambda` (squared norm of
/// the kept part). A zero-weight projection is an error.
pub fn project_up(state: &SectorState, site: usize) -> Result<(SectorState, f64)> {
    let basis = state.basis();
    let n = basis.n_sites();
    if site >= n {
        return Err(Error::SiteOutOfRange { site, n_sites: n });
    }
    if n < 2 || basis.n_up() == 0 {
        return Err(Error::EmptyProjection { site });
    }
    let reduced = Arc::new(SectorBasis::new(n - 1, basis.n_up() - 1)?);
    let mask = 1u64 << site;
    // Removing a fixed set bit is monotone, so kept states stay in index order.
    let amps: Vec<C64> = basis
        .states()
        .iter()
        .zip(state.amplitudes())
        .filter(|(s, _)| *s & mask != 0)
        .map(|(_, a)| *a)
        .collect();
    let mut out = SectorState::new(reduced, amps)?;
    let weight = out.norm_sqr();
    if weight == 0.0 {
        return Err(Error::EmptyProjection { site });
    }
    out.normalize();
    Ok((out, weight))
}

/// Inverse of the basis reduction in [`project_up`]: reinserts `site` as up.
pub fn embed_up(reduced: &SectorState, site: usize, full: &Arc<SectorBasis>) -> Result<SectorState> {
    let n = full.n_sites();
    if site >= n {
        return Err(Error::SiteOutOfRange { site, n_sites: n });
    }
    let rb = reduced.basis();
    if rb.n_sites() + 1 != n || rb.n_up() + 1 != full.n_up() {
        return Err(Error::InvalidSector { n_sites: rb.n_sites(), n_up: rb.n_up() });
    }
    let mask = 1u64 << site;
    let mut src = reduced.amplitudes().iter();
    let zero = C64::new(0.0, 0.0);
    let amps = full
        .states()
        .iter()
        .map(|s| if s & mask != 0 { *src.next().unwrap() } else { zero })
        .collect();
    SectorState::new(Arc::clone(full), amps)
}

/// `M_n = sum_i |c_i|^2 (bit_n(i) - 1/2)` for every site.
pub fn measure_profile(state: &SectorState) -> Vec<f64> {
    let n = state.n_sites();
    let mut up = vec![0.0f64; n];
    let mut total = 0.0;
    for (&s, c) in state.basis().states().iter().zip(state.amplitudes()) {
        let w = c.norm_sqr();
        total += w;
        let mut b = s;
        while b != 0 {
            up[b.trailing_zeros() as usize] += w;
            b &= b - 1;
        }
    }
    up.iter().map(|u| u - 0.5 * total).collect()
}
