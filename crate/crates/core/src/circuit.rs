//! Floquet period: N bond gates on a ring applied in a random bond order.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Uniform};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::gates::{build_gate, GateParams, TwoQubitGate};
use crate::sector_space::SectorState;
use crate::{Error, Result, C64};

/// Bond `b` couples sites `b` and `(b + 1) mod N`; `permutation[0]` acts first.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FloquetCircuit {
    n_sites: usize,
    bonds: Vec<GateParams>,
    permutation: Vec<usize>,
    seed: Option<u64>,
    #[serde(skip)]
    gates: Vec<TwoQubitGate>,
}

impl FloquetCircuit {
    pub fn new(bonds: Vec<GateParams>, permutation: Vec<usize>) -> Result<Self> {
        let n = bonds.len();
        if n < 2 {
            return Err(Error::InvalidInput(format!("a ring needs at least 2 sites, got {n}")));
        }
        if permutation.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: permutation.len() });
        }
        let mut seen = vec![false; n];
        for &b in &permutation {
            if b >= n || std::mem::replace(&mut seen[b], true) {
                return Err(Error::InvalidInput(format!(
                    "permutation {permutation:?} is not a bijection on 0..{n}"
                )));
            }
        }
        let gates = bonds.iter().map(build_gate).collect();
        Ok(Self { n_sites: n, bonds, permutation, seed: None, gates })
    }

    /// Same gate on every bond.
    pub fn homogeneous(n_sites: usize, params: GateParams, permutation: Vec<usize>) -> Result<Self> {
        Self::new(vec![params; n_sites], permutation)
    }

    /// Circuit drawn from a fresh ChaCha8 stream seeded with `seed`; the seed is recorded.
    pub fn from_seed(n_sites: usize, j: f64, jz: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = sample_circuit(n_sites, j, jz, &mut rng);
        c.seed = Some(seed);
        c
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn bonds(&self) -> &[GateParams] {
        &self.bonds
    }

    pub fn gates(&self) -> &[TwoQubitGate] {
        &self.gates
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Rebuilds gate matrices after deserialization.
    pub fn rebuild(&mut self) {
        self.gates = self.bonds.iter().map(build_gate).collect();
    }

    /// Applies the single gate on `bond`.
    pub fn apply_gate(&self, bond: usize, state: &mut SectorState) -> Result<()> {
        self.check(state)?;
        if bond >= self.n_sites {
            return Err(Error::IndexOutOfRange { index: bond, dim: self.n_sites });
        }
        apply_bond(&self.gates[bond], bond, (bond + 1) % self.n_sites, state);
        Ok(())
    }

    pub fn apply(&self, state: &mut SectorState) -> Result<()> {
        apply_floquet(self, state)
    }

    fn check(&self, state: &SectorState) -> Result<()> {
        if state.n_sites() != self.n_sites {
            return Err(Error::DimensionMismatch { expected: self.n_sites, found: state.n_sites() });
        }
        Ok(())
    }
}

/// Draws `(h, h', phi)` uniform on `[-pi, pi]` per bond, then a uniform bond order.
pub fn sample_circuit<R: Rng + ?Sized>(n_sites: usize, j: f64, jz: f64, rng: &mut R) -> FloquetCircuit {
    let u = Uniform::new_inclusive(-PI, PI).unwrap();
    let bonds: Vec<GateParams> = (0..n_sites)
        .map(|_| {
            let h = u.sample(rng);
            let h_prime = u.sample(rng);
            let phi = u.sample(rng);
            GateParams { j, jz, h, h_prime, phi }
        })
        .collect();
    let mut permutation: Vec<usize> = (0..n_sites).collect();
    permutation.shuffle(rng);
    FloquetCircuit::new(bonds, permutation).expect("sampled circuit is valid")
}

/// One Floquet period, in place.
pub fn apply_floquet(circuit: &FloquetCircuit, state: &mut SectorState) -> Result<()> {
    circuit.check(state)?;
    let n = circuit.n_sites;
    for &b in &circuit.permutation {
        apply_bond(&circuit.gates[b], b, (b + 1) % n, state);
    }
    Ok(())
}

/// `k` Floquet periods, in place.
pub fn apply_floquet_power(circuit: &FloquetCircuit, state: &mut SectorState, k: u64) -> Result<()> {
    circuit.check(state)?;
    for _ in 0..k {
        apply_floquet(circuit, state)?;
    }
    Ok(())
}

// Gate on sites (a, c) with a the "left" site of the bond.
fn apply_bond(g: &TwoQubitGate, a: usize, c: usize, state: &mut SectorState) {
    let basis = std::sync::Arc::clone(state.basis());
    let states = basis.states();
    let amps = state.amplitudes_mut();
    let ma = 1u64 << a;
    let mc = 1u64 << c;
    let flip = ma | mc;
    let bulk = c == a + 1;
    let [[g00, g01], [g10, g11]] = g.center;
    for (i, &s) in states.iter().enumerate() {
        match (s & ma != 0, s & mc != 0) {
            (false, false) => amps[i] *= g.down_down,
            (true, true) => amps[i] *= g.up_up,
            (true, false) => {
                // Moving the set bit from a to a + 1 raises the rank by C(a, j),
                // j = number of set bits below a.
                let k = if bulk {
                    i + basis.binomial(a, (s & (ma - 1)).count_ones() as usize) as usize
                } else {
                    basis.rank_unchecked(s ^ flip)
                };
                let (x, y) = (amps[i], amps[k]);
                amps[i] = g00 * x + g01 * y;
                amps[k] = g10 * x + g11 * y;
            }
            (false, true) => {}
        }
    }
}

/// Relabels sites `n -> n + 1 (mod N)`.
pub fn cyclic_shift(state: &SectorState) -> SectorState {
    let basis = state.basis();
    let n = basis.n_sites();
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut amps = vec![C64::new(0.0, 0.0); basis.dim()];
    for (&s, a) in basis.states().iter().zip(state.amplitudes()) {
        let t = ((s << 1) | (s >> (n - 1))) & mask;
        amps[basis.rank_unchecked(t)] = *a;
    }
    SectorState::new(std::sync::Arc::clone(basis), amps).expect("same basis")
}
