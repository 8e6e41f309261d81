//! Eigenphases and eigenvectors of the Floquet operator near a target phase.
//!
//! Eigenvalues of `U` are written `e^{-i phi}`. The polynomial filter
//! `K = sum_{k=0}^{K} e^{ik phi_tgt} U^k` maps them to a geometric sum whose modulus
//! peaks at `phi = phi_tgt`, so the largest-modulus eigenvalues of the filter are
//! the wanted phases. A thick-restarted Arnoldi iteration on the filter generates
//! the subspace; Ritz vectors are then refined against `U` itself and accepted on
//! an explicit residual.

use std::f64::consts::PI;
use std::sync::Arc;

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatRef, Par};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::circuit::{apply_floquet, FloquetCircuit};
use crate::gates::wrap_angle;
use crate::sector_space::{SectorBasis, SectorState};
use crate::{Error, Result, C64};

const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);

/// Adjacent phases closer than this count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolfedConfig {
    pub phi_target: f64,
    pub filter_order: usize,
    pub n_eigs: usize,
    /// Acceptance threshold on `||U x - e^{-i phi} x||`.
    pub tol: f64,
    /// Filter applications allowed; `None` means `300 n_eigs`.
    pub max_matvecs: Option<usize>,
    /// Krylov basis size; `None` means `2 n_eigs + 32` (capped at the dimension).
    pub krylov_dim: Option<usize>,
}

impl PolfedConfig {
    /// Default eigenpair count and filter order for a sector of dimension `d >= 10`.
    pub fn for_dimension(d: usize) -> Result<Self> {
        Ok(Self {
            phi_target: 0.0,
            filter_order: default_filter_order(d)?,
            n_eigs: default_n_eigs(d)?,
            tol: 1e-8,
            max_matvecs: None,
            krylov_dim: None,
        })
    }

    pub fn matvec_cap(&self) -> usize {
        self.max_matvecs.unwrap_or(300 * self.n_eigs)
    }

    pub fn basis_size(&self, d: usize) -> usize {
        self.krylov_dim.unwrap_or(2 * self.n_eigs + 32).min(d)
    }
}

/// `min(d/10, 750)`, rounded down.
pub fn default_n_eigs(d: usize) -> Result<usize> {
    if d < 10 {
        return Err(Error::InvalidInput(format!("default eigenpair count needs d >= 10, got {d}")));
    }
    Ok((d / 10).min(750))
}

/// `ceil(0.4 d / min(d/10, 750))` with the unrounded `d/10`: 4 up to `d = 7500`,
/// `ceil(d / 1875)` beyond.
pub fn default_filter_order(d: usize) -> Result<usize> {
    if d < 10 {
        return Err(Error::InvalidInput(format!("default filter order needs d >= 10, got {d}")));
    }
    Ok(if d <= 7500 { 4 } else { d.div_ceil(1875) })
}

/// Modulus of the filter at eigenphase `phi`.
pub fn filter_response(phi: f64, phi_target: f64, order: usize) -> f64 {
    let z = C64::from_polar(1.0, phi_target - phi);
    let mut acc = ZERO;
    let mut p = ONE;
    for _ in 0..=order {
        acc += p;
        p *= z;
    }
    acc.norm()
}

/// `sum_{k=0}^{K} e^{ik phi_tgt} U^k v`.
pub fn apply_polfed(circuit: &FloquetCircuit, cfg: &PolfedConfig, v: &SectorState) -> Result<SectorState> {
    let mut out = v.clone();
    let mut op = FilterOp::new(circuit, v.basis(), cfg)?;
    op.apply(v.amplitudes(), out.amplitudes_mut())?;
    Ok(out)
}

struct FilterOp<'a> {
    circuit: &'a FloquetCircuit,
    step: C64,
    order: usize,
    work: SectorState,
}

impl<'a> FilterOp<'a> {
    fn new(circuit: &'a FloquetCircuit, basis: &Arc<SectorBasis>, cfg: &PolfedConfig) -> Result<Self> {
        if basis.n_sites() != circuit.n_sites() {
            return Err(Error::DimensionMismatch { expected: circuit.n_sites(), found: basis.n_sites() });
        }
        Ok(Self {
            circuit,
            step: C64::from_polar(1.0, cfg.phi_target),
            order: cfg.filter_order,
            work: SectorState::zeros(Arc::clone(basis)),
        })
    }

    fn apply(&mut self, x: &[C64], out: &mut [C64]) -> Result<()> {
        out.copy_from_slice(x);
        self.work.amplitudes_mut().copy_from_slice(x);
        let mut phase = ONE;
        for _ in 0..self.order {
            apply_floquet(self.circuit, &mut self.work)?;
            phase *= self.step;
            for (o, w) in out.iter_mut().zip(self.work.amplitudes()) {
                *o += phase * w;
            }
        }
        Ok(())
    }

    fn apply_u(&mut self, x: &[C64], out: &mut [C64]) -> Result<()> {
        self.work.amplitudes_mut().copy_from_slice(x);
        apply_floquet(self.circuit, &mut self.work)?;
        out.copy_from_slice(self.work.amplitudes());
        Ok(())
    }
}

/// Accepted eigenpairs sorted by phase.
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub basis: Arc<SectorBasis>,
    pub phases: Vec<f64>,
    pub residuals: Vec<f64>,
    pub vectors: Vec<Vec<C64>>,
    /// All `n_eigs` pairs nearest the target met the tolerance.
    pub converged: bool,
    pub matvecs: usize,
    pub restarts: usize,
}

impl Eigenpairs {
    pub fn state(&self, i: usize) -> SectorState {
        SectorState::new(Arc::clone(&self.basis), self.vectors[i].clone()).expect("vector matches basis")
    }
}

struct Refined {
    phase: f64,
    residual: f64,
    vector: Vec<C64>,
}

/// The `n_eigs` eigenpairs of `U` nearest `phi_target` in the sector of `basis`.
///
/// Hitting the matvec cap is not an error: whatever met the tolerance is returned
/// with `converged = false`.
pub fn arnoldi_eigenpairs<R: Rng + ?Sized>(
    circuit: &FloquetCircuit,
    basis: &Arc<SectorBasis>,
    cfg: &PolfedConfig,
    rng: &mut R,
) -> Result<Eigenpairs> {
    let d = basis.dim();
    if cfg.filter_order == 0 {
        return Err(Error::InvalidInput("filter order must be at least 1".into()));
    }
    if cfg.n_eigs == 0 || cfg.n_eigs > d {
        return Err(Error::InvalidInput(format!("n_eigs = {} outside 1..={d}", cfg.n_eigs)));
    }
    let mut op = FilterOp::new(circuit, basis, cfg)?;
    let nev = cfg.n_eigs;
    let m = cfg.basis_size(d).max(nev.min(d));
    let keep = if m == d { d } else { (nev + (m - nev) / 2).clamp(nev, m - 1) };
    let cap = cfg.matvec_cap();

    let mut v = Mat::<C64>::zeros(d, m + 1);
    let mut h = Mat::<C64>::zeros(m + 1, m);
    random_unit(v.col_as_slice_mut(0), rng);

    let mut start = 0;
    let mut matvecs = 0;
    let mut restarts = 0;
    let mut w = Mat::<C64>::zeros(d, 1);
    loop {
        // Extend the Krylov decomposition to m columns (or to an invariant full space).
        let mut m_eff = m;
        for j in start..m {
            op.apply(v.col_as_slice(j), w.col_as_slice_mut(0))?;
            matvecs += 1;
            let before = col_norm(w.col_as_slice(0));
            let coeffs = orthogonalize(v.subcols(0, j + 1), &mut w);
            for i in 0..=j {
                h[(i, j)] += coeffs[(i, 0)];
            }
            let beta = col_norm(w.col_as_slice(0));
            if beta <= 1e-10 * before.max(f64::MIN_POSITIVE) {
                h[(j + 1, j)] = ZERO;
                if j + 1 == d {
                    m_eff = d;
                    break;
                }
                // Invariant subspace: continue from a fresh direction.
                random_unit(w.col_as_slice_mut(0), rng);
                orthogonalize(v.subcols(0, j + 1), &mut w);
                let n = col_norm(w.col_as_slice(0));
                for (dst, src) in v.col_as_slice_mut(j + 1).iter_mut().zip(w.col_as_slice(0)) {
                    *dst = src / n;
                }
            } else {
                h[(j + 1, j)] = C64::new(beta, 0.0);
                for (dst, src) in v.col_as_slice_mut(j + 1).iter_mut().zip(w.col_as_slice(0)) {
                    *dst = src / beta;
                }
            }
        }

        let hm = h.subrows(0, m_eff).subcols(0, m_eff).to_owned();
        let evd = hm.eigen().map_err(|e| Error::InvalidInput(format!("Hessenberg eigensolve failed: {e:?}")))?;
        let theta: Vec<C64> = evd.S().column_vector().iter().copied().collect();
        let mut order: Vec<usize> = (0..m_eff).collect();
        order.sort_by(|&a, &b| theta[b].norm().total_cmp(&theta[a].norm()));
        let k = keep.min(m_eff);
        let y = evd.U();
        let y_sel = Mat::<C64>::from_fn(m_eff, k, |i, c| y[(i, order[c])]);
        let q = y_sel.qr().compute_thin_Q();
        let mut x = Mat::<C64>::zeros(d, k);
        matmul(x.as_mut(), Accum::Replace, v.subcols(0, m_eff), q.as_ref(), ONE, Par::Seq);

        let refined = refine(&mut op, x.as_ref())?;
        let mut by_distance: Vec<&Refined> = refined.iter().collect();
        by_distance.sort_by(|a, b| {
            wrap_angle(a.phase - cfg.phi_target)
                .abs()
                .total_cmp(&wrap_angle(b.phase - cfg.phi_target).abs())
        });
        let nearest = &by_distance[..nev.min(by_distance.len())];
        let done = nearest.len() == nev && nearest.iter().all(|p| p.residual < cfg.tol);
        if done || m_eff == d || matvecs >= cap {
            let mut acc: Vec<&Refined> = nearest.iter().copied().filter(|p| p.residual < cfg.tol).collect();
            acc.sort_by(|a, b| a.phase.total_cmp(&b.phase));
            return Ok(Eigenpairs {
                basis: Arc::clone(basis),
                phases: acc.iter().map(|p| p.phase).collect(),
                residuals: acc.iter().map(|p| p.residual).collect(),
                vectors: acc.iter().map(|p| p.vector.clone()).collect(),
                converged: done,
                matvecs,
                restarts,
            });
        }

        // Thick restart on the retained Ritz space: A V Q = V Q (Q^H H Q) + f (e_m^T Q).
        let mut hq = Mat::<C64>::zeros(m_eff, k);
        matmul(hq.as_mut(), Accum::Replace, hm.as_ref(), q.as_ref(), ONE, Par::Seq);
        let mut hk = Mat::<C64>::zeros(k, k);
        matmul(hk.as_mut(), Accum::Replace, q.adjoint(), hq.as_ref(), ONE, Par::Seq);
        let beta = h[(m_eff, m_eff - 1)];
        let residual = v.col_as_slice(m_eff).to_vec();
        h.fill(ZERO);
        for c in 0..k {
            v.col_as_slice_mut(c).copy_from_slice(x.col_as_slice(c));
            for r in 0..k {
                h[(r, c)] = hk[(r, c)];
            }
            h[(k, c)] = beta * q[(m_eff - 1, c)];
        }
        v.col_as_slice_mut(k).copy_from_slice(&residual);
        start = k;
        restarts += 1;
    }
}

/// Rayleigh-Ritz of `U` on the orthonormal columns of `x`.
fn refine(op: &mut FilterOp, x: MatRef<C64>) -> Result<Vec<Refined>> {
    let (d, k) = (x.nrows(), x.ncols());
    let mut ux = Mat::<C64>::zeros(d, k);
    let mut xc = vec![ZERO; d];
    for c in 0..k {
        xc.iter_mut().zip(x.col(c).iter()).for_each(|(a, b)| *a = *b);
        op.apply_u(&xc, ux.col_as_slice_mut(c))?;
    }
    let mut g = Mat::<C64>::zeros(k, k);
    matmul(g.as_mut(), Accum::Replace, x.adjoint(), ux.as_ref(), ONE, Par::Seq);
    let evd = g.eigen().map_err(|e| Error::InvalidInput(format!("Ritz eigensolve failed: {e:?}")))?;
    let z = evd.U();
    let mut vecs = Mat::<C64>::zeros(d, k);
    let mut uvecs = Mat::<C64>::zeros(d, k);
    matmul(vecs.as_mut(), Accum::Replace, x, z, ONE, Par::Seq);
    matmul(uvecs.as_mut(), Accum::Replace, ux.as_ref(), z, ONE, Par::Seq);
    Ok((0..k)
        .map(|c| {
            let xv = vecs.col_as_slice(c);
            let uv = uvecs.col_as_slice(c);
            let n = col_norm(xv);
            let vector: Vec<C64> = xv.iter().map(|a| a / n).collect();
            let u: Vec<C64> = uv.iter().map(|a| a / n).collect();
            let overlap: C64 = vector.iter().zip(&u).map(|(a, b)| a.conj() * b).sum();
            let lambda = overlap / overlap.norm();
            let residual = u.iter().zip(&vector).map(|(a, b)| (a - lambda * b).norm_sqr()).sum::<f64>().sqrt();
            Refined { phase: wrap_angle(-overlap.arg()), residual, vector }
        })
        .collect())
}

/// Two passes of classical Gram-Schmidt; returns the summed coefficients.
fn orthogonalize(v: MatRef<C64>, w: &mut Mat<C64>) -> Mat<C64> {
    let mut total = Mat::<C64>::zeros(v.ncols(), 1);
    let mut c = Mat::<C64>::zeros(v.ncols(), 1);
    for _ in 0..2 {
        matmul(c.as_mut(), Accum::Replace, v.adjoint(), w.as_ref(), ONE, Par::Seq);
        matmul(w.as_mut(), Accum::Add, v, c.as_ref(), -ONE, Par::Seq);
        for i in 0..v.ncols() {
            total[(i, 0)] += c[(i, 0)];
        }
    }
    total
}

fn col_norm(x: &[C64]) -> f64 {
    x.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn random_unit<R: Rng + ?Sized>(x: &mut [C64], rng: &mut R) {
    for a in x.iter_mut() {
        *a = C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng));
    }
    let n = col_norm(x);
    x.iter_mut().for_each(|a| *a /= n);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRatios {
    pub values: Vec<f64>,
    /// Adjacent pairs closer than [`DEGENERACY_TOL`]; their ratios are recorded as 0.
    pub degeneracies: usize,
}

impl GapRatios {
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// `r_i = min(d_{i-1}, d_i) / max(d_{i-1}, d_i)` over sorted phases; the wrap-around
/// gap is not used.
pub fn gap_ratios(phases: &[f64]) -> Result<GapRatios> {
    if phases.len() < 3 {
        return Err(Error::InvalidInput(format!("need at least 3 phases, got {}", phases.len())));
    }
    if !phases.is_sorted() {
        return Err(Error::InvalidInput("phases must be sorted".into()));
    }
    let gaps: Vec<f64> = phases.windows(2).map(|w| w[1] - w[0]).collect();
    let degeneracies = gaps.iter().filter(|g| **g < DEGENERACY_TOL).count();
    let values = gaps
        .windows(2)
        .map(|g| {
            let (lo, hi) = (g[0].min(g[1]), g[0].max(g[1]));
            if lo < DEGENERACY_TOL {
                0.0
            } else {
                lo / hi
            }
        })
        .collect();
    Ok(GapRatios { values, degeneracies })
}

/// Von Neumann entropy of sites `0..cut` against the rest.
///
/// The state is split by the number of up spins in the subsystem; each block is a
/// `d_A(n_A) x d_B(n_up - n_A)` matrix whose singular values add to the spectrum.
pub fn entanglement_entropy(state: &SectorState, cut: usize) -> Result<f64> {
    let basis = state.basis();
    let n = basis.n_sites();
    if cut == 0 || cut >= n {
        return Err(Error::InvalidInput(format!("cut {cut} must lie in 1..{n}")));
    }
    let n_up = basis.n_up();
    let lo = n_up.saturating_sub(n - cut);
    let hi = n_up.min(cut);
    let mask = (1u64 << cut) - 1;
    let mut blocks = Vec::with_capacity(hi + 1 - lo);
    for n_a in lo..=hi {
        let a = SectorBasis::new(cut, n_a)?;
        let b = SectorBasis::new(n - cut, n_up - n_a)?;
        let m = Mat::<C64>::zeros(a.dim(), b.dim());
        blocks.push((a, b, m));
    }
    for (&s, &amp) in basis.states().iter().zip(state.amplitudes()) {
        let sa = s & mask;
        let (a, b, m) = &mut blocks[sa.count_ones() as usize - lo];
        m[(a.rank_unchecked(sa), b.rank_unchecked(s >> cut))] = amp;
    }
    let norm = state.norm_sqr();
    let mut s = 0.0;
    for (_, _, m) in &blocks {
        let sv = m.singular_values().map_err(|e| Error::InvalidInput(format!("SVD failed: {e:?}")))?;
        for x in sv {
            let p = x * x / norm;
            if p > 0.0 {
                s -= p * p.ln();
            }
        }
    }
    Ok(s)
}

/// `ln d_A - d_A^2 / (2 d)`.
pub fn page_entropy(d_a: f64, d: f64) -> f64 {
    d_a.ln() - d_a * d_a / (2.0 * d)
}

/// Page value for a contiguous cut of `n_a` of `n` sites, in full-space dimensions.
pub fn page_entropy_for_cut(n: usize, n_a: usize) -> f64 {
    page_entropy(2f64.powi(n_a as i32), 2f64.powi(n as i32))
}

/// Diagnostics of one disorder realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    pub n_sites: usize,
    pub magnetization: f64,
    pub dim: usize,
    pub config: PolfedConfig,
    pub cut: usize,
    /// Sorted on `(-pi, pi]`.
    pub eigenphases: Vec<f64>,
    pub residuals: Vec<f64>,
    pub gap_ratios: Vec<f64>,
    pub degeneracies: usize,
    pub entropies: Vec<f64>,
    pub mean_r: f64,
    pub mean_entropy: f64,
    pub page_entropy: f64,
    pub converged: bool,
    pub matvecs: usize,
    pub restarts: usize,
}

impl SpectralResult {
    pub fn from_eigenpairs(pairs: &Eigenpairs, cfg: &PolfedConfig, cut: usize) -> Result<Self> {
        let basis = &pairs.basis;
        let entropies = (0..pairs.phases.len())
            .map(|i| entanglement_entropy(&pairs.state(i), cut))
            .collect::<Result<Vec<_>>>()?;
        let (gap_ratios, degeneracies, mean_r) = match gap_ratios(&pairs.phases) {
            Ok(g) => {
                let m = g.mean();
                (g.values, g.degeneracies, m)
            }
            Err(_) => (Vec::new(), 0, f64::NAN),
        };
        let mean_entropy = entropies.iter().sum::<f64>() / entropies.len() as f64;
        Ok(Self {
            n_sites: basis.n_sites(),
            magnetization: basis.magnetization(),
            dim: basis.dim(),
            config: *cfg,
            cut,
            eigenphases: pairs.phases.clone(),
            residuals: pairs.residuals.clone(),
            gap_ratios,
            degeneracies,
            entropies,
            mean_r,
            mean_entropy,
            page_entropy: page_entropy_for_cut(basis.n_sites(), cut),
            converged: pairs.converged,
            matvecs: pairs.matvecs,
            restarts: pairs.restarts,
        })
    }

    pub fn entropy_ratio(&self) -> f64 {
        self.mean_entropy / self.page_entropy
    }
}

/// Eigen-solve plus gap ratios and entropies for one circuit.
pub fn spectral_analysis<R: Rng + ?Sized>(
    circuit: &FloquetCircuit,
    basis: &Arc<SectorBasis>,
    cfg: &PolfedConfig,
    cut: usize,
    rng: &mut R,
) -> Result<SpectralResult> {
    let pairs = arnoldi_eigenpairs(circuit, basis, cfg, rng)?;
    SpectralResult::from_eigenpairs(&pairs, cfg, cut)
}

/// Phase of `e^{-i phi}` given the eigenvalue, on `(-pi, pi]`.
pub fn eigenphase(lambda: C64) -> f64 {
    let p = -lambda.arg();
    if p <= -PI {
        p + 2.0 * PI
    } else {
        p
    }
}
