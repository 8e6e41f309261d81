//! Transport of a single spin excitation on a typical background.
//!
//! A trajectory starts from a random sector state projected onto `floor(N/2)` up,
//! evolves stroboscopically, and records circular moments of the quasi-probability
//! `p_n(t)` built from the magnetization profile.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{apply_floquet_power, sample_circuit, FloquetCircuit};
use crate::circular_stats::{
    background_magnetization, circular_mean, drift_mu_tilde, quasiprob, CircularMoment,
};
use crate::gates::{build_gate, wrap_angle, GateParams};
use crate::sector_space::{
    embed_up, measure_profile, project_up, random_sector_state, sector_dimension, SectorBasis, SectorState,
};
use crate::{Error, Result, C64};

/// Last time of the unit-step part of the schedule; drift speeds exist only there.
pub const DENSE_UNTIL: u64 = 100;
/// Log-spaced points per decade beyond [`DENSE_UNTIL`].
pub const POINTS_PER_DECADE: u32 = 25;

/// How the random background state is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialKind {
    /// i.i.d. complex Gaussian amplitudes.
    #[default]
    Gaussian,
    /// Equal moduli, random phases; the background profile is exactly uniform.
    RandomPhase,
}

/// Random sector state with site `floor(N/2)` projected up, in the full sector.
pub fn initial_state_with<R: Rng + ?Sized>(
    basis: &Arc<SectorBasis>,
    kind: InitialKind,
    rng: &mut R,
) -> Result<SectorState> {
    let psi = match kind {
        InitialKind::Gaussian => random_sector_state(basis, rng),
        InitialKind::RandomPhase => SectorState::random_phase(Arc::clone(basis), rng),
    };
    let site = basis.n_sites() / 2;
    let (reduced, _) = project_up(&psi, site)?;
    embed_up(&reduced, site, basis)
}

/// Gaussian initial state on `(N, M)` from a fresh ChaCha8 stream.
pub fn initial_state(n_sites: usize, magnetization: f64, seed: u64) -> Result<SectorState> {
    let basis = Arc::new(SectorBasis::with_magnetization(n_sites, magnetization)?);
    initial_state_with(&basis, InitialKind::Gaussian, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Every step up to 100, then 25 log-spaced integer times per decade up to `t_max`
/// (with `t_max` itself always included).
pub fn stroboscopic_schedule(t_max: u64) -> Vec<u64> {
    let mut times: Vec<u64> = (1..=t_max.min(DENSE_UNTIL)).collect();
    if t_max > DENSE_UNTIL {
        let mut k = 1;
        loop {
            let t = (DENSE_UNTIL as f64 * 10f64.powf(k as f64 / POINTS_PER_DECADE as f64)).round() as u64;
            if t > t_max {
                break;
            }
            if t > *times.last().unwrap() {
                times.push(t);
            }
            k += 1;
        }
        if *times.last().unwrap() < t_max {
            times.push(t_max);
        }
    }
    times
}

/// Everything needed to reproduce one trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySpec {
    pub n_sites: usize,
    pub magnetization: f64,
    pub j: f64,
    pub jz: f64,
    pub seed: u64,
    pub t_max: u64,
    #[serde(default)]
    pub initial: InitialKind,
}

/// Observables derived from one profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub r: C64,
    pub sigma: f64,
    pub mu_tilde: f64,
    pub pmax: f64,
}

pub fn observe(profile: &[f64], magnetization: f64) -> Result<Observables> {
    let p = quasiprob(profile, background_magnetization(profile.len(), magnetization))?;
    let m = circular_mean(&p);
    Ok(Observables { r: m.r, sigma: m.sigma, mu_tilde: drift_mu_tilde(&p), pmax: p.max() })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransportTrace {
    pub spec: TrajectorySpec,
    pub initial: Observables,
    pub initial_profile: Vec<f64>,
    pub times: Vec<u64>,
    pub r: Vec<C64>,
    pub sigma: Vec<f64>,
    pub mu_tilde: Vec<f64>,
    /// Sites per period over the step ending at `t`; NaN outside the unit-step region.
    pub nu: Vec<f64>,
    pub pmax: Vec<f64>,
    pub profiles: Vec<Vec<f64>>,
}

/// Circuit and initial state of a trajectory, drawn in that order from one stream.
pub fn trajectory_setup(spec: &TrajectorySpec) -> Result<(FloquetCircuit, SectorState)> {
    let basis = Arc::new(SectorBasis::with_magnetization(spec.n_sites, spec.magnetization)?);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let circuit = sample_circuit(spec.n_sites, spec.j, spec.jz, &mut rng);
    let state = initial_state_with(&basis, spec.initial, &mut rng)?;
    Ok((circuit, state))
}

pub fn run_trajectory(spec: &TrajectorySpec) -> Result<TransportTrace> {
    let (circuit, state) = trajectory_setup(spec)?;
    record_trace(spec, &circuit, state)
}

/// Evolves `state` on the schedule for `spec.t_max` and records observables.
pub fn record_trace(spec: &TrajectorySpec, circuit: &FloquetCircuit, mut state: SectorState) -> Result<TransportTrace> {
    if spec.t_max == 0 {
        return Err(Error::InvalidInput("t_max must be at least 1".into()));
    }
    let m = state.basis().magnetization();
    let times = stroboscopic_schedule(spec.t_max);
    let initial_profile = measure_profile(&state);
    let initial = observe(&initial_profile, m)?;

    let n = times.len();
    let mut trace = TransportTrace {
        spec: *spec,
        initial,
        initial_profile,
        times: times.clone(),
        r: Vec::with_capacity(n),
        sigma: Vec::with_capacity(n),
        mu_tilde: Vec::with_capacity(n),
        nu: Vec::with_capacity(n),
        pmax: Vec::with_capacity(n),
        profiles: Vec::with_capacity(n),
    };
    let scale = spec.n_sites as f64 / (2.0 * PI);
    let (mut t_prev, mut mu_prev) = (0u64, initial.mu_tilde);
    for &t in &times {
        apply_floquet_power(circuit, &mut state, t - t_prev)?;
        let profile = measure_profile(&state);
        let o = observe(&profile, m)?;
        let nu = if t <= DENSE_UNTIL && t == t_prev + 1 {
            scale * wrap_angle(o.mu_tilde - mu_prev).abs()
        } else {
            f64::NAN
        };
        trace.r.push(o.r);
        trace.sigma.push(o.sigma);
        trace.mu_tilde.push(o.mu_tilde);
        trace.nu.push(nu);
        trace.pmax.push(o.pmax);
        trace.profiles.push(profile);
        t_prev = t;
        mu_prev = o.mu_tilde;
    }
    Ok(trace)
}

/// Pointwise ensemble means and standard errors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleTrace {
    pub n_sites: usize,
    pub magnetization: f64,
    pub n_traces: usize,
    pub times: Vec<u64>,
    /// Mean of per-trace sigma; infinite values are left out.
    pub sigma_mean: Vec<f64>,
    pub sigma_stderr: Vec<f64>,
    pub nu_mean: Vec<f64>,
    pub nu_stderr: Vec<f64>,
    pub pmax_mean: Vec<f64>,
    pub pmax_stderr: Vec<f64>,
    pub r_mean: Vec<C64>,
    pub profile_mean: Vec<Vec<f64>>,
}

/// Mean and standard error over the finite entries.
pub fn mean_stderr(xs: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = xs.into_iter().filter(|x| x.is_finite()).collect();
    let k = v.len() as f64;
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = v.iter().sum::<f64>() / k;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

pub fn ensemble_average(traces: &[TransportTrace]) -> Result<EnsembleTrace> {
    let first = traces.first().ok_or_else(|| Error::InvalidInput("no traces".into()))?;
    if traces.iter().any(|t| t.times != first.times || t.spec.n_sites != first.spec.n_sites) {
        return Err(Error::ScheduleMismatch);
    }
    let nt = first.times.len();
    let n = first.spec.n_sites;
    let k = traces.len() as f64;
    let stat = |f: &dyn Fn(&TransportTrace, usize) -> f64| -> (Vec<f64>, Vec<f64>) {
        (0..nt).map(|i| mean_stderr(traces.iter().map(|t| f(t, i)))).unzip()
    };
    let (sigma_mean, sigma_stderr) = stat(&|t, i| t.sigma[i]);
    let (nu_mean, nu_stderr) = stat(&|t, i| t.nu[i]);
    let (pmax_mean, pmax_stderr) = stat(&|t, i| t.pmax[i]);
    let r_mean = (0..nt).map(|i| traces.iter().map(|t| t.r[i]).sum::<C64>() / k).collect();
    let profile_mean = (0..nt)
        .map(|i| (0..n).map(|s| traces.iter().map(|t| t.profiles[i][s]).sum::<f64>() / k).collect())
        .collect();
    Ok(EnsembleTrace {
        n_sites: n,
        magnetization: first.spec.magnetization,
        n_traces: traces.len(),
        times: first.times.clone(),
        sigma_mean,
        sigma_stderr,
        nu_mean,
        nu_stderr,
        pmax_mean,
        pmax_stderr,
        r_mean,
        profile_mean,
    })
}

/// Circular moments of the ensemble-averaged profile (rather than averaged moments).
pub fn averaged_profile_moments(e: &EnsembleTrace) -> Result<Vec<CircularMoment>> {
    let m_b = background_magnetization(e.n_sites, e.magnetization);
    e.profile_mean
        .iter()
        .map(|p| Ok(circular_mean(&quasiprob(p, m_b)?)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    pub repetitions: usize,
    /// Relative spread of the window endpoint perturbation.
    pub endpoint_sd: f64,
    /// Fraction of trajectories drawn per repetition.
    pub subset_fraction: f64,
    pub min_points: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self { repetitions: 25, endpoint_sd: 0.2, subset_fraction: 1.0 / 3.0, min_points: 4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    /// Mean log-log slope.
    pub alpha: f64,
    /// Spread of the slope over repetitions.
    pub stderr: f64,
    pub repetitions_used: usize,
}

/// Log-log slope of the ensemble mean of `series` (one row per trajectory, sampled at
/// `times`) on a jittered window, averaged over resampled repetitions.
pub fn fit_exponent<R: Rng + ?Sized>(
    times: &[f64],
    series: &[Vec<f64>],
    window: (f64, f64),
    rng: &mut R,
    cfg: &FitConfig,
) -> Result<ExponentFit> {
    if series.is_empty() || series.iter().any(|s| s.len() != times.len()) {
        return Err(Error::InvalidInput("series must be non-empty and match the time grid".into()));
    }
    let jitter = Normal::new(1.0, cfg.endpoint_sd).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let k = ((series.len() as f64 * cfg.subset_fraction).round() as usize).clamp(1, series.len());
    let mut slopes = Vec::with_capacity(cfg.repetitions);
    for _ in 0..cfg.repetitions {
        let mut lo = window.0 * jitter.sample(rng);
        let mut hi = window.1 * jitter.sample(rng);
        if lo > hi {
            std::mem::swap(&mut lo, &mut hi);
        }
        let pick = sample_indices(rng, series.len(), k);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (i, &t) in times.iter().enumerate() {
            if t < lo || t > hi || t <= 0.0 {
                continue;
            }
            let (mean, _) = mean_stderr(pick.iter().map(|j| series[j][i]));
            if mean.is_finite() && mean > 0.0 {
                xs.push(t.ln());
                ys.push(mean.ln());
            }
        }
        if xs.len() >= cfg.min_points {
            slopes.push(ols_slope(&xs, &ys));
        }
    }
    if slopes.is_empty() {
        return Err(Error::Fit(format!("no repetition had {} points in window {window:?}", cfg.min_points)));
    }
    let m = slopes.len() as f64;
    let alpha = slopes.iter().sum::<f64>() / m;
    let stderr = if slopes.len() > 1 {
        (slopes.iter().map(|s| (s - alpha).powi(2)).sum::<f64>() / (m - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(ExponentFit { alpha, stderr, repetitions_used: slopes.len() })
}

pub fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// `(1/T) int_0^T <nu> dt` with `T = N / nu_typ`.
///
/// `nu(t)` is the speed over the step `(t-1, t]`, so the integrand is piecewise
/// constant and the integral is the summed folded displacement.
pub fn time_averaged_drift(e: &EnsembleTrace, nu_typ: f64) -> Result<f64> {
    if nu_typ.is_nan() || nu_typ <= 0.0 {
        return Err(Error::InvalidInput(format!("nu_typ must be positive, got {nu_typ}")));
    }
    let horizon = e.n_sites as f64 / nu_typ;
    let steps = horizon.ceil() as u64;
    let mut integral = 0.0;
    for t in 1..=steps {
        let i = e
            .times
            .iter()
            .position(|&x| x == t)
            .filter(|&i| e.nu_mean[i].is_finite())
            .ok_or_else(|| Error::InvalidInput(format!("no drift speed recorded at t = {t} (T = {horizon})")))?;
        let width = (horizon - (t - 1) as f64).min(1.0);
        integral += width * e.nu_mean[i];
    }
    Ok(integral / horizon)
}

/// Crossing thresholds `sigma > a N + b` and `p_max < c / N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub sigma_per_site: f64,
    pub sigma_offset: f64,
    pub pmax_numerator: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { sigma_per_site: 1.0 / 30.0, sigma_offset: 1.25, pmax_numerator: 2.6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrethermalTimes {
    pub t_sigma: Option<u64>,
    pub t_p: Option<u64>,
}

/// First grid times at which the averaged trace crosses the thresholds.
pub fn prethermal_times(e: &EnsembleTrace, th: &Thresholds) -> PrethermalTimes {
    let n = e.n_sites as f64;
    let sigma_bar = th.sigma_per_site * n + th.sigma_offset;
    let p_bar = th.pmax_numerator / n;
    let first = |pred: &dyn Fn(usize) -> bool| (0..e.times.len()).find(|&i| pred(i)).map(|i| e.times[i]);
    PrethermalTimes {
        t_sigma: first(&|i| e.sigma_mean[i] > sigma_bar),
        t_p: first(&|i| e.pmax_mean[i] < p_bar),
    }
}

/// First crossing times of the ensemble means, evolving all trajectories together on
/// the stroboscopic schedule and stopping once both thresholds are crossed.
///
/// Gives the same times as [`prethermal_times`] on the ensemble of full traces with the
/// same `t_max`, without evolving past the later crossing.
pub fn prethermal_scan(specs: &[TrajectorySpec], th: &Thresholds) -> Result<PrethermalTimes> {
    let first = specs.first().ok_or_else(|| Error::InvalidInput("no trajectories".into()))?;
    if specs.iter().any(|s| s.n_sites != first.n_sites || s.t_max != first.t_max) {
        return Err(Error::ScheduleMismatch);
    }
    let mut runs = specs.iter().map(trajectory_setup).collect::<Result<Vec<_>>>()?;
    let n = first.n_sites as f64;
    let sigma_bar = th.sigma_per_site * n + th.sigma_offset;
    let p_bar = th.pmax_numerator / n;
    let mut out = PrethermalTimes { t_sigma: None, t_p: None };
    let mut t_prev = 0;
    for t in stroboscopic_schedule(first.t_max) {
        let obs = runs
            .par_iter_mut()
            .map(|(c, s)| {
                apply_floquet_power(c, s, t - t_prev)?;
                observe(&measure_profile(s), s.basis().magnetization())
            })
            .collect::<Result<Vec<_>>>()?;
        t_prev = t;
        let (sigma, _) = mean_stderr(obs.iter().map(|o| o.sigma));
        let (pmax, _) = mean_stderr(obs.iter().map(|o| o.pmax));
        if out.t_sigma.is_none() && sigma > sigma_bar {
            out.t_sigma = Some(t);
        }
        if out.t_p.is_none() && pmax < p_bar {
            out.t_p = Some(t);
        }
        if out.t_sigma.is_some() && out.t_p.is_some() {
            break;
        }
    }
    Ok(out)
}

/// Settings for [`summarize`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryConfig {
    pub sigma_window: (f64, f64),
    pub p_window: (f64, f64),
    pub nu_typ: f64,
    pub thresholds: Thresholds,
    pub fit: FitConfig,
}

impl Default for SummaryConfig {
    fn default() -> Self {
        Self {
            sigma_window: (4.0, 40.0),
            p_window: (4.0, 40.0),
            nu_typ: 2.0,
            thresholds: Thresholds::default(),
            fit: FitConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransportSummary {
    pub alpha_sigma: Option<ExponentFit>,
    /// Decay exponent of `p_max` (sign flipped so diffusion gives +1/2).
    pub alpha_p: Option<ExponentFit>,
    pub nu_bar: Option<f64>,
    pub t_sigma: Option<u64>,
    pub t_p: Option<u64>,
}

pub fn summarize<R: Rng + ?Sized>(
    traces: &[TransportTrace],
    cfg: &SummaryConfig,
    rng: &mut R,
) -> Result<(EnsembleTrace, TransportSummary)> {
    let e = ensemble_average(traces)?;
    let times: Vec<f64> = e.times.iter().map(|&t| t as f64).collect();
    let sig: Vec<Vec<f64>> = traces.iter().map(|t| t.sigma.clone()).collect();
    let pm: Vec<Vec<f64>> = traces.iter().map(|t| t.pmax.clone()).collect();
    let alpha_sigma = fit_exponent(&times, &sig, cfg.sigma_window, rng, &cfg.fit).ok();
    let alpha_p = fit_exponent(&times, &pm, cfg.p_window, rng, &cfg.fit)
        .ok()
        .map(|f| ExponentFit { alpha: -f.alpha, ..f });
    let nu_bar = time_averaged_drift(&e, cfg.nu_typ).ok();
    let pt = prethermal_times(&e, &cfg.thresholds);
    Ok((e, TransportSummary { alpha_sigma, alpha_p, nu_bar, t_sigma: pt.t_sigma, t_p: pt.t_p }))
}

/// `C_{n, N/2}(t) = M_n(t) - M d / (2N)` with `d = C(N, N/2 + M)`.
///
/// `profile` must be the unnormalized trace profile `Tr[P_M S^z_n(t) P_up]` (see
/// [`trace_profile`]).
pub fn correlation_from_profile(profile: &[f64], magnetization: f64) -> Result<Vec<f64>> {
    let n = profile.len();
    let basis_up = n as f64 / 2.0 + magnetization;
    if basis_up < 0.0 || basis_up > n as f64 || basis_up.fract() != 0.0 {
        return Err(Error::InvalidMagnetization { n_sites: n, magnetization });
    }
    let d = sector_dimension(n, basis_up as usize)? as f64;
    let shift = magnetization * d / (2.0 * n as f64);
    Ok(profile.iter().map(|m| m - shift).collect())
}

/// `Tr[P_M U^{-t} S^z_n U^t P_up(site)]` for every n, summing over basis states with
/// `site` up. Cost grows with the sector size; meant for small rings.
pub fn trace_profile(circuit: &FloquetCircuit, basis: &Arc<SectorBasis>, site: usize, t: u64) -> Result<Vec<f64>> {
    let mask = 1u64 << site;
    let mut total = vec![0.0; basis.n_sites()];
    for &s in basis.states().iter().filter(|s| *s & mask != 0) {
        let mut psi = SectorState::basis_state(Arc::clone(basis), s)?;
        apply_floquet_power(circuit, &mut psi, t)?;
        for (a, b) in total.iter_mut().zip(measure_profile(&psi)) {
            *a += b;
        }
    }
    Ok(total)
}

/// Residual of the first-order expansion of the clean gate at `J = Jz = pi - J'`:
/// `|| e^{i pi/4} U psi - normalize[(1 - iJ'/4) SWAP psi + (iJ'/2) psi] ||`.
/// `psi` is in `(dd, ud, du, uu)` order and is normalized first.
pub fn swap_point_expansion_check(j_prime: f64, psi: [C64; 4]) -> f64 {
    let norm = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let psi = psi.map(|c| c / norm);
    let j = PI - j_prime;
    let m = build_gate(&GateParams::clean(j, j)).matrix();
    let phase = C64::from_polar(1.0, PI / 4.0);
    let u_psi: Vec<C64> = (0..4).map(|r| phase * (0..4).map(|k| m[r][k] * psi[k]).sum::<C64>()).collect();
    let swap = [psi[0], psi[2], psi[1], psi[3]];
    let a = C64::new(1.0, -j_prime / 4.0);
    let b = C64::new(0.0, j_prime / 2.0);
    let approx: Vec<C64> = (0..4).map(|i| a * swap[i] + b * psi[i]).collect();
    let an = approx.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    u_psi
        .iter()
        .zip(&approx)
        .map(|(u, v)| (u - v / an).norm_sqr())
        .sum::<f64>()
        .sqrt()
}
