//! Experiment orchestration: config, presets, seeded parallel runs and artifacts.
//!
//! A run writes `manifest.json` (config echo, config hash, seed table, version),
//! `summary.json` (one entry per grid point; failures are recorded, not fatal) and
//! per-point data files. Outputs depend only on the config, never on thread count.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::circuit::sample_circuit;
use crate::drift_mc::{typical_drift, DriftEstimate};
use crate::sector_space::{SectorBasis, MAX_SITES};
use crate::seeding::derive_seed;
use crate::spectral::{spectral_analysis, PolfedConfig, SpectralResult};
use crate::transport::{
    ensemble_average, ols_slope, run_trajectory, summarize, EnsembleTrace, FitConfig, InitialKind, SummaryConfig,
    Thresholds, TrajectorySpec, TransportSummary,
};
use crate::{Error, Result};

/// Trajectory index reserved for the fit resampling stream of a grid point.
pub const FIT_STREAM: usize = u32::MAX as usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Ensemble transport per grid point, with trace CSVs.
    Transport,
    /// Eigenphase and entanglement statistics per grid point.
    Spectral,
    /// Typical SWAP-circuit drift per ring size.
    Drift,
    /// Transport on the `J = pi - J'` line plus power-law fits of the prethermal times.
    Prethermal,
    /// Transport over a grid; summary only.
    Sweep,
}

/// A scalar or a list in the config file; always a list in memory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "OneOrMany<T>", into = "Vec<T>")]
pub struct Grid<T: Clone>(pub Vec<T>);

#[derive(Deserialize)]
#[serde(untagged, expecting = "a value or a list of values")]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> From<OneOrMany<T>> for Grid<T> {
    fn from(v: OneOrMany<T>) -> Self {
        match v {
            OneOrMany::One(x) => Grid(vec![x]),
            OneOrMany::Many(xs) => Grid(xs),
        }
    }
}

impl<T: Clone> From<Grid<T>> for Vec<T> {
    fn from(g: Grid<T>) -> Self {
        g.0
    }
}

impl<T: Clone> From<Vec<T>> for Grid<T> {
    fn from(v: Vec<T>) -> Self {
        Grid(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitSection {
    pub sigma_window: (f64, f64),
    pub p_window: (f64, f64),
    #[serde(flatten)]
    pub resampling: FitConfig,
}

impl Default for FitSection {
    fn default() -> Self {
        let s = SummaryConfig::default();
        Self { sigma_window: s.sigma_window, p_window: s.p_window, resampling: s.fit }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectralSection {
    pub realizations: usize,
    pub phi_target: f64,
    /// Defaults to `min(d/10, 750)`.
    pub n_eigs: Option<usize>,
    /// Defaults to the dimension rule of [`crate::spectral::default_filter_order`].
    pub filter_order: Option<usize>,
    pub tol: f64,
    pub krylov_dim: Option<usize>,
    pub max_matvecs: Option<usize>,
    /// Sites in subsystem A; defaults to `N/2`.
    pub cut: Option<usize>,
}

impl Default for SpectralSection {
    fn default() -> Self {
        Self {
            realizations: 20,
            phi_target: 0.0,
            n_eigs: None,
            filter_order: None,
            tol: 1e-8,
            krylov_dim: None,
            max_matvecs: None,
            cut: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriftSection {
    /// Permutations sampled per ring size when enumeration is too large.
    pub samples: u64,
}

impl Default for DriftSection {
    fn default() -> Self {
        Self { samples: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub n_sites: Grid<usize>,
    pub magnetization: Grid<f64>,
    pub j: Grid<f64>,
    pub jz: Grid<f64>,
    /// Detuning from the SWAP point; replaces `j` in prethermal mode.
    pub j_prime: Grid<f64>,
    pub n_trajectories: usize,
    pub t_max: u64,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub initial: InitialKind,
    pub nu_typ: f64,
    pub fit: FitSection,
    pub thresholds: Thresholds,
    pub spectral: SpectralSection,
    pub drift: DriftSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Transport,
            n_sites: Grid(vec![16]),
            magnetization: Grid(vec![0.0]),
            j: Grid(vec![1.374]),
            jz: Grid(vec![PI]),
            j_prime: Grid(Vec::new()),
            n_trajectories: 50,
            t_max: 1000,
            master_seed: 0,
            output_dir: PathBuf::from("runs/out"),
            initial: InitialKind::Gaussian,
            nu_typ: 2.0,
            fit: FitSection::default(),
            thresholds: Thresholds::default(),
            spectral: SpectralSection::default(),
            drift: DriftSection::default(),
        }
    }
}

fn config_error(path: &str, message: impl Into<String>) -> Error {
    Error::Config { path: path.into(), message: message.into() }
}

impl RunConfig {
    /// Parses TOML; errors name the offending field.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let de = toml::Deserializer::new(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_error(&path, e.into_inner().message().trim().to_string())
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| config_error("", e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let nonempty = |name: &str, len: usize| {
            if len == 0 {
                Err(config_error(name, "grid must not be empty"))
            } else {
                Ok(())
            }
        };
        nonempty("n_sites", self.n_sites.0.len())?;
        for (i, &n) in self.n_sites.0.iter().enumerate() {
            if !(3..=MAX_SITES).contains(&n) {
                return Err(config_error(&format!("n_sites[{i}]"), format!("{n} outside 3..={MAX_SITES}")));
            }
        }
        if self.mode == Mode::Drift {
            if self.drift.samples == 0 {
                return Err(config_error("drift.samples", "must be at least 1"));
            }
            return Ok(());
        }
        nonempty("magnetization", self.magnetization.0.len())?;
        nonempty("jz", self.jz.0.len())?;
        if self.mode == Mode::Prethermal {
            nonempty("j_prime", self.j_prime.0.len())?;
            if let Some(i) = self.j_prime.0.iter().position(|x| x.is_nan() || *x <= 0.0) {
                return Err(config_error(&format!("j_prime[{i}]"), "detuning must be positive"));
            }
        } else {
            nonempty("j", self.j.0.len())?;
        }
        for &n in &self.n_sites.0 {
            for (i, &m) in self.magnetization.0.iter().enumerate() {
                let basis = SectorBasis::with_magnetization(n, m)
                    .map_err(|e| config_error(&format!("magnetization[{i}]"), e.to_string()))?;
                if self.mode != Mode::Spectral && basis.n_up() == 0 {
                    return Err(config_error(&format!("magnetization[{i}]"), "transport needs at least one up spin"));
                }
            }
        }
        if self.mode == Mode::Spectral {
            let s = &self.spectral;
            if s.realizations == 0 {
                return Err(config_error("spectral.realizations", "must be at least 1"));
            }
            if s.filter_order == Some(0) {
                return Err(config_error("spectral.filter_order", "must be at least 1"));
            }
            if let Some(c) = s.cut {
                if self.n_sites.0.iter().any(|&n| c == 0 || c >= n) {
                    return Err(config_error("spectral.cut", format!("{c} must lie strictly inside every ring")));
                }
            }
            return Ok(());
        }
        if self.n_trajectories == 0 {
            return Err(config_error("n_trajectories", "must be at least 1"));
        }
        if self.t_max == 0 {
            return Err(config_error("t_max", "must be at least 1"));
        }
        if self.nu_typ.is_nan() || self.nu_typ <= 0.0 {
            return Err(config_error("nu_typ", "must be positive"));
        }
        for (name, w) in [("fit.sigma_window", self.fit.sigma_window), ("fit.p_window", self.fit.p_window)] {
            if !(w.0 > 0.0 && w.0 < w.1) {
                return Err(config_error(name, format!("need 0 < lo < hi, got {w:?}")));
            }
        }
        if self.fit.resampling.repetitions == 0 {
            return Err(config_error("fit.repetitions", "must be at least 1"));
        }
        Ok(())
    }

    fn summary_config(&self) -> SummaryConfig {
        SummaryConfig {
            sigma_window: self.fit.sigma_window,
            p_window: self.fit.p_window,
            nu_typ: self.nu_typ,
            thresholds: self.thresholds,
            fit: self.fit.resampling,
        }
    }

    /// SHA-256 of the config with `output_dir` cleared.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        let json = serde_json::to_string(&c).expect("config serializes");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// One parameter combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub index: usize,
    pub n_sites: usize,
    pub magnetization: f64,
    pub j: f64,
    pub jz: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_prime: Option<f64>,
}

/// Grid in row-major order over `(N, M, J or J', Jz)`; drift mode uses `N` only.
pub fn grid_points(cfg: &RunConfig) -> Vec<GridPoint> {
    let mut out = Vec::new();
    if cfg.mode == Mode::Drift {
        for &n in &cfg.n_sites.0 {
            out.push(GridPoint { index: out.len(), n_sites: n, magnetization: 0.0, j: PI, jz: 0.0, j_prime: None });
        }
        return out;
    }
    let couplings: Vec<(f64, Option<f64>)> = if cfg.mode == Mode::Prethermal {
        cfg.j_prime.0.iter().map(|&jp| (PI - jp, Some(jp))).collect()
    } else {
        cfg.j.0.iter().map(|&j| (j, None)).collect()
    };
    for &n in &cfg.n_sites.0 {
        for &m in &cfg.magnetization.0 {
            for &(j, j_prime) in &couplings {
                for &jz in &cfg.jz.0 {
                    out.push(GridPoint { index: out.len(), n_sites: n, magnetization: m, j, jz, j_prime });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedEntry {
    pub point: usize,
    /// One seed per trajectory or realization.
    pub seeds: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config_hash: String,
    pub config: RunConfig,
    pub points: Vec<GridPoint>,
    pub seeds: Vec<SeedEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralPointSummary {
    pub realizations: usize,
    pub converged: usize,
    pub mean_r: f64,
    pub mean_r_stderr: f64,
    pub entropy_ratio: f64,
    pub entropy_ratio_stderr: f64,
    pub page_entropy: f64,
    pub eigenpairs: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Transport(TransportSummary),
    Spectral(SpectralPointSummary),
    Drift(DriftEstimate),
    Error(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointSummary {
    pub point: GridPoint,
    pub outcome: Outcome,
}

/// Power-law fit `t ~ J'^slope` over the points where the threshold was crossed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub slope: f64,
    pub points_used: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub mode: Mode,
    pub config_hash: String,
    pub points: Vec<PointSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_sigma_scaling: Option<PowerLaw>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_p_scaling: Option<PowerLaw>,
}

impl Summary {
    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| matches!(p.outcome, Outcome::Error(_))).count()
    }
}

/// Seed table for a config, as written to the manifest.
pub fn seed_table(cfg: &RunConfig, points: &[GridPoint]) -> Vec<SeedEntry> {
    points
        .iter()
        .map(|p| {
            let count = match cfg.mode {
                Mode::Drift => 1,
                Mode::Spectral => cfg.spectral.realizations,
                _ => cfg.n_trajectories,
            };
            let transport = !matches!(cfg.mode, Mode::Drift | Mode::Spectral);
            SeedEntry {
                point: p.index,
                seeds: (0..count).map(|t| derive_seed(cfg.master_seed, p.index, t)).collect(),
                fit_seed: transport.then(|| derive_seed(cfg.master_seed, p.index, FIT_STREAM)),
            }
        })
        .collect()
}

/// Trajectory spec for `seed` at a grid point.
pub fn trajectory_spec(cfg: &RunConfig, p: &GridPoint, seed: u64) -> TrajectorySpec {
    TrajectorySpec {
        n_sites: p.n_sites,
        magnetization: p.magnetization,
        j: p.j,
        jz: p.jz,
        seed,
        t_max: cfg.t_max,
        initial: cfg.initial,
    }
}

/// Ensemble and summary for one transport grid point.
pub fn transport_point(cfg: &RunConfig, p: &GridPoint, seeds: &SeedEntry) -> Result<(EnsembleTrace, TransportSummary)> {
    let traces = seeds
        .seeds
        .par_iter()
        .map(|&s| run_trajectory(&trajectory_spec(cfg, p, s)))
        .collect::<Result<Vec<_>>>()?;
    let fit_seed = seeds.fit_seed.expect("transport points carry a fit seed");
    summarize(&traces, &cfg.summary_config(), &mut ChaCha8Rng::seed_from_u64(fit_seed))
}

/// Eigen-solver settings for a sector of dimension `d`.
pub fn polfed_config(cfg: &RunConfig, d: usize) -> Result<PolfedConfig> {
    let s = &cfg.spectral;
    let base = if d >= 10 {
        PolfedConfig::for_dimension(d)?
    } else {
        PolfedConfig { phi_target: 0.0, filter_order: 4, n_eigs: d, tol: 1e-8, max_matvecs: None, krylov_dim: None }
    };
    Ok(PolfedConfig {
        phi_target: s.phi_target,
        filter_order: s.filter_order.unwrap_or(base.filter_order),
        n_eigs: s.n_eigs.unwrap_or(base.n_eigs).min(d),
        tol: s.tol,
        max_matvecs: s.max_matvecs,
        krylov_dim: s.krylov_dim,
    })
}

/// One spectral realization: circuit and Arnoldi start vector from one seed.
pub fn spectral_realization(cfg: &RunConfig, p: &GridPoint, seed: u64) -> Result<SpectralResult> {
    let basis = Arc::new(SectorBasis::with_magnetization(p.n_sites, p.magnetization)?);
    let pc = polfed_config(cfg, basis.dim())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let circuit = sample_circuit(p.n_sites, p.j, p.jz, &mut rng);
    let cut = cfg.spectral.cut.unwrap_or(p.n_sites / 2);
    spectral_analysis(&circuit, &basis, &pc, cut, &mut rng)
}

fn spectral_summary(results: &[SpectralResult]) -> SpectralPointSummary {
    let mean_se = |xs: Vec<f64>| crate::transport::mean_stderr(xs);
    let (mean_r, mean_r_stderr) = mean_se(results.iter().map(|r| r.mean_r).collect());
    let (entropy_ratio, entropy_ratio_stderr) =
        mean_se(results.iter().map(|r| r.mean_entropy / r.page_entropy).collect());
    SpectralPointSummary {
        realizations: results.len(),
        converged: results.iter().filter(|r| r.converged).count(),
        mean_r,
        mean_r_stderr,
        entropy_ratio,
        entropy_ratio_stderr,
        page_entropy: results.first().map_or(f64::NAN, |r| r.page_entropy),
        eigenpairs: results.iter().map(|r| r.eigenphases.len()).sum(),
    }
}

/// Ensemble trace CSV: `t, sigma, nu, pmax, re_r, im_r, sigma_stderr, pmax_stderr`.
pub fn write_trace_csv(path: &Path, e: &EnsembleTrace) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "sigma", "nu", "pmax", "re_r", "im_r", "sigma_stderr", "pmax_stderr"])?;
    for i in 0..e.times.len() {
        w.write_record(&[
            e.times[i].to_string(),
            e.sigma_mean[i].to_string(),
            e.nu_mean[i].to_string(),
            e.pmax_mean[i].to_string(),
            e.r_mean[i].re.to_string(),
            e.r_mean[i].im.to_string(),
            e.sigma_stderr[i].to_string(),
            e.pmax_stderr[i].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Drift CSV: `N, samples, mean, stderr, exact`.
pub fn write_drift_csv(path: &Path, rows: &[DriftEstimate]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["N", "samples", "mean", "stderr", "exact"])?;
    for r in rows {
        w.write_record(&[
            r.n_sites.to_string(),
            r.samples.to_string(),
            r.mean_drift.to_string(),
            r.stderr.to_string(),
            r.exact.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Log-log slope of `times` against `j_prime` over crossed points.
pub fn power_law(j_prime: &[f64], times: &[Option<u64>]) -> Option<PowerLaw> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = j_prime
        .iter()
        .zip(times)
        .filter_map(|(jp, t)| t.map(|t| (jp.ln(), (t as f64).ln())))
        .unzip();
    (xs.len() >= 2).then(|| PowerLaw { slope: ols_slope(&xs, &ys), points_used: xs.len() })
}

/// Executes a validated config and writes all artifacts into `cfg.output_dir`.
pub fn run(cfg: &RunConfig) -> Result<Summary> {
    cfg.validate()?;
    let points = grid_points(cfg);
    let seeds = seed_table(cfg, &points);
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir)?;
    let config_hash = cfg.hash();
    write_json(
        &dir.join("manifest.json"),
        &Manifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config_hash.clone(),
            config: cfg.clone(),
            points: points.clone(),
            seeds: seeds.clone(),
        },
    )?;

    let mut summaries = Vec::with_capacity(points.len());
    let mut t_sigma = Vec::new();
    let mut t_p = Vec::new();
    match cfg.mode {
        Mode::Drift => {
            let mut rows = Vec::new();
            for (p, s) in points.iter().zip(&seeds) {
                let outcome = match typical_drift(p.n_sites, cfg.drift.samples, &mut ChaCha8Rng::seed_from_u64(s.seeds[0])) {
                    Ok(d) => {
                        rows.push(d.clone());
                        Outcome::Drift(d)
                    }
                    Err(e) => Outcome::Error(e.to_string()),
                };
                summaries.push(PointSummary { point: *p, outcome });
            }
            write_drift_csv(&dir.join("drift.csv"), &rows)?;
        }
        Mode::Spectral => {
            for (p, s) in points.iter().zip(&seeds) {
                let results: Result<Vec<SpectralResult>> =
                    s.seeds.par_iter().map(|&seed| spectral_realization(cfg, p, seed)).collect();
                let outcome = match results {
                    Ok(rs) => {
                        for (r, res) in rs.iter().enumerate() {
                            write_json(&dir.join(format!("spectral_p{:03}_r{r:03}.json", p.index)), res)?;
                        }
                        Outcome::Spectral(spectral_summary(&rs))
                    }
                    Err(e) => Outcome::Error(e.to_string()),
                };
                summaries.push(PointSummary { point: *p, outcome });
            }
        }
        Mode::Transport | Mode::Sweep | Mode::Prethermal => {
            for (p, s) in points.iter().zip(&seeds) {
                let outcome = match transport_point(cfg, p, s) {
                    Ok((e, summary)) => {
                        if cfg.mode != Mode::Sweep {
                            write_trace_csv(&dir.join(format!("trace_{:03}.csv", p.index)), &e)?;
                        }
                        t_sigma.push(summary.t_sigma);
                        t_p.push(summary.t_p);
                        Outcome::Transport(summary)
                    }
                    Err(e) => {
                        t_sigma.push(None);
                        t_p.push(None);
                        Outcome::Error(e.to_string())
                    }
                };
                summaries.push(PointSummary { point: *p, outcome });
            }
        }
    }

    let (t_sigma_scaling, t_p_scaling) = if cfg.mode == Mode::Prethermal {
        let jp: Vec<f64> = points.iter().map(|p| p.j_prime.expect("prethermal point")).collect();
        (power_law(&jp, &t_sigma), power_law(&jp, &t_p))
    } else {
        (None, None)
    };
    let summary = Summary { mode: cfg.mode, config_hash, points: summaries, t_sigma_scaling, t_p_scaling };
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(summary)
}

/// Recomputes the ensemble of one transport point (for spot checks against a trace CSV).
pub fn rerun_transport_point(cfg: &RunConfig, point: usize) -> Result<EnsembleTrace> {
    let points = grid_points(cfg);
    let p = points.get(point).ok_or(Error::IndexOutOfRange { index: point, dim: points.len() })?;
    let seeds = &seed_table(cfg, &points)[point];
    let traces = seeds
        .seeds
        .iter()
        .map(|&s| run_trajectory(&trajectory_spec(cfg, p, s)))
        .collect::<Result<Vec<_>>>()?;
    ensemble_average(&traces)
}

pub const PRESET_NAMES: [&str; 5] = ["regime-points", "fig4-line", "phase-diagram", "prethermal-sweep", "drift-curve"];

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linspace(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect()
}

/// Built-in configs by name.
pub fn preset(name: &str) -> Result<RunConfig> {
    let base = RunConfig::default();
    let cfg = match name {
        "regime-points" => RunConfig {
            j: Grid(vec![0.395, 1.374, 2.551, 3.138]),
            output_dir: "runs/regime-points".into(),
            ..base
        },
        "fig4-line" => RunConfig {
            mode: Mode::Sweep,
            j: Grid(linspace(PI / 32.0, PI, 32)),
            output_dir: "runs/fig4-line".into(),
            ..base
        },
        "phase-diagram" => RunConfig {
            mode: Mode::Sweep,
            n_sites: Grid(vec![14]),
            j: Grid(linspace(PI / 8.0, PI, 8)),
            jz: Grid(linspace(0.0, PI, 8)),
            n_trajectories: 20,
            t_max: 200,
            output_dir: "runs/phase-diagram".into(),
            ..base
        },
        "prethermal-sweep" => RunConfig {
            mode: Mode::Prethermal,
            j_prime: Grid(logspace(0.05, 0.6, 8)),
            t_max: 20_000,
            output_dir: "runs/prethermal-sweep".into(),
            ..base
        },
        "drift-curve" => RunConfig {
            mode: Mode::Drift,
            n_sites: Grid((8..=28).collect()),
            drift: DriftSection { samples: 100_000 },
            output_dir: "runs/drift-curve".into(),
            ..base
        },
        _ => {
            return Err(config_error(
                "preset",
                format!("unknown preset `{name}`; available: {}", PRESET_NAMES.join(", ")),
            ))
        }
    };
    Ok(cfg)
}

/// All presets with their names.
pub fn presets() -> Vec<(&'static str, RunConfig)> {
    PRESET_NAMES.iter().map(|n| (*n, preset(n).expect("built-in preset"))).collect()
}
