use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use floquet_core::runner::{preset, run, Mode, Outcome, RunConfig, PRESET_NAMES};

#[derive(Parser)]
#[command(name = "floquet", version, about = "Disordered U(1) Floquet circuit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ensemble transport with trace CSVs per grid point.
    Transport(RunArgs),
    /// Gap ratios and eigenstate entanglement.
    Spectral(RunArgs),
    /// Typical drift of pure SWAP circuits.
    Drift(RunArgs),
    /// Prethermal times along J = pi - J'.
    Prethermal(RunArgs),
    /// Transport over a grid, summary only.
    Sweep(RunArgs),
    /// Print the built-in presets as TOML.
    Presets,
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in config by name.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
}

fn load(args: &RunArgs, mode: Mode) -> anyhow::Result<RunConfig> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), _) => RunConfig::from_file(path).with_context(|| format!("reading {}", path.display()))?,
        (None, Some(name)) => preset(name)?,
        (None, None) => RunConfig::default(),
    };
    if let Some(name) = &args.preset {
        if cfg.mode != mode {
            bail!("preset `{name}` is a {:?} config; use `floquet {}`", cfg.mode, mode_name(cfg.mode));
        }
    }
    cfg.mode = mode;
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    Ok(cfg)
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Transport => "transport",
        Mode::Spectral => "spectral",
        Mode::Drift => "drift",
        Mode::Prethermal => "prethermal",
        Mode::Sweep => "sweep",
    }
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let (mode, args) = match cli.command {
        Command::Transport(a) => (Mode::Transport, a),
        Command::Spectral(a) => (Mode::Spectral, a),
        Command::Drift(a) => (Mode::Drift, a),
        Command::Prethermal(a) => (Mode::Prethermal, a),
        Command::Sweep(a) => (Mode::Sweep, a),
        Command::Presets => {
            for name in PRESET_NAMES {
                println!("# {name}\n{}", preset(name)?.to_toml_string()?);
            }
            return Ok(());
        }
    };
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let cfg = load(&args, mode)?;
    let summary = run(&cfg)?;
    for p in &summary.points {
        let pt = &p.point;
        let head = format!("[{:3}] N={} M={} J={:.4} Jz={:.4}", pt.index, pt.n_sites, pt.magnetization, pt.j, pt.jz);
        match &p.outcome {
            Outcome::Transport(t) => println!(
                "{head} alpha_sigma={} alpha_p={} nu_bar={} t_sigma={:?} t_p={:?}",
                fmt_fit(t.alpha_sigma.map(|f| f.alpha)),
                fmt_fit(t.alpha_p.map(|f| f.alpha)),
                fmt_fit(t.nu_bar),
                t.t_sigma,
                t.t_p
            ),
            Outcome::Spectral(s) => println!(
                "{head} <r>={:.4}+-{:.4} s/s_Page={:.4}+-{:.4} converged {}/{}",
                s.mean_r, s.mean_r_stderr, s.entropy_ratio, s.entropy_ratio_stderr, s.converged, s.realizations
            ),
            Outcome::Drift(d) => println!(
                "[{:3}] N={} drift={:.5}+-{:.5} samples={} exact={}",
                pt.index, d.n_sites, d.mean_drift, d.stderr, d.samples, d.exact
            ),
            Outcome::Error(e) => println!("{head} error: {e}"),
        }
    }
    if let Some(p) = summary.t_p_scaling {
        println!("t_p ~ J'^{:.3} over {} points", p.slope, p.points_used);
    }
    if let Some(p) = summary.t_sigma_scaling {
        println!("t_sigma ~ J'^{:.3} over {} points", p.slope, p.points_used);
    }
    println!("wrote {}", cfg.output_dir.display());
    if summary.failures() > 0 {
        bail!("{} grid point(s) failed; see summary.json", summary.failures());
    }
    Ok(())
}

fn fmt_fit(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".into(), |v| format!("{v:.4}"))
}
