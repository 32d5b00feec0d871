//! Command-line front end: run, validate, plot, presets.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

pub mod config;
pub mod manifest;
pub mod plot;
pub mod validate;

use crate::error::{Error, Result};
use crate::sweep::{
    figure_preset, preset_description, run_sweep, write_csv, AxisValues, SweepSpec, PRESET_NAMES,
};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "mimolink",
    version,
    about = "2x2 MIMO OFDM downlink link-level simulator: spatial multiplexing vs transmit diversity over correlated Rician multipath"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single operating point or a sweep; emits CSV (+ manifest).
    Run(RunArgs),
    /// Statistical self-checks of the channel generator and noise calibration.
    Validate(ValidateArgs),
    /// Emit a gnuplot script for a sweep CSV.
    Plot(PlotArgs),
    /// List the figure presets.
    Presets,
}

#[derive(Args)]
struct RunArgs {
    /// Figure preset (see `presets`).
    #[arg(long, conflicts_with = "from_manifest")]
    preset: Option<String>,
    /// JSON configuration file; flags override file values.
    #[arg(long, conflicts_with = "from_manifest")]
    config: Option<PathBuf>,
    /// Re-run a recorded manifest and verify the output digest.
    #[arg(long)]
    from_manifest: Option<PathBuf>,

    /// Transmission mode: sm | td.
    #[arg(long)]
    mode: Option<String>,
    /// Spatial-multiplexing detector: zf | mmse.
    #[arg(long)]
    detector: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    snr_db: Option<f64>,
    /// Scattering scenario: poor | rich.
    #[arg(long)]
    scenario: Option<String>,
    /// Rician K factor (linear); 0 = Rayleigh.
    #[arg(long = "k", allow_negative_numbers = true)]
    k_factor: Option<f64>,
    /// LOS power accounting: additive | normalized.
    #[arg(long)]
    los_mode: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    speed_kmh: Option<f64>,
    /// Base-station correlation override (real, |alpha| <= 1).
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Mobile-station correlation override (real, |beta| <= 1).
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// CSI policy: subframe_start | perfect.
    #[arg(long)]
    csi: Option<String>,
    /// Root seed (default: MIMOLINK_SEED or 0).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    subframes: Option<usize>,
    #[arg(long)]
    capacity_samples: Option<usize>,
    /// Capacity reduction per draw: aggregate | per_subcarrier.
    #[arg(long)]
    capacity_averaging: Option<String>,
    /// Worker threads (default: logical CPUs).
    #[arg(long)]
    workers: Option<usize>,
    /// Output CSV path; stdout when omitted (no manifest on stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    seed: Option<u64>,
    /// Sample budget per statistical check.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
}

#[derive(Args)]
struct PlotArgs {
    /// Sweep CSV produced by `run`.
    #[arg(long)]
    csv: PathBuf,
    /// Preset whose axes to plot.
    #[arg(long)]
    preset: String,
}

fn overrides_of(args: &RunArgs) -> config::Overrides {
    config::Overrides {
        mode: args.mode.clone(),
        detector: args.detector.clone(),
        snr_db: args.snr_db,
        scenario: args.scenario.clone(),
        k_factor: args.k_factor,
        los_mode: args.los_mode.clone(),
        speed_kmh: args.speed_kmh,
        alpha: args.alpha,
        beta: args.beta,
        csi: args.csi.clone(),
        seed: args.seed,
        trials: args.trials,
        subframes: args.subframes,
        capacity_samples: args.capacity_samples,
        capacity_averaging: args.capacity_averaging.clone(),
    }
}

fn build_spec(args: &RunArgs) -> Result<SweepSpec> {
    let flags = overrides_of(args);
    if let Some(name) = &args.preset {
        let mut spec = figure_preset(name)?;
        // A preset pins its grid and operating point; only receiver, seed
        // and budget knobs may be layered on top.
        for (flag, set) in [
            ("--mode", args.mode.is_some()),
            ("--snr-db", args.snr_db.is_some()),
            ("--k", args.k_factor.is_some()),
            ("--scenario", args.scenario.is_some()),
            ("--speed-kmh", args.speed_kmh.is_some()),
            ("--config", args.config.is_some()),
        ] {
            if set {
                return Err(Error::Config(format!(
                    "{flag} conflicts with preset '{name}', whose grid pins that parameter; drop --preset for a custom run"
                )));
            }
        }
        if let Some(d) = &args.detector {
            spec.base.detector = d.parse()?;
        }
        if let Some(c) = &args.csi {
            spec.base.csi = c.parse()?;
        }
        if let Some(l) = &args.los_mode {
            spec.base.los_mode = l.parse()?;
        }
        if args.alpha.is_some() {
            spec.base.alpha = args.alpha;
        }
        if args.beta.is_some() {
            spec.base.beta = args.beta;
        }
        spec.base.seed = match flags.seed {
            Some(s) => s,
            None => config::env_seed()?.unwrap_or(spec.base.seed),
        };
        if let Some(t) = flags.trials {
            spec.trials = t;
        }
        if let Some(s) = flags.subframes {
            spec.subframes = s;
        }
        if let Some(c) = flags.capacity_samples {
            spec.capacity_samples = c;
        }
        if let Some(avg) = &flags.capacity_averaging {
            spec.capacity_averaging = avg.parse()?;
        }
        spec.validate()?;
        return Ok(spec);
    }
    let file = match &args.config {
        Some(path) => config::load_file(path)?,
        None => config::FileConfig::default(),
    };
    let (cfg, budget, axes) = config::resolve(&file, &flags)?;
    let axes = axes.unwrap_or_else(|| vec![AxisValues::SnrDb(vec![cfg.snr_db])]);
    let spec = SweepSpec {
        preset: "custom".into(),
        base: cfg,
        axes,
        trials: budget.trials,
        subframes: budget.subframes,
        capacity_samples: budget.capacity_samples,
        capacity_averaging: budget.capacity_averaging,
    };
    spec.validate()?;
    Ok(spec)
}

fn emit(spec: &SweepSpec, out: Option<&PathBuf>, workers: usize) -> Result<()> {
    let rows = run_sweep(spec, workers)?;
    let mut bytes = Vec::new();
    write_csv(&rows, &mut bytes)?;
    match out {
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes)?;
        }
        Some(path) => {
            std::fs::write(path, &bytes)?;
            let digest = manifest::sha256_hex(&bytes);
            let m = manifest::build(
                spec,
                vec![manifest::OutputDigest {
                    path: path.display().to_string(),
                    sha256: digest,
                }],
            );
            manifest::write(&m, &manifest::manifest_path(path))?;
            eprintln!(
                "wrote {} and {}",
                path.display(),
                manifest::manifest_path(path).display()
            );
        }
    }
    Ok(())
}

fn rerun_manifest(path: &PathBuf, out: Option<&PathBuf>, workers: usize) -> Result<i32> {
    let m = manifest::load(path)?;
    if m.outputs.is_empty() {
        return Err(Error::Config("manifest records no outputs".into()));
    }
    let rows = run_sweep(&m.spec, workers)?;
    let mut bytes = Vec::new();
    write_csv(&rows, &mut bytes)?;
    let target = out
        .cloned()
        .unwrap_or_else(|| PathBuf::from(&m.outputs[0].path));
    std::fs::write(&target, &bytes)?;
    let digest = manifest::sha256_hex(&bytes);
    if digest == m.outputs[0].sha256 {
        println!(
            "reproduced {}: sha256 {} matches the manifest",
            target.display(),
            digest
        );
        Ok(0)
    } else {
        eprintln!(
            "digest mismatch for {}: manifest {} vs reproduced {}",
            target.display(),
            m.outputs[0].sha256,
            digest
        );
        Ok(1)
    }
}

fn workers_or_default(requested: Option<usize>) -> usize {
    match requested {
        Some(0) | None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        Some(n) => n,
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Command::Run(args) => {
            let workers = workers_or_default(args.workers);
            if let Some(mpath) = &args.from_manifest {
                return rerun_manifest(mpath, args.out.as_ref(), workers);
            }
            let spec = build_spec(&args)?;
            emit(&spec, args.out.as_ref(), workers)?;
            Ok(0)
        }
        Command::Validate(args) => {
            let seed = match args.seed {
                Some(s) => s,
                None => config::env_seed()?.unwrap_or(0),
            };
            Ok(validate::run_validate(seed, args.samples))
        }
        Command::Plot(args) => {
            let rows = plot::parse_csv(&args.csv)?;
            let script = plot::gnuplot_script(&args.preset, &rows)?;
            print!("{script}");
            Ok(0)
        }
        Command::Presets => {
            for name in PRESET_NAMES {
                println!("{name:<8} {}", preset_description(name));
            }
            Ok(0)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::UnknownPreset(..) => 2,
        _ => 1,
    }
}

/// Parses arguments and dispatches; returns the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
