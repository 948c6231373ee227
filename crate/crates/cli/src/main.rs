//! `uavintf` — sweep runner and self-check harness for the UAV
//! interference-asymmetry toolkit.
//!
//! Progress goes to standard error; standard output carries data only when
//! `--stdout` is set (or the `validate` table). Exit codes: 0 success,
//! 2 usage/config error, 3 numeric failure.

// Domain guards are written `!(x > 0)` so NaN fails them; `x <= 0` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use uavintf::config::SystemConfig;
use uavintf::sweep::{
    run_altitude_sweep_with_progress, run_distance_sweep_with_progress, run_walk_demo,
    write_metadata_json, write_sweep_csv, write_walk_csv, RunMetadata, SweepResult,
};
use uavintf::validation::run_validation;
use uavintf::Error;

#[derive(Parser)]
#[command(
    name = "uavintf",
    version,
    about = "Uplink/downlink aggregate-interference asymmetry for urban UAV control links"
)]
struct Cli {
    /// Path to a `key = value` config file (defaults are the built-in urban scenario)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the configured Monte-Carlo trial count
    #[arg(long, global = true)]
    trials: Option<u64>,

    /// Override the configured master seed
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for CSV and metadata files
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Write CSV data to standard output instead of files
    #[arg(long, global = true)]
    stdout: bool,

    /// Run at the documented reduced interferer density (fast mode)
    #[arg(long, global = true)]
    reduced_density: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct AltitudeAxis {
    /// Lowest altitude, m
    #[arg(long, default_value_t = 30.0)]
    h_min: f64,
    /// Highest altitude, m
    #[arg(long, default_value_t = 120.0)]
    h_max: f64,
    /// Altitude step, m
    #[arg(long, default_value_t = 10.0)]
    h_step: f64,
    /// Fixed 2-D UAV–controller separation, m
    #[arg(long, default_value_t = 30.0)]
    fixed_d: f64,
}

#[derive(Args)]
struct DistanceAxis {
    /// Smallest separation, m
    #[arg(long, default_value_t = 0.0)]
    d_min: f64,
    /// Largest separation, m
    #[arg(long, default_value_t = 100.0)]
    d_max: f64,
    /// Separation step, m
    #[arg(long, default_value_t = 10.0)]
    d_step: f64,
    /// Fixed UAV altitude, m
    #[arg(long, default_value_t = 30.0)]
    fixed_h: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the UAV altitude at a fixed 2-D separation
    AltitudeSweep(AltitudeAxis),
    /// Sweep the 2-D separation at a fixed UAV altitude
    DistanceSweep(DistanceAxis),
    /// Random-walk trajectory with the induced correlation/covariance series
    WalkDemo {
        /// Number of walk steps
        #[arg(long, default_value_t = 100)]
        steps: u64,
    },
    /// Run the numeric self-check suite and print a pass/fail table
    Validate {
        /// Use the configured density instead of the fast reduced mode
        #[arg(long)]
        full_density: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Numeric(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let mut cfg: SystemConfig<f64> = match &cli.config {
        Some(path) => SystemConfig::from_path(path)?,
        None => SystemConfig::default(),
    };
    if let Some(trials) = cli.trials {
        cfg.trials = trials;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.reduced_density {
        cfg = cfg.reduced_density();
    }
    cfg.validate()?;

    match &cli.command {
        Command::AltitudeSweep(axis) => {
            let h_values = axis_values(axis.h_min, axis.h_max, axis.h_step)?;
            eprintln!(
                "altitude sweep: {} points, d = {} m, {} trials, seed {}",
                h_values.len(),
                axis.fixed_d,
                cfg.trials,
                cfg.seed
            );
            let result = run_altitude_sweep_with_progress(
                &cfg,
                &h_values,
                axis.fixed_d,
                &mut progress_to_stderr,
            )?;
            emit_sweep(&cli, "altitude_sweep", &result)?;
        }
        Command::DistanceSweep(axis) => {
            let d_values = axis_values(axis.d_min, axis.d_max, axis.d_step)?;
            eprintln!(
                "distance sweep: {} points, h = {} m, {} trials, seed {}",
                d_values.len(),
                axis.fixed_h,
                cfg.trials,
                cfg.seed
            );
            let result = run_distance_sweep_with_progress(
                &cfg,
                &d_values,
                axis.fixed_h,
                &mut progress_to_stderr,
            )?;
            emit_sweep(&cli, "distance_sweep", &result)?;
        }
        Command::WalkDemo { steps } => {
            eprintln!("random walk: {steps} steps, seed {}", cfg.seed);
            let demo = run_walk_demo(&cfg, *steps, cfg.seed)?;
            if cli.stdout {
                write_walk_csv(&demo, std::io::stdout().lock())?;
            } else {
                let csv_path = prepare_out(&cli)?.join("walk_demo.csv");
                write_walk_csv(&demo, BufWriter::new(File::create(&csv_path)?))?;
                write_meta(&cli, "walk_demo", &demo.metadata)?;
                eprintln!("wrote {}", csv_path.display());
            }
        }
        Command::Validate { full_density } => {
            // The statistical checks default to the fast reduced density;
            // the configured (full) density is opt-in because it multiplies
            // the runtime by the density ratio.
            let check_cfg = if *full_density {
                cfg
            } else {
                cfg.reduced_density()
            };
            let var_trials = check_cfg.trials.max(150_000);
            eprintln!(
                "self-check suite: lambda_bar = {}, {} mean-check trials, {} variance-check trials",
                check_cfg.lambda_bar, check_cfg.trials, var_trials
            );
            let outcomes = run_validation(&check_cfg, check_cfg.trials, var_trials);
            let mut all_passed = true;
            println!("{:<48} {:<6} detail", "check", "result");
            for o in &outcomes {
                all_passed &= o.passed;
                println!(
                    "{:<48} {:<6} {}",
                    o.name,
                    if o.passed { "PASS" } else { "FAIL" },
                    o.detail
                );
            }
            if !all_passed {
                return Ok(ExitCode::from(3));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn progress_to_stderr(done: usize, total: usize) {
    eprintln!("  point {done}/{total} done");
}

fn axis_values(min: f64, max: f64, step: f64) -> Result<Vec<f64>, Error> {
    if !(step > 0.0) {
        return Err(Error::config(format!(
            "axis step must be positive, got {step}"
        )));
    }
    if max < min {
        return Err(Error::config(format!(
            "axis range is empty: [{min}, {max}]"
        )));
    }
    let mut values = Vec::new();
    let mut i = 0u64;
    loop {
        let v = min + step * i as f64;
        if v > max + step * 1e-9 {
            break;
        }
        values.push(v);
        i += 1;
    }
    Ok(values)
}

fn prepare_out(cli: &Cli) -> Result<PathBuf, Error> {
    std::fs::create_dir_all(&cli.out)?;
    Ok(cli.out.clone())
}

fn emit_sweep(cli: &Cli, name: &str, result: &SweepResult<f64>) -> Result<(), Error> {
    if cli.stdout {
        write_sweep_csv(result, std::io::stdout().lock())?;
        return Ok(());
    }
    let dir = prepare_out(cli)?;
    let csv_path = dir.join(format!("{name}.csv"));
    write_sweep_csv(result, BufWriter::new(File::create(&csv_path)?))?;
    write_meta(cli, name, &result.metadata)?;
    eprintln!("wrote {}", csv_path.display());
    Ok(())
}

fn write_meta(cli: &Cli, name: &str, meta: &RunMetadata) -> Result<(), Error> {
    let dir = prepare_out(cli)?;
    let meta_path = dir.join(format!("{name}.meta.json"));
    let mut w = BufWriter::new(File::create(&meta_path)?);
    write_metadata_json(meta, &mut w)?;
    w.flush()?;
    eprintln!("wrote {}", meta_path.display());
    Ok(())
}
