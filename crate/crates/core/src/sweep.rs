//! Config-driven experiment runner: altitude and distance sweeps with both
//! Monte-Carlo and closed-form columns, the random-walk demo, and the CSV /
//! JSON-sidecar emission behind the command-line tool.
//!
//! All points of one sweep share the master seed (common random numbers),
//! so axis trends are not washed out by independent sampling noise, and a
//! rerun with the same seed and config reproduces the CSV byte for byte
//! regardless of how many workers the trial pool uses.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::analytic::moment_set;
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::intensity::spatial_correlation;
use crate::montecarlo::{
    collect_snapshots, cov_estimate_from, random_walk_step, ratio_estimate_from, UavState,
};
use crate::scalar::Real;
use crate::units::{linear_to_db, watts_to_dbm};

/// Aggregates at one sweep point. Power fields are linear (W / W²); the
/// dB forms come from the accessor methods so the two views cannot drift.
#[derive(Debug, Clone, Copy)]
pub struct SweepPoint<T> {
    pub axis_value: T,
    pub rho_mc: T,
    pub rho_mc_ci: T,
    pub rho_closed: T,
    pub mean_ratio_mc: T,
    pub mean_ratio_closed: T,
    pub e_i_ul: T,
    pub e_i_dl: T,
    pub var_i_dl: T,
    pub cov_mc: T,
    pub cov_closed: T,
    pub n_trials: u64,
    pub zero_dl_excluded: u64,
}

impl<T: Real> SweepPoint<T> {
    pub fn e_i_ul_dbm(&self) -> T {
        watts_to_dbm(self.e_i_ul)
    }

    pub fn e_i_dl_dbm(&self) -> T {
        watts_to_dbm(self.e_i_dl)
    }

    pub fn var_i_dl_db(&self) -> T {
        linear_to_db(self.var_i_dl)
    }

    pub fn rho_closed_db(&self) -> T {
        linear_to_db(self.rho_closed)
    }

    pub fn rho_mc_db(&self) -> T {
        linear_to_db(self.rho_mc)
    }

    pub fn mean_ratio_closed_db(&self) -> T {
        linear_to_db(self.mean_ratio_closed)
    }

    pub fn mean_ratio_mc_db(&self) -> T {
        linear_to_db(self.mean_ratio_mc)
    }

    /// dB view of the closed-form covariance (NaN when non-positive).
    pub fn cov_closed_db(&self) -> T {
        linear_to_db(self.cov_closed)
    }

    /// dB view of the sampled covariance (NaN when non-positive).
    pub fn cov_mc_db(&self) -> T {
        linear_to_db(self.cov_mc)
    }
}

/// Provenance sidecar of one run.
#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub axis_name: String,
    pub seed: u64,
    pub trials: u64,
    pub config_sha256: String,
    pub version: String,
    pub wall_ms: u128,
    /// The effective config, echoed key by key.
    pub config: BTreeMap<String, String>,
}

/// One sweep: ordered points plus provenance.
#[derive(Debug, Clone)]
pub struct SweepResult<T> {
    pub points: Vec<SweepPoint<T>>,
    pub metadata: RunMetadata,
}

/// One row of the random-walk demo.
#[derive(Debug, Clone, Copy)]
pub struct WalkRow<T> {
    pub step: u64,
    pub x: T,
    pub y: T,
    pub d: T,
    pub xi: T,
    pub cov_closed: T,
}

/// Random-walk trajectory with the induced correlation/covariance series.
#[derive(Debug, Clone)]
pub struct WalkDemo<T> {
    pub rows: Vec<WalkRow<T>>,
    pub metadata: RunMetadata,
}

fn metadata<T: Real>(
    cfg: &SystemConfig<T>,
    axis_name: &str,
    trials: u64,
    started: Instant,
) -> RunMetadata {
    RunMetadata {
        axis_name: axis_name.to_string(),
        seed: cfg.seed,
        trials,
        config_sha256: cfg.sha256_hex(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_ms: started.elapsed().as_millis(),
        config: cfg
            .entries()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
    }
}

fn sweep_point<T: Real>(cfg: &SystemConfig<T>, axis_value: T, d: T) -> Result<SweepPoint<T>> {
    let samples = collect_snapshots(cfg, d, cfg.trials, cfg.seed)?;
    let ratio = ratio_estimate_from(&samples);
    let cov = cov_estimate_from(&samples);
    let ms = moment_set(cfg, d)?;
    Ok(SweepPoint {
        axis_value,
        rho_mc: ratio.rho_mc,
        rho_mc_ci: ratio.ci_halfwidth,
        rho_closed: ms.rho_closed,
        mean_ratio_mc: ratio.mean_ratio,
        mean_ratio_closed: ms.e_i_ul / ms.e_i_dl,
        e_i_ul: ms.e_i_ul,
        e_i_dl: ms.e_i_dl,
        var_i_dl: ms.var_i_dl,
        cov_mc: cov.cov,
        cov_closed: ms.cov,
        n_trials: cfg.trials,
        zero_dl_excluded: ratio.zero_dl_excluded,
    })
}

/// Sweep the UAV altitude at a fixed 2-D separation.
pub fn run_altitude_sweep<T: Real>(
    cfg: &SystemConfig<T>,
    h_values: &[T],
    d_fixed: T,
) -> Result<SweepResult<T>> {
    run_altitude_sweep_with_progress(cfg, h_values, d_fixed, &mut |_, _| {})
}

pub fn run_altitude_sweep_with_progress<T: Real>(
    cfg: &SystemConfig<T>,
    h_values: &[T],
    d_fixed: T,
    progress: &mut dyn FnMut(usize, usize),
) -> Result<SweepResult<T>> {
    if h_values.is_empty() {
        return Err(Error::config(
            "altitude sweep needs at least one altitude".to_string(),
        ));
    }
    let started = Instant::now();
    let mut points = Vec::with_capacity(h_values.len());
    for (i, &h) in h_values.iter().enumerate() {
        let cfg_h = cfg.with_altitude(h);
        cfg_h.validate()?;
        points.push(sweep_point(&cfg_h, h, d_fixed)?);
        progress(i + 1, h_values.len());
    }
    Ok(SweepResult {
        points,
        metadata: metadata(cfg, "altitude_m", cfg.trials, started),
    })
}

/// Sweep the 2-D UAV–controller separation at a fixed altitude.
pub fn run_distance_sweep<T: Real>(
    cfg: &SystemConfig<T>,
    d_values: &[T],
    h_fixed: T,
) -> Result<SweepResult<T>> {
    run_distance_sweep_with_progress(cfg, d_values, h_fixed, &mut |_, _| {})
}

pub fn run_distance_sweep_with_progress<T: Real>(
    cfg: &SystemConfig<T>,
    d_values: &[T],
    h_fixed: T,
    progress: &mut dyn FnMut(usize, usize),
) -> Result<SweepResult<T>> {
    if d_values.is_empty() {
        return Err(Error::config(
            "distance sweep needs at least one distance".to_string(),
        ));
    }
    let started = Instant::now();
    let cfg_h = cfg.with_altitude(h_fixed);
    cfg_h.validate()?;
    let mut points = Vec::with_capacity(d_values.len());
    for (i, &d) in d_values.iter().enumerate() {
        if !(d >= T::zero()) {
            return Err(Error::config(format!(
                "distances must be non-negative, got {d}"
            )));
        }
        points.push(sweep_point(&cfg_h, d, d)?);
        progress(i + 1, d_values.len());
    }
    Ok(SweepResult {
        points,
        metadata: metadata(&cfg_h, "distance_m", cfg.trials, started),
    })
}

/// Walk the mobility lattice and tabulate the induced separation,
/// correlation, and closed-form covariance after every step (step 0 is the
/// starting point at the origin).
pub fn run_walk_demo<T: Real>(cfg: &SystemConfig<T>, steps: u64, seed: u64) -> Result<WalkDemo<T>> {
    use crate::analytic::cov_ul_dl;
    use rand::SeedableRng;

    if steps < 1 {
        return Err(Error::config(
            "walk demo needs at least one step".to_string(),
        ));
    }
    cfg.validate()?;
    let started = Instant::now();
    let mut state = UavState::at_origin(cfg.walk_step, cfg.altitude, cfg.walk_d_max)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(steps as usize + 1);
    let push = |step: u64, state: &UavState<T>, rows: &mut Vec<WalkRow<T>>| -> Result<()> {
        let (x, y) = state.pos();
        let d = state.distance_from_origin();
        rows.push(WalkRow {
            step,
            x,
            y,
            d,
            xi: spatial_correlation(d, cfg.k0)?,
            cov_closed: cov_ul_dl(cfg, d)?,
        });
        Ok(())
    };
    push(0, &state, &mut rows)?;
    for step in 1..=steps {
        state = random_walk_step(&state, &mut rng)?;
        push(step, &state, &mut rows)?;
    }
    Ok(WalkDemo {
        rows,
        metadata: metadata(cfg, "step", steps, started),
    })
}

/// Fixed CSV schema of a sweep.
pub const SWEEP_CSV_HEADER: [&str; 12] = [
    "axis_value",
    "rho_mc",
    "rho_mc_ci",
    "rho_closed",
    "mean_ratio_mc",
    "mean_ratio_closed",
    "e_iul_dbm",
    "e_idl_dbm",
    "var_idl_db",
    "cov_mc",
    "cov_closed",
    "n_trials",
];

fn fmt<T: Real>(v: T) -> String {
    format!("{v:.9e}")
}

/// Write the sweep as CSV with the fixed column schema.
pub fn write_sweep_csv<T: Real, W: Write>(result: &SweepResult<T>, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SWEEP_CSV_HEADER)?;
    for p in &result.points {
        w.write_record([
            p.axis_value.to_string(),
            fmt(p.rho_mc),
            fmt(p.rho_mc_ci),
            fmt(p.rho_closed),
            fmt(p.mean_ratio_mc),
            fmt(p.mean_ratio_closed),
            fmt(p.e_i_ul_dbm()),
            fmt(p.e_i_dl_dbm()),
            fmt(p.var_i_dl_db()),
            fmt(p.cov_mc),
            fmt(p.cov_closed),
            p.n_trials.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Write the walk demo as CSV.
pub fn write_walk_csv<T: Real, W: Write>(demo: &WalkDemo<T>, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["step", "x_m", "y_m", "d_m", "xi", "cov_closed"])?;
    for r in &demo.rows {
        w.write_record([
            r.step.to_string(),
            r.x.to_string(),
            r.y.to_string(),
            fmt(r.d),
            fmt(r.xi),
            fmt(r.cov_closed),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Write the JSON provenance sidecar.
pub fn write_metadata_json<W: Write>(meta: &RunMetadata, mut writer: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut writer, meta)
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    writeln!(writer)?;
    Ok(())
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(std::io::Error::other(e))
    }
}
