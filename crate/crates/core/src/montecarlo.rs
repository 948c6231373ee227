//! Snapshot-level simulation of the correlated uplink/downlink aggregate
//! interference, plus the grid random-walk mobility model.
//!
//! Each trial owns a counter-derived substream of the master seed
//! (ChaCha8 stream = trial index), so aggregates are bit-identical for a
//! given `(seed, trials, config)` no matter how the trials are scheduled
//! across workers. Cross-trial reductions use compensated summation in
//! trial order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{inverse_power, los_probability_breakpoint};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::intensity::sample_intensity_pair;
use crate::scalar::Real;

/// UAV position on the mobility lattice, with the geometry it moves in.
///
/// The position is stored as integer lattice indices so every visited point
/// is exactly a grid multiple of the step size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UavState<T> {
    ix: i64,
    iy: i64,
    step: T,
    altitude: T,
    d_max: T,
}

impl<T: Real> UavState<T> {
    /// State at the controller's grid point (the origin).
    pub fn at_origin(step: T, altitude: T, d_max: T) -> Result<Self> {
        if !(step > T::zero()) {
            return Err(Error::config(format!(
                "step size must be positive, got {step}"
            )));
        }
        if !(altitude > T::zero()) {
            return Err(Error::config(format!(
                "altitude must be positive, got {altitude}"
            )));
        }
        if !(d_max >= T::zero()) {
            return Err(Error::config(format!(
                "d_max must be non-negative, got {d_max}"
            )));
        }
        Ok(Self {
            ix: 0,
            iy: 0,
            step,
            altitude,
            d_max,
        })
    }

    /// Position in meters.
    pub fn pos(&self) -> (T, T) {
        (
            T::of(self.ix as f64) * self.step,
            T::of(self.iy as f64) * self.step,
        )
    }

    /// Lattice indices of the position.
    pub fn lattice(&self) -> (i64, i64) {
        (self.ix, self.iy)
    }

    /// 2-D distance from the controller, m.
    pub fn distance_from_origin(&self) -> T {
        let (x, y) = self.pos();
        x.hypot(y)
    }

    pub fn step_size(&self) -> T {
        self.step
    }

    pub fn altitude(&self) -> T {
        self.altitude
    }

    pub fn d_max(&self) -> T {
        self.d_max
    }

    fn offset_distance(&self, dx: i64, dy: i64) -> T {
        let x = T::of((self.ix + dx) as f64) * self.step;
        let y = T::of((self.iy + dy) as f64) * self.step;
        x.hypot(y)
    }
}

const DIRECTIONS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// One uniform step to a cardinal neighbor, resampling the direction until
/// the move keeps the UAV within `d_max` of the controller.
pub fn random_walk_step<T: Real, R: Rng + ?Sized>(
    state: &UavState<T>,
    rng: &mut R,
) -> Result<UavState<T>> {
    if !DIRECTIONS
        .iter()
        .any(|&(dx, dy)| state.offset_distance(dx, dy) <= state.d_max)
    {
        return Err(Error::config(format!(
            "no legal move: d_max = {} admits no neighbor at step {}",
            state.d_max, state.step
        )));
    }
    loop {
        let (dx, dy) = DIRECTIONS[rng.random_range(0..4usize)];
        if state.offset_distance(dx, dy) <= state.d_max {
            return Ok(UavState {
                ix: state.ix + dx,
                iy: state.iy + dy,
                ..*state
            });
        }
    }
}

/// One Monte-Carlo snapshot: the pair of aggregate powers and the interferer
/// counts that produced them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceSample<T> {
    /// Uplink aggregate interference at the UAV, W.
    pub i_ul: T,
    /// Downlink aggregate interference at the controller, W.
    pub i_dl: T,
    pub n_ul: u64,
    pub n_dl: u64,
}

/// Monte-Carlo estimate of the mean power ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioEstimate<T> {
    /// Mean of the per-snapshot ratios `I_ul / I_dl`.
    pub rho_mc: T,
    /// Ratio of the mean powers `ΣI_ul / ΣI_dl`.
    pub mean_ratio: T,
    /// 95% half-width of `rho_mc`.
    pub ci_halfwidth: T,
    pub trials: u64,
    /// Snapshots dropped from the ratio mean because the downlink power
    /// was exactly zero (empty field).
    pub zero_dl_excluded: u64,
}

/// Monte-Carlo estimate of the power covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovEstimate<T> {
    /// Unbiased sample covariance of `(I_ul, I_dl)`, W².
    pub cov: T,
    /// Standard error of the covariance estimate.
    pub se: T,
    pub trials: u64,
}

/// Draw one correlated snapshot at 2-D separation `d`:
/// a density pair, two independent Poisson interferer fields on the annulus
/// `[r0, r_max]` (one around the UAV's ground projection, one around the
/// controller), break-point LoS per uplink interferer, and unit-mean
/// exponential fading on every term. Downlink interferers are all NLoS.
pub fn sample_snapshot<T: Real, R: Rng + ?Sized>(
    cfg: &SystemConfig<T>,
    d: T,
    rng: &mut R,
) -> Result<InterferenceSample<T>> {
    if !(cfg.r_max > cfg.r0) {
        return Err(Error::config(format!(
            "r_max = {} must exceed r0 = {}",
            cfg.r_max, cfg.r0
        )));
    }
    let lgcp = cfg.lgcp()?;
    let pair = sample_intensity_pair(&lgcp, d, rng)?;

    let r0_sq = cfg.r0 * cfg.r0;
    let annulus_sq = cfg.r_max * cfg.r_max - r0_sq;
    let area = T::PI() * annulus_sq;
    let h = cfg.altitude;
    let h_sq = h * h;
    let env = cfg.los_env();
    let r0_3d = cfg.r0_3d();
    let amp_ul = cfg.ul_budget().amplitude();
    let amp_dl = cfg.dl_budget().amplitude();

    let n_ul = T::poisson(rng, pair.lambda_ul * area);
    let mut i_ul = T::zero();
    for _ in 0..n_ul {
        let u = T::unit_uniform(rng);
        let r_3d = (r0_sq + u * annulus_sq + h_sq).sqrt();
        let p_los = los_probability_breakpoint(r_3d, h, &env, r0_3d)?;
        let los = T::unit_uniform(rng) < p_los;
        let eta = if los { cfg.eta_los_ul } else { cfg.eta_nlos_ul };
        i_ul += amp_ul * inverse_power(r_3d, eta) * T::unit_exponential(rng);
    }

    let n_dl = T::poisson(rng, pair.lambda_dl * area);
    let mut i_dl = T::zero();
    for _ in 0..n_dl {
        let u = T::unit_uniform(rng);
        let r = (r0_sq + u * annulus_sq).sqrt();
        i_dl += amp_dl * inverse_power(r, cfg.eta_nlos_dl) * T::unit_exponential(rng);
    }

    Ok(InterferenceSample {
        i_ul,
        i_dl,
        n_ul,
        n_dl,
    })
}

/// Run `trials` independent snapshots in parallel, one seeded substream per
/// trial. The returned vector is in trial order.
pub fn collect_snapshots<T: Real>(
    cfg: &SystemConfig<T>,
    d: T,
    trials: u64,
    seed: u64,
) -> Result<Vec<InterferenceSample<T>>> {
    if trials == 0 {
        return Err(Error::config("at least one trial is required".to_string()));
    }
    cfg.validate()?;
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial);
            sample_snapshot(cfg, d, &mut rng)
        })
        .collect()
}

/// Estimate the mean power ratio over `trials` snapshot pairs that share
/// one density draw per trial. Deterministic for fixed `(seed, trials)`.
pub fn estimate_ratio<T: Real>(
    cfg: &SystemConfig<T>,
    d: T,
    trials: u64,
    seed: u64,
) -> Result<RatioEstimate<T>> {
    if trials < 2 {
        return Err(Error::config(
            "ratio estimation needs at least 2 trials".to_string(),
        ));
    }
    let samples = collect_snapshots(cfg, d, trials, seed)?;
    Ok(ratio_estimate_from(&samples))
}

/// Estimate the power covariance over `trials` snapshot pairs.
pub fn estimate_cov<T: Real>(
    cfg: &SystemConfig<T>,
    d: T,
    trials: u64,
    seed: u64,
) -> Result<CovEstimate<T>> {
    if trials < 2 {
        return Err(Error::config(
            "covariance estimation needs at least 2 trials".to_string(),
        ));
    }
    let samples = collect_snapshots(cfg, d, trials, seed)?;
    Ok(cov_estimate_from(&samples))
}

/// Ratio statistics from an ordered sample set (compensated sums).
pub fn ratio_estimate_from<T: Real>(samples: &[InterferenceSample<T>]) -> RatioEstimate<T> {
    let mut sum_ul = KahanSum::default();
    let mut sum_dl = KahanSum::default();
    let mut sum_ratio = KahanSum::default();
    let mut included: u64 = 0;
    for s in samples {
        sum_ul.add(s.i_ul);
        sum_dl.add(s.i_dl);
        if s.i_dl > T::zero() {
            sum_ratio.add(s.i_ul / s.i_dl);
            included += 1;
        }
    }
    let n = T::of(included as f64);
    let rho_mc = if included > 0 {
        sum_ratio.value() / n
    } else {
        T::nan()
    };
    let mut sum_sq_dev = KahanSum::default();
    for s in samples {
        if s.i_dl > T::zero() {
            let dev = s.i_ul / s.i_dl - rho_mc;
            sum_sq_dev.add(dev * dev);
        }
    }
    let ci_halfwidth = if included > 1 {
        let var = sum_sq_dev.value() / (n - T::one());
        T::of(1.96) * (var / n).sqrt()
    } else {
        T::nan()
    };
    RatioEstimate {
        rho_mc,
        mean_ratio: sum_ul.value() / sum_dl.value(),
        ci_halfwidth,
        trials: samples.len() as u64,
        zero_dl_excluded: samples.len() as u64 - included,
    }
}

/// Unbiased covariance statistics from an ordered sample set.
pub fn cov_estimate_from<T: Real>(samples: &[InterferenceSample<T>]) -> CovEstimate<T> {
    let n = samples.len();
    let nf = T::of(n as f64);
    let mut sum_ul = KahanSum::default();
    let mut sum_dl = KahanSum::default();
    for s in samples {
        sum_ul.add(s.i_ul);
        sum_dl.add(s.i_dl);
    }
    let mean_ul = sum_ul.value() / nf;
    let mean_dl = sum_dl.value() / nf;
    let mut sum_prod = KahanSum::default();
    for s in samples {
        sum_prod.add((s.i_ul - mean_ul) * (s.i_dl - mean_dl));
    }
    let cov = sum_prod.value() / (nf - T::one());
    // SE from the spread of the per-sample cross products.
    let mut sum_sq = KahanSum::default();
    for s in samples {
        let dev = (s.i_ul - mean_ul) * (s.i_dl - mean_dl) - cov;
        sum_sq.add(dev * dev);
    }
    let se = (sum_sq.value() / (nf - T::one()) / nf).sqrt();
    CovEstimate {
        cov,
        se,
        trials: n as u64,
    }
}

/// Sample mean and standard error of the uplink power.
pub fn mean_ul_with_se<T: Real>(samples: &[InterferenceSample<T>]) -> (T, T) {
    mean_with_se(samples, |s| s.i_ul)
}

/// Sample mean and standard error of the downlink power.
pub fn mean_dl_with_se<T: Real>(samples: &[InterferenceSample<T>]) -> (T, T) {
    mean_with_se(samples, |s| s.i_dl)
}

/// Unbiased sample variance and its standard error for the downlink power.
pub fn var_dl_with_se<T: Real>(samples: &[InterferenceSample<T>]) -> (T, T) {
    let nf = T::of(samples.len() as f64);
    let (mean, _) = mean_dl_with_se(samples);
    let mut sum_sq = KahanSum::default();
    for s in samples {
        let dev = s.i_dl - mean;
        sum_sq.add(dev * dev);
    }
    let var = sum_sq.value() / (nf - T::one());
    // SE of the variance from the spread of the squared deviations.
    let mut sum_sq_sq = KahanSum::default();
    for s in samples {
        let dev = s.i_dl - mean;
        let centered = dev * dev - var;
        sum_sq_sq.add(centered * centered);
    }
    let se = (sum_sq_sq.value() / (nf - T::one()) / nf).sqrt();
    (var, se)
}

fn mean_with_se<T: Real, F: Fn(&InterferenceSample<T>) -> T>(
    samples: &[InterferenceSample<T>],
    field: F,
) -> (T, T) {
    let nf = T::of(samples.len() as f64);
    let mut sum = KahanSum::default();
    for s in samples {
        sum.add(field(s));
    }
    let mean = sum.value() / nf;
    let mut sq = KahanSum::default();
    for s in samples {
        let dev = field(s) - mean;
        sq.add(dev * dev);
    }
    let se = (sq.value() / (nf - T::one()) / nf).sqrt();
    (mean, se)
}

/// Kahan compensated accumulator.
#[derive(Debug, Clone, Copy)]
struct KahanSum<T> {
    sum: T,
    carry: T,
}

impl<T: Real> Default for KahanSum<T> {
    fn default() -> Self {
        Self {
            sum: T::zero(),
            carry: T::zero(),
        }
    }
}

impl<T: Real> KahanSum<T> {
    fn add(&mut self, v: T) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> T {
        self.sum
    }
}
