//! Closed-form moments of the uplink/downlink aggregate interference and
//! the asymmetry ratio, plus independent quadrature oracles used to verify
//! them.
//!
//! All closed forms integrate the interferer field to infinity. The
//! `*_truncated` variants restrict the field to the finite simulation
//! radius so Monte-Carlo estimates can be compared without folding the
//! truncation bias into the statistical error.

use crate::channel::inverse_power;
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::intensity::spatial_correlation;
use crate::quadrature::integrate;
use crate::scalar::Real;
use crate::special::upper_incomplete_gamma;

/// Internal relative tolerance of the quadrature oracles.
const ORACLE_REL_TOL: f64 = 1e-10;

/// The closed-form moment bundle at one geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet<T> {
    /// Mean uplink aggregate interference, W.
    pub e_i_ul: T,
    /// Mean downlink aggregate interference, W.
    pub e_i_dl: T,
    /// Downlink interference variance, W².
    pub var_i_dl: T,
    /// Mean product of the two powers, W².
    pub e_prod: T,
    /// Covariance of the two powers, W².
    pub cov: T,
    /// Second-order approximation of the mean power ratio.
    pub rho_closed: T,
}

fn require_nlos_ul<T: Real>(cfg: &SystemConfig<T>) -> Result<T> {
    let eta = cfg.eta_nlos_ul;
    if !(eta > T::of(2.0)) {
        return Err(Error::domain(format!(
            "uplink NLoS exponent must exceed 2 for a convergent integral, got {eta}"
        )));
    }
    Ok(eta)
}

fn require_nlos_dl<T: Real>(cfg: &SystemConfig<T>) -> Result<T> {
    let eta = cfg.eta_nlos_dl;
    if !(eta > T::of(2.0)) {
        return Err(Error::domain(format!(
            "downlink NLoS exponent must exceed 2 for a convergent integral, got {eta}"
        )));
    }
    Ok(eta)
}

/// Distance bracket of the mean uplink interference: the LoS + NLoS radial
/// integrals from the minimum 3-D distance to infinity with the break-point
/// LoS model substituted, assuming an inverse-square LoS exponent. The
/// expression is piecewise in whether the break distance `kappa·h` clears
/// the minimum 3-D distance.
pub fn ul_distance_bracket<T: Real>(cfg: &SystemConfig<T>) -> Result<T> {
    let (above, below) = ul_distance_bracket_cases(cfg)?;
    if cfg.los_kappa * cfg.altitude >= cfg.r0_3d() {
        Ok(above)
    } else {
        Ok(below)
    }
}

/// Both case expressions of [`ul_distance_bracket`], regardless of which
/// one applies. They agree where the break distance equals the minimum 3-D
/// distance, which the continuity checks exercise directly.
pub fn ul_distance_bracket_cases<T: Real>(cfg: &SystemConfig<T>) -> Result<(T, T)> {
    let eta = require_nlos_ul(cfg)?;
    let h = cfg.altitude;
    if !(h > T::zero()) {
        return Err(Error::domain(format!("altitude must be positive, got {h}")));
    }
    let mu = cfg.los_mu;
    let kappa = cfg.los_kappa;
    let r0_3d = cfg.r0_3d();
    let break_distance = kappa * h;
    let mu_kappa = mu * kappa;
    let exp_mu_kappa = mu_kappa.exp();
    let decay_rate_pow = (mu / h).powf(eta - T::of(2.0));
    let two_minus_eta = T::of(2.0) - eta;

    // Break distance beyond the minimum range: a pure-LoS log stretch, then
    // gamma-kernel terms from the decaying region, then the NLoS power tail.
    let above = (break_distance / r0_3d).ln()
        + exp_mu_kappa
            * (upper_incomplete_gamma(T::zero(), mu_kappa)?
                - decay_rate_pow * upper_incomplete_gamma(two_minus_eta, mu_kappa)?)
        + break_distance.powf(two_minus_eta) / (eta - T::of(2.0));

    // Break distance inside the minimum range: the decay already applies at
    // the closest interferer, so the gamma kernels start at mu·r0_3d/h.
    let a0 = mu * r0_3d / h;
    let below = exp_mu_kappa
        * (upper_incomplete_gamma(T::zero(), a0)?
            - decay_rate_pow * upper_incomplete_gamma(two_minus_eta, a0)?)
        + r0_3d.powf(two_minus_eta) / (eta - T::of(2.0));

    Ok((above, below))
}

/// Downlink radial bracket `(r0^{2−η} − r_max^{2−η}) / (η − 2)`;
/// `r_max = None` integrates to infinity.
fn dl_distance_bracket<T: Real>(cfg: &SystemConfig<T>, r_max: Option<T>) -> Result<T> {
    let eta = require_nlos_dl(cfg)?;
    if !(cfg.r0 > T::one()) {
        return Err(Error::domain(format!(
            "minimum horizontal distance must exceed 1 m, got {}",
            cfg.r0
        )));
    }
    let two_minus_eta = T::of(2.0) - eta;
    let head = cfg.r0.powf(two_minus_eta);
    let tail = match r_max {
        Some(rm) => rm.powf(two_minus_eta),
        None => T::zero(),
    };
    Ok((head - tail) / (eta - T::of(2.0)))
}

/// Mean uplink aggregate interference, W.
///
/// Linear in both the mean density and the link-budget prefactor.
pub fn expected_i_ul<T: Real>(cfg: &SystemConfig<T>) -> Result<T> {
    Ok(cfg.ul_budget().campbell_prefactor() * cfg.lambda_bar * ul_distance_bracket(cfg)?)
}

/// Mean downlink aggregate interference, W. Independent of the UAV
/// altitude and position.
pub fn expected_i_dl<T: Real>(cfg: &SystemConfig<T>) -> Result<T> {
    expected_i_dl_truncated(cfg, None)
}

/// Mean downlink interference with the interferer field truncated at
/// `r_max` (meters); `None` integrates to infinity.
pub fn expected_i_dl_truncated<T: Real>(cfg: &SystemConfig<T>, r_max: Option<T>) -> Result<T> {
    Ok(cfg.dl_budget().campbell_prefactor() * cfg.lambda_bar * dl_distance_bracket(cfg, r_max)?)
}

/// Downlink interference variance, W²: a Poisson shot-noise term plus the
/// density-fluctuation term that scales with `exp(sigma0_sq) − 1`.
pub fn var_i_dl<T: Real>(cfg: &SystemConfig<T>) -> Result<T> {
    var_i_dl_truncated(cfg, None)
}

/// [`var_i_dl`] with the interferer field truncated at `r_max`.
pub fn var_i_dl_truncated<T: Real>(cfg: &SystemConfig<T>, r_max: Option<T>) -> Result<T> {
    let eta = require_nlos_dl(cfg)?;
    let beta = cfg.dl_budget().campbell_prefactor();
    let lambda = cfg.lambda_bar;
    let two = T::of(2.0);

    // Shot-noise term: E{h²} = 2 folded into beta²/π · r^{2−2η}/(2η−2).
    let exponent = two - two * eta;
    let head = cfg.r0.powf(exponent);
    let tail = match r_max {
        Some(rm) => rm.powf(exponent),
        None => T::zero(),
    };
    let shot = beta * beta * lambda / T::PI() * (head - tail) / (two * eta - two);

    let bracket = dl_distance_bracket(cfg, r_max)?;
    let fluctuation = beta * beta * lambda * lambda * cfg.sigma0_sq.exp_m1() * bracket * bracket;
    Ok(shot + fluctuation)
}

/// Mean product `E{I_ul · I_dl}` at 2-D separation `d`, W².
///
/// Factorizes into the two mean brackets scaled by
/// `exp(sigma0_sq · ξ(d))`, so it reduces to the product of the means once
/// the density correlation dies off.
pub fn mean_product<T: Real>(cfg: &SystemConfig<T>, d: T) -> Result<T> {
    let xi = spatial_correlation(d, cfg.k0)?;
    let beta_ul = cfg.ul_budget().campbell_prefactor();
    let beta_dl = cfg.dl_budget().campbell_prefactor();
    Ok(beta_ul
        * beta_dl
        * cfg.lambda_bar
        * cfg.lambda_bar
        * (cfg.sigma0_sq * xi).exp()
        * dl_distance_bracket(cfg, None)?
        * ul_distance_bracket(cfg)?)
}

/// Covariance of the uplink and downlink powers at separation `d`, W²:
/// `E{I_ul}·E{I_dl}·(exp(sigma0_sq·ξ(d)) − 1)`.
///
/// Non-negative, strictly decreasing in `d` when both `sigma0_sq` and `k0`
/// are positive, and tending to zero as the separation grows. Evaluated
/// through `exp_m1` so the decorrelated limit does not cancel.
pub fn cov_ul_dl<T: Real>(cfg: &SystemConfig<T>, d: T) -> Result<T> {
    let xi = spatial_correlation(d, cfg.k0)?;
    Ok(expected_i_ul(cfg)? * expected_i_dl(cfg)? * (cfg.sigma0_sq * xi).exp_m1())
}

/// [`cov_ul_dl`] with both mean factors truncated at `r_max`; the uplink
/// mean over the truncated field comes from the quadrature oracle.
pub fn cov_ul_dl_truncated<T: Real>(cfg: &SystemConfig<T>, d: T, r_max: Option<T>) -> Result<T> {
    let xi = spatial_correlation(d, cfg.k0)?;
    let e_ul = match r_max {
        Some(_) => quadrature_oracle_i_ul(cfg, r_max)?,
        None => expected_i_ul(cfg)?,
    };
    Ok(e_ul * expected_i_dl_truncated(cfg, r_max)? * (cfg.sigma0_sq * xi).exp_m1())
}

/// Second-order expansion of the mean power ratio `E{I_ul / I_dl}`:
///
/// `E{I_ul}/E{I_dl} + E{I_ul}·Var{I_dl}/E{I_dl}³ − Cov/E{I_dl}²`
///
/// Non-decreasing in the separation `d` and converging to a constant once
/// the density correlation vanishes.
pub fn rho_closed_form<T: Real>(cfg: &SystemConfig<T>, d: T) -> Result<T> {
    Ok(moment_set(cfg, d)?.rho_closed)
}

/// Evaluate the full closed-form moment bundle at separation `d`.
pub fn moment_set<T: Real>(cfg: &SystemConfig<T>, d: T) -> Result<MomentSet<T>> {
    let xi = spatial_correlation(d, cfg.k0)?;
    let e_i_ul = expected_i_ul(cfg)?;
    let e_i_dl = expected_i_dl(cfg)?;
    let var = var_i_dl(cfg)?;
    let e_prod = e_i_ul * e_i_dl * (cfg.sigma0_sq * xi).exp();
    let cov = e_i_ul * e_i_dl * (cfg.sigma0_sq * xi).exp_m1();
    let rho_closed =
        e_i_ul / e_i_dl + e_i_ul * var / (e_i_dl * e_i_dl * e_i_dl) - cov / (e_i_dl * e_i_dl);
    Ok(MomentSet {
        e_i_ul,
        e_i_dl,
        var_i_dl: var,
        e_prod,
        cov,
        rho_closed,
    })
}

/// Mean uplink interference by adaptive quadrature of the LoS/NLoS radial
/// integrals with the break-point model substituted — the independent
/// check on [`expected_i_ul`]. `r_max` truncates the 2-D interferer field;
/// `None` integrates to infinity (the far NLoS tail beyond the point where
/// the LoS probability underflows is added as an exact power-law integral,
/// and the discarded LoS tail is below 1e−18 of the total).
pub fn quadrature_oracle_i_ul<T: Real>(cfg: &SystemConfig<T>, r_max: Option<T>) -> Result<T> {
    let env = cfg.los_env();
    let h = cfg.altitude;
    let plos = move |r_3d: T| -> T {
        let break_distance = env.kappa * h;
        if r_3d <= break_distance {
            T::one()
        } else {
            (-(env.mu / h) * (r_3d - break_distance)).exp()
        }
    };
    quadrature_oracle_i_ul_with_los(cfg, r_max, plos, Some(env.kappa * h))
}

/// [`quadrature_oracle_i_ul`] with an arbitrary LoS-probability curve over
/// 3-D distance. `split_at` marks a knot of the curve (a kink) that the
/// integrator should not straddle; pass `None` for smooth curves.
pub fn quadrature_oracle_i_ul_with_los<T: Real, F>(
    cfg: &SystemConfig<T>,
    r_max: Option<T>,
    plos: F,
    split_at: Option<T>,
) -> Result<T>
where
    F: Fn(T) -> T,
{
    let eta_nlos = require_nlos_ul(cfg)?;
    let eta_los = cfg.eta_los_ul;
    let h = cfg.altitude;
    if !(h > T::zero()) {
        return Err(Error::domain(format!("altitude must be positive, got {h}")));
    }
    let r0_3d = cfg.r0_3d();
    let rel_tol = T::of(ORACLE_REL_TOL);

    let integrand = |r_3d: T| -> T {
        let p = plos(r_3d);
        inverse_power(r_3d, eta_los - T::one()) * p
            + inverse_power(r_3d, eta_nlos - T::one()) * (T::one() - p)
    };

    let (upper, exact_tail) = match r_max {
        Some(rm) => {
            if !(rm > cfg.r0) {
                return Err(Error::domain(format!(
                    "truncation radius {rm} must exceed r0 = {}",
                    cfg.r0
                )));
            }
            ((rm * rm + h * h).sqrt(), T::zero())
        }
        None => {
            // Beyond x the LoS probability is below e^{−41.4} ≈ 1e−18:
            // integrate numerically to x, close the NLoS tail exactly.
            let break_distance = cfg.los_kappa * h;
            let x = break_distance.max(r0_3d) + T::of(41.45) * h / cfg.los_mu;
            let tail = x.powf(T::of(2.0) - eta_nlos) / (eta_nlos - T::of(2.0));
            (x, tail)
        }
    };

    let mut total = exact_tail;
    let mut segments: Vec<(T, T)> = Vec::new();
    match split_at {
        Some(knot) if knot > r0_3d && knot < upper => {
            segments.push((r0_3d, knot));
            segments.push((knot, upper));
        }
        _ => segments.push((r0_3d, upper)),
    }
    for (a, b) in segments {
        total += integrate(&integrand, a, b, rel_tol)?.value;
    }
    Ok(cfg.ul_budget().campbell_prefactor() * cfg.lambda_bar * total)
}

/// Mean downlink interference by quadrature over the ground distance —
/// the independent check on [`expected_i_dl`]. The infinite-field case
/// integrates in log-radius and closes the far tail exactly.
pub fn quadrature_oracle_i_dl<T: Real>(cfg: &SystemConfig<T>, r_max: Option<T>) -> Result<T> {
    let eta = require_nlos_dl(cfg)?;
    let rel_tol = T::of(ORACLE_REL_TOL);
    let two = T::of(2.0);
    let radial = match r_max {
        Some(rm) => {
            if !(rm > cfg.r0) {
                return Err(Error::domain(format!(
                    "truncation radius {rm} must exceed r0 = {}",
                    cfg.r0
                )));
            }
            let f = |r: T| inverse_power(r, eta - T::one());
            integrate(&f, cfg.r0, rm, rel_tol)?.value
        }
        None => {
            // Substitute u = ln r: the integrand becomes exp((2−η)u).
            let decades = T::of(40.0) / (eta - two);
            let u_max = cfg.r0.ln() + decades;
            let g = |u: T| ((two - eta) * u).exp();
            let body = integrate(&g, cfg.r0.ln(), u_max, rel_tol)?.value;
            let tail = u_max.exp().powf(two - eta) / (eta - two);
            body + tail
        }
    };
    Ok(cfg.dl_budget().campbell_prefactor() * cfg.lambda_bar * radial)
}
