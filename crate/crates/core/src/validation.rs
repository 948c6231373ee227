//! Numeric self-check suite behind the `validate` command: closed forms
//! against quadrature, the gamma kernel against direct integration, and
//! Monte-Carlo estimates against the truncated-field references.

use crate::analytic::{
    cov_ul_dl, cov_ul_dl_truncated, expected_i_dl_truncated, expected_i_ul, moment_set,
    quadrature_oracle_i_ul, ul_distance_bracket_cases, var_i_dl_truncated,
};
use crate::config::SystemConfig;
use crate::error::Result;
use crate::montecarlo::{
    collect_snapshots, cov_estimate_from, mean_dl_with_se, mean_ul_with_se, var_dl_with_se,
};
use crate::quadrature::integrate;
use crate::special::upper_incomplete_gamma;

/// Pinned thresholds of the self-check suite.
pub mod tolerances {
    /// Closed-form UL mean vs quadrature, relative.
    pub const CLOSED_VS_QUADRATURE_REL: f64 = 1e-6;
    /// Agreement of the two UL bracket branches at the case boundary.
    pub const BRANCH_CONTINUITY_REL: f64 = 1e-9;
    /// Gamma kernel vs direct integration, relative.
    pub const GAMMA_VS_QUADRATURE_REL: f64 = 1e-10;
    /// Gamma recurrence residual, relative.
    pub const GAMMA_RECURRENCE_REL: f64 = 1e-10;
    /// Maximum allowed infinite-vs-truncated field gap.
    pub const TRUNCATION_GAP_MAX: f64 = 0.01;
    /// Monte-Carlo mean agreement band, standard errors.
    pub const MC_MEAN_SIGMA: f64 = 3.0;
    /// Monte-Carlo variance agreement, relative.
    pub const MC_VARIANCE_REL: f64 = 0.05;
    /// Covariance decay-ratio identity, relative.
    pub const COV_IDENTITY_REL: f64 = 1e-12;
    /// Monte-Carlo covariance agreement band, standard errors.
    pub const MC_COV_SIGMA: f64 = 3.0;
}

/// Result of one named check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, run: impl FnOnce() -> Result<(bool, String)>) -> CheckOutcome {
    match run() {
        Ok((passed, detail)) => CheckOutcome {
            name,
            passed,
            detail,
        },
        Err(e) => CheckOutcome {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Run the full suite. `mc_trials` drives the mean/covariance checks,
/// `var_trials` the variance check (which needs a larger sample to resolve
/// the 5% band). Monte-Carlo checks use the density in `cfg`.
pub fn run_validation(
    cfg: &SystemConfig<f64>,
    mc_trials: u64,
    var_trials: u64,
) -> Vec<CheckOutcome> {
    let altitudes = [21.0, 30.0, 60.0, 90.0, 120.0];
    let mut outcomes = Vec::new();

    outcomes.push(check("ul mean: closed form vs quadrature", || {
        let mut worst = 0.0f64;
        for &h in &altitudes {
            let c = cfg.with_altitude(h);
            let closed = expected_i_ul(&c)?;
            let quad = quadrature_oracle_i_ul(&c, None)?;
            worst = worst.max(((closed - quad) / quad).abs());
        }
        Ok((
            worst <= tolerances::CLOSED_VS_QUADRATURE_REL,
            format!("worst relative gap {worst:.3e} over h in {altitudes:?}"),
        ))
    }));

    outcomes.push(check(
        "ul mean: branch continuity at the break boundary",
        || {
            let h_star = cfg.r0 / (cfg.los_kappa * cfg.los_kappa - 1.0).sqrt();
            let c = cfg.with_altitude(h_star);
            let (above, below) = ul_distance_bracket_cases(&c)?;
            let rel = ((above - below) / above).abs();
            Ok((
                rel <= tolerances::BRANCH_CONTINUITY_REL,
                format!("branches differ by {rel:.3e} at h = {h_star:.4}"),
            ))
        },
    ));

    outcomes.push(check("incomplete gamma vs quadrature", || {
        let mut worst = 0.0f64;
        for &s in &[0.0, -1.0, 1.0] {
            for &a in &[0.1, 0.8625, 5.0] {
                let direct = upper_incomplete_gamma(s, a)?;
                let f = |x: f64| x.powf(s - 1.0) * (-x).exp();
                let quad = integrate(&f, a, a + 80.0, 1e-12)?.value;
                worst = worst.max(((direct - quad) / quad).abs());
            }
        }
        Ok((
            worst <= tolerances::GAMMA_VS_QUADRATURE_REL,
            format!("worst relative gap {worst:.3e} over the (s, a) grid"),
        ))
    }));

    outcomes.push(check("incomplete gamma recurrence", || {
        let mut worst = 0.0f64;
        for &s in &[-1.0, 0.0, 1.0] {
            for &a in &[0.1f64, 0.8625, 5.0] {
                let lhs = upper_incomplete_gamma(s + 1.0, a)?;
                let rhs = s * upper_incomplete_gamma(s, a)? + a.powf(s) * (-a).exp();
                worst = worst.max(((lhs - rhs) / lhs).abs());
            }
        }
        Ok((
            worst <= tolerances::GAMMA_RECURRENCE_REL,
            format!("worst relative residual {worst:.3e}"),
        ))
    }));

    outcomes.push(check("field truncation gap below 1%", || {
        let mut worst = 0.0f64;
        for &h in &[30.0, 60.0, 120.0] {
            let c = cfg.with_altitude(h);
            let ul_inf = quadrature_oracle_i_ul(&c, None)?;
            let ul_cut = quadrature_oracle_i_ul(&c, Some(cfg.r_max))?;
            worst = worst.max(((ul_inf - ul_cut) / ul_inf).abs());
            let dl_inf = expected_i_dl_truncated(&c, None)?;
            let dl_cut = expected_i_dl_truncated(&c, Some(cfg.r_max))?;
            worst = worst.max(((dl_inf - dl_cut) / dl_inf).abs());
        }
        Ok((
            worst <= tolerances::TRUNCATION_GAP_MAX,
            format!("worst truncation gap {worst:.3e} at r_max = {}", cfg.r_max),
        ))
    }));

    outcomes.push(check("mc means vs truncated oracles", || {
        let mut detail = String::new();
        let mut pass = true;
        for &h in &[30.0, 60.0, 120.0] {
            let c = cfg.with_altitude(h);
            let samples = collect_snapshots(&c, 30.0, mc_trials, cfg.seed)?;
            let (mean_ul, se_ul) = mean_ul_with_se(&samples);
            let (mean_dl, se_dl) = mean_dl_with_se(&samples);
            let oracle_ul = quadrature_oracle_i_ul(&c, Some(cfg.r_max))?;
            let oracle_dl = expected_i_dl_truncated(&c, Some(cfg.r_max))?;
            let z_ul = (mean_ul - oracle_ul).abs() / se_ul;
            let z_dl = (mean_dl - oracle_dl).abs() / se_dl;
            pass &= z_ul <= tolerances::MC_MEAN_SIGMA && z_dl <= tolerances::MC_MEAN_SIGMA;
            detail.push_str(&format!("h={h}: z_ul={z_ul:.2} z_dl={z_dl:.2}; "));
        }
        detail.push_str(&format!("{mc_trials} trials"));
        Ok((pass, detail))
    }));

    outcomes.push(check("mc dl variance vs closed form", || {
        let samples = collect_snapshots(cfg, 30.0, var_trials, cfg.seed)?;
        let (var_mc, _) = var_dl_with_se(&samples);
        let var_closed = var_i_dl_truncated(cfg, Some(cfg.r_max))?;
        let rel = ((var_mc - var_closed) / var_closed).abs();
        Ok((
            rel <= tolerances::MC_VARIANCE_REL,
            format!("relative gap {rel:.4} over {var_trials} trials"),
        ))
    }));

    outcomes.push(check("covariance decay identity", || {
        let mut worst = 0.0f64;
        for &d in &[10.0, 30.0, 100.0] {
            let lhs = cov_ul_dl(cfg, d)? / cov_ul_dl(cfg, 0.0)?;
            let xi = (-cfg.k0 * d).exp();
            let rhs = (cfg.sigma0_sq * xi).exp_m1() / cfg.sigma0_sq.exp_m1();
            worst = worst.max(((lhs - rhs) / rhs).abs());
        }
        Ok((
            worst <= tolerances::COV_IDENTITY_REL,
            format!("worst relative residual {worst:.3e}"),
        ))
    }));

    outcomes.push(check("mc covariance at zero separation", || {
        let samples = collect_snapshots(cfg, 0.0, mc_trials, cfg.seed)?;
        let est = cov_estimate_from(&samples);
        let reference = cov_ul_dl_truncated(cfg, 0.0, Some(cfg.r_max))?;
        let z = (est.cov - reference).abs() / est.se;
        Ok((
            z <= tolerances::MC_COV_SIGMA,
            format!("z = {z:.2} over {mc_trials} trials"),
        ))
    }));

    outcomes.push(check("asymmetry ratio structure", || {
        let ms = moment_set(cfg, 30.0)?;
        let gap_linear =
            1.0 + ms.var_i_dl / (ms.e_i_dl * ms.e_i_dl) - ms.cov / (ms.e_i_ul * ms.e_i_dl);
        let direct = ms.rho_closed / (ms.e_i_ul / ms.e_i_dl);
        let rel = ((gap_linear - direct) / direct).abs();
        let gap_db = 10.0 * gap_linear.log10();
        Ok((
            rel <= 1e-12 && gap_db > 0.0,
            format!("ratio-to-mean gap {gap_db:.3} dB, identity residual {rel:.2e}"),
        ))
    }));

    outcomes
}
