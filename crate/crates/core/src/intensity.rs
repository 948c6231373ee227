//! Correlated interferer node densities at the two observation points
//! (UAV for uplink, remote controller for downlink), modeled as a bivariate
//! log-Gaussian Cox process.
//!
//! The log-densities are jointly Gaussian with common mean `mu0`, common
//! variance `sigma0_sq`, and correlation `exp(−k0·d)` where `d` is the 2-D
//! UAV–controller separation. Only the pair of observation points is ever
//! evaluated, so sampling reduces to a 2×2 Cholesky factor.

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Parameters of the log-Gaussian node-density model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LgcpParams<T> {
    lambda_bar: T,
    sigma0_sq: T,
    k0: T,
    mu0: T,
}

impl<T: Real> LgcpParams<T> {
    /// Build from the mean density `lambda_bar` (nodes/m²), log-variance
    /// `sigma0_sq`, and correlation decay rate `k0` (1/m). The Gaussian mean
    /// is derived so the lognormal mean equals `lambda_bar`.
    pub fn new(lambda_bar: T, sigma0_sq: T, k0: T) -> Result<Self> {
        if !(sigma0_sq >= T::zero()) || !sigma0_sq.is_finite() {
            return Err(Error::domain(format!(
                "sigma0_sq must be finite and >= 0, got {sigma0_sq}"
            )));
        }
        if !(k0 >= T::zero()) || !k0.is_finite() {
            return Err(Error::domain(format!(
                "k0 must be finite and >= 0, got {k0}"
            )));
        }
        let mu0 = mu0_from_mean(lambda_bar, sigma0_sq)?;
        Ok(Self {
            lambda_bar,
            sigma0_sq,
            k0,
            mu0,
        })
    }

    pub fn lambda_bar(&self) -> T {
        self.lambda_bar
    }

    pub fn sigma0_sq(&self) -> T {
        self.sigma0_sq
    }

    pub fn k0(&self) -> T {
        self.k0
    }

    /// Mean of the underlying Gaussian process, `ln(lambda_bar) − sigma0_sq/2`.
    pub fn mu0(&self) -> T {
        self.mu0
    }
}

/// One draw of the correlated density pair, nodes/m². Both components are
/// strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityPair<T> {
    pub lambda_ul: T,
    pub lambda_dl: T,
}

/// Correlation of the two log-densities at 2-D separation `d`: `exp(−k0·d)`.
///
/// Equals 1 at `d = 0` and decays strictly for `k0 > 0`.
pub fn spatial_correlation<T: Real>(d: T, k0: T) -> Result<T> {
    if !(d >= T::zero()) {
        return Err(Error::domain(format!("distance must be >= 0, got {d}")));
    }
    if !(k0 >= T::zero()) || !k0.is_finite() {
        return Err(Error::domain(format!(
            "k0 must be finite and >= 0, got {k0}"
        )));
    }
    Ok((-k0 * d).exp())
}

/// Gaussian mean that makes the lognormal mean equal `lambda_bar`:
/// `ln(lambda_bar) − sigma0_sq/2`.
pub fn mu0_from_mean<T: Real>(lambda_bar: T, sigma0_sq: T) -> Result<T> {
    if !(lambda_bar > T::zero()) || !lambda_bar.is_finite() {
        return Err(Error::domain(format!(
            "lambda_bar must be finite and > 0, got {lambda_bar}"
        )));
    }
    Ok(lambda_bar.ln() - sigma0_sq / T::of(2.0))
}

/// Mean node density `exp(mu0 + sigma0_sq/2)`; recovers `lambda_bar`.
pub fn mean_intensity<T: Real>(params: &LgcpParams<T>) -> T {
    (params.mu0 + params.sigma0_sq / T::of(2.0)).exp()
}

/// Second moment of either density: `lambda_bar² · exp(sigma0_sq)`.
pub fn intensity_second_moment<T: Real>(params: &LgcpParams<T>) -> T {
    params.lambda_bar * params.lambda_bar * params.sigma0_sq.exp()
}

/// Cross moment of the pair at separation `d`:
/// `lambda_bar² · exp(sigma0_sq · ξ(d))`.
///
/// Reduces to the second moment at `d = 0` and to `lambda_bar²` as the
/// correlation dies off.
pub fn intensity_cross_moment<T: Real>(params: &LgcpParams<T>, d: T) -> Result<T> {
    let xi = spatial_correlation(d, params.k0)?;
    Ok(params.lambda_bar * params.lambda_bar * (params.sigma0_sq * xi).exp())
}

/// Draw one correlated density pair at separation `d`.
///
/// The bivariate Gaussian is sampled through its 2×2 Cholesky factor, so a
/// correlation of exactly 1 yields bit-identical components and zero
/// variance collapses to the deterministic mean.
pub fn sample_intensity_pair<T: Real, R: Rng + ?Sized>(
    params: &LgcpParams<T>,
    d: T,
    rng: &mut R,
) -> Result<IntensityPair<T>> {
    let xi = spatial_correlation(d, params.k0)?;
    let sigma0 = params.sigma0_sq.sqrt();
    let z1 = T::standard_normal(rng);
    let z2 = T::standard_normal(rng);
    let residual = (T::one() - xi * xi).max(T::zero()).sqrt();
    let g_ul = params.mu0 + sigma0 * z1;
    let g_dl = params.mu0 + sigma0 * (xi * z1 + residual * z2);
    Ok(IntensityPair {
        lambda_ul: g_ul.exp(),
        lambda_dl: g_dl.exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn table_params() -> LgcpParams<f64> {
        LgcpParams::new(0.02, 1.0, 0.05).unwrap()
    }

    #[test]
    fn correlation_reference_points() {
        assert_eq!(spatial_correlation(0.0, 0.05).unwrap(), 1.0);
        assert_eq!(spatial_correlation(30.0, 0.0).unwrap(), 1.0);
        // exp(−1.5), 18 digits
        assert_relative_eq!(
            spatial_correlation(30.0, 0.05).unwrap(),
            0.223_130_160_148_429_83,
            max_relative = 1e-14
        );
    }

    #[test]
    fn correlation_rejects_negative_inputs() {
        assert!(spatial_correlation(-1.0, 0.05).is_err());
        assert!(spatial_correlation(1.0, -0.05).is_err());
        assert!(spatial_correlation(f64::NAN, 0.05).is_err());
    }

    #[test]
    fn mu0_reference_points() {
        assert_eq!(mu0_from_mean(1.0, 0.0).unwrap(), 0.0);
        // ln(0.02) − 0.5
        assert_relative_eq!(
            mu0_from_mean(0.02, 1.0).unwrap(),
            -4.412_023_005_428_146,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            mu0_from_mean(std::f64::consts::E, 2.0).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert!(mu0_from_mean(0.0, 1.0).is_err());
        assert!(mu0_from_mean(-0.5, 1.0).is_err());
    }

    #[test]
    fn mean_intensity_recovers_lambda_bar() {
        let degenerate = LgcpParams::new(1.0, 0.0, 0.05).unwrap();
        assert_relative_eq!(mean_intensity(&degenerate), 1.0, max_relative = 1e-15);
        assert_relative_eq!(mean_intensity(&table_params()), 0.02, max_relative = 1e-14);
    }

    #[test]
    fn second_moment_reference_points() {
        let deterministic = LgcpParams::new(0.02, 0.0, 0.05).unwrap();
        assert_relative_eq!(
            intensity_second_moment(&deterministic),
            4e-4,
            max_relative = 1e-15
        );
        // 4e−4 · e
        assert_relative_eq!(
            intensity_second_moment(&table_params()),
            1.087_312_731_383_618_1e-3,
            max_relative = 1e-14
        );
        let unit = LgcpParams::new(1.0, 2.0, 0.05).unwrap();
        assert_relative_eq!(
            intensity_second_moment(&unit),
            7.389_056_098_930_65,
            max_relative = 1e-14
        );
    }

    #[test]
    fn cross_moment_reference_points() {
        let p = table_params();
        assert_eq!(
            intensity_cross_moment(&p, 0.0).unwrap(),
            intensity_second_moment(&p)
        );
        // ξ → 0 gives independence
        assert_relative_eq!(
            intensity_cross_moment(&p, 1e12).unwrap(),
            4e-4,
            max_relative = 1e-14
        );
        // 4e−4 · exp(exp(−1.5))
        assert_relative_eq!(
            intensity_cross_moment(&p, 30.0).unwrap(),
            4.999_933_044_619_407e-4,
            max_relative = 1e-13
        );
        assert!(intensity_cross_moment(&p, -1.0).is_err());
    }

    #[test]
    fn zero_variance_sampling_is_deterministic() {
        let p = LgcpParams::new(0.02, 0.0, 0.05).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let pair = sample_intensity_pair(&p, 17.0, &mut rng).unwrap();
            assert_relative_eq!(pair.lambda_ul, 0.02, max_relative = 1e-14);
            assert_eq!(pair.lambda_ul, pair.lambda_dl);
        }
    }

    #[test]
    fn full_correlation_gives_bit_identical_components() {
        let p = table_params();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let pair = sample_intensity_pair(&p, 0.0, &mut rng).unwrap();
            assert_eq!(pair.lambda_ul.to_bits(), pair.lambda_dl.to_bits());
            assert!(pair.lambda_ul > 0.0);
        }
    }

    #[test]
    fn sample_mean_matches_lambda_bar_within_three_se() {
        let p = table_params();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 200_000usize;
        let (mut sum_ul, mut sum_dl, mut sumsq_ul) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let pair = sample_intensity_pair(&p, 50.0, &mut rng).unwrap();
            sum_ul += pair.lambda_ul;
            sum_dl += pair.lambda_dl;
            sumsq_ul += pair.lambda_ul * pair.lambda_ul;
        }
        let nf = n as f64;
        let mean_ul = sum_ul / nf;
        let mean_dl = sum_dl / nf;
        let se = ((sumsq_ul / nf - mean_ul * mean_ul) / nf).sqrt();
        assert!(
            (mean_ul - 0.02).abs() <= 3.0 * se,
            "mean_ul {mean_ul} se {se}"
        );
        assert!(
            (mean_dl - 0.02).abs() <= 3.0 * se,
            "mean_dl {mean_dl} se {se}"
        );
    }

    #[test]
    fn log_correlation_matches_model_within_three_se() {
        let p = table_params();
        for (case, d) in [0.0, 10.0, 50.0, 200.0].into_iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + case as u64);
            let n = 150_000usize;
            let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for _ in 0..n {
                let pair = sample_intensity_pair(&p, d, &mut rng).unwrap();
                let x = pair.lambda_ul.ln();
                let y = pair.lambda_dl.ln();
                sx += x;
                sy += y;
                sxx += x * x;
                syy += y * y;
                sxy += x * y;
            }
            let nf = n as f64;
            let cov = sxy / nf - (sx / nf) * (sy / nf);
            let vx = sxx / nf - (sx / nf) * (sx / nf);
            let vy = syy / nf - (sy / nf) * (sy / nf);
            let r = cov / (vx * vy).sqrt();
            let xi = spatial_correlation(d, 0.05).unwrap();
            // Fisher-style SE for a correlation estimate.
            let se = (1.0 - xi * xi) / nf.sqrt();
            let tol = 3.0 * se + 1e-12;
            assert!(
                (r - xi).abs() <= tol,
                "d = {d}: empirical {r} vs model {xi} (tol {tol})"
            );
        }
    }

    proptest! {
        #[test]
        fn cross_moment_bounded_by_second_moment(
            lambda in 1e-4_f64..1.0,
            sigma_sq in 0.0_f64..3.0,
            k0 in 1e-4_f64..1.0,
            d in 0.0_f64..500.0,
        ) {
            let p = LgcpParams::new(lambda, sigma_sq, k0).unwrap();
            let cross = intensity_cross_moment(&p, d).unwrap();
            let second = intensity_second_moment(&p);
            prop_assert!(cross <= second);
            if d > 1e-3 && sigma_sq > 1e-3 {
                prop_assert!(cross < second);
            }
        }

        #[test]
        fn correlation_stays_in_unit_interval(k0 in 0.0_f64..2.0, d in 0.0_f64..1e4) {
            let xi = spatial_correlation(d, k0).unwrap();
            prop_assert!((0.0..=1.0).contains(&xi));
            // strictly positive until the argument underflows
            if k0 * d < 700.0 {
                prop_assert!(xi > 0.0);
            }
        }
    }
}
