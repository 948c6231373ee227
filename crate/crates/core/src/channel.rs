//! Air-to-ground channel: line-of-sight probability (exact building-grid
//! product and break-point approximation), free-space path gain with a
//! configurable exponent, and Rayleigh small-scale fading draws.

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::units::SPEED_OF_LIGHT;

/// Environment parameters of the LoS probability models.
///
/// `gamma`, `delta`, `beta` drive the exact building-grid product:
/// `gamma` is the building height scale in meters, `delta` the built-up
/// area ratio, and `beta` the building density per m² (so 5e-4 corresponds
/// to 500 buildings per km²). `mu` and `kappa` are the break-point fit
/// parameters; the defaults model dense urban deployments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LosEnvParams<T> {
    pub gamma: T,
    pub delta: T,
    pub beta: T,
    pub mu: T,
    pub kappa: T,
}

impl<T: Real> Default for LosEnvParams<T> {
    fn default() -> Self {
        Self {
            gamma: T::of(15.0),
            delta: T::of(0.3),
            beta: T::of(5e-4),
            mu: T::of(0.625),
            kappa: T::of(1.38),
        }
    }
}

/// Radio constants of one link direction. Gains are linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget<T> {
    /// Transmit power, W.
    pub p_tx: T,
    /// Transmit antenna gain, linear.
    pub g_tx: T,
    /// Receive antenna gain, linear.
    pub g_rx: T,
    /// Carrier frequency, Hz.
    pub freq: T,
}

impl<T: Real> LinkBudget<T> {
    /// Unit gains and unit power; handy for kernel-level checks.
    pub fn unit(freq: T) -> Self {
        Self {
            p_tx: T::one(),
            g_tx: T::one(),
            g_rx: T::one(),
            freq,
        }
    }

    /// Distance-independent path-gain amplitude
    /// `p_tx·g_tx·g_rx·c² / ((4π)²·f²)`, so that the gain at range `r`
    /// with exponent `eta` is `amplitude / r^eta`.
    pub fn amplitude(&self) -> T {
        let c = T::of(SPEED_OF_LIGHT);
        let four_pi = T::of(4.0) * T::PI();
        self.p_tx * self.g_tx * self.g_rx * c * c / (four_pi * four_pi * self.freq * self.freq)
    }

    /// Ring-integral prefactor `2π · amplitude` that multiplies every
    /// Campbell-theorem expectation over an isotropic interferer field.
    pub fn campbell_prefactor(&self) -> T {
        T::of(2.0) * T::PI() * self.amplitude()
    }
}

/// `r^{−eta}` with fast paths for the common integer exponents.
pub(crate) fn inverse_power<T: Real>(r: T, eta: T) -> T {
    if eta == T::of(2.0) {
        (r * r).recip()
    } else if eta == T::of(3.0) {
        (r * r * r).recip()
    } else if eta == T::of(4.0) {
        let r2 = r * r;
        (r2 * r2).recip()
    } else {
        r.powf(-eta)
    }
}

/// Exact altitude-dependent LoS probability over a statistical building
/// grid: product over the buildings crossed by the ground projection of
/// the slant path. Returns 1 when the path crosses no building
/// (`r·sqrt(delta·beta) < 1`).
pub fn los_probability_exact<T: Real>(h: T, r: T, env: &LosEnvParams<T>) -> Result<T> {
    if !(h > T::zero()) || !h.is_finite() {
        return Err(Error::domain(format!("altitude must be positive, got {h}")));
    }
    if !(r >= T::zero()) || !r.is_finite() {
        return Err(Error::domain(format!(
            "ground distance must be >= 0, got {r}"
        )));
    }
    let crossings = r * (env.delta * env.beta).sqrt() - T::one();
    if crossings < T::zero() {
        return Ok(T::one());
    }
    let m = crossings
        .floor()
        .to_u64()
        .ok_or_else(|| Error::domain(format!("building count overflow at r = {r}")))?;
    let count = T::of((m + 1) as f64);
    let two_gamma_sq = T::of(2.0) * env.gamma * env.gamma;
    let mut product = T::one();
    for n in 0..=m {
        let height = h - (T::of(n as f64) + T::of(0.5)) * h / count;
        product *= T::one() - (-(height * height) / two_gamma_sq).exp();
    }
    Ok(product)
}

/// Break-point LoS probability over 3-D distance: 1 out to the break
/// distance `kappa·h`, exponential decay `exp(−(mu/h)(r_3d − kappa·h))`
/// beyond it. Both branches agree at the break distance.
pub fn los_probability_breakpoint<T: Real>(
    r_3d: T,
    h: T,
    env: &LosEnvParams<T>,
    r_min_3d: T,
) -> Result<T> {
    if !(h > T::zero()) || !h.is_finite() {
        return Err(Error::domain(format!("altitude must be positive, got {h}")));
    }
    if !(r_min_3d > T::zero()) {
        return Err(Error::domain(format!(
            "minimum 3-D distance must be positive, got {r_min_3d}"
        )));
    }
    if !(r_3d >= r_min_3d) {
        return Err(Error::domain(format!(
            "3-D distance {r_3d} below minimum {r_min_3d}"
        )));
    }
    let break_distance = env.kappa * h;
    if r_3d <= break_distance {
        Ok(T::one())
    } else {
        Ok((-(env.mu / h) * (r_3d - break_distance)).exp())
    }
}

/// Free-space path gain with exponent `eta`:
/// `p_tx·g_tx·g_rx·c² / ((4π)²·f²·r^eta)`.
pub fn path_gain<T: Real>(r: T, eta: T, budget: &LinkBudget<T>) -> Result<T> {
    if !(r > T::zero()) {
        return Err(Error::domain(format!("range must be positive, got {r}")));
    }
    Ok(budget.amplitude() * inverse_power(r, eta))
}

/// Unit-mean exponential power fading (Rayleigh amplitude).
pub fn sample_fading<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::unit_exponential(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn urban() -> LosEnvParams<f64> {
        LosEnvParams::default()
    }

    #[test]
    fn exact_empty_product_is_one() {
        // r·sqrt(delta·beta) < 1 → no buildings crossed
        let p = los_probability_exact(60.0, 50.0, &urban()).unwrap();
        assert_eq!(p, 1.0);
        assert_eq!(los_probability_exact(60.0, 0.0, &urban()).unwrap(), 1.0);
    }

    #[test]
    fn exact_is_probability_and_monotone_in_r() {
        let p500 = los_probability_exact(60.0, 500.0, &urban()).unwrap();
        assert!(p500 > 0.0 && p500 < 1.0, "got {p500}");
        let mut prev = 1.0;
        for i in 0..200 {
            let r = 10.0 * i as f64;
            let p = los_probability_exact(60.0, r, &urban()).unwrap();
            assert!(
                p <= prev + 1e-15,
                "not non-increasing at r = {r}: {p} > {prev}"
            );
            prev = p;
        }
    }

    #[test]
    fn exact_tends_to_one_at_high_altitude() {
        let p = los_probability_exact(1e9, 500.0, &urban()).unwrap();
        assert!((p - 1.0).abs() < 1e-9, "got {p}");
    }

    #[test]
    fn exact_rejects_bad_altitude() {
        assert!(los_probability_exact(0.0, 10.0, &urban()).is_err());
        assert!(los_probability_exact(-5.0, 10.0, &urban()).is_err());
        assert!(los_probability_exact(60.0, -1.0, &urban()).is_err());
    }

    #[test]
    fn breakpoint_reference_points() {
        let env = urban();
        // at the break distance both branches give 1
        assert_eq!(
            los_probability_breakpoint(1.38 * 60.0, 60.0, &env, 1.0).unwrap(),
            1.0
        );
        // inside the break region
        assert_eq!(
            los_probability_breakpoint(50.0, 60.0, &env, 1.0).unwrap(),
            1.0
        );
        // exp(−0.625·82.8/60)
        assert_relative_eq!(
            los_probability_breakpoint(2.0 * 1.38 * 60.0, 60.0, &env, 1.0).unwrap(),
            0.422_105_498_392_165_5,
            max_relative = 1e-13
        );
        assert!(los_probability_breakpoint(0.5, 60.0, &env, 1.0).is_err());
    }

    #[test]
    fn breakpoint_vs_exact_shape() {
        // Both curves non-increasing over 3-D distance, and their
        // half-probability crossings stay within a factor of two of each
        // other, for each altitude.
        let env = urban();
        for &h in &[30.0_f64, 60.0, 120.0] {
            let r0_3d = (h * h + 400.0).sqrt();
            let upper = 10.0 * env.kappa * h;
            let n = 4000;
            let mut prev_bp = f64::INFINITY;
            let mut prev_ex = f64::INFINITY;
            let mut cross_bp = None;
            let mut cross_ex = None;
            for i in 0..=n {
                let r3d = r0_3d + (upper - r0_3d) * i as f64 / n as f64;
                let bp = los_probability_breakpoint(r3d, h, &env, r0_3d).unwrap();
                let ground = (r3d * r3d - h * h).max(0.0).sqrt();
                let ex = los_probability_exact(h, ground, &env).unwrap();
                assert!(bp <= prev_bp + 1e-12, "breakpoint slope flips at h = {h}");
                assert!(ex <= prev_ex + 1e-12, "exact slope flips at h = {h}");
                if cross_bp.is_none() && bp < 0.5 {
                    cross_bp = Some(r3d);
                }
                if cross_ex.is_none() && ex < 0.5 {
                    cross_ex = Some(r3d);
                }
                prev_bp = bp;
                prev_ex = ex;
            }
            let (cb, ce) = (cross_bp.unwrap(), cross_ex.unwrap());
            let ratio = cb / ce;
            assert!(
                (0.5..=2.0).contains(&ratio),
                "h = {h}: decay onset mismatch, breakpoint {cb} vs exact {ce}"
            );
        }
    }

    #[test]
    fn breakpoint_monotone_in_altitude() {
        let env = urban();
        let r3d = 300.0;
        let mut prev = 0.0;
        for &h in &[20.0, 40.0, 60.0, 80.0, 100.0, 150.0] {
            let p = los_probability_breakpoint(r3d, h, &env, 1.0).unwrap();
            assert!(p >= prev, "not non-decreasing in h at h = {h}");
            prev = p;
        }
    }

    #[test]
    fn path_gain_unit_distance_kernel() {
        let budget = LinkBudget::unit(3.5e9);
        // c²/((4π)²·f²) at 3.5 GHz
        assert_relative_eq!(
            path_gain(1.0, 2.0, &budget).unwrap(),
            4.646_068_291_545_674e-5,
            max_relative = 1e-13
        );
    }

    #[test]
    fn path_gain_inverse_square_scaling() {
        let budget = LinkBudget::unit(3.5e9);
        let g1 = path_gain(100.0, 2.0, &budget).unwrap();
        let g2 = path_gain(200.0, 2.0, &budget).unwrap();
        assert_relative_eq!(g1 / g2, 4.0, max_relative = 1e-12);
    }

    #[test]
    fn path_gain_table_values_match_db_domain_route() {
        // Interferer-to-UAV link at 3.5 GHz with 3 dBi / 6 dBi gains, 0.1 W,
        // r = 100 m, eta = 3; cross-checked by summing the dB terms.
        let budget = LinkBudget {
            p_tx: 0.1,
            g_tx: 10f64.powf(0.3),
            g_rx: 10f64.powf(0.6),
            freq: 3.5e9,
        };
        let linear = path_gain(100.0, 3.0, &budget).unwrap();
        let fspl_1m_db = 20.0 * (4.0 * std::f64::consts::PI * 3.5e9 / 299_792_458.0).log10();
        let db = -10.0 + 3.0 + 6.0 - fspl_1m_db - 30.0 * 100f64.log10();
        assert_relative_eq!(10.0 * linear.log10(), db, epsilon = 1e-10);
        // and against the Campbell prefactor route: beta_UL/(2π)·r^{−3}
        assert_relative_eq!(
            linear,
            budget.campbell_prefactor() / (2.0 * std::f64::consts::PI) * 100f64.powi(-3),
            max_relative = 1e-13
        );
    }

    #[test]
    fn path_gain_rejects_nonpositive_range() {
        let budget = LinkBudget::unit(3.5e9);
        assert!(path_gain(0.0, 2.0, &budget).is_err());
        assert!(path_gain(-1.0, 2.0, &budget).is_err());
    }

    #[test]
    fn fading_moments_within_three_se() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000usize;
        let (mut s1, mut s2, mut s4, mut below_median) = (0.0, 0.0, 0.0, 0u64);
        let ln2 = std::f64::consts::LN_2;
        for _ in 0..n {
            let h: f64 = sample_fading(&mut rng);
            s1 += h;
            s2 += h * h;
            s4 += h * h * h * h;
            if h <= ln2 {
                below_median += 1;
            }
        }
        let nf = n as f64;
        let mean = s1 / nf;
        // exp(1): Var = 1, Var(h²) = E{h⁴} − E{h²}² = 24 − 4 = 20
        let se_mean = (1.0 / nf).sqrt();
        assert!((mean - 1.0).abs() <= 3.0 * se_mean, "mean {mean}");
        let m2 = s2 / nf;
        let se_m2 = ((s4 / nf - m2 * m2) / nf).sqrt();
        assert!((m2 - 2.0).abs() <= 3.0 * se_m2, "second moment {m2}");
        let frac = below_median as f64 / nf;
        let se_frac = (0.25 / nf).sqrt();
        assert!(
            (frac - 0.5).abs() <= 3.0 * se_frac,
            "median fraction {frac}"
        );
    }

    proptest! {
        #[test]
        fn gain_times_power_law_is_constant(
            r in 1.0_f64..5000.0,
            eta in 2.0_f64..5.0,
        ) {
            let budget = LinkBudget::unit(3.5e9);
            let g = path_gain(r, eta, &budget).unwrap();
            prop_assert!((g * r.powf(eta) / budget.amplitude() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn breakpoint_never_leaves_unit_interval(
            r3d in 1.0_f64..10_000.0,
            h in 1.0_f64..500.0,
        ) {
            let p = los_probability_breakpoint(r3d, h, &urban(), 1.0).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
            // strictly positive until the decay argument underflows
            if 0.625 * (r3d - 1.38 * h) / h < 700.0 {
                prop_assert!(p > 0.0);
            }
        }
    }
}
