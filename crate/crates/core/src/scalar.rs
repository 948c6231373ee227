//! Scalar abstraction: the toolkit's math is generic over `f32`/`f64`.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal, StandardUniform};

/// Floating-point scalar the core math is written against.
///
/// Besides the usual numeric traits this bundles the random draws the
/// Monte-Carlo engine needs, so generic code can sample without dragging
/// distribution bounds through every signature.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Draw from the standard normal distribution.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Draw from the unit-mean exponential distribution.
    fn unit_exponential<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Draw uniformly from `[0, 1)`.
    fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Draw a Poisson count with the given positive finite mean.
    fn poisson<R: Rng + ?Sized>(rng: &mut R, mean: Self) -> u64;

    /// Convert an `f64` constant into this scalar type.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("constant not representable in scalar type")
    }
}

macro_rules! impl_real {
    ($($t:ty)*) => {$(
        impl Real for $t {
            fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardNormal.sample(rng)
            }

            fn unit_exponential<R: Rng + ?Sized>(rng: &mut R) -> Self {
                Exp1.sample(rng)
            }

            fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardUniform.sample(rng)
            }

            fn poisson<R: Rng + ?Sized>(rng: &mut R, mean: Self) -> u64 {
                let draw: $t = Poisson::new(mean)
                    .expect("poisson mean must be positive and finite")
                    .sample(rng);
                draw as u64
            }
        }
    )*};
}

impl_real!(f32 f64);
