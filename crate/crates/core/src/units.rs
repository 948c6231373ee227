//! dB/linear conversions. Internal math stays linear; dB only at the edges.

use crate::scalar::Real;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn db_to_linear<T: Real>(db: T) -> T {
    T::of(10.0).powf(db / T::of(10.0))
}

pub fn linear_to_db<T: Real>(x: T) -> T {
    T::of(10.0) * x.log10()
}

/// Power in watts to dBm: `10 log10(W) + 30`.
pub fn watts_to_dbm<T: Real>(w: T) -> T {
    linear_to_db(w) + T::of(30.0)
}

pub fn dbm_to_watts<T: Real>(dbm: T) -> T {
    db_to_linear(dbm - T::of(30.0))
}
