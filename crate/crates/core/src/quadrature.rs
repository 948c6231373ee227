//! Adaptive Simpson quadrature, used as the independent numerical route
//! against which the closed-form expressions are checked.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult<T> {
    pub value: T,
    /// Accumulated local error bound (conservative).
    pub error_estimate: T,
    pub evaluations: u64,
}

const MAX_DEPTH: u32 = 60;

/// Integrate `f` over `[a, b]` to the requested relative tolerance.
///
/// A coarse composite pass fixes the magnitude, then adaptive Simpson with
/// Richardson correction refines until the per-interval error bound meets
/// the absolute budget derived from that magnitude.
pub fn integrate<T: Real, F: Fn(T) -> T>(
    f: &F,
    a: T,
    b: T,
    rel_tol: T,
) -> Result<QuadratureResult<T>> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain(
            "integration bounds must be finite".to_string(),
        ));
    }
    if b < a {
        return Err(Error::domain(format!("inverted bounds: [{a}, {b}]")));
    }
    if !(rel_tol > T::zero()) {
        return Err(Error::domain(
            "relative tolerance must be positive".to_string(),
        ));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: T::zero(),
            error_estimate: T::zero(),
            evaluations: 0,
        });
    }

    // Coarse 32-panel composite Simpson for the magnitude estimate.
    let panels = 32usize;
    let h = (b - a) / T::of(panels as f64);
    let mut coarse = T::zero();
    let mut evaluations: u64 = 0;
    for i in 0..panels {
        let x0 = a + h * T::of(i as f64);
        let x1 = x0 + h;
        let xm = x0 + h * T::of(0.5);
        coarse += simpson(x0, x1, f(x0), f(xm), f(x1));
        evaluations += 3;
    }
    let scale = coarse.abs().max(T::min_positive_value());
    let abs_budget = (rel_tol * scale).max(T::min_positive_value());

    let fa = f(a);
    let fb = f(b);
    let mid = (a + b) * T::of(0.5);
    let fm = f(mid);
    evaluations += 3;
    for (x, v) in [(a, fa), (mid, fm), (b, fb)] {
        if !v.is_finite() {
            return Err(Error::numeric(format!("integrand not finite at x = {x}")));
        }
    }
    let whole = simpson(a, b, fa, fm, fb);
    let mut err_acc = T::zero();
    let value = adapt(
        f,
        a,
        mid,
        b,
        fa,
        fm,
        fb,
        whole,
        abs_budget,
        MAX_DEPTH,
        &mut evaluations,
        &mut err_acc,
    )?;
    Ok(QuadratureResult {
        value,
        error_estimate: err_acc,
        evaluations,
    })
}

fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::of(6.0) * (fa + T::of(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<T: Real, F: Fn(T) -> T>(
    f: &F,
    a: T,
    m: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    budget: T,
    depth: u32,
    evaluations: &mut u64,
    err_acc: &mut T,
) -> Result<T> {
    let lm = (a + m) * T::of(0.5);
    let rm = (m + b) * T::of(0.5);
    let flm = f(lm);
    let frm = f(rm);
    *evaluations += 2;
    if !flm.is_finite() || !frm.is_finite() {
        return Err(Error::numeric(format!(
            "integrand not finite inside [{a}, {b}]"
        )));
    }
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;

    // Interval too narrow to split further: accept the refined estimate.
    let degenerate = lm <= a || rm <= m || m <= lm || b <= rm;

    if delta.abs() <= T::of(15.0) * budget || degenerate {
        *err_acc += delta.abs() / T::of(15.0);
        return Ok(left + right + delta / T::of(15.0));
    }
    if depth == 0 {
        return Err(Error::numeric(format!(
            "quadrature did not converge on [{a}, {b}] (residual {delta}, budget {budget})"
        )));
    }
    let half_budget = budget * T::of(0.5);
    let l = adapt(
        f,
        a,
        lm,
        m,
        fa,
        flm,
        fm,
        left,
        half_budget,
        depth - 1,
        evaluations,
        err_acc,
    )?;
    let r = adapt(
        f,
        m,
        rm,
        b,
        fm,
        frm,
        fb,
        right,
        half_budget,
        depth - 1,
        evaluations,
        err_acc,
    )?;
    Ok(l + r)
}
