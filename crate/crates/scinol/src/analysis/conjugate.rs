//! Fenchel conjugates of the potential shapes, with closed-form bounds and
//! a numeric supremum oracle to validate them.
//!
//! The regret bounds arise from f*(u) = sup_x {ux − f(x)} applied to
//! f₁(x) = α(e^{|x|/γ} − |x|/γ − 1) and f₂(x) = αe^{|x|/γ}. Both conjugates
//! are maximized at a single point on x ≥ 0 (the objectives are concave
//! there), so golden-section search recovers the supremum numerically.

use crate::error::{Error, Result};

/// Golden-section search for the maximum of a unimodal f on [lo, hi].
/// Returns (argmax, max). The interval shrinks below tol before stopping.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    debug_assert!(lo <= hi && tol > 0.0);
    let mut c = hi - INVPHI * (hi - lo);
    let mut d = lo + INVPHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > tol {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INVPHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INVPHI * (hi - lo);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

fn check_params(alpha: f64, gamma: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "alpha must be a positive finite number, got {alpha}"
        )));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "gamma must be a positive finite number, got {gamma}"
        )));
    }
    Ok(())
}

/// Conjugate of f₁(x) = α(e^{|x|/γ} − |x|/γ − 1): returns the exact value
/// (|u|γ+α)ln(1+|u|γ/α) − |u|γ and the looser bound |u|γ·ln(1+|u|γ/α),
/// as (exact, bound).
pub fn fenchel_bound_1(u: f64, alpha: f64, gamma: f64) -> Result<(f64, f64)> {
    check_params(alpha, gamma)?;
    if !u.is_finite() {
        return Err(Error::NonFinite { what: "conjugate argument" });
    }
    if u == 0.0 {
        return Ok((0.0, 0.0));
    }
    let ug = u.abs() * gamma;
    let log_term = (ug / alpha).ln_1p();
    Ok(((ug + alpha) * log_term - ug, ug * log_term))
}

/// Upper bound |u|γ(ln(|u|γ/α) − 1) on the conjugate of f₂(x) = αe^{|x|/γ};
/// exact whenever |u|γ ≥ α, and 0 at u = 0 by the limit convention.
pub fn fenchel_bound_2(u: f64, alpha: f64, gamma: f64) -> Result<f64> {
    check_params(alpha, gamma)?;
    if !u.is_finite() {
        return Err(Error::NonFinite { what: "conjugate argument" });
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    let ug = u.abs() * gamma;
    Ok(ug * ((ug / alpha).ln() - 1.0))
}

/// Numeric sup_x {ux − α(e^{|x|/γ} − |x|/γ − 1)} over x ∈ [0, 50γ] after
/// reducing by symmetry to |u|. Tolerance 1e-10 on the argmax.
pub fn numeric_conjugate_1(u: f64, alpha: f64, gamma: f64) -> Result<f64> {
    check_params(alpha, gamma)?;
    let ua = u.abs();
    let obj = |x: f64| ua * x - alpha * ((x / gamma).exp() - x / gamma - 1.0);
    let (_, sup) = golden_section_max(obj, 0.0, 50.0 * gamma, 1e-10);
    Ok(sup.max(obj(0.0)))
}

/// Numeric sup_x {ux − αe^{|x|/γ}} over x ∈ [0, 50γ].
pub fn numeric_conjugate_2(u: f64, alpha: f64, gamma: f64) -> Result<f64> {
    check_params(alpha, gamma)?;
    let ua = u.abs();
    let obj = |x: f64| ua * x - alpha * (x / gamma).exp();
    let (_, sup) = golden_section_max(obj, 0.0, 50.0 * gamma, 1e-10);
    Ok(sup.max(obj(0.0)))
}
