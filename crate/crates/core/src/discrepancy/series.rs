//! Power series of the distance kernel, its moments, and the resulting
//! lower bound on the squared discrepancy.
//!
//! With `u = <x, y>`, `‖x − y‖/√2 = √(1 − u) = Σ_{ℓ≥0} c_ℓ u^ℓ` where
//! `c_ℓ = (−½)_ℓ/ℓ!`. Every `c_ℓ` with `ℓ ≥ 1` is negative.

use std::f64::consts::PI;

use crate::constants::compute_constants;
use crate::error::{Error, Result};
use crate::numerics::NeumaierSum;
use crate::specfun::{log_gamma_ratio, log_pochhammer};

/// `c_ℓ = (−½)_ℓ/ℓ! = −Γ(ℓ − ½)/(2√π ℓ!)` for `ℓ ≥ 1`, `c_0 = 1`.
pub fn distance_series_coefficient(l: u64) -> f64 {
    if l == 0 {
        return 1.0;
    }
    let lf = l as f64;
    // arguments are ≥ 1/2, so the ratio is always defined
    let log_mag = log_gamma_ratio(lf - 0.5, lf + 1.0).expect("positive arguments");
    -log_mag.exp() / (2.0 * PI.sqrt())
}

/// `Σ_{ℓ=0}^{terms} c_ℓ u^ℓ`, a partial sum converging to `√(1 − u)`.
pub fn distance_series_partial(inner: f64, terms: u64) -> Result<f64> {
    const OP: &str = "distance_series_partial";
    if !(-1.0..=1.0).contains(&inner) {
        return Err(Error::domain(OP, format!("inner product must lie in [-1, 1], got {inner}")));
    }
    if terms < 1 {
        return Err(Error::domain(OP, "need at least one term"));
    }
    let mut acc = NeumaierSum::new();
    acc.add(1.0);
    let mut pow = 1.0;
    for l in 1..=terms {
        pow *= inner;
        if pow == 0.0 {
            break;
        }
        acc.add(distance_series_coefficient(l) * pow);
    }
    Ok(acc.value())
}

/// `∫∫ <x, y>^{2r} dσ_d(x) dσ_d(y) = (½)_r / ((d+1)/2)_r`.
pub fn moment_integral(d: u64, r: u64) -> Result<f64> {
    if d < 1 || r < 1 {
        return Err(Error::domain("moment_integral", format!("need d >= 1 and r >= 1, got d={d}, r={r}")));
    }
    Ok((log_pochhammer(0.5, r)? - log_pochhammer((d as f64 + 1.0) / 2.0, r)?).exp())
}

/// `m^{−1/2}/(2√(2π))`, a lower bound for the tail `Σ_{r≥m} −c_{2r}`.
pub fn series_tail_lower(m: u64) -> Result<f64> {
    if m < 1 {
        return Err(Error::domain("series_tail_lower", "m must be >= 1"));
    }
    Ok(1.0 / (2.0 * (2.0 * PI).sqrt() * (m as f64).sqrt()))
}

/// Lower bound on the squared α-large cap discrepancy of any `n`-point set:
/// `(C_d I_d/α) · f*/(2√(2π)) · n^{−(d+1)/d}`.
pub fn stolarsky_lower_bound(d: u64, alpha: f64, n: u64) -> Result<f64> {
    const OP: &str = "stolarsky_lower_bound";
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(OP, format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if n < 1 {
        return Err(Error::domain(OP, "n must be >= 1"));
    }
    let c = compute_constants(d)?;
    let df = d as f64;
    let log_n_pow = -((df + 1.0) / df) * (n as f64).ln();
    Ok(c.cdid / alpha * c.f_star / (2.0 * (2.0 * PI).sqrt()) * log_n_pow.exp())
}
