//! Dimension constants `C_d`, `I_d` and friends.
//!
//! `C_d = Γ((d+1)/2) / (d √π Γ(d/2))` scales the distance kernel and
//! `I_d` is the mean Euclidean distance between two independent uniform
//! points on `S^d`. Both are evaluated from log-gamma ratios, so they stay
//! accurate (relative error ~1e-15) for any dimension that fits in a `u64`.

use std::collections::HashMap;
use std::f64::consts::{LN_2, PI, SQRT_2};
use std::sync::{OnceLock, RwLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::{log_gamma, log_gamma_ratio};

/// Constants attached to one sphere dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphereConstants {
    pub d: u64,
    pub c_d: f64,
    pub i_d: f64,
    /// `C_d · I_d`.
    pub cdid: f64,
    /// Maximum of the auxiliary function in the squared-discrepancy lower bound.
    pub f_star: f64,
    pub log_c_d: f64,
    pub log_i_d: f64,
}

impl SphereConstants {
    /// Evaluates the constants without touching the memo table.
    pub fn new(d: u64) -> Result<Self> {
        if d < 1 {
            return Err(Error::domain("compute_constants", "dimension d must be >= 1"));
        }
        let df = d as f64;
        let half_ln_pi = 0.5 * PI.ln();

        let log_c_d = log_gamma_ratio((df + 1.0) / 2.0, df / 2.0)? - df.ln() - half_ln_pi;

        // duplication form: I_d = √2 Γ(m+1/2)² / (Γ(m+1/4) Γ(m+3/4)), m = d/2
        let m = df / 2.0;
        let log_i_d =
            0.5 * LN_2 + log_gamma_ratio(m + 0.5, m + 0.25)? + log_gamma_ratio(m + 0.5, m + 0.75)?;

        let log_f_star = df.ln() - ((df + 1.0) / df) * (df + 1.0).ln()
            + (half_ln_pi - log_gamma((df + 1.0) / 2.0)?) / df;

        Ok(SphereConstants {
            d,
            c_d: log_c_d.exp(),
            i_d: log_i_d.exp(),
            cdid: (log_c_d + log_i_d).exp(),
            f_star: log_f_star.exp(),
            log_c_d,
            log_i_d,
        })
    }

    /// `1 − I_d/√2`, formed without cancellation. Always in (0, 1).
    pub fn sqrt2_gap(&self) -> f64 {
        -(self.log_i_d - 0.5 * LN_2).exp_m1()
    }

    /// `C_d I_d / (1 − C_d I_d)`.
    pub fn ratio_cdid(&self) -> f64 {
        self.cdid / (1.0 - self.cdid)
    }

    /// Checks the two-sided estimates on `C_d`, `I_d`, `C_d I_d` and
    /// `C_d I_d/(1 − C_d I_d)`, plus the kernel-positivity chain
    /// `C_d I_d < √2 C_d ≤ √(2π) C_d ≤ 1`.
    ///
    /// Returns the names of violated inequalities (empty when all hold).
    /// The lower bounds are strict for `d ≥ 2`; at `d = 1` they collapse to
    /// zero and are only checked non-strictly.
    pub fn bound_violations(&self) -> Vec<&'static str> {
        let d = self.d as f64;
        let shrink = 1.0 - 1.0 / d;
        let strict = self.d >= 2;
        let below = |lo: f64, v: f64| if strict { lo < v } else { lo <= v };
        let mut bad = Vec::new();

        let c_hi = 1.0 / (2.0 * PI * d).sqrt();
        if !(below(c_hi * shrink.sqrt(), self.c_d) && self.c_d < c_hi) {
            bad.push("c_d sandwich");
        }
        if !(below(SQRT_2 * shrink.sqrt(), self.i_d) && self.i_d < SQRT_2) {
            bad.push("i_d sandwich");
        }
        let p_hi = 1.0 / (PI * d).sqrt();
        if !(below(p_hi * shrink, self.cdid) && self.cdid < p_hi) {
            bad.push("c_d*i_d sandwich");
        }
        let r = self.ratio_cdid();
        let root = (PI * d).sqrt();
        if !(below(shrink / (root - shrink), r) && r < 1.0 / (root - 1.0)) {
            bad.push("ratio sandwich");
        }
        let s2 = SQRT_2 * self.c_d;
        let s2pi = (2.0 * PI).sqrt() * self.c_d;
        if !(self.cdid < s2 && s2 <= s2pi && s2pi <= 1.0) {
            bad.push("kernel positivity chain");
        }
        bad
    }
}

fn memo() -> &'static RwLock<HashMap<u64, SphereConstants>> {
    static TABLE: OnceLock<RwLock<HashMap<u64, SphereConstants>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Memoized [`SphereConstants::new`].
pub fn compute_constants(d: u64) -> Result<SphereConstants> {
    if let Some(c) = memo().read().ok().and_then(|m| m.get(&d).copied()) {
        return Ok(c);
    }
    let c = SphereConstants::new(d)?;
    if let Ok(mut m) = memo().write() {
        m.insert(d, c);
    }
    Ok(c)
}

/// `C_d I_d / (1 − C_d I_d)`, the per-point factor in the classical
/// inverse-discrepancy upper bound.
pub fn ratio_cdid(d: u64) -> Result<f64> {
    Ok(compute_constants(d)?.ratio_cdid())
}

/// The absolute constant `c = (√e / (2√π)) f(9) h(1) ≈ 0.1395` that turns
/// the squared-discrepancy lower bound into the `1/8` prefactor of the
/// inverse-discrepancy lower bound.
pub fn lower_bound_proof_constant() -> f64 {
    let f = |d: f64| ((2.0 * PI).sqrt() / d * (1.0 + 1.0 / d).sqrt()).powf(1.0 / (d + 1.0));
    let h = |d: f64| (-1.0 / (6.0 * (d + 1.0) * (d + 1.0))).exp() / (1.0 + 1.0 / d).powf(1.5);
    1f64.exp().sqrt() / (2.0 * PI.sqrt()) * f(9.0) * h(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn hand_values_d1_d2() {
        let c1 = SphereConstants::new(1).unwrap();
        assert!(close(c1.c_d, 1.0 / PI, 1e-14));
        assert!(close(c1.i_d, 4.0 / PI, 1e-14));
        assert!(close(c1.f_star, PI.sqrt() / 4.0, 1e-14));

        let c2 = SphereConstants::new(2).unwrap();
        assert!(close(c2.c_d, 0.25, 1e-14));
        assert!(close(c2.i_d, 4.0 / 3.0, 1e-14));
        assert!(close(c2.cdid, 1.0 / 3.0, 1e-14));
        assert!(close(c2.f_star, 2.0 / 3f64.powf(1.5) * SQRT_2, 1e-14));
        assert!(close(c2.f_star, 0.544_331_1, 1e-7));
    }

    #[test]
    fn i_d_matches_power_of_two_form() {
        // I_d = 2^d Γ((d+1)/2)² / (√π Γ(d+1/2)), straightforward log-gamma evaluation
        for d in [1u64, 2, 3, 7, 20, 100, 1000] {
            let df = d as f64;
            let direct = (df * LN_2 + 2.0 * log_gamma((df + 1.0) / 2.0).unwrap()
                - 0.5 * PI.ln()
                - log_gamma(df + 0.5).unwrap())
            .exp();
            let c = SphereConstants::new(d).unwrap();
            assert!(close(c.i_d, direct, 1e-11), "d={d}: {} vs {direct}", c.i_d);
        }
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(SphereConstants::new(0).is_err());
        assert!(compute_constants(0).is_err());
    }

    #[test]
    fn ratio_examples() {
        assert!(close(ratio_cdid(2).unwrap(), 0.5, 1e-14));
        let r1 = 4.0 / (PI * PI);
        assert!(close(ratio_cdid(1).unwrap(), r1 / (1.0 - r1), 1e-14));
        let r = ratio_cdid(10_000).unwrap();
        assert!(r < 1.0 / ((PI * 1e4).sqrt() - 1.0));
        assert!(r < 0.005_677);
    }

    #[test]
    fn proof_constant() {
        let c = lower_bound_proof_constant();
        assert!((c - 0.1395).abs() < 1e-4);
        assert!(c > 0.125);
        // closed form 5^{1/20} e^{11/24} / (4 · 2^{2/5} 3^{3/10} π^{9/20})
        let closed = 5f64.powf(0.05) * (11.0f64 / 24.0).exp()
            / (4.0 * 2f64.powf(0.4) * 3f64.powf(0.3) * PI.powf(0.45));
        assert!(close(c, closed, 1e-14));
        let h1 = (-1.0f64 / 24.0).exp() / 2f64.powf(1.5);
        assert!((h1 - 0.339_124_7).abs() < 1e-7);
    }

    #[test]
    fn bounds_hold_small_dims() {
        for d in 1..=2000 {
            let c = SphereConstants::new(d).unwrap();
            assert!(c.bound_violations().is_empty(), "d={d}: {:?}", c.bound_violations());
            assert!(c.f_star > 0.0 && c.f_star < 1.0);
        }
    }

    #[test]
    fn i_d_asymptotics() {
        // d^2 |I_d/√2 − (1 − 1/(8d))| stays bounded by a fixed K
        let scaled: Vec<f64> = [10u64, 100, 1000, 10_000, 100_000]
            .iter()
            .map(|&d| {
                let c = SphereConstants::new(d).unwrap();
                let df = d as f64;
                // I_d/√2 − 1 = −sqrt2_gap
                df * df * (-c.sqrt2_gap() + 1.0 / (8.0 * df)).abs()
            })
            .collect();
        let k = scaled[0] * 1.5;
        for (s, d) in scaled.iter().zip([10, 100, 1000, 10_000, 100_000]) {
            assert!(*s <= k, "d={d}: {s} > {k}");
            assert!(*s > 0.0);
        }
        // the scaled remainder converges (to 1/128)
        assert!((scaled[4] - 1.0 / 128.0).abs() < 1e-3, "{scaled:?}");
    }

    #[test]
    fn memo_is_consistent() {
        let a = compute_constants(37).unwrap();
        let b = compute_constants(37).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, SphereConstants::new(37).unwrap());
    }
}
