//! Inverse-discrepancy bounds, scale choices `α_d` and dimension sweeps.
//!
//! With `r = C_d I_d / (α − C_d I_d)`, the minimal number of points whose
//! normalized α-large discrepancy is at most `ε` lies between
//! `⅛ (r/(ε²√d))^{d/(d+1)}` and `⌈r/ε²⌉`. Choosing `α_d` through a target
//! initial discrepancy `g(d) = 1 − C_d I_d/α_d` gives `r = (1 − g)/g`.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{compute_constants, SphereConstants};
use crate::error::{Error, Result};

/// Relative slack absorbed before rounding up, so that values such as
/// `4 · 0.5000000000000001` count as exactly 2.
const CEIL_SLACK: f64 = 1e-12;

fn robust_ceil(x: f64) -> f64 {
    (x * (1.0 - CEIL_SLACK)).ceil()
}

fn check_epsilon(op: &'static str, epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(op, format!("epsilon must lie in (0, 1), got {epsilon}")))
    }
}

fn to_count(op: &'static str, x: f64) -> Result<u64> {
    let c = robust_ceil(x);
    if c.is_finite() && c < u64::MAX as f64 {
        Ok(c.max(1.0) as u64)
    } else {
        Err(Error::domain(op, format!("point count {x:e} does not fit in u64")))
    }
}

/// `⌈ε^{-2} / (√(πd) − 1)⌉`, the dimension-only upper bound for the
/// classical discrepancy.
pub fn inverse_upper_classical(epsilon: f64, d: u64) -> Result<u64> {
    const OP: &str = "inverse_upper_classical";
    check_epsilon(OP, epsilon)?;
    if d < 1 {
        return Err(Error::domain(OP, "dimension d must be >= 1"));
    }
    to_count(OP, 1.0 / (epsilon * epsilon) / ((PI * d as f64).sqrt() - 1.0))
}

/// Lower and upper bounds on the inverse of the normalized α-large
/// discrepancy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsResult {
    pub d: u64,
    pub epsilon: f64,
    pub alpha: f64,
    /// Squared initial discrepancy `1 − C_d I_d/α`.
    pub g: f64,
    pub lower: f64,
    pub upper: u64,
}

fn bounds_from_ratio(op: &'static str, epsilon: f64, d: u64, alpha: f64, g: f64, r: f64) -> Result<BoundsResult> {
    let scaled = r / (epsilon * epsilon);
    let df = d as f64;
    let lower = 0.125 * (scaled / df.sqrt()).powf(df / (df + 1.0));
    Ok(BoundsResult {
        d,
        epsilon,
        alpha,
        g,
        lower,
        upper: to_count(op, scaled)?,
    })
}

/// Bounds for an explicit scale `α ∈ (C_d I_d, 1]`.
pub fn inverse_bounds(epsilon: f64, d: u64, alpha: f64) -> Result<BoundsResult> {
    const OP: &str = "inverse_bounds";
    check_epsilon(OP, epsilon)?;
    let c = compute_constants(d)?;
    check_alpha(OP, &c, alpha)?;
    let r = c.cdid / (alpha - c.cdid);
    bounds_from_ratio(OP, epsilon, d, alpha, 1.0 - c.cdid / alpha, r)
}

fn check_alpha(op: &'static str, c: &SphereConstants, alpha: f64) -> Result<()> {
    if alpha.is_nan() || alpha > 1.0 {
        return Err(Error::domain(op, format!("alpha must be <= 1, got {alpha}")));
    }
    if alpha <= c.cdid {
        return Err(Error::Normalization(format!(
            "{op}: alpha={alpha} <= C_d*I_d={} for d={}, initial discrepancy is not positive",
            c.cdid, c.d
        )));
    }
    Ok(())
}

/// `C_d I_d / (α n)`, the expected squared α-large discrepancy of `n`
/// i.i.d. uniform points.
pub fn expected_random_sq(d: u64, n: u64, alpha: f64) -> Result<f64> {
    const OP: &str = "expected_random_sq";
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(OP, format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if n < 1 {
        return Err(Error::domain(OP, "n must be >= 1"));
    }
    Ok(compute_constants(d)?.cdid / (alpha * n as f64))
}

/// Ways of choosing the scale `α_d` for each dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GFamily {
    /// `α = 1`.
    Classical,
    /// `α = √2 C_d`.
    Sqrt2Cd,
    /// `α = η C_d` with `η ∈ (√2, √(2π)]`.
    EtaCd(f64),
    /// `g(d) = d^{−δ}`.
    PolyDecay(f64),
    /// `g(d) = a^d`.
    ExpDecay(f64),
    /// `g(d) = c`.
    Constant(f64),
}

impl GFamily {
    /// Checks the family parameter itself, independent of `d`.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::domain("GFamily", msg));
        match *self {
            GFamily::EtaCd(eta) if !(eta > SQRT_2 && eta <= (2.0 * PI).sqrt()) => {
                bad(format!("eta must lie in (sqrt 2, sqrt(2 pi)], got {eta}"))
            }
            GFamily::PolyDecay(delta) if !(delta > 0.0 && delta.is_finite()) => {
                bad(format!("delta must be > 0, got {delta}"))
            }
            GFamily::ExpDecay(a) if !(a > 0.0 && a < 1.0) => bad(format!("a must lie in (0, 1), got {a}")),
            GFamily::Constant(c) if !(c > 0.0 && c < 1.0) => bad(format!("c must lie in (0, 1), got {c}")),
            _ => Ok(()),
        }
    }

    /// `(α_d, g(d), r)` with `r = C_d I_d/(α_d − C_d I_d)`, each formed
    /// without cancellation where possible.
    fn resolve(&self, d: u64) -> Result<(f64, f64, f64)> {
        const OP: &str = "alpha_from_g";
        self.validate()?;
        let c = compute_constants(d)?;
        let from_g = |g: f64| -> Result<(f64, f64, f64)> {
            if !(g > 0.0 && g < 1.0) {
                return Err(Error::Normalization(format!("{OP}: g({d}) = {g} is not in (0, 1)")));
            }
            let alpha = c.cdid / (1.0 - g);
            if alpha > 1.0 {
                return Err(Error::Normalization(format!(
                    "{OP}: g({d}) = {g} needs alpha = {alpha} > 1"
                )));
            }
            Ok((alpha, g, (1.0 - g) / g))
        };
        match *self {
            GFamily::Classical => {
                check_alpha(OP, &c, 1.0)?;
                Ok((1.0, 1.0 - c.cdid, c.ratio_cdid()))
            }
            GFamily::Sqrt2Cd => Ok(eta_scale(&c, SQRT_2)),
            GFamily::EtaCd(eta) => Ok(eta_scale(&c, eta)),
            GFamily::PolyDecay(delta) => from_g((-delta * (d as f64).ln()).exp()),
            GFamily::ExpDecay(a) => from_g((d as f64 * a.ln()).exp()),
            GFamily::Constant(g) => from_g(g),
        }
    }

    fn name(&self) -> String {
        self.to_string()
    }
}

/// `α = η C_d`: `g = 1 − I_d/η`, `r = (I_d/η)/g`. Valid for all `d` when
/// `η ∈ [√2, √(2π)]`.
fn eta_scale(c: &SphereConstants, eta: f64) -> (f64, f64, f64) {
    let log_q = c.log_i_d - eta.ln();
    let g = -log_q.exp_m1();
    (eta * c.c_d, g, log_q.exp() / g)
}

impl fmt::Display for GFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GFamily::Classical => write!(f, "classical"),
            GFamily::Sqrt2Cd => write!(f, "sqrt2cd"),
            GFamily::EtaCd(v) => write!(f, "eta:{v}"),
            GFamily::PolyDecay(v) => write!(f, "g-poly:{v}"),
            GFamily::ExpDecay(v) => write!(f, "g-exp:{v}"),
            GFamily::Constant(v) => write!(f, "g-const:{v}"),
        }
    }
}

impl FromStr for GFamily {
    type Err = Error;

    /// Parses `classical`, `sqrt2cd`, `eta:V`, `g-const:C`, `g-poly:D` or
    /// `g-exp:A`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let num = || -> Result<f64> {
            let a = arg.ok_or_else(|| Error::Parse(format!("family '{s}' needs a value after ':'")))?;
            a.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("family '{s}': {e}")))
        };
        let fam = match (head, arg) {
            ("classical", None) => GFamily::Classical,
            ("sqrt2cd", None) => GFamily::Sqrt2Cd,
            ("eta", _) => GFamily::EtaCd(num()?),
            ("g-const", _) => GFamily::Constant(num()?),
            ("g-poly", _) => GFamily::PolyDecay(num()?),
            ("g-exp", _) => GFamily::ExpDecay(num()?),
            _ => return Err(Error::Parse(format!("unknown alpha family '{s}'"))),
        };
        fam.validate()?;
        Ok(fam)
    }
}

/// The scale `α_d` selected by `family` in dimension `d`, checked to lie in
/// `(C_d I_d, 1]`.
pub fn alpha_from_g(family: GFamily, d: u64) -> Result<f64> {
    Ok(family.resolve(d)?.0)
}

/// Bounds for the family's scale in dimension `d`.
pub fn family_bounds(family: GFamily, d: u64, epsilon: f64) -> Result<BoundsResult> {
    const OP: &str = "family_bounds";
    check_epsilon(OP, epsilon)?;
    let (alpha, g, r) = family.resolve(d)?;
    bounds_from_ratio(OP, epsilon, d, alpha, g, r)
}

/// One sweep row: the bounds, or the reason the row was skipped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub d: u64,
    pub epsilon: f64,
    pub bounds: Option<BoundsResult>,
    pub flag: Option<String>,
}

/// [`family_bounds`] for every `d` in `d_values`, in input order. Rows that
/// fail carry the error message in `flag`.
pub fn sweep(family: GFamily, d_values: &[u64], epsilon: f64) -> Result<Vec<SweepRow>> {
    check_epsilon("sweep", epsilon)?;
    family.validate()?;
    Ok(d_values
        .par_iter()
        .map(|&d| match family_bounds(family, d, epsilon) {
            Ok(b) => SweepRow {
                d,
                epsilon,
                bounds: Some(b),
                flag: None,
            },
            Err(e) => SweepRow {
                d,
                epsilon,
                bounds: None,
                flag: Some(e.to_string()),
            },
        })
        .collect())
}

/// Describes how the upper bound evolves across a sweep. This is a reading
/// of the bounds, not a proof of a tractability class. Returns `None` for
/// [`GFamily::Constant`], where the bounds do not separate the candidate
/// regimes, and when fewer than two rows succeeded.
pub fn regime_advisory(family: GFamily, rows: &[SweepRow]) -> Option<String> {
    if matches!(family, GFamily::Constant(_)) {
        return None;
    }
    let ok: Vec<&BoundsResult> = rows.iter().filter_map(|r| r.bounds.as_ref()).collect();
    let (first, last) = (ok.first()?, ok.last()?);
    if ok.len() < 2 || last.d <= first.d {
        return None;
    }
    let non_increasing = ok.windows(2).all(|w| w[1].upper <= w[0].upper);
    let fam = family.name();
    if non_increasing {
        return Some(format!(
            "{fam}: upper bound non-increasing in d over [{}, {}] (consistent with a blessing of dimensionality)",
            first.d, last.d
        ));
    }
    // growth of r/ε² = upper, measured on the real-valued factor
    let log_u = |b: &BoundsResult| (b.upper as f64).ln();
    let (d0, d1) = (first.d as f64, last.d as f64);
    let poly = (log_u(last) - log_u(first)) / (d1.ln() - d0.ln());
    let per_unit = ((log_u(last) - log_u(first)) / (d1 - d0)).exp();
    let text = if per_unit > 1.05 && poly > 3.0 {
        format!("upper bound grows exponentially, about x{per_unit:.3} per unit of d (consistent with a curse of dimensionality)")
    } else if poly <= 1.0 + 0.1 {
        format!("upper bound grows like d^{poly:.2} (consistent with polynomial tractability)")
    } else {
        format!("upper bound grows like d^{poly:.2} (polynomial growth in d)")
    };
    Some(format!("{fam}: {text} over [{}, {}]", first.d, last.d))
}
