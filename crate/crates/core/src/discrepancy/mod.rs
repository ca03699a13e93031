//! Spherical cap L2 discrepancies.
//!
//! For a cap-height scale `α ∈ (C_d I_d, 1]` the squared α-large cap
//! discrepancy of `{x_1, ..., x_N}` equals
//!
//! ```text
//!   (C_d/α) · ( I_d − (1/N²) Σ_{m,n} ‖x_m − x_n‖ ),
//! ```
//!
//! the kernel form of the invariance principle for
//! `K_α(x, y) = 1 − (C_d/α)‖x − y‖`. At `α = 0` (hemispheres only) the
//! kernel becomes `1 − dist_geo(x, y)` and the squared discrepancy is
//! `1/2 − mean normalized geodesic distance`.
//!
//! For `α < 1` the closed form equals the classical (`α = 1`) value divided
//! by `α`. It is not the direct integral over caps of height `αt`, which
//! [`mc_definition_l2_squared`] estimates; the two agree only at `α = 1`.
//! For a single point the direct integral never exceeds `1/2`.
//!
//! Scales in `(0, C_d I_d]` have no closed form here and are only served by
//! the Monte Carlo oracle in [`mc`].

mod gram;
mod mc;
mod series;

pub use gram::{gram_matrix, gram_min_eigenvalue, GRAM_MAX_POINTS};
pub use mc::{mc_definition_l2_squared, McEstimate};
pub use series::{
    distance_series_coefficient, distance_series_partial, moment_integral, series_tail_lower,
    stolarsky_lower_bound,
};

use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{compute_constants, SphereConstants};
use crate::error::{Error, Result};
use crate::numerics::NeumaierSum;
use crate::sphere_geom::{
    chord_unchecked, euclidean_distance, geodesic_distance_normalized, geodesic_unchecked, PointSet,
    SpherePoint,
};

/// Negative squared discrepancies down to this value are rounding noise.
pub const NEGATIVE_CLAMP_TOLERANCE: f64 = 1e-12;

/// Rows per work unit in pair sums. Fixed so results do not depend on the
/// thread count.
const PAIR_ROW_BLOCK: usize = 32;

/// How a cap scale can be evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleMode {
    /// `α = 0`: hemispheres, geodesic-distance kernel.
    Hemisphere,
    /// `C_d I_d < α ≤ 1`: closed-form distance kernel.
    ClosedForm,
    /// `0 < α ≤ C_d I_d`: definition only (Monte Carlo).
    McOnly,
}

impl ScaleMode {
    pub fn name(self) -> &'static str {
        match self {
            ScaleMode::Hemisphere => "hemisphere",
            ScaleMode::ClosedForm => "closed_form",
            ScaleMode::McOnly => "mc_only",
        }
    }
}

/// Cap-height scale `α` for dimension `d`, with its evaluation mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapScale {
    alpha: f64,
    mode: ScaleMode,
    constants: SphereConstants,
}

impl CapScale {
    pub fn new(alpha: f64, d: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::domain("CapScale::new", format!("alpha must lie in [0, 1], got {alpha}")));
        }
        let constants = compute_constants(d)?;
        let mode = if alpha == 0.0 {
            ScaleMode::Hemisphere
        } else if alpha > constants.cdid {
            ScaleMode::ClosedForm
        } else {
            ScaleMode::McOnly
        };
        Ok(CapScale { alpha, mode, constants })
    }

    /// The classical discrepancy, `α = 1`.
    pub fn classical(d: u64) -> Result<Self> {
        Self::new(1.0, d)
    }

    pub fn hemisphere(d: u64) -> Result<Self> {
        Self::new(0.0, d)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn d(&self) -> u64 {
        self.constants.d
    }

    pub fn mode(&self) -> ScaleMode {
        self.mode
    }

    pub fn constants(&self) -> &SphereConstants {
        &self.constants
    }

    /// Distance coefficient `C_d/α` of the closed-form kernel.
    fn kernel_coefficient(&self, op: &'static str) -> Result<f64> {
        self.require(op, &[ScaleMode::ClosedForm])?;
        Ok(self.constants.c_d / self.alpha)
    }

    fn require(&self, op: &'static str, allowed: &[ScaleMode]) -> Result<()> {
        if allowed.contains(&self.mode) {
            Ok(())
        } else {
            Err(Error::InvalidMode {
                op,
                alpha: self.alpha,
                mode: self.mode.name(),
            })
        }
    }
}

fn check_dim(scale_d: u64, x: &SpherePoint) -> Result<()> {
    let want = scale_d as usize + 1;
    if x.ambient_dim() != want {
        return Err(Error::DimensionMismatch {
            expected: want,
            got: x.ambient_dim(),
        });
    }
    Ok(())
}

fn check_set(scale: &CapScale, p: &PointSet, op: &'static str) -> Result<()> {
    if p.is_empty() {
        return Err(Error::EmptySet(op));
    }
    if p.d() != scale.d() {
        return Err(Error::DimensionMismatch {
            expected: scale.d() as usize + 1,
            got: p.d() as usize + 1,
        });
    }
    Ok(())
}

/// `K_α(x, y) = 1 − (C_d/α)‖x − y‖`.
pub fn kernel_value(scale: &CapScale, x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
    let coef = scale.kernel_coefficient("kernel_value")?;
    check_dim(scale.d(), x)?;
    Ok(1.0 - coef * euclidean_distance(x, y)?)
}

/// `K_0(x, y) = 1 − dist_geo(x, y)`, the hemisphere kernel.
pub fn hemisphere_kernel_value(d: u64, x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
    check_dim(d, x)?;
    Ok(1.0 - geodesic_distance_normalized(x, y)?)
}

/// `Σ_{m,n} f(x_m, x_n)` over ordered pairs, off-diagonal only, with
/// `f` symmetric. Block partials are Neumaier sums combined in block order.
pub(crate) fn ordered_pair_sum<F>(p: &PointSet, f: F) -> f64
where
    F: Fn(&[f64], &[f64]) -> f64 + Sync,
{
    let pts = p.points();
    let n = pts.len();
    let blocks = n.div_ceil(PAIR_ROW_BLOCK);
    let partials: Vec<f64> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = NeumaierSum::new();
            let lo = b * PAIR_ROW_BLOCK;
            let hi = (lo + PAIR_ROW_BLOCK).min(n);
            for i in lo..hi {
                let xi = pts[i].coords();
                for xj in &pts[i + 1..] {
                    acc.add(f(xi, xj.coords()));
                }
            }
            acc.value()
        })
        .collect();
    2.0 * partials.into_iter().collect::<NeumaierSum>().value()
}

/// `Σ_{m,n} ‖x_m − x_n‖` over all ordered pairs.
pub(crate) fn chord_pair_sum(p: &PointSet) -> f64 {
    ordered_pair_sum(p, chord_unchecked)
}

fn clamp_nonnegative(v: f64, what: &str) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -NEGATIVE_CLAMP_TOLERANCE {
        Ok(0.0)
    } else {
        Err(Error::InternalConsistency(format!("{what} evaluated to {v} < 0")))
    }
}

/// Squared α-large cap discrepancy from the invariance principle:
/// `(C_d/α)(I_d − (1/N²) Σ_{m,n} ‖x_m − x_n‖)`.
pub fn stolarsky_l2_squared(p: &PointSet, scale: &CapScale) -> Result<f64> {
    let coef = scale.kernel_coefficient("stolarsky_l2_squared")?;
    check_set(scale, p, "stolarsky_l2_squared")?;
    let n = p.len() as f64;
    let mean = chord_pair_sum(p) / (n * n);
    clamp_nonnegative(coef * (scale.constants.i_d - mean), "stolarsky_l2_squared")
}

/// Squared hemisphere discrepancy: `1/2 − (1/N²) Σ_{m,n} dist_geo(x_m, x_n)`.
pub fn hemisphere_l2_squared(p: &PointSet) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::EmptySet("hemisphere_l2_squared"));
    }
    let n = p.len() as f64;
    let mean = ordered_pair_sum(p, geodesic_unchecked) / (n * n);
    clamp_nonnegative(0.5 - mean, "hemisphere_l2_squared")
}

/// Squared discrepancy of the empty set: `1 − C_d I_d/α`, or `1/2` for
/// hemispheres.
pub fn initial_l2_squared(scale: &CapScale) -> Result<f64> {
    scale.require("initial_l2_squared", &[ScaleMode::ClosedForm, ScaleMode::Hemisphere])?;
    Ok(match scale.mode {
        ScaleMode::Hemisphere => 0.5,
        _ => 1.0 - scale.constants.cdid / scale.alpha,
    })
}

/// Squared discrepancy for either closed-form mode.
pub fn closed_form_l2_squared(p: &PointSet, scale: &CapScale) -> Result<f64> {
    match scale.mode {
        ScaleMode::Hemisphere => {
            check_set(scale, p, "closed_form_l2_squared")?;
            hemisphere_l2_squared(p)
        }
        _ => stolarsky_l2_squared(p, scale),
    }
}
