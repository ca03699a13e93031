//! Gram matrices of the discrepancy kernels and their smallest eigenvalue.

use super::{check_set, CapScale, ScaleMode};
use crate::error::{Error, Result};
use crate::numerics::symmetric_eigenvalues;
use crate::sphere_geom::{chord_unchecked, geodesic_unchecked, PointSet};

/// Largest point set accepted by [`gram_matrix`] and [`gram_min_eigenvalue`].
pub const GRAM_MAX_POINTS: usize = 64;

/// Row-major `N×N` matrix `G_{mn} = K(x_m, x_n)` for the closed-form or
/// hemisphere kernel of `scale`.
pub fn gram_matrix(p: &PointSet, scale: &CapScale) -> Result<Vec<f64>> {
    const OP: &str = "gram_matrix";
    scale.require(OP, &[ScaleMode::ClosedForm, ScaleMode::Hemisphere])?;
    check_set(scale, p, OP)?;
    let n = p.len();
    if n > GRAM_MAX_POINTS {
        return Err(Error::SizeLimit {
            op: OP,
            size: n,
            limit: GRAM_MAX_POINTS,
        });
    }
    let kernel = |x: &[f64], y: &[f64]| match scale.mode() {
        ScaleMode::Hemisphere => 1.0 - geodesic_unchecked(x, y),
        _ => 1.0 - scale.constants().c_d / scale.alpha() * chord_unchecked(x, y),
    };
    let pts = p.points();
    let mut g = vec![0.0; n * n];
    for i in 0..n {
        g[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let k = kernel(pts[i].coords(), pts[j].coords());
            g[i * n + j] = k;
            g[j * n + i] = k;
        }
    }
    Ok(g)
}

/// Smallest eigenvalue of [`gram_matrix`]. The kernels are positive
/// semi-definite, so this is `≥ 0` up to rounding.
pub fn gram_min_eigenvalue(p: &PointSet, scale: &CapScale) -> Result<f64> {
    let g = gram_matrix(p, scale)?;
    Ok(symmetric_eigenvalues(&g, p.len())[0])
}
