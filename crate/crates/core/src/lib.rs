//! Spherical cap L2 discrepancy on `S^d`.
//!
//! Closed forms through the invariance principle for the classical,
//! α-large and hemisphere cap discrepancies, a direct Monte Carlo oracle,
//! the constants `C_d` and `I_d`, inverse-discrepancy bounds, and a local
//! optimizer for the pairwise distance sum.

pub mod cli;
pub mod complexity;
pub mod constants;
pub mod discrepancy;
pub mod error;
pub mod format;
pub mod numerics;
pub mod optimize;
pub mod specfun;
pub mod sphere_geom;

pub use complexity::{
    alpha_from_g, expected_random_sq, family_bounds, inverse_bounds, inverse_upper_classical, sweep, BoundsResult,
    GFamily,
};
pub use constants::{compute_constants, lower_bound_proof_constant, ratio_cdid, SphereConstants};
pub use discrepancy::{
    hemisphere_l2_squared, initial_l2_squared, mc_definition_l2_squared, stolarsky_l2_squared, CapScale,
    McEstimate, ScaleMode,
};
pub use error::{Error, Result};
pub use optimize::{maximize_pairwise_distance, sum_pairwise_distance, OptimizeReport};
pub use sphere_geom::{PointSet, Seed, SpherePoint};
