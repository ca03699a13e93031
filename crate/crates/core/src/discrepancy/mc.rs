//! Direct-definition Monte Carlo oracle.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::gauss_legendre;
use crate::sphere_geom::{
    cap_measure_unchecked, dot_unchecked, random_unit_vector, stream_rng, PointSet, Seed, Stream,
};

/// Samples per work unit. Fixed so the estimate does not depend on the
/// thread count.
const SAMPLE_BLOCK: usize = 256;

/// Mean and standard error of a Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
    #[serde(serialize_with = "ser_seed")]
    pub seed: Seed,
}

fn ser_seed<S: serde::Serializer>(seed: &Seed, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u64(seed.0)
}

/// Running mean and sum of squared deviations (Welford), mergeable.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.n;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0.0 {
            return o;
        }
        if o.n == 0.0 {
            return self;
        }
        let n = self.n + o.n;
        let delta = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + delta * o.n / n,
            m2: self.m2 + o.m2 + delta * delta * self.n * o.n / n,
        }
    }
}

/// Estimates the squared α-large cap discrepancy straight from its
/// definition,
///
/// ```text
///   ∫_{-1}^{1} ∫_{S^d} ( #{n : <x_n, z> ≥ αt}/N − σ_d(C(z; αt)) )² dσ_d(z) dt,
/// ```
///
/// with an `n_t_nodes`-point Gauss–Legendre rule in `t` and
/// `n_sphere_samples` uniform centers `z` shared by all nodes. Valid for
/// every `α ∈ [0, 1]`.
pub fn mc_definition_l2_squared(
    p: &PointSet,
    alpha: f64,
    n_sphere_samples: usize,
    n_t_nodes: usize,
    seed: Seed,
) -> Result<McEstimate> {
    const OP: &str = "mc_definition_l2_squared";
    if p.is_empty() {
        return Err(Error::EmptySet(OP));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::domain(OP, format!("alpha must lie in [0, 1], got {alpha}")));
    }
    if n_sphere_samples < 2 {
        return Err(Error::domain(OP, "need at least 2 sphere samples for a standard error"));
    }
    if n_t_nodes < 1 {
        return Err(Error::domain(OP, "need at least 1 quadrature node"));
    }

    let d = p.d();
    let dim = d as usize + 1;
    let (nodes, weights) = gauss_legendre(n_t_nodes);
    let heights: Vec<f64> = nodes.iter().map(|t| alpha * t).collect();
    let sigma: Vec<f64> = heights.iter().map(|&h| cap_measure_unchecked(d, h)).collect();
    let pts = p.points();
    let inv_n = 1.0 / pts.len() as f64;

    let blocks = n_sphere_samples.div_ceil(SAMPLE_BLOCK);
    let partials = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = Moments::default();
            let mut ips = vec![0.0; pts.len()];
            let lo = b * SAMPLE_BLOCK;
            let hi = (lo + SAMPLE_BLOCK).min(n_sphere_samples);
            for i in lo..hi {
                let mut rng = stream_rng(seed, Stream::CapCenters, i as u64);
                let z = random_unit_vector(&mut rng, dim)?;
                for (ip, x) in ips.iter_mut().zip(pts) {
                    *ip = dot_unchecked(&z, x.coords());
                }
                ips.sort_by(f64::total_cmp);
                let f: f64 = heights
                    .iter()
                    .zip(&sigma)
                    .zip(&weights)
                    .map(|((&h, &s), &w)| {
                        let inside = ips.len() - ips.partition_point(|&v| v < h);
                        let r = inside as f64 * inv_n - s;
                        w * r * r
                    })
                    .sum();
                acc.push(f);
            }
            Ok(acc)
        })
        .collect::<Result<Vec<Moments>>>()?;
    let m = partials.into_iter().fold(Moments::default(), Moments::merge);
    let var = m.m2 / (m.n - 1.0);
    Ok(McEstimate {
        mean: m.mean,
        std_error: (var.max(0.0) / m.n).sqrt(),
        n_samples: n_sphere_samples,
        seed,
    })
}
