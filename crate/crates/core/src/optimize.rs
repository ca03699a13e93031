//! Local maximization of the pairwise Euclidean distance sum.
//!
//! A larger distance sum means a smaller α-large cap discrepancy for every
//! closed-form scale at once, so one ascent improves all of them. The method
//! is a projected gradient ascent with backtracking; it finds local maxima
//! only, so use restarts.

use rayon::prelude::*;
use serde::Serialize;

use crate::discrepancy::chord_pair_sum;
use crate::error::{Error, Result};
use crate::sphere_geom::{chord_unchecked as distance, random_unit_vector, stream_rng, PointSet, Seed, SpherePoint, Stream};

/// Pairs closer than this are left out of the gradient.
const GRADIENT_SKIP_DISTANCE: f64 = 1e-9;
/// Start sets with pairs closer than this are jittered once.
const COINCIDENCE_DISTANCE: f64 = 1e-12;
const JITTER_MAGNITUDE: f64 = 1e-6;
const MIN_STEP: f64 = 1e-12;

/// `Σ_{m,n} ‖x_m − x_n‖` over all ordered pairs.
pub fn sum_pairwise_distance(p: &PointSet) -> f64 {
    chord_pair_sum(p)
}

/// Summary of an ascent run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizeReport {
    pub initial_objective: f64,
    pub final_objective: f64,
    /// Gradient steps attempted, accepted or not.
    pub iterations: usize,
    pub accepted_steps: usize,
    /// Whether the relative gain fell below the tolerance (as opposed to
    /// hitting the iteration cap or the minimum step).
    pub converged: bool,
    pub jittered: bool,
    /// `(iteration, objective)` after every accepted step, if requested.
    pub step_trace: Option<Vec<(usize, f64)>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    pub max_iters: usize,
    pub tol: f64,
    pub record_trace: bool,
    /// Seed for the jitter applied to coincident start points.
    pub seed: Seed,
}

impl OptimizeOptions {
    pub fn new(max_iters: usize, tol: f64) -> Self {
        OptimizeOptions {
            max_iters,
            tol,
            record_trace: false,
            seed: Seed(0),
        }
    }
}

/// [`maximize_with`] with default options.
pub fn maximize_pairwise_distance(p0: &PointSet, max_iters: usize, tol: f64) -> Result<(PointSet, OptimizeReport)> {
    maximize_with(p0, &OptimizeOptions::new(max_iters, tol))
}

/// Projected gradient ascent on `Σ ‖x_m − x_n‖`. Each step moves every point
/// along the tangent part of `Σ_{n≠m} (x_m − x_n)/‖x_m − x_n‖` and
/// renormalizes; a step that does not increase the objective is retried with
/// half the step size.
pub fn maximize_with(p0: &PointSet, opts: &OptimizeOptions) -> Result<(PointSet, OptimizeReport)> {
    const OP: &str = "maximize_pairwise_distance";
    let n = p0.len();
    if n < 2 {
        return Err(Error::domain(OP, format!("need at least 2 points, got {n}")));
    }
    if opts.max_iters < 1 || !(opts.tol > 0.0) {
        return Err(Error::domain(OP, "need max_iters >= 1 and tol > 0"));
    }
    let d = p0.d();
    let mut jittered = false;
    let mut current = p0.clone();
    if has_coincident(&current) {
        current = jitter(&current, opts.seed)?;
        jittered = true;
        if has_coincident(&current) {
            return Err(Error::Degenerate("coincident points persist after jitter".into()));
        }
    }

    let initial = sum_pairwise_distance(p0);
    let mut obj = sum_pairwise_distance(&current);
    let mut eta = 1.0 / n as f64;
    let mut trace = opts.record_trace.then(Vec::new);
    let mut iterations = 0;
    let mut accepted = 0;
    let mut converged = false;

    while iterations < opts.max_iters && eta >= MIN_STEP {
        iterations += 1;
        let grad = tangent_gradient(&current);
        let candidate = step(&current, &grad, eta)?;
        let cand_obj = sum_pairwise_distance(&candidate);
        if cand_obj > obj {
            let gain = (cand_obj - obj) / obj;
            current = candidate;
            obj = cand_obj;
            accepted += 1;
            if let Some(t) = trace.as_mut() {
                t.push((iterations, obj));
            }
            if gain < opts.tol {
                converged = true;
                break;
            }
        } else {
            eta *= 0.5;
        }
    }

    // jitter can cost a hair of objective; never return a worse set
    if obj < initial {
        current = p0.clone();
        obj = initial;
    }
    let mut out = PointSet::new(d, current.points().to_vec())?;
    if let Some(l) = p0.label() {
        out = out.with_label(l);
    }
    Ok((
        out,
        OptimizeReport {
            initial_objective: initial,
            final_objective: obj,
            iterations,
            accepted_steps: accepted,
            converged,
            jittered,
            step_trace: trace,
        },
    ))
}

fn has_coincident(p: &PointSet) -> bool {
    let pts = p.points();
    (0..pts.len()).any(|i| {
        pts[i + 1..]
            .iter()
            .any(|q| distance(pts[i].coords(), q.coords()) < COINCIDENCE_DISTANCE)
    })
}

fn jitter(p: &PointSet, seed: Seed) -> Result<PointSet> {
    let dim = p.d() as usize + 1;
    let pts = p
        .points()
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let mut rng = stream_rng(seed, Stream::Jitter, i as u64);
            let v = random_unit_vector(&mut rng, dim)?;
            SpherePoint::new(x.coords().iter().zip(&v).map(|(c, e)| c + JITTER_MAGNITUDE * e).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    PointSet::new(p.d(), pts)
}

/// `P_{x_m} Σ_{n≠m} (x_m − x_n)/‖x_m − x_n‖` for every `m`.
fn tangent_gradient(p: &PointSet) -> Vec<Vec<f64>> {
    let pts = p.points();
    pts.par_iter()
        .enumerate()
        .map(|(m, xm)| {
            let xm = xm.coords();
            let mut g = vec![0.0; xm.len()];
            for (k, xn) in pts.iter().enumerate() {
                if k == m {
                    continue;
                }
                let r = distance(xm, xn.coords());
                if r < GRADIENT_SKIP_DISTANCE {
                    continue;
                }
                for ((gi, a), b) in g.iter_mut().zip(xm).zip(xn.coords()) {
                    *gi += (a - b) / r;
                }
            }
            let radial: f64 = g.iter().zip(xm).map(|(a, b)| a * b).sum();
            for (gi, x) in g.iter_mut().zip(xm) {
                *gi -= radial * x;
            }
            g
        })
        .collect()
}

fn step(p: &PointSet, grad: &[Vec<f64>], eta: f64) -> Result<PointSet> {
    let pts = p
        .points()
        .iter()
        .zip(grad)
        .map(|(x, g)| SpherePoint::new(x.coords().iter().zip(g).map(|(c, gi)| c + eta * gi).collect()))
        .collect::<Result<Vec<_>>>()?;
    PointSet::new(p.d(), pts)
}
