//! Sphere geometry checked against Monte Carlo frequencies and hand formulas.

use proptest::prelude::*;
use spherecap::constants::compute_constants;
use spherecap::sphere_geom::{
    cap_indicator, cap_measure, euclidean_distance, geodesic_distance_normalized, surface_ratio, uniform_points,
    Seed, SpherePoint,
};

fn z_score(hits: usize, n: usize, p: f64) -> f64 {
    let nf = n as f64;
    (hits as f64 / nf - p) / (p * (1.0 - p) / nf).sqrt()
}

#[test]
fn cap_measure_matches_frequency() {
    let n = 100_000;
    for d in [1u64, 2, 3, 8] {
        let pts = uniform_points(d, n, Seed(d)).unwrap();
        let center = SpherePoint::basis(d as usize + 1, 0);
        for t in [-0.9, -0.3, 0.0, 0.3, 0.9] {
            let hits = pts
                .points()
                .iter()
                .filter(|x| cap_indicator(&center, t, x).unwrap())
                .count();
            let s = cap_measure(d, t).unwrap();
            let z = z_score(hits, n, s);
            assert!(z.abs() <= 4.0, "d={d} t={t}: {hits}/{n} vs {s} (z={z:.2})");
        }
    }
}

#[test]
fn cap_measure_hand_formulas() {
    // d=1: acos(t)/π; d=2: (1 − t)/2; d=3: (acos t − t√(1−t²))/π
    let pi = std::f64::consts::PI;
    for k in -20..=20 {
        let t = k as f64 / 20.0;
        assert!((cap_measure(1, t).unwrap() - t.acos() / pi).abs() < 1e-14);
        assert!((cap_measure(2, t).unwrap() - (1.0 - t) / 2.0).abs() < 1e-14);
        let d3 = (t.acos() - t * (1.0 - t * t).sqrt()) / pi;
        assert!((cap_measure(3, t).unwrap() - d3).abs() < 1e-14);
    }
}

#[test]
fn cap_measure_reflection() {
    for d in [1u64, 2, 5, 40, 1000] {
        for k in 0..=50 {
            let t = k as f64 / 50.0;
            let s = cap_measure(d, t).unwrap() + cap_measure(d, -t).unwrap();
            assert!((s - 1.0).abs() < 1e-12, "d={d} t={t}");
        }
    }
}

#[test]
fn cap_density_is_surface_ratio() {
    // −dσ/dt at t = 0 is ω_{d−1}/ω_d
    for d in [1u64, 2, 3, 10] {
        let h = 1e-5;
        let slope = (cap_measure(d, -h).unwrap() - cap_measure(d, h).unwrap()) / (2.0 * h);
        assert!((slope - surface_ratio(d).unwrap()).abs() < 1e-8, "d={d}");
    }
}

fn pair_means(d: u64, n: usize) -> ((f64, f64), (f64, f64)) {
    let xs = uniform_points(d, n, Seed(10 + d)).unwrap();
    let ys = uniform_points(d, n, Seed(20 + d)).unwrap();
    let stats = |v: Vec<f64>| {
        let nf = v.len() as f64;
        let m = v.iter().sum::<f64>() / nf;
        let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (nf - 1.0);
        (m, (var / nf).sqrt())
    };
    let pairs: Vec<_> = xs.points().iter().zip(ys.points()).collect();
    let e = stats(pairs.iter().map(|(x, y)| euclidean_distance(x, y).unwrap()).collect());
    let g = stats(pairs.iter().map(|(x, y)| geodesic_distance_normalized(x, y).unwrap()).collect());
    (e, g)
}

#[test]
fn mean_distances() {
    for d in [1u64, 2, 3, 8, 30] {
        let ((em, ese), (gm, gse)) = pair_means(d, 200_000);
        let i_d = compute_constants(d).unwrap().i_d;
        assert!((em - i_d).abs() <= 4.0 * ese, "d={d}: euclidean {em} vs {i_d}");
        assert!((gm - 0.5).abs() <= 4.0 * gse, "d={d}: geodesic {gm} vs 1/2");
    }
}

#[test]
fn i_d_monotone_and_limit() {
    let mut prev = 0.0;
    for d in (1..=1_000_000u64).step_by(997) {
        let i = compute_constants(d).unwrap().i_d;
        assert!(i > prev, "d={d}");
        prev = i;
    }
    assert!(compute_constants(1_000_000).unwrap().i_d > std::f64::consts::SQRT_2 - 1e-3);
}

fn unit(v: Vec<f64>) -> Option<SpherePoint> {
    SpherePoint::new(v).ok()
}

proptest! {
    #[test]
    fn distances_symmetric_and_triangle(
        a in prop::collection::vec(-1.0f64..1.0, 4),
        b in prop::collection::vec(-1.0f64..1.0, 4),
        c in prop::collection::vec(-1.0f64..1.0, 4),
    ) {
        let (Some(x), Some(y), Some(z)) = (unit(a), unit(b), unit(c)) else { return Ok(()) };
        for f in [euclidean_distance, geodesic_distance_normalized] {
            let xy = f(&x, &y).unwrap();
            prop_assert_eq!(xy, f(&y, &x).unwrap());
            prop_assert!(xy <= f(&x, &z).unwrap() + f(&z, &y).unwrap() + 1e-12);
        }
    }

    #[test]
    fn cap_measure_monotone(d in 1u64..200, t1 in -1.0f64..1.0, t2 in -1.0f64..1.0) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        prop_assert!(cap_measure(d, lo).unwrap() >= cap_measure(d, hi).unwrap());
    }
}
