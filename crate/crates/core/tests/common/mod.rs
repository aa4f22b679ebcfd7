#![allow(dead_code)]

use std::f64::consts::TAU;

use nalgebra::{Matrix3, Rotation3};
use necklace_core::chain::{regular_chain_from_params, Chain, RegularChainParams};
use necklace_core::geometry::{
    circle_circle_distance, link_report, Circle3, LinkVerdict, MinimizeOpts, Similarity, SolidTorus, Vec3,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn vec3(r: &mut impl Rng, half: f64) -> Vec3 {
    Vec3::new(r.gen_range(-half..half), r.gen_range(-half..half), r.gen_range(-half..half))
}

pub fn direction(r: &mut impl Rng) -> Vec3 {
    loop {
        let v = vec3(r, 1.0);
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

pub fn circle(r: &mut impl Rng) -> Circle3 {
    Circle3::new(vec3(r, 2.0), direction(r), r.gen_range(0.3..2.0)).unwrap()
}

pub fn rotation(r: &mut impl Rng) -> Matrix3<f64> {
    Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(direction(r)), r.gen_range(0.0..TAU)).into_inner()
}

pub fn similarity(r: &mut impl Rng) -> Similarity {
    Similarity::new(r.gen_range(0.1..3.0), rotation(r), vec3(r, 5.0)).unwrap()
}

/// Random circle pair whose linking is clear-cut: disjoint by a visible gap
/// and not near a disk-boundary crossing.
pub fn clear_pair(r: &mut impl Rng) -> (Circle3, Circle3) {
    loop {
        let (a, b) = (circle(r), circle(r));
        let scale = a.radius + b.radius;
        let rep = link_report(&a, &b, 1e-9 * scale);
        if rep.verdict == LinkVerdict::Degenerate || rep.margin < 0.02 * scale {
            continue;
        }
        let d = circle_circle_distance(&a, &b, &MinimizeOpts::default()).unwrap();
        if d.distance > 0.05 * scale {
            return (a, b);
        }
    }
}

/// Oracle: best of `n` evenly spaced circle points, then golden-section
/// search on the bracket around it.
pub fn sampled_distance(p: &Vec3, c: &Circle3, n: usize) -> f64 {
    let f = |t: f64| (c.point_at(t) - p).norm();
    let h = TAU / n as f64;
    let best = (0..n).min_by(|&i, &j| f(h * i as f64).total_cmp(&f(h * j as f64))).unwrap();
    let (mut lo, mut hi) = (h * (best as f64 - 1.0), h * (best as f64 + 1.0));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let (x1, x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if f(x1) < f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    f(0.5 * (lo + hi)).min(f(h * best as f64))
}

pub fn torus_close(a: &SolidTorus, b: &SolidTorus, tol: f64) -> bool {
    (a.circle.center - b.circle.center).norm() <= tol
        && (a.circle.normal - b.circle.normal).norm().min((a.circle.normal + b.circle.normal).norm()) <= tol
        && (a.circle.radius - b.circle.radius).abs() <= tol
        && (a.tube_radius - b.tube_radius).abs() <= tol
}

/// Widest-margin certified cell found at 2m = 24 (R_T = 1).
pub const CERTIFIED_24: (f64, usize, f64) = (0.27, 12, 0.196);

pub fn regular(rho: f64, m: usize, s: f64) -> Chain {
    regular_chain_from_params(&RegularChainParams::new(1.0, rho, m, s).unwrap()).unwrap()
}
