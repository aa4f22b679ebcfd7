use std::f64::consts::TAU;

use super::primitives::{Circle3, SolidTorus, Vec3};
use crate::error::{Error, Result};

/// Exact distance from `p` to the circle `c` as a point set.
pub fn point_circle_distance(p: &Vec3, c: &Circle3) -> f64 {
    let d = p - c.center;
    let axial = d.dot(&c.normal);
    let radial = (d - c.normal * axial).norm();
    (radial - c.radius).hypot(axial)
}

/// Settings for the global circle-to-circle minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeOpts {
    /// Samples per angle of the exhaustive grid.
    pub grid_n: usize,
    /// Stopping threshold on the gradient of the squared distance, relative
    /// to `(R_a + R_b)^2`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for MinimizeOpts {
    fn default() -> Self {
        Self {
            grid_n: 256,
            tol: 1e-10,
            max_iter: 100,
        }
    }
}

/// Result of [`circle_circle_distance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleDistance {
    pub distance: f64,
    /// Angle on the first circle (canonical frame) of the closest pair.
    pub u: f64,
    /// Angle on the second circle.
    pub v: f64,
    /// Smallest distance seen on the grid.
    pub grid_min: f64,
    /// Lipschitz bound: the true minimum is at least `grid_min - certified_gap`.
    pub certified_gap: f64,
}

struct Param {
    center: Vec3,
    e1: Vec3,
    e2: Vec3,
    radius: f64,
}

impl Param {
    fn new(c: &Circle3) -> Self {
        let (e1, e2) = c.frame();
        Self {
            center: c.center,
            e1: e1 * c.radius,
            e2: e2 * c.radius,
            radius: c.radius,
        }
    }

    fn point(&self, t: f64) -> Vec3 {
        let (s, c) = t.sin_cos();
        self.center + self.e1 * c + self.e2 * s
    }

    fn deriv(&self, t: f64) -> Vec3 {
        let (s, c) = t.sin_cos();
        self.e2 * c - self.e1 * s
    }
}

struct Eval {
    f: f64,
    grad: [f64; 2],
    hess: [[f64; 2]; 2],
}

fn evaluate(a: &Param, b: &Param, u: f64, v: f64) -> Eval {
    let p = a.point(u);
    let q = b.point(v);
    let dp = a.deriv(u);
    let dq = b.deriv(v);
    let d = p - q;
    // second derivatives of the parametrizations point back to the centers
    let ddp = a.center - p;
    let ddq = b.center - q;
    Eval {
        f: d.norm_squared(),
        grad: [2.0 * d.dot(&dp), -2.0 * d.dot(&dq)],
        hess: [
            [2.0 * (dp.norm_squared() + d.dot(&ddp)), -2.0 * dp.dot(&dq)],
            [-2.0 * dp.dot(&dq), 2.0 * (dq.norm_squared() - d.dot(&ddq))],
        ],
    }
}

/// Damped Newton descent on the squared distance from `(u, v)`.
fn refine(a: &Param, b: &Param, mut u: f64, mut v: f64, opts: &MinimizeOpts) -> Result<(f64, f64, f64)> {
    let scale = (a.radius + b.radius).powi(2);
    let mut e = evaluate(a, b, u, v);
    for _ in 0..opts.max_iter {
        let gnorm = e.grad[0].hypot(e.grad[1]);
        if gnorm <= opts.tol * scale {
            return Ok((e.f, u, v));
        }
        let [[h00, h01], [h10, h11]] = e.hess;
        let det = h00 * h11 - h01 * h10;
        let (du, dv) = if h00 > 0.0 && det > 1e-14 * scale * scale {
            (
                -(h11 * e.grad[0] - h01 * e.grad[1]) / det,
                -(-h10 * e.grad[0] + h00 * e.grad[1]) / det,
            )
        } else {
            (-e.grad[0] / scale, -e.grad[1] / scale)
        };
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let cand = evaluate(a, b, u + step * du, v + step * dv);
            if cand.f < e.f {
                accepted = Some(cand);
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some(cand) => {
                u += step * du;
                v += step * dv;
                e = cand;
            }
            // no further decrease representable: stationary up to rounding
            None if gnorm <= opts.tol.sqrt() * scale => return Ok((e.f, u, v)),
            None => break,
        }
    }
    let gnorm = e.grad[0].hypot(e.grad[1]);
    if gnorm <= opts.tol * scale {
        return Ok((e.f, u, v));
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        gradient_norm: gnorm,
    })
}

const SEEDS: usize = 4;

/// Global minimum distance between two circles.
///
/// The squared distance `F(u, v)` is sampled on a `grid_n x grid_n` grid over
/// the torus of angle pairs; the best grid-local minima are then refined with
/// damped Newton steps. Since `|dd/du| <= R_a` and `|dd/dv| <= R_b`, the grid
/// minimum overestimates the true one by at most `(R_a + R_b) * pi / grid_n`.
pub fn circle_circle_distance(a: &Circle3, b: &Circle3, opts: &MinimizeOpts) -> Result<CircleDistance> {
    let n = opts.grid_n.max(4);
    let pa = Param::new(a);
    let pb = Param::new(b);
    let h = TAU / n as f64;
    let ps: Vec<Vec3> = (0..n).map(|i| pa.point(i as f64 * h)).collect();
    let qs: Vec<Vec3> = (0..n).map(|j| pb.point(j as f64 * h)).collect();

    let mut grid = vec![0.0f64; n * n];
    for (i, p) in ps.iter().enumerate() {
        let row = &mut grid[i * n..(i + 1) * n];
        for (cell, q) in row.iter_mut().zip(&qs) {
            *cell = (p - q).norm_squared();
        }
    }

    // best few periodic-grid local minima, ascending
    let mut seeds: Vec<(f64, usize, usize)> = Vec::with_capacity(SEEDS + 1);
    for i in 0..n {
        for j in 0..n {
            let f = grid[i * n + j];
            if seeds.len() == SEEDS && f >= seeds[SEEDS - 1].0 {
                continue;
            }
            let is_min = (0..9).filter(|&k| k != 4).all(|k| {
                let ii = (i + n + k / 3 - 1) % n;
                let jj = (j + n + k % 3 - 1) % n;
                grid[ii * n + jj] >= f
            });
            if is_min {
                let pos = seeds.partition_point(|s| s.0 <= f);
                seeds.insert(pos, (f, i, j));
                seeds.truncate(SEEDS);
            }
        }
    }

    let grid_min = seeds[0].0.sqrt();
    let certified_gap = (a.radius + b.radius) * h / 2.0;
    let mut best: Option<(f64, f64, f64)> = None;
    let mut last_err = None;
    for &(_, i, j) in &seeds {
        match refine(&pa, &pb, i as f64 * h, j as f64 * h, opts) {
            Ok(r) => {
                if best.is_none_or(|b| r.0 < b.0) {
                    best = Some(r);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    let (f, u, v) = match best {
        Some(b) => b,
        None => return Err(last_err.expect("at least one seed")),
    };
    Ok(CircleDistance {
        distance: f.max(0.0).sqrt().min(grid_min),
        u: u.rem_euclid(TAU),
        v: v.rem_euclid(TAU),
        grid_min,
        certified_gap,
    })
}

/// Outcome of a strict geometric inequality test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Check {
    pub ok: bool,
    pub margin: f64,
}

impl Check {
    pub fn strict(margin: f64, tol: f64) -> Self {
        Self {
            ok: margin > tol,
            margin,
        }
    }
}

/// Two closed solid tori are disjoint iff their central circles are farther
/// apart than the sum of the tube radii.
pub fn tori_disjoint(t1: &SolidTorus, t2: &SolidTorus, tol: f64) -> Result<Check> {
    tori_disjoint_with(t1, t2, tol, &MinimizeOpts::default())
}

pub fn tori_disjoint_with(t1: &SolidTorus, t2: &SolidTorus, tol: f64, opts: &MinimizeOpts) -> Result<Check> {
    let d = circle_circle_distance(&t1.circle, &t2.circle, opts)?;
    Ok(Check::strict(d.distance - (t1.tube_radius + t2.tube_radius), tol))
}

/// Lower bound on `d(C1, C2) - r1 - r2` from the bounding spheres of the
/// central circles.
pub fn disjoint_margin_lower_bound(t1: &SolidTorus, t2: &SolidTorus) -> f64 {
    (t1.center() - t2.center()).norm()
        - (t1.circle.radius + t2.circle.radius)
        - (t1.tube_radius + t2.tube_radius)
}

/// `inner ⊂ outer` test: every point of `inner` is within `r_inner` of its
/// central circle, so the containment holds iff
/// `max_{p in C_inner} d(p, C_outer) + r_inner <= r_outer`.
///
/// The maximum is taken over `n_samples` points of the inner circle and then
/// polished by golden-section search around the best sample.
pub fn torus_contains_torus(outer: &SolidTorus, inner: &SolidTorus, n_samples: usize, tol: f64) -> Check {
    let n = n_samples.max(8);
    let pi = Param::new(&inner.circle);
    let dist = |t: f64| point_circle_distance(&pi.point(t), &outer.circle);
    let h = TAU / n as f64;
    let (mut t_best, mut d_best) = (0.0, f64::NEG_INFINITY);
    for k in 0..n {
        let t = k as f64 * h;
        let d = dist(t);
        if d > d_best {
            d_best = d;
            t_best = t;
        }
    }
    let (mut lo, mut hi) = (t_best - h, t_best + h);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (dist(x1), dist(x2));
    for _ in 0..60 {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = dist(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = dist(x2);
        }
    }
    let worst = d_best.max(f1).max(f2);
    Check::strict(outer.tube_radius - (worst + inner.tube_radius), tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_circle() -> Circle3 {
        Circle3::new(Vec3::zeros(), Vec3::z(), 1.0).unwrap()
    }

    #[test]
    fn point_distance_examples() {
        let c = unit_circle();
        assert_eq!(point_circle_distance(&Vec3::zeros(), &c), 1.0);
        assert_eq!(point_circle_distance(&Vec3::new(2.0, 0.0, 0.0), &c), 1.0);
        assert!((point_circle_distance(&Vec3::new(0.0, 0.0, 1.0), &c) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn concentric_and_identical() {
        let a = unit_circle();
        let b = Circle3::new(Vec3::zeros(), Vec3::z(), 3.0).unwrap();
        let d = circle_circle_distance(&a, &b, &MinimizeOpts::default()).unwrap();
        assert!((d.distance - 2.0).abs() < 1e-12);
        let d = circle_circle_distance(&a, &a, &MinimizeOpts::default()).unwrap();
        assert!(d.distance < 1e-9);
        let flipped = Circle3::new(Vec3::zeros(), -Vec3::z(), 1.0).unwrap();
        let d = circle_circle_distance(&a, &flipped, &MinimizeOpts::default()).unwrap();
        assert!(d.distance < 1e-9);
    }

    #[test]
    fn step_one_pair() {
        let a = Circle3::new(Vec3::zeros(), Vec3::z(), 4.0).unwrap();
        let b = Circle3::new(Vec3::new(5.5, 0.0, 0.0), Vec3::y(), 4.0).unwrap();
        let d = circle_circle_distance(&a, &b, &MinimizeOpts::default()).unwrap();
        assert!((d.distance - 2.5).abs() < 1e-9);
        assert!((a.point_at(d.u) - Vec3::new(4.0, 0.0, 0.0)).norm() < 1e-6);
        assert!((b.point_at(d.v) - Vec3::new(1.5, 0.0, 0.0)).norm() < 1e-6);
        assert!(d.grid_min - d.certified_gap <= d.distance);
    }

    #[test]
    fn disjointness_examples() {
        let t = SolidTorus::from_parts(Vec3::zeros(), Vec3::z(), 4.0, 1.0).unwrap();
        assert!(!tori_disjoint(&t, &t, 1e-9).unwrap().ok);
        let small = SolidTorus::from_parts(Vec3::zeros(), Vec3::z(), 1.0, 0.1).unwrap();
        let big = SolidTorus::from_parts(Vec3::zeros(), Vec3::z(), 10.0, 0.1).unwrap();
        let c = tori_disjoint(&small, &big, 1e-9).unwrap();
        assert!(c.ok);
        assert!((c.margin - 8.8).abs() < 1e-9);
    }

    #[test]
    fn containment_examples() {
        let outer = SolidTorus::from_parts(Vec3::zeros(), Vec3::z(), 4.0, 1.0).unwrap();
        let inner = SolidTorus::from_parts(Vec3::zeros(), Vec3::z(), 4.0, 0.5).unwrap();
        let c = torus_contains_torus(&outer, &inner, 256, 1e-9);
        assert!(c.ok);
        assert!((c.margin - 0.5).abs() < 1e-12);
        assert!(!torus_contains_torus(&outer, &outer, 256, 1e-12).ok);
        // tilted inner circle: worst point is the top, off the sample grid
        let tilted = SolidTorus::from_parts(
            Vec3::new(4.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            0.3,
            0.1,
        )
        .unwrap();
        let c = torus_contains_torus(&outer, &tilted, 7, 0.0);
        assert!((c.margin - 0.6).abs() < 1e-9, "{}", c.margin);
    }
}
