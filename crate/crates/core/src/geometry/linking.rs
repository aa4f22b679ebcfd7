use std::f64::consts::{PI, TAU};

use super::primitives::{Circle3, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkVerdict {
    Linked,
    Unlinked,
    /// A crossing sits on the boundary of the spanning disk, or the circle is
    /// tangent to the other circle's plane.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkReport {
    pub verdict: LinkVerdict,
    /// Number of crossings of `a` with the plane of `b` (0 or 2; 0 for coplanar).
    pub crossings: usize,
    /// Number of those crossings strictly inside the disk bounded by `b`.
    pub inside: usize,
    /// Distance of the configuration from the nearest degenerate one.
    pub margin: f64,
}

fn default_tol(a: &Circle3, b: &Circle3) -> f64 {
    1e-9 * (a.radius + b.radius)
}

/// Linking predicate for two disjoint round circles.
pub fn circles_linked(a: &Circle3, b: &Circle3) -> LinkVerdict {
    link_report(a, b, default_tol(a, b)).verdict
}

/// Counts how many points of `a ∩ aff(b)` fall inside the open disk bounded by
/// `b`. For disjoint round circles an odd count means linked.
pub fn link_report(a: &Circle3, b: &Circle3, tol: f64) -> LinkReport {
    let (e1, e2) = a.frame();
    let d0 = b.normal.dot(&(a.center - b.center));
    let alpha = b.normal.dot(&e1);
    let beta = b.normal.dot(&e2);
    let amp = a.radius * alpha.hypot(beta);

    if amp <= tol && d0.abs() <= tol {
        // coplanar: disjoint coplanar circles never link
        let dc = (a.center - b.center).norm();
        let gap = (dc - a.radius - b.radius)
            .max((a.radius - b.radius).abs() - dc)
            .max(0.0);
        return LinkReport {
            verdict: LinkVerdict::Unlinked,
            crossings: 0,
            inside: 0,
            margin: gap,
        };
    }
    let slack = amp - d0.abs();
    if slack < -tol {
        return LinkReport {
            verdict: LinkVerdict::Unlinked,
            crossings: 0,
            inside: 0,
            margin: -slack,
        };
    }
    if slack <= tol {
        return LinkReport {
            verdict: LinkVerdict::Degenerate,
            crossings: 1,
            inside: 0,
            margin: slack.abs(),
        };
    }
    let phi = beta.atan2(alpha);
    let half = (-d0 / amp).clamp(-1.0, 1.0).acos();
    let mut inside = 0;
    let mut margin = slack;
    for t in [phi + half, phi - half] {
        let x: Vec3 = a.center + (e1 * t.cos() + e2 * t.sin()) * a.radius;
        let rho = (x - b.center).norm();
        margin = margin.min((rho - b.radius).abs());
        if rho < b.radius {
            inside += 1;
        }
    }
    let verdict = if margin <= tol {
        LinkVerdict::Degenerate
    } else if inside == 1 {
        LinkVerdict::Linked
    } else {
        LinkVerdict::Unlinked
    };
    LinkReport {
        verdict,
        crossings: 2,
        inside,
        margin,
    }
}

/// Gauss linking integral by the periodic trapezoid rule on `n_quad²` nodes.
pub fn linking_number_gauss(a: &Circle3, b: &Circle3, n_quad: usize) -> f64 {
    let n = n_quad.max(4);
    let h = TAU / n as f64;
    let sample = |c: &Circle3| -> Vec<(Vec3, Vec3)> {
        let (e1, e2) = c.frame();
        (0..n)
            .map(|k| {
                let (s, co) = (k as f64 * h).sin_cos();
                (
                    c.center + (e1 * co + e2 * s) * c.radius,
                    (e2 * co - e1 * s) * c.radius,
                )
            })
            .collect()
    };
    let pa = sample(a);
    let pb = sample(b);
    let mut total = 0.0;
    for (x, dx) in &pa {
        let cross_terms: f64 = pb
            .iter()
            .map(|(y, dy)| {
                let r = x - y;
                r.dot(&dx.cross(dy)) / r.norm().powi(3)
            })
            .sum();
        total += cross_terms;
    }
    total * h * h / (4.0 * PI)
}
