use std::f64::consts::TAU;

use serde::Serialize;

use super::{Chain, ChainKind};
use crate::geometry::{
    apply_similarity, disjoint_margin_lower_bound, link_report, point_circle_distance,
    tori_disjoint_with, torus_contains_torus, LinkVerdict, MinimizeOpts, Similarity, SolidTorus,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateOpts {
    /// Absolute geometric tolerance.
    pub tol: f64,
    pub minimize: MinimizeOpts,
    pub containment_samples: usize,
    /// Reduce pair checks to representatives when the chain is verified to
    /// be invariant under a rotation taking link `j` to link `j + 2`.
    pub use_symmetry: bool,
}

impl ValidateOpts {
    /// Default tolerance: `1e-9` of the ambient diameter.
    pub fn for_chain(chain: &Chain) -> Self {
        Self {
            tol: 1e-9 * chain.ambient.diameter(),
            minimize: MinimizeOpts::default(),
            containment_samples: 512,
            use_symmetry: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub family: &'static str,
    pub links: Vec<usize>,
    pub reason: String,
}

/// Outcome of [`validate_chain`].
///
/// Pair margins are listed for `i < j` in lexicographic order. For pairs
/// whose bounding spheres are already separated, the disjointness margin is
/// the bounding-sphere lower bound instead of the exact value. Equality
/// families (`polygon`, `regularity`) report `tol - deviation`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainVerdict {
    pub disjoint_ok: bool,
    pub linking_ok: bool,
    pub containment_ok: bool,
    pub polygon_ok: bool,
    pub regularity_ok: bool,
    pub disjoint_margins: Vec<f64>,
    pub linking_margins: Vec<f64>,
    pub containment_margins: Vec<f64>,
    pub polygon_margins: Vec<f64>,
    pub regularity_margins: Vec<f64>,
    pub failures: Vec<Failure>,
}

/// Compact form of a verdict, for large scans.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictSummary {
    pub disjoint_ok: bool,
    pub linking_ok: bool,
    pub containment_ok: bool,
    pub polygon_ok: bool,
    pub regularity_ok: bool,
    pub disjoint_margin: f64,
    pub linking_margin: f64,
    pub containment_margin: f64,
    pub failure: Option<String>,
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

impl ChainVerdict {
    pub fn passed(&self) -> bool {
        self.disjoint_ok && self.linking_ok && self.containment_ok && self.polygon_ok && self.regularity_ok
    }

    pub fn summary(&self) -> VerdictSummary {
        VerdictSummary {
            disjoint_ok: self.disjoint_ok,
            linking_ok: self.linking_ok,
            containment_ok: self.containment_ok,
            polygon_ok: self.polygon_ok,
            regularity_ok: self.regularity_ok,
            disjoint_margin: min_of(&self.disjoint_margins),
            linking_margin: min_of(&self.linking_margins),
            containment_margin: min_of(&self.containment_margins),
            failure: self.failures.first().map(|f| {
                let idx: Vec<String> = f.links.iter().map(|i| (i + 1).to_string()).collect();
                format!("{} [{}]: {}", f.family, idx.join(","), f.reason)
            }),
        }
    }
}

fn same_torus(a: &SolidTorus, b: &SolidTorus, tol: f64) -> bool {
    let scale = a.circle.radius.max(1.0);
    (a.center() - b.center()).norm() <= tol
        && a.circle.normal.cross(&b.circle.normal).norm() * scale <= tol
        && (a.circle.radius - b.circle.radius).abs() <= tol
        && (a.tube_radius - b.tube_radius).abs() <= tol
}

/// Rotation about the ambient axis taking link 0 to link 2, if it maps every
/// link `j` onto link `j + 2` (mod k) within `tol`.
pub fn has_step_two_symmetry(chain: &Chain, tol: f64) -> Option<Similarity> {
    let k = chain.k();
    if !k.is_multiple_of(2) {
        return None;
    }
    let axis = chain.ambient.circle.normal;
    let q = chain.ambient.center();
    let a = chain.links[0].center() - q;
    let b = chain.links[2 % k].center() - q;
    let angle = a.cross(&b).dot(&axis).atan2(a.dot(&b));
    let rot = Similarity::rotation_about(q, axis, angle);
    (0..k)
        .all(|j| same_torus(&apply_similarity(&rot, &chain.links[j]), &chain.links[(j + 2) % k], tol))
        .then_some(rot)
}

pub fn validate_chain(chain: &Chain, tol: f64) -> ChainVerdict {
    let opts = ValidateOpts {
        tol,
        ..ValidateOpts::for_chain(chain)
    };
    validate_chain_with(chain, &opts)
}

struct PairResult {
    disjoint: f64,
    disjoint_note: Option<String>,
    link_margin: f64,
    link_verdict: LinkVerdict,
}

fn check_pair(chain: &Chain, i: usize, j: usize, opts: &ValidateOpts) -> PairResult {
    let (a, b) = (&chain.links[i], &chain.links[j]);
    let lb = disjoint_margin_lower_bound(a, b);
    let (disjoint, disjoint_note) = if lb > opts.tol {
        (lb, None)
    } else {
        match tori_disjoint_with(a, b, opts.tol, &opts.minimize) {
            Ok(c) => (c.margin, None),
            Err(e) => (f64::NEG_INFINITY, Some(e.to_string())),
        }
    };
    let rep = link_report(&a.circle, &b.circle, opts.tol);
    PairResult {
        disjoint,
        disjoint_note,
        link_margin: rep.margin,
        link_verdict: rep.verdict,
    }
}

/// Checks pairwise disjointness, the cyclic linking pattern, containment in
/// the ambient torus, the regular-polygon placement of centers and, for
/// regular chains, congruence, coplanarity, perpendicularity and tangency.
pub fn validate_chain_with(chain: &Chain, opts: &ValidateOpts) -> ChainVerdict {
    let k = chain.k();
    let tol = opts.tol;
    let symmetric = opts.use_symmetry && has_step_two_symmetry(chain, tol).is_some();
    let mut failures = Vec::new();

    // representatives: pairs with i in {0, 1} when symmetric, all pairs otherwise
    let rep_of = |i: usize, j: usize| -> (usize, usize) {
        if symmetric {
            let shift = i - i % 2;
            (i % 2, (j + k - shift) % k)
        } else {
            (i, j)
        }
    };
    let mut cache: Vec<Option<PairResult>> = (0..k * k).map(|_| None).collect();
    let mut disjoint_margins = Vec::with_capacity(k * (k - 1) / 2);
    let mut linking_margins = Vec::with_capacity(k * (k - 1) / 2);
    let (mut disjoint_ok, mut linking_ok) = (true, true);
    for i in 0..k {
        for j in i + 1..k {
            let (ri, rj) = rep_of(i, j);
            let res = cache[ri * k + rj].get_or_insert_with(|| check_pair(chain, ri, rj, opts));
            disjoint_margins.push(res.disjoint);
            if res.disjoint <= tol {
                disjoint_ok = false;
                failures.push(Failure {
                    family: "disjoint",
                    links: vec![i, j],
                    reason: res
                        .disjoint_note
                        .clone()
                        .unwrap_or_else(|| format!("tube clearance {:e} <= {:e}", res.disjoint, tol)),
                });
            }
            let expected = if chain.should_link(i, j) {
                LinkVerdict::Linked
            } else {
                LinkVerdict::Unlinked
            };
            let ok = res.link_verdict == expected && res.link_margin > tol;
            linking_margins.push(if res.link_verdict == expected {
                res.link_margin
            } else {
                -res.link_margin
            });
            if !ok {
                linking_ok = false;
                failures.push(Failure {
                    family: "linking",
                    links: vec![i, j],
                    reason: format!("expected {:?}, found {:?}", expected, res.link_verdict),
                });
            }
        }
    }

    let mut containment_margins = Vec::with_capacity(k);
    let mut containment_ok = true;
    let mut contained: Vec<Option<f64>> = vec![None; 2];
    for (i, link) in chain.links.iter().enumerate() {
        let margin = if symmetric {
            *contained[i % 2].get_or_insert_with(|| {
                torus_contains_torus(&chain.ambient, &chain.links[i % 2], opts.containment_samples, tol).margin
            })
        } else {
            torus_contains_torus(&chain.ambient, link, opts.containment_samples, tol).margin
        };
        containment_margins.push(margin);
        if margin <= tol {
            containment_ok = false;
            failures.push(Failure {
                family: "containment",
                links: vec![i],
                reason: format!("link leaves the ambient torus (margin {margin:e})"),
            });
        }
    }

    let (polygon_ok, polygon_margins) = check_polygon(chain, tol, &mut failures);
    let (regularity_ok, regularity_margins) = match chain.kind {
        ChainKind::Regular => check_regularity(chain, tol, &mut failures),
        ChainKind::Simple => (true, Vec::new()),
    };

    ChainVerdict {
        disjoint_ok,
        linking_ok,
        containment_ok,
        polygon_ok,
        regularity_ok,
        disjoint_margins,
        linking_margins,
        containment_margins,
        polygon_margins,
        regularity_margins,
        failures,
    }
}

/// Centers on the ambient core circle, at consecutive vertices of a regular
/// k-gon.
fn check_polygon(chain: &Chain, tol: f64, failures: &mut Vec<Failure>) -> (bool, Vec<f64>) {
    let k = chain.k();
    let core = &chain.ambient.circle;
    let (e1, e2) = core.frame();
    let radius = core.radius;
    let angle = |i: usize| {
        let d = chain.links[i].center() - core.center;
        d.dot(&e2).atan2(d.dot(&e1))
    };
    let step = (angle(1) - angle(0) + TAU / 2.0).rem_euclid(TAU) - TAU / 2.0;
    let expected = TAU / k as f64 * step.signum();
    let mut margins = Vec::with_capacity(2 * k);
    let mut ok = true;
    for i in 0..k {
        let off = point_circle_distance(&chain.links[i].center(), core);
        let turn = (angle((i + 1) % k) - angle(i) - expected + TAU / 2.0).rem_euclid(TAU) - TAU / 2.0;
        for (what, dev) in [("center off the core circle", off), ("irregular vertex spacing", turn.abs() * radius)] {
            margins.push(tol - dev);
            if dev > tol {
                ok = false;
                failures.push(Failure {
                    family: "polygon",
                    links: vec![i],
                    reason: format!("{what} (deviation {dev:e})"),
                });
            }
        }
    }
    (ok, margins)
}

/// Congruent links; odd links (1-based) in the core plane; even links in
/// perpendicular planes meeting the core plane in a tangent line of `C_T`.
fn check_regularity(chain: &Chain, tol: f64, failures: &mut Vec<Failure>) -> (bool, Vec<f64>) {
    let core = &chain.ambient.circle;
    let n = core.normal;
    let first = &chain.links[0];
    let mut margins = Vec::new();
    let mut ok = true;
    let mut record = |i: usize, what: &str, dev: f64, margins: &mut Vec<f64>| {
        margins.push(tol - dev);
        if !(dev <= tol) {
            ok = false;
            failures.push(Failure {
                family: "regularity",
                links: vec![i],
                reason: format!("{what} (deviation {dev:e})"),
            });
        }
    };
    for (i, link) in chain.links.iter().enumerate() {
        let c = &link.circle;
        record(i, "major radius differs", (c.radius - first.circle.radius).abs(), &mut margins);
        record(i, "tube radius differs", (link.tube_radius - first.tube_radius).abs(), &mut margins);
        if i % 2 == 0 {
            record(i, "not parallel to the core plane", c.normal.cross(&n).norm() * core.radius, &mut margins);
            record(i, "off the core plane", (c.center - core.center).dot(&n).abs(), &mut margins);
        } else {
            record(i, "not perpendicular to the core plane", c.normal.dot(&n).abs() * core.radius, &mut margins);
            let in_plane = c.normal - n * c.normal.dot(&n);
            let dist = if in_plane.norm() > 0.0 {
                c.normal.dot(&(c.center - core.center)).abs() / in_plane.norm()
            } else {
                f64::INFINITY
            };
            record(i, "plane trace does not touch the core circle", (dist - core.radius).abs(), &mut margins);
        }
    }
    (ok, margins)
}
