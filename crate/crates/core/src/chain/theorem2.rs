//! The bent-link construction: from one linked pair of congruent tori to a
//! regular simple chain of `2m` congruent links, for every large enough `m`.

use std::f64::consts::PI;

use serde::Serialize;

use super::validate::{validate_chain_with, ChainVerdict, ValidateOpts};
use super::{Chain, ChainKind};
use crate::error::{Error, Result};
use crate::geometry::{
    apply_similarity, tori_disjoint, torus_contains_torus, Similarity, SolidTorus, Vec3,
};

/// Midpoint of the admissible offset interval `(R_B + r_B, 2(R_B - r_B))`.
pub fn default_offset(r_b: f64, big_r_b: f64) -> f64 {
    0.5 * ((big_r_b + r_b) + 2.0 * (big_r_b - r_b))
}

/// Two linked congruent tori: `B1` around the z-axis in the xy-plane, `B2` in
/// the xz-plane centered at `(offset, 0, 0)`.
pub fn build_initial_link(r_b: f64, big_r_b: f64, offset: f64) -> Result<(SolidTorus, SolidTorus)> {
    if !(r_b > 0.0 && big_r_b > 3.0 * r_b && big_r_b.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "need R_B > 3 r_B > 0, got r_B = {r_b}, R_B = {big_r_b}"
        )));
    }
    let (lo, hi) = (big_r_b + r_b, 2.0 * (big_r_b - r_b));
    if !(offset > lo && offset < hi) {
        return Err(Error::InvalidParams(format!(
            "offset A = {offset} must lie in the open interval ({lo}, {hi})"
        )));
    }
    let b1 = SolidTorus::from_parts(Vec3::zeros(), Vec3::z(), big_r_b, r_b)?;
    let b2 = SolidTorus::from_parts(Vec3::new(offset, 0.0, 0.0), Vec3::y(), big_r_b, r_b)?;
    Ok((b1, b2))
}

/// Intersection `Q_ψ` of the y-axis turned by `ψ` about the z-axis with the
/// line through `(A, 0, 0)` parallel to the y-axis turned by `-ψ` about the
/// vertical line through that point.
pub fn psi_center(offset: f64, psi: f64) -> Vec3 {
    Vec3::new(offset / 2.0, -offset / (2.0 * psi.tan()), 0.0)
}

fn bend(b2: &SolidTorus, psi: f64) -> SolidTorus {
    apply_similarity(&Similarity::rotation_about(b2.center(), Vec3::z(), -psi), b2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Psi0Sample {
    pub psi: f64,
    /// `|OQ_ψ|`.
    pub oq: f64,
    /// `min(|OQ_ψ| - (R_B + r_B), clearance between B1 and the bent B2)`.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Psi0Certificate {
    pub psi0: f64,
    /// Predicate evaluations on `(0, psi0]`, ascending in `psi`.
    pub samples: Vec<Psi0Sample>,
    pub min_margin: f64,
}

fn psi_sample(b1: &SolidTorus, b2: &SolidTorus, psi: f64) -> Result<Psi0Sample> {
    let offset = b2.center().x;
    let oq = psi_center(offset, psi).norm();
    let reach = b1.circle.radius + b1.tube_radius;
    let clearance = tori_disjoint(b1, &bend(b2, psi), 0.0)?.margin;
    Ok(Psi0Sample {
        psi,
        oq,
        margin: (oq - reach).min(clearance),
    })
}

const PSI_SAMPLES: usize = 1024;

/// Largest `ψ0` such that the bent pair stays disjoint and `|OQ_ψ|` exceeds
/// `R_B + r_B` for every sampled `ψ ∈ (0, ψ0]`, with margin above `tol`.
pub fn find_psi0(b1: &SolidTorus, b2: &SolidTorus, tol: f64) -> Result<f64> {
    certify_psi0(b1, b2, tol).map(|c| c.psi0)
}

/// [`find_psi0`] with the evaluated samples.
///
/// Scans `ψ_i = iπ/1024` upward until the predicate first fails, bisects the
/// failing bracket, then re-checks a dense set of points in the last bracket.
pub fn certify_psi0(b1: &SolidTorus, b2: &SolidTorus, tol: f64) -> Result<Psi0Certificate> {
    let h = PI / PSI_SAMPLES as f64;
    let mut samples = Vec::new();
    let mut bad = None;
    for i in 1..PSI_SAMPLES {
        let s = psi_sample(b1, b2, i as f64 * h)?;
        if s.margin > tol {
            samples.push(s);
        } else {
            bad = Some(s.psi);
            break;
        }
    }
    if samples.is_empty() {
        // the grid is coarser than the admissible range; look below it
        let mut psi = h / 2.0;
        while psi > 1e-6 {
            let s = psi_sample(b1, b2, psi)?;
            if s.margin > tol {
                samples.push(s);
                bad = Some(2.0 * psi);
                break;
            }
            psi /= 2.0;
        }
        if samples.is_empty() || samples[0].psi >= PI / 64.0 {
            return Err(Error::NotFound(
                "no rotation angle below pi/64 keeps the bent link disjoint".into(),
            ));
        }
    }
    let mut lo = samples.last().expect("non-empty").psi;
    let Some(mut hi) = bad else {
        return Err(Error::NotFound("predicate never fails on (0, pi)".into()));
    };
    let lo_start = lo;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if psi_sample(b1, b2, mid)?.margin > tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    for i in 1..=16 {
        let psi = lo_start + (lo - lo_start) * i as f64 / 16.0;
        let s = psi_sample(b1, b2, psi)?;
        if s.margin <= tol {
            return Err(Error::NotFound(format!(
                "predicate fails at psi = {psi} inside the certified bracket"
            )));
        }
        samples.push(s);
    }
    let min_margin = samples.iter().map(|s| s.margin).fold(f64::INFINITY, f64::min);
    Ok(Psi0Certificate {
        psi0: lo,
        samples,
        min_margin,
    })
}

/// Smallest integer `m` with `m > π / (2 ψ0)`.
pub fn minimal_m(psi0: f64) -> usize {
    (PI / (2.0 * psi0)).floor() as usize + 1
}

/// A chain produced by [`build_theorem2_chain`], with its construction data.
#[derive(Debug, Clone)]
pub struct BentChain {
    pub chain: Chain,
    pub verdict: ChainVerdict,
    pub r_b: f64,
    pub big_r_b: f64,
    pub offset: f64,
    pub psi0: f64,
    pub psi: f64,
    pub m: usize,
    /// Center `Q_ψ` of the chain's core circle.
    pub center: Vec3,
}

/// Bends the initial link by `ψ = π/(2m)` and completes it by rotations about
/// the vertical line through `Q_ψ` to `2m` links.
///
/// The ambient torus has core circle `C_ψ` (center `Q_ψ`, radius `|OQ_ψ|`)
/// and tube radius at the middle of `(R_B + r_B, |OQ_ψ|)`.
pub fn build_theorem2_chain(r_b: f64, big_r_b: f64, offset: Option<f64>, m: Option<usize>) -> Result<BentChain> {
    let offset = offset.unwrap_or_else(|| default_offset(r_b, big_r_b));
    let (b1, b2) = build_initial_link(r_b, big_r_b, offset)?;
    let tol = 1e-9 * b1.diameter();
    let psi0 = find_psi0(&b1, &b2, tol)?;
    let threshold = PI / (2.0 * psi0);
    let m = match m {
        Some(m) if (m as f64) > threshold => m,
        Some(m) => {
            return Err(Error::InvalidParams(format!(
                "m = {m} must exceed pi / (2 psi0) = {threshold:.6}"
            )))
        }
        None => minimal_m(psi0),
    };
    let psi = PI / (2.0 * m as f64);
    let center = psi_center(offset, psi);
    let oq = center.norm();

    let t1 = b1;
    let t2 = bend(&b2, psi);
    let mut links = Vec::with_capacity(2 * m);
    for k in 0..m {
        let rot = Similarity::rotation_about(center, Vec3::z(), -2.0 * PI * k as f64 / m as f64);
        links.push(apply_similarity(&rot, &t1));
        links.push(apply_similarity(&rot, &t2));
    }
    let tube = 0.5 * ((big_r_b + r_b) + oq);
    let ambient = SolidTorus::from_parts(center, Vec3::z(), oq, tube)?;
    let chain = Chain::new(ambient, links, ChainKind::Regular)?;
    let verdict = validate_chain_with(&chain, &ValidateOpts::for_chain(&chain));
    if !verdict.passed() {
        let first = verdict.summary().failure.unwrap_or_default();
        return Err(Error::ValidationFailed(first));
    }
    Ok(BentChain {
        chain,
        verdict,
        r_b,
        big_r_b,
        offset,
        psi0,
        psi,
        m,
        center,
    })
}

/// Torus similar to the `(r_B, R_B)` torus sharing the chain's core circle;
/// it contains every link once `sin(π/m) < r_B / R_B`.
pub fn enclosing_similar_torus(chain: &Chain, r_b: f64, big_r_b: f64) -> Result<SolidTorus> {
    let m = chain.k() / 2;
    let lhs = (PI / m as f64).sin();
    if !(lhs < r_b / big_r_b) {
        return Err(Error::PreconditionFailed(format!(
            "sin(pi/{m}) = {lhs:.6} must be below r_B / R_B = {:.6}",
            r_b / big_r_b
        )));
    }
    let core = chain.ambient.circle;
    let tube = r_b * core.radius / big_r_b;
    let enclosing = SolidTorus::new(core, tube)?;
    if !(tube > big_r_b + r_b) {
        return Err(Error::ValidationFailed(format!(
            "enclosing tube {tube} does not exceed R_B + r_B = {}",
            big_r_b + r_b
        )));
    }
    let tol = 1e-9 * enclosing.diameter();
    if let Some(i) = chain
        .links
        .iter()
        .position(|l| !torus_contains_torus(&enclosing, l, 512, tol).ok)
    {
        return Err(Error::ValidationFailed(format!(
            "link {} is not inside the enclosing torus",
            i + 1
        )));
    }
    Ok(enclosing)
}
