//! Similarity systems generated by a chain, their prelimit covers and
//! attractor samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::chain::{Chain, ChainVerdict};
use crate::error::{Error, Result};
use crate::geometry::{apply_similarity, Similarity, SolidTorus, Vec3};

/// Cover enumeration budget.
pub const DEFAULT_BUDGET: u128 = 1_000_000;

/// The unique orientation-preserving similarity carrying `ambient` onto
/// `link`: core circle to core circle, normal to normal, and the ambient
/// marked point (angle 0 of its canonical frame) to angle `phase` on the
/// link's core circle.
pub fn extract_similarity(ambient: &SolidTorus, link: &SolidTorus, phase: f64) -> Result<Similarity> {
    let (ra, rl) = (ambient.ratio(), link.ratio());
    if (ra - rl).abs() > 1e-9 * ra {
        return Err(Error::NotSimilar { link: rl, ambient: ra });
    }
    let (a1, a2) = ambient.circle.frame();
    let (l1, l2) = link.circle.frame();
    let (s, c) = phase.sin_cos();
    let f1 = l1 * c + l2 * s;
    let f2 = l2 * c - l1 * s;
    let src = nalgebra::Matrix3::from_columns(&[a1, a2, ambient.circle.normal]);
    let dst = nalgebra::Matrix3::from_columns(&[f1, f2, link.circle.normal]);
    let rotation = dst * src.transpose();
    let scale = link.circle.radius / ambient.circle.radius;
    let translation = link.center() - rotation * ambient.center() * scale;
    Similarity::new(scale, rotation, translation)
}

/// `(T; S_1, ..., S_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IfsSystem {
    pub ambient: SolidTorus,
    pub maps: Vec<Similarity>,
}

impl IfsSystem {
    /// Maps from the chain's ambient torus onto each link, all with the same
    /// phase.
    pub fn from_chain(chain: &Chain, phase: f64) -> Result<Self> {
        let maps = chain
            .links
            .iter()
            .map(|l| extract_similarity(&chain.ambient, l, phase))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            ambient: chain.ambient,
            maps,
        })
    }

    pub fn k(&self) -> usize {
        self.maps.len()
    }

    pub fn scales(&self) -> Vec<f64> {
        self.maps.iter().map(|m| m.scale).collect()
    }

    pub fn max_scale(&self) -> f64 {
        self.maps.iter().map(|m| m.scale).fold(0.0, f64::max)
    }

    /// `s_1² + ... + s_k²`.
    pub fn sum_sq(&self) -> f64 {
        self.maps.iter().map(|m| m.scale * m.scale).sum()
    }

    /// A validated chain whose coefficients satisfy `Σ s_i² < 1`.
    pub fn certified(&self, verdict: &ChainVerdict) -> bool {
        verdict.passed() && self.sum_sq() < 1.0
    }

    /// `S_{i_1} ∘ ... ∘ S_{i_λ}`; the empty word is the identity.
    pub fn word_map(&self, word: &CoverWord) -> Similarity {
        word.letters
            .iter()
            .fold(Similarity::identity(), |acc, &i| acc.compose(&self.maps[i]))
    }
}

/// Address `(i_1, ..., i_λ)` of a cover torus; letters are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoverWord {
    pub letters: Vec<usize>,
}

impl CoverWord {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn parent(&self) -> Option<CoverWord> {
        let n = self.letters.len();
        (n > 0).then(|| CoverWord {
            letters: self.letters[..n - 1].to_vec(),
        })
    }
}

impl std::fmt::Display for CoverWord {
    /// 1-based letters joined by `.`; the empty word prints as `-`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "-");
        }
        let parts: Vec<String> = self.letters.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// The `k^λ` tori of `M_λ`, words in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverLevel {
    pub ambient: SolidTorus,
    pub lambda: usize,
    pub words: Vec<CoverWord>,
    pub tori: Vec<SolidTorus>,
}

fn check_budget(k: usize, lambda: usize, budget: u128) -> Result<()> {
    let requested = (k as u128).checked_pow(lambda as u32).unwrap_or(u128::MAX);
    if requested > budget {
        return Err(Error::BudgetExceeded { requested, budget });
    }
    Ok(())
}

fn word_maps(sys: &IfsSystem, lambda: usize) -> Vec<(CoverWord, Similarity)> {
    let mut level = vec![(CoverWord { letters: Vec::new() }, Similarity::identity())];
    for _ in 0..lambda {
        level = level
            .iter()
            .flat_map(|(w, s)| {
                sys.maps.iter().enumerate().map(move |(i, m)| {
                    let mut letters = w.letters.clone();
                    letters.push(i);
                    (CoverWord { letters }, s.compose(m))
                })
            })
            .collect();
    }
    level
}

pub fn iterate_cover(sys: &IfsSystem, lambda: usize, budget: u128) -> Result<CoverLevel> {
    check_budget(sys.k(), lambda, budget)?;
    let (words, tori) = word_maps(sys, lambda)
        .into_iter()
        .map(|(w, s)| {
            let t = apply_similarity(&s, &sys.ambient);
            (w, t)
        })
        .unzip();
    Ok(CoverLevel {
        ambient: sys.ambient,
        lambda,
        words,
        tori,
    })
}

/// `n_points` images of the ambient marked point under uniformly random words
/// of length `depth`. Point `i` draws its word from stream `i` of a ChaCha8
/// generator seeded with `seed`, so the output does not depend on evaluation
/// order.
pub fn attractor_sample(sys: &IfsSystem, n_points: usize, depth: usize, seed: u64) -> Vec<Vec3> {
    let base = sys.ambient.circle.point_at(0.0);
    let k = sys.k();
    (0..n_points)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let word: Vec<usize> = (0..depth).map(|_| rng.gen_range(0..k)).collect();
            word.iter()
                .rev()
                .fold(base, |p, &letter| sys.maps[letter].apply_point(&p))
        })
        .collect()
}

/// Normalized cover sum `Σ_w (diam S_w(T) / diam T)^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoranSum {
    /// `(Σ s_i^exponent)^λ`.
    pub closed_form: f64,
    /// Sum over the enumerated level-λ tori, when within budget.
    pub enumerated: Option<f64>,
}

pub fn moran_cover_sum(sys: &IfsSystem, lambda: usize, exponent: f64, budget: u128) -> MoranSum {
    let base: f64 = sys.maps.iter().map(|m| m.scale.powf(exponent)).sum();
    let closed_form = base.powi(lambda as i32);
    let enumerated = iterate_cover(sys, lambda, budget).ok().map(|level| {
        let d = sys.ambient.diameter();
        level.tori.iter().map(|t| (t.diameter() / d).powf(exponent)).sum()
    });
    MoranSum {
        closed_form,
        enumerated,
    }
}

/// Root `d` of `Σ s_i^d = 1`, by bisection to `tol`.
pub fn similarity_dimension(sys: &IfsSystem, tol: f64) -> f64 {
    let g = |d: f64| sys.maps.iter().map(|m| m.scale.powf(d)).sum::<f64>() - 1.0;
    let (mut lo, mut hi) = (0.0, 1.0);
    while g(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{regular_chain_from_params, RegularChainParams};
    use crate::geometry::{torus_contains_torus, Transform};

    fn system(m: usize, s: f64) -> IfsSystem {
        let p = RegularChainParams::new(1.0, 0.3, m, s).unwrap();
        IfsSystem::from_chain(&regular_chain_from_params(&p).unwrap(), 0.0).unwrap()
    }

    #[test]
    fn extract_identity() {
        let t = SolidTorus::from_parts(Vec3::new(1.0, 2.0, 3.0), Vec3::new(0.2, 0.1, 1.0), 2.0, 0.5).unwrap();
        let s = extract_similarity(&t, &t, 0.0).unwrap();
        assert!((s.scale - 1.0).abs() < 1e-15);
        assert!((s.rotation.matrix() - nalgebra::Matrix3::identity()).norm() < 1e-14);
        assert!(s.translation.norm() < 1e-14);
    }

    #[test]
    fn extract_round_trip_and_phase() {
        let a = SolidTorus::from_parts(Vec3::zeros(), Vec3::z(), 1.0, 0.3).unwrap();
        let l = SolidTorus::from_parts(Vec3::new(1.0, 0.0, 0.0), Vec3::x(), 0.2, 0.06).unwrap();
        for phase in [0.0, 1.0, -2.5] {
            let s = extract_similarity(&a, &l, phase).unwrap();
            let img = a.transformed(&s);
            assert!((img.center() - l.center()).norm() < 1e-12);
            assert!((img.circle.normal - l.circle.normal).norm() < 1e-12);
            assert!((img.circle.radius - l.circle.radius).abs() < 1e-12);
            assert!((img.tube_radius - l.tube_radius).abs() < 1e-12);
            let marked = s.apply_point(&a.circle.point_at(0.0));
            assert!((marked - l.circle.point_at(phase)).norm() < 1e-12);
        }
    }

    #[test]
    fn extract_rejects_dissimilar() {
        let a = SolidTorus::from_parts(Vec3::zeros(), Vec3::z(), 1.0, 0.3).unwrap();
        let l = SolidTorus::from_parts(Vec3::zeros(), Vec3::z(), 0.2, 0.1).unwrap();
        assert!(matches!(extract_similarity(&a, &l, 0.0), Err(Error::NotSimilar { .. })));
    }

    #[test]
    fn low_levels() {
        let sys = system(10, 0.2);
        let l0 = iterate_cover(&sys, 0, DEFAULT_BUDGET).unwrap();
        assert_eq!(l0.tori, vec![sys.ambient]);
        let chain = regular_chain_from_params(&RegularChainParams::new(1.0, 0.3, 10, 0.2).unwrap()).unwrap();
        let l1 = iterate_cover(&sys, 1, DEFAULT_BUDGET).unwrap();
        for (t, link) in l1.tori.iter().zip(&chain.links) {
            assert!((t.center() - link.center()).norm() < 1e-12);
            assert!(t.circle.normal.cross(&link.circle.normal).norm() < 1e-12);
        }
        let l2 = iterate_cover(&sys, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(l2.tori.len(), 400);
        for t in &l2.tori {
            assert!((t.diameter() - 0.04 * sys.ambient.diameter()).abs() < 1e-12);
        }
        assert_eq!(l2.words[21].to_string(), "2.2");
    }

    #[test]
    fn budget_guard() {
        let sys = system(10, 0.2);
        assert!(matches!(iterate_cover(&sys, 5, DEFAULT_BUDGET), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn children_nest_in_parents() {
        // containment holds: s (1 + rho) < rho
        let sys = system(10, 0.2);
        let l1 = iterate_cover(&sys, 1, DEFAULT_BUDGET).unwrap();
        let l2 = iterate_cover(&sys, 2, DEFAULT_BUDGET).unwrap();
        for (w, t) in l2.words.iter().zip(&l2.tori).step_by(7) {
            let parent = &l1.tori[w.letters[0]];
            let tol = 1e-9 * parent.diameter();
            assert!(torus_contains_torus(parent, t, 256, -tol).ok, "{w}");
        }
    }

    #[test]
    fn samples_are_reproducible_and_nested() {
        let sys = system(10, 0.2);
        let a = attractor_sample(&sys, 500, 4, 7);
        assert_eq!(a, attractor_sample(&sys, 500, 4, 7));
        assert_ne!(a, attractor_sample(&sys, 500, 4, 8));
        let l1 = iterate_cover(&sys, 1, DEFAULT_BUDGET).unwrap();
        for p in &a {
            assert!(l1.tori.iter().any(|t| t.contains_point(p)));
        }
    }

    #[test]
    fn moran_sums() {
        let sys = system(10, 0.1);
        for (lambda, want) in [(0, 1.0), (1, 0.2), (2, 0.04), (3, 0.008)] {
            let m = moran_cover_sum(&sys, lambda, 2.0, DEFAULT_BUDGET);
            assert!((m.closed_form - want).abs() <= 1e-12 * want);
            assert!((m.enumerated.unwrap() - want).abs() <= 1e-12 * want);
        }
        assert_eq!(moran_cover_sum(&sys, 6, 2.0, DEFAULT_BUDGET).enumerated, None);
    }

    #[test]
    fn dimension_examples() {
        let sys = system(10, 0.1);
        let d = similarity_dimension(&sys, 1e-12);
        assert!((d - 20f64.ln() / 10f64.ln()).abs() < 1e-9);
        let chain = regular_chain_from_params(&RegularChainParams::new(1.0, 0.3, 2, 0.5).unwrap()).unwrap();
        let mut two = IfsSystem::from_chain(&chain, 0.0).unwrap();
        two.maps.truncate(2);
        assert!((similarity_dimension(&two, 1e-12) - 1.0).abs() < 1e-9);
    }
}
