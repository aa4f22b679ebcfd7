//! Grid scans of regular self-similar configurations over `(ρ = r_T/R_T, s, m)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{regular_chain_from_params, validate_chain_with, RegularChainParams, ValidateOpts, VerdictSummary};
use crate::error::{Error, Result};
use crate::geometry::MinimizeOpts;

/// Inclusive linear range `lo..=hi` with `steps` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        let d = (self.hi - self.lo) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.lo + d * i as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchGrid {
    pub rho_range: Range,
    pub s_range: Range,
    pub m_list: Vec<usize>,
}

impl SearchGrid {
    pub fn new(rho_range: Range, s_range: Range, m_list: Vec<usize>) -> Result<Self> {
        for (name, r) in [("rho", rho_range), ("s", s_range)] {
            if !(0.0 < r.lo && r.lo < r.hi && r.hi < 1.0 && r.steps >= 2) {
                return Err(Error::InvalidParams(format!(
                    "{name} range must satisfy 0 < lo < hi < 1 with >= 2 steps"
                )));
            }
        }
        if m_list.is_empty() || m_list.iter().any(|&m| m < 2) {
            return Err(Error::InvalidParams("m values must be >= 2".into()));
        }
        Ok(Self {
            rho_range,
            s_range,
            m_list,
        })
    }

    /// `ρ ∈ [0.01, 0.5]` and `s ∈ [0.01, 0.4]` at 100 steps each,
    /// `m ∈ {9, ..., 30} ∪ {40}`.
    pub fn default_grid() -> Self {
        Self::with_resolution(100, (9..=30).chain([40]).collect())
    }

    pub fn with_resolution(steps: usize, m_list: Vec<usize>) -> Self {
        Self {
            rho_range: Range { lo: 0.01, hi: 0.5, steps },
            s_range: Range { lo: 0.01, hi: 0.4, steps },
            m_list,
        }
    }

    pub fn len(&self) -> usize {
        self.rho_range.steps * self.s_range.steps * self.m_list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

const INV_TWO_PI: f64 = 1.0 / (2.0 * PI);

/// Hypotheses, conclusions and the necessary conditions behind the three
/// sufficient bounds for `2ms² < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Thm3Flags {
    /// `s < 1/(2π)`.
    pub s_small: bool,
    /// `2ms² < 1`.
    pub moran_ok: bool,
    /// `ρ < 1/(2π - 1)`.
    pub rho_small: bool,
    /// `2m >= 40`.
    pub many_links: bool,
    /// `s <= ρ/(1 + ρ)`, forced by containment.
    pub containment_bound: bool,
    /// `sin(π/m) > s(1 + ρ)`, forced by disjointness of `T_1`, `T_3`.
    pub chord_bound: bool,
    /// `ms < π`.
    pub ms_below_pi: bool,
    /// `s < 1/(2π) ⇒ 2ms² < 1`.
    pub implication1: bool,
    /// `ρ < 1/(2π-1) ⇒ s < 1/(2π)`.
    pub implication2: bool,
    /// `2m >= 40 ⇒ s < 1/(2π)`.
    pub implication3: bool,
}

impl Thm3Flags {
    pub fn necessary_conditions_hold(&self) -> bool {
        self.containment_bound && self.chord_bound && self.ms_below_pi
    }

    pub fn implications_hold(&self) -> bool {
        self.implication1 && self.implication2 && self.implication3
    }

    /// Names of violated conditions and implications.
    pub fn violations(&self) -> Vec<&'static str> {
        [
            (self.containment_bound, "s <= rho/(1+rho)"),
            (self.chord_bound, "sin(pi/m) > s(1+rho)"),
            (self.ms_below_pi, "ms < pi"),
            (self.implication1, "s < 1/(2pi) => 2ms^2 < 1"),
            (self.implication2, "rho < 1/(2pi-1) => s < 1/(2pi)"),
            (self.implication3, "2m >= 40 => s < 1/(2pi)"),
        ]
        .into_iter()
        .filter(|(ok, _)| !ok)
        .map(|(_, name)| name)
        .collect()
    }
}

/// Evaluates the three implications and the necessary conditions at a
/// parameter point. The implications are only guaranteed for valid chains.
pub fn theorem3_checks(rho: f64, m: usize, s: f64) -> Thm3Flags {
    let mf = m as f64;
    let s_small = s < INV_TWO_PI;
    let moran_ok = 2.0 * mf * s * s < 1.0;
    let rho_small = rho < 1.0 / (2.0 * PI - 1.0);
    let many_links = 2 * m >= 40;
    Thm3Flags {
        s_small,
        moran_ok,
        rho_small,
        many_links,
        containment_bound: s <= rho / (1.0 + rho),
        chord_bound: (PI / mf).sin() > s * (1.0 + rho),
        ms_below_pi: mf * s < PI,
        implication1: !s_small || moran_ok,
        implication2: !rho_small || s_small,
        implication3: !many_links || s_small,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityCell {
    pub rho: f64,
    pub s: f64,
    pub m: usize,
    pub valid: bool,
    /// `valid && 2ms² < 1`.
    pub certified: bool,
    pub verdict: VerdictSummary,
    pub thm3: Thm3Flags,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOpts {
    /// Geometric tolerance relative to the ambient diameter.
    pub tol_rel: f64,
    pub minimize: MinimizeOpts,
}

impl Default for ScanOpts {
    fn default() -> Self {
        Self {
            tol_rel: 1e-9,
            minimize: MinimizeOpts {
                grid_n: 64,
                ..MinimizeOpts::default()
            },
        }
    }
}

pub fn evaluate_cell(rho: f64, s: f64, m: usize, opts: &ScanOpts) -> Result<FeasibilityCell> {
    let params = RegularChainParams::new(1.0, rho, m, s)?;
    let chain = regular_chain_from_params(&params)?;
    let mut vopts = ValidateOpts::for_chain(&chain);
    vopts.tol = opts.tol_rel * chain.ambient.diameter();
    vopts.minimize = opts.minimize;
    let verdict = validate_chain_with(&chain, &vopts);
    let valid = verdict.passed();
    let thm3 = theorem3_checks(rho, m, s);
    Ok(FeasibilityCell {
        rho,
        s,
        m,
        valid,
        certified: valid && thm3.moran_ok,
        verdict: verdict.summary(),
        thm3,
    })
}

/// Builds and validates the regular chain (with `R_T = 1`) of every grid
/// cell. Cells come back ordered by `m`, then `ρ`, then `s`.
pub fn scan(grid: &SearchGrid, tol_rel: f64) -> Result<Vec<FeasibilityCell>> {
    scan_with(
        grid,
        &ScanOpts {
            tol_rel,
            ..ScanOpts::default()
        },
    )
}

pub fn scan_with(grid: &SearchGrid, opts: &ScanOpts) -> Result<Vec<FeasibilityCell>> {
    let rhos = grid.rho_range.values();
    let ss = grid.s_range.values();
    let ss = &ss;
    let points: Vec<(usize, f64, f64)> = grid
        .m_list
        .iter()
        .flat_map(|&m| {
            rhos.iter()
                .flat_map(move |&r| ss.iter().map(move |&s| (m, r, s)))
        })
        .collect();
    points
        .par_iter()
        .map(|&(m, rho, s)| evaluate_cell(rho, s, m, opts))
        .collect()
}

/// Lowest valid `s` on one `(ρ, m)` grid row and the failure just below it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerEdge {
    pub rho: f64,
    pub s_first_valid: f64,
    pub failure_below: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MSummary {
    pub m: usize,
    pub links: usize,
    pub cells: usize,
    pub valid: usize,
    pub certified: usize,
    pub rho_min: Option<f64>,
    pub rho_max: Option<f64>,
    pub s_min: Option<f64>,
    pub s_max: Option<f64>,
    pub lower_edges: Vec<LowerEdge>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionReport {
    pub per_m: Vec<MSummary>,
    /// Valid cells breaking a necessary condition or an implication; any
    /// entry here is a bug.
    pub violations: Vec<String>,
}

impl RegionReport {
    pub fn for_m(&self, m: usize) -> Option<&MSummary> {
        self.per_m.iter().find(|s| s.m == m)
    }
}

pub fn certified_region_report(cells: &[FeasibilityCell]) -> RegionReport {
    let mut by_m: BTreeMap<usize, Vec<&FeasibilityCell>> = BTreeMap::new();
    for c in cells {
        by_m.entry(c.m).or_default().push(c);
    }
    let mut violations = Vec::new();
    let per_m = by_m
        .into_iter()
        .map(|(m, cells)| {
            let valid: Vec<&&FeasibilityCell> = cells.iter().filter(|c| c.valid).collect();
            for c in &valid {
                for v in c.thm3.violations() {
                    violations.push(format!("rho={} s={} m={}: {v}", c.rho, c.s, c.m));
                }
            }
            let ext = |f: fn(&FeasibilityCell) -> f64, max: bool| {
                valid.iter().map(|c| f(c)).reduce(if max { f64::max } else { f64::min })
            };
            let mut rows: BTreeMap<u64, Vec<&FeasibilityCell>> = BTreeMap::new();
            for c in &cells {
                rows.entry(c.rho.to_bits()).or_default().push(c);
            }
            let lower_edges = rows
                .into_values()
                .filter_map(|mut row| {
                    row.sort_by(|a, b| a.s.total_cmp(&b.s));
                    let first = row.iter().position(|c| c.valid)?;
                    Some(LowerEdge {
                        rho: row[first].rho,
                        s_first_valid: row[first].s,
                        failure_below: first
                            .checked_sub(1)
                            .and_then(|i| row[i].verdict.failure.clone()),
                    })
                })
                .collect();
            MSummary {
                m,
                links: 2 * m,
                cells: cells.len(),
                valid: valid.len(),
                certified: valid.iter().filter(|c| c.certified).count(),
                rho_min: ext(|c| c.rho, false),
                rho_max: ext(|c| c.rho, true),
                s_min: ext(|c| c.s, false),
                s_max: ext(|c| c.s, true),
                lower_edges,
            }
        })
        .collect();
    RegionReport { per_m, violations }
}
