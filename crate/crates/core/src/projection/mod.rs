//! Plane projections of covers and attractor samples: shadow area, box
//! counting and connectivity.

use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Plane, Vec3};
use crate::ifs::{attractor_sample, iterate_cover, CoverLevel, IfsSystem, DEFAULT_BUDGET};

/// Raster of the projected cover: every torus shadow is over-approximated by
/// the disk of radius `diam/2` about its projected center. The raster covers
/// the square of side `diam T` around the projected ambient center; a cell
/// counts when its center lies in some disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowRaster {
    pub raster_n: usize,
    pub cell: f64,
    pub occupied: usize,
}

impl ShadowRaster {
    pub fn area(&self) -> f64 {
        self.occupied as f64 * self.cell * self.cell
    }
}

pub fn rasterize_cover(cover: &CoverLevel, plane: &Plane, raster_n: usize) -> ShadowRaster {
    let n = raster_n;
    let side = cover.ambient.diameter();
    let cell = side / n as f64;
    let c0 = plane.coords(&cover.ambient.center());
    let (x0, y0) = (c0[0] - side / 2.0, c0[1] - side / 2.0);
    let mut grid = vec![false; n * n];
    let clamp = |v: f64| v.max(0.0).min(n as f64) as usize;
    for t in &cover.tori {
        let [cx, cy] = plane.coords(&t.center());
        let r = t.diameter() / 2.0;
        let r2 = r * r;
        let (i0, i1) = (clamp(((cx - r - x0) / cell - 0.5).floor()), clamp(((cx + r - x0) / cell + 0.5).ceil()));
        let (j0, j1) = (clamp(((cy - r - y0) / cell - 0.5).floor()), clamp(((cy + r - y0) / cell + 0.5).ceil()));
        for j in j0..j1 {
            let dy = y0 + (j as f64 + 0.5) * cell - cy;
            let row = &mut grid[j * n..(j + 1) * n];
            for (i, occ) in row.iter_mut().enumerate().take(i1).skip(i0) {
                let dx = x0 + (i as f64 + 0.5) * cell - cx;
                if dx * dx + dy * dy <= r2 {
                    *occ = true;
                }
            }
        }
    }
    ShadowRaster {
        raster_n: n,
        cell,
        occupied: grid.iter().filter(|&&b| b).count(),
    }
}

/// Raster area of the projected cover.
pub fn project_cover_area(cover: &CoverLevel, plane: &Plane, raster_n: usize) -> f64 {
    rasterize_cover(cover, plane, raster_n).area()
}

/// Upper bound on the raster overcount: a counted cell center lies within
/// `r` of a disk center, so the cell lies in the disk of radius `r + δ` with
/// `δ` the half cell diagonal. Summed over the cover's disks.
pub fn raster_slack(cover: &CoverLevel, raster_n: usize) -> f64 {
    let delta = cover.ambient.diameter() / raster_n as f64 / 2f64.sqrt();
    cover
        .tori
        .iter()
        .map(|t| {
            let r = t.diameter() / 2.0;
            PI * ((r + delta).powi(2) - r * r)
        })
        .sum()
}

/// Total perimeter of the cover's disks times the cell size.
pub fn perimeter_slack(cover: &CoverLevel, raster_n: usize) -> f64 {
    let cell = cover.ambient.diameter() / raster_n as f64;
    cover.tori.iter().map(|t| PI * t.diameter()).sum::<f64>() * cell
}

/// `π (diam T / 2)² (Σ s_i²)^λ`: total area of the level-λ disks.
pub fn moran_envelope(sys: &IfsSystem, lambda: usize) -> f64 {
    PI * (sys.ambient.diameter() / 2.0).powi(2) * sys.sum_sq().powi(lambda as i32)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxCount {
    pub slope: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
    pub counts: Vec<usize>,
}

fn check_box_inputs(n_points: usize, scales: &[f64]) -> Result<()> {
    if n_points < 10_000 {
        return Err(Error::InsufficientData(format!("need at least 10^4 points, got {n_points}")));
    }
    if scales.len() < 4 || scales.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::InsufficientData("need at least 4 positive scales".into()));
    }
    let (lo, hi) = scales
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    if (hi / lo).log10() < 1.5 {
        return Err(Error::InsufficientData("scales must span at least 1.5 decades".into()));
    }
    Ok(())
}

fn fit(scales: &[f64], counts: &[usize]) -> (f64, f64) {
    let xs: Vec<f64> = scales.iter().map(|e| (1.0 / e).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
    (slope, (rss / n).sqrt())
}

fn count_boxes<const D: usize>(coords: &[[f64; D]], eps: f64) -> usize {
    let mut keys: Vec<[i64; D]> = coords
        .iter()
        .map(|c| c.map(|x| (x / eps).floor() as i64))
        .collect();
    keys.sort_unstable();
    keys.dedup();
    keys.len()
}

fn box_count<const D: usize>(coords: &[[f64; D]], scales: &[f64]) -> Result<BoxCount> {
    check_box_inputs(coords.len(), scales)?;
    let counts: Vec<usize> = scales.iter().map(|&e| count_boxes(coords, e)).collect();
    let (slope, residual) = fit(scales, &counts);
    Ok(BoxCount {
        slope,
        residual,
        counts,
    })
}

/// Box-counting slope of the projection of `points` onto `plane`.
pub fn box_count_dimension(points: &[Vec3], plane: &Plane, scales: &[f64]) -> Result<BoxCount> {
    let coords: Vec<[f64; 2]> = points.iter().map(|p| plane.coords(p)).collect();
    box_count(&coords, scales)
}

/// Box-counting slope of the points themselves.
pub fn box_count_dimension_3d(points: &[Vec3], scales: &[f64]) -> Result<BoxCount> {
    let coords: Vec<[f64; 3]> = points.iter().map(|p| [p.x, p.y, p.z]).collect();
    box_count(&coords, scales)
}

/// `count` dyadic scales starting at `diam / 8`.
pub fn dyadic_scales(diam: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| diam / 8.0 / 2f64.powi(i as i32)).collect()
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Number of 8-connected components of the cells (side `cell`) occupied by
/// the projected points.
pub fn projection_connectivity(points: &[Vec3], plane: &Plane, cell: f64) -> usize {
    let mut index: HashMap<(i64, i64), usize> = HashMap::new();
    for p in points {
        let [x, y] = plane.coords(p);
        let key = ((x / cell).floor() as i64, (y / cell).floor() as i64);
        let next = index.len();
        index.entry(key).or_insert(next);
    }
    let mut parent: Vec<usize> = (0..index.len()).collect();
    for (&(i, j), &a) in &index {
        for (di, dj) in [(1, -1), (1, 0), (1, 1), (0, 1)] {
            if let Some(&b) = index.get(&(i + di, j + dj)) {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    (0..parent.len()).filter(|&x| find(&mut parent, x) == x).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepScheme {
    FibonacciSphere(usize),
    AxisAligned,
    Explicit,
}

/// Planes through the ambient center.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneSweep {
    pub planes: Vec<Plane>,
    pub schemes: Vec<SweepScheme>,
}

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653; // π(3 − √5)

/// `n` plane normals spread over the upper hemisphere (a plane and its
/// flipped normal coincide) by the equal-area Fibonacci lattice.
pub fn fibonacci_normals(n: usize) -> Vec<Vec3> {
    (0..n)
        .map(|i| {
            let z = 1.0 - (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = i as f64 * GOLDEN_ANGLE;
            Vec3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

impl PlaneSweep {
    fn through(center: Vec3, normals: &[Vec3], scheme: SweepScheme) -> Result<Self> {
        Ok(Self {
            planes: normals
                .iter()
                .map(|n| Plane::new(center, *n))
                .collect::<Result<_>>()?,
            schemes: vec![scheme],
        })
    }

    pub fn fibonacci_sphere(center: Vec3, n: usize) -> Result<Self> {
        Self::through(center, &fibonacci_normals(n), SweepScheme::FibonacciSphere(n))
    }

    pub fn axis_aligned(center: Vec3) -> Result<Self> {
        Self::through(center, &[Vec3::x(), Vec3::y(), Vec3::z()], SweepScheme::AxisAligned)
    }

    pub fn explicit(center: Vec3, normals: &[Vec3]) -> Result<Self> {
        Self::through(center, normals, SweepScheme::Explicit)
    }

    /// `fibonacci_sphere(200)` followed by the three coordinate planes.
    pub fn default_for(center: Vec3) -> Result<Self> {
        Ok(Self::fibonacci_sphere(center, 200)?.chain(Self::axis_aligned(center)?))
    }

    pub fn chain(mut self, other: PlaneSweep) -> Self {
        self.planes.extend(other.planes);
        self.schemes.extend(other.schemes);
        self
    }

    pub fn len(&self) -> usize {
        self.planes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.planes.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub lambda: usize,
    pub raster_n: usize,
    pub n_points: usize,
    pub depth: usize,
    pub seed: u64,
    /// Box sizes; `None` uses 8 dyadic scales from `diam/8` to `diam/1024`.
    pub scales: Option<Vec<f64>>,
    /// Connectivity cells are `2 · diam T · max_s^connect_depth`.
    pub connect_depth: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            lambda: 3,
            raster_n: 1024,
            n_points: 100_000,
            depth: 8,
            seed: 0,
            scales: None,
            connect_depth: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionReport {
    pub plane: Plane,
    pub lambda: usize,
    pub raster_area: f64,
    pub moran_envelope: f64,
    pub box_count_slope: f64,
    pub fit_residual: f64,
    pub component_count: usize,
    pub n_points: usize,
}

/// Shadow area, box-count slope and connectivity per plane. The cover and the
/// attractor sample are shared by all planes; reports follow plane order.
pub fn sweep(sys: &IfsSystem, planes: &PlaneSweep, cfg: &SweepConfig) -> Result<Vec<ProjectionReport>> {
    if cfg.raster_n < 64 {
        return Err(Error::InvalidParams(format!("raster_n must be >= 64, got {}", cfg.raster_n)));
    }
    let cover = iterate_cover(sys, cfg.lambda, DEFAULT_BUDGET)?;
    let points = attractor_sample(sys, cfg.n_points, cfg.depth, cfg.seed);
    let diam = sys.ambient.diameter();
    let scales = cfg.scales.clone().unwrap_or_else(|| dyadic_scales(diam, 8));
    let cell = 2.0 * diam * sys.max_scale().powi(cfg.connect_depth as i32);
    let envelope = moran_envelope(sys, cfg.lambda);
    planes
        .planes
        .par_iter()
        .map(|plane| {
            let bc = box_count_dimension(&points, plane, &scales)?;
            Ok(ProjectionReport {
                plane: *plane,
                lambda: cfg.lambda,
                raster_area: project_cover_area(&cover, plane, cfg.raster_n),
                moran_envelope: envelope,
                box_count_slope: bc.slope,
                fit_residual: bc.residual,
                component_count: projection_connectivity(&points, plane, cell),
                n_points: points.len(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{regular_chain_from_params, RegularChainParams};

    fn xy() -> Plane {
        Plane::new(Vec3::zeros(), Vec3::z()).unwrap()
    }

    fn system(s: f64) -> IfsSystem {
        let p = RegularChainParams::new(1.0, 0.3, 10, s).unwrap();
        IfsSystem::from_chain(&regular_chain_from_params(&p).unwrap(), 0.0).unwrap()
    }

    #[test]
    fn single_disk_area() {
        let sys = system(0.2);
        let cover = iterate_cover(&sys, 0, 1).unwrap();
        let area = project_cover_area(&cover, &xy(), 1024);
        let exact = PI * (sys.ambient.diameter() / 2.0).powi(2);
        assert!((area / exact - 1.0).abs() < 0.02);
    }

    #[test]
    fn segment_and_square_slopes() {
        let seg: Vec<Vec3> = (0..20_000).map(|i| Vec3::new(i as f64 / 20_000.0, 0.0, 0.0)).collect();
        let scales = dyadic_scales(1.0, 8);
        let bc = box_count_dimension(&seg, &xy(), &scales).unwrap();
        assert!((bc.slope - 1.0).abs() < 0.1, "{}", bc.slope);
        let n = 400;
        let sq: Vec<Vec3> = (0..n * n)
            .map(|i| Vec3::new((i % n) as f64 / n as f64, (i / n) as f64 / n as f64, 0.0))
            .collect();
        let scales = vec![1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0];
        let bc = box_count_dimension(&sq, &xy(), &scales).unwrap();
        assert!((bc.slope - 2.0).abs() < 0.1, "{}", bc.slope);
    }

    #[test]
    fn box_count_input_guards() {
        let few = vec![Vec3::zeros(); 10];
        assert!(matches!(
            box_count_dimension(&few, &xy(), &dyadic_scales(1.0, 8)),
            Err(Error::InsufficientData(_))
        ));
        let many = vec![Vec3::zeros(); 10_000];
        assert!(box_count_dimension(&many, &xy(), &[1.0, 0.5, 0.25, 0.125]).is_err());
        assert!(box_count_dimension(&many, &xy(), &[1.0, 0.5]).is_err());
    }

    #[test]
    fn connectivity_examples() {
        assert_eq!(projection_connectivity(&[Vec3::new(0.3, 0.2, 5.0)], &xy(), 0.1), 1);
        let mut pts: Vec<Vec3> = (0..50).map(|i| Vec3::new(i as f64 * 0.01, 0.0, 0.0)).collect();
        pts.extend((0..50).map(|i| Vec3::new(10.0 + i as f64 * 0.01, 0.0, 0.0)));
        assert_eq!(projection_connectivity(&pts, &xy(), 0.1), 2);
        // diagonal neighbours join
        let diag = [Vec3::new(0.05, 0.05, 0.0), Vec3::new(0.15, 0.15, 0.0)];
        assert_eq!(projection_connectivity(&diag, &xy(), 0.1), 1);
        assert_eq!(projection_connectivity(&[], &xy(), 0.1), 0);
    }

    #[test]
    fn axis_aligned_sweep_has_three_reports() {
        let sys = system(0.2);
        let planes = PlaneSweep::axis_aligned(sys.ambient.center()).unwrap();
        let cfg = SweepConfig {
            lambda: 1,
            raster_n: 128,
            n_points: 10_000,
            depth: 4,
            ..SweepConfig::default()
        };
        let reports = sweep(&sys, &planes, &cfg).unwrap();
        assert_eq!(reports.len(), 3);
        let reversed = PlaneSweep::explicit(sys.ambient.center(), &[Vec3::z(), Vec3::y(), Vec3::x()]).unwrap();
        let rev = sweep(&sys, &reversed, &cfg).unwrap();
        for (a, b) in reports.iter().zip(rev.iter().rev()) {
            assert_eq!(a.raster_area, b.raster_area);
            assert_eq!(a.box_count_slope, b.box_count_slope);
            assert_eq!(a.component_count, b.component_count);
        }
    }

    #[test]
    fn raster_area_converges_with_resolution() {
        let sys = system(0.2);
        let cover = iterate_cover(&sys, 1, DEFAULT_BUDGET).unwrap();
        let pl = Plane::new(sys.ambient.center(), Vec3::new(0.3, 0.5, 0.8)).unwrap();
        let areas: Vec<f64> = [128, 256, 512, 1024]
            .iter()
            .map(|&n| project_cover_area(&cover, &pl, n))
            .collect();
        let d1 = (areas[1] - areas[0]).abs();
        let d3 = (areas[3] - areas[2]).abs();
        assert!(d3 < d1, "{areas:?}");
    }
}
