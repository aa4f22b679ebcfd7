//! File formats: chain JSON, CSV tables, OBJ meshes.
//!
//! Every document carries a `format_version`: a field in JSON, a leading
//! `# format_version=N` comment line in CSV and OBJ.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::chain::{Chain, ChainKind};
use crate::error::{Error, Result};
use crate::geometry::{Circle3, SolidTorus, Vec3};
use crate::ifs::CoverLevel;
use crate::projection::ProjectionReport;
use crate::search::FeasibilityCell;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusRecord {
    pub center: [f64; 3],
    pub normal: [f64; 3],
    #[serde(rename = "R")]
    pub major: f64,
    #[serde(rename = "r")]
    pub minor: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
}

impl TorusRecord {
    pub fn from_torus(t: &SolidTorus) -> Self {
        Self {
            center: t.circle.center.into(),
            normal: t.circle.normal.into(),
            major: t.circle.radius,
            minor: t.tube_radius,
            word: None,
        }
    }

    /// Rebuilds the torus without renormalising, so stored values come back
    /// bit for bit.
    pub fn to_torus(&self) -> Result<SolidTorus> {
        let t = SolidTorus {
            circle: Circle3 {
                center: Vec3::from(self.center),
                normal: Vec3::from(self.normal),
                radius: self.major,
            },
            tube_radius: self.minor,
        };
        if !t.is_valid() {
            return Err(Error::Format(format!("invalid torus record {self:?}")));
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<ChainKind>,
    #[serde(default)]
    pub params: serde_json::Value,
    #[serde(default)]
    pub verdict: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainDocument {
    pub format_version: u32,
    pub ambient: TorusRecord,
    pub links: Vec<TorusRecord>,
    pub meta: ChainMeta,
}

impl ChainDocument {
    pub fn from_chain(chain: &Chain, params: serde_json::Value, verdict: serde_json::Value) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            ambient: TorusRecord::from_torus(&chain.ambient),
            links: chain.links.iter().map(TorusRecord::from_torus).collect(),
            meta: ChainMeta {
                kind: Some(chain.kind),
                params,
                verdict,
            },
        }
    }

    /// Cover tori as links, each tagged with its word.
    pub fn from_cover(cover: &CoverLevel, params: serde_json::Value) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            ambient: TorusRecord::from_torus(&cover.ambient),
            links: cover
                .words
                .iter()
                .zip(&cover.tori)
                .map(|(w, t)| TorusRecord {
                    word: Some(w.to_string()),
                    ..TorusRecord::from_torus(t)
                })
                .collect(),
            meta: ChainMeta {
                kind: None,
                params,
                verdict: serde_json::Value::Null,
            },
        }
    }

    pub fn to_chain(&self) -> Result<Chain> {
        let kind = self
            .meta
            .kind
            .ok_or_else(|| Error::Format("document has no chain kind".into()))?;
        let links = self.links.iter().map(TorusRecord::to_torus).collect::<Result<_>>()?;
        Chain::new(self.ambient.to_torus()?, links, kind)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(s)?;
        if doc.format_version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported format_version {}",
                doc.format_version
            )));
        }
        Ok(doc)
    }
}

/// `{format_version, kind, config, result}` summary of a run.
pub fn summary_json<C: Serialize, R: Serialize>(kind: &str, config: &C, result: &R) -> Result<String> {
    let v = serde_json::json!({
        "format_version": FORMAT_VERSION,
        "kind": kind,
        "config": config,
        "result": result,
    });
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

fn csv_table<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Result<String> {
    let mut buf = format!("# format_version={FORMAT_VERSION}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for r in rows {
            w.serialize(r).map_err(|e| Error::Format(e.to_string()))?;
        }
        w.flush()?;
    }
    String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))
}

/// Reads a table written by this module; comment lines are skipped.
pub fn read_csv<R: for<'de> Deserialize<'de>>(s: &str) -> Result<Vec<R>> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(s.as_bytes())
        .deserialize()
        .map(|r| r.map_err(|e| Error::Format(e.to_string())))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverRow {
    pub word: String,
    pub cx: f64,
    pub cy: f64,
    pub cz: f64,
    pub nx: f64,
    pub ny: f64,
    pub nz: f64,
    #[serde(rename = "R")]
    pub major: f64,
    #[serde(rename = "r")]
    pub minor: f64,
}

/// Columns `word,cx,cy,cz,nx,ny,nz,R,r`, one row per cover torus.
pub fn cover_csv(cover: &CoverLevel) -> Result<String> {
    csv_table(cover.words.iter().zip(&cover.tori).map(|(w, t)| {
        let (c, n) = (t.circle.center, t.circle.normal);
        CoverRow {
            word: w.to_string(),
            cx: c.x,
            cy: c.y,
            cz: c.z,
            nx: n.x,
            ny: n.y,
            nz: n.z,
            major: t.circle.radius,
            minor: t.tube_radius,
        }
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Columns `x,y,z`.
pub fn samples_csv(points: &[Vec3]) -> Result<String> {
    csv_table(points.iter().map(|p| SampleRow { x: p.x, y: p.y, z: p.z }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub nx: f64,
    pub ny: f64,
    pub nz: f64,
    pub lambda: usize,
    pub raster_area: f64,
    pub moran_envelope: f64,
    pub slope: f64,
    pub residual: f64,
    pub components: usize,
    pub n_points: usize,
}

/// Columns `nx,ny,nz,lambda,raster_area,moran_envelope,slope,residual,components,n_points`.
pub fn reports_csv(reports: &[ProjectionReport]) -> Result<String> {
    csv_table(reports.iter().map(|r| ReportRow {
        nx: r.plane.normal.x,
        ny: r.plane.normal.y,
        nz: r.plane.normal.z,
        lambda: r.lambda,
        raster_area: r.raster_area,
        moran_envelope: r.moran_envelope,
        slope: r.box_count_slope,
        residual: r.fit_residual,
        components: r.component_count,
        n_points: r.n_points,
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub rho: f64,
    pub s: f64,
    pub m: usize,
    pub links: usize,
    pub valid: bool,
    pub certified: bool,
    pub disjoint_margin: f64,
    pub linking_margin: f64,
    pub containment_margin: f64,
    pub failure_reason: String,
}

/// Columns `rho,s,m,links,valid,certified,disjoint_margin,linking_margin,containment_margin,failure_reason`.
pub fn scan_csv(cells: &[FeasibilityCell]) -> Result<String> {
    csv_table(cells.iter().map(|c| ScanRow {
        rho: c.rho,
        s: c.s,
        m: c.m,
        links: 2 * c.m,
        valid: c.valid,
        certified: c.certified,
        disjoint_margin: c.verdict.disjoint_margin,
        linking_margin: c.verdict.linking_margin,
        containment_margin: c.verdict.containment_margin,
        failure_reason: c.verdict.failure.clone().unwrap_or_default(),
    }))
}

/// Indexed triangle mesh; faces are 0-based.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[usize; 3]>,
}

impl Mesh {
    pub fn edge_count(&self) -> usize {
        self.edge_uses().len()
    }

    fn edge_uses(&self) -> HashMap<(usize, usize), usize> {
        let mut edges = HashMap::new();
        for f in &self.faces {
            for i in 0..3 {
                let (a, b) = (f[i], f[(i + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        edges
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_count() as i64 + self.faces.len() as i64
    }

    /// Every edge shared by exactly two faces.
    pub fn is_closed(&self) -> bool {
        self.edge_uses().values().all(|&n| n == 2)
    }
}

/// Boundary surface of a torus: `seg_major` rings of `seg_minor` vertices,
/// two triangles per quad, outward orientation.
pub fn torus_mesh(t: &SolidTorus, seg_major: usize, seg_minor: usize) -> Result<Mesh> {
    if seg_major < 3 || seg_minor < 3 {
        return Err(Error::InvalidParams("mesh segment counts must be >= 3".into()));
    }
    let c = &t.circle;
    let (e1, e2) = c.frame();
    let tau = std::f64::consts::TAU;
    let mut mesh = Mesh::default();
    for i in 0..seg_major {
        let u = tau * i as f64 / seg_major as f64;
        let radial = e1 * u.cos() + e2 * u.sin();
        for j in 0..seg_minor {
            let v = tau * j as f64 / seg_minor as f64;
            let p = c.center + radial * (c.radius + t.tube_radius * v.cos()) + c.normal * (t.tube_radius * v.sin());
            mesh.vertices.push(p);
        }
    }
    let idx = |i: usize, j: usize| (i % seg_major) * seg_minor + j % seg_minor;
    for i in 0..seg_major {
        for j in 0..seg_minor {
            let (a, b, cc, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            mesh.faces.push([a, b, cc]);
            mesh.faces.push([a, cc, d]);
        }
    }
    Ok(mesh)
}

/// One OBJ object per torus, named `torus_<i>` (1-based).
pub fn tori_obj(tori: &[SolidTorus], seg_major: usize, seg_minor: usize) -> Result<String> {
    use std::fmt::Write as _;
    let mut out = format!("# format_version={FORMAT_VERSION}\n");
    let mut offset = 1;
    for (i, t) in tori.iter().enumerate() {
        let mesh = torus_mesh(t, seg_major, seg_minor)?;
        let _ = writeln!(out, "o torus_{}", i + 1);
        for v in &mesh.vertices {
            let _ = writeln!(out, "v {} {} {}", v.x, v.y, v.z);
        }
        for f in &mesh.faces {
            let _ = writeln!(out, "f {} {} {}", f[0] + offset, f[1] + offset, f[2] + offset);
        }
        offset += mesh.vertices.len();
    }
    Ok(out)
}

/// Splits OBJ text back into per-object meshes.
pub fn parse_obj(s: &str) -> Result<Vec<Mesh>> {
    let mut meshes: Vec<Mesh> = Vec::new();
    let mut offset = 0;
    let bad = |l: &str| Error::Format(format!("bad OBJ line: {l}"));
    for line in s.lines() {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("o") => {
                if let Some(m) = meshes.last() {
                    offset += m.vertices.len();
                }
                meshes.push(Mesh::default());
            }
            Some("v") => {
                let xyz: Vec<f64> = it.map(|x| x.parse().map_err(|_| bad(line))).collect::<Result<_>>()?;
                let m = meshes.last_mut().ok_or_else(|| bad(line))?;
                let [x, y, z] = xyz[..] else { return Err(bad(line)) };
                m.vertices.push(Vec3::new(x, y, z));
            }
            Some("f") => {
                let ids: Vec<usize> = it.map(|x| x.parse().map_err(|_| bad(line))).collect::<Result<_>>()?;
                let m = meshes.last_mut().ok_or_else(|| bad(line))?;
                let [a, b, c] = ids[..] else { return Err(bad(line)) };
                let local = |i: usize| i.checked_sub(offset + 1).ok_or_else(|| bad(line));
                m.faces.push([local(a)?, local(b)?, local(c)?]);
            }
            _ => {}
        }
    }
    Ok(meshes)
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
