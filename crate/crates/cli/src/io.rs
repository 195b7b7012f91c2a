//! File formats: curve JSON, ASCII OBJ meshes, CSV tables with a comment
//! header, JSON documents with a `meta` block, and instance manifests.

use std::fs;
use std::path::{Path, PathBuf};

use coarea_core::geometry::hypotheses::match_boundary;
use coarea_core::verify::{Backend, Instance, Provenance};
use coarea_core::{AnnulusSurface, DiscreteCurve, TriMesh, Vec3};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Meta;
use crate::error::CliError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

/// Writes `bytes` to `dir/name`, creating `dir` if needed.
pub fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

#[derive(Serialize)]
struct Doc<'a, T: Serialize> {
    meta: &'a Meta,
    #[serde(flatten)]
    data: &'a T,
}

/// Pretty JSON of `data` with `meta` as the first field.
pub fn json_doc<T: Serialize>(meta: &Meta, data: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&Doc { meta, data }).expect("output serializes");
    out.push(b'\n');
    out
}

fn comment_header(meta: &Meta) -> String {
    format!(
        "# tool={}\n# library_version={}\n# config_hash={}\n# config={}\n",
        meta.tool,
        meta.library_version,
        meta.config_hash,
        meta.config.to_json()
    )
}

/// CSV table preceded by `#` comment lines carrying the run metadata.
pub fn csv_doc(meta: &Meta, header: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    let mut out = comment_header(meta).into_bytes();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    out.extend(w.into_inner().expect("in-memory flush"));
    out
}

#[derive(Serialize, Deserialize)]
struct CurveFile {
    closed: bool,
    points: Vec<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<Meta>,
}

pub fn curve_doc(meta: &Meta, curve: &DiscreteCurve) -> Vec<u8> {
    let file = CurveFile {
        closed: curve.is_closed(),
        points: curve.points().iter().map(|p| p.to_array()).collect(),
        meta: Some(meta.clone()),
    };
    let mut out = serde_json::to_vec(&file).expect("curve serializes");
    out.push(b'\n');
    out
}

pub fn parse_curve(bytes: &[u8]) -> Result<DiscreteCurve, String> {
    let file: CurveFile = serde_json::from_slice(bytes).map_err(|e| e.to_string())?;
    let points = file.points.into_iter().map(Vec3::from).collect();
    DiscreteCurve::new(points, file.closed).map_err(|e| e.to_string())
}

pub fn obj_doc(meta: &Meta, mesh: &TriMesh) -> Vec<u8> {
    let mut out = comment_header(meta);
    for v in mesh.vertices() {
        out.push_str(&format!("v {} {} {}\n", v.x, v.y, v.z));
    }
    for t in mesh.triangles() {
        out.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
    }
    out.into_bytes()
}

/// Parses the ASCII OBJ subset of `v x y z` and `f i j k` lines (1-based
/// indices). Comments and blank lines are skipped; anything else is an error.
pub fn parse_obj(text: &str) -> Result<TriMesh, String> {
    let mut verts = Vec::new();
    let mut tris = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line_no = no + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let tag = parts.next().unwrap_or_default();
        let fields: Vec<&str> = parts.collect();
        match tag {
            "v" => {
                let xyz: Vec<f64> = fields
                    .iter()
                    .map(|f| f.parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| format!("line {line_no}: bad vertex coordinate: {e}"))?;
                if xyz.len() != 3 {
                    return Err(format!("line {line_no}: vertex needs 3 coordinates, got {}", xyz.len()));
                }
                verts.push(Vec3::new(xyz[0], xyz[1], xyz[2]));
            }
            "f" => {
                let idx: Vec<u32> = fields
                    .iter()
                    .map(|f| f.parse::<u32>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| format!("line {line_no}: bad face index: {e}"))?;
                if idx.len() != 3 {
                    return Err(format!("line {line_no}: face needs 3 indices, got {}", idx.len()));
                }
                if idx.contains(&0) {
                    return Err(format!("line {line_no}: face indices are 1-based"));
                }
                tris.push([idx[0] - 1, idx[1] - 1, idx[2] - 1]);
            }
            other => return Err(format!("line {line_no}: unsupported OBJ record `{other}`")),
        }
    }
    TriMesh::new(verts, tris).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileRef {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFiles {
    pub curve0: FileRef,
    pub curve1: FileRef,
    pub sigma: FileRef,
}

/// Body of `instance.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub eps: f64,
    pub backend: Backend,
    pub provenance: Provenance,
    pub files: InstanceFiles,
}

fn read_checked(base: &Path, r: &FileRef) -> Result<(PathBuf, Vec<u8>), CliError> {
    let path = base.join(&r.path);
    let bytes = read_bytes(&path)?;
    let got = sha256_hex(&bytes);
    if got != r.sha256 {
        return Err(CliError::parse(format!(
            "{}: sha256 {got} does not match the manifest ({})",
            path.display(),
            r.sha256
        )));
    }
    Ok((path, bytes))
}

/// Loads an instance from its manifest, checking every file hash. Σ's
/// boundary loops are labelled by matching them to the curves.
pub fn load_instance(manifest: &Path, backend: Option<&str>) -> Result<Instance, CliError> {
    let bytes = read_bytes(manifest)?;
    let m: Manifest = serde_json::from_slice(&bytes).map_err(|e| CliError::io(manifest, e))?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let curve = |r: &FileRef| -> Result<DiscreteCurve, CliError> {
        let (path, bytes) = read_checked(base, r)?;
        let c = parse_curve(&bytes).map_err(|e| CliError::io(&path, e))?;
        if !c.is_closed() {
            return Err(CliError::io(&path, "curve must be closed"));
        }
        Ok(c)
    };
    let curve0 = curve(&m.files.curve0)?;
    let curve1 = curve(&m.files.curve1)?;
    let (path, bytes) = read_checked(base, &m.files.sigma)?;
    let text = String::from_utf8(bytes).map_err(|e| CliError::io(&path, e))?;
    let mesh = parse_obj(&text).map_err(|e| CliError::io(&path, e))?;
    let mut sigma = AnnulusSurface::new(mesh).map_err(|e| CliError::io(&path, e))?;
    // unmatched loops are left as they are; the hypothesis check reports it
    if let Ok(bm) = match_boundary(&curve0, &curve1, &sigma, 1e-9) {
        sigma = sigma.relabeled(bm.loop_for_curve0);
    }
    let backend = backend.map_or(m.backend, Backend::parse);
    Ok(Instance { curve0, curve1, sigma, eps: m.eps, backend, provenance: m.provenance })
}
