//! File formats: point clouds, ellipsoids, objective profiles and traces.
//!
//! CSV files start with `# key=value` comment lines carrying the config hash
//! and seed; readers skip them.

use std::fs;
use std::io::Write;
use std::path::Path;

use limbsynth_core::ellipsoid::{Ellipsoid, FitReport};
use limbsynth_core::kinematics::{ChainKind, PointCloud, Vec3};
use limbsynth_core::objectives::{Flags, ObjectiveProfile, ReferenceFront, OBJECTIVES, OBJECTIVE_NAMES};
use limbsynth_core::solver::RunTrace;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Formats `v` with 9 significant digits in plain decimal notation.
pub fn sig9(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{}", if v == 0.0 { 0.0 } else { v });
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).max(0) as usize;
    let s = format!("{v:.decimals$}");
    // Negative zero after rounding prints as "-0.000...".
    if s.trim_start_matches('-').bytes().all(|b| b == b'0' || b == b'.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn round9(v: f64) -> f64 {
    sig9(v).parse().unwrap_or(v)
}

pub fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e)),
        _ => Ok(()),
    }
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    ensure_parent(path)?;
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Pretty JSON with a trailing newline.
pub fn to_json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("value serializes to JSON");
    bytes.push(b'\n');
    bytes
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_bytes(path, &to_json_bytes(value))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::format(path, e))
}

fn comment_block(meta: &[(&str, String)]) -> String {
    meta.iter().map(|(k, v)| format!("# {k}={v}\n")).collect()
}

fn csv_bytes(meta: &[(&str, String)], header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut out = comment_block(meta).into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(header).expect("in-memory write");
        for row in rows {
            w.write_record(&row).expect("in-memory write");
        }
        w.flush().expect("in-memory flush");
    }
    out
}

fn csv_reader(bytes: &[u8]) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(bytes)
}

/// `# key=value` lines at the top of a CSV file.
pub fn csv_meta(bytes: &[u8]) -> Vec<(String, String)> {
    String::from_utf8_lossy(bytes)
        .lines()
        .map_while(|l| l.strip_prefix("# "))
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn chain_kind_name(kind: ChainKind) -> String {
    serde_json::to_value(kind)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn chain_kind_from_name(name: &str) -> Option<ChainKind> {
    serde_json::from_value(serde_json::Value::String(name.to_string())).ok()
}

/// Point cloud as written to JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloudFile {
    pub mode: ChainKind,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
    pub points: Vec<[f64; 3]>,
}

impl CloudFile {
    pub fn new(cloud: &PointCloud, config_hash: Option<String>) -> Self {
        CloudFile {
            mode: cloud.mode,
            seed: cloud.seed,
            config_hash,
            points: cloud.points.iter().map(|p| [round9(p.x), round9(p.y), round9(p.z)]).collect(),
        }
    }

    pub fn vectors(&self) -> Vec<Vec3> {
        self.points.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect()
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut meta = vec![("mode", chain_kind_name(self.mode)), ("seed", self.seed.to_string())];
        if let Some(h) = &self.config_hash {
            meta.push(("config_hash", h.clone()));
        }
        let rows = self.points.iter().map(|p| p.iter().map(|v| sig9(*v)).collect());
        csv_bytes(&meta, &["x", "y", "z"], rows)
    }

    pub fn from_csv(bytes: &[u8]) -> std::result::Result<Self, String> {
        let meta = csv_meta(bytes);
        let get = |k: &str| meta.iter().find(|(key, _)| key == k).map(|(_, v)| v.as_str());
        let mut reader = csv_reader(bytes);
        let header = reader.headers().map_err(|e| e.to_string())?.clone();
        if header.iter().collect::<Vec<_>>() != ["x", "y", "z"] {
            return Err("expected an `x,y,z` header".into());
        }
        let mut points = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| e.to_string())?;
            let mut p = [0.0f64; 3];
            for (slot, field) in p.iter_mut().zip(record.iter()) {
                *slot = field.trim().parse().map_err(|_| format!("bad number `{field}`"))?;
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err("non-finite coordinate".into());
            }
            points.push(p);
        }
        Ok(CloudFile {
            mode: get("mode").and_then(chain_kind_from_name).unwrap_or(ChainKind::Custom),
            seed: get("seed").and_then(|s| s.parse().ok()).unwrap_or(0),
            config_hash: get("config_hash").map(str::to_string),
            points,
        })
    }
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

pub fn write_cloud(path: &Path, cloud: &CloudFile) -> Result<()> {
    if is_json(path) {
        write_json(path, cloud)
    } else {
        write_bytes(path, &cloud.to_csv())
    }
}

/// Reads a cloud in either format, picked by the `.json` extension.
pub fn read_cloud(path: &Path) -> Result<CloudFile> {
    if is_json(path) {
        let cloud: CloudFile = read_json(path)?;
        if cloud.points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(CliError::format(path, "non-finite coordinate"));
        }
        Ok(cloud)
    } else {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        CloudFile::from_csv(&bytes).map_err(|m| CliError::format(path, m))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub iterations: usize,
    pub duality_gap: f64,
    pub contained_fraction: f64,
    pub active_points: usize,
    pub tol: f64,
    /// The cloud was flat and the out-of-plane axis got the minimum thickness.
    pub planar: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipsoidFile {
    pub center: [f64; 3],
    pub shape: [[f64; 3]; 3],
    pub semi_axes: [f64; 3],
    pub axes: [[f64; 3]; 3],
    pub volume: f64,
    pub fit: FitSummary,
    pub points: usize,
    pub mode: ChainKind,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
}

impl EllipsoidFile {
    pub fn new(e: &Ellipsoid, report: &FitReport, tol: f64, planar: bool, cloud: &CloudFile) -> Self {
        let v = |v: &Vec3| [v.x, v.y, v.z];
        EllipsoidFile {
            center: v(&e.center),
            shape: std::array::from_fn(|r| std::array::from_fn(|c| e.shape[(r, c)])),
            semi_axes: e.semi_axes,
            axes: [v(&e.axes[0]), v(&e.axes[1]), v(&e.axes[2])],
            volume: e.volume(),
            fit: FitSummary {
                iterations: report.iterations,
                duality_gap: report.duality_gap,
                contained_fraction: report.contained_fraction,
                active_points: report.active_points,
                tol,
                planar,
            },
            points: cloud.points.len(),
            mode: cloud.mode,
            seed: cloud.seed,
            config_hash: cloud.config_hash.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileFile {
    pub config_hash: String,
    pub seed: u64,
    pub n: usize,
    pub x: [f64; 5],
    pub total_length: f64,
    pub objective_names: Vec<String>,
    pub objectives: [f64; OBJECTIVES],
    pub d: [f64; OBJECTIVES],
    pub phi: f64,
    /// Minimum support force over the sit-to-stand poses, N.
    pub support_force: f64,
    pub flags: Flags,
    pub reference_front: ReferenceFront,
}

impl ProfileFile {
    pub fn new(p: &ObjectiveProfile, front: &ReferenceFront, n: usize, config_hash: &str, seed: u64) -> Self {
        ProfileFile {
            config_hash: config_hash.to_string(),
            seed,
            n,
            x: *p.x.as_array(),
            total_length: p.x.total_length(),
            objective_names: OBJECTIVE_NAMES.iter().map(|s| s.to_string()).collect(),
            objectives: p.objectives.values(),
            d: p.d,
            phi: p.phi,
            support_force: p.objectives.support_force,
            flags: p.objectives.flags,
            reference_front: front.clone(),
        }
    }
}

/// One row per profile: the decision vector, the eleven `D` components, then phi.
pub fn profiles_csv(profiles: &[ObjectiveProfile], config_hash: &str, seed: u64) -> Vec<u8> {
    let mut header: Vec<String> = ["l1", "l2", "l3", "l4", "c"].iter().map(|s| s.to_string()).collect();
    header.extend(OBJECTIVE_NAMES.iter().map(|n| format!("d_{n}")));
    header.push("phi".into());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = profiles.iter().map(|p| {
        let mut row: Vec<String> = p.x.as_array().iter().map(|v| v.to_string()).collect();
        row.extend(p.d.iter().map(|v| v.to_string()));
        row.push(p.phi.to_string());
        row
    });
    csv_bytes(
        &[("config_hash", config_hash.to_string()), ("seed", seed.to_string())],
        &header,
        rows,
    )
}

pub const TRACE_HEADER: [&str; 8] = ["iter", "best_phi", "wall_ms", "l1", "l2", "l3", "l4", "c"];

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub best_phi: f64,
    pub wall_ms: f64,
    pub x: [f64; 5],
}

/// Convergence trace, one row per iteration. Values use the shortest
/// representation that parses back to the same number. The decision
/// columns are left empty for problems that are not five-dimensional.
pub fn trace_csv(trace: &RunTrace, meta: &[(&str, String)]) -> Vec<u8> {
    let rows = (0..trace.iterations()).map(|t| {
        let mut row = vec![(t + 1).to_string(), trace.best_phi[t].to_string(), trace.wall_ms[t].to_string()];
        let x = &trace.best_x[t];
        if x.len() == 5 {
            row.extend(x.iter().map(|v| v.to_string()));
        } else {
            row.extend(std::iter::repeat(String::new()).take(5));
        }
        row
    });
    csv_bytes(meta, &TRACE_HEADER, rows)
}

pub fn parse_trace_csv(bytes: &[u8]) -> std::result::Result<Vec<TraceRow>, String> {
    let mut reader = csv_reader(bytes);
    let header = reader.headers().map_err(|e| e.to_string())?.clone();
    if header.iter().collect::<Vec<_>>() != TRACE_HEADER {
        return Err("unexpected trace header".into());
    }
    let num = |s: &str| s.parse::<f64>().map_err(|_| format!("bad number `{s}`"));
    reader
        .records()
        .map(|r| {
            let r = r.map_err(|e| e.to_string())?;
            let mut x = [f64::NAN; 5];
            for (slot, f) in x.iter_mut().zip(r.iter().skip(3)) {
                if !f.is_empty() {
                    *slot = num(f)?;
                }
            }
            Ok(TraceRow {
                iter: r[0].parse().map_err(|_| format!("bad iteration `{}`", &r[0]))?,
                best_phi: num(&r[1])?,
                wall_ms: num(&r[2])?,
                x,
            })
        })
        .collect()
}

/// Writes `bytes` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    ensure_parent(path)?;
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(|e| CliError::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| CliError::io(&tmp, e))?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}
