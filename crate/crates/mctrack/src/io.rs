//! File formats, run configuration, and report rendering.
//!
//! Tracklets are line-delimited structured text with named fields so fixtures
//! stay diff-able; topology is one JSON document; annotations and trajectory
//! outputs are whitespace-separated tables. Appearance can be given inline as
//! per-frame color entries or as a directory of raw RGB crop buffers.

use crate::appearance::{compute_mcshr, AppearanceError, RgbBuffer};
use crate::evaluate::FrameAnnotations;
use crate::model::{
    estimate_velocities, BoundingBox, CameraTopology, ColorEntry, MajorColorDescriptor,
    ModelError, TrackState, Tracklet, TrajectorySet,
};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Appearance(#[from] AppearanceError),
}

/// All tunables of one tracking run.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunConfig {
    /// Waiting-time threshold in frames.
    pub eta: i64,
    /// MUG threshold for edges admitted into the equalization statistics.
    pub epsilon: f64,
    /// Appearance feature weight.
    pub k1: f64,
    /// Motion feature weight.
    pub k2: f64,
    /// Motion similarity decay.
    pub lambda: f64,
    /// Minimum periodic time in frames.
    pub gamma: usize,
    /// Box-overlap threshold for evaluation matching.
    pub iou_threshold: f64,
    /// Apply the same-camera similarity compensation.
    pub equalize: bool,
    /// Probability floor for transition features.
    pub p_min: f64,
    /// Seed for scenario generation.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            eta: 1500,
            epsilon: 0.4,
            k1: 1.0,
            k2: 1.0,
            lambda: 0.01,
            gamma: 15,
            iou_threshold: 0.5,
            equalize: true,
            p_min: 1e-6,
            seed: 42,
        }
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

fn split_fields(line: &str) -> Vec<(&str, &str)> {
    line.split_whitespace()
        .filter_map(|tok| tok.split_once('='))
        .collect()
}

fn parse_numbers<const N: usize>(s: &str) -> Option<[f64; N]> {
    let mut out = [0.0; N];
    let mut parts = s.split(':');
    for slot in &mut out {
        *slot = parts.next()?.parse().ok()?;
    }
    if parts.next().is_some() {
        return None;
    }
    Some(out)
}

fn fmt_join<T: IntoIterator<Item = String>>(items: T, sep: &str) -> String {
    items.into_iter().collect::<Vec<_>>().join(sep)
}

/// Raw RGB crop buffer: `u32` little-endian width and height, then row-major
/// 8-bit RGB triples.
pub fn read_crop(path: &Path) -> Result<RgbBuffer, IoError> {
    let mut file = std::fs::File::open(path)?;
    let mut header = [0u8; 8];
    file.read_exact(&mut header)?;
    let width = u32::from_le_bytes(header[0..4].try_into().unwrap()) as usize;
    let height = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    let mut data = Vec::new();
    file.read_to_end(&mut data)?;
    Ok(RgbBuffer::new(width, height, data)?)
}

pub fn write_crop(buffer: &RgbBuffer, path: &Path) -> Result<(), IoError> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(&(buffer.width as u32).to_le_bytes())?;
    file.write_all(&(buffer.height as u32).to_le_bytes())?;
    file.write_all(&buffer.data)?;
    Ok(())
}

/// Parse newline-delimited tracklet records. Each line holds `id=`, `camera=`,
/// `start=`, `end=`, `conf=`, per-frame `pos=` / `bbox=` (frames separated by
/// `|`, components by `:`), an optional `vel=` (estimated from positions when
/// absent), and appearance as either inline `colors=` (entries separated by
/// `;`, each `r:g:b:weight`) or `crops=DIR` referencing `DIR/<id>_<frame>.rgb`
/// buffers relative to the tracklet file.
pub fn read_tracklets(path: &Path) -> Result<Vec<Tracklet>, IoError> {
    let text = std::fs::read_to_string(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields = split_fields(line);
        let get = |name: &str| -> Result<&str, IoError> {
            fields
                .iter()
                .find(|(k, _)| *k == name)
                .map(|(_, v)| *v)
                .ok_or_else(|| parse_err(path, lineno, format!("missing field {name}")))
        };
        let id: u64 = get("id")?
            .parse()
            .map_err(|_| parse_err(path, lineno, "bad id"))?;
        let camera = get("camera")?
            .parse()
            .map_err(|_| parse_err(path, lineno, "bad camera"))?;
        let start_frame: i64 = get("start")?
            .parse()
            .map_err(|_| parse_err(path, lineno, "bad start"))?;
        let end_frame: i64 = get("end")?
            .parse()
            .map_err(|_| parse_err(path, lineno, "bad end"))?;
        let confidence: f64 = get("conf")?
            .parse()
            .map_err(|_| parse_err(path, lineno, "bad conf"))?;

        let positions: Vec<[f64; 2]> = get("pos")?
            .split('|')
            .map(parse_numbers::<2>)
            .collect::<Option<_>>()
            .ok_or_else(|| parse_err(path, lineno, "bad pos array"))?;
        let bboxes: Vec<[f64; 4]> = get("bbox")?
            .split('|')
            .map(parse_numbers::<4>)
            .collect::<Option<_>>()
            .ok_or_else(|| parse_err(path, lineno, "bad bbox array"))?;
        if bboxes.len() != positions.len() {
            return Err(parse_err(
                path,
                lineno,
                format!("{} bboxes for {} positions", bboxes.len(), positions.len()),
            ));
        }
        let velocities: Vec<[f64; 2]> = match fields.iter().find(|(k, _)| *k == "vel") {
            Some((_, v)) => {
                let vels: Vec<[f64; 2]> = v
                    .split('|')
                    .map(parse_numbers::<2>)
                    .collect::<Option<_>>()
                    .ok_or_else(|| parse_err(path, lineno, "bad vel array"))?;
                if vels.len() != positions.len() {
                    return Err(parse_err(
                        path,
                        lineno,
                        format!("{} velocities for {} positions", vels.len(), positions.len()),
                    ));
                }
                vels
            }
            None => estimate_velocities(&positions),
        };

        let frames_appearance = if let Ok(colors) = get("colors") {
            let frames: Option<Vec<MajorColorDescriptor>> = colors
                .split('|')
                .map(|frame| {
                    let entries: Option<Vec<ColorEntry>> = frame
                        .split(';')
                        .map(|e| {
                            parse_numbers::<4>(e).map(|[r, g, b, w]| ColorEntry {
                                color: [r, g, b],
                                weight: w,
                            })
                        })
                        .collect();
                    entries.map(MajorColorDescriptor::new)
                })
                .collect();
            frames.ok_or_else(|| parse_err(path, lineno, "bad colors array"))?
        } else if let Ok(dir) = get("crops") {
            let dir = base.join(dir);
            (0..positions.len())
                .map(|f| {
                    let crop = read_crop(&dir.join(format!("{id}_{f}.rgb")))?;
                    Ok(compute_mcshr(&crop)?)
                })
                .collect::<Result<Vec<_>, IoError>>()?
        } else {
            return Err(parse_err(
                path,
                lineno,
                "appearance missing: provide colors= or crops=",
            ));
        };
        if frames_appearance.len() != positions.len() {
            return Err(parse_err(
                path,
                lineno,
                format!(
                    "{} appearance frames for {} positions",
                    frames_appearance.len(),
                    positions.len()
                ),
            ));
        }

        let states = positions
            .iter()
            .zip(&velocities)
            .zip(&bboxes)
            .map(|((&position, &velocity), &[x, y, w, h])| TrackState {
                position,
                velocity,
                bbox: BoundingBox::new(x, y, w, h),
            })
            .collect();
        out.push(Tracklet {
            id,
            camera,
            start_frame,
            end_frame,
            states,
            confidence,
            frames_appearance,
        });
    }
    Ok(out)
}

pub fn write_tracklets(tracklets: &[Tracklet], path: &Path) -> Result<(), IoError> {
    let mut out = String::from("# mctrack tracklets\n");
    for t in tracklets {
        let pos = fmt_join(
            t.states.iter().map(|s| format!("{}:{}", s.position[0], s.position[1])),
            "|",
        );
        let vel = fmt_join(
            t.states.iter().map(|s| format!("{}:{}", s.velocity[0], s.velocity[1])),
            "|",
        );
        let bbox = fmt_join(
            t.states.iter().map(|s| {
                format!("{}:{}:{}:{}", s.bbox.x, s.bbox.y, s.bbox.w, s.bbox.h)
            }),
            "|",
        );
        let colors = fmt_join(
            t.frames_appearance.iter().map(|d| {
                fmt_join(
                    d.entries.iter().map(|e| {
                        format!("{}:{}:{}:{}", e.color[0], e.color[1], e.color[2], e.weight)
                    }),
                    ";",
                )
            }),
            "|",
        );
        out.push_str(&format!(
            "id={} camera={} start={} end={} conf={} pos={} vel={} bbox={} colors={}\n",
            t.id, t.camera, t.start_frame, t.end_frame, t.confidence, pos, vel, bbox, colors
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct PortalDoc {
    from: u32,
    to: u32,
    exit_area: Vec<[f64; 2]>,
    enter_area: Vec<[f64; 2]>,
    exit_point: [f64; 2],
    enter_point: [f64; 2],
}

#[derive(Serialize, Deserialize)]
struct TopologyDoc {
    cameras: Vec<u32>,
    adjacency: Vec<Vec<bool>>,
    portals: Vec<PortalDoc>,
}

/// Read and validate a topology document (JSON).
pub fn read_topology(path: &Path) -> Result<CameraTopology, IoError> {
    let doc: TopologyDoc = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let topo = CameraTopology {
        cameras: doc.cameras,
        adjacency: doc.adjacency,
        portals: doc
            .portals
            .into_iter()
            .map(|p| crate::model::Portal {
                from: p.from,
                to: p.to,
                exit_area: crate::model::Polygon::new(p.exit_area),
                enter_area: crate::model::Polygon::new(p.enter_area),
                exit_point: p.exit_point,
                enter_point: p.enter_point,
            })
            .collect(),
    };
    Ok(crate::model::validate_topology(topo)?)
}

pub fn write_topology(topo: &CameraTopology, path: &Path) -> Result<(), IoError> {
    let doc = TopologyDoc {
        cameras: topo.cameras.clone(),
        adjacency: topo.adjacency.clone(),
        portals: topo
            .portals
            .iter()
            .map(|p| PortalDoc {
                from: p.from,
                to: p.to,
                exit_area: p.exit_area.vertices.clone(),
                enter_area: p.enter_area.vertices.clone(),
                exit_point: p.exit_point,
                enter_point: p.enter_point,
            })
            .collect(),
    };
    std::fs::write(path, serde_json::to_string_pretty(&doc)?)?;
    Ok(())
}

/// One line per trajectory: global id, then ordered
/// `tracklet:camera:start:end` tuples. The objective cost rides in the header.
pub fn write_trajectories(
    result: &TrajectorySet,
    tracklets: &[Tracklet],
    path: &Path,
) -> Result<(), IoError> {
    let by_id: std::collections::HashMap<u64, &Tracklet> =
        tracklets.iter().map(|t| (t.id, t)).collect();
    let mut out = format!("# mctrack trajectories cost={}\n", result.objective_cost);
    for (gid, traj) in result.trajectories.iter().enumerate() {
        out.push_str(&format!("{}", gid + 1));
        for id in traj {
            let t = by_id[id];
            out.push_str(&format!(" {}:{}:{}:{}", t.id, t.camera, t.start_frame, t.end_frame));
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_trajectories(path: &Path) -> Result<TrajectorySet, IoError> {
    let text = std::fs::read_to_string(path)?;
    let mut set = TrajectorySet::default();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(cost) = rest.split_whitespace().find_map(|t| t.strip_prefix("cost=")) {
                set.objective_cost = cost
                    .parse()
                    .map_err(|_| parse_err(path, lineno, "bad cost"))?;
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        parts.next(); // global id is positional
        let ids: Vec<u64> = parts
            .map(|tuple| {
                tuple
                    .split(':')
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| parse_err(path, lineno, "bad trajectory tuple"))
            })
            .collect::<Result<_, _>>()?;
        set.trajectories.push(ids);
    }
    Ok(set)
}

/// Per-frame annotation table: `camera frame id x y w h`, one box per line.
/// Used for ground truth and for the hypothesis expansion of a result.
pub fn write_annotations(annotations: &FrameAnnotations, path: &Path) -> Result<(), IoError> {
    let mut out = String::from("# mctrack annotations\n");
    for (&(camera, frame), boxes) in &annotations.frames {
        for (id, b) in boxes {
            out.push_str(&format!(
                "{camera} {frame} {id} {} {} {} {}\n",
                b.x, b.y, b.w, b.h
            ));
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_annotations(path: &Path) -> Result<FrameAnnotations, IoError> {
    let text = std::fs::read_to_string(path)?;
    let mut out = FrameAnnotations::default();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 7 {
            return Err(parse_err(path, lineno, "expected 7 columns"));
        }
        let err = |what: &str| parse_err(path, lineno, format!("bad {what}"));
        let camera = toks[0].parse().map_err(|_| err("camera"))?;
        let frame = toks[1].parse().map_err(|_| err("frame"))?;
        let id = toks[2].parse().map_err(|_| err("id"))?;
        let nums: Vec<f64> = toks[3..7]
            .iter()
            .map(|t| t.parse())
            .collect::<Result<_, _>>()
            .map_err(|_| err("box"))?;
        out.insert(camera, frame, id, BoundingBox::new(nums[0], nums[1], nums[2], nums[3]));
    }
    Ok(out)
}

/// Expand a solved result into per-frame hypothesis boxes; the global id of a
/// trajectory is its 1-based position in the canonical order.
pub fn expand_hypotheses(result: &TrajectorySet, tracklets: &[Tracklet]) -> FrameAnnotations {
    let by_id: std::collections::HashMap<u64, &Tracklet> =
        tracklets.iter().map(|t| (t.id, t)).collect();
    let mut out = FrameAnnotations::default();
    for (gid, traj) in result.trajectories.iter().enumerate() {
        for id in traj {
            let t = by_id[id];
            for (k, state) in t.states.iter().enumerate() {
                out.insert(t.camera, t.start_frame + k as i64, gid as u64 + 1, state.bbox);
            }
        }
    }
    out
}

/// Flat key-value report document with stable key names.
pub fn render_report(
    report: &crate::evaluate::MctaReport,
    stats: Option<&crate::equalize::EqualizationStats>,
) -> String {
    let mut out = String::new();
    out.push_str(&format!("precision {}\n", report.precision));
    out.push_str(&format!("recall {}\n", report.recall));
    out.push_str(&format!("f1 {}\n", report.f1));
    out.push_str(&format!("mme_s {}\n", report.mme_s));
    out.push_str(&format!("mme_c {}\n", report.mme_c));
    out.push_str(&format!("tp_s {}\n", report.tp_s));
    out.push_str(&format!("tp_c {}\n", report.tp_c));
    out.push_str(&format!("mcta {}\n", report.mcta));
    if let Some(s) = stats {
        out.push_str(&format!("delta_mu {}\n", s.delta_mu));
        out.push_str(&format!("delta_sigma {}\n", s.delta_sigma));
    }
    for w in &report.warnings {
        out.push_str(&format!("# warning: {w}\n"));
    }
    out
}
