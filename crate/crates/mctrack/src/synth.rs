//! Deterministic synthetic scenarios: linear targets walking a chain of
//! portal-connected cameras, with configurable tracklet fragmentation and a
//! cross-camera appearance shift.
//!
//! Targets traverse the cameras one after another, spaced far enough apart in
//! time that the only rule-eligible candidate pairs join fragments of the same
//! target. Same-camera appearance carries only a small per-fragment jitter;
//! each camera hand-off additionally depresses the color weights by a random
//! fraction of the shift, so cross-camera similarities sit lower and spread
//! wider than same-camera ones.

use crate::evaluate::FrameAnnotations;
use crate::model::{
    BoundingBox, CameraId, CameraTopology, ColorEntry, MajorColorDescriptor, Polygon, Portal,
    TrackState, Tracklet,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use std::collections::HashMap;

/// Frames one camera visit lasts (x sweeps 50..=950 at 5 px/frame).
pub const VISIT_FRAMES: i64 = 181;
/// Invisible frames between consecutive camera visits.
pub const TRANSIT_FRAMES: i64 = 20;
/// Frame spacing between consecutive targets; large enough that no two
/// targets ever produce a rule-eligible candidate pair.
pub const TARGET_SPACING: i64 = 2000;

const SPEED: f64 = 5.0;
const BOX_W: f64 = 40.0;
const BOX_H: f64 = 80.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_cameras: u32,
    pub n_targets: u32,
    /// Per-frame probability scale for cutting a visit into fragments;
    /// 0 yields one tracklet per camera visit.
    pub fragmentation: f64,
    /// Scale of the appearance depression applied at each camera hand-off.
    pub appearance_shift: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            n_cameras: 3,
            n_targets: 10,
            fragmentation: 0.3,
            appearance_shift: 0.25,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthScenario {
    pub tracklets: Vec<Tracklet>,
    pub topology: CameraTopology,
    pub ground_truth: FrameAnnotations,
    /// Tracklet id to ground-truth target id, for diagnostics and tests.
    pub tracklet_targets: HashMap<u64, u64>,
}

/// Chain topology: camera `k` is adjacent to `k ± 1`, with portals at the
/// right edge of `k` and the left edge of `k + 1` (both directions).
pub fn chain_topology(n_cameras: u32) -> CameraTopology {
    let n = n_cameras as usize;
    let mut adjacency = vec![vec![false; n]; n];
    for (i, row) in adjacency.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = i.abs_diff(j) <= 1;
        }
    }
    let band = |x0: f64, x1: f64| {
        Polygon::new(vec![[x0, -10.0], [x1, -10.0], [x1, 1010.0], [x0, 1010.0]])
    };
    let right = || band(880.0, 1010.0);
    let left = || band(-10.0, 110.0);
    let mut portals = Vec::new();
    for k in 0..n_cameras.saturating_sub(1) {
        portals.push(Portal {
            from: k,
            to: k + 1,
            exit_area: right(),
            enter_area: left(),
            exit_point: [950.0, 500.0],
            enter_point: [50.0, 500.0],
        });
        portals.push(Portal {
            from: k + 1,
            to: k,
            exit_area: left(),
            enter_area: right(),
            exit_point: [50.0, 500.0],
            enter_point: [950.0, 500.0],
        });
    }
    CameraTopology {
        cameras: (0..n_cameras).collect(),
        adjacency,
        portals,
    }
}

/// RGB grid colors spaced 63 apart, so distinct palette colors never merge
/// under the matching radius.
fn palette_color(index: usize) -> [f64; 3] {
    let levels = [0.0, 63.0, 126.0, 189.0, 252.0];
    let i = index % 125;
    [levels[i / 25], levels[(i / 5) % 5], levels[i % 5]]
}

fn cut_points(rng: &mut ChaCha8Rng, len: i64, fragmentation: f64) -> Vec<i64> {
    let p = fragmentation / 10.0;
    let mut cuts = Vec::new();
    let mut since = 0i64;
    for f in 0..len - 1 {
        since += 1;
        if since >= 4 && len - 1 - f >= 4 && rng.gen_bool(p) {
            cuts.push(f + 1);
            since = 0;
        }
    }
    cuts
}

pub fn synth_scenario(config: &SynthConfig) -> SynthScenario {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let topology = chain_topology(config.n_cameras);
    let mut tracklets = Vec::new();
    let mut ground_truth = FrameAnnotations::default();
    let mut tracklet_targets = HashMap::new();
    let mut next_id = 1u64;

    for t in 0..config.n_targets as u64 {
        let target_id = t + 1;
        let lane_y = 150.0 + 70.0 * (t % 10) as f64;
        let c1 = palette_color((2 * t as usize) % 125);
        let c2 = palette_color((2 * t as usize + 1) % 125);
        let mut visit_start = TARGET_SPACING * t as i64;
        let mut depression = 0.0f64;
        for camera in 0..config.n_cameras as CameraId {
            if camera > 0 {
                depression += config.appearance_shift * (0.5 + 0.5 * rng.gen::<f64>());
                depression = depression.min(0.5);
            }
            // ground truth covers every visible frame
            for f in 0..VISIT_FRAMES {
                let x = 50.0 + SPEED * f as f64;
                let bbox = BoundingBox::new(x - BOX_W / 2.0, lane_y - BOX_H, BOX_W, BOX_H);
                ground_truth.insert(camera, visit_start + f, target_id, bbox);
            }
            // cut the visit into contiguous fragments
            let cuts = cut_points(&mut rng, VISIT_FRAMES, config.fragmentation);
            let mut bounds = vec![0i64];
            bounds.extend(cuts);
            bounds.push(VISIT_FRAMES);
            for w in bounds.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                let jitter = rng.gen_range(-0.01..0.01);
                let w1 = 0.6 - depression + jitter;
                let descriptor = MajorColorDescriptor::new(vec![
                    ColorEntry {
                        color: c1,
                        weight: w1,
                    },
                    ColorEntry {
                        color: c2,
                        weight: 1.0 - w1,
                    },
                ]);
                let states: Vec<TrackState> = (lo..hi)
                    .map(|f| {
                        let x = 50.0 + SPEED * f as f64;
                        TrackState {
                            position: [x, lane_y],
                            velocity: [SPEED, 0.0],
                            bbox: BoundingBox::new(x - BOX_W / 2.0, lane_y - BOX_H, BOX_W, BOX_H),
                        }
                    })
                    .collect();
                let n = states.len();
                tracklets.push(Tracklet {
                    id: next_id,
                    camera,
                    start_frame: visit_start + lo,
                    end_frame: visit_start + hi - 1,
                    states,
                    confidence: 0.9,
                    frames_appearance: vec![descriptor; n],
                });
                tracklet_targets.insert(next_id, target_id);
                next_id += 1;
            }
            visit_start += VISIT_FRAMES + TRANSIT_FRAMES;
        }
    }

    SynthScenario {
        tracklets,
        topology,
        ground_truth,
        tracklet_targets,
    }
}
