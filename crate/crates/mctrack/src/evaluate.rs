//! MCTA evaluation: per-frame box matching with mismatch counts split into
//! single-camera and inter-camera streams.

use crate::model::{BoundingBox, CameraId};
use std::collections::{BTreeMap, HashMap};

/// Per-(camera, frame) annotated boxes; used for both ground truth and
/// hypotheses. Target ids must be unique within one frame of one camera.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrameAnnotations {
    pub frames: BTreeMap<(CameraId, i64), Vec<(u64, BoundingBox)>>,
}

impl FrameAnnotations {
    pub fn insert(&mut self, camera: CameraId, frame: i64, id: u64, bbox: BoundingBox) {
        self.frames.entry((camera, frame)).or_default().push((id, bbox));
    }

    pub fn box_count(&self) -> u64 {
        self.frames.values().map(|v| v.len() as u64).sum()
    }
}

/// How ground-truth and hypothesis boxes are paired within a frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatchMode {
    /// One-to-one pairing with IoU at or above the threshold, preferring
    /// continuation of the previous frame's pairs, then maximum IoU.
    Iou(f64),
    /// Pair boxes that are bit-identical; for the protocol where ground-truth
    /// detections are fed to the tracker, this yields precision = recall = 1.
    Identity,
}

/// One-to-one (gt id, hyp id) pairs per frame plus the detection tallies.
#[derive(Debug, Clone, Default)]
pub struct Correspondences {
    pub frames: BTreeMap<(CameraId, i64), Vec<(u64, u64)>>,
    pub gt_boxes: u64,
    pub hyp_boxes: u64,
    pub misses: u64,
    pub false_positives: u64,
}

impl Correspondences {
    pub fn matched(&self) -> u64 {
        self.frames.values().map(|v| v.len() as u64).sum()
    }
}

/// Match ground truth against hypotheses frame by frame.
pub fn match_frames(
    gt: &FrameAnnotations,
    hyp: &FrameAnnotations,
    mode: MatchMode,
) -> Correspondences {
    let mut out = Correspondences {
        gt_boxes: gt.box_count(),
        hyp_boxes: hyp.box_count(),
        ..Default::default()
    };
    // carried pairing per camera for continuation preference
    let mut carry: HashMap<CameraId, HashMap<u64, u64>> = HashMap::new();
    let empty: Vec<(u64, BoundingBox)> = Vec::new();
    let mut keys: Vec<(CameraId, i64)> = gt
        .frames
        .keys()
        .chain(hyp.frames.keys())
        .copied()
        .collect();
    keys.sort();
    keys.dedup();
    for key in keys {
        let g = gt.frames.get(&key).unwrap_or(&empty);
        let h = hyp.frames.get(&key).unwrap_or(&empty);
        let mut pairs: Vec<(u64, u64)> = Vec::new();
        let mut g_used = vec![false; g.len()];
        let mut h_used = vec![false; h.len()];
        match mode {
            MatchMode::Identity => {
                for (gi, (gid, gb)) in g.iter().enumerate() {
                    for (hi, (hid, hb)) in h.iter().enumerate() {
                        if !h_used[hi] && gb == hb {
                            pairs.push((*gid, *hid));
                            g_used[gi] = true;
                            h_used[hi] = true;
                            break;
                        }
                    }
                }
            }
            MatchMode::Iou(threshold) => {
                let prev = carry.entry(key.0).or_default();
                // continuation: keep last frame's pairs still above threshold
                for (gi, (gid, gb)) in g.iter().enumerate() {
                    if let Some(&hid) = prev.get(gid) {
                        if let Some(hi) = h.iter().position(|(id, _)| *id == hid) {
                            if !h_used[hi] && gb.iou(&h[hi].1) >= threshold {
                                pairs.push((*gid, hid));
                                g_used[gi] = true;
                                h_used[hi] = true;
                            }
                        }
                    }
                }
                // remaining boxes: greedy max-IoU, deterministic tie-break
                let mut cands: Vec<(f64, u64, u64, usize, usize)> = Vec::new();
                for (gi, (gid, gb)) in g.iter().enumerate() {
                    if g_used[gi] {
                        continue;
                    }
                    for (hi, (hid, hb)) in h.iter().enumerate() {
                        if h_used[hi] {
                            continue;
                        }
                        let iou = gb.iou(hb);
                        if iou >= threshold {
                            cands.push((iou, *gid, *hid, gi, hi));
                        }
                    }
                }
                cands.sort_by(|a, b| {
                    b.0.partial_cmp(&a.0)
                        .unwrap()
                        .then(a.1.cmp(&b.1))
                        .then(a.2.cmp(&b.2))
                });
                for (_, gid, hid, gi, hi) in cands {
                    if !g_used[gi] && !h_used[hi] {
                        pairs.push((gid, hid));
                        g_used[gi] = true;
                        h_used[hi] = true;
                    }
                }
                let prev = carry.entry(key.0).or_default();
                *prev = pairs.iter().copied().collect();
            }
        }
        out.misses += g_used.iter().filter(|&&u| !u).count() as u64;
        out.false_positives += h_used.iter().filter(|&&u| !u).count() as u64;
        if !pairs.is_empty() {
            pairs.sort();
            out.frames.insert(key, pairs);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MismatchCounts {
    pub mme_s: u64,
    pub mme_c: u64,
    pub tp_s: u64,
    pub tp_c: u64,
}

/// Walk each ground-truth target's matched frames in time order. Consecutive
/// matched pairs in the same camera count toward `tp_s`, pairs across cameras
/// toward `tp_c`; the first-ever matched frame of a target counts one `tp_c`.
/// A hypothesis-id change over a pair increments the mismatch counter of the
/// same stream. A same-camera pair separated by more than `eta` frames is
/// treated as a re-entry and counted on the inter-camera stream.
pub fn count_mismatches(corr: &Correspondences, eta: i64) -> MismatchCounts {
    // per gt target: (frame, camera, hyp id), already time-sorted by BTreeMap
    let mut tracks: HashMap<u64, Vec<(i64, CameraId, u64)>> = HashMap::new();
    for (&(camera, frame), pairs) in &corr.frames {
        for &(gid, hid) in pairs {
            tracks.entry(gid).or_default().push((frame, camera, hid));
        }
    }
    let mut counts = MismatchCounts::default();
    for seq in tracks.values_mut() {
        seq.sort();
        counts.tp_c += 1; // new-target rule
        for w in seq.windows(2) {
            let (f0, c0, h0) = w[0];
            let (f1, c1, h1) = w[1];
            let cross = c0 != c1 || f1 - f0 > eta;
            if cross {
                counts.tp_c += 1;
                if h0 != h1 {
                    counts.mme_c += 1;
                }
            } else {
                counts.tp_s += 1;
                if h0 != h1 {
                    counts.mme_s += 1;
                }
            }
        }
    }
    counts
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MctaReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub mme_s: u64,
    pub mme_c: u64,
    pub tp_s: u64,
    pub tp_c: u64,
    pub mcta: f64,
    pub warnings: Vec<String>,
}

fn bracket(mme: u64, tp: u64, label: &str, warnings: &mut Vec<String>) -> f64 {
    if tp == 0 {
        warnings.push(format!("no {label} matching pairs; bracket fixed at 1"));
        1.0
    } else {
        (1.0 - mme as f64 / tp as f64).clamp(0.0, 1.0)
    }
}

/// Assemble the final score: detection F1 times the two clamped mismatch
/// brackets, guaranteed to land in `[0, 1]`.
pub fn mcta(corr: &Correspondences, counts: &MismatchCounts) -> MctaReport {
    let matched = corr.matched() as f64;
    let precision = if corr.hyp_boxes == 0 {
        0.0
    } else {
        matched / corr.hyp_boxes as f64
    };
    let recall = if corr.gt_boxes == 0 {
        0.0
    } else {
        matched / corr.gt_boxes as f64
    };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    let mut warnings = Vec::new();
    let sct = bracket(counts.mme_s, counts.tp_s, "single-camera", &mut warnings);
    let ict = bracket(counts.mme_c, counts.tp_c, "inter-camera", &mut warnings);
    MctaReport {
        precision,
        recall,
        f1,
        mme_s: counts.mme_s,
        mme_c: counts.mme_c,
        tp_s: counts.tp_s,
        tp_c: counts.tp_c,
        mcta: f1 * sct * ict,
        warnings,
    }
}

/// End-to-end evaluation of a hypothesis against ground truth.
pub fn evaluate(
    gt: &FrameAnnotations,
    hyp: &FrameAnnotations,
    mode: MatchMode,
    eta: i64,
) -> MctaReport {
    let corr = match_frames(gt, hyp, mode);
    let counts = count_mismatches(&corr, eta);
    mcta(&corr, &counts)
}
