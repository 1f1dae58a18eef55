//! Major-color appearance descriptors and their similarity metrics.
//!
//! A tracklet's appearance is a piecewise major-color representation: the
//! per-frame descriptors are segmented into gait-period-length pieces, each
//! piece averaged into one incremental descriptor. Tracklet-level similarity
//! is the mean over all piece pairs; the max-minus-min gap (MUG) over the same
//! pairs measures how stable that similarity is.

use crate::model::{ColorEntry, MajorColorDescriptor, Tracklet};
use thiserror::Error;

/// RGB radius within which two colors are considered the same major color.
pub const MATCH_RADIUS: f64 = 60.0;
/// Maximum number of entries kept in a descriptor.
pub const MAX_COLORS: usize = 10;
/// Kept clusters must cover at least this fraction of the pixel mass.
pub const MASS_COVERAGE: f64 = 0.9;
/// Default lower bound for candidate periods, in frames.
pub const DEFAULT_GAMMA: usize = 15;

#[derive(Debug, Error)]
pub enum AppearanceError {
    #[error("empty pixel buffer")]
    EmptyBuffer,
    #[error("pixel buffer of {len} bytes is not {width}x{height} RGB")]
    BufferShape { len: usize, width: usize, height: usize },
}

/// Row-major 8-bit RGB crop.
#[derive(Debug, Clone)]
pub struct RgbBuffer {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl RgbBuffer {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self, AppearanceError> {
        if width == 0 || height == 0 || data.is_empty() {
            return Err(AppearanceError::EmptyBuffer);
        }
        if data.len() != width * height * 3 {
            return Err(AppearanceError::BufferShape {
                len: data.len(),
                width,
                height,
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }
}

fn color_distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    let d0 = a[0] - b[0];
    let d1 = a[1] - b[1];
    let d2 = a[2] - b[2];
    (d0 * d0 + d1 * d1 + d2 * d2).sqrt()
}

struct Cluster {
    centroid: [f64; 3],
    mass: f64,
}

impl Cluster {
    fn absorb(&mut self, color: [f64; 3], weight: f64) {
        let total = self.mass + weight;
        for (c, x) in self.centroid.iter_mut().zip(color) {
            *c = (*c * self.mass + x * weight) / total;
        }
        self.mass = total;
    }
}

fn nearest_cluster(clusters: &[Cluster], color: [f64; 3]) -> Option<(usize, f64)> {
    clusters
        .iter()
        .enumerate()
        .map(|(i, c)| (i, color_distance(c.centroid, color)))
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
}

/// Reduce a cluster list to a descriptor: rank by mass, keep the top clusters
/// until `MASS_COVERAGE` of the total is covered (at most `MAX_COLORS`), and
/// renormalize the kept weights.
fn clusters_to_descriptor(mut clusters: Vec<Cluster>) -> MajorColorDescriptor {
    clusters.sort_by(|a, b| b.mass.partial_cmp(&a.mass).unwrap());
    let total: f64 = clusters.iter().map(|c| c.mass).sum();
    let mut kept = Vec::new();
    let mut covered = 0.0;
    for c in clusters {
        if kept.len() >= MAX_COLORS {
            break;
        }
        if covered >= MASS_COVERAGE * total && !kept.is_empty() {
            break;
        }
        covered += c.mass;
        kept.push(ColorEntry {
            color: c.centroid,
            weight: c.mass,
        });
    }
    MajorColorDescriptor::new(kept)
}

/// Extract the major colors of one crop with a single-pass online k-means:
/// a pixel spawns a new cluster when its nearest centroid is farther than
/// `MATCH_RADIUS`, otherwise it is folded into that centroid's running mean.
pub fn compute_mcshr(buffer: &RgbBuffer) -> Result<MajorColorDescriptor, AppearanceError> {
    if buffer.data.is_empty() {
        return Err(AppearanceError::EmptyBuffer);
    }
    let mut clusters: Vec<Cluster> = Vec::new();
    for px in buffer.data.chunks_exact(3) {
        let color = [px[0] as f64, px[1] as f64, px[2] as f64];
        match nearest_cluster(&clusters, color) {
            Some((i, d)) if d <= MATCH_RADIUS => clusters[i].absorb(color, 1.0),
            _ => clusters.push(Cluster {
                centroid: color,
                mass: 1.0,
            }),
        }
    }
    Ok(clusters_to_descriptor(clusters))
}

/// Similarity of two major-color descriptors in `[0,1]`: total matched weight
/// over greedily paired colors within `MATCH_RADIUS`, heaviest pairs first,
/// each entry used at most once.
pub fn mcshr_similarity(a: &MajorColorDescriptor, b: &MajorColorDescriptor) -> f64 {
    // Candidate pairs ordered by a swap-symmetric key so Sim(a,b) == Sim(b,a).
    let mut pairs: Vec<(usize, usize, f64)> = Vec::new();
    for (i, ea) in a.entries.iter().enumerate() {
        for (j, eb) in b.entries.iter().enumerate() {
            let d = color_distance(ea.color, eb.color);
            if d <= MATCH_RADIUS {
                pairs.push((i, j, d));
            }
        }
    }
    pairs.sort_by(|&(i1, j1, d1), &(i2, j2, d2)| {
        let (a1, b1) = (&a.entries[i1], &b.entries[j1]);
        let (a2, b2) = (&a.entries[i2], &b.entries[j2]);
        let key1 = (a1.weight.min(b1.weight), a1.weight.max(b1.weight));
        let key2 = (a2.weight.min(b2.weight), a2.weight.max(b2.weight));
        key2.partial_cmp(&key1)
            .unwrap()
            .then(d1.partial_cmp(&d2).unwrap())
    });
    let mut used_a = vec![false; a.entries.len()];
    let mut used_b = vec![false; b.entries.len()];
    let mut matched = 0.0;
    for (i, j, _) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            matched += a.entries[i].weight.min(b.entries[j].weight);
        }
    }
    matched.min(1.0)
}

/// Average a contiguous range of per-frame descriptors into one incremental
/// descriptor: weights averaged over the range length, colors within
/// `MATCH_RADIUS` merged, the result renormalized and truncated.
pub fn incremental_mcshr(frames: &[MajorColorDescriptor]) -> MajorColorDescriptor {
    if frames.is_empty() {
        return MajorColorDescriptor::default();
    }
    let mut clusters: Vec<Cluster> = Vec::new();
    for frame in frames {
        for e in &frame.entries {
            match nearest_cluster(&clusters, e.color) {
                Some((i, d)) if d <= MATCH_RADIUS => clusters[i].absorb(e.color, e.weight),
                _ => clusters.push(Cluster {
                    centroid: e.color,
                    mass: e.weight,
                }),
            }
        }
    }
    let n = frames.len() as f64;
    for c in &mut clusters {
        c.mass /= n;
    }
    clusters_to_descriptor(clusters)
}

/// Best periodic time for a per-frame descriptor sequence: the lag in
/// `[gamma, len/2)` maximizing mean self-similarity, smallest lag on ties.
/// Degenerate sequences (range empty) get a single piece, `tau == len`.
pub fn estimate_period(frames: &[MajorColorDescriptor], gamma: usize) -> usize {
    let n = frames.len();
    if n == 0 {
        return 0;
    }
    let t_max = (n - 1) / 2;
    if gamma == 0 || gamma > t_max {
        return n;
    }
    let mut best_t = n;
    let mut best_score = f64::NEG_INFINITY;
    for t in gamma..=t_max {
        let mut sum = 0.0;
        for j in 0..(n - t) {
            sum += mcshr_similarity(&frames[j], &frames[j + t]);
        }
        let score = sum / (n - t) as f64;
        if score > best_score {
            best_score = score;
            best_t = t;
        }
    }
    best_t
}

/// A tracklet's appearance as one incremental descriptor per period-length
/// piece.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseAppearance {
    pub period: usize,
    pub pieces: Vec<MajorColorDescriptor>,
}

/// Segment per-frame descriptors into `ceil(len/period)` pieces of `period`
/// frames (the last piece takes the remainder) and average each piece.
pub fn build_pmcshr(frames: &[MajorColorDescriptor], period: usize) -> PiecewiseAppearance {
    assert!(period >= 1, "period must be at least one frame");
    let pieces = frames.chunks(period).map(incremental_mcshr).collect();
    PiecewiseAppearance {
        period,
        pieces,
    }
}

/// Estimate the period and build the piecewise appearance in one step.
pub fn tracklet_appearance(tracklet: &Tracklet, gamma: usize) -> PiecewiseAppearance {
    let period = estimate_period(&tracklet.frames_appearance, gamma);
    build_pmcshr(&tracklet.frames_appearance, period.max(1))
}

/// Appearance similarity `Dis`: the mean piece-pair similarity.
pub fn appearance_distance(a: &PiecewiseAppearance, b: &PiecewiseAppearance) -> f64 {
    if a.pieces.is_empty() || b.pieces.is_empty() {
        return 0.0;
    }
    let mut sum = 0.0;
    for pa in &a.pieces {
        for pb in &b.pieces {
            sum += mcshr_similarity(pa, pb);
        }
    }
    sum / (a.pieces.len() * b.pieces.len()) as f64
}

/// Minimum uncertain gap: max minus min piece-pair similarity. Zero when there
/// is only one piece pair.
pub fn mug(a: &PiecewiseAppearance, b: &PiecewiseAppearance) -> f64 {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for pa in &a.pieces {
        for pb in &b.pieces {
            let s = mcshr_similarity(pa, pb);
            min = min.min(s);
            max = max.max(s);
        }
    }
    if min.is_finite() {
        max - min
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn desc(entries: &[([f64; 3], f64)]) -> MajorColorDescriptor {
        MajorColorDescriptor::new(
            entries
                .iter()
                .map(|&(color, weight)| ColorEntry { color, weight })
                .collect(),
        )
    }

    const RED: [f64; 3] = [255.0, 0.0, 0.0];
    const BLUE: [f64; 3] = [0.0, 0.0, 255.0];
    const GREEN: [f64; 3] = [0.0, 255.0, 0.0];

    #[test]
    fn uniform_buffer_single_cluster() {
        let buf = RgbBuffer::new(10, 10, [255u8, 0, 0].repeat(100)).unwrap();
        let d = compute_mcshr(&buf).unwrap();
        assert_eq!(d.entries.len(), 1);
        assert_eq!(d.entries[0].color, RED);
        assert_abs_diff_eq!(d.entries[0].weight, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn half_red_half_blue() {
        let mut data = [255u8, 0, 0].repeat(50);
        data.extend([0u8, 0, 255].repeat(50));
        let buf = RgbBuffer::new(10, 10, data).unwrap();
        let d = compute_mcshr(&buf).unwrap();
        assert_eq!(d.entries.len(), 2);
        for e in &d.entries {
            assert_abs_diff_eq!(e.weight, 0.5, epsilon = 0.01);
        }
    }

    #[test]
    fn random_buffer_weights_normalized() {
        let mut data = Vec::with_capacity(300);
        let mut seed = 0x12345u32;
        for _ in 0..300 {
            seed = seed.wrapping_mul(1664525).wrapping_add(1013904223);
            data.push((seed >> 16) as u8);
        }
        let buf = RgbBuffer::new(10, 10, data).unwrap();
        let d = compute_mcshr(&buf).unwrap();
        assert!(d.entries.len() <= MAX_COLORS);
        assert_abs_diff_eq!(d.total_weight(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn empty_buffer_rejected() {
        assert!(RgbBuffer::new(0, 0, vec![]).is_err());
    }

    #[test]
    fn similarity_identity() {
        let d = desc(&[(RED, 0.6), (BLUE, 0.4)]);
        assert_abs_diff_eq!(mcshr_similarity(&d, &d), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn similarity_disjoint_colors() {
        let a = desc(&[(RED, 1.0)]);
        let b = desc(&[(BLUE, 1.0)]);
        assert_eq!(mcshr_similarity(&a, &b), 0.0);
    }

    #[test]
    fn similarity_matched_mass() {
        let a = desc(&[(RED, 1.0)]);
        let b = desc(&[(RED, 0.5), (BLUE, 0.5)]);
        assert_abs_diff_eq!(mcshr_similarity(&a, &b), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn incremental_single_frame_is_identity() {
        let d = desc(&[(RED, 0.7), (GREEN, 0.3)]);
        let merged = incremental_mcshr(std::slice::from_ref(&d));
        assert_eq!(merged, d);
    }

    #[test]
    fn incremental_identical_frames_idempotent() {
        let d = desc(&[(RED, 0.7), (GREEN, 0.3)]);
        let merged = incremental_mcshr(&[d.clone(), d.clone()]);
        for (a, b) in merged.entries.iter().zip(d.entries.iter()) {
            for c in 0..3 {
                assert_abs_diff_eq!(a.color[c], b.color[c], epsilon = 1e-9);
            }
            assert_abs_diff_eq!(a.weight, b.weight, epsilon = 1e-12);
        }
    }

    #[test]
    fn incremental_averages_two_frames() {
        let merged = incremental_mcshr(&[desc(&[(RED, 1.0)]), desc(&[(BLUE, 1.0)])]);
        assert_eq!(merged.entries.len(), 2);
        for e in &merged.entries {
            assert_abs_diff_eq!(e.weight, 0.5, epsilon = 1e-12);
        }
    }

    /// Distinct colors with pairwise RGB distance above `MATCH_RADIUS`.
    fn far_palette(n: usize) -> Vec<[f64; 3]> {
        let mut colors = Vec::new();
        for r in 0..5 {
            for g in 0..5 {
                for b in 0..5 {
                    colors.push([r as f64 * 63.0, g as f64 * 63.0, b as f64 * 63.0]);
                }
            }
        }
        colors.truncate(n);
        assert_eq!(colors.len(), n);
        colors
    }

    fn periodic_frames(len: usize, period: usize) -> Vec<MajorColorDescriptor> {
        let palette = far_palette(period);
        (0..len).map(|j| desc(&[(palette[j % period], 1.0)])).collect()
    }

    #[test]
    fn degenerate_short_tracklet() {
        let frames = periodic_frames(20, 5);
        assert_eq!(estimate_period(&frames, 15), 20);
    }

    #[test]
    fn recovers_planted_period() {
        let frames = periodic_frames(90, 20);
        assert_eq!(estimate_period(&frames, 15), 20);
    }

    #[test]
    fn constant_appearance_ties_to_gamma() {
        let frames = vec![desc(&[(RED, 1.0)]); 90];
        assert_eq!(estimate_period(&frames, 15), 15);
    }

    #[test]
    fn recovers_all_periods_exhaustively() {
        // Noiseless planted periods over the full candidate range for len 120.
        let len = 120;
        for p in DEFAULT_GAMMA..(len / 2) {
            let frames = periodic_frames(len, p);
            assert_eq!(estimate_period(&frames, DEFAULT_GAMMA), p, "period {p}");
        }
    }

    #[test]
    fn pmcshr_piece_layout() {
        let frames = periodic_frames(9, 3);
        let p = build_pmcshr(&frames, 3);
        assert_eq!(p.pieces.len(), 3);

        let frames = periodic_frames(10, 3);
        let p = build_pmcshr(&frames, 3);
        assert_eq!(p.pieces.len(), 4);
        // last piece covers a single frame
        assert_eq!(p.pieces[3], frames[9]);

        let frames = periodic_frames(5, 5);
        assert_eq!(build_pmcshr(&frames, 5).pieces.len(), 1);
    }

    #[test]
    fn distance_identity_and_disjoint() {
        let a = build_pmcshr(&vec![desc(&[(RED, 1.0)]); 4], 4);
        assert_abs_diff_eq!(appearance_distance(&a, &a), 1.0, epsilon = 1e-12);
        let b = build_pmcshr(&vec![desc(&[(BLUE, 1.0)]); 4], 4);
        assert_eq!(appearance_distance(&a, &b), 0.0);
    }

    #[test]
    fn distance_averages_piece_pairs() {
        // Single-piece a against two-piece b with Sim values 0.4 and 0.8.
        let a = build_pmcshr(&[desc(&[(RED, 1.0)])], 1);
        let b = PiecewiseAppearance {
            period: 1,
            pieces: vec![
                desc(&[(RED, 0.4), (BLUE, 0.6)]),
                desc(&[(RED, 0.8), (BLUE, 0.2)]),
            ],
        };
        assert_abs_diff_eq!(appearance_distance(&a, &b), 0.6, epsilon = 1e-12);
    }

    /// Naive reference for Dis: the definition as a plain double loop.
    fn appearance_distance_reference(a: &PiecewiseAppearance, b: &PiecewiseAppearance) -> f64 {
        let mut total = 0.0;
        let mut count = 0usize;
        for pa in &a.pieces {
            for pb in &b.pieces {
                total += mcshr_similarity(pa, pb);
                count += 1;
            }
        }
        total / count as f64
    }

    #[test]
    fn mug_cases() {
        let single = build_pmcshr(&[desc(&[(RED, 1.0)])], 1);
        assert_eq!(mug(&single, &single), 0.0);

        let a = build_pmcshr(&[desc(&[(RED, 1.0)])], 1);
        let b = PiecewiseAppearance {
            period: 1,
            pieces: vec![
                desc(&[(RED, 0.2), (BLUE, 0.8)]),
                desc(&[(RED, 0.9), (BLUE, 0.1)]),
            ],
        };
        assert_abs_diff_eq!(mug(&a, &b), 0.7, epsilon = 1e-12);

        let same = build_pmcshr(&vec![desc(&[(RED, 1.0)]); 6], 3);
        assert_eq!(mug(&same, &same), 0.0);
    }

    fn arb_descriptor() -> impl Strategy<Value = MajorColorDescriptor> {
        prop::collection::vec(
            (
                prop::array::uniform3(0.0f64..255.0),
                0.01f64..1.0,
            ),
            1..6,
        )
        .prop_map(|entries| {
            MajorColorDescriptor::new(
                entries
                    .into_iter()
                    .map(|(color, weight)| ColorEntry { color, weight })
                    .collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn similarity_symmetric(a in arb_descriptor(), b in arb_descriptor()) {
            let ab = mcshr_similarity(&a, &b);
            let ba = mcshr_similarity(&b, &a);
            prop_assert!((ab - ba).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&ab));
        }

        #[test]
        fn distance_matches_reference(
            fa in prop::collection::vec(arb_descriptor(), 1..8),
            fb in prop::collection::vec(arb_descriptor(), 1..8),
        ) {
            let a = build_pmcshr(&fa, 2);
            let b = build_pmcshr(&fb, 2);
            let d = appearance_distance(&a, &b);
            prop_assert!((d - appearance_distance_reference(&a, &b)).abs() < 1e-12);
            prop_assert!((d - appearance_distance(&b, &a)).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&d));
            let m = mug(&a, &b);
            prop_assert!((0.0..=1.0).contains(&m));
        }
    }
}
