//! Domain data model: tracklets, color descriptors, camera topology and the
//! solver output, plus input validation.

use thiserror::Error;

pub type CameraId = u32;

/// Confidences are clamped into `[CONFIDENCE_FLOOR, 1 - CONFIDENCE_FLOOR]` so
/// the observation cost `-log(c/(1-c))` stays finite.
pub const CONFIDENCE_FLOOR: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("duplicate tracklet id {0}")]
    DuplicateId(u64),
    #[error("camera {0} not listed in topology")]
    UnknownCamera(CameraId),
    #[error("adjacency matrix must be {expected}x{expected}, got {rows} rows")]
    AdjacencyShape { expected: usize, rows: usize },
    #[error("adjacent cameras {0} -> {1} have no portal record")]
    MissingPortal(CameraId, CameraId),
    #[error("portal {0} -> {1}: polygon needs at least 3 vertices")]
    DegeneratePolygon(CameraId, CameraId),
    #[error("portal {0} -> {1}: disappearing point lies outside its area polygon")]
    PointOutsideArea(CameraId, CameraId),
    #[error("portal references camera pair {0} -> {1} that is not adjacent")]
    PortalNotAdjacent(CameraId, CameraId),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BoundingBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Self { x, y, w, h }
    }

    pub fn area(&self) -> f64 {
        self.w.max(0.0) * self.h.max(0.0)
    }

    pub fn iou(&self, other: &BoundingBox) -> f64 {
        let ix = (self.x + self.w).min(other.x + other.w) - self.x.max(other.x);
        let iy = (self.y + self.h).min(other.y + other.h) - self.y.max(other.y);
        if ix <= 0.0 || iy <= 0.0 {
            return 0.0;
        }
        let inter = ix * iy;
        let union = self.area() + other.area() - inter;
        if union <= 0.0 {
            0.0
        } else {
            inter / union
        }
    }

    /// Bottom-center of the box, used as the reference ground point.
    pub fn bottom_center(&self) -> [f64; 2] {
        [self.x + self.w / 2.0, self.y + self.h]
    }
}

/// Per-frame kinematic state of a tracklet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackState {
    pub position: [f64; 2],
    pub velocity: [f64; 2],
    pub bbox: BoundingBox,
}

/// One weighted color of a major-color descriptor. Colors live in RGB
/// `[0,255]^3`; centroids may be fractional after averaging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColorEntry {
    pub color: [f64; 3],
    pub weight: f64,
}

/// Major-color spectrum descriptor: at most `appearance::MAX_COLORS` entries,
/// sorted by descending weight, weights summing to 1.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MajorColorDescriptor {
    pub entries: Vec<ColorEntry>,
}

impl MajorColorDescriptor {
    pub fn new(entries: Vec<ColorEntry>) -> Self {
        let mut d = Self { entries };
        d.normalize();
        d
    }

    /// Sort by descending weight and rescale weights to sum 1.
    pub fn normalize(&mut self) {
        self.entries.retain(|e| e.weight > 0.0);
        self.entries
            .sort_by(|a, b| b.weight.partial_cmp(&a.weight).unwrap());
        let total: f64 = self.entries.iter().map(|e| e.weight).sum();
        // skip the division when already normalized, so re-normalizing is a
        // fixed point instead of drifting by an ulp per pass
        if total > 0.0 && (total - 1.0).abs() > 1e-12 {
            for e in &mut self.entries {
                e.weight /= total;
            }
        }
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// One observed fragment from a single-camera tracker.
#[derive(Debug, Clone, PartialEq)]
pub struct Tracklet {
    pub id: u64,
    pub camera: CameraId,
    pub start_frame: i64,
    pub end_frame: i64,
    /// One state per frame, `start_frame..=end_frame`.
    pub states: Vec<TrackState>,
    /// Averaged tracker confidence, in (0,1) after validation.
    pub confidence: f64,
    /// One major-color descriptor per frame.
    pub frames_appearance: Vec<MajorColorDescriptor>,
}

impl Tracklet {
    /// Number of frames covered.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn head(&self) -> &TrackState {
        &self.states[0]
    }

    pub fn tail(&self) -> &TrackState {
        self.states.last().expect("tracklet has at least one state")
    }
}

/// Central-difference velocity estimate over a 5-frame window; one-sided at
/// the boundaries.
pub fn estimate_velocities(positions: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let n = positions.len();
    if n < 2 {
        return vec![[0.0, 0.0]; n];
    }
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(2);
            let hi = (i + 2).min(n - 1);
            let dt = (hi - lo) as f64;
            [
                (positions[hi][0] - positions[lo][0]) / dt,
                (positions[hi][1] - positions[lo][1]) / dt,
            ]
        })
        .collect()
}

/// A tracklet record that failed validation, with the reason.
#[derive(Debug, Clone)]
pub struct Rejection {
    pub id: u64,
    pub reason: String,
}

#[derive(Debug, Default)]
pub struct ValidationReport {
    pub accepted: Vec<Tracklet>,
    pub rejected: Vec<Rejection>,
}

/// Validate a batch of tracklets. Duplicate ids are a hard error; records with
/// inconsistent lengths are rejected individually; confidences are clamped
/// into `[CONFIDENCE_FLOOR, 1 - CONFIDENCE_FLOOR]`.
pub fn validate_tracklets(tracklets: Vec<Tracklet>) -> Result<ValidationReport, ModelError> {
    let mut seen = std::collections::HashSet::new();
    for t in &tracklets {
        if !seen.insert(t.id) {
            return Err(ModelError::DuplicateId(t.id));
        }
    }
    let mut report = ValidationReport::default();
    for mut t in tracklets {
        let span = t.end_frame - t.start_frame + 1;
        if span < 1 {
            report.rejected.push(Rejection {
                id: t.id,
                reason: format!("empty frame span {}..{}", t.start_frame, t.end_frame),
            });
            continue;
        }
        if t.states.len() as i64 != span {
            report.rejected.push(Rejection {
                id: t.id,
                reason: format!("{} states for a span of {} frames", t.states.len(), span),
            });
            continue;
        }
        if t.frames_appearance.len() != t.states.len() {
            report.rejected.push(Rejection {
                id: t.id,
                reason: format!(
                    "{} appearance frames for {} states",
                    t.frames_appearance.len(),
                    t.states.len()
                ),
            });
            continue;
        }
        t.confidence = t.confidence.clamp(CONFIDENCE_FLOOR, 1.0 - CONFIDENCE_FLOOR);
        report.accepted.push(t);
    }
    Ok(report)
}

/// Simple polygon in pixel coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    pub vertices: Vec<[f64; 2]>,
}

impl Polygon {
    pub fn new(vertices: Vec<[f64; 2]>) -> Self {
        Self { vertices }
    }

    /// Even-odd rule point-in-polygon test. Points on an edge count as inside.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let n = self.vertices.len();
        if n < 3 {
            return false;
        }
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let [xi, yi] = self.vertices[i];
            let [xj, yj] = self.vertices[j];
            // On-edge check first: cross product zero and within segment bounds.
            let cross = (xj - xi) * (p[1] - yi) - (yj - yi) * (p[0] - xi);
            if cross.abs() < 1e-9
                && p[0] >= xi.min(xj) - 1e-9
                && p[0] <= xi.max(xj) + 1e-9
                && p[1] >= yi.min(yj) - 1e-9
                && p[1] <= yi.max(yj) + 1e-9
            {
                return true;
            }
            if (yi > p[1]) != (yj > p[1]) {
                let x_cross = (xj - xi) * (p[1] - yi) / (yj - yi) + xi;
                if p[0] < x_cross {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }
}

/// Crossing geometry for one ordered camera pair `from -> to`.
#[derive(Debug, Clone, PartialEq)]
pub struct Portal {
    pub from: CameraId,
    pub to: CameraId,
    /// Exit area polygon, in `from`'s pixel coordinates.
    pub exit_area: Polygon,
    /// Enter area polygon, in `to`'s pixel coordinates.
    pub enter_area: Polygon,
    /// Disappearing point inside the exit area.
    pub exit_point: [f64; 2],
    /// Disappearing point inside the enter area.
    pub enter_point: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct CameraTopology {
    pub cameras: Vec<CameraId>,
    /// Row-major adjacency over `cameras` indices.
    pub adjacency: Vec<Vec<bool>>,
    pub portals: Vec<Portal>,
}

impl CameraTopology {
    /// Single-camera topology with no portals.
    pub fn single(camera: CameraId) -> Self {
        Self {
            cameras: vec![camera],
            adjacency: vec![vec![true]],
            portals: Vec::new(),
        }
    }

    fn index_of(&self, camera: CameraId) -> Option<usize> {
        self.cameras.iter().position(|&c| c == camera)
    }

    pub fn adjacent(&self, a: CameraId, b: CameraId) -> bool {
        if a == b {
            return true;
        }
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.adjacency[i][j],
            _ => false,
        }
    }

    pub fn portal(&self, from: CameraId, to: CameraId) -> Option<&Portal> {
        self.portals.iter().find(|p| p.from == from && p.to == to)
    }
}

/// Validate a topology: symmetrize the adjacency (logical OR), force the
/// diagonal true, and check portal geometry. Idempotent.
pub fn validate_topology(mut topo: CameraTopology) -> Result<CameraTopology, ModelError> {
    let n = topo.cameras.len();
    if topo.adjacency.len() != n || topo.adjacency.iter().any(|row| row.len() != n) {
        return Err(ModelError::AdjacencyShape {
            expected: n,
            rows: topo.adjacency.len(),
        });
    }
    for i in 0..n {
        topo.adjacency[i][i] = true;
        for j in (i + 1)..n {
            let or = topo.adjacency[i][j] || topo.adjacency[j][i];
            topo.adjacency[i][j] = or;
            topo.adjacency[j][i] = or;
        }
    }
    for p in &topo.portals {
        let fi = topo
            .index_of(p.from)
            .ok_or(ModelError::UnknownCamera(p.from))?;
        let ti = topo.index_of(p.to).ok_or(ModelError::UnknownCamera(p.to))?;
        if fi == ti || !topo.adjacency[fi][ti] {
            return Err(ModelError::PortalNotAdjacent(p.from, p.to));
        }
        if p.exit_area.vertices.len() < 3 || p.enter_area.vertices.len() < 3 {
            return Err(ModelError::DegeneratePolygon(p.from, p.to));
        }
        if !p.exit_area.contains(p.exit_point) || !p.enter_area.contains(p.enter_point) {
            return Err(ModelError::PointOutsideArea(p.from, p.to));
        }
    }
    // Every adjacent off-diagonal pair needs at least one portal, in each
    // direction it can be traversed.
    for i in 0..n {
        for j in 0..n {
            if i != j && topo.adjacency[i][j] {
                let (a, b) = (topo.cameras[i], topo.cameras[j]);
                if topo.portal(a, b).is_none() {
                    return Err(ModelError::MissingPortal(a, b));
                }
            }
        }
    }
    Ok(topo)
}

/// Output of the association: disjoint ordered lists of tracklet ids plus the
/// total flow cost.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectorySet {
    pub trajectories: Vec<Vec<u64>>,
    pub objective_cost: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn descriptor(r: f64, g: f64, b: f64) -> MajorColorDescriptor {
        MajorColorDescriptor::new(vec![ColorEntry {
            color: [r, g, b],
            weight: 1.0,
        }])
    }

    pub(crate) fn tracklet(id: u64, camera: CameraId, start: i64, len: usize, conf: f64) -> Tracklet {
        let states = (0..len)
            .map(|k| TrackState {
                position: [k as f64, 0.0],
                velocity: [1.0, 0.0],
                bbox: BoundingBox::new(k as f64 - 5.0, -20.0, 10.0, 20.0),
            })
            .collect();
        Tracklet {
            id,
            camera,
            start_frame: start,
            end_frame: start + len as i64 - 1,
            states,
            confidence: conf,
            frames_appearance: vec![descriptor(200.0, 30.0, 30.0); len],
        }
    }

    #[test]
    fn accepts_consistent_tracklet() {
        let report = validate_tracklets(vec![tracklet(1, 0, 0, 10, 0.5)]).unwrap();
        assert_eq!(report.accepted.len(), 1);
        assert_eq!(report.accepted[0].confidence, 0.5);
        assert!(report.rejected.is_empty());
    }

    #[test]
    fn clamps_boundary_confidence() {
        let report = validate_tracklets(vec![tracklet(1, 0, 0, 3, 1.0)]).unwrap();
        assert_eq!(report.accepted[0].confidence, 1.0 - CONFIDENCE_FLOOR);
        let report = validate_tracklets(vec![tracklet(2, 0, 0, 3, 0.0)]).unwrap();
        assert_eq!(report.accepted[0].confidence, CONFIDENCE_FLOOR);
    }

    #[test]
    fn duplicate_id_is_hard_error() {
        let err = validate_tracklets(vec![tracklet(7, 0, 0, 3, 0.5), tracklet(7, 1, 9, 3, 0.5)]);
        assert!(matches!(err, Err(ModelError::DuplicateId(7))));
    }

    #[test]
    fn rejects_length_mismatch() {
        let mut t = tracklet(3, 0, 0, 5, 0.5);
        t.end_frame += 1;
        let report = validate_tracklets(vec![t]).unwrap();
        assert!(report.accepted.is_empty());
        assert_eq!(report.rejected.len(), 1);
        assert_eq!(report.rejected[0].id, 3);
    }

    #[test]
    fn rejects_appearance_mismatch() {
        let mut t = tracklet(4, 0, 0, 5, 0.5);
        t.frames_appearance.pop();
        let report = validate_tracklets(vec![t]).unwrap();
        assert_eq!(report.rejected.len(), 1);
    }

    #[test]
    fn validation_enforces_type_invariants() {
        let report =
            validate_tracklets(vec![tracklet(1, 0, 0, 4, 2.0), tracklet(2, 1, 5, 1, -1.0)])
                .unwrap();
        for t in &report.accepted {
            assert_eq!(t.states.len(), (t.end_frame - t.start_frame + 1) as usize);
            assert_eq!(t.states.len(), t.frames_appearance.len());
            assert!(t.confidence > 0.0 && t.confidence < 1.0);
            assert!(!t.is_empty());
        }
    }

    fn square(x0: f64, y0: f64, x1: f64, y1: f64) -> Polygon {
        Polygon::new(vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
    }

    fn two_camera_topology() -> CameraTopology {
        let portal_ab = Portal {
            from: 0,
            to: 1,
            exit_area: square(80.0, 0.0, 100.0, 100.0),
            enter_area: square(0.0, 0.0, 20.0, 100.0),
            exit_point: [90.0, 50.0],
            enter_point: [10.0, 50.0],
        };
        let portal_ba = Portal {
            from: 1,
            to: 0,
            exit_area: square(0.0, 0.0, 20.0, 100.0),
            enter_area: square(80.0, 0.0, 100.0, 100.0),
            exit_point: [10.0, 50.0],
            enter_point: [90.0, 50.0],
        };
        CameraTopology {
            cameras: vec![0, 1],
            adjacency: vec![vec![false, true], vec![false, false]],
            portals: vec![portal_ab, portal_ba],
        }
    }

    #[test]
    fn single_camera_topology_accepted() {
        let topo = validate_topology(CameraTopology::single(3)).unwrap();
        assert!(topo.adjacent(3, 3));
    }

    #[test]
    fn symmetrizes_adjacency() {
        let topo = validate_topology(two_camera_topology()).unwrap();
        assert!(topo.adjacent(0, 1));
        assert!(topo.adjacent(1, 0));
        assert!(topo.adjacent(0, 0));
    }

    #[test]
    fn validation_is_idempotent() {
        let once = validate_topology(two_camera_topology()).unwrap();
        let twice = validate_topology(once.clone()).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn rejects_point_outside_polygon() {
        let mut topo = two_camera_topology();
        topo.portals[0].exit_point = [0.0, 0.0];
        assert!(matches!(
            validate_topology(topo),
            Err(ModelError::PointOutsideArea(0, 1))
        ));
    }

    #[test]
    fn rejects_missing_portal() {
        let mut topo = two_camera_topology();
        topo.portals.clear();
        assert!(matches!(
            validate_topology(topo),
            Err(ModelError::MissingPortal(_, _))
        ));
    }

    #[test]
    fn rejects_degenerate_polygon() {
        let mut topo = two_camera_topology();
        topo.portals[0].exit_area = Polygon::new(vec![[0.0, 0.0], [1.0, 1.0]]);
        assert!(matches!(
            validate_topology(topo),
            Err(ModelError::DegeneratePolygon(0, 1))
        ));
    }

    #[test]
    fn point_in_polygon_even_odd() {
        let poly = square(0.0, 0.0, 10.0, 10.0);
        assert!(poly.contains([5.0, 5.0]));
        assert!(!poly.contains([15.0, 5.0]));
        assert!(poly.contains([0.0, 5.0])); // on the boundary
    }

    #[test]
    fn velocity_estimation_linear_motion() {
        let positions: Vec<[f64; 2]> = (0..10).map(|k| [2.0 * k as f64, 3.0]).collect();
        let v = estimate_velocities(&positions);
        for vel in v {
            assert!((vel[0] - 2.0).abs() < 1e-12);
            assert!(vel[1].abs() < 1e-12);
        }
        assert_eq!(estimate_velocities(&[[1.0, 1.0]]), vec![[0.0, 0.0]]);
    }
}
