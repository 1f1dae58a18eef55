//! Motion similarity between tracklet pairs.
//!
//! Same-camera pairs are scored by linear extrapolation across the time gap;
//! cross-camera pairs by the minimum distance of the extrapolated path to the
//! portal's disappearing points, with endpoints inside the enter/exit areas
//! scoring a zero distance outright.

use crate::model::{CameraTopology, Portal, Tracklet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MotionError {
    #[error("no portal from camera {0} to camera {1}")]
    MissingPortal(u32, u32),
}

#[derive(Debug, Clone, Copy)]
pub struct MotionParams {
    /// Exponential decay rate per pixel of relative distance.
    pub lambda: f64,
    /// Cap on the cross-camera extrapolation sweep, in frames.
    pub sweep_cap: i64,
}

impl Default for MotionParams {
    fn default() -> Self {
        Self {
            lambda: 0.01,
            // 10x the default waiting-time threshold; edges longer than the
            // threshold never reach this path.
            sweep_cap: 15_000,
        }
    }
}

/// Signed frame gap between the end of `li` and the start of `lj`. Must be
/// positive for the pair to be linkable.
pub fn interval_time(li: &Tracklet, lj: &Tracklet) -> i64 {
    lj.start_frame - li.end_frame
}

fn norm2(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}

/// Relative distances for a same-camera pair: each tracklet's endpoint is
/// extrapolated over the gap and compared against the other's endpoint.
pub fn relative_distance_same_camera(li: &Tracklet, lj: &Tracklet) -> (f64, f64) {
    let t_inv = interval_time(li, lj) as f64;
    let tail = li.tail();
    let head = lj.head();
    let fwd = [
        tail.position[0] + tail.velocity[0] * t_inv,
        tail.position[1] + tail.velocity[1] * t_inv,
    ];
    let bwd = [
        head.position[0] - head.velocity[0] * t_inv,
        head.position[1] - head.velocity[1] * t_inv,
    ];
    (norm2(fwd, head.position), norm2(bwd, tail.position))
}

/// Same-camera motion similarity `exp(-lambda/2 * (dx_i + dx_j))`.
pub fn motion_similarity_same(dx_i: f64, dx_j: f64, params: &MotionParams) -> f64 {
    (-params.lambda / 2.0 * (dx_i + dx_j)).exp()
}

/// Minimum relative distances for a cross-camera pair through `portal`.
/// An endpoint already inside its area contributes zero; otherwise the
/// extrapolated position is swept over integer frames `1..=t_inv` (capped)
/// and the closest approach to the disappearing point is taken.
pub fn min_relative_distance_cross(
    li: &Tracklet,
    lj: &Tracklet,
    portal: &Portal,
    sweep_cap: i64,
) -> (f64, f64) {
    let t_inv = interval_time(li, lj).min(sweep_cap).max(1);
    let tail = li.tail();
    let head = lj.head();

    let dx_i = if portal.exit_area.contains(tail.position) {
        0.0
    } else {
        (1..=t_inv)
            .map(|t| {
                let t = t as f64;
                norm2(
                    [
                        tail.position[0] + tail.velocity[0] * t,
                        tail.position[1] + tail.velocity[1] * t,
                    ],
                    portal.exit_point,
                )
            })
            .fold(f64::INFINITY, f64::min)
    };
    let dx_j = if portal.enter_area.contains(head.position) {
        0.0
    } else {
        (1..=t_inv)
            .map(|t| {
                let t = t as f64;
                norm2(
                    [
                        head.position[0] - head.velocity[0] * t,
                        head.position[1] - head.velocity[1] * t,
                    ],
                    portal.enter_point,
                )
            })
            .fold(f64::INFINITY, f64::min)
    };
    (dx_i, dx_j)
}

/// Motion similarity for a candidate pair, dispatching on whether the two
/// tracklets share a camera.
pub fn motion_similarity(
    li: &Tracklet,
    lj: &Tracklet,
    topology: &CameraTopology,
    params: &MotionParams,
) -> Result<f64, MotionError> {
    if li.camera == lj.camera {
        let (dx_i, dx_j) = relative_distance_same_camera(li, lj);
        Ok(motion_similarity_same(dx_i, dx_j, params))
    } else {
        let portal = topology
            .portal(li.camera, lj.camera)
            .ok_or(MotionError::MissingPortal(li.camera, lj.camera))?;
        let (dx_i, dx_j) = min_relative_distance_cross(li, lj, portal, params.sweep_cap);
        Ok(motion_similarity_same(dx_i, dx_j, params))
    }
}
