//! Multi-camera tracklet association.
//!
//! Takes single-camera tracklets from non-overlapping camera views and links
//! them into global trajectories with one min-cost-flow optimization. Appearance
//! is compared through piecewise major-color descriptors, motion through
//! relative distances (portal disappearing points across cameras), and the
//! same-camera similarity distribution is equalized against the cross-camera
//! one before the solve. An MCTA evaluation harness scores the result against
//! ground truth.

pub mod appearance;
pub mod equalize;
pub mod evaluate;
pub mod flowgraph;
pub mod io;
pub mod model;
pub mod motion;
pub mod pipeline;
pub mod synth;

pub use model::{
    BoundingBox, CameraTopology, MajorColorDescriptor, Portal, Tracklet, TrajectorySet,
};
