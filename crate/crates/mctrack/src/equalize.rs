//! Alignment of the same-camera appearance-similarity distribution to the
//! cross-camera one.
//!
//! Same-camera similarities are systematically higher than cross-camera ones,
//! which starves cross-camera links in the global solve. The compensation is
//! affine: shift by the mean gap and rescale by the spread ratio, both
//! estimated over edges whose MUG falls under a confidence threshold.

/// Default MUG threshold for edges admitted into the statistics.
pub const DEFAULT_EPSILON: f64 = 0.4;
/// Probability floor applied after the transform so `-log` stays finite.
pub const DEFAULT_P_MIN: f64 = 1e-6;

/// A candidate edge's appearance summary, input to the statistics.
#[derive(Debug, Clone, Copy)]
pub struct EdgeAppearance {
    pub same_camera: bool,
    pub dis: f64,
    pub mug: f64,
}

/// Moments of the MUG-filtered similarity distributions and the derived
/// compensation factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqualizationStats {
    pub mu1: f64,
    pub sigma1: f64,
    pub mu2: f64,
    pub sigma2: f64,
    pub delta_mu: f64,
    pub delta_sigma: f64,
    pub n1: usize,
    pub n2: usize,
}

impl Default for EqualizationStats {
    /// Identity transform: no shift, unit scale.
    fn default() -> Self {
        Self {
            mu1: 0.0,
            sigma1: 0.0,
            mu2: 0.0,
            sigma2: 0.0,
            delta_mu: 0.0,
            delta_sigma: 1.0,
            n1: 0,
            n2: 0,
        }
    }
}

impl EqualizationStats {
    /// The raw affine compensation for a same-camera similarity, before any
    /// clamping.
    pub fn transform(&self, dis: f64) -> f64 {
        self.delta_sigma * (dis - self.delta_mu)
    }
}

fn moments(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Population mean and standard deviation of the MUG-passing similarities,
/// split by same/cross camera. Degenerate samples fall back to the identity
/// transform: fewer than two values on either side (or zero same-camera
/// spread) pins the scale at 1, an empty side pins the shift at 0.
pub fn collect_stats(edges: &[EdgeAppearance], epsilon: f64) -> EqualizationStats {
    let same: Vec<f64> = edges
        .iter()
        .filter(|e| e.same_camera && e.mug < epsilon)
        .map(|e| e.dis)
        .collect();
    let cross: Vec<f64> = edges
        .iter()
        .filter(|e| !e.same_camera && e.mug < epsilon)
        .map(|e| e.dis)
        .collect();
    let (mu1, sigma1) = moments(&same);
    let (mu2, sigma2) = moments(&cross);
    let delta_mu = if same.is_empty() || cross.is_empty() {
        0.0
    } else {
        (mu1 - mu2).max(0.0)
    };
    let delta_sigma = if same.len() < 2 || cross.len() < 2 || sigma1 == 0.0 {
        1.0
    } else {
        sigma2 / sigma1
    };
    EqualizationStats {
        mu1,
        sigma1,
        mu2,
        sigma2,
        delta_mu,
        delta_sigma,
        n1: same.len(),
        n2: cross.len(),
    }
}

/// Equalized appearance probability for one edge. Cross-camera values pass
/// through bit-identically; same-camera values get the affine compensation
/// and are clamped into `[p_min, 1]`.
pub fn equalized_appearance(
    dis: f64,
    same_camera: bool,
    stats: &EqualizationStats,
    p_min: f64,
) -> f64 {
    if same_camera {
        stats.transform(dis).clamp(p_min, 1.0)
    } else {
        dis
    }
}
