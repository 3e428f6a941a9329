//! Straight lines through the `(g_r, g_cr)` plane.

use serde::{Deserialize, Serialize};

/// The line `origin + t * direction`. With `direction.0 = 1` the parameter
/// `t` is the rotating coupling `g_r`, which is how the scans report `g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub origin: (f64, f64),
    pub direction: (f64, f64),
}

impl Line {
    pub fn new(origin: (f64, f64), direction: (f64, f64)) -> Self {
        Self { origin, direction }
    }

    /// `g_cr = slope * g_r + intercept`, parametrized by `g_r`.
    pub fn affine(slope: f64, intercept: f64) -> Self {
        Self::new((0.0, intercept), (1.0, slope))
    }

    /// The ray `g_cr = epsilon * g_r`.
    pub fn ray(epsilon: f64) -> Self {
        Self::affine(epsilon, 0.0)
    }

    /// `g_cr = 0.05 (g_r - 0.5) + 0.5`, the reference cut through all three phases.
    pub fn reference_cut() -> Self {
        Self::affine(0.05, 0.475)
    }

    pub fn point(&self, t: f64) -> (f64, f64) {
        (
            self.origin.0 + t * self.direction.0,
            self.origin.1 + t * self.direction.1,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_cut_passes_through_half() {
        let (gr, gcr) = Line::reference_cut().point(0.5);
        assert_eq!(gr, 0.5);
        assert!((gcr - 0.5).abs() < 1e-15);
    }
}
