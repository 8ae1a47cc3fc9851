//! Reduction and fixation: find the rotations that carry a point system onto
//! the zero set of its fixing functions, and enumerate all of them on the orbit.

mod circle;
mod factor;
mod plane;
mod space;

pub use circle::{circle_real_zeros, circle_real_zeros_with, imag_on_circle};
pub use factor::{factor_homogeneous, line_product, LineFactor};
pub use plane::{
    fourier_leading, plane_fix_enumerate, plane_fix_enumerate_with, plane_h_orbit_poly, plane_h_zeros,
    plane_reduce, plane_transversality, polygon_h, polygon_imh_zeros, regular_polygon,
};
pub use space::{
    fixing_residuals, space_fix_enumerate, space_fix_enumerate_with, space_reduce, space_reduce_with,
    LineDiagnostics, RotationEntry, ZeroReport,
};

use serde::{Deserialize, Serialize};

/// Tolerances shared by the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Roots of the circle polynomial with `||z| - 1|` above this are discarded.
    pub circle_tol: f64,
    /// Angles closer than this are merged.
    pub angle_dedup: f64,
    /// Bound on `|Im g(e^{i theta})|` (relative to the coefficient scale) for an accepted circle zero.
    pub circle_residual: f64,
    /// Bound on fixing residuals relative to their magnitude scale.
    pub residual_tol: f64,
    /// Max-norm tolerance for identifying configurations, relative to the system radius.
    pub dedup_tol: f64,
    /// Below this (relative) a restriction of `H` to a line counts as identically zero.
    pub line_zero_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            circle_tol: 1e-8,
            angle_dedup: 1e-9,
            circle_residual: 1e-9,
            residual_tol: 1e-8,
            dedup_tol: 1e-8,
            line_zero_tol: 1e-12,
        }
    }
}

impl SolverOptions {
    /// Every tolerance halved.
    pub fn halved(&self) -> Self {
        SolverOptions {
            circle_tol: self.circle_tol / 2.0,
            angle_dedup: self.angle_dedup / 2.0,
            circle_residual: self.circle_residual / 2.0,
            residual_tol: self.residual_tol / 2.0,
            dedup_tol: self.dedup_tol / 2.0,
            line_zero_tol: self.line_zero_tol / 2.0,
        }
    }
}

/// Sorts angles in `[0, 2pi)` and merges those within `tol` (also across `2pi`).
pub(crate) fn dedup_angles(mut angles: Vec<f64>, tol: f64) -> Vec<f64> {
    use std::f64::consts::TAU;
    angles.iter_mut().for_each(|a| *a = crate::geometry::canonical_angle(*a));
    angles.sort_by(|a, b| a.total_cmp(b));
    let mut out: Vec<f64> = Vec::with_capacity(angles.len());
    for a in angles {
        if out.last().is_none_or(|&l| a - l > tol) {
            out.push(a);
        }
    }
    if out.len() > 1 && out[0] + TAU - out[out.len() - 1] <= tol {
        out.pop();
    }
    out
}
