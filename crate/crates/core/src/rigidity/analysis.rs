use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::ExtendedSystem;
use crate::error::{Error, Result};

/// Kernel threshold relative to the largest singular value.
pub const KERNEL_REL_TOL: f64 = 1e-8;
/// Length of the trial step used as flex evidence.
pub const FLEX_PROBE_STEP: f64 = 1e-2;
/// Residual the corrected trial point must reach.
pub const FLEX_PROBE_TOL: f64 = 1e-6;
/// Corrector stopping tolerance (max-norm of the residual vector).
pub const CORRECTOR_TOL: f64 = 1e-10;
/// Largest residual of an accepted trace point.
pub const ACCEPT_TOL: f64 = 1e-9;
const MAX_HALVINGS: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictStatus {
    FirstOrderRigid,
    FlexDirectionFound,
    Inconclusive,
}

impl VerdictStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            VerdictStatus::FirstOrderRigid => "first-order-rigid",
            VerdictStatus::FlexDirectionFound => "flex-direction-found",
            VerdictStatus::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityVerdict {
    pub jacobian_rank: usize,
    pub kernel_dimension: usize,
    pub status: VerdictStatus,
    /// Orthonormal kernel basis of the Jacobian at the base.
    pub kernel: Vec<Vec<f64>>,
    pub singular_values: Vec<f64>,
    /// Residual after correcting a trial step along the kernel, if one was tried.
    pub probe_residual: Option<f64>,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Singular values (descending) and an orthonormal basis of the numerical kernel.
pub(crate) fn kernel_of(j: &DMatrix<f64>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = j.ncols();
    // pad to a square matrix so that the SVD returns a full right basis
    let rows = j.nrows().max(n);
    let mut a = DMatrix::zeros(rows, n);
    a.view_mut((0, 0), (j.nrows(), n)).copy_from(j);
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv: Vec<f64> = idx.iter().map(|&i| svd.singular_values[i]).collect();
    let smax = sv.first().copied().unwrap_or(0.0);
    let kernel = idx
        .iter()
        .filter(|&&i| svd.singular_values[i] <= KERNEL_REL_TOL * smax)
        .map(|&i| vt.row(i).iter().copied().collect())
        .collect();
    let rank = j.nrows().min(n);
    (sv.into_iter().take(rank).collect(), kernel)
}

fn pinv_step(j: &DMatrix<f64>, r: &[f64]) -> Option<DVector<f64>> {
    let svd = j.clone().svd(true, true);
    let smax = svd.singular_values.max();
    svd.solve(&DVector::from_column_slice(r), 1e-13 * smax.max(f64::MIN_POSITIVE)).ok()
}

/// Gauss-Newton with the pseudo-inverse; returns the final point and residual.
fn correct(es: &ExtendedSystem, mut x: Vec<f64>, extra: Option<(&[f64], &[f64], f64)>, tol: f64) -> Result<(Vec<f64>, f64)> {
    let eval = |x: &[f64]| -> Result<(Vec<f64>, DMatrix<f64>)> {
        let mut r = es.residuals(x)?;
        let mut j = es.jacobian(x)?;
        if let Some((v, x0, h)) = extra {
            let s: f64 = v.iter().zip(x.iter().zip(x0)).map(|(a, (b, c))| a * (b - c)).sum();
            r.push(s - h);
            let rows = j.nrows();
            j = j.insert_row(rows, 0.0);
            let last = j.nrows() - 1;
            for (k, a) in v.iter().enumerate() {
                j[(last, k)] = *a;
            }
        }
        Ok((r, j))
    };
    let (mut r, mut j) = eval(&x)?;
    let mut res = max_abs(&r);
    for _ in 0..50 {
        if res <= tol {
            break;
        }
        let Some(step) = pinv_step(&j, &r) else { break };
        let cand: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a - s).collect();
        let (cr, cj) = eval(&cand)?;
        let cres = max_abs(&cr);
        if !cres.is_finite() || cres >= res {
            break;
        }
        x = cand;
        r = cr;
        j = cj;
        res = cres;
    }
    Ok((x, res))
}

/// First-order rigidity test at the base configuration.
///
/// A kernel vector counts as flex evidence when a step of length `1e-2` along
/// it, followed by Gauss-Newton with the step length held fixed, lands on the
/// solution set within `1e-6`.
pub fn rigidity_test(es: &ExtendedSystem) -> Result<RigidityVerdict> {
    let x0 = es.base();
    let j = es.jacobian(&x0)?;
    let (singular_values, kernel) = kernel_of(&j);
    let n = es.variable_count();
    let kernel_dimension = kernel.len();
    let jacobian_rank = n - kernel_dimension;
    if kernel_dimension == 0 {
        return Ok(RigidityVerdict {
            jacobian_rank,
            kernel_dimension,
            status: VerdictStatus::FirstOrderRigid,
            kernel,
            singular_values,
            probe_residual: None,
        });
    }
    let mut best = f64::INFINITY;
    for v in &kernel {
        let pred: Vec<f64> = x0.iter().zip(v).map(|(a, b)| a + FLEX_PROBE_STEP * b).collect();
        let (_, res) = correct(es, pred, Some((v, &x0, FLEX_PROBE_STEP)), CORRECTOR_TOL)?;
        best = best.min(res);
        if res <= FLEX_PROBE_TOL {
            break;
        }
    }
    let status = if best <= FLEX_PROBE_TOL { VerdictStatus::FlexDirectionFound } else { VerdictStatus::Inconclusive };
    Ok(RigidityVerdict { jacobian_rank, kernel_dimension, status, kernel, singular_values, probe_residual: Some(best) })
}

/// A traced flex path; the base configuration is not repeated in it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlexTrace {
    pub configurations: Vec<Vec<f64>>,
    /// Max-norm residual of each accepted configuration.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// Set when the corrector failed before `max_steps`.
    pub diverged: bool,
}

/// Unit tangent of the solution curve at `x`, oriented along `prev`.
fn tangent(es: &ExtendedSystem, x: &[f64], prev: &[f64]) -> Result<Option<Vec<f64>>> {
    let (_, kernel) = kernel_of(&es.jacobian(x)?);
    if kernel.is_empty() {
        return Ok(None);
    }
    let mut t = vec![0.0; x.len()];
    for v in &kernel {
        let c: f64 = v.iter().zip(prev).map(|(a, b)| a * b).sum();
        for (ti, vi) in t.iter_mut().zip(v) {
            *ti += c * vi;
        }
    }
    let norm = t.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return Ok(None);
    }
    Ok(Some(t.into_iter().map(|a| a / norm).collect()))
}

/// Predictor-corrector continuation along a flex, starting at the base.
///
/// `direction` only orients the first step; its projection onto the kernel must
/// be nonzero. The corrector holds the advance along the tangent fixed
/// (pseudo-arclength). Steps have length `step`, halved up to 20 times when
/// the corrector fails.
pub fn trace_flex(es: &ExtendedSystem, direction: &[f64], step: f64, max_steps: usize) -> Result<FlexTrace> {
    if direction.len() != es.variable_count() {
        return Err(Error::DimensionMismatch { expected: es.variable_count(), found: direction.len() });
    }
    if !(step > 0.0) {
        return Err(Error::Precondition("step must be positive".into()));
    }
    let verdict = rigidity_test(es)?;
    if verdict.status != VerdictStatus::FlexDirectionFound {
        return Err(Error::Precondition(format!("no flex direction at the base ({})", verdict.status.as_str())));
    }
    let mut x = es.base();
    let Some(mut t) = tangent(es, &x, direction)? else {
        return Err(Error::Precondition("direction is orthogonal to the Jacobian kernel".into()));
    };
    let mut out = FlexTrace { configurations: Vec::new(), residuals: Vec::new(), max_residual: 0.0, diverged: false };
    'outer: for _ in 0..max_steps {
        let mut h = step;
        for _ in 0..=MAX_HALVINGS {
            let pred: Vec<f64> = x.iter().zip(&t).map(|(a, b)| a + h * b).collect();
            let (cand, res) = correct(es, pred, Some((&t, &x, h)), CORRECTOR_TOL)?;
            let jump = max_abs(&cand.iter().zip(&x).map(|(a, b)| a - b).collect::<Vec<_>>());
            if res <= ACCEPT_TOL && jump <= 2.0 * step {
                match tangent(es, &cand, &t)? {
                    Some(nt) => t = nt,
                    None => {
                        out.diverged = true;
                        break 'outer;
                    }
                }
                x = cand;
                out.max_residual = out.max_residual.max(res);
                out.residuals.push(res);
                out.configurations.push(x.clone());
                continue 'outer;
            }
            h *= 0.5;
        }
        out.diverged = true;
        break;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rigidity::{build_extended, square, square_flex, Gauge};

    #[test]
    fn square_kernel_is_the_flex_tangent() {
        let es = build_extended(&square(), Gauge::Plane).unwrap();
        let v = rigidity_test(&es).unwrap();
        assert_eq!(v.status, VerdictStatus::FlexDirectionFound);
        assert_eq!(v.kernel_dimension, 1);
        assert_eq!(v.jacobian_rank, 7);
        let want = [-0.5, 0.0, 0.0, 0.5, 0.5, 0.0, 0.0, -0.5];
        let k = &v.kernel[0];
        let sign = if k[0] < 0.0 { 1.0 } else { -1.0 };
        for (a, b) in k.iter().zip(want) {
            assert!((sign * a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn square_trace_follows_closed_form() {
        let es = build_extended(&square(), Gauge::Plane).unwrap();
        let dir = [-1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, -1.0];
        let tr = trace_flex(&es, &dir, 0.01, 50).unwrap();
        assert_eq!(tr.configurations.len(), 50);
        assert!(!tr.diverged);
        assert!(tr.max_residual <= 1e-9);
        for c in &tr.configurations {
            let t = 1.0 - c[0];
            let want = square_flex(t);
            assert!(max_abs(&c.iter().zip(&want).map(|(a, b)| a - b).collect::<Vec<_>>()) < 1e-6);
        }
        let back = trace_flex(&es, &dir.map(|v| -v), 0.01, 20).unwrap();
        assert!(back.max_residual <= 1e-9);
        assert!(back.configurations.last().unwrap()[0] > 1.0);
    }
}
