//! Dense univariate complex polynomials and an all-roots solver.
//!
//! Roots come from Aberth-Ehrlich simultaneous iteration; when that fails to
//! reach the backward-error target the companion matrix eigenvalues are used
//! instead. Nearly coincident roots are grouped into clusters by overlapping
//! Newton inclusion disks and reported with a multiplicity.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative threshold below which a leading coefficient is dropped.
pub const TRIM_REL_TOL: f64 = 1e-14;

/// Backward-error target for declared convergence.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-13;

/// A univariate complex polynomial, coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly1 {
    coeffs: Vec<Complex64>,
}

impl Poly1 {
    /// Trims negligible leading coefficients; fails on the zero polynomial.
    pub fn new(mut coeffs: Vec<Complex64>) -> Result<Self> {
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::ZeroPolynomial);
        }
        while coeffs.last().is_some_and(|c| c.norm() <= TRIM_REL_TOL * scale) {
            coeffs.pop();
        }
        Ok(Poly1 { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        horner(&self.coeffs, z)
    }

    pub fn derivative(&self) -> Vec<Complex64> {
        derivative(&self.coeffs)
    }
}

pub(crate) fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(ZERO, |acc, &a| acc * z + a)
}

fn horner_abs(c: &[Complex64], r: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * r + a.norm())
}

pub(crate) fn derivative(c: &[Complex64]) -> Vec<Complex64> {
    c.iter().enumerate().skip(1).map(|(k, &a)| a * k as f64).collect()
}

fn eval_with_derivative(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

fn backward_error_ok(c: &[Complex64], z: Complex64, tol: f64) -> bool {
    let r = z.norm();
    let p = horner(c, z).norm();
    p <= tol * horner_abs(c, r).max(f64::MIN_POSITIVE)
}

/// All roots of `p` with multiplicity (length `deg p`).
pub fn all_roots(p: &Poly1) -> Result<Vec<Complex64>> {
    let c = p.coeffs();
    let zeros_at_origin = c.iter().take_while(|a| **a == ZERO).count();
    let rest = &c[zeros_at_origin..];
    let mut roots = vec![ZERO; zeros_at_origin];
    if rest.len() <= 1 {
        return Ok(roots);
    }
    let found = match aberth(rest, 500) {
        Some(r) => r,
        None => companion_roots(rest)?,
    };
    roots.extend(found.into_iter().map(|z| newton_polish(rest, z)));
    Ok(roots)
}

fn initial_guesses(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let lead = c[n].norm();
    // radius from the largest root-magnitude bound of each term against the leading one
    let mut radius: f64 = 0.0;
    for (k, a) in c.iter().enumerate().take(n) {
        if a.norm() > 0.0 {
            radius = radius.max((a.norm() / lead).powf(1.0 / (n - k) as f64));
        }
    }
    let radius = if radius > 0.0 { radius } else { 1.0 };
    (0..n)
        .map(|k| Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / n as f64 + 0.4))
        .collect()
}

fn aberth(c: &[Complex64], max_iter: usize) -> Option<Vec<Complex64>> {
    let n = c.len() - 1;
    if n == 1 {
        return Some(vec![-c[0] / c[1]]);
    }
    let mut z = initial_guesses(c);
    let mut done = vec![false; n];
    for _ in 0..max_iter {
        let mut moved = false;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (p, dp) = eval_with_derivative(c, z[i]);
            if p == ZERO {
                done[i] = true;
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| ONE / (z[i] - z[j])).sum();
            let w = ratio / (ONE - ratio * s);
            if !(w.re.is_finite() && w.im.is_finite()) {
                continue;
            }
            z[i] -= w;
            if w.norm() <= 4.0 * f64::EPSILON * z[i].norm() || backward_error_ok(c, z[i], 0.1 * ROOT_RESIDUAL_TOL) {
                done[i] = true;
            } else {
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    let ok = z.iter().all(|&r| r.re.is_finite() && r.im.is_finite() && backward_error_ok(c, r, ROOT_RESIDUAL_TOL));
    ok.then_some(z)
}

fn companion_roots(c: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = c.len() - 1;
    let lead = c[n];
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = ONE;
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / lead;
    }
    let eig = m
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::SolverFailure("companion eigenvalues did not converge".into()))?;
    Ok(eig.iter().copied().collect())
}

fn newton_polish(c: &[Complex64], mut z: Complex64) -> Complex64 {
    let mut best = horner(c, z).norm();
    for _ in 0..3 {
        let (p, dp) = eval_with_derivative(c, z);
        if dp == ZERO {
            break;
        }
        let cand = z - p / dp;
        let v = horner(c, cand).norm();
        if v < best {
            best = v;
            z = cand;
        } else {
            break;
        }
    }
    z
}

/// A group of numerically coincident roots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootCluster {
    pub value: Complex64,
    pub multiplicity: usize,
}

/// Roots grouped into clusters; multiplicities sum to the degree.
pub fn clustered_roots(p: &Poly1) -> Result<Vec<RootCluster>> {
    let roots = all_roots(p)?;
    Ok(cluster(p.coeffs(), &roots))
}

fn cluster(c: &[Complex64], roots: &[Complex64]) -> Vec<RootCluster> {
    let n = roots.len();
    let deg = (c.len() - 1) as f64;
    let dc = derivative(c);
    let radius: Vec<f64> = roots
        .iter()
        .map(|&z| {
            let p = horner(c, z);
            let dp = horner(&dc, z);
            let floor = 16.0 * f64::EPSILON * z.norm().max(1.0);
            if p == ZERO {
                floor
            } else if dp == ZERO {
                f64::INFINITY
            } else {
                (deg * (p / dp).norm()).max(floor)
            }
        })
        .collect();

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (roots[i] - roots[j]).norm() <= radius[i] + radius[j] {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b] = a;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }

    groups
        .into_iter()
        .map(|g| {
            let m = g.len();
            let mean = g.iter().map(|&i| roots[i]).sum::<Complex64>() / m as f64;
            let value = if m == 1 { mean } else { refine_multiple(c, mean, m) };
            RootCluster { value, multiplicity: m }
        })
        .collect()
}

/// Newton on the `(m-1)`-th derivative, which has a simple root at an `m`-fold root.
fn refine_multiple(c: &[Complex64], start: Complex64, m: usize) -> Complex64 {
    let mut d = c.to_vec();
    for _ in 0..(m - 1) {
        d = derivative(&d);
    }
    let spread = |z: Complex64| horner(c, z).norm();
    let mut z = start;
    for _ in 0..8 {
        let (p, dp) = eval_with_derivative(&d, z);
        if dp == ZERO || p == ZERO {
            break;
        }
        let cand = z - p / dp;
        if (cand - start).norm() > 1e-2 * start.norm().max(1.0) {
            break;
        }
        z = cand;
    }
    if spread(z) <= spread(start) {
        z
    } else {
        start
    }
}
