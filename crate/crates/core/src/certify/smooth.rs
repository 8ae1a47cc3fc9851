//! Smoothness of a plane curve `F(w1, w2, w3) = 0`.
//!
//! A point is singular iff all three partials vanish there (Euler's identity
//! gives `F = 0` for free). Exact route: the Macaulay matrix of the partials is
//! a multiple of their resultant, so a nonzero integer determinant proves there
//! is no common projective zero. Fallback: seeded multi-start Gauss-Newton.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Float, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Certificate, Evidence, Parameters, Property, Status};
use crate::error::{Error, Result};
use crate::poly::SparsePoly;

const DEFAULT_SEED: u64 = 0x5eed;
const DEFAULT_STARTS: usize = 64;

/// Default seed and 64 starts for the heuristic part.
pub fn check_plane_smooth(f: &SparsePoly) -> Result<Certificate> {
    check_plane_smooth_with(f, DEFAULT_SEED, DEFAULT_STARTS)
}

pub fn check_plane_smooth_with(f: &SparsePoly, seed: u64, starts: usize) -> Result<Certificate> {
    if f.nvars() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: f.nvars() });
    }
    let d = f
        .homogeneous_degree()
        .ok_or_else(|| Error::InvalidPolynomial("plane smoothness needs a nonzero homogeneous polynomial".into()))?;
    if d == 0 {
        return Err(Error::InvalidPolynomial("constant polynomial defines no curve".into()));
    }
    let implies = if d >= 3 { vec![Property::NoLinesConics] } else { Vec::new() };
    let params = Parameters { seed: Some(seed), starts: Some(starts), ..Parameters::default() };

    if is_full_diagonal(f, d) {
        let mut c = Certificate::new(
            Property::PlaneSmooth,
            Status::Certified,
            Evidence::Note { reason: format!("diagonal form of degree {d}: partials vanish only at the origin") },
        );
        c.implies = implies;
        return Ok(c);
    }

    let search = gradient_search(f, seed, starts);
    if let Some(size_bits) = macaulay_nonzero(f, d) {
        let mut c = Certificate::new(
            Property::PlaneSmooth,
            Status::Certified,
            Evidence::Determinant { bits: size_bits.1, size: size_bits.0 },
        );
        c.parameters = params;
        c.implies = implies;
        c.note = match search {
            None => format!("gradient search from {starts} starts found no common zero"),
            Some((_, v)) => format!("gradient search stalled at residual {v:e} despite the nonzero determinant"),
        };
        return Ok(c);
    }

    let mut c = match search {
        Some((w, v)) => Certificate::new(Property::PlaneSmooth, Status::Refuted, Evidence::Witness { point: w, value: v }),
        None => {
            let mut c = Certificate::new(
                Property::PlaneSmooth,
                Status::HeuristicPass,
                Evidence::Note { reason: format!("no common zero of the partials from {starts} starts") },
            );
            c.implies = implies;
            c
        }
    };
    c.parameters = params;
    Ok(c)
}

fn is_full_diagonal(f: &SparsePoly, d: u32) -> bool {
    let mut seen = [false; 3];
    for (e, c) in f.terms() {
        let Some(j) = e.iter().position(|&x| x == d) else { return false };
        if c.norm() == 0.0 {
            return false;
        }
        seen[j] = true;
    }
    seen.iter().all(|&s| s)
}

/// Exact integer coefficients `F = 2^k * sum m_e w^e` for real `F`, as `(e, m_e)`.
fn integer_coefficients(f: &SparsePoly) -> Option<Vec<(Vec<u32>, BigInt)>> {
    if !f.has_real_coefficients() {
        return None;
    }
    let parts: Vec<(Vec<u32>, u64, i16, i8)> = f
        .terms()
        .map(|(e, c)| {
            let (m, ex, s) = c.re.integer_decode();
            (e.to_vec(), m, ex, s)
        })
        .collect();
    let emin = parts.iter().map(|p| p.2).min()?;
    Some(
        parts
            .into_iter()
            .map(|(e, m, ex, s)| {
                let v = BigInt::from(m) << (ex - emin) as usize;
                (e, if s < 0 { -v } else { v })
            })
            .collect(),
    )
}

fn monomials(deg: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for a in (0..=deg).rev() {
        for b in (0..=deg - a).rev() {
            out.push([a, b, deg - a - b]);
        }
    }
    out
}

type IntPoly = BTreeMap<[u32; 3], BigInt>;

/// Invertible integer changes of coordinates tried in turn. Smoothness is
/// invariant under them, while the extraneous factor of the Macaulay
/// determinant is not, so a sparse input whose determinant vanishes spuriously
/// usually gets a nonzero one after a substitution. Small entries keep the
/// matrices well conditioned.
const TRANSFORMS: [[[i64; 3]; 3]; 4] = [
    [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
    [[1, 1, 0], [0, 1, 1], [1, 0, 1]],
    [[1, -1, 0], [1, 1, 1], [0, 1, -1]],
    [[2, 1, 0], [0, 1, -1], [1, 0, 2]],
];

fn int_mul(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let mut out = IntPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
            *out.entry(e).or_insert_with(BigInt::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `F(M w)` with exact integer arithmetic.
fn substitute(f: &[(Vec<u32>, BigInt)], m: &[[i64; 3]; 3]) -> IntPoly {
    let forms: Vec<IntPoly> = m
        .iter()
        .map(|row| {
            (0..3)
                .filter(|&k| row[k] != 0)
                .map(|k| {
                    let mut e = [0; 3];
                    e[k] = 1;
                    (e, BigInt::from(row[k]))
                })
                .collect()
        })
        .collect();
    let mut out = IntPoly::new();
    for (e, c) in f {
        let mut t: IntPoly = [([0; 3], c.clone())].into_iter().collect();
        for (i, &k) in e.iter().enumerate() {
            for _ in 0..k {
                t = int_mul(&t, &forms[i]);
            }
        }
        for (k, v) in t {
            *out.entry(k).or_insert_with(BigInt::zero) += v;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `Some((size, bits))` when some Macaulay determinant of the gradient is nonzero.
fn macaulay_nonzero(f: &SparsePoly, d: u32) -> Option<(usize, u64)> {
    let coeffs = integer_coefficients(f)?;
    TRANSFORMS.iter().find_map(|m| macaulay_det(&substitute(&coeffs, m), d))
}

fn macaulay_det(f: &IntPoly, d: u32) -> Option<(usize, u64)> {
    let delta = d - 1;
    let partials: Vec<Vec<([u32; 3], BigInt)>> = (0..3)
        .map(|i| {
            f.iter()
                .filter(|(e, _)| e[i] > 0)
                .map(|(e, c)| {
                    let mut m = *e;
                    m[i] -= 1;
                    (m, c * BigInt::from(e[i]))
                })
                .collect()
        })
        .collect();
    if delta == 0 {
        // partials are constants: a common zero exists iff they all vanish
        return partials.iter().any(|p| !p.is_empty()).then_some((1, 1));
    }
    let basis = monomials(3 * delta - 2);
    let index: BTreeMap<[u32; 3], usize> = basis.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let n = basis.len();
    let mut mat = vec![vec![BigInt::zero(); n]; n];
    for (r, m) in basis.iter().enumerate() {
        let i = (0..3).find(|&i| m[i] >= delta).expect("degree exceeds 3(delta-1)");
        let mut shift = *m;
        shift[i] -= delta;
        for (pm, c) in &partials[i] {
            let col = index[&[pm[0] + shift[0], pm[1] + shift[1], pm[2] + shift[2]]];
            mat[r][col] += c;
        }
    }
    if !well_conditioned(&mat) {
        return None;
    }
    let det = bareiss_det(mat);
    (!det.is_zero()).then(|| (n, det.abs().bits()))
}

/// Smallest relative singular value a Macaulay matrix must have for its
/// determinant to count. Below it, rounding the input coefficients could have
/// moved a singular curve to a smooth one.
const MIN_RELATIVE_SINGULAR_VALUE: f64 = 1e-10;

fn well_conditioned(mat: &[Vec<BigInt>]) -> bool {
    let n = mat.len();
    let m = DMatrix::from_fn(n, n, |i, j| mat[i][j].to_f64().unwrap_or(f64::INFINITY));
    let top = m.amax();
    if !(top > 0.0 && top.is_finite()) {
        return false;
    }
    let sv = (m / top).singular_values();
    sv.min() >= MIN_RELATIVE_SINGULAR_VALUE * sv.max()
}

/// Fraction-free Gaussian elimination.
fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else { return BigInt::zero() };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Common zero of the partials on the unit sphere of `C^3`, if the search finds one.
fn gradient_search(f: &SparsePoly, seed: u64, starts: usize) -> Option<(Vec<Complex64>, f64)> {
    let grad = f.gradient();
    let hess: Vec<Vec<SparsePoly>> = grad.iter().map(|g| g.gradient()).collect();
    let scale = f.coefficient_l1() * f.homogeneous_degree().unwrap_or(1) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normalize = |w: &[Complex64]| {
        let r = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        w.iter().map(|z| z / r).collect::<Vec<_>>()
    };
    let resid = |w: &[Complex64]| grad.iter().map(|g| g.eval(w).norm_sqr()).sum::<f64>().sqrt();
    for _ in 0..starts {
        let a: Vec<Complex64> = (0..3).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let mut w = normalize(&(0..3).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect::<Vec<_>>());
        for _ in 0..80 {
            // grad F = 0, plus a zero-residual row keeping steps inside a random affine chart
            let mut j = DMatrix::<Complex64>::zeros(4, 3);
            let mut r = DVector::<Complex64>::zeros(4);
            for i in 0..3 {
                r[i] = grad[i].eval(&w);
                for k in 0..3 {
                    j[(i, k)] = hess[i][k].eval(&w);
                }
            }
            for k in 0..3 {
                j[(3, k)] = a[k];
            }
            let Ok(step) = j.clone().svd(true, true).solve(&r, 1e-14) else { break };
            let next: Vec<Complex64> = w.iter().zip(step.iter()).map(|(x, s)| x - s).collect();
            if next.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                break;
            }
            let next = normalize(&next);
            let done = step.norm() < 1e-15;
            w = next;
            if done {
                break;
            }
        }
        let v = resid(&w);
        if v <= 1e-12 * scale.max(1.0) {
            return Some((w, v));
        }
    }
    None
}
