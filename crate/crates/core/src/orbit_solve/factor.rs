use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::BivariatePoly;
use crate::roots::{clustered_roots, derivative, horner, Poly1, TRIM_REL_TOL};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A complex line `{lambda (alpha0, beta0)}` through the origin of the spin plane.
///
/// The direction is unit length with its first nonzero component real positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFactor {
    pub alpha0: Complex64,
    pub beta0: Complex64,
    pub multiplicity: usize,
}

impl LineFactor {
    fn from_direction(alpha: Complex64, beta: Complex64, multiplicity: usize) -> Self {
        let r = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        let (mut a, mut b) = (alpha / r, beta / r);
        let lead = if a.norm() > 1e-14 { a } else { b };
        let phase = lead.conj() / lead.norm();
        a *= phase;
        b *= phase;
        if a.norm() <= 1e-14 {
            a = ZERO;
        }
        if b.norm() <= 1e-14 {
            b = ZERO;
        }
        LineFactor { alpha0: a, beta0: b, multiplicity }
    }

    /// The linear form `beta0 * alpha - alpha0 * beta` vanishing on the line.
    pub fn form_at(&self, alpha: Complex64, beta: Complex64) -> Complex64 {
        self.beta0 * alpha - self.alpha0 * beta
    }

    fn order_key(&self) -> (usize, f64, f64, f64) {
        (self.multiplicity, -self.alpha0.re, self.beta0.re, self.beta0.im)
    }
}

/// Splits a homogeneous bivariate polynomial into lines with multiplicities.
///
/// Dehomogenizes to `t = alpha / beta`; a degree deficiency `k` becomes the
/// line `(1 : 0)` with multiplicity `k`. Output is ordered by multiplicity,
/// then by direction.
pub fn factor_homogeneous(ft: &BivariatePoly) -> Result<Vec<LineFactor>> {
    let d = ft
        .homogeneous_degree()
        .ok_or_else(|| Error::InvalidPolynomial("factor_homogeneous needs a homogeneous polynomial".into()))?
        as usize;
    if ft.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if d == 0 {
        return Ok(Vec::new());
    }
    // f(t) = F(t, 1)
    let f: Vec<Complex64> = (0..=d as u32).map(|i| ft.coefficient(i, d as u32 - i)).collect();
    let scale = f.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let deg = (0..=d).rev().find(|&i| f[i].norm() > TRIM_REL_TOL * scale).unwrap_or(0);
    let deficiency = d - deg;

    let mut lines = Vec::new();
    if deg > 0 {
        let poly = Poly1::new(f[..=deg].to_vec())?;
        for cl in clustered_roots(&poly)? {
            let t = polish_line(&f[..=deg], cl.value, cl.multiplicity);
            lines.push(if t.norm() <= 1.0 {
                LineFactor::from_direction(t, ONE, cl.multiplicity)
            } else {
                LineFactor::from_direction(ONE, ONE / t, cl.multiplicity)
            });
        }
    }
    if deficiency > 0 {
        lines.push(LineFactor::from_direction(ONE, ZERO, deficiency));
    }
    lines.sort_by(|a, b| {
        a.order_key()
            .partial_cmp(&b.order_key())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(lines)
}

/// Newton polish of a root of multiplicity `m`, done in the chart `1/t` for large roots.
fn polish_line(f: &[Complex64], t: Complex64, m: usize) -> Complex64 {
    if t.norm() <= 1.0 {
        polish(f, t, m)
    } else {
        let rev: Vec<Complex64> = f.iter().rev().copied().collect();
        ONE / polish(&rev, ONE / t, m)
    }
}

fn polish(f: &[Complex64], start: Complex64, m: usize) -> Complex64 {
    let mut d = f.to_vec();
    for _ in 0..(m - 1) {
        d = derivative(&d);
    }
    let dd = derivative(&d);
    let mut z = start;
    let mut best = horner(&d, z).norm();
    for _ in 0..5 {
        let step = horner(&d, z) / horner(&dd, z);
        if !(step.re.is_finite() && step.im.is_finite()) {
            break;
        }
        let cand = z - step;
        let v = horner(&d, cand).norm();
        if v < best {
            best = v;
            z = cand;
        } else {
            break;
        }
    }
    z
}

/// Product of the linear forms with multiplicity, as a homogeneous polynomial.
pub fn line_product(lines: &[LineFactor]) -> BivariatePoly {
    let mut out = BivariatePoly::constant(ONE);
    for l in lines {
        let form = BivariatePoly::from_terms([((1, 0), l.beta0), ((0, 1), -l.alpha0)])
            .with_homogeneous(1)
            .expect("linear form");
        for _ in 0..l.multiplicity {
            out = out.mul(&form);
        }
    }
    out
}
