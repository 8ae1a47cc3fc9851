use std::f64::consts::TAU;

use num_complex::Complex64;

use super::{dedup_angles, SolverOptions};
use crate::error::{Error, Result};
use crate::roots::{clustered_roots, derivative, horner, Poly1};

/// `Im g(e^{i theta})`.
pub fn imag_on_circle(g: &[Complex64], theta: f64) -> f64 {
    horner(g, Complex64::from_polar(1.0, theta)).im
}

/// Angles where a polynomial with `g(0) = 0` takes real values on the unit circle.
pub fn circle_real_zeros(g: &Poly1) -> Result<Vec<f64>> {
    circle_real_zeros_with(g, &SolverOptions::default())
}

pub fn circle_real_zeros_with(g: &Poly1, opts: &SolverOptions) -> Result<Vec<f64>> {
    let d = g.degree();
    if d == 0 {
        return Err(Error::ConstantPolynomial);
    }
    let c = g.coeffs();
    let scale: f64 = c.iter().map(|x| x.norm()).sum();
    if c[0].norm() > 1e-14 * scale {
        return Err(Error::NonzeroConstantTerm(c[0].norm()));
    }

    // p(z) = z^D (g(z) - conj(g)(1/z)); on |z| = 1 it equals 2i z^D Im g(z)
    let mut p = vec![Complex64::new(0.0, 0.0); 2 * d + 1];
    for (k, &a) in c.iter().enumerate().skip(1) {
        p[d + k] += a;
        p[d - k] -= a.conj();
    }
    let p = Poly1::new(p)?;
    let dg = derivative(c);

    let mut angles = Vec::new();
    for cl in clustered_roots(&p)? {
        let r = cl.value.norm();
        let band = if cl.multiplicity == 1 { opts.circle_tol } else { opts.circle_tol.max(1e-5) };
        if (r - 1.0).abs() > band {
            continue;
        }
        let theta = polish_angle(c, &dg, cl.value.arg());
        if imag_on_circle(c, theta).abs() <= opts.circle_residual * scale.max(1.0) {
            angles.push(theta.rem_euclid(TAU));
        }
    }
    let angles = dedup_angles(angles, opts.angle_dedup);
    if angles.is_empty() {
        return Err(Error::SolverFailure("no real value of g found on the unit circle".into()));
    }
    Ok(angles)
}

/// Guarded Newton on `theta -> Im g(e^{i theta})`; derivative `Re(z g'(z))`.
fn polish_angle(c: &[Complex64], dg: &[Complex64], mut theta: f64) -> f64 {
    let mut best = imag_on_circle(c, theta).abs();
    for _ in 0..60 {
        if best == 0.0 {
            break;
        }
        let z = Complex64::from_polar(1.0, theta);
        let f = horner(c, z).im;
        let df = (z * horner(dg, z)).re;
        if df == 0.0 {
            break;
        }
        let cand = theta - f / df;
        let v = imag_on_circle(c, cand).abs();
        if v < best && (cand - theta).abs() < 0.1 {
            best = v;
            theta = cand;
        } else {
            break;
        }
    }
    theta
}
