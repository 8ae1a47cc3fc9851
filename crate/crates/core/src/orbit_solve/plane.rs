use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;

use super::{circle_real_zeros_with, dedup_angles, SolverOptions};
use crate::error::{Error, Result};
use crate::fixing::{astrelin_eval, astrelin_orbit_series, orbit_gamma, TrigPoly};
use crate::geometry::{rotate_plane_by, PlaneRotation, PointSystem};
use crate::poly::SparsePoly;
use crate::roots::{clustered_roots, Poly1};

fn require_plane(s: &PointSystem) -> Result<()> {
    if s.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: s.dim() });
    }
    Ok(())
}

fn astrelin_at(s: &PointSystem, theta: f64) -> f64 {
    astrelin_eval(&rotate_plane_by(s, theta)).unwrap_or(f64::NAN)
}

/// An angle in `[0, pi/2]` whose rotation puts the system on `A = 0`.
///
/// A quarter turn flips the sign of `A`, so bisection on `[0, pi/2]` always
/// brackets a zero.
pub fn plane_reduce(s: &PointSystem) -> Result<PlaneRotation> {
    require_plane(s)?;
    if s.all_at_origin() {
        return Ok(PlaneRotation::identity());
    }
    let series = astrelin_orbit_series(s)?;
    let tol = 1e-12 * (1.0 + series.scale());
    let f0 = astrelin_eval(s)?;
    if f0.abs() <= tol {
        return Ok(PlaneRotation::identity());
    }
    let (mut lo, mut hi) = (0.0, FRAC_PI_2);
    let mut flo = f0;
    let fhi = astrelin_at(s, hi);
    if fhi.abs() <= tol {
        return PlaneRotation::new(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::SolverFailure("quarter-turn sign flip not observed".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = astrelin_at(s, mid);
        if fm == 0.0 {
            return PlaneRotation::new(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let best = if astrelin_at(s, lo).abs() <= astrelin_at(s, hi).abs() { lo } else { hi };
    let r = astrelin_at(s, best);
    if r.abs() > tol {
        return Err(Error::SolverFailure(format!("bisection stalled at |A| = {r:e}")));
    }
    PlaneRotation::new(best)
}

/// Every angle in `[0, 2pi)` where the rotated system satisfies `A = 0`.
pub fn plane_fix_enumerate(s: &PointSystem) -> Result<Vec<f64>> {
    plane_fix_enumerate_with(s, &SolverOptions::default())
}

pub fn plane_fix_enumerate_with(s: &PointSystem, opts: &SolverOptions) -> Result<Vec<f64>> {
    require_plane(s)?;
    if s.all_at_origin() {
        return Err(Error::DegenerateOrbit);
    }
    let series = astrelin_orbit_series(s)?;
    let dseries = series.derivative();
    let scale = series.scale();
    let p = Poly1::new(series.to_z_polynomial())?;
    let mut angles = Vec::new();
    for cl in clustered_roots(&p)? {
        let band = if cl.multiplicity == 1 { opts.circle_tol } else { opts.circle_tol.max(1e-5) };
        if (cl.value.norm() - 1.0).abs() > band {
            continue;
        }
        let theta = newton_trig(&series, &dseries, cl.value.arg());
        if series.eval(theta).abs() <= 1e-10 * (1.0 + scale) {
            angles.push(theta);
        }
    }
    Ok(dedup_angles(angles, opts.angle_dedup))
}

fn newton_trig(a: &TrigPoly, da: &TrigPoly, mut theta: f64) -> f64 {
    let mut best = a.eval(theta).abs();
    for _ in 0..60 {
        if best == 0.0 {
            break;
        }
        let d = da.eval(theta);
        if d == 0.0 {
            break;
        }
        let cand = theta - a.eval(theta) / d;
        let v = a.eval(cand).abs();
        if v < best && (cand - theta).abs() < 0.1 {
            best = v;
            theta = cand;
        } else {
            break;
        }
    }
    theta
}

/// Highest Fourier coefficient `a + ib = 2 conj(gamma_n)^(2n-1)` of the orbit restriction of `A`.
pub fn fourier_leading(s: &PointSystem) -> Result<Complex64> {
    require_plane(s)?;
    let n = s.len();
    let p = s.points()[n - 1];
    Ok(2.0 * orbit_gamma(p[0], p[1]).conj().powu(2 * n as u32 - 1))
}

/// `g(lambda) = H(lambda w_1, ..., lambda w_n)` for a plane system, `w_j = x_j + i y_j`.
pub fn plane_h_orbit_poly(h: &SparsePoly, s: &PointSystem) -> Result<Poly1> {
    require_plane(s)?;
    if h.nvars() != s.len() {
        return Err(Error::DimensionMismatch { expected: s.len(), found: h.nvars() });
    }
    let w = s.complex_xy();
    let deg = h.total_degree().unwrap_or(0) as usize;
    let mut g = vec![Complex64::new(0.0, 0.0); deg + 1];
    for (e, c) in h.terms() {
        let k: u32 = e.iter().sum();
        let v = e.iter().zip(&w).fold(c, |acc, (&x, &wj)| acc * wj.powu(x));
        g[k as usize] += v;
    }
    Poly1::new(g)
}

/// Rotation angles where `Im H` vanishes on the SO(2) orbit of a plane system.
pub fn plane_h_zeros(h: &SparsePoly, s: &PointSystem, opts: &SolverOptions) -> Result<Vec<f64>> {
    if s.all_at_origin() {
        return Err(Error::DegenerateOrbit);
    }
    let g = plane_h_orbit_poly(h, s)?;
    circle_real_zeros_with(&g, opts)
}

/// Vertices of the regular `n`-gon at the `n`-th roots of unity.
pub fn regular_polygon(n: usize) -> Result<PointSystem> {
    let pts: Vec<[f64; 2]> = (0..n)
        .map(|j| {
            let t = TAU * j as f64 / n as f64;
            [t.cos(), t.sin()]
        })
        .collect();
    PointSystem::plane(&pts)
}

/// `H = w_1^n + w_2^{2n} + ... + w_n^{n^2}`.
pub fn polygon_h(n: usize) -> Result<SparsePoly> {
    SparsePoly::from_terms(
        n,
        (0..n).map(|j| {
            let mut e = vec![0; n];
            e[j] = ((j + 1) * n) as u32;
            (e, Complex64::new(1.0, 0.0))
        }),
    )
}

/// Zeros of `Im H` on the orbit of the regular `n`-gon with `H = sum w_j^{jn}`.
pub fn polygon_imh_zeros(n: usize) -> Result<Vec<f64>> {
    if n < 3 {
        return Err(Error::Precondition(format!("regular polygon needs n >= 3, got {n}")));
    }
    plane_h_zeros(&polygon_h(n)?, &regular_polygon(n)?, &SolverOptions::default())
}

/// Whether the orbit crosses `A = 0` transversally at this system.
///
/// The orbit tangent is `(-y_1, x_1, ..., -y_n, x_n)`; its pairing with `grad A`
/// is `sum (2k-1) (x_k y_k)^(2k-2) (x_k^2 - y_k^2)`.
pub fn plane_transversality(s: &PointSystem) -> Result<bool> {
    require_plane(s)?;
    let a = astrelin_eval(s)?;
    let mut a_scale = 0.0;
    let mut deriv = 0.0;
    let mut d_scale = 0.0;
    for (k, p) in s.points().iter().enumerate() {
        let e = 2 * k as i32 + 1;
        let xy = p[0] * p[1];
        a_scale += xy.abs().powi(e);
        let lead = e as f64 * xy.powi(e - 1);
        deriv += lead * (p[0] * p[0] - p[1] * p[1]);
        d_scale += lead.abs() * (p[0] * p[0] + p[1] * p[1]);
    }
    if a.abs() > 1e-10 * (1.0 + a_scale) {
        return Err(Error::NotOnVariety(a));
    }
    Ok(deriv.abs() > 1e-10 * d_scale.max(f64::MIN_POSITIVE) && d_scale > 0.0)
}
