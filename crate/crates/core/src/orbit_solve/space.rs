use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{circle_real_zeros_with, factor_homogeneous, LineFactor, SolverOptions};
use crate::error::{Error, Result};
use crate::fixing::{pullback_su2, FixingSystem};
use crate::geometry::{classify_orbit, project_xy, rotate_by_spin, PointSystem, Spin};
use crate::poly::BivariatePoly;
use crate::roots::Poly1;

/// One fixing rotation with the absolute values of `(Re F, Im F, Im H)` there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationEntry {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub residuals: [f64; 3],
}

impl RotationEntry {
    pub fn spin(&self) -> Spin {
        Spin { alpha: self.alpha, beta: self.beta }
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// What happened on one line of `F~ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineDiagnostics {
    pub line: LineFactor,
    /// Circle zeros of the restricted `H~` (1 for a stabilizer line).
    pub zero_count: usize,
    /// `H~` vanishes identically on the line: every rotated point lies on the z-axis.
    pub stabilizer: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroReport {
    pub rotations: Vec<RotationEntry>,
    pub distinct_configurations: usize,
    pub orbit_class: String,
    pub line_factors: Vec<LineFactor>,
    pub lines: Vec<LineDiagnostics>,
}

impl ZeroReport {
    /// The rotated systems, one per listed rotation.
    pub fn configurations(&self, s: &PointSystem) -> Result<Vec<PointSystem>> {
        self.rotations.iter().map(|r| rotate_by_spin(s, &r.spin())).collect()
    }
}

/// `|Re F|, |Im F|, |Im H|` after rotating `s` by `q`.
pub fn fixing_residuals(s: &PointSystem, fs: &FixingSystem, q: &Spin) -> Result<[f64; 3]> {
    if s.len() != fs.n() {
        return Err(Error::DimensionMismatch { expected: fs.n(), found: s.len() });
    }
    let v = fs.values_at(&project_xy(q, s)?);
    Ok(v.map(f64::abs))
}

fn check_inputs(s: &PointSystem, fs: &FixingSystem) -> Result<()> {
    if s.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: s.dim() });
    }
    if s.len() != fs.n() {
        return Err(Error::DimensionMismatch { expected: fs.n(), found: s.len() });
    }
    Ok(())
}

struct LineWork {
    line: LineFactor,
    g: Vec<Complex64>,
    stabilizer: bool,
}

fn line_work(s: &PointSystem, fs: &FixingSystem, opts: &SolverOptions) -> Result<Vec<LineWork>> {
    let ft = pullback_su2(fs.f(), s)?;
    if ft.is_zero() {
        return Err(Error::SolverFailure("pullback of F vanishes identically".into()));
    }
    let ht: BivariatePoly = pullback_su2(fs.h(), s)?;
    let hscale = ht.max_abs_coefficient();
    factor_homogeneous(&ft)?
        .into_iter()
        .map(|line| {
            let g = ht.restrict_to_line(line.alpha0, line.beta0);
            let gmax = g.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let stabilizer = gmax <= opts.line_zero_tol * hscale.max(f64::MIN_POSITIVE);
            Ok(LineWork { line, g, stabilizer })
        })
        .collect()
}

fn spin_on_line(line: &LineFactor, theta: f64) -> Result<Spin> {
    let l = Complex64::from_polar(1.0, theta);
    Spin::normalized(l * line.alpha0, l * line.beta0)
}

fn line_zeros(w: &LineWork, opts: &SolverOptions) -> Result<Vec<Spin>> {
    if w.stabilizer {
        return Ok(vec![spin_on_line(&w.line, 0.0)?]);
    }
    let g = Poly1::new(w.g.clone())?;
    circle_real_zeros_with(&g, opts)?
        .into_iter()
        .map(|t| spin_on_line(&w.line, t))
        .collect()
}

fn accepts(res: &[f64; 3], scales: &[f64; 3], tol: f64) -> bool {
    res.iter().zip(scales).all(|(r, s)| *r <= tol * s)
}

/// A spin whose rotation puts `s` on the fixing variety `Re F = Im F = Im H = 0`.
pub fn space_reduce(s: &PointSystem, fs: &FixingSystem) -> Result<Spin> {
    space_reduce_with(s, fs, &SolverOptions::default())
}

/// Lines are tried in order of increasing multiplicity.
pub fn space_reduce_with(s: &PointSystem, fs: &FixingSystem, opts: &SolverOptions) -> Result<Spin> {
    check_inputs(s, fs)?;
    if s.all_at_origin() {
        return Ok(Spin::identity());
    }
    let scales = fs.scales(s.radius());
    let mut best: Option<f64> = None;
    for w in line_work(s, fs, opts)? {
        let spins = match line_zeros(&w, opts) {
            Ok(v) => v,
            Err(_) => continue,
        };
        for q in spins {
            let res = fixing_residuals(s, fs, &q)?;
            if accepts(&res, &scales, opts.residual_tol) {
                return Ok(q);
            }
            let m = res.iter().zip(&scales).map(|(r, c)| r / c).fold(0.0, f64::max);
            best = Some(best.map_or(m, |b: f64| b.min(m)));
        }
    }
    Err(Error::SolverFailure(match best {
        Some(m) => format!("no candidate met the residual bound; best relative residual {m:e}"),
        None => "no circle zeros on any line".into(),
    }))
}

/// All fixing rotations of `s`, deduplicated by the configurations they produce.
pub fn space_fix_enumerate(s: &PointSystem, fs: &FixingSystem) -> Result<ZeroReport> {
    space_fix_enumerate_with(s, fs, &SolverOptions::default())
}

pub fn space_fix_enumerate_with(s: &PointSystem, fs: &FixingSystem, opts: &SolverOptions) -> Result<ZeroReport> {
    check_inputs(s, fs)?;
    if s.all_at_origin() {
        return Err(Error::DegenerateOrbit);
    }
    let scales = fs.scales(s.radius());
    let works = line_work(s, fs, opts)?;
    let mut rotations = Vec::new();
    let mut lines = Vec::new();
    for w in &works {
        let spins = line_zeros(w, opts)?;
        lines.push(LineDiagnostics { line: w.line, zero_count: spins.len(), stabilizer: w.stabilizer });
        for q in spins {
            let residuals = fixing_residuals(s, fs, &q)?;
            if accepts(&residuals, &scales, opts.residual_tol) {
                rotations.push(RotationEntry { alpha: q.alpha, beta: q.beta, residuals });
            }
        }
    }
    if rotations.is_empty() {
        return Err(Error::SolverFailure("no rotation met the residual bound".into()));
    }

    let tol = opts.dedup_tol * s.radius().max(1.0);
    let mut distinct: Vec<PointSystem> = Vec::new();
    for r in &rotations {
        let c = rotate_by_spin(s, &r.spin())?;
        if !distinct.iter().any(|d| d.max_distance(&c) <= tol) {
            distinct.push(c);
        }
    }

    Ok(ZeroReport {
        rotations,
        distinct_configurations: distinct.len(),
        orbit_class: classify_orbit(s).tag.as_str().to_string(),
        line_factors: works.iter().map(|w| w.line).collect(),
        lines,
    })
}
