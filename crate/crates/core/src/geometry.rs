//! Point systems and the rotation groups acting on them.
//!
//! Plane systems rotate under SO(2); space systems rotate under SO(3), which
//! is parameterized here through its double cover SU(2). A unit spin
//! `(alpha, beta)` acts on a point `P = (x, y, z)` by conjugating the
//! Hermitian matrix `[[z, c], [conj(c), -z]]`, `c = x + iy`.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance on `| |alpha|^2 + |beta|^2 - 1 |`.
pub const SPIN_UNIT_TOL: f64 = 1e-12;

/// Singular values below this fraction of the largest are treated as zero.
pub const RANK_REL_TOL: f64 = 1e-10;

/// An ordered list of points in the plane (`dim = 2`) or in space (`dim = 3`).
///
/// Plane points are stored with `z = 0`. Coinciding points are allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPointSystem", into = "RawPointSystem")]
pub struct PointSystem {
    dim: usize,
    points: Vec<[f64; 3]>,
}

#[derive(Serialize, Deserialize)]
struct RawPointSystem {
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl TryFrom<RawPointSystem> for PointSystem {
    type Error = Error;

    fn try_from(raw: RawPointSystem) -> Result<Self> {
        PointSystem::from_rows(raw.dim, &raw.points)
    }
}

impl From<PointSystem> for RawPointSystem {
    fn from(s: PointSystem) -> Self {
        let points = s.points.iter().map(|p| p[..s.dim].to_vec()).collect();
        RawPointSystem { dim: s.dim, points }
    }
}

impl PointSystem {
    fn validated(dim: usize, points: Vec<[f64; 3]>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidPointSystem(format!("dim must be 2 or 3, got {dim}")));
        }
        if points.is_empty() {
            return Err(Error::InvalidPointSystem("at least one point is required".into()));
        }
        if let Some(j) = points.iter().position(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(Error::InvalidPointSystem(format!("point {j} has a non-finite coordinate")));
        }
        Ok(PointSystem { dim, points })
    }

    pub fn plane(points: &[[f64; 2]]) -> Result<Self> {
        Self::validated(2, points.iter().map(|p| [p[0], p[1], 0.0]).collect())
    }

    pub fn space(points: &[[f64; 3]]) -> Result<Self> {
        Self::validated(3, points.to_vec())
    }

    /// Builds a system from rows of length `dim`.
    pub fn from_rows(dim: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let mut points = Vec::with_capacity(rows.len());
        for (j, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidPointSystem(format!(
                    "point {j} has {} coordinates, expected {dim}",
                    row.len()
                )));
            }
            let mut p = [0.0; 3];
            p[..dim].copy_from_slice(row);
            points.push(p);
        }
        Self::validated(dim, points)
    }

    /// Builds a system from a flat coordinate vector `(x1, y1[, z1], x2, ...)`.
    pub fn from_flat(dim: usize, coords: &[f64]) -> Result<Self> {
        if dim == 0 || coords.len() % dim != 0 {
            return Err(Error::DimensionMismatch { expected: dim, found: coords.len() });
        }
        let rows: Vec<Vec<f64>> = coords.chunks(dim).map(|c| c.to_vec()).collect();
        Self::from_rows(dim, &rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points as `[x, y, z]`; plane systems report `z = 0`.
    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn flat(&self) -> Vec<f64> {
        self.points.iter().flat_map(|p| p[..self.dim].iter().copied()).collect()
    }

    /// `c_j = x_j + i y_j`.
    pub fn complex_xy(&self) -> Vec<Complex64> {
        self.points.iter().map(|p| Complex64::new(p[0], p[1])).collect()
    }

    /// Largest Euclidean norm over the points.
    pub fn radius(&self) -> f64 {
        self.points
            .iter()
            .map(|p| (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt())
            .fold(0.0, f64::max)
    }

    pub fn all_at_origin(&self) -> bool {
        self.points.iter().all(|p| p.iter().all(|&c| c == 0.0))
    }

    pub fn centroid(&self) -> [f64; 3] {
        let n = self.points.len() as f64;
        let mut c = [0.0; 3];
        for p in &self.points {
            for k in 0..3 {
                c[k] += p[k];
            }
        }
        c.map(|v| v / n)
    }

    /// The same system translated so that its centroid sits at the origin.
    pub fn centered(&self) -> PointSystem {
        let c = self.centroid();
        let points = self.points.iter().map(|p| [p[0] - c[0], p[1] - c[1], p[2] - c[2]]).collect();
        PointSystem { dim: self.dim, points }
    }

    pub fn scaled(&self, t: f64) -> PointSystem {
        let points = self.points.iter().map(|p| p.map(|c| c * t)).collect();
        PointSystem { dim: self.dim, points }
    }

    /// Max-norm distance between two systems of equal shape.
    pub fn max_distance(&self, other: &PointSystem) -> f64 {
        self.points
            .iter()
            .zip(&other.points)
            .flat_map(|(a, b)| (0..3).map(move |k| (a[k] - b[k]).abs()))
            .fold(0.0, f64::max)
    }

    fn require_dim(&self, dim: usize) -> Result<()> {
        if self.dim != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: self.dim });
        }
        Ok(())
    }
}

/// A rotation of the plane by `theta`, kept in `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneRotation {
    theta: f64,
}

impl PlaneRotation {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::Precondition(format!("rotation angle {theta} is not finite")));
        }
        Ok(PlaneRotation { theta: canonical_angle(theta) })
    }

    pub fn identity() -> Self {
        PlaneRotation { theta: 0.0 }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Maps an angle into `[0, 2pi)`.
pub fn canonical_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Rotates every point of a plane system about the origin.
pub fn rotate_plane(s: &PointSystem, rho: PlaneRotation) -> Result<PointSystem> {
    s.require_dim(2)?;
    Ok(rotate_plane_by(s, rho.theta))
}

pub(crate) fn rotate_plane_by(s: &PointSystem, theta: f64) -> PointSystem {
    let (sn, cs) = theta.sin_cos();
    let points = s
        .points
        .iter()
        .map(|p| [cs * p[0] - sn * p[1], sn * p[0] + cs * p[1], 0.0])
        .collect();
    PointSystem { dim: 2, points }
}

/// A unit pair `(alpha, beta)`, i.e. the SU(2) matrix `[[alpha, beta], [-conj(beta), conj(alpha)]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpin", into = "RawSpin")]
pub struct Spin {
    pub alpha: Complex64,
    pub beta: Complex64,
}

#[derive(Serialize, Deserialize)]
struct RawSpin {
    alpha: [f64; 2],
    beta: [f64; 2],
}

impl TryFrom<RawSpin> for Spin {
    type Error = Error;

    fn try_from(raw: RawSpin) -> Result<Self> {
        Spin::new(
            Complex64::new(raw.alpha[0], raw.alpha[1]),
            Complex64::new(raw.beta[0], raw.beta[1]),
        )
    }
}

impl From<Spin> for RawSpin {
    fn from(q: Spin) -> Self {
        RawSpin { alpha: [q.alpha.re, q.alpha.im], beta: [q.beta.re, q.beta.im] }
    }
}

impl Spin {
    /// Validates the unit-norm condition with the default tolerance.
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let q = Spin { alpha, beta };
        q.check_unit(SPIN_UNIT_TOL)?;
        Ok(q)
    }

    /// Rescales an arbitrary nonzero pair onto the unit sphere.
    pub fn normalized(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let r = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::NonUnitSpin(f64::NAN));
        }
        Ok(Spin { alpha: alpha / r, beta: beta / r })
    }

    pub fn identity() -> Self {
        Spin { alpha: Complex64::new(1.0, 0.0), beta: Complex64::new(0.0, 0.0) }
    }

    pub fn neg(&self) -> Self {
        Spin { alpha: -self.alpha, beta: -self.beta }
    }

    pub fn unit_defect(&self) -> f64 {
        (self.alpha.norm_sqr() + self.beta.norm_sqr() - 1.0).abs()
    }

    pub fn check_unit(&self, tol: f64) -> Result<()> {
        let defect = self.unit_defect();
        if !(defect <= tol) {
            return Err(Error::NonUnitSpin(defect));
        }
        Ok(())
    }

    /// Rotates a single point by conjugation.
    pub fn act(&self, p: [f64; 3]) -> [f64; 3] {
        let (a, b) = (self.alpha, self.beta);
        let c = Complex64::new(p[0], p[1]);
        let z = p[2];
        let w = a * a * c - b * b * c.conj() - 2.0 * z * a * b;
        let zz = (a.norm_sqr() - b.norm_sqr()) * z + 2.0 * (a * b.conj() * c).re;
        [w.re, w.im, zz]
    }
}

/// A proper rotation of space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation3 {
    m: Matrix3<f64>,
}

impl Rotation3 {
    /// Accepts a matrix that is orthogonal with determinant one within `1e-10`.
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self> {
        let orth = (m.transpose() * m - Matrix3::identity()).abs().max();
        let det = m.determinant();
        if !(orth <= 1e-10 && (det - 1.0).abs() <= 1e-10) {
            return Err(Error::Precondition(format!(
                "matrix is not a rotation (orthogonality defect {orth:e}, det {det})"
            )));
        }
        Ok(Rotation3 { m })
    }

    pub fn identity() -> Self {
        Rotation3 { m: Matrix3::identity() }
    }

    /// Rotation by `angle` about the axis `axis` (need not be unit).
    pub fn about_axis(axis: [f64; 3], angle: f64) -> Self {
        let v = Vector3::from(axis).normalize();
        let rot = nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_unchecked(v), angle);
        Rotation3 { m: *rot.matrix() }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.m
    }

    pub fn apply(&self, p: [f64; 3]) -> [f64; 3] {
        let v = self.m * Vector3::from(p);
        [v.x, v.y, v.z]
    }

    pub fn compose(&self, other: &Rotation3) -> Rotation3 {
        Rotation3 { m: self.m * other.m }
    }

    pub fn orthogonality_defect(&self) -> f64 {
        (self.m.transpose() * self.m - Matrix3::identity()).abs().max()
    }
}

/// The rotation represented by a unit spin. Antipodal spins give the same matrix.
pub fn spin_to_rotation(q: &Spin) -> Result<Rotation3> {
    q.check_unit(SPIN_UNIT_TOL)?;
    Ok(Rotation3 { m: rotation_matrix_unchecked(q) })
}

fn rotation_matrix_unchecked(q: &Spin) -> Matrix3<f64> {
    let cols = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]].map(|e| q.act(e));
    Matrix3::from_fn(|r, c| cols[c][r])
}

/// Applies a rotation to every point of a space system.
pub fn rotate_space(s: &PointSystem, r: &Rotation3) -> Result<PointSystem> {
    s.require_dim(3)?;
    let points = s.points.iter().map(|&p| r.apply(p)).collect();
    Ok(PointSystem { dim: 3, points })
}

/// Applies a spin directly (no matrix) to every point of a space system.
pub fn rotate_by_spin(s: &PointSystem, q: &Spin) -> Result<PointSystem> {
    s.require_dim(3)?;
    q.check_unit(SPIN_UNIT_TOL)?;
    let points = s.points.iter().map(|&p| q.act(p)).collect();
    Ok(PointSystem { dim: 3, points })
}

/// `w_j = c_j alpha^2 - conj(c_j) beta^2 - 2 z_j alpha beta`: the `x + iy`
/// projection of each rotated point.
pub fn project_xy(q: &Spin, s: &PointSystem) -> Result<Vec<Complex64>> {
    s.require_dim(3)?;
    q.check_unit(SPIN_UNIT_TOL)?;
    Ok(project_xy_unchecked(q.alpha, q.beta, s))
}

/// The projection formula for arbitrary `(alpha, beta)`; it is a quadratic form.
pub(crate) fn project_xy_unchecked(a: Complex64, b: Complex64, s: &PointSystem) -> Vec<Complex64> {
    let (a2, b2, ab) = (a * a, b * b, a * b);
    s.points
        .iter()
        .map(|p| {
            let c = Complex64::new(p[0], p[1]);
            c * a2 - c.conj() * b2 - 2.0 * p[2] * ab
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitTag {
    /// Every point at the origin.
    SinglePoint,
    /// Points collinear with the origin, not all zero.
    Sphere2,
    /// Generic orbit, a copy of SO(3).
    RealProjective3,
}

impl OrbitTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            OrbitTag::SinglePoint => "single-point",
            OrbitTag::Sphere2 => "sphere2",
            OrbitTag::RealProjective3 => "real-projective3",
        }
    }
}

/// Linear dependence structure of the position vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependenceProfile {
    pub rank: usize,
    /// Indices of the points chosen as a basis of their span.
    pub basis: Vec<usize>,
    /// For every point, its coordinates in the basis (length `rank`).
    pub coefficients: Vec<Vec<f64>>,
    /// Largest reconstruction error over all points.
    pub reconstruction_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitClass {
    pub tag: OrbitTag,
    pub dependence: DependenceProfile,
}

/// Classifies the rotation orbit of a system by the rank of its position vectors.
pub fn classify_orbit(s: &PointSystem) -> OrbitClass {
    let n = s.len();
    let pos = DMatrix::from_fn(n, 3, |j, k| s.points[j][k]);
    let sv = pos.clone().svd(false, false).singular_values;
    let smax = sv.max();
    let rank = if smax == 0.0 { 0 } else { sv.iter().filter(|&&x| x > RANK_REL_TOL * smax).count() };

    // Pivoted Gram-Schmidt picks the basis points.
    let mut basis = Vec::with_capacity(rank);
    let mut ortho: Vec<Vector3<f64>> = Vec::with_capacity(rank);
    for _ in 0..rank {
        let mut best = (0usize, -1.0);
        for (j, p) in s.points.iter().enumerate() {
            if basis.contains(&j) {
                continue;
            }
            let mut v = Vector3::from(*p);
            for u in &ortho {
                v -= u * u.dot(&v);
            }
            if v.norm() > best.1 {
                best = (j, v.norm());
            }
        }
        let mut v = Vector3::from(s.points[best.0]);
        for u in &ortho {
            v -= u * u.dot(&v);
        }
        ortho.push(v / best.1);
        basis.push(best.0);
    }

    let mut coefficients = Vec::with_capacity(n);
    let mut reconstruction_error: f64 = 0.0;
    if rank > 0 {
        let b = DMatrix::from_fn(3, rank, |k, i| s.points[basis[i]][k]);
        let svd = b.clone().svd(true, true);
        for p in &s.points {
            let rhs = DMatrix::from_column_slice(3, 1, p);
            let coef = svd.solve(&rhs, 0.0).expect("svd computed with both factors");
            let err = (&b * &coef - &rhs).amax();
            reconstruction_error = reconstruction_error.max(err);
            coefficients.push(coef.iter().copied().collect());
        }
    } else {
        coefficients.resize(n, Vec::new());
    }

    let tag = match rank {
        0 => OrbitTag::SinglePoint,
        1 => OrbitTag::Sphere2,
        _ => OrbitTag::RealProjective3,
    };
    OrbitClass {
        tag,
        dependence: DependenceProfile { rank, basis, coefficients, reconstruction_error },
    }
}

/// Differential of the orbit map `R -> R * M0` at the identity.
///
/// Column `k` is the velocity of every point under a unit-speed rotation
/// about coordinate axis `k` (x, y, z), i.e. the roll/pitch/yaw angles,
/// which are regular at the identity.
pub fn orbit_tangent_jacobian(s: &PointSystem) -> Result<DMatrix<f64>> {
    s.require_dim(3)?;
    let n = s.len();
    let mut j = DMatrix::zeros(3 * n, 3);
    for (i, p) in s.points.iter().enumerate() {
        let [x, y, z] = *p;
        let cols = [[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]];
        for (k, col) in cols.iter().enumerate() {
            for r in 0..3 {
                j[(3 * i + r, k)] = col[r];
            }
        }
    }
    Ok(j)
}

/// The 3x3 minor of the orbit Jacobian on coordinates `(z1, x2, z2)`.
///
/// For `M0 = (1, 0, 0, a, b, 0, ...)` it equals `b^2`, so the orbit map is an
/// immersion whenever the first two points are independent.
pub fn immersion_minor(jac: &DMatrix<f64>) -> f64 {
    assert!(jac.nrows() >= 6 && jac.ncols() == 3, "need at least two points");
    let rows = [2usize, 3, 5];
    Matrix3::from_fn(|r, c| jac[(rows[r], c)]).determinant()
}

/// Numerical rank with the relative threshold `RANK_REL_TOL`.
pub fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&x| x > RANK_REL_TOL * smax).count()
}
