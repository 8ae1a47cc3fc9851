//! Extended systems of bar-joint polyhedra: edge lengths, center of mass and
//! fixing equations, with first-order rigidity tests and flex continuation.
//!
//! First-order rigidity (trivial Jacobian kernel) is sufficient for local
//! rigidity. A nontrivial kernel is necessary for a flex but not sufficient,
//! which is why verdicts are three-valued.

mod analysis;
mod fixtures;
mod off;

pub use analysis::{rigidity_test, trace_flex, FlexTrace, RigidityVerdict, VerdictStatus};
pub use fixtures::{bricard_octahedron, bricard_gauge, reduce_polyhedron, square, square_flex, tetrahedron};
pub use off::parse_off;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixing::{astrelin_flat, astrelin_gradient_flat, FixingSystem};
use crate::geometry::PointSystem;
use crate::poly::SparsePoly;

/// Tolerance for the center-of-mass and fixing equations at the base.
pub const BASE_GAUGE_TOL: f64 = 1e-9;
/// Tolerance for every residual of an assembled system at its base.
pub const BASE_RESIDUAL_TOL: f64 = 1e-8;

/// Vertices, edges and target edge lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPolyhedron", into = "RawPolyhedron")]
pub struct Polyhedron {
    vertices: PointSystem,
    edges: Vec<(usize, usize)>,
    lengths: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawPolyhedron {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lengths: Option<Vec<f64>>,
}

impl TryFrom<RawPolyhedron> for Polyhedron {
    type Error = Error;

    fn try_from(raw: RawPolyhedron) -> Result<Self> {
        let v = PointSystem::from_rows(raw.dim, &raw.vertices)?;
        let edges = raw.edges.iter().map(|e| (e[0], e[1])).collect();
        Polyhedron::new(v, edges, raw.lengths)
    }
}

impl From<Polyhedron> for RawPolyhedron {
    fn from(p: Polyhedron) -> Self {
        let dim = p.vertices.dim();
        RawPolyhedron {
            dim,
            vertices: p.vertices.points().iter().map(|q| q[..dim].to_vec()).collect(),
            edges: p.edges.iter().map(|&(i, j)| [i, j]).collect(),
            lengths: Some(p.lengths),
        }
    }
}

impl Polyhedron {
    /// Lengths default to the current edge lengths.
    pub fn new(vertices: PointSystem, edges: Vec<(usize, usize)>, lengths: Option<Vec<f64>>) -> Result<Self> {
        let n = vertices.len();
        for &(i, j) in &edges {
            if i >= n || j >= n {
                return Err(Error::InvalidPolyhedron(format!("edge ({i}, {j}) out of range for {n} vertices")));
            }
            if i == j {
                return Err(Error::InvalidPolyhedron(format!("self-loop at vertex {i}")));
            }
        }
        let lengths = match lengths {
            Some(l) if l.len() != edges.len() => {
                return Err(Error::DimensionMismatch { expected: edges.len(), found: l.len() })
            }
            Some(l) => l,
            None => edges.iter().map(|&(i, j)| distance(&vertices.points()[i], &vertices.points()[j])).collect(),
        };
        if let Some(k) = lengths.iter().position(|l| !(*l > 0.0 && l.is_finite())) {
            return Err(Error::InvalidPolyhedron(format!("edge {k} has non-positive length {}", lengths[k])));
        }
        Ok(Polyhedron { vertices, edges, lengths })
    }

    pub fn vertices(&self) -> &PointSystem {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn dim(&self) -> usize {
        self.vertices.dim()
    }

    /// Same edges and lengths on new vertex positions.
    pub fn with_vertices(&self, vertices: PointSystem) -> Result<Self> {
        if vertices.len() != self.vertices.len() || vertices.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.vertices.len(), found: vertices.len() });
        }
        Ok(Polyhedron { vertices, edges: self.edges.clone(), lengths: self.lengths.clone() })
    }
}

fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// The equations that remove the rotational freedom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Gauge {
    /// The Astrelin function, for plane polyhedra.
    Plane,
    /// `Re F, Im F, Im H` of a fixing system, for space polyhedra.
    Space { system: FixingSystem },
}

impl Gauge {
    pub fn size(&self) -> usize {
        match self {
            Gauge::Plane => 1,
            Gauge::Space { .. } => 3,
        }
    }

    fn dim(&self) -> usize {
        match self {
            Gauge::Plane => 2,
            Gauge::Space { .. } => 3,
        }
    }
}

/// A polyhedron with its gauge, anchored at a reduced base configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtendedSystem {
    polyhedron: Polyhedron,
    gauge: Gauge,
    #[serde(skip)]
    gauge_grads: Option<(Vec<SparsePoly>, Vec<SparsePoly>)>,
}

/// Refuses bases that are not centered and on the fixing variety; see the
/// fixture helper [`reduce_polyhedron`] for the translation and rotation.
pub fn build_extended(p: &Polyhedron, gauge: Gauge) -> Result<ExtendedSystem> {
    if p.dim() != gauge.dim() {
        return Err(Error::DimensionMismatch { expected: gauge.dim(), found: p.dim() });
    }
    if let Gauge::Space { system } = &gauge {
        if system.n() != p.vertices.len() {
            return Err(Error::DimensionMismatch { expected: system.n(), found: p.vertices.len() });
        }
    }
    let gauge_grads = match &gauge {
        Gauge::Plane => None,
        Gauge::Space { system } => Some((system.f().gradient(), system.h().gradient())),
    };
    let es = ExtendedSystem { polyhedron: p.clone(), gauge, gauge_grads };

    let x = es.base();
    let r = es.residuals(&x)?;
    let scale = p.vertices.radius().max(1.0);
    let ne = p.edges.len();
    let dim = p.dim();
    for k in 0..dim {
        let v = r[ne + k];
        if v.abs() > BASE_GAUGE_TOL * scale {
            return Err(Error::BaseNotReduced { equation: format!("center of mass, coordinate {k}"), residual: v });
        }
    }
    let gauge_scales = es.gauge_scales();
    for (k, s) in gauge_scales.iter().enumerate() {
        let v = r[ne + dim + k];
        if v.abs() > BASE_GAUGE_TOL * s {
            return Err(Error::BaseNotReduced { equation: es.gauge_label(k), residual: v });
        }
    }
    for (k, &(i, j)) in p.edges.iter().enumerate() {
        let l2 = p.lengths[k] * p.lengths[k];
        if r[k].abs() > BASE_RESIDUAL_TOL * l2.max(1.0) {
            return Err(Error::BaseNotReduced { equation: format!("edge {i}-{j}"), residual: r[k] });
        }
    }
    Ok(es)
}

impl ExtendedSystem {
    pub fn polyhedron(&self) -> &Polyhedron {
        &self.polyhedron
    }

    pub fn gauge(&self) -> &Gauge {
        &self.gauge
    }

    pub fn dim(&self) -> usize {
        self.polyhedron.dim()
    }

    pub fn equation_count(&self) -> usize {
        self.polyhedron.edges.len() + self.dim() + self.gauge.size()
    }

    pub fn variable_count(&self) -> usize {
        self.dim() * self.polyhedron.vertices.len()
    }

    /// Flat base coordinates.
    pub fn base(&self) -> Vec<f64> {
        self.polyhedron.vertices.flat()
    }

    fn gauge_label(&self, k: usize) -> String {
        match (&self.gauge, k) {
            (Gauge::Plane, _) => "Astrelin function".into(),
            (_, 0) => "Re F".into(),
            (_, 1) => "Im F".into(),
            _ => "Im H".into(),
        }
    }

    fn gauge_scales(&self) -> Vec<f64> {
        let radius = self.polyhedron.vertices.radius();
        match &self.gauge {
            Gauge::Plane => {
                let q = 0.5 * radius * radius;
                let n = self.polyhedron.vertices.len() as i32;
                vec![(0..n).map(|k| q.powi(2 * k + 1)).sum::<f64>().max(1.0)]
            }
            Gauge::Space { system } => system.scales(radius).to_vec(),
        }
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.variable_count() {
            return Err(Error::DimensionMismatch { expected: self.variable_count(), found: x.len() });
        }
        Ok(())
    }

    /// Edge residuals `|p_i - p_j|^2 - l_ij^2`, coordinate sums, then gauge values.
    pub fn residuals(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        let d = self.dim();
        let p = &self.polyhedron;
        let mut r = Vec::with_capacity(self.equation_count());
        for (k, &(i, j)) in p.edges.iter().enumerate() {
            let d2: f64 = (0..d).map(|c| (x[d * i + c] - x[d * j + c]).powi(2)).sum();
            r.push(d2 - p.lengths[k] * p.lengths[k]);
        }
        for c in 0..d {
            r.push(x.iter().skip(c).step_by(d).sum());
        }
        match &self.gauge {
            Gauge::Plane => r.push(astrelin_flat(x)?),
            Gauge::Space { system } => {
                let w = complex_xy(x);
                r.extend(system.values_at(&w));
            }
        }
        Ok(r)
    }

    /// Analytic Jacobian, one row per equation.
    pub fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_len(x)?;
        let d = self.dim();
        let p = &self.polyhedron;
        let mut j = DMatrix::zeros(self.equation_count(), self.variable_count());
        for (k, &(a, b)) in p.edges.iter().enumerate() {
            for c in 0..d {
                let diff = 2.0 * (x[d * a + c] - x[d * b + c]);
                j[(k, d * a + c)] = diff;
                j[(k, d * b + c)] = -diff;
            }
        }
        let row0 = p.edges.len();
        for c in 0..d {
            for v in 0..p.vertices.len() {
                j[(row0 + c, d * v + c)] = 1.0;
            }
        }
        let g0 = row0 + d;
        match &self.gauge {
            Gauge::Plane => {
                for (k, g) in astrelin_gradient_flat(x).into_iter().enumerate() {
                    j[(g0, k)] = g;
                }
            }
            Gauge::Space { system } => {
                let owned;
                let (fg, hg) = match &self.gauge_grads {
                    Some((f, h)) => (f, h),
                    None => {
                        owned = (system.f().gradient(), system.h().gradient());
                        (&owned.0, &owned.1)
                    }
                };
                let w = complex_xy(x);
                for v in 0..p.vertices.len() {
                    let fj = fg[v].eval(&w);
                    let hj = hg[v].eval(&w);
                    // holomorphic: d/dx = P_j, d/dy = i P_j
                    j[(g0, 3 * v)] = fj.re;
                    j[(g0, 3 * v + 1)] = -fj.im;
                    j[(g0 + 1, 3 * v)] = fj.im;
                    j[(g0 + 1, 3 * v + 1)] = fj.re;
                    j[(g0 + 2, 3 * v)] = hj.im;
                    j[(g0 + 2, 3 * v + 1)] = hj.re;
                }
            }
        }
        Ok(j)
    }
}

fn complex_xy(x: &[f64]) -> Vec<num_complex::Complex64> {
    x.chunks(3).map(|c| num_complex::Complex64::new(c[0], c[1])).collect()
}
