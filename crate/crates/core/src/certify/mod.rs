//! Checks of the hypotheses placed on the fixing polynomials: homogeneity and
//! parity, strict exponents, absence of real points, smoothness of plane curves.

mod smooth;
mod sphere;

pub use smooth::{check_plane_smooth, check_plane_smooth_with};
pub use sphere::{check_no_real_points, check_no_real_points_with, SphereSearch};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fixing::{FixingSystem, OddGauge};
use crate::poly::SparsePoly;

pub const DEFAULT_EPSILON: f64 = 1e-3;
pub const DEFAULT_MAX_DEPTH: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    EvenHomogeneous,
    StrictExponents,
    NoRealPoints,
    PlaneSmooth,
    OddHomogeneous,
    NoLinesConics,
}

impl Property {
    pub fn as_str(&self) -> &'static str {
        match self {
            Property::EvenHomogeneous => "even-homogeneous",
            Property::StrictExponents => "strict-exponents",
            Property::NoRealPoints => "no-real-points",
            Property::PlaneSmooth => "plane-smooth",
            Property::OddHomogeneous => "odd-homogeneous",
            Property::NoLinesConics => "no-lines-conics",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Certified,
    Refuted,
    HeuristicPass,
    Unsupported,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Certified => "certified",
            Status::Refuted => "refuted",
            Status::HeuristicPass => "heuristic-pass",
            Status::Unsupported => "unsupported",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Evidence {
    /// The common total degree.
    Degree { degree: u32 },
    /// Distinct total degrees found (inhomogeneous input).
    Degrees { degrees: Vec<u32> },
    /// Exponent list, with the first offending position when refuted.
    Exponents { exponents: Vec<u32>, position: Option<usize> },
    /// A monomial with a non-real coefficient.
    Coefficient { exponent: Vec<u32>, value: Complex64 },
    /// Certified lower bound for `|F|` on the real unit sphere, and the
    /// smallest value seen at a sample point.
    LowerBound { bound: f64, best_sample: f64, boxes: usize },
    /// A point violating the property and the size of the violation there.
    Witness { point: Vec<Complex64>, value: f64 },
    /// Bit length of a nonzero exact Macaulay determinant of the gradient.
    Determinant { bits: u64, size: usize },
    /// Free-form reason.
    Note { reason: String },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub epsilon: Option<f64>,
    pub max_depth: Option<u32>,
    pub max_boxes: Option<usize>,
    pub seed: Option<u64>,
    pub starts: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub property: Property,
    pub status: Status,
    pub evidence: Evidence,
    #[serde(default)]
    pub parameters: Parameters,
    /// Properties implied by this one when certified.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub implies: Vec<Property>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl Certificate {
    pub fn new(property: Property, status: Status, evidence: Evidence) -> Self {
        Certificate { property, status, evidence, parameters: Parameters::default(), implies: Vec::new(), note: String::new() }
    }

    pub fn is_certified(&self) -> bool {
        self.status == Status::Certified
    }

    pub fn is_refuted(&self) -> bool {
        self.status == Status::Refuted
    }

    pub fn bound(&self) -> Option<f64> {
        match self.evidence {
            Evidence::LowerBound { bound, .. } => Some(bound),
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<&[Complex64]> {
        match &self.evidence {
            Evidence::Witness { point, .. } => Some(point),
            _ => None,
        }
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let ev = match &self.evidence {
            Evidence::Degree { degree } => format!("degree {degree}"),
            Evidence::Degrees { degrees } => format!("degrees {degrees:?}"),
            Evidence::Exponents { exponents, position: Some(p) } => format!("exponents {exponents:?}, fails at {p}"),
            Evidence::Exponents { exponents, .. } => format!("exponents {exponents:?}"),
            Evidence::Coefficient { exponent, value } => format!("non-real coefficient {value} at {exponent:?}"),
            Evidence::LowerBound { bound, best_sample, boxes } => {
                format!("lower bound {bound:.6} (best sample {best_sample:.6}, {boxes} boxes)")
            }
            Evidence::Witness { point, value } => format!("witness {point:?} with value {value:e}"),
            Evidence::Determinant { bits, size } => format!("nonzero {size}x{size} Macaulay determinant ({bits} bits)"),
            Evidence::Note { reason } => reason.clone(),
        };
        format!("{}: {} ({ev})", self.property.as_str(), self.status.as_str())
    }
}

fn degrees(f: &SparsePoly) -> Vec<u32> {
    let mut d: Vec<u32> = f.terms().map(|(e, _)| e.iter().sum()).collect();
    d.sort_unstable();
    d.dedup();
    d
}

/// Certified iff every term has the same even total degree.
pub fn check_even_homogeneous(f: &SparsePoly) -> Certificate {
    let p = Property::EvenHomogeneous;
    match degrees(f).as_slice() {
        [] => Certificate::new(p, Status::Refuted, Evidence::Note { reason: "zero polynomial".into() }),
        [d] if d % 2 == 0 && *d > 0 => Certificate::new(p, Status::Certified, Evidence::Degree { degree: *d }),
        [d] => Certificate::new(p, Status::Refuted, Evidence::Degree { degree: *d }),
        ds => Certificate::new(p, Status::Refuted, Evidence::Degrees { degrees: ds.to_vec() }),
    }
}

/// Certified iff the exponents are positive and strictly decreasing.
pub fn check_strict_exponents(exps: &[u32]) -> Certificate {
    let p = Property::StrictExponents;
    let bad = if exps.is_empty() {
        Some(0)
    } else {
        (0..exps.len()).find(|&i| exps[i] == 0 || (i > 0 && exps[i] >= exps[i - 1]))
    };
    let status = if bad.is_some() { Status::Refuted } else { Status::Certified };
    Certificate::new(p, status, Evidence::Exponents { exponents: exps.to_vec(), position: bad })
}

/// Certified iff the coefficients are real and all terms share one odd degree.
pub fn check_odd_homogeneous(g: &OddGauge) -> Certificate {
    let p = Property::OddHomogeneous;
    if let Some((e, c)) = g.g.terms().find(|(_, c)| c.im != 0.0) {
        return Certificate::new(p, Status::Refuted, Evidence::Coefficient { exponent: e.to_vec(), value: c });
    }
    match degrees(&g.g).as_slice() {
        [] => Certificate::new(p, Status::Refuted, Evidence::Note { reason: "zero polynomial".into() }),
        [d] if d % 2 == 1 => Certificate::new(p, Status::Certified, Evidence::Degree { degree: *d }),
        [d] => Certificate::new(p, Status::Refuted, Evidence::Degree { degree: *d }),
        ds => Certificate::new(p, Status::Refuted, Evidence::Degrees { degrees: ds.to_vec() }),
    }
}

/// The no-lines/no-conics hypothesis for surfaces (four or more variables).
pub fn check_no_lines_conics(f: &SparsePoly) -> Certificate {
    Certificate::new(
        Property::NoLinesConics,
        Status::Unsupported,
        Evidence::Note {
            reason: format!(
                "no algorithm for lines and conics on a surface in {} variables; rely on the construction of F",
                f.nvars()
            ),
        },
    )
}

/// Every hypothesis check applicable to a fixing system.
///
/// Plane curves (`n = 3`) get a smoothness certificate, which implies the
/// absence of lines and conics when the degree is at least 3; for `n >= 4`
/// that hypothesis is reported as unsupported.
pub fn preflight(fs: &FixingSystem, epsilon: f64, max_depth: u32) -> Result<Vec<Certificate>> {
    let mut out = vec![check_even_homogeneous(fs.f()), check_strict_exponents(fs.h_exponents())];
    out.push(check_no_real_points(fs.f(), epsilon, max_depth)?);
    match fs.n() {
        3 => out.push(check_plane_smooth(fs.f())?),
        n if n >= 4 => out.push(check_no_lines_conics(fs.f())),
        _ => {}
    }
    Ok(out)
}
