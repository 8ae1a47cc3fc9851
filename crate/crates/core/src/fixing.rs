//! Fixing functions: the plane Astrelin function, the space pair `(F, H)` and
//! its pullback to SU(2), and the odd-degree homogeneous alternative `g`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::certify;
use crate::error::{Error, Result};
use crate::geometry::{project_xy, PointSystem, Spin};
use crate::poly::{BivariatePoly, SparsePoly};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

// ---------------------------------------------------------------------------
// Compensated arithmetic for the high Astrelin powers.

#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    const ONE: DoubleDouble = DoubleDouble { hi: 1.0, lo: 0.0 };
    const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };

    fn from_product(a: f64, b: f64) -> Self {
        let (hi, lo) = two_prod(a, b);
        DoubleDouble { hi, lo }
    }

    fn mul(self, o: DoubleDouble) -> DoubleDouble {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = two_sum(p, e);
        DoubleDouble { hi, lo }
    }

    fn add(self, o: DoubleDouble) -> DoubleDouble {
        let (s, e) = two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = two_sum(s, e);
        DoubleDouble { hi, lo }
    }

    fn powu(self, mut e: u32) -> DoubleDouble {
        let mut base = self;
        let mut acc = DoubleDouble::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(base);
            }
        }
        acc
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// Astrelin function on flat plane coordinates `(x1, y1, ..., xn, yn)`:
/// `sum_k (x_k y_k)^(2k-1)`, evaluated in double-double arithmetic.
pub(crate) fn astrelin_flat(coords: &[f64]) -> Result<f64> {
    let mut acc = DoubleDouble::ZERO;
    for (k, pt) in coords.chunks(2).enumerate() {
        let term = DoubleDouble::from_product(pt[0], pt[1]).powu(2 * k as u32 + 1);
        if !term.hi.is_finite() {
            return Err(Error::Overflow { index: k });
        }
        acc = acc.add(term);
    }
    let v = acc.value();
    if !v.is_finite() {
        return Err(Error::Overflow { index: coords.len() / 2 });
    }
    Ok(v)
}

/// Gradient of the Astrelin function on flat plane coordinates.
pub(crate) fn astrelin_gradient_flat(coords: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; coords.len()];
    for (k, pt) in coords.chunks(2).enumerate() {
        let e = 2 * k as i32 + 1;
        let f = e as f64 * (pt[0] * pt[1]).powi(e - 1);
        g[2 * k] = f * pt[1];
        g[2 * k + 1] = f * pt[0];
    }
    g
}

/// `A = (x_n y_n)^(2n-1) + ... + (x_2 y_2)^3 + x_1 y_1`.
pub fn astrelin_eval(s: &PointSystem) -> Result<f64> {
    if s.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: s.dim() });
    }
    astrelin_flat(&s.flat())
}

/// A real trigonometric polynomial stored by its complex exponential coefficients
/// `c_m`, `m = -M..=M`, with `c_{-m} = conj(c_m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    max_order: usize,
    coeffs: Vec<Complex64>,
}

impl TrigPoly {
    pub fn zero(max_order: usize) -> Self {
        TrigPoly { max_order, coeffs: vec![ZERO; 2 * max_order + 1] }
    }

    /// Builds from `c_m` for `m = -M..=M`.
    pub fn from_exponential(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(Error::InvalidPolynomial("need 2M + 1 coefficients".into()));
        }
        Ok(TrigPoly { max_order: coeffs.len() / 2, coeffs })
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Coefficient of `e^{i m theta}`.
    pub fn coefficient(&self, m: i64) -> Complex64 {
        let idx = m + self.max_order as i64;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            ZERO
        } else {
            self.coeffs[idx as usize]
        }
    }

    fn coefficient_mut(&mut self, m: i64) -> &mut Complex64 {
        &mut self.coeffs[(m + self.max_order as i64) as usize]
    }

    /// Highest order with a nonzero coefficient.
    pub fn degree(&self) -> usize {
        (0..=self.max_order).rev().find(|&m| self.coefficient(m as i64) != ZERO).unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `(a_m, b_m)` with `A = a_0/2 + sum a_m cos(m theta) + b_m sin(m theta)`.
    pub fn cos_sin(&self, m: usize) -> (f64, f64) {
        let z = 2.0 * self.coefficient(-(m as i64));
        (z.re, z.im)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let m = self.max_order as i64;
        let mut acc = self.coefficient(0).re;
        for k in 1..=m {
            let e = Complex64::from_polar(1.0, k as f64 * theta);
            acc += 2.0 * (self.coefficient(k) * e).re;
        }
        acc
    }

    pub fn derivative(&self) -> TrigPoly {
        let m = self.max_order as i64;
        let coeffs = (-m..=m).map(|k| self.coefficient(k) * Complex64::new(0.0, k as f64)).collect();
        TrigPoly { max_order: self.max_order, coeffs }
    }

    /// Coefficients of `z^D * A(z)` in ascending powers, `D = degree()`.
    pub fn to_z_polynomial(&self) -> Vec<Complex64> {
        let d = self.degree() as i64;
        (-d..=d).map(|k| self.coefficient(k)).collect()
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// The Astrelin function restricted to the SO(2) orbit, as a trig polynomial in
/// the rotation angle. Point `k` contributes `(gamma_k e^{2i theta} + conj(gamma_k) e^{-2i theta})^(2k-1)`
/// with `gamma = (xy - i (x^2 - y^2)/2) / 2`.
pub fn astrelin_orbit_series(s: &PointSystem) -> Result<TrigPoly> {
    if s.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: s.dim() });
    }
    let n = s.len();
    let mut out = TrigPoly::zero(4 * n - 2);
    for (k, p) in s.points().iter().enumerate() {
        let gamma = orbit_gamma(p[0], p[1]);
        if gamma == ZERO {
            continue;
        }
        let e = 2 * k as u32 + 1;
        let gbar = gamma.conj();
        for j in 0..=e {
            let c = binomial(e, j) * gamma.powu(j) * gbar.powu(e - j);
            *out.coefficient_mut(4 * j as i64 - 2 * e as i64) += c;
        }
    }
    Ok(out)
}

pub(crate) fn orbit_gamma(x: f64, y: f64) -> Complex64 {
    let alpha = x * y;
    let beta = 0.5 * (x * x - y * y);
    Complex64::new(alpha, -beta) / 2.0
}

// ---------------------------------------------------------------------------
// Space fixing systems.

/// `w_1^{2d} + ... + w_n^{2d}`.
pub fn make_fermat(n: usize, half_degree: u32) -> Result<SparsePoly> {
    if n == 0 || half_degree == 0 {
        return Err(Error::Precondition("Fermat polynomial needs n >= 1 and d >= 1".into()));
    }
    SparsePoly::from_terms(
        n,
        (0..n).map(|j| {
            let mut e = vec![0; n];
            e[j] = 2 * half_degree;
            (e, Complex64::new(1.0, 0.0))
        }),
    )
}

/// `H = w_1^{p_1} + ... + w_n^{p_n}`.
pub fn h_polynomial(exponents: &[u32]) -> Result<SparsePoly> {
    let n = exponents.len();
    SparsePoly::from_terms(
        n,
        exponents.iter().enumerate().map(|(j, &p)| {
            let mut e = vec![0; n];
            e[j] = p;
            (e, Complex64::new(1.0, 0.0))
        }),
    )
}

/// A validated pair `(F, H)`: `F` homogeneous of even degree `2d` in `n`
/// variables, `H = sum w_j^{p_j}` with `p_1 > ... > p_n > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFixingSystem", into = "RawFixingSystem")]
pub struct FixingSystem {
    f: SparsePoly,
    h_exponents: Vec<u32>,
    h: SparsePoly,
    half_degree: u32,
    provenance: String,
}

#[derive(Serialize, Deserialize)]
struct RawFixingSystem {
    n: usize,
    #[serde(rename = "F")]
    f: SparsePoly,
    #[serde(rename = "H_exponents")]
    h_exponents: Vec<u32>,
    #[serde(default)]
    provenance: String,
}

impl TryFrom<RawFixingSystem> for FixingSystem {
    type Error = Error;

    fn try_from(raw: RawFixingSystem) -> Result<Self> {
        if raw.n != raw.f.nvars() {
            return Err(Error::DimensionMismatch { expected: raw.n, found: raw.f.nvars() });
        }
        FixingSystem::new(raw.f, raw.h_exponents, raw.provenance)
    }
}

impl From<FixingSystem> for RawFixingSystem {
    fn from(fs: FixingSystem) -> Self {
        RawFixingSystem { n: fs.f.nvars(), f: fs.f, h_exponents: fs.h_exponents, provenance: fs.provenance }
    }
}

impl FixingSystem {
    pub fn new(f: SparsePoly, h_exponents: Vec<u32>, provenance: impl Into<String>) -> Result<Self> {
        if h_exponents.len() != f.nvars() {
            return Err(Error::DimensionMismatch { expected: f.nvars(), found: h_exponents.len() });
        }
        let even = certify::check_even_homogeneous(&f);
        if !even.is_certified() {
            return Err(Error::InvalidPolynomial(format!("F must be homogeneous of even degree: {}", even.summary())));
        }
        let strict = certify::check_strict_exponents(&h_exponents);
        if !strict.is_certified() {
            return Err(Error::InvalidPolynomial(format!(
                "H exponents must be strictly decreasing positive integers: {}",
                strict.summary()
            )));
        }
        let half_degree = f.homogeneous_degree().expect("checked above") / 2;
        let h = h_polynomial(&h_exponents)?;
        Ok(FixingSystem { f, h_exponents, h, half_degree, provenance: provenance.into() })
    }

    pub fn n(&self) -> usize {
        self.f.nvars()
    }

    pub fn f(&self) -> &SparsePoly {
        &self.f
    }

    pub fn h(&self) -> &SparsePoly {
        &self.h
    }

    pub fn h_exponents(&self) -> &[u32] {
        &self.h_exponents
    }

    /// `d`, half the degree of `F`.
    pub fn half_degree(&self) -> u32 {
        self.half_degree
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// `(Re F, Im F, Im H)` at the projections `w`.
    pub fn values_at(&self, w: &[Complex64]) -> [f64; 3] {
        let fv = self.f.eval(w);
        let hv = self.h.eval(w);
        [fv.re, fv.im, hv.im]
    }

    /// `(Re F, Im F, Im H)` of an (unrotated) space system.
    pub fn values(&self, s: &PointSystem) -> Result<[f64; 3]> {
        if s.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: s.len() });
        }
        Ok(self.values_at(&s.complex_xy()))
    }

    /// Magnitude scales `(|F|, |F|, |H|)` for systems of the given radius.
    pub fn scales(&self, radius: f64) -> [f64; 3] {
        let fs = self.f.magnitude_bound(radius).max(1.0);
        let hs = self.h.magnitude_bound(radius).max(1.0);
        [fs, fs, hs]
    }
}

/// Which isometry group the fixing system must handle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixingGroup {
    RotationsOnly,
    /// Rotations plus translations; the center of mass is fixed separately.
    FullIsometry,
}

pub const CATALOG_IDS: [&str; 3] = ["fermat-n3", "fermat-n4-fullgroup", "vanluijk-stub"];

const VAN_LUIJK_MISSING: &str = "cubics f1, f2 and quadrics g1, g2 of the van Luijk quartic family, plus the Fermat weight N";

/// Built-in fixing systems for small point counts.
pub fn catalog_fixing(n: usize, group: FixingGroup) -> Result<FixingSystem> {
    match (n, group) {
        (1, _) => FixingSystem::new(make_fermat(1, 1)?, vec![1], "builtin: n=1 (w1^2, w1)"),
        (2, _) => FixingSystem::new(make_fermat(2, 1)?, vec![2, 1], "builtin: n=2 (w1^2 + w2^2)"),
        (3, _) => catalog_by_id("fermat-n3"),
        (4, FixingGroup::FullIsometry) => catalog_by_id("fermat-n4-fullgroup"),
        (4, FixingGroup::RotationsOnly) | (5, FixingGroup::FullIsometry) => catalog_by_id("vanluijk-stub"),
        _ => Err(Error::UnsupportedCount {
            n,
            group: match group {
                FixingGroup::RotationsOnly => "rotations-only".into(),
                FixingGroup::FullIsometry => "full-isometry".into(),
            },
        }),
    }
}

/// Looks up a catalog entry by id.
pub fn catalog_by_id(id: &str) -> Result<FixingSystem> {
    match id {
        "fermat-n3" => FixingSystem::new(make_fermat(3, 2)?, vec![3, 2, 1], "fermat-n3"),
        "fermat-n4-fullgroup" => FixingSystem::new(make_fermat(4, 2)?, vec![4, 3, 2, 1], "fermat-n4-fullgroup"),
        "vanluijk-stub" => Err(Error::StubRequiresCoefficients { id: id.into(), missing: VAN_LUIJK_MISSING.into() }),
        other => Err(Error::Parse(format!("unknown catalog id `{other}` (known: {})", CATALOG_IDS.join(", ")))),
    }
}

/// User-supplied pieces of a van Luijk quartic `w4 f1 + 2 w3 f2 - 3 g1 g2 - 6h`
/// in the variables `w1..w4`, with `h = -N * (sum of fourth powers)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VanLuijkData {
    pub f1: SparsePoly,
    pub f2: SparsePoly,
    pub g1: SparsePoly,
    pub g2: SparsePoly,
    /// The Fermat weight `N`; never chosen by the library.
    pub fermat_weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VanLuijkVariant {
    /// Four points, rotations only.
    FourPoints,
    /// Five points, full isometry group (center of mass fixed).
    FivePointsFullGroup,
}

/// Assembles a van Luijk fixing system and confirms the no-real-points
/// hypothesis for the chosen weight.
pub fn van_luijk_fixing(
    data: &VanLuijkData,
    variant: VanLuijkVariant,
    epsilon: f64,
    max_depth: u32,
) -> Result<FixingSystem> {
    for (name, p, deg) in [("f1", &data.f1, 3), ("f2", &data.f2, 3), ("g1", &data.g1, 2), ("g2", &data.g2, 2)] {
        if p.nvars() != 4 || p.homogeneous_degree() != Some(deg) {
            return Err(Error::InvalidPolynomial(format!(
                "{name} must be homogeneous of degree {deg} in 4 variables"
            )));
        }
    }
    let n = match variant {
        VanLuijkVariant::FourPoints => 4,
        VanLuijkVariant::FivePointsFullGroup => 5,
    };
    let lift = |p: &SparsePoly| -> Result<SparsePoly> {
        SparsePoly::from_terms(
            n,
            p.terms().map(|(e, c)| {
                let mut v = e.to_vec();
                v.resize(n, 0);
                (v, c)
            }),
        )
    };
    let one = Complex64::new(1.0, 0.0);
    let w3 = SparsePoly::monomial(n, 2, 1, one);
    let w4 = SparsePoly::monomial(n, 3, 1, one);
    let h = make_fermat(n, 2)?.scale(Complex64::new(-data.fermat_weight, 0.0));
    let f = w4
        .mul(&lift(&data.f1)?)?
        .add(&w3.mul(&lift(&data.f2)?)?.scale(2.0 * one))?
        .sub(&lift(&data.g1)?.mul(&lift(&data.g2)?)?.scale(3.0 * one))?
        .sub(&h.scale(6.0 * one))?;

    let to_check = match variant {
        VanLuijkVariant::FourPoints => f.clone(),
        VanLuijkVariant::FivePointsFullGroup => {
            // w5 = -(w1 + w2 + w3 + w4) on the center-of-mass hyperplane
            let mut m: Vec<Vec<Complex64>> = (0..4)
                .map(|j| (0..4).map(|k| if j == k { one } else { ZERO }).collect())
                .collect();
            m.push(vec![-one; 4]);
            f.linear_substitution(&m)?
        }
    };
    let cert = certify::check_no_real_points(&to_check, epsilon, max_depth)?;
    if !cert.is_certified() {
        return Err(Error::CertificationFailed(format!(
            "no-real-points not confirmed for N = {}: {}",
            data.fermat_weight,
            cert.summary()
        )));
    }
    let exps = (1..=n as u32).rev().collect();
    FixingSystem::new(f, exps, format!("van Luijk quartic, N = {}", data.fermat_weight))
}

/// The quadratic forms `w_j(alpha, beta) = c_j alpha^2 - 2 z_j alpha beta - conj(c_j) beta^2`.
pub fn projection_forms(s: &PointSystem) -> Result<Vec<BivariatePoly>> {
    if s.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: s.dim() });
    }
    s.points()
        .iter()
        .map(|p| {
            let c = Complex64::new(p[0], p[1]);
            BivariatePoly::from_terms([
                ((2, 0), c),
                ((1, 1), Complex64::new(-2.0 * p[2], 0.0)),
                ((0, 2), -c.conj()),
            ])
            .with_homogeneous(2)
        })
        .collect()
}

/// Substitutes the projection forms into a polynomial in `w_1..w_n`.
///
/// The result is flagged homogeneous of degree `2D` when the input is homogeneous of degree `D`.
pub fn pullback_su2(p: &SparsePoly, s: &PointSystem) -> Result<BivariatePoly> {
    let forms = projection_forms(s)?;
    if p.nvars() != forms.len() {
        return Err(Error::DimensionMismatch { expected: forms.len(), found: p.nvars() });
    }
    let one = BivariatePoly::constant(Complex64::new(1.0, 0.0));
    let mut powers: Vec<Vec<BivariatePoly>> = forms.iter().map(|_| vec![one.clone()]).collect();
    let mut out = BivariatePoly::zero();
    for (e, c) in p.terms() {
        let mut t = BivariatePoly::constant(c);
        for (j, &x) in e.iter().enumerate() {
            while powers[j].len() <= x as usize {
                let next = powers[j].last().unwrap().mul(&forms[j]);
                powers[j].push(next);
            }
            if x > 0 {
                t = t.mul(&powers[j][x as usize]);
            }
        }
        out = out.add(&t);
    }
    match p.homogeneous_degree() {
        Some(d) => out.with_homogeneous(2 * d),
        None => Ok(out),
    }
}

/// Pullback of `H = sum w_j^{p_j}`.
pub fn pullback_h(exponents: &[u32], s: &PointSystem) -> Result<BivariatePoly> {
    pullback_su2(&h_polynomial(exponents)?, s)
}

/// A real polynomial `g(x1, y1, ..., xn, yn)`; valid when homogeneous of odd degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OddGauge {
    pub g: SparsePoly,
}

impl OddGauge {
    /// Wraps a polynomial in `2n` variables. Validity is checked separately.
    pub fn new(g: SparsePoly) -> Result<Self> {
        if g.nvars() % 2 != 0 {
            return Err(Error::InvalidPolynomial(format!(
                "odd gauge needs an even number of variables (x_j, y_j), got {}",
                g.nvars()
            )));
        }
        Ok(OddGauge { g })
    }

    pub fn n_points(&self) -> usize {
        self.g.nvars() / 2
    }

    pub fn degree(&self) -> Option<u32> {
        self.g.homogeneous_degree()
    }

    pub fn is_valid(&self) -> bool {
        certify::check_odd_homogeneous(self).is_certified()
    }
}

/// Evaluates `g` on `(Re w_j, Im w_j)` of the rotated projections.
pub fn odd_g_eval(g: &OddGauge, s: &PointSystem, q: &Spin) -> Result<f64> {
    if !g.is_valid() {
        return Err(Error::Precondition("g must be a real homogeneous polynomial of odd degree".into()));
    }
    if s.len() != g.n_points() {
        return Err(Error::DimensionMismatch { expected: g.n_points(), found: s.len() });
    }
    let w = project_xy(q, s)?;
    let xs: Vec<f64> = w.iter().flat_map(|z| [z.re, z.im]).collect();
    Ok(g.g.eval_real(&xs).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{rotate_plane_by, Spin};
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn square() -> PointSystem {
        PointSystem::plane(&[[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]).unwrap()
    }

    #[test]
    fn astrelin_examples() {
        assert_eq!(astrelin_eval(&square()).unwrap(), 0.0);
        assert_eq!(astrelin_eval(&PointSystem::plane(&[[1.0, 1.0]]).unwrap()).unwrap(), 1.0);
        let two = PointSystem::plane(&[[1.0, 2.0], [3.0, 1.0]]).unwrap();
        assert_eq!(astrelin_eval(&two).unwrap(), 29.0);
    }

    #[test]
    fn astrelin_overflow_is_reported() {
        let s = PointSystem::plane(&[[0.0, 0.0], [1e60, 1e60]]).unwrap();
        assert_eq!(astrelin_eval(&s), Err(Error::Overflow { index: 1 }));
    }

    #[test]
    fn compensated_power_beats_naive_rounding() {
        // (1 + 2^-30)^63 computed in double-double vs exact binomial expansion
        let x = 1.0 + 2f64.powi(-30);
        let dd = DoubleDouble { hi: x, lo: 0.0 }.powu(63).value();
        let exact: f64 = (0..=63).map(|k| binomial(63, k) * 2f64.powi(-30 * k as i32)).sum();
        assert!((dd - exact).abs() <= f64::EPSILON * exact);
    }

    #[test]
    fn orbit_series_single_point() {
        let s = PointSystem::plane(&[[1.0, 0.0]]).unwrap();
        let a = astrelin_orbit_series(&s).unwrap();
        for i in 0..50 {
            let t = 0.13 * i as f64;
            assert!((a.eval(t) - 0.5 * (2.0 * t).sin()).abs() < 1e-15);
        }
        let origin = PointSystem::plane(&[[0.0, 0.0], [0.0, 0.0]]).unwrap();
        assert!(astrelin_orbit_series(&origin).unwrap().is_zero());
    }

    #[test]
    fn orbit_series_square_matches_closed_form() {
        let a = astrelin_orbit_series(&square()).unwrap();
        for i in 0..100 {
            let t = 0.0731 * i as f64;
            let s2 = (2.0 * t).sin();
            let closed = 0.5 * s2 - s2.powi(3) / 8.0 + s2.powi(5) / 32.0 - s2.powi(7) / 128.0;
            assert!((a.eval(t) - closed).abs() < 1e-14);
        }
        assert_eq!(a.degree(), 14);
    }

    #[test]
    fn orbit_series_agrees_with_rotation() {
        let s = PointSystem::plane(&[[0.7, -1.1], [0.2, 0.9], [-1.3, 0.4]]).unwrap();
        let a = astrelin_orbit_series(&s).unwrap();
        for i in 0..100 {
            let t = 0.0628 * i as f64;
            let direct = astrelin_eval(&rotate_plane_by(&s, t)).unwrap();
            assert!((a.eval(t) - direct).abs() < 1e-11 * (1.0 + a.scale()));
        }
    }

    #[test]
    fn fermat_examples() {
        let f = make_fermat(3, 2).unwrap();
        assert_eq!(f.num_terms(), 3);
        assert_eq!(f.coefficient(&[0, 4, 0]), c(1.0, 0.0));
        assert_eq!(f.homogeneous_degree(), Some(4));
        let f = make_fermat(1, 1).unwrap();
        assert_eq!(f.coefficient(&[2]), c(1.0, 0.0));
        assert_eq!(make_fermat(4, 2).unwrap().num_terms(), 4);
        assert!(make_fermat(0, 1).is_err());
    }

    #[test]
    fn catalog_entries() {
        let fs = catalog_fixing(3, FixingGroup::RotationsOnly).unwrap();
        assert_eq!(fs.h_exponents(), &[3, 2, 1]);
        assert_eq!(fs.f(), &make_fermat(3, 2).unwrap());
        let fs = catalog_fixing(4, FixingGroup::FullIsometry).unwrap();
        assert_eq!(fs.h_exponents(), &[4, 3, 2, 1]);
        assert_eq!(fs.half_degree(), 2);
        match catalog_fixing(4, FixingGroup::RotationsOnly) {
            Err(Error::StubRequiresCoefficients { id, missing }) => {
                assert_eq!(id, "vanluijk-stub");
                assert!(missing.contains("f1"));
            }
            other => panic!("expected stub error, got {other:?}"),
        }
        assert!(matches!(
            catalog_fixing(5, FixingGroup::FullIsometry),
            Err(Error::StubRequiresCoefficients { .. })
        ));
        assert!(matches!(catalog_fixing(7, FixingGroup::RotationsOnly), Err(Error::UnsupportedCount { .. })));
        assert!(catalog_by_id("nope").is_err());
    }

    #[test]
    fn fixing_system_validation() {
        let odd = SparsePoly::from_real_terms(2, &[(&[3, 0], 1.0), (&[0, 3], 1.0)]).unwrap();
        assert!(FixingSystem::new(odd, vec![2, 1], "x").is_err());
        assert!(FixingSystem::new(make_fermat(3, 2).unwrap(), vec![3, 3, 1], "x").is_err());
        assert!(FixingSystem::new(make_fermat(3, 2).unwrap(), vec![2, 1], "x").is_err());
    }

    #[test]
    fn fixing_system_json() {
        let fs = catalog_by_id("fermat-n3").unwrap();
        let text = serde_json::to_string(&fs).unwrap();
        assert!(text.starts_with(r#"{"n":3,"F":{"nvars":3,"terms":["#));
        assert!(text.contains(r#""H_exponents":[3,2,1]"#));
        let back: FixingSystem = serde_json::from_str(&text).unwrap();
        assert_eq!(back, fs);
    }

    #[test]
    fn pullback_single_pole() {
        let s = PointSystem::space(&[[0.0, 0.0, 1.0]]).unwrap();
        let ft = pullback_su2(&make_fermat(1, 1).unwrap(), &s).unwrap();
        assert_eq!(ft.homogeneous_degree(), Some(4));
        assert_eq!(ft.terms().count(), 1);
        assert!((ft.coefficient(2, 2) - c(4.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pullback_axis_is_pure_alpha_beta_power() {
        let zs = [1.0, -0.5, 2.0];
        let s = PointSystem::space(&zs.map(|z| [0.0, 0.0, z])).unwrap();
        let ft = pullback_su2(&make_fermat(3, 2).unwrap(), &s).unwrap();
        let cexp = 16.0 * zs.iter().map(|z| z.powi(4)).sum::<f64>();
        assert!((ft.coefficient(4, 4) - c(cexp, 0.0)).norm() < 1e-12);
        assert_eq!(ft.terms().count(), 1);
        let origin = PointSystem::space(&[[0.0; 3]; 3]).unwrap();
        assert!(pullback_su2(&make_fermat(3, 2).unwrap(), &origin).unwrap().is_zero());
        let plane = PointSystem::plane(&[[1.0, 0.0]]).unwrap();
        assert!(pullback_su2(&make_fermat(1, 1).unwrap(), &plane).is_err());
    }

    #[test]
    fn pullback_h_degree_bands() {
        let s = PointSystem::space(&[[0.3, 0.1, -0.7], [1.0, -0.4, 0.2], [-0.6, 0.5, 0.9]]).unwrap();
        let ht = pullback_h(&[3, 2, 1], &s).unwrap();
        assert_eq!(ht.degrees(), vec![2, 4, 6]);
        assert_eq!(ht.homogeneous_degree(), None);
    }

    #[test]
    fn odd_gauge_examples() {
        let s = PointSystem::space(&[[1.0, 0.0, 0.0]]).unwrap();
        let g1 = OddGauge::new(SparsePoly::from_real_terms(2, &[(&[1, 0], 1.0)]).unwrap()).unwrap();
        assert_eq!(odd_g_eval(&g1, &s, &Spin::identity()).unwrap(), 1.0);
        let g3 = OddGauge::new(SparsePoly::from_real_terms(2, &[(&[3, 0], 1.0)]).unwrap()).unwrap();
        assert_eq!(odd_g_eval(&g3, &s, &Spin::identity()).unwrap(), 1.0);
        let g2 = OddGauge::new(SparsePoly::from_real_terms(2, &[(&[2, 0], 1.0)]).unwrap()).unwrap();
        assert!(odd_g_eval(&g2, &s, &Spin::identity()).is_err());
    }

    #[test]
    fn odd_gauge_matches_composition() {
        let g = OddGauge::new(SparsePoly::from_real_terms(2, &[(&[1, 2], 1.0), (&[3, 0], 1.0)]).unwrap()).unwrap();
        let s = PointSystem::space(&[[0.4, -1.2, 0.8]]).unwrap();
        let q = Spin::normalized(c(0.3, -0.2), c(0.5, 0.7)).unwrap();
        let p = crate::geometry::spin_to_rotation(&q).unwrap().apply(s.points()[0]);
        let brute = p[0] * p[1] * p[1] + p[0].powi(3);
        assert!((odd_g_eval(&g, &s, &q).unwrap() - brute).abs() < 1e-13);
    }

    #[test]
    fn quarter_turn_flips_astrelin_sign() {
        let s = PointSystem::plane(&[[0.8, 0.3], [-0.2, 1.1], [0.5, -0.9]]).unwrap();
        let a = astrelin_eval(&s).unwrap();
        let b = astrelin_eval(&rotate_plane_by(&s, FRAC_PI_2)).unwrap();
        assert!((a + b).abs() < 1e-14 * (1.0 + a.abs()));
    }
}
