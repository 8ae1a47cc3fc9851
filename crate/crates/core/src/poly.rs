//! Sparse complex polynomials: multivariate (exponent tuple -> coefficient)
//! and bivariate in the spin variables `(alpha, beta)`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A multivariate polynomial with complex coefficients. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSparsePoly", into = "RawSparsePoly")]
pub struct SparsePoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Complex64>,
}

#[derive(Serialize, Deserialize)]
struct RawTerm {
    exp: Vec<u32>,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct RawSparsePoly {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nvars: Option<usize>,
    terms: Vec<RawTerm>,
}

impl TryFrom<RawSparsePoly> for SparsePoly {
    type Error = Error;

    fn try_from(raw: RawSparsePoly) -> Result<Self> {
        let nvars = match (raw.nvars, raw.terms.first()) {
            (Some(n), _) => n,
            (None, Some(t)) => t.exp.len(),
            (None, None) => {
                return Err(Error::InvalidPolynomial("cannot infer nvars of an empty polynomial".into()))
            }
        };
        SparsePoly::from_terms(
            nvars,
            raw.terms.into_iter().map(|t| (t.exp, Complex64::new(t.re, t.im))),
        )
    }
}

impl From<SparsePoly> for RawSparsePoly {
    fn from(p: SparsePoly) -> Self {
        RawSparsePoly {
            nvars: Some(p.nvars),
            terms: p
                .terms
                .into_iter()
                .map(|(exp, c)| RawTerm { exp, re: c.re, im: c.im })
                .collect(),
        }
    }
}

impl SparsePoly {
    pub fn zero(nvars: usize) -> Self {
        SparsePoly { nvars, terms: BTreeMap::new() }
    }

    /// Sums the given terms; repeated exponents accumulate.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Complex64)>,
    {
        if nvars == 0 {
            return Err(Error::InvalidPolynomial("nvars must be positive".into()));
        }
        let mut p = SparsePoly::zero(nvars);
        for (exp, c) in terms {
            if exp.len() != nvars {
                return Err(Error::InvalidPolynomial(format!(
                    "exponent tuple {exp:?} has length {}, expected {nvars}",
                    exp.len()
                )));
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::InvalidPolynomial("non-finite coefficient".into()));
            }
            p.add_term(exp, c);
        }
        Ok(p)
    }

    /// Real-coefficient convenience constructor.
    pub fn from_real_terms(nvars: usize, terms: &[(&[u32], f64)]) -> Result<Self> {
        Self::from_terms(nvars, terms.iter().map(|(e, c)| (e.to_vec(), Complex64::new(*c, 0.0))))
    }

    /// `c * w_var^power`.
    pub fn monomial(nvars: usize, var: usize, power: u32, c: Complex64) -> Self {
        let mut exp = vec![0; nvars];
        exp[var] = power;
        let mut p = SparsePoly::zero(nvars);
        p.add_term(exp, c);
        p
    }

    pub(crate) fn add_term(&mut self, exp: Vec<u32>, c: Complex64) {
        debug_assert_eq!(exp.len(), self.nvars);
        let entry = self.terms.entry(exp.clone()).or_insert(ZERO);
        *entry += c;
        if *entry == ZERO {
            self.terms.remove(&exp);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], Complex64)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), *c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exp: &[u32]) -> Complex64 {
        self.terms.get(exp).copied().unwrap_or(ZERO)
    }

    /// Largest total degree, `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// The common total degree if every term has the same one.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn has_real_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.im == 0.0)
    }

    /// Sum of coefficient moduli.
    pub fn coefficient_l1(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// Upper bound for `|P(w)|` when every `|w_j| <= radius`.
    pub fn magnitude_bound(&self, radius: f64) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c.norm() * radius.powi(e.iter().sum::<u32>() as i32))
            .sum()
    }

    fn max_exponents(&self) -> Vec<u32> {
        let mut m = vec![0; self.nvars];
        for e in self.terms.keys() {
            for (k, &x) in e.iter().enumerate() {
                m[k] = m[k].max(x);
            }
        }
        m
    }

    pub fn eval(&self, w: &[Complex64]) -> Complex64 {
        assert_eq!(w.len(), self.nvars, "argument length must equal nvars");
        let maxe = self.max_exponents();
        let powers: Vec<Vec<Complex64>> = w
            .iter()
            .zip(&maxe)
            .map(|(&x, &m)| {
                let mut v = Vec::with_capacity(m as usize + 1);
                v.push(ONE);
                for k in 0..m as usize {
                    v.push(v[k] * x);
                }
                v
            })
            .collect();
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter().enumerate().fold(*c, |acc, (k, &x)| if x == 0 { acc } else { acc * powers[k][x as usize] })
            })
            .sum()
    }

    pub fn eval_real(&self, x: &[f64]) -> Complex64 {
        let w: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.eval(&w)
    }

    /// Partial derivative with respect to variable `var`.
    pub fn partial(&self, var: usize) -> SparsePoly {
        let mut out = SparsePoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] > 0 {
                let mut ne = e.clone();
                ne[var] -= 1;
                out.add_term(ne, c * e[var] as f64);
            }
        }
        out
    }

    pub fn gradient(&self) -> Vec<SparsePoly> {
        (0..self.nvars).map(|k| self.partial(k)).collect()
    }

    pub fn scale(&self, s: Complex64) -> SparsePoly {
        let mut out = SparsePoly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn add(&self, other: &SparsePoly) -> Result<SparsePoly> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SparsePoly) -> Result<SparsePoly> {
        self.add(&other.scale(-ONE))
    }

    pub fn mul(&self, other: &SparsePoly) -> Result<SparsePoly> {
        self.check_compatible(other)?;
        let mut out = SparsePoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> SparsePoly {
        let mut out = SparsePoly::zero(self.nvars);
        out.add_term(vec![0; self.nvars], ONE);
        for _ in 0..k {
            out = out.mul(self).expect("same nvars");
        }
        out
    }

    /// Substitutes `w_j -> sum_k m[j][k] v_k` (a linear change of variables into `m[0].len()` variables).
    pub fn linear_substitution(&self, m: &[Vec<Complex64>]) -> Result<SparsePoly> {
        if m.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, found: m.len() });
        }
        let nv = m.first().map_or(0, |r| r.len());
        let images: Vec<SparsePoly> = m
            .iter()
            .map(|row| {
                SparsePoly::from_terms(
                    nv,
                    row.iter().enumerate().map(|(k, &c)| {
                        let mut e = vec![0; nv];
                        e[k] = 1;
                        (e, c)
                    }),
                )
            })
            .collect::<Result<_>>()?;
        let mut out = SparsePoly::zero(nv);
        for (e, c) in &self.terms {
            let mut t = SparsePoly::monomial(nv, 0, 0, *c);
            for (j, &x) in e.iter().enumerate() {
                if x > 0 {
                    t = t.mul(&images[j].pow(x))?;
                }
            }
            out = out.add(&t)?;
        }
        Ok(out)
    }

    fn check_compatible(&self, other: &SparsePoly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, found: other.nvars });
        }
        Ok(())
    }
}

/// A polynomial in the spin variables `(alpha, beta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BivariatePoly {
    terms: BTreeMap<(u32, u32), Complex64>,
    /// `Some(D)` when the polynomial is known to be homogeneous of degree `D`.
    homogeneous: Option<u32>,
}

impl BivariatePoly {
    pub fn zero() -> Self {
        BivariatePoly { terms: BTreeMap::new(), homogeneous: None }
    }

    pub fn constant(c: Complex64) -> Self {
        let mut p = BivariatePoly::zero();
        p.add_term(0, 0, c);
        p.homogeneous = Some(0);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), Complex64)>>(terms: I) -> Self {
        let mut p = BivariatePoly::zero();
        for ((i, j), c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    /// Flags the polynomial homogeneous of degree `d`, checking every stored term.
    pub fn with_homogeneous(mut self, d: u32) -> Result<Self> {
        if let Some(&(i, j)) = self.terms.keys().find(|(i, j)| i + j != d) {
            return Err(Error::InvalidPolynomial(format!(
                "term alpha^{i} beta^{j} breaks homogeneity of degree {d}"
            )));
        }
        self.homogeneous = Some(d);
        Ok(self)
    }

    fn add_term(&mut self, i: u32, j: u32, c: Complex64) {
        let e = self.terms.entry((i, j)).or_insert(ZERO);
        *e += c;
        if *e == ZERO {
            self.terms.remove(&(i, j));
        }
    }

    pub fn homogeneous_degree(&self) -> Option<u32> {
        self.homogeneous
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), Complex64)> + '_ {
        self.terms.iter().map(|(k, c)| (*k, *c))
    }

    pub fn coefficient(&self, i: u32, j: u32) -> Complex64 {
        self.terms.get(&(i, j)).copied().unwrap_or(ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Total degrees that occur.
    pub fn degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self.terms.keys().map(|(i, j)| i + j).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn eval(&self, alpha: Complex64, beta: Complex64) -> Complex64 {
        self.terms.iter().map(|(&(i, j), c)| c * alpha.powu(i) * beta.powu(j)).sum()
    }

    pub fn add(&self, other: &BivariatePoly) -> BivariatePoly {
        let mut out = self.clone();
        for (&(i, j), c) in &other.terms {
            out.add_term(i, j, *c);
        }
        out.homogeneous = match (self.homogeneous, other.homogeneous) {
            (Some(a), Some(b)) if a == b => Some(a),
            _ => None,
        };
        out
    }

    pub fn mul(&self, other: &BivariatePoly) -> BivariatePoly {
        let mut out = BivariatePoly::zero();
        for (&(i, j), a) in &self.terms {
            for (&(k, l), b) in &other.terms {
                out.add_term(i + k, j + l, a * b);
            }
        }
        out.homogeneous = match (self.homogeneous, other.homogeneous) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        out
    }

    pub fn scale(&self, s: Complex64) -> BivariatePoly {
        let mut out = BivariatePoly::zero();
        for (&(i, j), c) in &self.terms {
            out.add_term(i, j, c * s);
        }
        out.homogeneous = self.homogeneous;
        out
    }

    /// Coefficients of `g(lambda) = P(lambda * alpha0, lambda * beta0)`, indexed by power of `lambda`.
    pub fn restrict_to_line(&self, alpha0: Complex64, beta0: Complex64) -> Vec<Complex64> {
        let deg = self.terms.keys().map(|(i, j)| i + j).max().unwrap_or(0) as usize;
        let mut g = vec![ZERO; deg + 1];
        for (&(i, j), c) in &self.terms {
            g[(i + j) as usize] += c * alpha0.powu(i) * beta0.powu(j);
        }
        g
    }
}
