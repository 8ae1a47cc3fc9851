//! Branch-and-bound lower bound for `|F|` on the real unit sphere.
//!
//! The sphere is covered by the cube faces `x_i = 1` (enough, since `|F|` is
//! even under `x -> -x`), each centrally projected. On a face box the bound is
//! `min |F| / max |x|^D` with `|F|` enclosed by interval sums of monomials.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{Certificate, Evidence, Parameters, Property, Status};
use crate::error::{Error, Result};
use crate::poly::SparsePoly;

/// Refutation requires a real unit vector with `|F|` at most this.
pub const WITNESS_TOL: f64 = 1e-12;

/// Tuning knobs for the sphere search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereSearch {
    pub epsilon: f64,
    /// Maximum number of bisections along any single coordinate of a box.
    pub max_depth: u32,
    pub max_boxes: usize,
    /// Stop once the certified bound is within this fraction of the best sample.
    pub relative_gap: f64,
    pub max_newton_starts: usize,
}

impl SphereSearch {
    pub fn new(epsilon: f64, max_depth: u32) -> Self {
        SphereSearch { epsilon, max_depth, max_boxes: 400_000, relative_gap: 0.005, max_newton_starts: 200 }
    }
}

#[derive(Debug, Clone, Copy)]
struct Iv {
    lo: f64,
    hi: f64,
}

impl Iv {
    fn point(x: f64) -> Self {
        Iv { lo: x, hi: x }
    }

    fn mul(self, o: Iv) -> Iv {
        let p = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        Iv { lo: p.iter().copied().fold(f64::INFINITY, f64::min), hi: p.iter().copied().fold(f64::NEG_INFINITY, f64::max) }
    }

    fn powu(self, e: u32) -> Iv {
        if e == 0 {
            return Iv::point(1.0);
        }
        let (a, b) = (self.lo.powi(e as i32), self.hi.powi(e as i32));
        if e % 2 == 1 {
            Iv { lo: a, hi: b }
        } else if self.lo >= 0.0 {
            Iv { lo: a, hi: b }
        } else if self.hi <= 0.0 {
            Iv { lo: b, hi: a }
        } else {
            Iv { lo: 0.0, hi: a.max(b) }
        }
    }

    fn add(self, o: Iv) -> Iv {
        Iv { lo: self.lo + o.lo, hi: self.hi + o.hi }
    }

    fn sub(self, o: Iv) -> Iv {
        Iv { lo: self.lo - o.hi, hi: self.hi - o.lo }
    }

    /// Division by an interval of positive numbers.
    fn div_pos(self, o: Iv) -> Iv {
        self.mul(Iv { lo: 1.0 / o.hi, hi: 1.0 / o.lo })
    }

    /// Widens by `eps` on both sides to absorb rounding.
    fn widen(self, eps: f64) -> Iv {
        Iv { lo: self.lo - eps, hi: self.hi + eps }
    }

    fn mag(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    fn mig(self) -> f64 {
        if self.lo > 0.0 {
            self.lo
        } else if self.hi < 0.0 {
            -self.hi
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone)]
struct FaceBox {
    axis: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    splits: Vec<u32>,
    lower: f64,
}

impl PartialEq for FaceBox {
    fn eq(&self, o: &Self) -> bool {
        self.lower == o.lower
    }
}
impl Eq for FaceBox {}
impl PartialOrd for FaceBox {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for FaceBox {
    // min-heap on the lower bound
    fn cmp(&self, o: &Self) -> Ordering {
        o.lower.total_cmp(&self.lower)
    }
}

struct Problem<'a> {
    f: &'a SparsePoly,
    terms: Vec<(Vec<u32>, Complex64)>,
    degree: u32,
    n: usize,
    grad: Vec<SparsePoly>,
    grad_terms: Vec<Vec<(Vec<u32>, Complex64)>>,
}

impl Problem<'_> {
    fn full(&self, axis: usize, u: &[f64]) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.n);
        x.extend_from_slice(&u[..axis]);
        x.push(1.0);
        x.extend_from_slice(&u[axis..]);
        x
    }

    /// Interval enclosure of `(Re p, Im p)` over the box, widened for rounding.
    fn enclose(terms: &[(Vec<u32>, Complex64)], ivs: &[Iv]) -> (Iv, Iv) {
        let (mut re, mut im) = (Iv::point(0.0), Iv::point(0.0));
        let mut slack = 0.0;
        for (e, c) in terms {
            let m = e.iter().zip(ivs).fold(Iv::point(1.0), |acc, (&k, &iv)| acc.mul(iv.powu(k)));
            slack += c.norm() * m.mag();
            re = re.add(m.mul(Iv::point(c.re)));
            im = im.add(m.mul(Iv::point(c.im)));
        }
        (re.widen(1e-13 * slack), im.widen(1e-13 * slack))
    }

    /// Lower bound of `|F(x)| / |x|^D` over a face box: the better of the
    /// natural enclosure and the centered (mean value) form of the ratio.
    fn bound(&self, b: &FaceBox) -> f64 {
        let mut ivs: Vec<Iv> = b.lo.iter().zip(&b.hi).map(|(&l, &h)| Iv { lo: l, hi: h }).collect();
        ivs.insert(b.axis, Iv::point(1.0));
        let (re, im) = Self::enclose(&self.terms, &ivs);
        let squares: Vec<Iv> = b.lo.iter().zip(&b.hi).map(|(&l, &h)| Iv { lo: l, hi: h }.powu(2)).collect();
        let nlo = 1.0 + squares.iter().map(|q| q.lo).sum::<f64>();
        let nhi = 1.0 + squares.iter().map(|q| q.hi).sum::<f64>();
        let half = self.degree as f64 / 2.0;
        let norm = Iv { lo: nlo, hi: nhi };
        let norm_pow = Iv { lo: nlo.powf(half) * (1.0 - 1e-14), hi: nhi.powf(half) * (1.0 + 1e-14) };
        let natural = re.mig().hypot(im.mig()) / norm_pow.hi;

        // R(u) = F(x(u)) / N(u)^(D/2), dR/du_j = (dF/dx_k - D F u_j / N) / N^(D/2)
        let center: Vec<f64> = b.lo.iter().zip(&b.hi).map(|(l, h)| 0.5 * (l + h)).collect();
        let x = self.full(b.axis, &center);
        let fc = self.f.eval_real(&x);
        let nc: f64 = x.iter().map(|v| v * v).sum();
        let scale = nc.powf(half);
        let slack = 1e-13 * self.f.magnitude_bound(nc.sqrt()) / scale;
        let mut cre = Iv::point(fc.re / scale).widen(slack);
        let mut cim = Iv::point(fc.im / scale).widen(slack);
        let d = Iv::point(self.degree as f64);
        for (j, (&l, &h)) in b.lo.iter().zip(&b.hi).enumerate() {
            let k = if j < b.axis { j } else { j + 1 };
            let (gre, gim) = Self::enclose(&self.grad_terms[k], &ivs);
            let uj = ivs[k];
            let factor = d.mul(uj).div_pos(norm);
            let dre = gre.sub(factor.mul(re)).div_pos(norm_pow);
            let dim = gim.sub(factor.mul(im)).div_pos(norm_pow);
            let step = Iv { lo: l - center[j], hi: h - center[j] };
            cre = cre.add(dre.mul(step));
            cim = cim.add(dim.mul(step));
        }
        let centered = cre.mig().hypot(cim.mig());
        natural.max(centered)
    }

    fn value_on_sphere(&self, x: &[f64]) -> (Vec<f64>, f64) {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let y: Vec<f64> = x.iter().map(|v| v / r).collect();
        let v = self.f.eval_real(&y).norm();
        (y, v)
    }

    /// Gauss-Newton on `(Re F, Im F) = 0`, renormalizing onto the sphere after each step.
    fn newton(&self, start: &[f64]) -> (Vec<f64>, f64) {
        let (mut x, mut v) = self.value_on_sphere(start);
        for _ in 0..60 {
            if v <= WITNESS_TOL * 1e-3 {
                break;
            }
            let fv = self.f.eval_real(&x);
            let g: Vec<Complex64> = self.grad.iter().map(|p| p.eval_real(&x)).collect();
            let j = DMatrix::from_fn(2, self.n, |r, k| if r == 0 { g[k].re } else { g[k].im });
            let rhs = DVector::from_vec(vec![fv.re, fv.im]);
            let jjt = &j * j.transpose() + DMatrix::identity(2, 2) * 1e-30;
            let Some(y) = jjt.clone().lu().solve(&rhs).or_else(|| jjt.pseudo_inverse(1e-14).ok().map(|p| p * &rhs)) else {
                break;
            };
            let step = j.transpose() * y;
            let cand: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a - s).collect();
            let (cx, cv) = self.value_on_sphere(&cand);
            if !(cv < v) {
                break;
            }
            x = cx;
            v = cv;
        }
        (x, v)
    }
}

/// `|F|^2 - m^2 |x|^(2D)` as real-coefficient terms, for proving `|F| >= m` on the sphere.
struct LevelProblem {
    square: SparsePoly,
    norm_pow: SparsePoly,
}

impl LevelProblem {
    fn new(f: &SparsePoly, degree: u32) -> Result<Self> {
        let n = f.nvars();
        let part = |g: fn(Complex64) -> f64| {
            SparsePoly::from_terms(n, f.terms().map(|(e, c)| (e.to_vec(), Complex64::new(g(c), 0.0))))
        };
        let (re, im) = (part(|c| c.re)?, part(|c| c.im)?);
        let square = re.mul(&re)?.add(&im.mul(&im)?)?;
        let sum_sq = SparsePoly::from_terms(
            n,
            (0..n).map(|k| {
                let mut e = vec![0; n];
                e[k] = 2;
                (e, Complex64::new(1.0, 0.0))
            }),
        )?;
        Ok(LevelProblem { square, norm_pow: sum_sq.pow(degree) })
    }

    /// Whether `|F| >= m` holds on the whole sphere, by subdividing face boxes
    /// until the interval enclosure of the level polynomial is positive.
    fn certifies(&self, m: f64, max_depth: u32, max_boxes: usize) -> Result<bool> {
        let g = self.square.sub(&self.norm_pow.scale(Complex64::new(m * m, 0.0)))?;
        let terms: Vec<(Vec<u32>, Complex64)> = g.terms().map(|(e, c)| (e.to_vec(), c)).collect();
        let n = g.nvars();
        let mut stack: Vec<FaceBox> = (0..n)
            .map(|axis| FaceBox { axis, lo: vec![-1.0; n - 1], hi: vec![1.0; n - 1], splits: vec![0; n - 1], lower: 0.0 })
            .collect();
        let mut boxes = stack.len();
        while let Some(b) = stack.pop() {
            let mut ivs: Vec<Iv> = b.lo.iter().zip(&b.hi).map(|(&l, &h)| Iv { lo: l, hi: h }).collect();
            ivs.insert(b.axis, Iv::point(1.0));
            if Problem::enclose(&terms, &ivs).0.lo > 0.0 {
                continue;
            }
            let k = (0..b.lo.len())
                .filter(|&k| b.splits[k] < max_depth)
                .max_by(|&i, &j| (b.hi[i] - b.lo[i]).total_cmp(&(b.hi[j] - b.lo[j])));
            let Some(k) = k else { return Ok(false) };
            boxes += 2;
            if boxes > max_boxes {
                return Ok(false);
            }
            let mid = 0.5 * (b.lo[k] + b.hi[k]);
            let mut left = b.clone();
            left.hi[k] = mid;
            left.splits[k] += 1;
            let mut right = b;
            right.lo[k] = mid;
            right.splits[k] += 1;
            stack.push(left);
            stack.push(right);
        }
        Ok(true)
    }
}

/// Raises a certified bound toward the best sample by bisecting on the level.
fn tighten(f: &SparsePoly, degree: u32, bound: f64, best_sample: f64, opts: &SphereSearch) -> Result<f64> {
    let target = (1.0 - opts.relative_gap) * best_sample;
    if !(target > bound) {
        return Ok(bound);
    }
    let level = LevelProblem::new(f, degree)?;
    let budget = opts.max_boxes / 8;
    if level.certifies(target, opts.max_depth, budget)? {
        return Ok(target);
    }
    let (mut lo, mut hi) = (bound, target);
    for _ in 0..6 {
        let m = 0.5 * (lo + hi);
        if level.certifies(m, opts.max_depth, budget)? {
            lo = m;
        } else {
            hi = m;
        }
    }
    Ok(lo)
}

/// Uses the default box budget and gap; see [`check_no_real_points_with`].
pub fn check_no_real_points(f: &SparsePoly, epsilon: f64, max_depth: u32) -> Result<Certificate> {
    check_no_real_points_with(f, &SphereSearch::new(epsilon, max_depth))
}

/// Certified with bound `m >= epsilon` when every box encloses `|F| >= m`;
/// refuted with a real unit witness where `|F| <= 1e-12`; heuristic-pass otherwise.
pub fn check_no_real_points_with(f: &SparsePoly, opts: &SphereSearch) -> Result<Certificate> {
    let degree = f
        .homogeneous_degree()
        .ok_or_else(|| Error::InvalidPolynomial("no-real-points check needs a nonzero homogeneous polynomial".into()))?;
    if !(opts.epsilon > WITNESS_TOL) {
        return Err(Error::Precondition(format!("epsilon must exceed {WITNESS_TOL:e}")));
    }
    let n = f.nvars();
    let params = Parameters {
        epsilon: Some(opts.epsilon),
        max_depth: Some(opts.max_depth),
        max_boxes: Some(opts.max_boxes),
        ..Parameters::default()
    };
    let prob = Problem {
        f,
        terms: f.terms().map(|(e, c)| (e.to_vec(), c)).collect(),
        degree,
        n,
        grad: f.gradient(),
        grad_terms: f.gradient().iter().map(|g| g.terms().map(|(e, c)| (e.to_vec(), c)).collect()).collect(),
    };

    let witness = |x: Vec<f64>, v: f64| {
        let mut c = Certificate::new(
            Property::NoRealPoints,
            Status::Refuted,
            Evidence::Witness { point: x.into_iter().map(|t| Complex64::new(t, 0.0)).collect(), value: v },
        );
        c.parameters = params;
        c
    };

    let mut heap = BinaryHeap::new();
    let mut best_sample = f64::INFINITY;
    let mut best_point = Vec::new();
    let mut boxes = 0usize;
    let mut newton_starts = 0usize;
    let mut leaf_min = f64::INFINITY;

    let push = |b: FaceBox,
                    heap: &mut BinaryHeap<FaceBox>,
                    best: &mut f64,
                    best_point: &mut Vec<f64>,
                    boxes: &mut usize| {
        *boxes += 1;
        let center: Vec<f64> = b.lo.iter().zip(&b.hi).map(|(l, h)| 0.5 * (l + h)).collect();
        let (y, v) = prob.value_on_sphere(&prob.full(b.axis, &center));
        if v < *best {
            *best = v;
            *best_point = y;
        }
        heap.push(b);
    };

    for axis in 0..n {
        let mut b = FaceBox { axis, lo: vec![-1.0; n - 1], hi: vec![1.0; n - 1], splits: vec![0; n - 1], lower: 0.0 };
        b.lower = prob.bound(&b);
        push(b, &mut heap, &mut best_sample, &mut best_point, &mut boxes);
    }

    let mut tried_best = f64::INFINITY;
    let final_lower = loop {
        if best_sample < opts.epsilon && best_sample < tried_best && newton_starts < opts.max_newton_starts {
            tried_best = best_sample;
            newton_starts += 1;
            let (x, v) = prob.newton(&best_point);
            if v <= WITNESS_TOL {
                return Ok(witness(x, v));
            }
        }
        let Some(b) = heap.pop() else { break leaf_min };
        if b.lower >= (1.0 - opts.relative_gap) * best_sample || boxes >= opts.max_boxes {
            break b.lower.min(leaf_min);
        }
        // split along the widest coordinate that still has depth left
        let k = (0..b.lo.len())
            .filter(|&k| b.splits[k] < opts.max_depth)
            .max_by(|&i, &j| (b.hi[i] - b.lo[i]).total_cmp(&(b.hi[j] - b.lo[j])));
        let Some(k) = k else {
            if b.lower <= 0.0 && newton_starts < opts.max_newton_starts {
                newton_starts += 1;
                let center: Vec<f64> = b.lo.iter().zip(&b.hi).map(|(l, h)| 0.5 * (l + h)).collect();
                let (x, v) = prob.newton(&prob.full(b.axis, &center));
                if v <= WITNESS_TOL {
                    return Ok(witness(x, v));
                }
            }
            leaf_min = leaf_min.min(b.lower);
            continue;
        };
        let mid = 0.5 * (b.lo[k] + b.hi[k]);
        for half in 0..2 {
            let mut c = b.clone();
            if half == 0 {
                c.hi[k] = mid;
            } else {
                c.lo[k] = mid;
            }
            c.splits[k] += 1;
            c.lower = prob.bound(&c);
            push(c, &mut heap, &mut best_sample, &mut best_point, &mut boxes);
        }
    };

    let bound = final_lower.min(heap.peek().map_or(f64::INFINITY, |b| b.lower)).max(0.0);
    let bound = if bound.is_finite() { bound } else { best_sample };
    if best_sample <= WITNESS_TOL {
        return Ok(witness(best_point, best_sample));
    }
    let bound = if bound < (1.0 - opts.relative_gap) * best_sample {
        tighten(f, degree, bound, best_sample, opts)?
    } else {
        bound
    };
    let status = if bound >= opts.epsilon { Status::Certified } else { Status::HeuristicPass };
    let mut c = Certificate::new(Property::NoRealPoints, status, Evidence::LowerBound { bound, best_sample, boxes });
    c.parameters = params;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixing::make_fermat;

    #[test]
    fn fermat_quartic_bound() {
        let c = check_no_real_points(&make_fermat(3, 2).unwrap(), 1e-3, 12).unwrap();
        assert!(c.is_certified(), "{}", c.summary());
        let b = c.bound().unwrap();
        assert!((0.33..=1.0 / 3.0 + 1e-12).contains(&b), "{b}");
    }

    #[test]
    fn difference_of_squares_is_refuted() {
        let f = SparsePoly::from_real_terms(2, &[(&[2, 0], 1.0), (&[0, 2], -1.0)]).unwrap();
        let c = check_no_real_points(&f, 1e-3, 12).unwrap();
        assert!(c.is_refuted(), "{}", c.summary());
        let w = c.witness().unwrap();
        assert!((w[0].re.abs() - w[1].re.abs()).abs() < 1e-10);
        assert!(f.eval(w).norm() <= 1e-12);
    }

    #[test]
    fn sum_of_squares_has_bound_one() {
        let f = make_fermat(2, 1).unwrap();
        let c = check_no_real_points(&f, 1e-3, 12).unwrap();
        assert!(c.is_certified());
        assert!((c.bound().unwrap() - 1.0).abs() < 0.01);
    }

    #[test]
    fn rejects_inhomogeneous() {
        let f = SparsePoly::from_real_terms(2, &[(&[2, 0], 1.0), (&[0, 1], 1.0)]).unwrap();
        assert!(check_no_real_points(&f, 1e-3, 12).is_err());
    }

    #[test]
    fn complex_coefficients() {
        // w1^2 + i w2^2 has no real zeros on the sphere: |x1^2 + i x2^2| >= 1/sqrt(2)
        let f = SparsePoly::from_terms(
            2,
            [(vec![2, 0], Complex64::new(1.0, 0.0)), (vec![0, 2], Complex64::new(0.0, 1.0))],
        )
        .unwrap();
        let c = check_no_real_points(&f, 1e-3, 12).unwrap();
        assert!(c.is_certified());
        let b = c.bound().unwrap();
        assert!(b <= std::f64::consts::FRAC_1_SQRT_2 + 1e-12 && b > 0.69, "{b}");
    }
}
