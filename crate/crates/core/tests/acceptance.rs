//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Every reference value is computed here, independently of the library:
//! closed forms for the square and the regular polygon, direct quadrature for
//! Fourier coefficients, 2x2 matrix conjugation for the spin action, and a
//! multistart Newton search over SO(3) for the space fixation count.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, Matrix2, Matrix3, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use orbitfix::certify::{check_no_real_points, check_plane_smooth, DEFAULT_EPSILON};
use orbitfix::fixing::{astrelin_eval, pullback_su2};
use orbitfix::geometry::{project_xy, rotate_by_spin, rotate_plane, spin_to_rotation};
use orbitfix::orbit_solve::{
    fourier_leading, plane_fix_enumerate, polygon_imh_zeros, space_fix_enumerate, space_fix_enumerate_with,
    space_reduce, SolverOptions,
};
use orbitfix::rigidity::{
    build_extended, reduce_polyhedron, rigidity_test, square, tetrahedron, trace_flex, ExtendedSystem, Gauge,
    VerdictStatus,
};
use orbitfix::{catalog_by_id, PlaneRotation, PointSystem, Spin};

type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: std::result::Result<T, E>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

// ---------------------------------------------------------------------------
// Oracles.

/// `sum (x_k y_k)^(2k-1)` of the plane system rotated counterclockwise by `theta`.
fn astrelin_rotated(pts: &[[f64; 2]], theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    pts.iter()
        .enumerate()
        .map(|(k, p)| {
            let x = c * p[0] - s * p[1];
            let y = s * p[0] + c * p[1];
            (x * y).powi(2 * k as i32 + 1)
        })
        .sum()
}

/// `U P U^*` with `P = [[z, x + iy], [x - iy, -z]]` and `U` the SU(2) matrix of the spin.
fn conjugate(alpha: Complex64, beta: Complex64, p: [f64; 3]) -> [f64; 3] {
    let u = Matrix2::new(alpha, beta, -beta.conj(), alpha.conj());
    let c = Complex64::new(p[0], p[1]);
    let m = Matrix2::new(Complex64::from(p[2]), c, c.conj(), Complex64::from(-p[2]));
    let r = u * m * u.adjoint();
    [r[(0, 1)].re, r[(0, 1)].im, r[(0, 0)].re]
}

/// `(Re F, Im F, Im H)` for `F = sum w^4`, `H = w1^3 + w2^2 + w3`.
fn fermat3_values(pts: &[[f64; 3]]) -> [f64; 3] {
    let w: Vec<Complex64> = pts.iter().map(|p| Complex64::new(p[0], p[1])).collect();
    let f: Complex64 = w.iter().map(|z| z.powu(4)).sum();
    let h = w[0].powu(3) + w[1].powu(2) + w[2];
    [f.re, f.im, h.im]
}

fn rotate_all(r: &Matrix3<f64>, pts: &[[f64; 3]]) -> Vec<[f64; 3]> {
    pts.iter()
        .map(|p| {
            let v = r * Vector3::from(*p);
            [v.x, v.y, v.z]
        })
        .collect()
}

/// Newton on SO(3) from many starting rotations; returns distinct zero configurations.
fn brute_force_zeros(pts: &[[f64; 3]], scale: f64) -> Vec<Vec<[f64; 3]>> {
    let mut found: Vec<Vec<[f64; 3]>> = Vec::new();
    let radius = pts.iter().map(|p| Vector3::from(*p).norm()).fold(0.0, f64::max);
    let (ne, nx) = (6, 12);
    for ie in 0..ne {
        let eta = FRAC_PI_2 * (ie as f64 + 0.5) / ne as f64;
        for i1 in 0..nx {
            for i2 in 0..nx {
                let x1 = TAU * i1 as f64 / nx as f64;
                let x2 = TAU * i2 as f64 / nx as f64;
                let a = Complex64::from_polar(eta.cos(), x1);
                let b = Complex64::from_polar(eta.sin(), x2);
                let mut cur: Vec<[f64; 3]> = pts.iter().map(|p| conjugate(a, b, *p)).collect();
                if newton_so3(&mut cur, scale) && !found.iter().any(|c| config_distance(c, &cur) <= 1e-6 * radius) {
                    found.push(cur);
                }
            }
        }
    }
    found
}

fn newton_so3(cur: &mut Vec<[f64; 3]>, scale: f64) -> bool {
    let h = 1e-7;
    for _ in 0..60 {
        let g = Vector3::from(fermat3_values(cur));
        if g.amax() <= 1e-11 * scale {
            return true;
        }
        let mut j = Matrix3::zeros();
        for k in 0..3 {
            let mut w = Vector3::zeros();
            w[k] = h;
            let rp = *nalgebra::Rotation3::new(w).matrix();
            let gp = Vector3::from(fermat3_values(&rotate_all(&rp, cur)));
            let rm = *nalgebra::Rotation3::new(-w).matrix();
            let gm = Vector3::from(fermat3_values(&rotate_all(&rm, cur)));
            j.set_column(k, &((gp - gm) / (2.0 * h)));
        }
        let Some(step) = j.lu().solve(&g) else { return false };
        let step = if step.norm() > 0.5 { step * (0.5 / step.norm()) } else { step };
        *cur = rotate_all(nalgebra::Rotation3::new(-step).matrix(), cur);
    }
    false
}

fn config_distance(a: &[[f64; 3]], b: &[[f64; 3]]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(p, q)| (0..3).map(move |k| (p[k] - q[k]).abs()))
        .fold(0.0, f64::max)
}

fn square_closed_form(t: f64) -> Vec<f64> {
    let y = (1.0 + 2.0 * t - t * t).sqrt();
    vec![1.0 - t, 0.0, 0.0, y, t - 1.0, 0.0, 0.0, -y]
}

fn random_spin(rng: &mut ChaCha8Rng) -> Spin {
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 > 1e-3 && n2 <= 1.0 {
            if let Ok(q) = Spin::normalized(Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3])) {
                return q;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Criteria.

fn square_fixation() -> Check {
    let s = ok(PointSystem::plane(&[[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]))?;
    let got = ok(plane_fix_enumerate(&s))?;
    // A on the orbit is s - s^3 + s^5 - s^7 with s = sin(2 phi) / 2, so it vanishes iff sin(2 phi) = 0
    let want = [0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2];
    ensure!(got.len() == 4, "expected 4 angles, got {got:?}");
    let err = got.iter().zip(want).map(|(a, b)| circular_distance(*a, b)).fold(0.0, f64::max);
    ensure!(err <= 1e-9, "angle error {err:e}");
    Ok(format!("angles {got:?}, max error {err:.1e}"))
}

fn square_flexion() -> Check {
    let es = ok(build_extended(&square(), Gauge::Plane))?;
    let mut worst = 0.0f64;
    for k in 0..=5 {
        let x = square_closed_form(0.1 * k as f64);
        worst = worst.max(ok(es.residuals(&x))?.iter().fold(0.0, |m, r| m.max(r.abs())));
    }
    ensure!(worst <= 1e-10, "closed-form residual {worst:e}");
    let dir = [-1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, -1.0];
    let tr = ok(trace_flex(&es, &dir, 0.01, 50))?;
    ensure!(tr.configurations.len() == 50, "trace stopped after {} steps", tr.configurations.len());
    let mut dev = 0.0f64;
    for c in &tr.configurations {
        dev = dev.max(max_abs_diff(c, &square_closed_form(1.0 - c[0])));
    }
    ensure!(dev <= 1e-6, "trace deviates from the closed form by {dev:e}");
    Ok(format!("closed-form residual {worst:.1e}, trace deviation {dev:.1e} over 50 steps"))
}

fn fourier_leading_coefficient() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(1..=5);
        let pts: Vec<[f64; 2]> = (0..n)
            .map(|_| {
                let r = rng.gen_range(1.5..2.5);
                let t = rng.gen_range(0.0..TAU);
                [r * t.cos(), r * t.sin()]
            })
            .collect();
        let s = ok(PointSystem::plane(&pts))?;
        let closed = ok(fourier_leading(&s))?;
        let m = (4 * n - 2) as f64;
        let samples = 64 * n;
        let (mut a, mut b) = (0.0, 0.0);
        for j in 0..samples {
            let t = TAU * j as f64 / samples as f64;
            let v = astrelin_rotated(&pts, t);
            a += v * (m * t).cos();
            b += v * (m * t).sin();
        }
        let quad = Complex64::new(a, b) * (2.0 / samples as f64);
        worst = worst.max((quad - closed).norm() / closed.norm());
    }
    ensure!(worst <= 1e-10, "relative error {worst:e}");
    Ok(format!("100 systems, max relative error {worst:.1e}"))
}

fn regular_polygon_zeros() -> Check {
    let mut counts = Vec::new();
    for (n, want) in [(3usize, 18usize), (4, 32), (5, 50)] {
        let got = ok(polygon_imh_zeros(n))?;
        // Im H on the orbit is sum_{j=1..n} sin(j n theta) = sin(n x / 2) sin((n+1) x / 2) / sin(x / 2), x = n theta
        let nf = n as f64;
        let mut expected: Vec<f64> = (0..n * n)
            .map(|k| TAU * k as f64 / (nf * nf))
            .chain((0..n * (n + 1)).map(|k| TAU * k as f64 / (nf * (nf + 1.0))))
            .collect();
        expected.sort_by(f64::total_cmp);
        expected.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        ensure!(expected.len() == want, "oracle union has {} points for n = {n}", expected.len());
        ensure!(got.len() == want, "n = {n}: {} zeros, expected {want}", got.len());
        for z in &expected {
            let d = got.iter().map(|g| circular_distance(*g, *z)).fold(f64::INFINITY, f64::min);
            ensure!(d <= 1e-8, "n = {n}: zero {z} missed by {d:e}");
        }
        // dense scan of Im H evaluated from the rotated vertices; all zeros are simple
        let grid = 200_000;
        let imh = |t: f64| -> f64 {
            (0..n)
                .map(|j| {
                    let w = Complex64::from_polar(1.0, TAU * j as f64 / nf + t);
                    w.powu(((j + 1) * n) as u32).im
                })
                .sum()
        };
        let vals: Vec<f64> = (0..grid).map(|i| imh(TAU * (i as f64 + 0.5) / grid as f64)).collect();
        let changes = (0..grid).filter(|&i| vals[i].signum() != vals[(i + 1) % grid].signum()).count();
        ensure!(changes == want, "n = {n}: dense scan sees {changes} sign changes");
        counts.push(got.len());
    }
    Ok(format!("distinct zero counts {counts:?}"))
}

fn fermat_quartic_certification() -> Check {
    let fs = ok(catalog_by_id("fermat-n3"))?;
    let c = ok(check_no_real_points(fs.f(), DEFAULT_EPSILON, 12))?;
    let bound = c.bound().ok_or_else(|| format!("no lower bound: {}", c.summary()))?;
    // minimum of sum x_i^4 on the unit sphere: Lagrange gives x_i^2 = 1/n, value 1/n
    let true_min = 1.0 / 3.0;
    ensure!(c.is_certified(), "{}", c.summary());
    ensure!((0.30..=true_min + 1e-12).contains(&bound), "bound {bound} outside [0.30, 1/3]");
    let smooth = ok(check_plane_smooth(fs.f()))?;
    ensure!(smooth.is_certified(), "{}", smooth.summary());
    Ok(format!("lower bound {bound:.6} (true minimum {true_min:.6}); {}", smooth.summary()))
}

fn space_reduction() -> Check {
    let fs = ok(catalog_by_id("fermat-n3"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    let mut counts = Vec::new();
    for _ in 0..20 {
        let pts: Vec<[f64; 3]> = (0..3).map(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0))).collect();
        let s = ok(PointSystem::space(&pts))?;
        let q = ok(space_reduce(&s, &fs))?;
        let rotated: Vec<[f64; 3]> = pts.iter().map(|p| conjugate(q.alpha, q.beta, *p)).collect();
        let res = fermat3_values(&rotated).iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        worst = worst.max(res);
        ensure!(res <= 1e-8, "reduction residual {res:e}");

        let report = ok(space_fix_enumerate(&s, &fs))?;
        let halved = ok(space_fix_enumerate_with(&s, &fs, &SolverOptions::default().halved()))?;
        let count = report.distinct_configurations;
        ensure!(halved.distinct_configurations == count, "count {count} changes to {} on halving", halved.distinct_configurations);

        let radius = s.radius();
        let scale = (3.0 * radius.powi(4)).max(1.0);
        let configs: Vec<Vec<[f64; 3]>> =
            ok(report.configurations(&s))?.iter().map(|c| c.points().to_vec()).collect();
        let mut distinct: Vec<&Vec<[f64; 3]>> = Vec::new();
        for c in &configs {
            let r = fermat3_values(c).iter().fold(0.0, |m: f64, v| m.max(v.abs()));
            ensure!(r <= 1e-8 * scale, "enumerated configuration has residual {r:e}");
            if !distinct.iter().any(|d| config_distance(d, c) <= 1e-6 * radius) {
                distinct.push(c);
            }
        }
        ensure!(distinct.len() == count, "report claims {count} configurations, {} are distinct", distinct.len());
        let brute = brute_force_zeros(&pts, scale);
        for b in &brute {
            ensure!(
                distinct.iter().any(|d| config_distance(d, b) <= 1e-6 * radius),
                "grid search found a configuration missing from the enumeration"
            );
        }
        ensure!(brute.len() == count, "grid search finds {} configurations, enumeration {count}", brute.len());
        counts.push(count);
    }
    Ok(format!("max reduction residual {worst:.1e}; configuration counts {counts:?}"))
}

fn stabilizer_case() -> Check {
    let fs = ok(catalog_by_id("fermat-n3"))?;
    let zs = [1.0, -0.5, 2.0];
    let s = ok(PointSystem::space(&zs.map(|z| [0.0, 0.0, z])))?;
    let ft = ok(pullback_su2(fs.f(), &s))?;
    // w_j = -2 z_j alpha beta, so F~ = 16 (sum z_j^4) (alpha beta)^4
    let c: f64 = 16.0 * zs.iter().map(|z| z.powi(4)).sum::<f64>();
    let mut err = 0.0f64;
    for i in 0..=8u32 {
        let want = if i == 4 { c } else { 0.0 };
        err = err.max((ft.coefficient(i, 8 - i) - Complex64::from(want)).norm());
    }
    ensure!(err <= 1e-10, "coefficient error {err:e}");
    let report = ok(space_fix_enumerate(&s, &fs))?;
    let n = report.distinct_configurations;
    ensure!(n >= 1 && n <= 2, "{n} distinct configurations");
    for cfg in ok(report.configurations(&s))? {
        for p in cfg.points() {
            ensure!(p[0].abs() + p[1].abs() <= 1e-12, "configuration left the axis");
        }
    }
    Ok(format!("coefficient error {err:.1e}, {n} distinct configurations, C = {c}"))
}

fn finite_difference_jacobian(es: &ExtendedSystem, x: &[f64]) -> std::result::Result<DMatrix<f64>, String> {
    let h = 1e-6;
    let mut j = DMatrix::zeros(es.equation_count(), x.len());
    for k in 0..x.len() {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[k] += h;
        xm[k] -= h;
        let rp = ok(es.residuals(&xp))?;
        let rm = ok(es.residuals(&xm))?;
        for r in 0..rp.len() {
            j[(r, k)] = (rp[r] - rm[r]) / (2.0 * h);
        }
    }
    Ok(j)
}

fn rigidity_fixtures() -> Check {
    let gauge = Gauge::Space { system: ok(catalog_by_id("fermat-n4-fullgroup"))? };
    let tet = ok(reduce_polyhedron(&tetrahedron(), &gauge))?;
    let tes = ok(build_extended(&tet, gauge))?;
    let tv = ok(rigidity_test(&tes))?;
    ensure!(
        tv.status == VerdictStatus::FirstOrderRigid && tv.jacobian_rank == 12 && tv.kernel_dimension == 0,
        "tetrahedron: {} with rank {}",
        tv.status.as_str(),
        tv.jacobian_rank
    );

    let ses = ok(build_extended(&square(), Gauge::Plane))?;
    let sv = ok(rigidity_test(&ses))?;
    ensure!(sv.kernel_dimension >= 1, "square kernel is trivial");
    // derivative of the closed form at t = 0, normalized
    let tangent = [-1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, -1.0].map(|v: f64| v / 2.0);
    let mut best = f64::INFINITY;
    for k in &sv.kernel {
        let dot: f64 = k.iter().zip(tangent).map(|(a, b)| a * b).sum();
        best = best.min(max_abs_diff(&k.iter().map(|v| v * dot.signum()).collect::<Vec<_>>(), &tangent));
    }
    ensure!(best <= 1e-6, "square kernel differs from the flex tangent by {best:e}");

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let systems: [&ExtendedSystem; 2] = [&tes, &ses];
    let mut worst = 0.0f64;
    for i in 0..50 {
        let es = systems[i % 2];
        let x: Vec<f64> = (0..es.variable_count()).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let a = ok(es.jacobian(&x))?;
        let f = finite_difference_jacobian(es, &x)?;
        let err = a.iter().zip(f.iter()).map(|(p, q)| (p - q).abs() / p.abs().max(1.0)).fold(0.0, f64::max);
        worst = worst.max(err);
    }
    ensure!(worst <= 1e-5, "Jacobian mismatch {worst:e}");
    Ok(format!(
        "tetrahedron rank {}/12; square kernel dimension {} (tangent error {best:.1e}); Jacobian error {worst:.1e}",
        tv.jacobian_rank, sv.kernel_dimension
    ))
}

fn structural_identities() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut flip_err = 0.0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=6);
        let pts: Vec<[f64; 2]> = (0..n).map(|_| [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]).collect();
        let s = ok(PointSystem::plane(&pts))?;
        let a = ok(astrelin_eval(&s))?;
        let exact = ok(PointSystem::plane(&pts.iter().map(|p| [-p[1], p[0]]).collect::<Vec<_>>()))?;
        ensure!(ok(astrelin_eval(&exact))? == -a, "exact quarter turn does not negate A");
        let turned = ok(rotate_plane(&s, ok(PlaneRotation::new(FRAC_PI_2))?))?;
        let scale: f64 = pts.iter().enumerate().map(|(k, p)| (p[0] * p[1]).abs().powi(2 * k as i32 + 1)).sum();
        flip_err = flip_err.max((ok(astrelin_eval(&turned))? + a).abs() / scale.max(1.0));
    }
    ensure!(flip_err <= 1e-12, "quarter-turn sign flip error {flip_err:e}");

    let mut cover = 0.0f64;
    let mut proj = 0.0f64;
    for _ in 0..1000 {
        let q = random_spin(&mut rng);
        let r1 = ok(spin_to_rotation(&q))?;
        let r2 = ok(spin_to_rotation(&q.neg()))?;
        cover = cover.max((r1.matrix() - r2.matrix()).amax());
        let pts: Vec<[f64; 3]> = (0..3).map(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0))).collect();
        let s = ok(PointSystem::space(&pts))?;
        let w = ok(project_xy(&q, &s))?;
        let moved = ok(rotate_by_spin(&s, &q))?;
        for (k, p) in pts.iter().enumerate() {
            let o = conjugate(q.alpha, q.beta, *p);
            let m = r1.apply(*p);
            proj = proj
                .max((w[k] - Complex64::new(o[0], o[1])).norm())
                .max(max_abs_diff(&moved.points()[k], &o))
                .max(max_abs_diff(&m, &o));
        }
    }
    ensure!(cover <= 1e-15, "double cover mismatch {cover:e}");
    ensure!(proj <= 1e-12, "projection mismatch {proj:e}");
    Ok(format!("sign flip {flip_err:.1e}, double cover {cover:.1e}, projection {proj:.1e}"))
}

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Check); 9] = [
        (1, "square fixation", Duration::from_secs(1), square_fixation),
        (2, "square flexion", Duration::from_secs(5), square_flexion),
        (3, "Fourier leading coefficient", Duration::from_secs(10), fourier_leading_coefficient),
        (4, "regular polygon zeros", Duration::from_secs(10), regular_polygon_zeros),
        (5, "Fermat quartic certification", Duration::from_secs(30), fermat_quartic_certification),
        (6, "space reduction and fixation", Duration::from_secs(60), space_reduction),
        (7, "axis stabilizer", Duration::from_secs(5), stabilizer_case),
        (8, "rigidity fixtures", Duration::from_secs(10), rigidity_fixtures),
        (9, "structural identities", Duration::from_secs(5), structural_identities),
    ];
    let mut failed = 0;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (verdict, detail) = match result {
            Ok(d) if elapsed <= budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; over the {budget:?} budget")),
            Err(e) => ("FAIL", e),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!("criterion {id} [{verdict}] {name} ({:.3} s): {detail}", elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} of 9 criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
