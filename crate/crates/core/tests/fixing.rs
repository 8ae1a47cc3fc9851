use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use proptest::prelude::*;

use orbitfix::fixing::{astrelin_eval, astrelin_orbit_series, pullback_su2, FixingSystem};
use orbitfix::geometry::{project_xy, rotate_plane};
use orbitfix::poly::SparsePoly;
use orbitfix::{catalog_by_id, PlaneRotation, PointSystem, Spin};

fn c64() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Complex64::new(a, b))
}

fn space_points(n: usize) -> impl Strategy<Value = Vec<[f64; 3]>> {
    prop::collection::vec(prop::array::uniform3(-1.5f64..1.5), n)
}

fn fixing_system() -> impl Strategy<Value = FixingSystem> {
    prop_oneof![Just("fermat-n3"), Just("fermat-n4-fullgroup")].prop_map(|id| catalog_by_id(id).unwrap())
}

fn plane_points() -> impl Strategy<Value = Vec<[f64; 2]>> {
    prop::collection::vec(prop::array::uniform2(-2.0f64..2.0), 1..7)
}

proptest! {
    #[test]
    fn quarter_turn_negates_astrelin(pts in plane_points()) {
        let s = PointSystem::plane(&pts).unwrap();
        let a = astrelin_eval(&s).unwrap();
        let b = astrelin_eval(&rotate_plane(&s, PlaneRotation::new(FRAC_PI_2).unwrap()).unwrap()).unwrap();
        let scale: f64 = pts.iter().enumerate().map(|(k, p)| (p[0] * p[1]).abs().powi(2 * k as i32 + 1)).sum();
        prop_assert!((a + b).abs() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn orbit_series_matches_pointwise_evaluation(pts in plane_points(), theta in 0.0f64..6.3) {
        let s = PointSystem::plane(&pts).unwrap();
        let series = astrelin_orbit_series(&s).unwrap();
        let direct = astrelin_eval(&rotate_plane(&s, PlaneRotation::new(theta).unwrap()).unwrap()).unwrap();
        let scale = series.scale().max(1.0);
        prop_assert!((series.eval(theta) - direct).abs() <= 1e-10 * scale);
    }

    #[test]
    fn pullback_of_f_is_homogeneous(fs in fixing_system(), seed in space_points(4), t in c64(), a in c64(), b in c64()) {
        let s = PointSystem::space(&seed[..fs.n()]).unwrap();
        let ft = pullback_su2(fs.f(), &s).unwrap();
        let deg = 4 * fs.half_degree();
        let lhs = ft.eval(t * a, t * b);
        let rhs = t.powu(deg) * ft.eval(a, b);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1e-300) + 1e-13);
    }

    #[test]
    fn pullback_of_h_has_degree_bands(fs in fixing_system(), seed in space_points(4)) {
        let s = PointSystem::space(&seed[..fs.n()]).unwrap();
        let ht = pullback_su2(fs.h(), &s).unwrap();
        let bands: Vec<u32> = fs.h_exponents().iter().map(|p| 2 * p).collect();
        for ((i, j), _) in ht.terms() {
            prop_assert!(bands.contains(&(i + j)), "term of degree {} outside {:?}", i + j, bands);
        }
        let mut distinct = bands.clone();
        distinct.dedup();
        prop_assert_eq!(distinct.len(), bands.len());
    }

    #[test]
    fn pullback_agrees_with_projection(fs in fixing_system(), seed in space_points(4), a in c64(), b in c64()) {
        prop_assume!(a.norm_sqr() + b.norm_sqr() > 1e-2);
        let q = Spin::normalized(a, b).unwrap();
        let s = PointSystem::space(&seed[..fs.n()]).unwrap();
        let w = project_xy(&q, &s).unwrap();
        let via_pullback = pullback_su2(fs.f(), &s).unwrap().eval(q.alpha, q.beta);
        let direct = fs.f().eval(&w);
        prop_assert!((via_pullback - direct).norm() <= 1e-10 * direct.norm().max(1.0));
    }

    #[test]
    fn collinear_systems_factor_through_the_first_point(
        fs in fixing_system(),
        p in prop::array::uniform3(-1.5f64..1.5),
        lambdas in prop::collection::vec(-2.0f64..2.0, 3),
        a in c64(),
        b in c64(),
    ) {
        prop_assume!(a.norm_sqr() + b.norm_sqr() > 1e-2);
        let n = fs.n();
        let ratios: Vec<f64> = std::iter::once(1.0).chain(lambdas.iter().copied()).take(n).collect();
        let pts: Vec<[f64; 3]> = ratios.iter().map(|l| p.map(|x| l * x)).collect();
        let s = PointSystem::space(&pts).unwrap();
        let q = Spin::normalized(a, b).unwrap();
        let w = project_xy(&q, &s).unwrap();
        let one: Vec<Complex64> = ratios.iter().map(|&l| Complex64::from(l)).collect();
        let want = w[0].powu(2 * fs.half_degree()) * fs.f().eval(&one);
        let got = fs.f().eval(&w);
        prop_assert!((got - want).norm() <= 1e-10 * want.norm().max(1.0));
    }
}

#[test]
fn fixing_system_json_round_trip() {
    let fs = catalog_by_id("fermat-n3").unwrap();
    let text = serde_json::to_string(&fs).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["n"], 3);
    assert_eq!(v["H_exponents"], serde_json::json!([3, 2, 1]));
    let back: FixingSystem = serde_json::from_str(&text).unwrap();
    assert_eq!(back, fs);
}

#[test]
fn rejects_non_decreasing_h_exponents() {
    let f = SparsePoly::from_real_terms(2, &[(&[2, 0], 1.0), (&[0, 2], 1.0)]).unwrap();
    assert!(FixingSystem::new(f, vec![1, 2], "test").is_err());
}
