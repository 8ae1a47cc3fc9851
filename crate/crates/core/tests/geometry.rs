use nalgebra::Matrix3;
use num_complex::Complex64;
use proptest::prelude::*;

use orbitfix::geometry::{
    classify_orbit, numerical_rank, orbit_tangent_jacobian, project_xy, rotate_space, spin_to_rotation, OrbitTag,
};
use orbitfix::{PointSystem, Rotation3, Spin};

fn spin() -> impl Strategy<Value = Spin> {
    prop::array::uniform4(-1.0f64..1.0)
        .prop_filter("away from zero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-2)
        .prop_map(|v| Spin::normalized(Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3])).unwrap())
}

fn point() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-3.0f64..3.0)
}

/// Rotation by `U P U^*` on the Hermitian matrix `P = [[z, x + iy], [x - iy, -z]]`.
fn hermitian_rotate(q: &Spin, p: [f64; 3]) -> [f64; 3] {
    let (a, b) = (q.alpha, q.beta);
    let u = nalgebra::Matrix2::new(a, b, -b.conj(), a.conj());
    let c = Complex64::new(p[0], p[1]);
    let m = nalgebra::Matrix2::new(Complex64::from(p[2]), c, c.conj(), Complex64::from(-p[2]));
    let r = u * m * u.adjoint();
    [r[(0, 1)].re, r[(0, 1)].im, r[(0, 0)].re]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn antipodal_spins_give_the_same_rotation(q in spin()) {
        let r = spin_to_rotation(&q).unwrap();
        let m = r.matrix();
        prop_assert!((m - spin_to_rotation(&q.neg()).unwrap().matrix()).amax() <= 1e-15);
        prop_assert!((m.transpose() * m - Matrix3::identity()).amax() <= 1e-10);
        prop_assert!((m.determinant() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn projection_matches_matrix_rotation(q in spin(), pts in prop::collection::vec(point(), 1..6)) {
        let s = PointSystem::space(&pts).unwrap();
        let w = project_xy(&q, &s).unwrap();
        let r = spin_to_rotation(&q).unwrap();
        for (k, p) in pts.iter().enumerate() {
            let m = r.apply(*p);
            let h = hermitian_rotate(&q, *p);
            let scale = p.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
            prop_assert!((w[k] - Complex64::new(m[0], m[1])).norm() <= 1e-12 * scale);
            prop_assert!((w[k] - Complex64::new(h[0], h[1])).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn classification_is_rotation_invariant(
        q in spin(),
        base in prop::collection::vec(point(), 1..5),
        rank in 0usize..4,
        mix in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 3), 5),
    ) {
        // build a system whose span has dimension at most `rank`
        let span: Vec<[f64; 3]> = base.iter().take(rank).copied().collect();
        let pts: Vec<[f64; 3]> = mix
            .iter()
            .map(|c| {
                let mut p = [0.0; 3];
                for (v, coef) in span.iter().zip(c) {
                    for k in 0..3 {
                        p[k] += coef * v[k];
                    }
                }
                p
            })
            .collect();
        let s = PointSystem::space(&pts).unwrap();
        let r = spin_to_rotation(&q).unwrap();
        let a = classify_orbit(&s);
        let b = classify_orbit(&rotate_space(&s, &r).unwrap());
        prop_assert_eq!(a.tag, b.tag);
        prop_assert_eq!(a.dependence.rank, b.dependence.rank);
    }

    #[test]
    fn tangent_rank_three_iff_generic(pts in prop::collection::vec(point(), 1..5), collinear in any::<bool>()) {
        let pts: Vec<[f64; 3]> = if collinear {
            pts.iter().enumerate().map(|(k, _)| pts[0].map(|x| x * (k as f64 - 1.5))).collect()
        } else {
            pts
        };
        let s = PointSystem::space(&pts).unwrap();
        let rank = numerical_rank(&orbit_tangent_jacobian(&s).unwrap());
        prop_assert_eq!(rank == 3, classify_orbit(&s).tag == OrbitTag::RealProjective3);
    }
}

#[test]
fn axis_rotation_composes() {
    let a = Rotation3::about_axis([0.0, 0.0, 1.0], 0.3);
    let b = Rotation3::about_axis([0.0, 0.0, 1.0], 0.4);
    let c = Rotation3::about_axis([0.0, 0.0, 2.0], 0.7);
    assert!((a.compose(&b).matrix() - c.matrix()).amax() < 1e-15);
}
