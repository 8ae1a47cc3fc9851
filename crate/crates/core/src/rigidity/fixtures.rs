use super::{Gauge, Polyhedron};
use crate::error::Result;
use crate::fixing::{make_fermat, FixingSystem};
use crate::geometry::{rotate_by_spin, rotate_plane, PointSystem};
use crate::orbit_solve::{plane_reduce, space_reduce};

/// The square `(1, 0), (0, 1), (-1, 0), (0, -1)` with its four sides.
pub fn square() -> Polyhedron {
    let v = PointSystem::plane(&[[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]).expect("finite points");
    Polyhedron::new(v, vec![(0, 1), (1, 2), (2, 3), (3, 0)], None).expect("valid square")
}

/// Flat coordinates of the square's flex at parameter `t`:
/// `x1 = 1 - t`, `y2 = sqrt(1 + 2t - t^2)`, and the point reflections.
pub fn square_flex(t: f64) -> Vec<f64> {
    let s = (1.0 + 2.0 * t - t * t).sqrt();
    vec![1.0 - t, 0.0, 0.0, s, t - 1.0, 0.0, 0.0, -s]
}

/// Regular tetrahedron on alternate cube corners, centered at the origin.
pub fn tetrahedron() -> Polyhedron {
    let v = PointSystem::space(&[[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]])
        .expect("finite points");
    let edges = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    Polyhedron::new(v, edges, None).expect("valid tetrahedron")
}

/// A line-symmetric octahedron: vertices `v_i` and their half-turns `R v_i`
/// about the z-axis, with opposite vertices `(v_i, R v_i)` not joined.
pub fn bricard_octahedron() -> Polyhedron {
    let base = [[1.0, 0.2, 0.3], [-0.3, 1.1, -0.5], [0.4, -0.6, 0.9]];
    let zbar = base.iter().map(|p| p[2]).sum::<f64>() / 3.0;
    let mut pts: Vec<[f64; 3]> = base.iter().map(|p| [p[0], p[1], p[2] - zbar]).collect();
    let images: Vec<[f64; 3]> = pts.iter().map(|p| [-p[0], -p[1], p[2]]).collect();
    pts.extend(images);
    let v = PointSystem::space(&pts).expect("finite points");
    let mut edges = Vec::new();
    for i in 0..6 {
        for j in i + 1..6 {
            if j != i + 3 {
                edges.push((i, j));
            }
        }
    }
    Polyhedron::new(v, edges, None).expect("valid octahedron")
}

/// Fermat quartic in six variables with `H` exponents `6, 5, ..., 1`.
pub fn bricard_gauge() -> Gauge {
    let fs = FixingSystem::new(make_fermat(6, 2).expect("n > 0"), vec![6, 5, 4, 3, 2, 1], "fermat quartic, n = 6")
        .expect("valid fixing system");
    Gauge::Space { system: fs }
}

/// Translates the centroid to the origin, then rotates onto the gauge slice.
pub fn reduce_polyhedron(p: &Polyhedron, gauge: &Gauge) -> Result<Polyhedron> {
    let centered = p.vertices().centered();
    let reduced = match gauge {
        Gauge::Plane => rotate_plane(&centered, plane_reduce(&centered)?)?,
        Gauge::Space { system } => rotate_by_spin(&centered, &space_reduce(&centered, system)?)?,
    };
    p.with_vertices(reduced)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixing::catalog_by_id;
    use crate::rigidity::{build_extended, rigidity_test, trace_flex, VerdictStatus};

    #[test]
    fn flex_keeps_lengths() {
        let sq = square();
        for t in [0.0, 0.1, 0.2, 0.3, 0.4, 0.5] {
            let x = square_flex(t);
            for (k, &(i, j)) in sq.edges().iter().enumerate() {
                let d2 = (x[2 * i] - x[2 * j]).powi(2) + (x[2 * i + 1] - x[2 * j + 1]).powi(2);
                assert!((d2 - sq.lengths()[k].powi(2)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn reduced_tetrahedron_is_rigid() {
        let g = Gauge::Space { system: catalog_by_id("fermat-n4-fullgroup").unwrap() };
        let p = reduce_polyhedron(&tetrahedron(), &g).unwrap();
        let es = build_extended(&p, g).unwrap();
        assert_eq!(es.equation_count(), 12);
        let v = rigidity_test(&es).unwrap();
        assert_eq!(v.status, VerdictStatus::FirstOrderRigid);
        assert_eq!(v.jacobian_rank, 12);
        assert!(trace_flex(&es, &[1.0; 12], 0.01, 5).is_err());
    }

    #[test]
    fn bricard_shape() {
        let p = bricard_octahedron();
        assert_eq!(p.edges().len(), 12);
        let c = p.vertices().centroid();
        assert!(c.iter().all(|v| v.abs() < 1e-15));
    }
}
