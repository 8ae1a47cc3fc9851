//! Spins, the rotations they represent, and the projection
//! `w = c alpha^2 - conj(c) beta^2 - 2 z alpha beta`.
//!
//! ```bash
//! cargo run --example spin_rotation
//! ```

use num_complex::Complex64;
use orbitfix::geometry::{project_xy, rotate_by_spin, spin_to_rotation};
use orbitfix::{PointSystem, Spin};

fn main() -> orbitfix::Result<()> {
    let q = Spin::normalized(Complex64::new(0.6, 0.3), Complex64::new(-0.2, 0.7))?;
    let r = spin_to_rotation(&q)?;
    let same = spin_to_rotation(&q.neg())?;
    println!("rotation matrix:{}", r.matrix());
    println!("q and -q agree within {:.1e}", (r.matrix() - same.matrix()).amax());

    let s = PointSystem::space(&[[1.0, 2.0, 0.5], [0.0, 0.0, 1.0]])?;
    let w = project_xy(&q, &s)?;
    let moved = rotate_by_spin(&s, &q)?;
    for (p, z) in moved.points().iter().zip(&w) {
        println!("rotated ({:+.6}, {:+.6}, {:+.6})  projection {z:.6}", p[0], p[1], p[2]);
    }
    Ok(())
}
