//! SO(3) gauge fixing with the catalog system `fermat-n3`:
//! `F = w1^4 + w2^4 + w3^4`, `H = w1^3 + w2^2 + w3`, `w = x + iy`.
//!
//! ```bash
//! cargo run --example space_fixation
//! ```

use orbitfix::orbit_solve::{fixing_residuals, space_fix_enumerate, space_reduce};
use orbitfix::{catalog_by_id, PointSystem};

fn main() -> orbitfix::Result<()> {
    let fs = catalog_by_id("fermat-n3")?;
    let s = PointSystem::space(&[[1.0, 0.2, 0.3], [-0.3, 1.1, -0.5], [0.4, -0.6, 0.9]])?;

    let q = space_reduce(&s, &fs)?;
    println!("reducing spin alpha = {:.6}, beta = {:.6}", q.alpha, q.beta);
    println!("residuals |Re F|, |Im F|, |Im H| = {:?}", fixing_residuals(&s, &fs, &q)?);

    let report = space_fix_enumerate(&s, &fs)?;
    println!(
        "{} lines in the pullback of F, {} spins, {} distinct configurations",
        report.lines.len(),
        report.rotations.len(),
        report.distinct_configurations
    );
    for l in &report.lines {
        println!("  line ({:.4}, {:.4}) x{}: {} zeros", l.line.alpha0, l.line.beta0, l.line.multiplicity, l.zero_count);
    }

    // points on the axis: the stabilizer is a whole circle, the orbit a sphere
    let axis = PointSystem::space(&[[0.0, 0.0, 1.0], [0.0, 0.0, -0.5], [0.0, 0.0, 2.0]])?;
    let r = space_fix_enumerate(&axis, &fs)?;
    println!("axis system: orbit {}, {} distinct configurations", r.orbit_class, r.distinct_configurations);
    Ok(())
}
