//! Hypothesis checks for fixing systems: parity, exponents, real points and
//! smoothness of the plane quartic.
//!
//! ```bash
//! cargo run --release --example certify_fixing
//! ```

use orbitfix::certify::{check_no_real_points, check_plane_smooth, preflight, DEFAULT_EPSILON, DEFAULT_MAX_DEPTH};
use orbitfix::catalog_by_id;
use orbitfix::poly::SparsePoly;

fn main() -> orbitfix::Result<()> {
    for id in ["fermat-n3", "fermat-n4-fullgroup"] {
        println!("{id}:");
        for c in preflight(&catalog_by_id(id)?, DEFAULT_EPSILON, DEFAULT_MAX_DEPTH)? {
            println!("  {}", c.summary());
        }
    }

    // w1^4 - w2^4 + w3^4 has real points, and w1^2 w2^2 + w1^2 w3^2 is singular
    let indefinite = SparsePoly::from_real_terms(3, &[(&[4, 0, 0], 1.0), (&[0, 4, 0], -1.0), (&[0, 0, 4], 1.0)])?;
    println!("{}", check_no_real_points(&indefinite, DEFAULT_EPSILON, DEFAULT_MAX_DEPTH)?.summary());
    let singular = SparsePoly::from_real_terms(3, &[(&[2, 2, 0], 1.0), (&[2, 0, 2], 1.0)])?;
    println!("{}", check_plane_smooth(&singular)?.summary());
    Ok(())
}
