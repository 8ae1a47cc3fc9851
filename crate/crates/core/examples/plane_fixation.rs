//! SO(2) gauge fixing with the Astrelin function `A = sum (x_k y_k)^(2k-1)`.
//!
//! Reduces a random triangle, lists every rotation where `A` vanishes on its
//! orbit, and prints the leading Fourier coefficient that makes the list finite.
//!
//! ```bash
//! cargo run --example plane_fixation
//! ```

use orbitfix::fixing::{astrelin_eval, astrelin_orbit_series};
use orbitfix::geometry::rotate_plane;
use orbitfix::orbit_solve::{fourier_leading, plane_fix_enumerate, plane_reduce};
use orbitfix::{PlaneRotation, PointSystem};

fn main() -> orbitfix::Result<()> {
    let s = PointSystem::plane(&[[1.2, 0.4], [-0.3, 0.9], [0.5, -1.1]])?;

    let rho = plane_reduce(&s)?;
    let reduced = rotate_plane(&s, rho)?;
    println!("reduce: theta = {:.12}, A = {:+.3e}", rho.theta(), astrelin_eval(&reduced)?);

    let angles = plane_fix_enumerate(&s)?;
    println!("{} fixing angles on the orbit:", angles.len());
    for t in &angles {
        let a = astrelin_eval(&rotate_plane(&s, PlaneRotation::new(*t)?)?)?;
        println!("  {t:.12}  A = {a:+.2e}");
    }

    let series = astrelin_orbit_series(&s)?;
    let lead = fourier_leading(&s)?;
    println!("orbit series has order {}, leading coefficient {lead:.6}", series.degree());
    Ok(())
}
