//! Orbit types of a few space systems, and the immersion minor of the orbit map.
//!
//! ```bash
//! cargo run --example classify_orbit
//! ```

use orbitfix::geometry::{classify_orbit, immersion_minor, orbit_tangent_jacobian, numerical_rank};
use orbitfix::PointSystem;

fn main() -> orbitfix::Result<()> {
    let systems = [
        ("origin", PointSystem::space(&[[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]])?),
        ("on the z-axis", PointSystem::space(&[[0.0, 0.0, 1.0], [0.0, 0.0, -2.0]])?),
        ("triangle", PointSystem::space(&[[1.0, 0.0, 0.0], [0.3, 0.8, 0.0], [0.0, 0.2, 1.1]])?),
    ];
    for (name, s) in &systems {
        let class = classify_orbit(s);
        let j = orbit_tangent_jacobian(s)?;
        println!(
            "{name:>14}: {:<17} rank {}  tangent rank {}  immersion minor {:+.4}",
            class.tag.as_str(),
            class.dependence.rank,
            numerical_rank(&j),
            immersion_minor(&j)
        );
    }
    Ok(())
}
