//! First-order rigidity of the regular tetrahedron and a flexible Bricard
//! octahedron, after translating to the centroid and rotating onto the gauge.
//!
//! ```bash
//! cargo run --example polyhedron_rigidity
//! ```

use orbitfix::catalog_by_id;
use orbitfix::rigidity::{
    bricard_gauge, bricard_octahedron, build_extended, reduce_polyhedron, rigidity_test, tetrahedron, trace_flex, Gauge,
};

fn main() -> orbitfix::Result<()> {
    let gauge = Gauge::Space { system: catalog_by_id("fermat-n4-fullgroup")? };
    let tet = build_extended(&reduce_polyhedron(&tetrahedron(), &gauge)?, gauge)?;
    let v = rigidity_test(&tet)?;
    println!("tetrahedron: {} (rank {} of {})", v.status.as_str(), v.jacobian_rank, tet.variable_count());

    let gauge = bricard_gauge();
    let oct = build_extended(&reduce_polyhedron(&bricard_octahedron(), &gauge)?, gauge)?;
    let v = rigidity_test(&oct)?;
    println!("bricard octahedron: {} (kernel {})", v.status.as_str(), v.kernel_dimension);
    let trace = trace_flex(&oct, &v.kernel[0], 0.02, 30)?;
    let base = oct.base();
    let moved = trace.configurations.last().map_or(0.0, |x| {
        x.iter().zip(&base).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
    });
    println!("traced {} steps, moved {moved:.3}, max residual {:.1e}", trace.configurations.len(), trace.max_residual);
    Ok(())
}
