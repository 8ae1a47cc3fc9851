//! The square flexes into rhombi; trace the flex and compare with the closed form
//! `x1 = 1 - t`, `y2 = sqrt(1 + 2t - t^2)`.
//!
//! ```bash
//! cargo run --example square_flex
//! ```

use orbitfix::rigidity::{build_extended, rigidity_test, square, square_flex, trace_flex, Gauge};

fn main() -> orbitfix::Result<()> {
    let es = build_extended(&square(), Gauge::Plane)?;
    let v = rigidity_test(&es)?;
    println!("{}: rank {}, kernel {}", v.status.as_str(), v.jacobian_rank, v.kernel_dimension);

    let trace = trace_flex(&es, &[-1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, -1.0], 0.02, 25)?;
    for x in trace.configurations.iter().step_by(5) {
        let t = 1.0 - x[0];
        let dev = x.iter().zip(square_flex(t)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!("t = {t:.4}: y2 = {:.6}, deviation from closed form {dev:.1e}", x[3]);
    }
    println!("max residual {:.1e}", trace.max_residual);
    Ok(())
}
