//! Zeros of `Im H` on the orbit of a regular polygon, `H = sum w_j^(jn)`.
//!
//! They are the angles `2 pi k / n^2` together with `2 pi k / (n (n + 1))`.
//!
//! ```bash
//! cargo run --example regular_polygon
//! ```

use std::f64::consts::TAU;

use orbitfix::orbit_solve::polygon_imh_zeros;

fn main() -> orbitfix::Result<()> {
    for n in 3..=6usize {
        let zeros = polygon_imh_zeros(n)?;
        let nf = n as f64;
        let on_grid = |t: f64, m: f64| ((t * m / TAU) - (t * m / TAU).round()).abs() < 1e-8;
        let explained = zeros.iter().filter(|&&t| on_grid(t, nf * nf) || on_grid(t, nf * (nf + 1.0))).count();
        println!("n = {n}: {} zeros, {explained} on the predicted grids", zeros.len());
    }
    Ok(())
}
