use std::collections::BTreeSet;

use super::Polyhedron;
use crate::error::{Error, Result};
use crate::geometry::PointSystem;

/// Reads an OFF file: vertices and polygonal faces; edges are the face sides,
/// lengths come from the coordinates.
pub fn parse_off(text: &str) -> Result<Polyhedron> {
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);
    let bad = |m: &str| Error::Parse(format!("OFF: {m}"));
    match tokens.next() {
        Some("OFF") => {}
        _ => return Err(bad("missing OFF header")),
    }
    let mut next_usize = |what: &str| -> Result<usize> {
        tokens.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad(&format!("expected {what}")))
    };
    let nv = next_usize("vertex count")?;
    let nf = next_usize("face count")?;
    let _ne = next_usize("edge count")?;
    let mut rows = Vec::with_capacity(nv);
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nv {
        let mut row = Vec::with_capacity(3);
        for _ in 0..3 {
            let v: f64 = tokens.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("expected a coordinate"))?;
            row.push(v);
        }
        rows.push(row);
    }
    for _ in 0..nf {
        let k: usize = tokens.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("expected face size"))?;
        let mut face = Vec::with_capacity(k);
        for _ in 0..k {
            let v: usize = tokens.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("expected a vertex index"))?;
            face.push(v);
        }
        faces.push(face);
    }
    let mut edges = BTreeSet::new();
    for f in &faces {
        for (a, b) in f.iter().zip(f.iter().cycle().skip(1)) {
            edges.insert((*a.min(b), *a.max(b)));
        }
    }
    let v = PointSystem::from_rows(3, &rows)?;
    Polyhedron::new(v, edges.into_iter().collect(), None)
}
