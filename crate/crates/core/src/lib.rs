//! Polynomial gauge fixing for rotation orbits of finite point systems.
//!
//! Plane systems are fixed by the Astrelin function, space systems by a pair
//! `(F, H)` of complex polynomials in the projections `w_j = x_j + i y_j`.
//! The [`rigidity`] module uses the fixing equations to build well-posed
//! systems for bar-joint polyhedra.

pub mod certify;
pub mod cli;
pub mod error;
pub mod fixing;
pub mod geometry;
pub mod orbit_solve;
pub mod poly;
pub mod rigidity;
pub mod roots;

pub use error::{Error, Result};
pub use fixing::{catalog_by_id, catalog_fixing, FixingGroup, FixingSystem};
pub use geometry::{PlaneRotation, PointSystem, Rotation3, Spin};
