//! Fixed points linked with periodic orbits of plane homeomorphisms whose
//! displacement `f - Id` is 1-Lipschitz.
//!
//! Given a certified map and a periodic orbit, the pipeline builds the orbit
//! polygon, splits the plane into faces, computes winding numbers and
//! indices, bisects a positive-index face down to a fixed point, and reports
//! the linking number of that fixed point with the orbit.

pub mod arrangement;
pub mod corpus;
pub mod dynmap;
pub mod fixpoint;
pub mod geom;
pub mod index;
pub mod input;
pub mod linking;
pub mod pipeline;
pub mod render;
pub mod verify;
