//! Inscribed rhombs in strictly convex bodies.
//!
//! A body is given as the sublevel set of a gauge function. For a chosen
//! orthonormal frame the solver intersects the median surfaces of the body
//! along every frame axis; the chords through the intersection point are the
//! diagonals of an inscribed rhomb. The [`diagnostics`] module probes the
//! conditions under which such a point is guaranteed to exist, and [`sweep`]
//! repeats the construction over many frames.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod median;
pub mod numeric;
pub mod par;
pub mod solver;
pub mod sweep;

pub use error::{Error, Face, Result};
pub use geometry::{ChordResult, ConvexBody, FiberChord, Frame, Point, ShadowClass, Tolerances};
