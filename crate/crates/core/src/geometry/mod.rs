//! Convex bodies, direction frames and the fiber/shadow primitives built on
//! them.

mod body;
mod chord;
mod cube;
mod frame;
mod shadow;
mod support;

pub use body::{BodyFile, ConvexBody, Point, Shape, ShapeFile, Tolerances};
pub use chord::{ChordResult, FiberChord};
pub use cube::cube_to_crosspolytope;
pub use frame::{givens_planes, gram_residual, plane_rotation, Frame};
pub use shadow::{fiber_base, insert_coord, project_coords, reduced_coords, remove_coord, ShadowClass};
