//! Geometry of the unit tangent bundle of a surface under the natural
//! diagonal metric structure: lifted curves, their Frenet data, and the
//! classification of slant / Legendre behaviour of tangents and normals.

pub mod classify;
pub mod expr;
pub mod lift;
pub mod numeric;
pub mod scenario;
pub mod structure;
pub mod surface;
