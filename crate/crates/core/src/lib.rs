//! Explicit constructions around Ã₂ buildings: free projective planes over
//! finite local rings, building balls and spheres, Cayley complexes over the
//! Gaussian integers, geodesic powers, and the spectral and sampling checks
//! built on them.

pub mod building;
pub mod cayley;
pub mod complex;
pub mod error;
pub mod flags;
pub mod gaussian;
pub mod free;
pub mod gf;
pub mod graph;
pub mod ring;
pub mod smith;
pub mod spectral;
pub mod suite;
pub mod walks;

pub use error::{Error, Result};
