//! Geodesic operators, the vertex–geodesic graph, walks on geodesics and
//! sampler experiments.

pub mod geodesic;
pub mod hall_littlewood;
pub mod power;
pub mod sampler;
