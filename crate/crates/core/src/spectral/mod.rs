//! Exact and numerical spectral verification.

pub mod eigen;
pub mod exact;
pub mod iso;
pub mod mixing;
pub mod pfr;
