//! Exhaustive enumeration, a genus-g mobile bijection, and asymptotic constants
//! for hypermaps and constellations on orientable surfaces.

// Darts index several parallel permutation tables at once.
#![allow(clippy::needless_range_loop, clippy::type_complexity)]

pub mod asymptotics;
pub mod bijection;
pub mod error;
pub mod mapcore;
pub mod oracle;
pub mod schemes;
pub mod series;

pub use error::{Error, Result};
pub use mapcore::{CombinatorialMap, FaceColoring, MapStats};
