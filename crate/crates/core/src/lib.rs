//! Constructive checks of odd-dimensional eigenvector existence: numerical
//! mapping degree on spheres, equivariant sections of line-bundle sums over
//! projective spaces, mod-2 characteristic-class arithmetic, and a
//! singular-combination eigen-solver for odd-size complex matrices.

pub mod bundles;
pub mod charclass;
pub mod cli;
pub mod degree;
pub mod error;
pub mod fields;
pub mod geom;
pub mod numerics;
pub mod search;
pub mod spectra;
pub mod sphere;

pub use error::{Error, Result};
