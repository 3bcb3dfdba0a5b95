//! Exact computations with Cox rings of Del Pezzo surfaces `X_r`, `3 <= r <= 8`.
//!
//! - [`picard`]: the Picard lattice, Weyl reflections, exceptional classes and
//!   the lattice-level section dimension `h0`.
//! - [`nagata`]: the Cox ring as an invariant ring of a unipotent group acting
//!   on `k[x_1, y_1, ..., x_r, y_r]`, with fat-point interpolation as an
//!   independent `h0` engine.
//! - [`coxring`]: graded dimensions, Hilbert numerators and the structural
//!   checks built on them.
//! - [`exactla`] and [`poly`]: exact linear algebra and polynomials.

pub mod acceptance;
pub mod coxring;
pub mod error;
pub mod exactla;
pub mod nagata;
pub mod picard;
pub mod poly;
pub mod sampling;

pub use error::{Error, Result};
pub use picard::{DelPezzoLattice, PicClass};
