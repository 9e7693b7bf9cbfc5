//! SU(2) connections on ℝ³: curvature, covariant Laplacians, Weyl packets,
//! tail norms, a lattice discretization with a Lanczos eigensolver, and
//! lattice Coulomb gauge fixing.

pub mod connection;
pub mod curvature;
pub mod error;
pub mod fit;
pub mod gauge_fixing;
pub mod lanczos;
pub mod lattice;
pub mod quadrature;
pub mod section;
pub mod su2;
pub mod weyl;

pub use error::{Error, Result};
