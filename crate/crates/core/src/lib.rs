//! Exact tools for the algebraic simplicial complexes X_{d,n,c}, whose
//! d-faces are the (d+1)-subsets {x_0, ..., x_d} of F_n with
//! c*x_d + x_0 + ... + x_{d-1} = 0 (mod n).
//!
//! For d = 2 the boundary matrix reduces to a matrix with circulant blocks,
//! whose singularity is decided one cyclotomic field at a time.

pub mod analysis;
pub mod bench;
pub mod boundary;
pub mod cyclolinalg;
pub mod error;
pub mod fullmatrix;
pub mod mcb;
pub mod numtheory;
pub mod report;
pub mod scomplex;
pub mod selftest;

pub use error::{Error, Result};
