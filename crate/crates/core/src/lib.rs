//! Numerical laboratory for volumes of complex curves and holomorphic graphs.
//!
//! The crate is layered bottom-up:
//!
//! * [`poly`]: sparse complex polynomials, restriction to lines, root finding;
//! * [`varieties`]: zero sets and graphs: membership, sampling, tangent
//!   frames, fibers, proper coordinates;
//! * [`hausdorff`]: Hausdorff distances, local set convergence, box counting;
//! * [`volume`]: Gram, Kähler-form and slicing volume estimators, Fubini–Study
//!   volume of projective curves, radial profiles;
//! * [`growth`]: polynomial growth verdicts, cones over projective varieties,
//!   degree estimates, canonical fiber polynomials;
//! * [`limits`]: bounded-volume sequences of varieties and normal families.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cloud;
pub mod error;
pub mod fit;
pub mod growth;
pub mod hausdorff;
pub mod limits;
pub mod linalg;
pub mod poly;
pub mod quadrature;
pub mod rng;
pub mod varieties;
pub mod volume;

pub use cloud::{Ball, PointCloud};
pub use error::{LabError, Result};
pub use num_complex::Complex64;
pub use poly::{PolySystem, Polynomial, UniPoly};
