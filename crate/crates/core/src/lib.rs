//! Equivariant index computations for orientation-reversing involutions on
//! odd-dimensional spin manifolds: exact characteristic-class algebra, the
//! fixed-point index formula, and numerical heat-kernel and JLO checks on
//! flat model geometries.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod charclass;
pub mod cli;
pub mod jlo;
pub mod lefschetz;
pub mod quadrature;
pub mod series;
pub mod spectral;
