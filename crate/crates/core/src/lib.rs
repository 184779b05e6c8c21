//! Exact computation in the differential polynomial ring `A[X; D]` over the
//! free algebra `A = K<x_0, x_1, ...>` with `D(x_i) = x_{i+1}`, the
//! block/checkpoint construction of a locally nilpotent quotient `A/I` whose
//! differential polynomial ring is not Jacobson radical, and campaigns that
//! check every step of that construction at small parameters.

pub mod algebra;
pub mod construction;
pub mod harness;
pub mod ore;
pub mod series;
