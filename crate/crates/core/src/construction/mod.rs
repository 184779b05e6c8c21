//! The block/checkpoint construction: parameters, the sets `Z_k`, the spans
//! `W_k`, `B_k`, the ideals `I_k`, and exact membership inside one
//! bi-graded component.

mod echelon;
mod membership;
mod params;
mod phi;
mod projection;
mod spaces;
mod zset;

use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::ore::OreError;

pub use echelon::{Echelon, Functional, ReduceOutcome};
pub use membership::{
    member, member_with, merge_witnesses, normal_form, ComponentSpan, MembershipCertificate, Route, Verdict,
    WitnessTerm,
};
pub use params::{ConstructionParams, Level, SwapRule};
pub use phi::{phi_poly, phi_signed, PhiImage};
pub use projection::{project, BlockProjector};
pub use spaces::{
    block_layout, span_basis, touching, w_generators, Block, Generator, Space, SpanQuery,
};
pub use zset::{z_element, z_test, ZCandidate, ZElement, ZWitness};

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("word has length {got}, expected {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("`{0}` does not satisfy the Z condition")]
    NotInZ(String),
    #[error("{what} estimated at {estimate} exceeds the budget {limit}")]
    Budget {
        what: &'static str,
        estimate: u128,
        limit: u128,
    },
    #[error("element is not homogeneous in component (length {length}, degree {degree})")]
    NonHomogeneous { length: usize, degree: u64 },
    #[error("certificate rejected: {0}")]
    CertificateRejected(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Ore(#[from] OreError),
}

/// Enumeration limits. Exceeding one is reported, never silently truncated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Budget {
    /// Largest bi-graded component that may be enumerated monomial by monomial.
    pub max_component_dim: u128,
    /// Largest spanning set that may be materialized.
    pub max_spanning_set: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_component_dim: 500_000,
            max_spanning_set: 500_000,
        }
    }
}
