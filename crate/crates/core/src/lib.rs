//! Exact-arithmetic toolkit for ReLU networks viewed as continuous
//! piecewise-linear functions.
//!
//! Everything in this crate computes with arbitrary-precision rationals;
//! there is no floating point on any semantic path. The main pieces are:
//!
//! * [`network`]: the immutable network data model, exact evaluation,
//!   validation, and the JSON interchange schema.
//! * [`constructions`]: explicit networks computing the coordinate maximum
//!   (the three-neuron two-input gadget and the pairwise tournament), plus
//!   seeded random fixtures on rational grids.
//! * [`bounds`]: closed-form width lower bounds and the extremal-graph
//!   edge thresholds, with certified directed rounding for irrational powers.
//! * [`graph`]: the weight graph induced by a first hidden layer and exact
//!   clique search.
//! * [`transforms`]: shifting, homogenization, depth-2 canonicalization,
//!   negative input assignments, fixed-activation analysis, first-layer
//!   collapse, and the full reduction pipeline combining them.
//! * [`verify`]: exact linear feasibility, activation-region enumeration,
//!   and decision procedures for functional equality on a box, with
//!   counterexample extraction.
//!
//! All types are immutable after construction and safe to share across
//! threads; every operation is a pure function of its inputs, so results
//! never depend on scheduling.

pub mod affine;
pub mod bounds;
pub mod constructions;
pub mod domain;
pub mod graph;
pub mod io;
pub mod lp;
pub mod network;
pub mod rational;
pub mod regions;
pub mod sampling;
pub mod transforms;
pub mod verify;

pub use affine::AffineMap;
pub use domain::BoxDomain;
pub use network::{NetworkReport, ReluNetwork};
pub use rational::Rational;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("cannot parse rational literal {literal:?}")]
    BadRationalLiteral { literal: String },
    #[error("malformed network document: {0}")]
    MalformedDocument(String),
    #[error("first-layer neuron {neuron} has no nonzero weight outside the clique")]
    NoWeightOutsideClique { neuron: usize },
    #[error("activation sign of neuron {neuron} is not fixed on the box")]
    ActivationNotFixed { neuron: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
