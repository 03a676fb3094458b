//! Proof-side network manipulations: bias shifting, homogenization,
//! depth-2 canonicalization, negative input assignments, fixed-activation
//! certification, first-layer collapse, and the pipeline composing them.
//!
//! All operations are pure: they take immutable networks and produce new
//! ones, so a pipeline run retains every intermediate artifact.

mod assignment;
mod collapse;
mod depth2;
mod homogenize;
mod pipeline;

pub use assignment::{
    fixed_activation_analysis, negative_assignment, restrict_inputs, weight_ratio,
    AssignmentPlan, NeuronSign, SignCertificate, SignStatus, WeightRatio,
};
pub use collapse::collapse_first_layer;
pub use depth2::{depth2_simplify, nondiff_hyperplanes, Hyperplane, SmoothedPair};
pub use homogenize::{homogenize, shift_to_centered, HomogenizeDiagnostics};
pub use pipeline::{reduce_pipeline, report_is_consistent, ReductionOutcome, ReductionReport};
