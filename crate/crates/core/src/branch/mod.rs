//! Inverse branches: maximal discs of continuation, asymptotic curves, tracts.

mod continuation;
mod track;
mod tract;

pub use continuation::{
    continue_branch, continue_branch_with, trace_asymptotic_curve, AsymptoticCurve, BranchConfig, BranchState,
    Obstruction, ObstructionKind,
};
pub use tract::{
    decay_along_curve, discs_of_univalence, min_pairwise_boundary_distance, tangent_disc, tract_angular_measure,
    tract_branch_indices, Tract,
};
