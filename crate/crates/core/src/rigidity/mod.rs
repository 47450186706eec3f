//! Infinitesimal bendings: first-order isometry constraints on triangulated
//! surfaces, the kernel modulo rigid motions, and the bending equation for
//! the vertical component of a bending of a convex graph.

mod bending;
mod defo;

use alloc::vec::Vec;

pub use bending::{
    bending_space, isometry_constraints, BendingField, BendingSpace, ConstraintSystem,
    TriangulatedSurface, RANK_TOLERANCE,
};
pub use defo::{defo_residual, main_lemma_check, solve_defo, GridPatch, LemmaReport};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RigidityError {
    #[error("invalid surface: {0}")]
    InvalidSurface(&'static str),
    #[error("invalid grid patch: {0}")]
    InvalidPatch(&'static str),
    #[error("vertices do not span space; rigid motions have rank {rank}")]
    DegenerateGeometry { rank: usize },
    #[error("z is not strictly convex at {} interior nodes", .0.len())]
    NotStrictlyConvex(Vec<(usize, usize)>),
    #[error("bending residual {residual} only bounds det Hess ζ by {bound}")]
    PrecisionWarning { residual: f64, bound: f64 },
    #[error("singular bending system at unknown {0}")]
    Singular(usize),
}
