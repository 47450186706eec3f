//! Generalized solutions of the two-dimensional Monge–Ampère equation.
//!
//! A solution is a piecewise-linear convex function: the lower convex
//! envelope of values prescribed at nodes. The measure it induces on a node
//! is the θ-weighted area of the node's subgradient cell, the set of slopes
//! of planes supporting the envelope there. Solvers adjust interior values
//! until every cell carries its prescribed mass, with Dirichlet values held
//! at boundary nodes.

mod compare;
mod homotopy;
mod liouville;
mod plfunc;
mod problem;
mod solver;
mod weight;

pub use compare::{maximum_principle_check, ComparisonReport};
pub use homotopy::{homotopy_solve, HomotopyOptions, HomotopySchedule, HomotopyStep};
pub use liouville::{
    fit_quadratic, liouville_probe, liouville_problem, DeviationReport, LiouvilleConfig,
    LiouvilleRow,
};
pub use plfunc::{
    cell_mass, conditional_curvature, ma_measure, ma_measure_in, PLConvexFunction, SlopeWindow,
    SubgradientCell,
};
pub use problem::{voronoi_masses, MAProblem};
pub use solver::{
    mass_bound, solve_ma, solve_ma_from, MASolution, Method, SolveOptions, BOUND_MARGIN,
};
pub use weight::{
    integrate_polygon, plane_integral, unit_weight, ConstantWeight, FnWeight, Quadrature,
    QuadratureFailure, SharedWeight, Weight,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MAError {
    #[error("invalid problem: {0}")]
    InvalidProblem(&'static str),
    #[error("node {0} is not a vertex of the envelope")]
    NotEnvelopeVertex(usize),
    #[error("node {0} has an unbounded cell; give a slope window")]
    UnboundedCell(usize),
    #[error(transparent)]
    Quadrature(#[from] QuadratureFailure),
    #[error("total mass {total} exceeds the attainable bound {bound}")]
    Infeasible { total: f64, bound: f64 },
    #[error("no convergence after {iterations} iterations; best relative residual {residual}")]
    MaxIterExceeded { iterations: usize, residual: f64 },
    #[error("problems are not comparable: {0}")]
    IncomparableProblems(&'static str),
    #[error("continuation step fell below the minimum after t = {last_t}")]
    MinStepReached { last_t: f64 },
}
