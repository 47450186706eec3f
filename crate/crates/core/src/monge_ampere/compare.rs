//! Comparison of solutions with ordered data.

use alloc::vec::Vec;

use super::plfunc::PLConvexFunction;
use super::problem::MAProblem;
use super::MAError;

/// Outcome of comparing `u1` against `u2` node by node.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    /// `max_i (u1ᵢ − u2ᵢ)`; non-positive when the principle holds.
    pub max_gap: f64,
    /// Nodes with `u1ᵢ > u2ᵢ + tol`.
    pub violations: Vec<usize>,
    pub tolerance: f64,
}

impl ComparisonReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Larger masses and smaller boundary values give a smaller solution:
/// with `μ¹ ≥ μ²` and `g¹ ≤ g²`, check `u1 ≤ u2` at every node.
pub fn maximum_principle_check(
    u1: &PLConvexFunction,
    u2: &PLConvexFunction,
    problem1: &MAProblem,
    problem2: &MAProblem,
    tol: f64,
) -> Result<ComparisonReport, MAError> {
    if problem1.boundary_nodes != problem2.boundary_nodes
        || problem1.interior_nodes != problem2.interior_nodes
    {
        return Err(MAError::IncomparableProblems("node sets differ"));
    }
    if u1.nodes() != u2.nodes() || u1.len() != problem1.num_boundary() + problem1.num_interior() {
        return Err(MAError::IncomparableProblems(
            "functions do not match the problems' nodes",
        ));
    }
    if problem1
        .masses
        .iter()
        .zip(&problem2.masses)
        .any(|(a, b)| a < b)
    {
        return Err(MAError::IncomparableProblems(
            "masses of the first problem must dominate",
        ));
    }
    if problem1
        .boundary_values
        .iter()
        .zip(&problem2.boundary_values)
        .any(|(a, b)| a > b)
    {
        return Err(MAError::IncomparableProblems(
            "boundary values of the first problem must be smaller",
        ));
    }
    let mut max_gap = f64::NEG_INFINITY;
    let mut violations = Vec::new();
    for (i, (a, b)) in u1.values().iter().zip(u2.values()).enumerate() {
        let gap = a - b;
        max_gap = max_gap.max(gap);
        if gap > tol {
            violations.push(i);
        }
    }
    Ok(ComparisonReport {
        max_gap,
        violations,
        tolerance: tol,
    })
}
