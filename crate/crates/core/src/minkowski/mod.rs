//! The discrete Minkowski problem: a convex polytope from its face normals
//! and face areas, unique up to translation when the areas close up.

mod curvature;
mod solve;

use alloc::vec::Vec;

use crate::polytope::{check_positive_span, ConvexPolytope, GeometryError};
use crate::Vector3;

pub use curvature::{discretize_curvature, icosphere, CurvatureSample, Discretization};
pub use solve::{
    area_map, solve_minkowski, solve_minkowski_from, MinkowskiOptions, MinkowskiSolution,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MinkowskiError {
    #[error("invalid problem: {0}")]
    InvalidProblem(&'static str),
    #[error("curvature at cell {0} is not positive")]
    NegativeCurvature(usize),
    #[error("closing defect {defect} exceeds {threshold}")]
    ClosingDefect { defect: f64, threshold: f64 },
    #[error("faces {0:?} vanish at the optimum")]
    DegenerateFace(Vec<usize>),
    #[error("no convergence after {iterations} iterations; residual {residual}")]
    MaxIterExceeded { iterations: usize, residual: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Prescribed outer unit normals and face areas.
#[derive(Clone, Debug, PartialEq)]
pub struct MinkowskiProblem {
    normals: Vec<Vector3>,
    areas: Vec<f64>,
}

impl MinkowskiProblem {
    /// Checks unit length, distinctness, positive areas and that the
    /// normals span space positively. Closing is checked by the solver.
    pub fn new(normals: Vec<Vector3>, areas: Vec<f64>) -> Result<Self, MinkowskiError> {
        if normals.len() != areas.len() {
            return Err(MinkowskiError::InvalidProblem(
                "normals and areas differ in length",
            ));
        }
        if normals.len() < 4 {
            return Err(MinkowskiError::InvalidProblem("need at least 4 normals"));
        }
        if normals
            .iter()
            .any(|n| !n.iter().all(|x| x.is_finite()) || (n.norm() - 1.0).abs() > 1e-9)
        {
            return Err(MinkowskiError::InvalidProblem(
                "normals must be unit vectors",
            ));
        }
        if areas.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(MinkowskiError::InvalidProblem("areas must be positive"));
        }
        for i in 0..normals.len() {
            for j in 0..i {
                if (normals[i] - normals[j]).norm() < 1e-9 {
                    return Err(MinkowskiError::InvalidProblem("normals must be distinct"));
                }
            }
        }
        check_positive_span(&normals)?;
        Ok(Self { normals, areas })
    }

    /// Normals and areas of the nondegenerate faces of `p`.
    pub fn from_polytope(p: &ConvexPolytope) -> Result<Self, MinkowskiError> {
        let (normals, areas) = p
            .normals()
            .iter()
            .zip(p.areas())
            .filter(|(_, &a)| a > 0.0)
            .map(|(n, a)| (*n, *a))
            .unzip();
        Self::new(normals, areas)
    }

    pub fn normals(&self) -> &[Vector3] {
        &self.normals
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }
}

/// `Σ Aᵢ nᵢ`, zero for the face data of a closed body.
pub fn check_closing(problem: &MinkowskiProblem) -> Vector3 {
    crate::polytope::closing_defect(&problem.normals, &problem.areas)
}
