//! Dirichlet problems for the measure equation.

use alloc::vec::Vec;
use core::fmt;

use super::plfunc::PLConvexFunction;
use super::weight::{integrate_polygon, unit_weight, Quadrature, SharedWeight};
use super::MAError;
use crate::planar::{cross2, intersect_halfplanes, signed_area, HalfPlane};
use crate::Point2;

/// Find a convex `u` on the polygon `domain` with `u = boundary_values` at
/// `boundary_nodes` and conditional curvature `masses[i]` at
/// `interior_nodes[i]`.
///
/// In the induced [`PLConvexFunction`] boundary nodes come first, then the
/// interior nodes.
#[derive(Clone)]
pub struct MAProblem {
    /// Counterclockwise convex polygon.
    pub domain: Vec<Point2>,
    pub boundary_nodes: Vec<Point2>,
    pub boundary_values: Vec<f64>,
    pub interior_nodes: Vec<Point2>,
    pub masses: Vec<f64>,
    pub weight: SharedWeight,
}

impl fmt::Debug for MAProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MAProblem")
            .field("domain", &self.domain)
            .field("boundary_nodes", &self.boundary_nodes)
            .field("boundary_values", &self.boundary_values)
            .field("interior_nodes", &self.interior_nodes)
            .field("masses", &self.masses)
            .field("constant_weight", &self.weight.constant())
            .finish()
    }
}

impl MAProblem {
    /// Unit weight; the domain is the convex hull of the boundary nodes.
    pub fn new(
        boundary_nodes: Vec<Point2>,
        boundary_values: Vec<f64>,
        interior_nodes: Vec<Point2>,
        masses: Vec<f64>,
    ) -> Self {
        let hull = crate::planar::convex_hull_indices(&boundary_nodes, 0.0);
        let domain = hull.into_iter().map(|i| boundary_nodes[i]).collect();
        Self {
            domain,
            boundary_nodes,
            boundary_values,
            interior_nodes,
            masses,
            weight: unit_weight(),
        }
    }

    pub fn with_weight(mut self, weight: SharedWeight) -> Self {
        self.weight = weight;
        self
    }

    pub fn num_boundary(&self) -> usize {
        self.boundary_nodes.len()
    }

    pub fn num_interior(&self) -> usize {
        self.interior_nodes.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Envelope data for given interior values.
    pub fn function(&self, interior_values: &[f64]) -> PLConvexFunction {
        let mut nodes = self.boundary_nodes.clone();
        nodes.extend_from_slice(&self.interior_nodes);
        let mut values = self.boundary_values.clone();
        values.extend_from_slice(interior_values);
        PLConvexFunction::new(nodes, values).expect("validated problem")
    }

    pub fn validate(&self) -> Result<(), MAError> {
        if self.boundary_nodes.len() != self.boundary_values.len() {
            return Err(MAError::InvalidProblem(
                "boundary nodes and values differ in length",
            ));
        }
        if self.interior_nodes.len() != self.masses.len() {
            return Err(MAError::InvalidProblem(
                "interior nodes and masses differ in length",
            ));
        }
        if self.interior_nodes.is_empty() {
            return Err(MAError::InvalidProblem("no interior nodes"));
        }
        if self.domain.len() < 3 || signed_area(&self.domain) <= 0.0 {
            return Err(MAError::InvalidProblem(
                "domain must be a counterclockwise polygon",
            ));
        }
        if self.masses.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
            return Err(MAError::InvalidProblem(
                "masses must be positive and finite",
            ));
        }
        if self.boundary_values.iter().any(|v| !v.is_finite()) {
            return Err(MAError::InvalidProblem("non-finite boundary value"));
        }
        let d = &self.domain;
        let n = d.len();
        let scale = d.iter().map(|p| (p - d[0]).norm()).fold(0.0, f64::max);
        let eps = 1e-12 * scale;
        let side = |x: Point2| -> f64 {
            (0..n)
                .map(|k| cross2(d[(k + 1) % n] - d[k], x - d[k]) / (d[(k + 1) % n] - d[k]).norm())
                .fold(f64::INFINITY, f64::min)
        };
        for k in 0..n {
            if cross2(d[(k + 1) % n] - d[k], d[(k + 2) % n] - d[(k + 1) % n]) < 0.0 {
                return Err(MAError::InvalidProblem("domain must be convex"));
            }
        }
        if self.interior_nodes.iter().any(|&x| side(x) <= eps) {
            return Err(MAError::InvalidProblem(
                "interior node not strictly inside the domain",
            ));
        }
        if self.boundary_nodes.iter().any(|&x| side(x).abs() > eps) {
            return Err(MAError::InvalidProblem(
                "boundary node off the domain boundary",
            ));
        }
        for v in d {
            if !self.boundary_nodes.iter().any(|b| (b - v).norm() <= eps) {
                return Err(MAError::InvalidProblem(
                    "every domain corner must be a boundary node",
                ));
            }
        }
        // Positivity of θ, sampled on slopes up to the boundary slope scale.
        let f = self.function(&alloc::vec![0.0; self.num_interior()]);
        let slope = self
            .boundary_values
            .iter()
            .fold(0.0f64, |s, v| s.max(v.abs()))
            / scale.max(f64::MIN_POSITIVE)
            + 1.0;
        for (k, &x) in f.nodes().iter().enumerate().step_by(1 + f.len() / 8) {
            for a in -3i32..=3 {
                for b in -3i32..=3 {
                    let p = Point2::new(a as f64, b as f64) * (slope / 3.0);
                    let v = self.weight.eval(p, f.values()[k], x);
                    if !(v.is_finite() && v > 0.0) {
                        return Err(MAError::InvalidProblem("weight must be positive"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `μᵢ = ∫ φ` over the Voronoi cell of interior node `i` within `domain`,
/// the Voronoi diagram taken over all nodes (boundary cells are dropped).
pub fn voronoi_masses<G: Fn(Point2) -> f64>(
    domain: &[Point2],
    boundary_nodes: &[Point2],
    interior_nodes: &[Point2],
    phi: &G,
) -> Result<Vec<f64>, MAError> {
    let mut all = boundary_nodes.to_vec();
    all.extend_from_slice(interior_nodes);
    let n = domain.len();
    let extent = domain.iter().map(|p| p.amax()).fold(0.0, f64::max) * 2.0 + 1.0;
    let nb = boundary_nodes.len();
    (0..interior_nodes.len())
        .map(|k| {
            let i = nb + k;
            let bi = all[i];
            let mut hps: Vec<HalfPlane> = (0..all.len())
                .filter(|&j| j != i)
                .map(|j| {
                    HalfPlane::new(
                        all[j] - bi,
                        0.5 * (all[j].norm_squared() - bi.norm_squared()),
                        j,
                    )
                })
                .collect();
            for e in 0..n {
                let (a, b) = (domain[e], domain[(e + 1) % n]);
                let nrm = Point2::new(b.y - a.y, a.x - b.x);
                hps.push(HalfPlane::new(nrm, nrm.dot(&a), all.len() + e));
            }
            let cell = intersect_halfplanes(&hps, Point2::zeros(), extent, 1e-14 * extent);
            Ok(integrate_polygon(
                phi,
                &cell.vertices,
                Quadrature {
                    relative: 1e-8,
                    max_depth: 10,
                },
            )?)
        })
        .collect()
}
