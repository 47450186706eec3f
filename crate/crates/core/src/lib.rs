//! Convex geometry in the large, at polyhedral scale.
//!
//! `polyconvex` is a `no_std` (with `alloc`) toolkit covering five areas:
//!
//! - [`polytope`]: convex hulls, halfspace intersections, support numbers,
//!   closing defects and normal-cone (spherical image) areas of 3-D convex
//!   polytopes.
//! - [`intrinsic`]: polyhedral metrics given as nets of planar polygons:
//!   gluing-condition validation, vertex curvatures `2π − θ`, shortest paths
//!   by exhaustive unfolding, comparison angles and triangle excess.
//! - [`monge_ampere`]: generalized solutions of the two-dimensional
//!   Monge–Ampère equation as piecewise-linear convex functions, their
//!   subgradient (conditional-curvature) measures, Dirichlet solves,
//!   comparison, homotopy continuation and a Liouville probe.
//! - [`minkowski`]: the discrete Minkowski problem (polytope from face normals
//!   and areas) via the variational principle, plus curvature sampling on the
//!   sphere.
//! - [`rigidity`]: first-order isometric deformations of triangulated surfaces
//!   and the bending equation for the vertical component over a convex graph.
//!
//! File formats, reports and the command-line front end live in the
//! companion `polyconvex-tools` crate.

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod intrinsic;
pub mod linalg;
pub mod minkowski;
pub mod monge_ampere;
pub mod planar;
pub mod polytope;
pub mod rigidity;
pub mod tolerance;

pub use tolerance::Tolerance;

/// Position and direction vectors in space.
pub type Vector3 = nalgebra::Vector3<f64>;

/// Points and vectors in a plane (polygon frames, slope space).
pub type Point2 = nalgebra::Vector2<f64>;
