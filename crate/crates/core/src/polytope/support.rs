//! Bodies from face normals and support numbers: `{x : ⟨x, nᵢ⟩ ≤ hᵢ}`.

use alloc::vec::Vec;

use super::{convex_hull_with, ConvexPolytope, GeometryError};
use crate::planar::{intersect_halfplanes, EdgeTag, HalfPlane};
use crate::{Point2, Tolerance, Vector3};

/// Halfspace intersection together with the face adjacency it induces.
#[derive(Clone, Debug)]
pub struct SupportCells {
    pub polytope: ConvexPolytope,
    /// For each face `i`, its edges as `(j, length)`: the neighbouring face
    /// whose plane cuts the edge, and the edge length.
    pub adjacency: Vec<Vec<(usize, f64)>>,
}

pub fn polytope_from_support(
    normals: &[Vector3],
    support_numbers: &[f64],
) -> Result<ConvexPolytope, GeometryError> {
    polytope_from_support_with(normals, support_numbers, Tolerance::default()).map(|c| c.polytope)
}

/// Halfspace intersection. Face slot `i` corresponds to `normals[i]`; faces
/// whose plane does not touch the body are kept with an empty cycle and
/// area 0.
pub fn polytope_from_support_with(
    normals: &[Vector3],
    support_numbers: &[f64],
    tol: Tolerance,
) -> Result<SupportCells, GeometryError> {
    let m = normals.len();
    if m != support_numbers.len() {
        return Err(GeometryError::InvalidInput(
            "normals and support numbers differ in length",
        ));
    }
    if m < 4 {
        return Err(GeometryError::UnboundedBody);
    }
    if normals.iter().any(|n| (n.norm() - 1.0).abs() > 1e-9) {
        return Err(GeometryError::InvalidInput("normals must be unit vectors"));
    }
    if support_numbers.iter().any(|h| !h.is_finite()) {
        return Err(GeometryError::InvalidInput("non-finite support number"));
    }
    check_positive_span(normals)?;
    support_cells(normals, support_numbers, tol)
}

/// [`polytope_from_support_with`] for normals already known to span space
/// positively.
pub(crate) fn support_cells(
    normals: &[Vector3],
    support_numbers: &[f64],
    tol: Tolerance,
) -> Result<SupportCells, GeometryError> {
    let scale = support_numbers
        .iter()
        .fold(0.0f64, |s, h| s.max(h.abs()))
        .max(f64::MIN_POSITIVE);
    let eps = tol.absolute(scale);
    let mut half = 8.0 * scale;
    loop {
        let faces = clip_faces(normals, support_numbers, half, eps * 1e-3);
        let unbounded = faces.iter().any(|(poly, _, _, _)| poly.touches_bound(eps));
        if !unbounded {
            return assemble(normals, faces, eps);
        }
        half *= 16.0;
        if half > 1e12 * scale {
            return Err(GeometryError::UnboundedBody);
        }
    }
}

/// Clipped face polygon in its plane frame `(e1, e2)` about `origin`.
type FaceClip = (crate::planar::TaggedPolygon, Vector3, Vector3, Vector3);

fn clip_faces(normals: &[Vector3], h: &[f64], half: f64, eps: f64) -> Vec<FaceClip> {
    let m = normals.len();
    (0..m)
        .map(|i| {
            let n = normals[i];
            let e1 = super::any_orthogonal(&n);
            let e2 = n.cross(&e1);
            let origin = n * h[i];
            let mut hps = Vec::with_capacity(m - 1);
            let mut empty = false;
            for j in 0..m {
                if j == i {
                    continue;
                }
                let nj = normals[j];
                let a = Point2::new(e1.dot(&nj), e2.dot(&nj));
                let rhs = h[j] - origin.dot(&nj);
                if a.norm() < 1e-12 {
                    if rhs < -eps {
                        empty = true;
                    }
                    continue;
                }
                hps.push(HalfPlane::new(a, rhs, j));
            }
            let poly = if empty {
                Default::default()
            } else {
                intersect_halfplanes(&hps, Point2::zeros(), half, eps)
            };
            (poly, e1, e2, origin)
        })
        .collect()
}

fn assemble(
    normals: &[Vector3],
    faces: Vec<FaceClip>,
    eps: f64,
) -> Result<SupportCells, GeometryError> {
    let mut vertices: Vec<Vector3> = Vec::new();
    let merge = 1e3 * eps;
    let mut find_or_insert = |p: Vector3| -> usize {
        if let Some(k) = vertices.iter().position(|v| (v - p).norm() <= merge) {
            k
        } else {
            vertices.push(p);
            vertices.len() - 1
        }
    };
    let mut cycles = Vec::with_capacity(faces.len());
    let mut areas = Vec::with_capacity(faces.len());
    let mut adjacency = Vec::with_capacity(faces.len());
    for (poly, e1, e2, origin) in faces.iter() {
        let area = poly.area();
        if poly.vertices.len() < 3 || area <= eps * eps {
            cycles.push(Vec::new());
            areas.push(0.0);
            adjacency.push(Vec::new());
            continue;
        }
        let lift = |p: Point2| origin + e1 * p.x + e2 * p.y;
        let mut cycle: Vec<usize> = Vec::with_capacity(poly.vertices.len());
        for &p in &poly.vertices {
            let k = find_or_insert(lift(p));
            if cycle.last() != Some(&k) && cycle.first() != Some(&k) {
                cycle.push(k);
            }
        }
        let adj: Vec<(usize, f64)> = (0..poly.vertices.len())
            .filter_map(|k| match poly.tags[k] {
                EdgeTag::Constraint(j) => {
                    let (a, b) = poly.edge(k);
                    Some((j, (b - a).norm()))
                }
                EdgeTag::Bound(_) => None,
            })
            .collect();
        if cycle.len() < 3 {
            cycles.push(Vec::new());
            areas.push(0.0);
            adjacency.push(Vec::new());
        } else {
            cycles.push(cycle);
            areas.push(area);
            adjacency.push(adj);
        }
    }
    if vertices.len() < 4 || areas.iter().filter(|&&a| a > 0.0).count() < 4 {
        return Err(GeometryError::EmptyBody);
    }
    let polytope = ConvexPolytope::from_parts(vertices, cycles, normals.to_vec(), areas);
    if polytope.volume() <= eps * eps * eps {
        return Err(GeometryError::EmptyBody);
    }
    Ok(SupportCells {
        polytope,
        adjacency,
    })
}

/// Fails with `UnboundedBody` unless the origin lies strictly inside the
/// convex hull of the normals.
pub(crate) fn check_positive_span(normals: &[Vector3]) -> Result<(), GeometryError> {
    let hull = convex_hull_with(normals, Tolerance::new(1e-12))
        .map_err(|_| GeometryError::UnboundedBody)?;
    if hull.support_numbers().iter().any(|&h| h <= 1e-12) {
        return Err(GeometryError::UnboundedBody);
    }
    Ok(())
}
