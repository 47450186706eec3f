//! Convex hull by exhaustive supporting-plane enumeration.
//!
//! Every triple of input points spans a candidate plane; a candidate is a
//! face plane when all points lie on one side of it within tolerance.
//! Coplanar points end up in one polygonal face, ordered by a strict planar
//! hull, so cubes come out with square faces and points in the middle of an
//! edge or face are not vertices. Cost is O(n³) candidates with early
//! rejection, which is fine at the sizes this crate targets (a few hundred
//! points).

use alloc::vec::Vec;

use super::{diameter, vector_area, ConvexPolytope, GeometryError};
use crate::planar::convex_hull_indices;
use crate::{Point2, Tolerance, Vector3};

pub fn convex_hull(points: &[Vector3]) -> Result<ConvexPolytope, GeometryError> {
    convex_hull_with(points, Tolerance::default())
}

pub fn convex_hull_with(
    points: &[Vector3],
    tol: Tolerance,
) -> Result<ConvexPolytope, GeometryError> {
    if points.len() < 4 {
        return Err(GeometryError::DegenerateInput("need at least 4 points"));
    }
    if points.iter().any(|p| !p.iter().all(|x| x.is_finite())) {
        return Err(GeometryError::InvalidInput("non-finite coordinate"));
    }
    let diam = diameter(points);
    let eps = tol.absolute(diam);
    check_full_dimensional(points, eps)?;

    let n = points.len();
    // Face candidates: (outer normal, offset, indices of points on the plane).
    let mut planes: Vec<(Vector3, f64, Vec<usize>)> = Vec::new();
    let mut faces_of: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if shares_face(&faces_of, i, j, k) {
                    continue;
                }
                let cr = (points[j] - points[i]).cross(&(points[k] - points[i]));
                let len = cr.norm();
                if len <= eps * diam {
                    continue;
                }
                let nrm = cr / len;
                let off = nrm.dot(&points[i]);
                let mut above = false;
                let mut below = false;
                for p in points {
                    let d = nrm.dot(p) - off;
                    above |= d > eps;
                    below |= d < -eps;
                    if above && below {
                        break;
                    }
                }
                if above && below {
                    continue;
                }
                let (nrm, off) = if above { (-nrm, -off) } else { (nrm, off) };
                let on: Vec<usize> = (0..n)
                    .filter(|&m| (nrm.dot(&points[m]) - off).abs() <= eps)
                    .collect();
                let f = planes.len();
                for &m in &on {
                    faces_of[m].push(f);
                }
                planes.push((nrm, off, on));
            }
        }
    }

    // Order each face by its strict planar hull, counterclockwise about the
    // outer normal.
    let mut cycles: Vec<Vec<usize>> = Vec::with_capacity(planes.len());
    for (nrm, _, on) in &planes {
        let e1 = super::any_orthogonal(nrm);
        let e2 = nrm.cross(&e1);
        let flat: Vec<Point2> = on
            .iter()
            .map(|&m| Point2::new(points[m].dot(&e1), points[m].dot(&e2)))
            .collect();
        let hull = convex_hull_indices(&flat, eps);
        if hull.len() >= 3 {
            cycles.push(hull.into_iter().map(|h| on[h]).collect());
        }
    }

    // Compact vertex numbering in input order.
    let mut remap: Vec<Option<usize>> = alloc::vec![None; n];
    let mut used: Vec<bool> = alloc::vec![false; n];
    for c in &cycles {
        for &m in c {
            used[m] = true;
        }
    }
    let mut vertices = Vec::new();
    for m in 0..n {
        if used[m] {
            remap[m] = Some(vertices.len());
            vertices.push(points[m]);
        }
    }
    let faces: Vec<Vec<usize>> = cycles
        .iter()
        .map(|c| c.iter().map(|&m| remap[m].expect("used vertex")).collect())
        .collect();
    let mut normals = Vec::with_capacity(faces.len());
    let mut areas = Vec::with_capacity(faces.len());
    for face in &faces {
        let va = vector_area(&vertices, face);
        let a = va.norm();
        normals.push(va / a);
        areas.push(a);
    }
    Ok(ConvexPolytope::from_parts(vertices, faces, normals, areas))
}

fn shares_face(faces_of: &[Vec<usize>], i: usize, j: usize, k: usize) -> bool {
    faces_of[i]
        .iter()
        .any(|f| faces_of[j].contains(f) && faces_of[k].contains(f))
}

fn check_full_dimensional(points: &[Vector3], eps: f64) -> Result<(), GeometryError> {
    let a = points[0];
    let b = points
        .iter()
        .max_by(|p, q| (*p - a).norm().partial_cmp(&(*q - a).norm()).unwrap())
        .copied()
        .unwrap();
    let ab = b - a;
    if ab.norm() <= eps {
        return Err(GeometryError::DegenerateInput("points coincide"));
    }
    let c = points
        .iter()
        .max_by(|p, q| {
            ab.cross(&(*p - a))
                .norm()
                .partial_cmp(&ab.cross(&(*q - a)).norm())
                .unwrap()
        })
        .copied()
        .unwrap();
    let nrm = ab.cross(&(c - a));
    if nrm.norm() <= eps * ab.norm() {
        return Err(GeometryError::DegenerateInput("points are collinear"));
    }
    let nrm = nrm.normalize();
    if points.iter().all(|p| nrm.dot(&(p - a)).abs() <= eps) {
        return Err(GeometryError::DegenerateInput("points are coplanar"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::PI;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sphere_points(n: usize, seed: u64) -> Vec<Vector3> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| loop {
                let v = Vector3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                );
                if v.norm() > 0.1 && v.norm() < 1.0 {
                    break v.normalize();
                }
            })
            .collect()
    }

    #[test]
    fn cube_corners_give_six_unit_squares() {
        let mut pts = vec![];
        for &x in &[-0.5, 0.5] {
            for &y in &[-0.5, 0.5] {
                for &z in &[-0.5, 0.5] {
                    pts.push(Vector3::new(x, y, z));
                }
            }
        }
        // Face centers and an interior point must not become vertices.
        pts.push(Vector3::new(0.5, 0.0, 0.0));
        pts.push(Vector3::new(0.1, 0.1, 0.1));
        let c = convex_hull(&pts).unwrap();
        assert_eq!(c.vertices().len(), 8);
        assert_eq!(c.num_faces(), 6);
        for i in 0..6 {
            assert!((c.areas()[i] - 1.0).abs() < 1e-12);
            assert!((c.support_numbers()[i] - 0.5).abs() < 1e-12);
            let n = c.normals()[i];
            assert!((n.abs().max() - 1.0).abs() < 1e-12);
            assert_eq!(c.faces()[i].len(), 4);
        }
    }

    #[test]
    fn regular_tetrahedron() {
        let pts = [
            Vector3::new(1.0, 1.0, 1.0),
            Vector3::new(1.0, -1.0, -1.0),
            Vector3::new(-1.0, 1.0, -1.0),
            Vector3::new(-1.0, -1.0, 1.0),
        ];
        let t = convex_hull(&pts).unwrap();
        assert_eq!(t.num_faces(), 4);
        assert!(t.faces().iter().all(|f| f.len() == 3));
        for v in 0..4 {
            assert!((t.normal_cone_area(v).unwrap() - PI).abs() < 1e-12);
        }
    }

    #[test]
    fn faces_are_counterclockwise_from_outside() {
        let pts = sphere_points(40, 3);
        let p = convex_hull(&pts).unwrap();
        for (f, face) in p.faces().iter().enumerate() {
            let va = vector_area(p.vertices(), face);
            assert!(va.dot(&p.normals()[f]) > 0.0);
            assert!(p.centroid().dot(&p.normals()[f]) < p.support_numbers()[f]);
        }
        p.check_invariants(Tolerance::default()).unwrap();
    }

    #[test]
    fn random_sphere_hull_closes() {
        let pts = sphere_points(50, 11);
        let p = convex_hull(&pts).unwrap();
        let total: f64 = p.areas().iter().sum();
        assert!(p.closing_defect().norm() <= 1e-9 * total);
        // Euler characteristic of the boundary complex.
        let v = p.vertices().len() as i64;
        let e = p.edges().len() as i64;
        let f = p.num_faces() as i64;
        assert_eq!(v - e + f, 2);
        let cones: f64 = (0..p.vertices().len())
            .map(|k| p.normal_cone_area(k).unwrap())
            .sum();
        assert!((cones - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let flat = [
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::x(),
            Vector3::y(),
            Vector3::new(1.0, 1.0, 0.0),
        ];
        assert!(matches!(
            convex_hull(&flat),
            Err(GeometryError::DegenerateInput(_))
        ));
        let line = [
            Vector3::zeros(),
            Vector3::x(),
            Vector3::x() * 2.0,
            Vector3::x() * 3.0,
        ];
        assert!(matches!(
            convex_hull(&line),
            Err(GeometryError::DegenerateInput(_))
        ));
        assert!(convex_hull(&line[..3]).is_err());
    }
}
