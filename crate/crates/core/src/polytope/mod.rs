//! Convex polytopes in space: construction, face data and curvature of
//! vertices measured by their spherical image.

mod hull;
mod support;

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

pub use hull::{convex_hull, convex_hull_with};
pub(crate) use support::{check_positive_span, support_cells};
pub use support::{polytope_from_support, polytope_from_support_with, SupportCells};

use crate::{Tolerance, Vector3};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("normals do not positively span space; the body is unbounded")]
    UnboundedBody,
    #[error("halfspace intersection is empty")]
    EmptyBody,
    #[error("vertex {0} has a flat normal cone")]
    DegenerateVertex(usize),
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
    #[error("faces do not bound a convex body: {0}")]
    NotConvex(&'static str),
}

/// Boundary complex of a bounded convex body.
///
/// Face `i` is a vertex cycle, counterclockwise seen from outside, with unit
/// outer normal `normals[i]`, area `areas[i]` and support number
/// `support_numbers[i] = max_v ⟨v, normals[i]⟩`. Bodies built from support
/// data keep one face slot per input normal; a slot whose plane does not
/// touch the body has an empty cycle and area 0.
#[derive(Clone, Debug)]
pub struct ConvexPolytope {
    vertices: Vec<Vector3>,
    faces: Vec<Vec<usize>>,
    normals: Vec<Vector3>,
    areas: Vec<f64>,
    support_numbers: Vec<f64>,
}

impl ConvexPolytope {
    /// Assemble from vertex positions and face cycles, deriving normals,
    /// areas and support numbers. Faces may be given in either orientation;
    /// they are reoriented outward. Fails if the faces are not planar or the
    /// body is not convex within `tol`.
    pub fn from_faces(
        vertices: Vec<Vector3>,
        faces: Vec<Vec<usize>>,
        tol: Tolerance,
    ) -> Result<Self, GeometryError> {
        if vertices.len() < 4 || faces.len() < 4 {
            return Err(GeometryError::DegenerateInput(
                "need at least 4 vertices and 4 faces",
            ));
        }
        if faces.iter().flatten().any(|&i| i >= vertices.len()) {
            return Err(GeometryError::InvalidInput(
                "face refers to a missing vertex",
            ));
        }
        let eps = tol.absolute(diameter(&vertices));
        let center = vertices.iter().fold(Vector3::zeros(), |s, v| s + v) / vertices.len() as f64;
        let mut faces = faces;
        let mut normals = Vec::with_capacity(faces.len());
        let mut areas = Vec::with_capacity(faces.len());
        for face in faces.iter_mut() {
            if face.len() < 3 {
                return Err(GeometryError::DegenerateInput(
                    "face with fewer than 3 vertices",
                ));
            }
            let mut va = vector_area(&vertices, face);
            let c = face.iter().fold(Vector3::zeros(), |s, &i| s + vertices[i]) / face.len() as f64;
            if va.dot(&(c - center)) < 0.0 {
                face.reverse();
                va = -va;
            }
            let area = va.norm();
            if area <= eps * eps {
                return Err(GeometryError::DegenerateInput("face with zero area"));
            }
            let n = va / area;
            if face.iter().any(|&i| (vertices[i] - c).dot(&n).abs() > eps) {
                return Err(GeometryError::NotConvex("face is not planar"));
            }
            normals.push(n);
            areas.push(area);
        }
        for (face, n) in faces.iter().zip(&normals) {
            let off = vertices[face[0]].dot(n);
            if vertices.iter().any(|v| v.dot(n) - off > eps) {
                return Err(GeometryError::NotConvex(
                    "a vertex lies outside a face plane",
                ));
            }
        }
        let support_numbers = support_of(&vertices, &normals);
        Ok(Self {
            vertices,
            faces,
            normals,
            areas,
            support_numbers,
        })
    }

    pub(crate) fn from_parts(
        vertices: Vec<Vector3>,
        faces: Vec<Vec<usize>>,
        normals: Vec<Vector3>,
        areas: Vec<f64>,
    ) -> Self {
        let support_numbers = support_of(&vertices, &normals);
        Self {
            vertices,
            faces,
            normals,
            areas,
            support_numbers,
        }
    }

    pub fn vertices(&self) -> &[Vector3] {
        &self.vertices
    }
    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }
    pub fn normals(&self) -> &[Vector3] {
        &self.normals
    }
    pub fn areas(&self) -> &[f64] {
        &self.areas
    }
    pub fn support_numbers(&self) -> &[f64] {
        &self.support_numbers
    }
    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn diameter(&self) -> f64 {
        diameter(&self.vertices)
    }

    pub fn surface_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    /// Σ Aᵢ nᵢ over the faces.
    pub fn closing_defect(&self) -> Vector3 {
        closing_defect(&self.normals, &self.areas)
    }

    /// Volume by tetrahedral decomposition from the vertex mean.
    pub fn volume(&self) -> f64 {
        self.volume_and_centroid().0
    }

    /// Centroid of the solid body.
    pub fn centroid(&self) -> Vector3 {
        self.volume_and_centroid().1
    }

    fn volume_and_centroid(&self) -> (f64, Vector3) {
        let o = self.vertices.iter().fold(Vector3::zeros(), |s, v| s + v)
            / self.vertices.len().max(1) as f64;
        let mut vol = 0.0;
        let mut moment = Vector3::zeros();
        for face in self.faces.iter().filter(|f| f.len() >= 3) {
            let a = self.vertices[face[0]] - o;
            for k in 1..face.len() - 1 {
                let b = self.vertices[face[k]] - o;
                let c = self.vertices[face[k + 1]] - o;
                let v = a.dot(&b.cross(&c)) / 6.0;
                vol += v;
                moment += (a + b + c) * (v / 4.0);
            }
        }
        let centroid = if vol > 0.0 { o + moment / vol } else { o };
        (vol, centroid)
    }

    pub fn translated(&self, t: Vector3) -> Self {
        let vertices: Vec<Vector3> = self.vertices.iter().map(|v| v + t).collect();
        let support_numbers = self
            .support_numbers
            .iter()
            .zip(&self.normals)
            .map(|(h, n)| h + n.dot(&t))
            .collect();
        Self {
            vertices,
            support_numbers,
            ..self.clone()
        }
    }

    /// Homothety about the origin, `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        assert!(factor > 0.0, "scale factor must be positive");
        Self {
            vertices: self.vertices.iter().map(|v| v * factor).collect(),
            faces: self.faces.clone(),
            normals: self.normals.clone(),
            areas: self.areas.iter().map(|a| a * factor * factor).collect(),
            support_numbers: self.support_numbers.iter().map(|h| h * factor).collect(),
        }
    }

    /// Translate so the solid centroid sits at the origin.
    pub fn centered(&self) -> Self {
        self.translated(-self.centroid())
    }

    /// Faces incident to vertex `v` (non-degenerate faces only).
    pub fn incident_faces(&self, v: usize) -> Vec<usize> {
        (0..self.faces.len())
            .filter(|&f| self.faces[f].len() >= 3 && self.faces[f].contains(&v))
            .collect()
    }

    /// Undirected edges `(a, b)` with `a < b`, each with its two faces.
    pub fn edges(&self) -> Vec<(usize, usize, usize, usize)> {
        let mut half: Vec<(usize, usize, usize)> = Vec::new();
        for (f, face) in self.faces.iter().enumerate() {
            for k in 0..face.len() {
                half.push((face[k], face[(k + 1) % face.len()], f));
            }
        }
        let mut out = Vec::new();
        for &(a, b, f) in &half {
            if a < b {
                if let Some(&(_, _, g)) = half.iter().find(|&&(c, d, _)| c == b && d == a) {
                    out.push((a, b, f, g));
                }
            }
        }
        out
    }

    /// Spherical area of the normal cone at vertex `v`: the solid angle
    /// spanned by the outer normals of its incident faces.
    pub fn normal_cone_area(&self, v: usize) -> Result<f64, GeometryError> {
        if v >= self.vertices.len() {
            return Err(GeometryError::InvalidInput("vertex index out of range"));
        }
        let normals: Vec<Vector3> = self
            .incident_faces(v)
            .into_iter()
            .map(|f| self.normals[f])
            .collect();
        spherical_polygon_area(&normals).ok_or(GeometryError::DegenerateVertex(v))
    }

    /// Check the type invariants within `tol`; returns a description of the
    /// first violation.
    pub fn check_invariants(&self, tol: Tolerance) -> Result<(), &'static str> {
        let eps = tol.absolute(self.diameter());
        for (i, face) in self.faces.iter().enumerate() {
            if face.is_empty() {
                continue;
            }
            let n = self.normals[i];
            if (n.norm() - 1.0).abs() > 1e-9 {
                return Err("normal is not unit length");
            }
            let h = self.support_numbers[i];
            if face
                .iter()
                .any(|&k| (self.vertices[k].dot(&n) - h).abs() > eps)
            {
                return Err("face vertex off its support plane");
            }
        }
        for v in &self.vertices {
            for (i, n) in self.normals.iter().enumerate() {
                if !self.faces[i].is_empty() && v.dot(n) > self.support_numbers[i] + eps {
                    return Err("vertex outside a face halfspace");
                }
            }
        }
        for k in 0..self.vertices.len() {
            if self.incident_faces(k).len() < 3 {
                return Err("vertex on fewer than 3 faces");
            }
        }
        let total: f64 = self.areas.iter().sum();
        if self.closing_defect().norm() > tol.relative * total.max(1.0) * 10.0 {
            return Err("faces do not close");
        }
        Ok(())
    }
}

/// Σ Aᵢ nᵢ, the discrete closing condition for face data.
pub fn closing_defect(normals: &[Vector3], areas: &[f64]) -> Vector3 {
    assert_eq!(
        normals.len(),
        areas.len(),
        "normals and areas differ in length"
    );
    normals
        .iter()
        .zip(areas)
        .fold(Vector3::zeros(), |s, (n, a)| s + n * *a)
}

pub(crate) fn diameter(points: &[Vector3]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let mut lo = points[0];
    let mut hi = points[0];
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (hi - lo).norm()
}

/// Newell vector area of a planar cycle.
pub(crate) fn vector_area(vertices: &[Vector3], face: &[usize]) -> Vector3 {
    let o = vertices[face[0]];
    let mut s = Vector3::zeros();
    for k in 1..face.len().saturating_sub(1) {
        s += (vertices[face[k]] - o).cross(&(vertices[face[k + 1]] - o));
    }
    s * 0.5
}

fn support_of(vertices: &[Vector3], normals: &[Vector3]) -> Vec<f64> {
    normals
        .iter()
        .map(|n| {
            vertices
                .iter()
                .map(|v| v.dot(n))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// Area of the convex spherical polygon spanned by unit vectors given in any
/// order; `None` if fewer than three or if they lie on a great circle.
pub fn spherical_polygon_area(normals: &[Vector3]) -> Option<f64> {
    if normals.len() < 3 {
        return None;
    }
    let axis = normals.iter().fold(Vector3::zeros(), |s, n| s + n);
    if axis.norm() < 1e-12 {
        return None;
    }
    let axis = axis.normalize();
    let e1 = any_orthogonal(&axis);
    let e2 = axis.cross(&e1);
    let mut ordered: Vec<(f64, Vector3)> = normals
        .iter()
        .map(|n| (n.dot(&e2).atan2(n.dot(&e1)), *n))
        .collect();
    ordered.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));
    let spread = ordered
        .windows(3)
        .map(|w| w[0].1.dot(&w[1].1.cross(&w[2].1)).abs())
        .chain(core::iter::once(
            ordered[0]
                .1
                .dot(&ordered[1].1.cross(&ordered[ordered.len() - 1].1))
                .abs(),
        ))
        .fold(0.0, f64::max);
    if spread < 1e-14 {
        return None;
    }
    let a = ordered[0].1;
    let mut total = 0.0;
    for k in 1..ordered.len() - 1 {
        total += solid_angle(a, ordered[k].1, ordered[k + 1].1);
    }
    Some(total)
}

/// Signed solid angle of the spherical triangle with unit vertices a, b, c.
pub fn solid_angle(a: Vector3, b: Vector3, c: Vector3) -> f64 {
    let num = a.dot(&b.cross(&c));
    let den = 1.0 + a.dot(&b) + b.dot(&c) + c.dot(&a);
    2.0 * num.atan2(den)
}

pub(crate) fn any_orthogonal(n: &Vector3) -> Vector3 {
    let t = if n.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    n.cross(&t).normalize()
}

/// Full sphere, for convenience in curvature totals.
pub const FULL_SPHERE: f64 = 4.0 * PI;

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    pub(crate) fn cube(half: f64) -> ConvexPolytope {
        let mut pts = vec![];
        for &x in &[-half, half] {
            for &y in &[-half, half] {
                for &z in &[-half, half] {
                    pts.push(Vector3::new(x, y, z));
                }
            }
        }
        convex_hull(&pts).unwrap()
    }

    #[test]
    fn closing_defect_single_face() {
        let d = closing_defect(&[Vector3::z()], &[1.0]);
        assert_eq!(d, Vector3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn cube_volume_centroid_and_cones() {
        let c = cube(0.5);
        assert!((c.volume() - 1.0).abs() < 1e-12);
        assert!(c.centroid().norm() < 1e-12);
        for v in 0..8 {
            assert!((c.normal_cone_area(v).unwrap() - PI / 2.0).abs() < 1e-12);
        }
        assert_eq!(c.edges().len(), 12);
        c.check_invariants(Tolerance::default()).unwrap();
    }

    #[test]
    fn scaling_is_homogeneous() {
        let c = cube(0.5).translated(Vector3::new(0.1, -0.2, 0.3));
        let s = c.scaled(3.0);
        for i in 0..c.num_faces() {
            assert!((s.support_numbers()[i] - 3.0 * c.support_numbers()[i]).abs() < 1e-12);
            assert!((s.areas()[i] - 9.0 * c.areas()[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn from_faces_reorients_and_rejects_nonconvex() {
        let c = cube(1.0);
        let mut faces: Vec<Vec<usize>> = c.faces().to_vec();
        faces[0].reverse();
        let p =
            ConvexPolytope::from_faces(c.vertices().to_vec(), faces.clone(), Tolerance::default())
                .unwrap();
        assert!((p.surface_area() - 24.0).abs() < 1e-12);
        assert!(p.closing_defect().norm() < 1e-12);
        let mut dented = c.vertices().to_vec();
        dented[0] *= 0.5;
        assert!(ConvexPolytope::from_faces(dented, faces, Tolerance::default()).is_err());
    }

    #[test]
    fn flat_cone_is_degenerate() {
        let n = [Vector3::x(), Vector3::y(), -Vector3::x()];
        assert!(spherical_polygon_area(&n).is_none());
    }
}
