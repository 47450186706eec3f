//! Face data from Gauss curvature sampled on a partition of the sphere.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use nalgebra::Matrix3;
#[allow(unused_imports)]
use num_traits::Float;

use super::{MinkowskiError, MinkowskiProblem};
use crate::polytope::convex_hull;
use crate::Vector3;

/// Cells of a sphere partition with centers `nⱼ`, spherical areas `ωⱼ`
/// and curvature values `K(nⱼ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureSample {
    pub centers: Vec<Vector3>,
    pub cell_areas: Vec<f64>,
    pub curvature: Vec<f64>,
}

impl CurvatureSample {
    /// Dual cells of a subdivided icosahedron with `K` sampled at the cell
    /// centers.
    pub fn on_icosphere<K: Fn(Vector3) -> f64>(level: u32, k: K) -> Self {
        let (centers, cell_areas) = icosphere(level);
        let curvature = centers.iter().map(|&n| k(n)).collect();
        Self {
            centers,
            cell_areas,
            curvature,
        }
    }
}

/// Solid angle of the spherical triangle with unit corners `a`, `b`, `c`.
fn solid_angle(a: Vector3, b: Vector3, c: Vector3) -> f64 {
    let num = a.dot(&b.cross(&c)).abs();
    let den = 1.0 + a.dot(&b) + b.dot(&c) + c.dot(&a);
    2.0 * num.atan2(den)
}

/// Vertices of the icosahedron subdivided `level` times and projected to
/// the unit sphere, with the areas of their dual cells. Each triangle is
/// split through its centroid and edge midpoints, and every piece goes to
/// its corner vertex, so the cells tile the sphere exactly.
pub fn icosphere(level: u32) -> (Vec<Vector3>, Vec<f64>) {
    let phi = 0.5 * (1.0 + 5f64.sqrt());
    let mut verts = Vec::new();
    for &(a, b) in &[(1.0, phi), (1.0, -phi), (-1.0, phi), (-1.0, -phi)] {
        verts.push(Vector3::new(0.0, a, b).normalize());
        verts.push(Vector3::new(a, b, 0.0).normalize());
        verts.push(Vector3::new(b, 0.0, a).normalize());
    }
    let hull = convex_hull(&verts).expect("icosahedron");
    let mut verts = hull.vertices().to_vec();
    let mut tris: Vec<[usize; 3]> = hull.faces().iter().map(|f| [f[0], f[1], f[2]]).collect();
    for _ in 0..level {
        let mut mid: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut next = Vec::with_capacity(tris.len() * 4);
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<Vector3>| -> usize {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                verts.push((verts[a] + verts[b]).normalize());
                verts.len() - 1
            })
        };
        for &[a, b, c] in &tris {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.extend_from_slice(&[[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        }
        tris = next;
    }
    let mut areas = alloc::vec![0.0; verts.len()];
    for t in &tris {
        let cen = (verts[t[0]] + verts[t[1]] + verts[t[2]]).normalize();
        for k in 0..3 {
            let (v, a, b) = (verts[t[k]], verts[t[(k + 1) % 3]], verts[t[(k + 2) % 3]]);
            let (ma, mb) = ((v + a).normalize(), (v + b).normalize());
            areas[t[k]] += solid_angle(v, ma, cen) + solid_angle(v, cen, mb);
        }
    }
    (verts, areas)
}

/// Problem from a curvature sample together with the repair it needed.
#[derive(Clone, Debug, PartialEq)]
pub struct Discretization {
    pub problem: MinkowskiProblem,
    /// `Σ (ωⱼ / Kⱼ) nⱼ` before the correction.
    pub defect_before: Vector3,
    /// Minimal-norm area correction `δ` with `Σ δⱼ nⱼ = −defect_before`.
    pub correction: Vec<f64>,
}

/// `Aⱼ = ωⱼ / K(nⱼ)`, then the smallest change of areas (in the Euclidean
/// norm) that makes them close up.
pub fn discretize_curvature(sample: &CurvatureSample) -> Result<Discretization, MinkowskiError> {
    let m = sample.centers.len();
    if sample.cell_areas.len() != m || sample.curvature.len() != m {
        return Err(MinkowskiError::InvalidProblem(
            "sample arrays differ in length",
        ));
    }
    if let Some(j) = sample
        .curvature
        .iter()
        .position(|k| !(k.is_finite() && *k > 0.0))
    {
        return Err(MinkowskiError::NegativeCurvature(j));
    }
    let total: f64 = sample.cell_areas.iter().sum();
    if (total - 4.0 * core::f64::consts::PI).abs() > 1e-6 {
        return Err(MinkowskiError::InvalidProblem("cell areas must sum to 4π"));
    }
    let raw: Vec<f64> = sample
        .cell_areas
        .iter()
        .zip(&sample.curvature)
        .map(|(w, k)| w / k)
        .collect();
    let defect = crate::polytope::closing_defect(&sample.centers, &raw);
    let gram: Matrix3<f64> = sample.centers.iter().map(|n| n * n.transpose()).sum();
    let y = gram.try_inverse().ok_or(MinkowskiError::InvalidProblem(
        "cell centers do not span space",
    ))? * defect;
    let correction: Vec<f64> = sample.centers.iter().map(|n| -n.dot(&y)).collect();
    let areas: Vec<f64> = raw.iter().zip(&correction).map(|(a, d)| a + d).collect();
    let problem = MinkowskiProblem::new(sample.centers.clone(), areas)?;
    Ok(Discretization {
        problem,
        defect_before: defect,
        correction,
    })
}
