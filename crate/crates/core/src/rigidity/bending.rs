use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use super::RigidityError;
use crate::polytope::ConvexPolytope;
use crate::Vector3;

/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Vertices, triangles and the derived edge list of a 2-complex in space.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangulatedSurface {
    vertices: Vec<Vector3>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<(usize, usize)>,
    closed: bool,
}

impl TriangulatedSurface {
    /// A closed oriented surface: every edge lies in exactly two triangles,
    /// traversed in opposite directions.
    pub fn new(vertices: Vec<Vector3>, triangles: Vec<[usize; 3]>) -> Result<Self, RigidityError> {
        let s = Self::build(vertices, triangles)?;
        if !s.closed {
            return Err(RigidityError::InvalidSurface("surface has boundary edges"));
        }
        Ok(s)
    }

    /// Like [`TriangulatedSurface::new`] but boundary edges (in one triangle)
    /// are allowed.
    pub fn with_boundary(
        vertices: Vec<Vector3>,
        triangles: Vec<[usize; 3]>,
    ) -> Result<Self, RigidityError> {
        Self::build(vertices, triangles)
    }

    fn build(vertices: Vec<Vector3>, triangles: Vec<[usize; 3]>) -> Result<Self, RigidityError> {
        if vertices.iter().any(|v| !v.iter().all(|x| x.is_finite())) {
            return Err(RigidityError::InvalidSurface("non-finite vertex"));
        }
        if triangles.is_empty() {
            return Err(RigidityError::InvalidSurface("no triangles"));
        }
        // directed edge -> count
        let mut directed: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for t in &triangles {
            if t.iter().any(|&i| i >= vertices.len()) {
                return Err(RigidityError::InvalidSurface("vertex index out of range"));
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(RigidityError::InvalidSurface("triangle repeats a vertex"));
            }
            for k in 0..3 {
                *directed.entry((t[k], t[(k + 1) % 3])).or_insert(0) += 1;
            }
        }
        if directed.values().any(|&c| c > 1) {
            return Err(RigidityError::InvalidSurface(
                "inconsistent orientation or non-manifold edge",
            ));
        }
        let mut closed = true;
        let mut edges = Vec::new();
        for &(a, b) in directed.keys() {
            let twin = directed.contains_key(&(b, a));
            if !twin {
                closed = false;
            }
            if a < b || !twin {
                edges.push((a.min(b), a.max(b)));
            }
        }
        edges.sort_unstable();
        let used = {
            let mut u = vec![false; vertices.len()];
            triangles.iter().flatten().for_each(|&i| u[i] = true);
            u
        };
        if used.iter().any(|&u| !u) {
            return Err(RigidityError::InvalidSurface("isolated vertex"));
        }
        Ok(Self {
            vertices,
            triangles,
            edges,
            closed,
        })
    }

    /// Boundary of a convex polytope, each face fanned from its first vertex.
    pub fn from_polytope(p: &ConvexPolytope) -> Self {
        let mut triangles = Vec::new();
        for f in p.faces().iter().filter(|f| f.len() >= 3) {
            for k in 1..f.len() - 1 {
                triangles.push([f[0], f[k], f[k + 1]]);
            }
        }
        Self::build(p.vertices().to_vec(), triangles)
            .expect("polytope boundary is a closed surface")
    }

    /// Boundary of a convex polytope with an extra vertex at each face
    /// centroid, fanned to the face edges. The new vertices are flat.
    pub fn from_polytope_with_face_centers(p: &ConvexPolytope) -> Self {
        let mut vertices = p.vertices().to_vec();
        let mut triangles = Vec::new();
        for f in p.faces().iter().filter(|f| f.len() >= 3) {
            let c = f.iter().map(|&i| p.vertices()[i]).sum::<Vector3>() / f.len() as f64;
            let ci = vertices.len();
            vertices.push(c);
            for k in 0..f.len() {
                triangles.push([ci, f[k], f[(k + 1) % f.len()]]);
            }
        }
        Self::build(vertices, triangles).expect("polytope boundary is a closed surface")
    }

    pub fn vertices(&self) -> &[Vector3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Undirected edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Vertices whose incident triangles all lie in one plane (within
    /// `tol` in the sine of the angle between normals).
    pub fn flat_vertices(&self, tol: f64) -> Vec<usize> {
        let mut normals: Vec<Vec<Vector3>> = vec![Vec::new(); self.vertices.len()];
        for t in &self.triangles {
            let [a, b, c] = t.map(|i| self.vertices[i]);
            let n = (b - a).cross(&(c - a));
            let len = n.norm();
            if len > 0.0 {
                for &i in t {
                    normals[i].push(n / len);
                }
            }
        }
        normals
            .iter()
            .enumerate()
            .filter(|(_, ns)| {
                ns.len() >= 3
                    && ns
                        .iter()
                        .all(|n| n.cross(&ns[0]).norm() <= tol && n.dot(&ns[0]) > 0.0)
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// Largest edge length; the natural scale of constraint residuals.
    pub fn edge_scale(&self) -> f64 {
        self.edges
            .iter()
            .map(|&(i, j)| (self.vertices[i] - self.vertices[j]).norm())
            .fold(0.0, f64::max)
    }
}

/// One velocity per vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct BendingField(pub Vec<Vector3>);

impl BendingField {
    /// The rigid motion `τᵢ = a × vᵢ + b`.
    pub fn trivial(surface: &TriangulatedSurface, a: Vector3, b: Vector3) -> Self {
        Self(surface.vertices.iter().map(|v| a.cross(v) + b).collect())
    }

    fn from_flat(x: &[f64]) -> Self {
        Self(
            x.chunks_exact(3)
                .map(|c| Vector3::new(c[0], c[1], c[2]))
                .collect(),
        )
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.0.iter().flat_map(|v| [v.x, v.y, v.z]).collect()
    }
}

/// Linearized edge-length constraints: row `e = (i, j)` reads
/// `dₑ·(τᵢ − τⱼ) = 0` with `dₑ = (vᵢ − vⱼ)/|vᵢ − vⱼ|`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintSystem {
    pub num_vertices: usize,
    pub rows: Vec<(usize, usize, Vector3)>,
}

impl ConstraintSystem {
    pub fn residuals(&self, field: &BendingField) -> Vec<f64> {
        assert_eq!(field.0.len(), self.num_vertices, "field has wrong length");
        self.rows
            .iter()
            .map(|(i, j, d)| d.dot(&(field.0[*i] - field.0[*j])))
            .collect()
    }

    pub fn max_residual(&self, field: &BendingField) -> f64 {
        self.residuals(field)
            .into_iter()
            .fold(0.0, |m, r| m.max(r.abs()))
    }

    /// Dense `E × 3V` matrix.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows.len(), 3 * self.num_vertices);
        for (r, (i, j, d)) in self.rows.iter().enumerate() {
            for k in 0..3 {
                m[(r, 3 * i + k)] = d[k];
                m[(r, 3 * j + k)] = -d[k];
            }
        }
        m
    }
}

pub fn isometry_constraints(surface: &TriangulatedSurface) -> ConstraintSystem {
    let rows = surface
        .edges
        .iter()
        .map(|&(i, j)| {
            let d = surface.vertices[i] - surface.vertices[j];
            (i, j, d / d.norm())
        })
        .collect();
    ConstraintSystem {
        num_vertices: surface.vertices.len(),
        rows,
    }
}

/// Kernel of the constraint system split into rigid motions and the rest.
#[derive(Clone, Debug)]
pub struct BendingSpace {
    pub kernel_dim: usize,
    pub nontrivial_dim: usize,
    /// Orthonormal basis of the kernel's complement to rigid motions.
    pub basis: Vec<BendingField>,
    /// All `3V` singular values of the (zero-padded) constraint matrix,
    /// ascending, so near-zero tails can be inspected.
    pub spectrum: Vec<f64>,
    /// Absolute cut-off used for the rank decision.
    pub threshold: f64,
    /// Largest distance of a unit rigid motion from the computed kernel.
    pub trivial_defect: f64,
    /// Flat vertices; each typically carries one normal flex.
    pub flat_vertices: Vec<usize>,
}

/// Kernel analysis with singular values below `tol·σ_max` taken as zero.
pub fn bending_space(
    surface: &TriangulatedSurface,
    tol: f64,
) -> Result<BendingSpace, RigidityError> {
    let n = 3 * surface.num_vertices();
    let sys = isometry_constraints(surface);
    let a = sys.to_dense();
    let rows = a.nrows().max(n);
    let mut padded = DMatrix::zeros(rows, n);
    padded.rows_mut(0, a.nrows()).copy_from(&a);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma_max = svd.singular_values.max();
    let threshold = tol * sigma_max;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let spectrum: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let kernel: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| svd.singular_values[i] <= threshold)
        .collect();
    let kernel_dim = kernel.len();
    let k = DMatrix::from_fn(n, kernel_dim, |r, c| v_t[(kernel[c], r)]);

    // Rigid motions about the centroid, orthonormalized.
    let c = surface.vertices.iter().sum::<Vector3>() / surface.num_vertices() as f64;
    let mut t = DMatrix::zeros(n, 6);
    for (i, v) in surface.vertices.iter().enumerate() {
        let r = v - c;
        for axis in 0..3 {
            t[(3 * i + axis, axis)] = 1.0;
            let mut e = Vector3::zeros();
            e[axis] = 1.0;
            let rot = e.cross(&r);
            for q in 0..3 {
                t[(3 * i + q, 3 + axis)] = rot[q];
            }
        }
    }
    let tsvd = t.svd(true, false);
    let ts = tsvd.singular_values.max();
    let trivial_cols: Vec<usize> = (0..6)
        .filter(|&i| tsvd.singular_values[i] > 1e-9 * ts)
        .collect();
    if trivial_cols.len() < 6 {
        return Err(RigidityError::DegenerateGeometry {
            rank: trivial_cols.len(),
        });
    }
    let u = tsvd.u.expect("left singular vectors requested");
    let tq = DMatrix::from_fn(n, 6, |r, col| u[(r, trivial_cols[col])]);

    let trivial_defect = if kernel_dim == 0 {
        1.0
    } else {
        let resid = &tq - &k * (k.transpose() * &tq);
        resid
            .column_iter()
            .map(|col| col.norm())
            .fold(0.0, f64::max)
    };

    let nontrivial_dim = kernel_dim.saturating_sub(6);
    let mut basis = Vec::new();
    if nontrivial_dim > 0 {
        let proj = &k - &tq * (tq.transpose() * &k);
        let psvd = proj.svd(true, false);
        let pu = psvd.u.expect("left singular vectors requested");
        let mut idx: Vec<usize> = (0..psvd.singular_values.len()).collect();
        idx.sort_by(|&i, &j| psvd.singular_values[j].total_cmp(&psvd.singular_values[i]));
        for &i in idx.iter().take(nontrivial_dim) {
            let col: DVector<f64> = pu.column(i).into_owned();
            basis.push(BendingField::from_flat(col.as_slice()));
        }
    }

    Ok(BendingSpace {
        kernel_dim,
        nontrivial_dim,
        basis,
        spectrum,
        threshold,
        trivial_defect,
        flat_vertices: surface.flat_vertices(1e-9),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::convex_hull;

    fn octahedron() -> TriangulatedSurface {
        let mut pts = Vec::new();
        for k in 0..3 {
            for s in [1.0, -1.0] {
                let mut v = Vector3::zeros();
                v[k] = s;
                pts.push(v);
            }
        }
        TriangulatedSurface::from_polytope(&convex_hull(&pts).unwrap())
    }

    #[test]
    fn single_edge_row() {
        let s = TriangulatedSurface::with_boundary(
            vec![
                Vector3::zeros(),
                Vector3::new(2.0, 0.0, 0.0),
                Vector3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        assert!(!s.is_closed());
        let sys = isometry_constraints(&s);
        assert_eq!(sys.rows.len(), 3);
        let (i, j, d) = sys.rows[0];
        assert_eq!((i, j), (0, 1));
        assert_eq!(d, Vector3::new(-1.0, 0.0, 0.0));
    }

    #[test]
    fn rejects_open_or_misoriented_input() {
        let v = vec![Vector3::zeros(), Vector3::x(), Vector3::y(), Vector3::z()];
        assert!(TriangulatedSurface::new(v.clone(), vec![[0, 1, 2]]).is_err());
        let flipped = vec![[0, 1, 2], [0, 1, 3], [1, 2, 3], [0, 3, 2]];
        assert!(TriangulatedSurface::new(v.clone(), flipped).is_err());
        let good = vec![[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]];
        assert!(TriangulatedSurface::new(v, good).is_ok());
    }

    #[test]
    fn octahedron_is_rigid() {
        let s = octahedron();
        assert_eq!(s.edges().len(), 12);
        let b = bending_space(&s, RANK_TOLERANCE).unwrap();
        assert_eq!((b.kernel_dim, b.nontrivial_dim), (6, 0));
        assert!(b.trivial_defect < 1e-10);
        assert!(b.flat_vertices.is_empty());
    }

    #[test]
    fn translations_and_rotations_satisfy_constraints() {
        let s = octahedron();
        let sys = isometry_constraints(&s);
        let f = BendingField::trivial(
            &s,
            Vector3::new(0.3, -1.0, 2.0),
            Vector3::new(5.0, 1.0, -2.0),
        );
        assert!(sys.max_residual(&f) < 1e-14);
    }

    #[test]
    fn collinear_points_are_degenerate() {
        let v = vec![Vector3::zeros(), Vector3::x(), 2.0 * Vector3::x()];
        let s = TriangulatedSurface::with_boundary(v, vec![[0, 1, 2]]).unwrap();
        assert!(matches!(
            bending_space(&s, RANK_TOLERANCE),
            Err(RigidityError::DegenerateGeometry { .. })
        ));
    }
}
