//! Nets: planar polygons with edge identifications.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::planar::{cross2, signed_area};
use crate::polytope::ConvexPolytope;
use crate::{Point2, Tolerance, Vector3};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NetError {
    #[error("polygon {0} has fewer than 3 vertices")]
    TooFewVertices(usize),
    #[error("polygon {0} is not counterclockwise with positive area")]
    NotCounterclockwise(usize),
    #[error("polygon {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("identification {0} refers to a missing polygon or edge")]
    BadReference(usize),
    #[error("identification {0} glues an edge to itself")]
    SelfGluing(usize),
    #[error("net fails the gluing conditions: {0}")]
    InvalidNet(&'static str),
}

/// Edge `edge` of polygon `polygon` runs from corner `edge` to corner
/// `edge + 1` (cyclically).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeRef {
    pub polygon: usize,
    pub edge: usize,
}

/// Gluing of two edges. With `reversed` (the usual case for two
/// counterclockwise polygons of an oriented surface) the start of `a` meets
/// the end of `b`; otherwise start meets start.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Identification {
    pub a: EdgeRef,
    pub b: EdgeRef,
    pub reversed: bool,
}

impl Identification {
    pub fn new(a: EdgeRef, b: EdgeRef) -> Self {
        Self {
            a,
            b,
            reversed: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MetricNet {
    polygons: Vec<Vec<Point2>>,
    identifications: Vec<Identification>,
    /// Per polygon and edge, the index of the identifications using it.
    uses: Vec<Vec<Vec<usize>>>,
    /// Per polygon and corner, the vertex class.
    class_of: Vec<Vec<usize>>,
    classes: Vec<Vec<(usize, usize)>>,
}

impl MetricNet {
    /// Structural checks only; the gluing conditions are inspected by
    /// [`validate_net`].
    pub fn new(
        polygons: Vec<Vec<Point2>>,
        identifications: Vec<Identification>,
    ) -> Result<Self, NetError> {
        for (k, poly) in polygons.iter().enumerate() {
            if poly.len() < 3 {
                return Err(NetError::TooFewVertices(k));
            }
            if poly.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
                return Err(NetError::NonFinite(k));
            }
            if signed_area(poly) <= 0.0 {
                return Err(NetError::NotCounterclockwise(k));
            }
        }
        let mut uses: Vec<Vec<Vec<usize>>> =
            polygons.iter().map(|p| vec![Vec::new(); p.len()]).collect();
        for (i, id) in identifications.iter().enumerate() {
            for r in [id.a, id.b] {
                if r.polygon >= polygons.len() || r.edge >= polygons[r.polygon].len() {
                    return Err(NetError::BadReference(i));
                }
            }
            if id.a == id.b {
                return Err(NetError::SelfGluing(i));
            }
            uses[id.a.polygon][id.a.edge].push(i);
            uses[id.b.polygon][id.b.edge].push(i);
        }

        let offsets: Vec<usize> = polygons
            .iter()
            .scan(0, |acc, p| {
                let o = *acc;
                *acc += p.len();
                Some(o)
            })
            .collect();
        let total = polygons.iter().map(Vec::len).sum();
        let mut uf = UnionFind::new(total);
        for id in &identifications {
            let na = polygons[id.a.polygon].len();
            let nb = polygons[id.b.polygon].len();
            let a0 = offsets[id.a.polygon] + id.a.edge;
            let a1 = offsets[id.a.polygon] + (id.a.edge + 1) % na;
            let b0 = offsets[id.b.polygon] + id.b.edge;
            let b1 = offsets[id.b.polygon] + (id.b.edge + 1) % nb;
            if id.reversed {
                uf.union(a0, b1);
                uf.union(a1, b0);
            } else {
                uf.union(a0, b0);
                uf.union(a1, b1);
            }
        }
        let mut label = vec![usize::MAX; total];
        let mut classes: Vec<Vec<(usize, usize)>> = Vec::new();
        let mut class_of: Vec<Vec<usize>> = polygons.iter().map(|p| vec![0; p.len()]).collect();
        for (p, poly) in polygons.iter().enumerate() {
            for c in 0..poly.len() {
                let root = uf.find(offsets[p] + c);
                if label[root] == usize::MAX {
                    label[root] = classes.len();
                    classes.push(Vec::new());
                }
                classes[label[root]].push((p, c));
                class_of[p][c] = label[root];
            }
        }
        Ok(Self {
            polygons,
            identifications,
            uses,
            class_of,
            classes,
        })
    }

    pub fn polygons(&self) -> &[Vec<Point2>] {
        &self.polygons
    }

    pub fn identifications(&self) -> &[Identification] {
        &self.identifications
    }

    /// Corners `(polygon, corner)` grouped by the identified vertex they
    /// form.
    pub fn vertex_classes(&self) -> &[Vec<(usize, usize)>] {
        &self.classes
    }

    pub fn class_of(&self, polygon: usize, corner: usize) -> usize {
        self.class_of[polygon][corner]
    }

    /// The edge glued to `edge` of `polygon`, with the orientation flag, if
    /// exactly one partner exists.
    pub fn partner(&self, polygon: usize, edge: usize) -> Option<(EdgeRef, bool)> {
        let uses = &self.uses[polygon][edge];
        if uses.len() != 1 {
            return None;
        }
        let id = &self.identifications[uses[0]];
        let me = EdgeRef { polygon, edge };
        let other = if id.a == me { id.b } else { id.a };
        Some((other, id.reversed))
    }

    pub fn edge_length(&self, r: EdgeRef) -> f64 {
        let (a, b) = self.edge_points(r.polygon, r.edge);
        (b - a).norm()
    }

    pub fn edge_points(&self, polygon: usize, edge: usize) -> (Point2, Point2) {
        let poly = &self.polygons[polygon];
        (poly[edge], poly[(edge + 1) % poly.len()])
    }

    /// Interior angle at a corner, in `(0, 2π)`.
    pub fn corner_angle(&self, polygon: usize, corner: usize) -> f64 {
        let poly = &self.polygons[polygon];
        let n = poly.len();
        let here = poly[corner];
        let w = poly[(corner + 1) % n] - here;
        let u = poly[(corner + n - 1) % n] - here;
        let a = cross2(w, u).atan2(w.dot(&u));
        if a < 0.0 {
            a + 2.0 * PI
        } else {
            a
        }
    }

    /// Largest edge length; the length scale for tolerances.
    pub fn scale(&self) -> f64 {
        self.polygons
            .iter()
            .enumerate()
            .flat_map(|(p, poly)| (0..poly.len()).map(move |e| (p, e)))
            .map(|(p, e)| {
                self.edge_length(EdgeRef {
                    polygon: p,
                    edge: e,
                })
            })
            .fold(0.0, f64::max)
    }

    pub fn is_convex_polygon(&self, polygon: usize) -> bool {
        (0..self.polygons[polygon].len()).all(|c| self.corner_angle(polygon, c) <= PI + 1e-12)
    }
}

/// Outcome of the three gluing conditions. Failures are data, not errors.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    /// Condition 1: closed, connected, Euler characteristic 2.
    pub topology: ConditionReport,
    pub euler_characteristic: i64,
    pub connected: bool,
    /// Edges glued to no partner or to more than one.
    pub unpaired_edges: Vec<EdgeRef>,
    /// Condition 2: identified edges have equal length. Offenders are
    /// identification indices.
    pub edge_lengths: ConditionReport,
    /// Length difference per identification.
    pub length_differences: Vec<f64>,
    /// Condition 3: the angles meeting at a vertex sum to at most 2π.
    /// Offenders are vertex classes.
    pub angle_sums: ConditionReport,
    /// Angle sum per vertex class.
    pub class_angles: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionReport {
    pub passed: bool,
    pub offenders: Vec<usize>,
}

impl ConditionReport {
    fn from_offenders(offenders: Vec<usize>) -> Self {
        Self {
            passed: offenders.is_empty(),
            offenders,
        }
    }
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.topology.passed && self.edge_lengths.passed && self.angle_sums.passed
    }
}

pub fn validate_net(net: &MetricNet, tol: Tolerance) -> ValidationReport {
    let len_eps = tol.absolute(net.scale());
    let angle_eps = angle_slack(tol);

    let mut unpaired = Vec::new();
    for (p, edges) in net.uses.iter().enumerate() {
        for (e, u) in edges.iter().enumerate() {
            if u.len() != 1 {
                unpaired.push(EdgeRef {
                    polygon: p,
                    edge: e,
                });
            }
        }
    }
    let v = net.classes.len() as i64;
    let e = (net.identifications.len() + unpaired.len()) as i64;
    let f = net.polygons.len() as i64;
    let euler = v - e + f;

    let mut uf = UnionFind::new(net.polygons.len());
    for id in &net.identifications {
        uf.union(id.a.polygon, id.b.polygon);
    }
    let root = uf.find(0);
    let connected = (0..net.polygons.len()).all(|p| uf.find(p) == root);
    let topology = ConditionReport {
        passed: unpaired.is_empty() && connected && euler == 2,
        offenders: unpaired.iter().map(|r| r.polygon).collect(),
    };

    let length_differences: Vec<f64> = net
        .identifications
        .iter()
        .map(|id| (net.edge_length(id.a) - net.edge_length(id.b)).abs())
        .collect();
    let edge_lengths = ConditionReport::from_offenders(
        length_differences
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > len_eps)
            .map(|(i, _)| i)
            .collect(),
    );

    let class_angles = class_angle_sums(net);
    let angle_sums = ConditionReport::from_offenders(
        class_angles
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 2.0 * PI + angle_eps)
            .map(|(i, _)| i)
            .collect(),
    );

    ValidationReport {
        topology,
        euler_characteristic: euler,
        connected,
        unpaired_edges: unpaired,
        edge_lengths,
        length_differences,
        angle_sums,
        class_angles,
    }
}

/// Angular slack used for "at most 2π" and "flat vertex" decisions.
pub(crate) fn angle_slack(tol: Tolerance) -> f64 {
    10.0 * tol.relative
}

fn class_angle_sums(net: &MetricNet) -> Vec<f64> {
    net.classes
        .iter()
        .map(|cls| cls.iter().map(|&(p, c)| net.corner_angle(p, c)).sum())
        .collect()
}

/// Full angle θ and curvature `2π − θ` per vertex class.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureReport {
    pub angles: Vec<f64>,
    pub curvatures: Vec<f64>,
    pub total: f64,
}

/// Requires conditions 1 and 2.
pub fn vertex_curvatures(net: &MetricNet, tol: Tolerance) -> Result<CurvatureReport, NetError> {
    let report = validate_net(net, tol);
    if !report.topology.passed {
        return Err(NetError::InvalidNet("not a closed sphere-like complex"));
    }
    if !report.edge_lengths.passed {
        return Err(NetError::InvalidNet("identified edges differ in length"));
    }
    let angles = report.class_angles;
    let curvatures: Vec<f64> = angles.iter().map(|a| 2.0 * PI - a).collect();
    let total = curvatures.iter().sum();
    Ok(CurvatureReport {
        angles,
        curvatures,
        total,
    })
}

/// Planar frame of a face: `origin` is its first vertex, `e1` points along
/// its first edge, `e2 = n × e1`.
pub(crate) fn face_frame(p: &ConvexPolytope, face: usize) -> (Vector3, Vector3, Vector3) {
    let cyc = &p.faces()[face];
    let v = p.vertices();
    let origin = v[cyc[0]];
    let e1 = (v[cyc[1]] - origin).normalize();
    let e2 = p.normals()[face].cross(&e1);
    (origin, e1, e2)
}

/// One polygon per non-degenerate face, congruent to it, glued along the
/// polytope's edges. Polygon `k` is the `k`-th face with a nonempty cycle,
/// and its corner `c` is that face's `c`-th vertex.
pub fn net_from_polytope(p: &ConvexPolytope) -> MetricNet {
    let faces: Vec<usize> = (0..p.num_faces())
        .filter(|&f| p.faces()[f].len() >= 3)
        .collect();
    let mut polygon_of = vec![usize::MAX; p.num_faces()];
    for (k, &f) in faces.iter().enumerate() {
        polygon_of[f] = k;
    }
    let polygons: Vec<Vec<Point2>> = faces
        .iter()
        .map(|&f| {
            let (o, e1, e2) = face_frame(p, f);
            p.faces()[f]
                .iter()
                .map(|&i| {
                    let d = p.vertices()[i] - o;
                    Point2::new(d.dot(&e1), d.dot(&e2))
                })
                .collect()
        })
        .collect();
    let edge_index = |f: usize, a: usize, b: usize| -> usize {
        let cyc = &p.faces()[f];
        (0..cyc.len())
            .find(|&k| cyc[k] == a && cyc[(k + 1) % cyc.len()] == b)
            .expect("directed edge in face")
    };
    let identifications = p
        .edges()
        .into_iter()
        .map(|(a, b, f, g)| {
            // Face f traverses a→b, its neighbour g traverses b→a.
            let (f, g) = if p.faces()[f]
                .iter()
                .position(|&x| x == a)
                .map(|k| p.faces()[f][(k + 1) % p.faces()[f].len()])
                == Some(b)
            {
                (f, g)
            } else {
                (g, f)
            };
            Identification::new(
                EdgeRef {
                    polygon: polygon_of[f],
                    edge: edge_index(f, a, b),
                },
                EdgeRef {
                    polygon: polygon_of[g],
                    edge: edge_index(g, b, a),
                },
            )
        })
        .collect();
    MetricNet::new(polygons, identifications).expect("faces of a convex polytope form a valid net")
}

/// For each vertex of `p`, its class in `net_from_polytope(p)`.
pub fn polytope_vertex_classes(p: &ConvexPolytope, net: &MetricNet) -> Vec<usize> {
    let mut out = vec![usize::MAX; p.vertices().len()];
    let faces = (0..p.num_faces()).filter(|&f| p.faces()[f].len() >= 3);
    for (k, f) in faces.enumerate() {
        for (c, &v) in p.faces()[f].iter().enumerate() {
            out[v] = net.class_of(k, c);
        }
    }
    out
}

/// The net point at position `x` on the boundary of `p`, if `x` lies on a
/// face within `tol`.
pub fn locate_on_polytope(
    p: &ConvexPolytope,
    x: Vector3,
    tol: Tolerance,
) -> Option<super::SurfacePoint> {
    let eps = tol.absolute(p.diameter());
    let faces = (0..p.num_faces()).filter(|&f| p.faces()[f].len() >= 3);
    for (k, f) in faces.enumerate() {
        let n = p.normals()[f];
        if (x.dot(&n) - p.support_numbers()[f]).abs() > eps {
            continue;
        }
        let (o, e1, e2) = face_frame(p, f);
        let q = Point2::new((x - o).dot(&e1), (x - o).dot(&e2));
        let cyc = &p.faces()[f];
        let inside = (0..cyc.len()).all(|c| {
            let a = p.vertices()[cyc[c]] - o;
            let b = p.vertices()[cyc[(c + 1) % cyc.len()]] - o;
            let a = Point2::new(a.dot(&e1), a.dot(&e2));
            let b = Point2::new(b.dot(&e1), b.dot(&e2));
            cross2(b - a, q - a) >= -eps * (b - a).norm()
        });
        if inside {
            return Some(super::SurfacePoint::new(k, q));
        }
    }
    None
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::convex_hull;

    fn square(side: f64) -> Vec<Point2> {
        vec![
            Point2::new(0.0, 0.0),
            Point2::new(side, 0.0),
            Point2::new(side, side),
            Point2::new(0.0, side),
        ]
    }

    fn doubled_triangle(a: Point2, b: Point2, c: Point2) -> MetricNet {
        // Second copy is the mirror image, listed counterclockwise.
        let m = |p: Point2| Point2::new(p.x, -p.y);
        let t1 = vec![a, b, c];
        let t2 = vec![m(a), m(c), m(b)];
        // t1 edges: ab(0) bc(1) ca(2); t2 edges: ac(0) cb(1) ba(2).
        let ids = vec![
            Identification::new(
                EdgeRef {
                    polygon: 0,
                    edge: 0,
                },
                EdgeRef {
                    polygon: 1,
                    edge: 2,
                },
            ),
            Identification::new(
                EdgeRef {
                    polygon: 0,
                    edge: 1,
                },
                EdgeRef {
                    polygon: 1,
                    edge: 1,
                },
            ),
            Identification::new(
                EdgeRef {
                    polygon: 0,
                    edge: 2,
                },
                EdgeRef {
                    polygon: 1,
                    edge: 0,
                },
            ),
        ];
        MetricNet::new(vec![t1, t2], ids).unwrap()
    }

    fn cube_points() -> Vec<Vector3> {
        let mut pts = vec![];
        for &x in &[0.0, 1.0] {
            for &y in &[0.0, 1.0] {
                for &z in &[0.0, 1.0] {
                    pts.push(Vector3::new(x, y, z));
                }
            }
        }
        pts
    }

    #[test]
    fn cube_net_passes_with_three_right_angles() {
        let cube = convex_hull(&cube_points()).unwrap();
        let net = net_from_polytope(&cube);
        assert_eq!(net.polygons().len(), 6);
        assert_eq!(net.identifications().len(), 12);
        let r = validate_net(&net, Tolerance::default());
        assert!(r.all_passed(), "{r:?}");
        assert_eq!(r.euler_characteristic, 2);
        for a in &r.class_angles {
            assert!((a - 1.5 * PI).abs() < 1e-12);
        }
        let c = vertex_curvatures(&net, Tolerance::default()).unwrap();
        assert_eq!(c.curvatures.len(), 8);
        assert!((c.total - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn doubled_equilateral_triangle() {
        let s = 3f64.sqrt() / 2.0;
        let net = doubled_triangle(
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.5, s),
        );
        let r = validate_net(&net, Tolerance::default());
        assert!(r.all_passed(), "{r:?}");
        let c = vertex_curvatures(&net, Tolerance::default()).unwrap();
        assert_eq!(c.curvatures.len(), 3);
        for w in &c.curvatures {
            assert!((w - 4.0 * PI / 3.0).abs() < 1e-12);
        }
        assert!((c.total - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn stretched_square_breaks_edge_condition() {
        let cube = convex_hull(&cube_points()).unwrap();
        let net = net_from_polytope(&cube);
        let mut polys = net.polygons().to_vec();
        for p in polys[2].iter_mut() {
            *p *= 1.01;
        }
        let bad = MetricNet::new(polys, net.identifications().to_vec()).unwrap();
        let r = validate_net(&bad, Tolerance::default());
        assert!(r.topology.passed);
        assert_eq!(r.edge_lengths.offenders.len(), 4);
        assert!(vertex_curvatures(&bad, Tolerance::default()).is_err());
    }

    #[test]
    fn open_complex_fails_topology() {
        let net = MetricNet::new(vec![square(1.0)], vec![]).unwrap();
        let r = validate_net(&net, Tolerance::default());
        assert!(!r.topology.passed);
        assert_eq!(r.unpaired_edges.len(), 4);
    }

    #[test]
    fn clockwise_polygon_rejected() {
        let mut sq = square(1.0);
        sq.reverse();
        assert_eq!(
            MetricNet::new(vec![sq], vec![]).unwrap_err(),
            NetError::NotCounterclockwise(0)
        );
    }
}
