//! Shortest paths on a net by best-first unfolding.
//!
//! Every search node is a polygon laid out in the plane of the source,
//! together with the window of its entry edge that is visible from the
//! source through the chain of polygons unfolded so far. The distance from
//! the source to the window bounds every path continuing through that node
//! from below, so nodes are expanded in order of that bound and the search
//! stops once the bound reaches the best path found. Polygons must be
//! convex.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::net::MetricNet;
use crate::planar::cross2;
use crate::{Point2, Tolerance};

type Matrix2 = nalgebra::Matrix2<f64>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeodesicError {
    #[error("search exceeded its budget ({0})")]
    SearchBudgetExceeded(&'static str),
    #[error("polygon {0} is not convex")]
    NonConvexPolygon(usize),
    #[error("point lies outside polygon {0}")]
    PointOutside(usize),
    #[error("no path connects the points")]
    Disconnected,
}

/// A point of the net in the coordinates of one of its polygons.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfacePoint {
    pub polygon: usize,
    pub position: Point2,
}

impl SurfacePoint {
    pub fn new(polygon: usize, position: Point2) -> Self {
        Self { polygon, position }
    }

    fn key_cmp(&self, other: &Self) -> Ordering {
        self.polygon
            .cmp(&other.polygon)
            .then(self.position.x.total_cmp(&other.position.x))
            .then(self.position.y.total_cmp(&other.position.y))
    }
}

/// Straight segment inside one polygon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Leg {
    pub polygon: usize,
    pub start: Point2,
    pub end: Point2,
}

impl Leg {
    pub fn length(&self) -> f64 {
        (self.end - self.start).norm()
    }
}

/// A shortest path: consecutive legs meet on glued edges, and the polygon
/// sequence unfolds the path to one straight segment of length `length`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicPath {
    pub legs: Vec<Leg>,
    pub length: f64,
}

impl GeodesicPath {
    pub fn faces(&self) -> Vec<usize> {
        self.legs.iter().map(|l| l.polygon).collect()
    }

    /// Start, edge crossings (in the polygon being entered) and end.
    pub fn points(&self) -> Vec<SurfacePoint> {
        let mut pts = Vec::with_capacity(self.legs.len() + 1);
        for leg in &self.legs {
            pts.push(SurfacePoint::new(leg.polygon, leg.start));
        }
        if let Some(last) = self.legs.last() {
            pts.push(SurfacePoint::new(last.polygon, last.end));
        }
        pts
    }

    pub fn start(&self) -> SurfacePoint {
        let l = &self.legs[0];
        SurfacePoint::new(l.polygon, l.start)
    }

    pub fn end(&self) -> SurfacePoint {
        let l = self.legs.last().expect("path has a leg");
        SurfacePoint::new(l.polygon, l.end)
    }

    /// The point at arclength `s` from the start, clamped to the path.
    pub fn point_at(&self, s: f64) -> SurfacePoint {
        let mut left = s.max(0.0);
        for leg in &self.legs {
            let len = leg.length();
            if left <= len {
                let t = if len > 0.0 { left / len } else { 0.0 };
                return SurfacePoint::new(leg.polygon, leg.start + (leg.end - leg.start) * t);
            }
            left -= len;
        }
        self.end()
    }

    pub fn reversed(&self) -> Self {
        let legs = self
            .legs
            .iter()
            .rev()
            .map(|l| Leg {
                polygon: l.polygon,
                start: l.end,
                end: l.start,
            })
            .collect();
        Self {
            legs,
            length: self.length,
        }
    }
}

/// Guards for the exhaustive search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchLimits {
    /// Longest polygon sequence a path may cross.
    pub max_faces: usize,
    /// Total search nodes created.
    pub max_nodes: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self {
            max_faces: 32,
            max_nodes: 500_000,
        }
    }
}

pub fn shortest_path(
    net: &MetricNet,
    p: SurfacePoint,
    q: SurfacePoint,
) -> Result<GeodesicPath, GeodesicError> {
    shortest_path_with(net, p, q, SearchLimits::default(), Tolerance::default())
}

pub fn shortest_path_with(
    net: &MetricNet,
    p: SurfacePoint,
    q: SurfacePoint,
    limits: SearchLimits,
    tol: Tolerance,
) -> Result<GeodesicPath, GeodesicError> {
    for k in 0..net.polygons().len() {
        if !net.is_convex_polygon(k) {
            return Err(GeodesicError::NonConvexPolygon(k));
        }
    }
    // Fixed endpoint order makes d(p, q) and d(q, p) the same computation.
    if q.key_cmp(&p) == Ordering::Less {
        return shortest_path_with(net, q, p, limits, tol).map(|g| g.reversed());
    }
    let eps = tol.absolute(net.scale());
    let sources = incarnations(net, p, eps)?;
    let targets = incarnations(net, q, eps)?;
    Search::new(net, &targets, limits, eps).run(&sources)
}

/// Where a point sits relative to its polygon.
#[derive(Clone, Copy, Debug)]
enum Site {
    Interior,
    Corner(usize),
    Edge(usize),
}

#[derive(Clone, Copy, Debug)]
struct Incarnation {
    polygon: usize,
    position: Point2,
    site: Site,
}

fn classify(net: &MetricNet, polygon: usize, x: Point2, eps: f64) -> Result<Site, GeodesicError> {
    let poly = &net.polygons()[polygon];
    let n = poly.len();
    for (c, v) in poly.iter().enumerate() {
        if (x - v).norm() <= eps {
            return Ok(Site::Corner(c));
        }
    }
    for e in 0..n {
        let (a, b) = (poly[e], poly[(e + 1) % n]);
        let d = cross2(b - a, x - a) / (b - a).norm();
        if d < -eps {
            return Err(GeodesicError::PointOutside(polygon));
        }
    }
    for e in 0..n {
        let (a, b) = (poly[e], poly[(e + 1) % n]);
        let d = cross2(b - a, x - a) / (b - a).norm();
        if d <= eps {
            return Ok(Site::Edge(e));
        }
    }
    Ok(Site::Interior)
}

/// All polygon copies of a point: one for an interior point, both sides of
/// an edge, every corner of a vertex class.
fn incarnations(
    net: &MetricNet,
    p: SurfacePoint,
    eps: f64,
) -> Result<Vec<Incarnation>, GeodesicError> {
    if p.polygon >= net.polygons().len() {
        return Err(GeodesicError::PointOutside(p.polygon));
    }
    let site = classify(net, p.polygon, p.position, eps)?;
    Ok(match site {
        Site::Interior => vec![Incarnation {
            polygon: p.polygon,
            position: p.position,
            site,
        }],
        Site::Corner(c) => net.vertex_classes()[net.class_of(p.polygon, c)]
            .iter()
            .map(|&(poly, corner)| Incarnation {
                polygon: poly,
                position: net.polygons()[poly][corner],
                site: Site::Corner(corner),
            })
            .collect(),
        Site::Edge(e) => {
            let mut out = vec![Incarnation {
                polygon: p.polygon,
                position: p.position,
                site,
            }];
            if let Some((other, reversed)) = net.partner(p.polygon, e) {
                let (a, b) = net.edge_points(p.polygon, e);
                let t = ((p.position - a).dot(&(b - a)) / (b - a).norm_squared()).clamp(0.0, 1.0);
                let (oa, ob) = net.edge_points(other.polygon, other.edge);
                let pos = if reversed {
                    ob + (oa - ob) * t
                } else {
                    oa + (ob - oa) * t
                };
                out.push(Incarnation {
                    polygon: other.polygon,
                    position: pos,
                    site: Site::Edge(other.edge),
                });
            }
            out
        }
    })
}

/// `x ↦ m x + t`.
#[derive(Clone, Copy, Debug)]
struct Rigid {
    m: Matrix2,
    t: Point2,
}

impl Rigid {
    fn identity() -> Self {
        Self {
            m: Matrix2::identity(),
            t: Point2::zeros(),
        }
    }

    fn apply(&self, x: Point2) -> Point2 {
        self.m * x + self.t
    }

    /// `self ∘ other`
    fn then_inner(&self, other: &Rigid) -> Rigid {
        Rigid {
            m: self.m * other.m,
            t: self.m * other.t + self.t,
        }
    }

    fn invert(&self, y: Point2) -> Point2 {
        // Orthogonal linear part.
        self.m.transpose() * (y - self.t)
    }
}

/// Map from the coordinates of the polygon across `edge` of `polygon` into
/// the coordinates of `polygon`, putting the neighbour on the far side of
/// the edge.
fn gluing_map(
    net: &MetricNet,
    polygon: usize,
    edge: usize,
    other: usize,
    other_edge: usize,
    reversed: bool,
) -> Rigid {
    let (p0, p1) = net.edge_points(polygon, edge);
    let (q0, q1) = net.edge_points(other, other_edge);
    let (qa, qb) = if reversed { (q1, q0) } else { (q0, q1) };
    let dp = (p1 - p0).normalize();
    let dq = (qb - qa).normalize();
    let (c, s) = (dq.dot(&dp), cross2(dq, dp));
    let rot = Matrix2::new(c, -s, s, c);
    let mid_p = (p0 + p1) * 0.5;
    let mid_q = (qa + qb) * 0.5;
    let mut map = Rigid {
        m: rot,
        t: mid_p - rot * mid_q,
    };
    let probe = crate::planar::centroid(&net.polygons()[other]);
    if cross2(dp, map.apply(probe) - p0) > 0.0 {
        let refl = Matrix2::new(
            2.0 * dp.x * dp.x - 1.0,
            2.0 * dp.x * dp.y,
            2.0 * dp.x * dp.y,
            2.0 * dp.y * dp.y - 1.0,
        );
        let flip = Rigid {
            m: refl,
            t: p0 - refl * p0,
        };
        map = flip.then_inner(&map);
    }
    map
}

struct Node {
    polygon: usize,
    /// Edge of `polygon` the node was entered through.
    entry: Option<usize>,
    /// Polygon coordinates to the unfolded plane.
    map: Rigid,
    source: Point2,
    /// Visible part of the entry edge, ordered so the source sees it
    /// counterclockwise.
    window: Option<(Point2, Point2)>,
    /// Root corner or edge whose edges are not crossed from the root.
    root_site: Site,
    depth: usize,
    parent: Option<usize>,
    bound: f64,
}

#[derive(PartialEq)]
struct Queued(f64, usize);

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on the bound, ties broken by creation order.
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

struct Search<'a> {
    net: &'a MetricNet,
    targets: &'a [Incarnation],
    limits: SearchLimits,
    eps: f64,
    nodes: Vec<Node>,
    heap: BinaryHeap<Queued>,
    best: Option<(f64, usize, Point2)>,
    /// Smallest bound among nodes cut off by the depth limit.
    truncated: f64,
}

impl<'a> Search<'a> {
    fn new(net: &'a MetricNet, targets: &'a [Incarnation], limits: SearchLimits, eps: f64) -> Self {
        Self {
            net,
            targets,
            limits,
            eps,
            nodes: Vec::new(),
            heap: BinaryHeap::new(),
            best: None,
            truncated: f64::INFINITY,
        }
    }

    fn push(&mut self, node: Node) -> Result<(), GeodesicError> {
        if self.nodes.len() >= self.limits.max_nodes {
            return Err(GeodesicError::SearchBudgetExceeded("node budget"));
        }
        let id = self.nodes.len();
        self.heap.push(Queued(node.bound, id));
        self.nodes.push(node);
        Ok(())
    }

    fn run(mut self, sources: &[Incarnation]) -> Result<GeodesicPath, GeodesicError> {
        for s in sources {
            self.push(Node {
                polygon: s.polygon,
                entry: None,
                map: Rigid::identity(),
                source: s.position,
                window: None,
                root_site: s.site,
                depth: 1,
                parent: None,
                bound: 0.0,
            })?;
        }
        while let Some(Queued(bound, id)) = self.heap.pop() {
            if let Some((best, _, _)) = self.best {
                if bound >= best {
                    break;
                }
            }
            self.check_targets(id);
            if self.nodes[id].depth >= self.limits.max_faces {
                self.truncated = self.truncated.min(bound);
                continue;
            }
            self.expand(id)?;
        }
        let (best, id, x) = self.best.ok_or(GeodesicError::Disconnected)?;
        if self.truncated < best - self.eps {
            return Err(GeodesicError::SearchBudgetExceeded("face-sequence length"));
        }
        Ok(self.reconstruct(id, x, best))
    }

    fn check_targets(&mut self, id: usize) {
        let node = &self.nodes[id];
        for t in self.targets.iter().filter(|t| t.polygon == node.polygon) {
            let x = node.map.apply(t.position);
            if let Some((a, b)) = node.window {
                if !in_wedge(node.source, a, b, x, self.eps) {
                    continue;
                }
            }
            let len = (x - node.source).norm();
            if self.best.is_none_or(|(b, _, _)| len < b) {
                self.best = Some((len, id, x));
            }
        }
    }

    fn expand(&mut self, id: usize) -> Result<(), GeodesicError> {
        let (polygon, entry, map, source, window, site, depth) = {
            let n = &self.nodes[id];
            (
                n.polygon,
                n.entry,
                n.map,
                n.source,
                n.window,
                n.root_site,
                n.depth,
            )
        };
        let nv = self.net.polygons()[polygon].len();
        for e in 0..nv {
            if Some(e) == entry {
                continue;
            }
            if entry.is_none() {
                match site {
                    Site::Corner(c) if e == c || (e + 1) % nv == c => continue,
                    Site::Edge(k) if e == k => continue,
                    _ => {}
                }
            }
            let Some((other, reversed)) = self.net.partner(polygon, e) else {
                continue;
            };
            let (ea, eb) = self.net.edge_points(polygon, e);
            let (ua, ub) = (map.apply(ea), map.apply(eb));
            let clipped = match window {
                None => Some((ua, ub)),
                Some((a, b)) => clip_to_wedge(source, a, b, ua, ub),
            };
            let Some((wa, wb)) = clipped else { continue };
            if (wb - wa).norm() <= self.eps {
                continue;
            }
            let (wa, wb) = if cross2(wa - source, wb - source) >= 0.0 {
                (wa, wb)
            } else {
                (wb, wa)
            };
            let glue = gluing_map(self.net, polygon, e, other.polygon, other.edge, reversed);
            self.push(Node {
                polygon: other.polygon,
                entry: Some(other.edge),
                map: map.then_inner(&glue),
                source,
                window: Some((wa, wb)),
                root_site: site,
                depth: depth + 1,
                parent: Some(id),
                bound: segment_distance(source, wa, wb),
            })?;
        }
        Ok(())
    }

    fn reconstruct(&self, id: usize, x: Point2, length: f64) -> GeodesicPath {
        let mut chain = vec![id];
        while let Some(p) = self.nodes[*chain.last().unwrap()].parent {
            chain.push(p);
        }
        chain.reverse();
        let s = self.nodes[id].source;
        // Unfolded breakpoints: source, crossing of each entry edge, target.
        let mut marks = vec![s];
        for &k in &chain[1..] {
            let node = &self.nodes[k];
            let (ea, eb) = self.net.edge_points(node.polygon, node.entry.unwrap());
            let (ua, ub) = (node.map.apply(ea), node.map.apply(eb));
            marks.push(line_crossing(s, x, ua, ub));
        }
        marks.push(x);
        let legs = chain
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let node = &self.nodes[k];
                Leg {
                    polygon: node.polygon,
                    start: node.map.invert(marks[i]),
                    end: node.map.invert(marks[i + 1]),
                }
            })
            .collect();
        GeodesicPath { legs, length }
    }
}

/// Is `x` inside the closed wedge from `s` spanned by `a` then `b`
/// (counterclockwise)? Windows never contain their source, so the wedge is
/// narrower than π and the two half-planes alone cut it out; the opposite
/// wedge fails both.
fn in_wedge(s: Point2, a: Point2, b: Point2, x: Point2, eps: f64) -> bool {
    let (da, db, dx) = (a - s, b - s, x - s);
    let slack = eps * dx.norm().max(1.0);
    cross2(da, db) > 0.0
        && cross2(da, dx) >= -slack * da.norm()
        && cross2(dx, db) >= -slack * db.norm()
}

/// Part of segment `[p, q]` inside the wedge from `s` through `[a, b]`.
/// No slack: rays grazing a corner leave a zero-width window, which the
/// caller drops, while the neighbouring window keeps the ray as its closed
/// end.
fn clip_to_wedge(
    s: Point2,
    a: Point2,
    b: Point2,
    p: Point2,
    q: Point2,
) -> Option<(Point2, Point2)> {
    let (da, db) = (a - s, b - s);
    if cross2(da, db) <= 0.0 {
        return None;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    // Constraints c(t) = c0 + t (c1 − c0) >= 0.
    for (c0, c1) in [
        (cross2(da, p - s), cross2(da, q - s)),
        (cross2(p - s, db), cross2(q - s, db)),
    ] {
        if c0 < 0.0 && c1 < 0.0 {
            return None;
        }
        if c0 < 0.0 {
            lo = lo.max(c0 / (c0 - c1));
        } else if c1 < 0.0 {
            hi = hi.min(c0 / (c0 - c1));
        }
    }
    if lo > hi {
        return None;
    }
    Some((p + (q - p) * lo, p + (q - p) * hi))
}

fn segment_distance(s: Point2, a: Point2, b: Point2) -> f64 {
    let d = b - a;
    let len2 = d.norm_squared();
    let t = if len2 > 0.0 {
        ((s - a).dot(&d) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (a + d * t - s).norm()
}

/// Point where segment `[s, x]` meets the line through `a` and `b`, clamped
/// to `[a, b]`.
fn line_crossing(s: Point2, x: Point2, a: Point2, b: Point2) -> Point2 {
    let d = x - s;
    let e = b - a;
    let den = cross2(d, e);
    if den.abs() <= f64::MIN_POSITIVE {
        return a;
    }
    let u = (cross2(d, s - a) / den).clamp(0.0, 1.0);
    a + e * u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intrinsic::net::{locate_on_polytope, net_from_polytope};
    use crate::polytope::convex_hull;
    use crate::Vector3;

    fn unit_cube() -> crate::polytope::ConvexPolytope {
        let mut pts = vec![];
        for &x in &[0.0, 1.0] {
            for &y in &[0.0, 1.0] {
                for &z in &[0.0, 1.0] {
                    pts.push(Vector3::new(x, y, z));
                }
            }
        }
        convex_hull(&pts).unwrap()
    }

    #[test]
    fn adjacent_face_centers() {
        let cube = unit_cube();
        let net = net_from_polytope(&cube);
        let tol = Tolerance::default();
        let a = locate_on_polytope(&cube, Vector3::new(0.5, 0.5, 1.0), tol).unwrap();
        let b = locate_on_polytope(&cube, Vector3::new(1.0, 0.5, 0.5), tol).unwrap();
        let g = shortest_path(&net, a, b).unwrap();
        assert!((g.length - 1.0).abs() < 1e-12);
        assert_eq!(g.legs.len(), 2);
    }

    #[test]
    fn opposite_corners() {
        let cube = unit_cube();
        let net = net_from_polytope(&cube);
        let tol = Tolerance::default();
        let a = locate_on_polytope(&cube, Vector3::zeros(), tol).unwrap();
        let b = locate_on_polytope(&cube, Vector3::new(1.0, 1.0, 1.0), tol).unwrap();
        let g = shortest_path(&net, a, b).unwrap();
        assert!((g.length - 5f64.sqrt()).abs() < 1e-12);
        let back = shortest_path(&net, b, a).unwrap();
        assert_eq!(g.length, back.length);
    }

    #[test]
    fn same_face_is_euclidean() {
        let cube = unit_cube();
        let net = net_from_polytope(&cube);
        let p = SurfacePoint::new(0, Point2::new(0.3, 0.4));
        let q = SurfacePoint::new(0, Point2::new(0.3 + 1e-6, 0.4));
        let g = shortest_path(&net, p, q).unwrap();
        assert!((g.length - 1e-6).abs() < 1e-15);
    }

    #[test]
    fn point_at_walks_the_legs() {
        let cube = unit_cube();
        let net = net_from_polytope(&cube);
        let tol = Tolerance::default();
        let a = locate_on_polytope(&cube, Vector3::new(0.5, 0.5, 1.0), tol).unwrap();
        let b = locate_on_polytope(&cube, Vector3::new(0.5, 0.5, 0.0), tol).unwrap();
        let g = shortest_path(&net, a, b).unwrap();
        assert!((g.length - 2.0).abs() < 1e-12);
        let total: f64 = g.legs.iter().map(Leg::length).sum();
        assert!((total - g.length).abs() < 1e-12);
        let mid = g.point_at(1.0);
        assert_eq!(mid.polygon, g.legs[1].polygon);
    }
}
