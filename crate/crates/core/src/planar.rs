//! Planar primitives: signed areas, strict convex hulls and halfplane
//! intersection with per-edge provenance.
//!
//! Halfplane intersection is done by successive clipping of a bounding
//! square. Every output edge remembers which halfplane (or which side of the
//! bounding square) produced it, and output vertices are recomputed as exact
//! line–line intersections of their two adjacent edges, so accuracy does not
//! depend on the size of the initial square.

use alloc::vec::Vec;

use crate::Point2;

#[inline]
pub fn cross2(a: Point2, b: Point2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Signed shoelace area; positive for counterclockwise polygons.
pub fn signed_area(points: &[Point2]) -> f64 {
    let n = points.len();
    if n < 3 {
        return 0.0;
    }
    let o = points[0];
    let mut twice = 0.0;
    for k in 1..n - 1 {
        twice += cross2(points[k] - o, points[k + 1] - o);
    }
    0.5 * twice
}

pub fn centroid(points: &[Point2]) -> Point2 {
    let n = points.len();
    if n == 0 {
        return Point2::zeros();
    }
    let a = signed_area(points);
    if a.abs() <= f64::MIN_POSITIVE {
        return points.iter().fold(Point2::zeros(), |s, p| s + p) / n as f64;
    }
    let o = points[0];
    let mut acc = Point2::zeros();
    for k in 1..n - 1 {
        let w = 0.5 * cross2(points[k] - o, points[k + 1] - o);
        acc += (o + points[k] + points[k + 1]) * (w / 3.0);
    }
    acc / a
}

/// Indices of the strict convex hull of `points`, counterclockwise, with
/// points closer than `eps` to a hull edge (collinear or duplicate) dropped.
pub fn convex_hull_indices(points: &[Point2], eps: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        points[a]
            .x
            .partial_cmp(&points[b].x)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(
                points[a]
                    .y
                    .partial_cmp(&points[b].y)
                    .unwrap_or(core::cmp::Ordering::Equal),
            )
    });
    idx.dedup_by(|a, b| (points[*a] - points[*b]).norm() <= eps);
    if idx.len() < 3 {
        return idx;
    }
    // Monotone chain; a point is kept only if it turns strictly left by more
    // than eps relative to the chord.
    let turn = |o: usize, a: usize, b: usize| -> bool {
        let u = points[a] - points[o];
        let v = points[b] - points[o];
        let len = v.norm().max(f64::MIN_POSITIVE);
        cross2(u, v) / len > eps
    };
    let mut hull: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for &i in idx.iter() {
        while hull.len() >= 2 && !turn(hull[hull.len() - 2], hull[hull.len() - 1], i) {
            hull.pop();
        }
        hull.push(i);
    }
    let lower = hull.len() + 1;
    for &i in idx.iter().rev().skip(1) {
        while hull.len() >= lower && !turn(hull[hull.len() - 2], hull[hull.len() - 1], i) {
            hull.pop();
        }
        hull.push(i);
    }
    hull.pop();
    hull
}

/// `normal · x <= offset`, carrying a caller-defined tag.
#[derive(Clone, Copy, Debug)]
pub struct HalfPlane {
    pub normal: Point2,
    pub offset: f64,
    pub tag: usize,
}

impl HalfPlane {
    pub fn new(normal: Point2, offset: f64, tag: usize) -> Self {
        Self {
            normal,
            offset,
            tag,
        }
    }

    /// Signed distance of `p` beyond the boundary line (positive = outside).
    #[inline]
    pub fn excess(&self, p: Point2) -> f64 {
        (self.normal.dot(&p) - self.offset) / self.normal.norm()
    }
}

/// Which halfplane produced an edge of a clipped polygon.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeTag {
    /// One of the four sides of the initial bounding square.
    Bound(u8),
    /// The halfplane with this tag.
    Constraint(usize),
}

/// Convex polygon, counterclockwise; edge `k` runs from `vertices[k]` to
/// `vertices[k + 1]` and was produced by `tags[k]`.
#[derive(Clone, Debug, Default)]
pub struct TaggedPolygon {
    pub vertices: Vec<Point2>,
    pub tags: Vec<EdgeTag>,
}

impl TaggedPolygon {
    pub fn square(center: Point2, half: f64) -> Self {
        let c = center;
        Self {
            vertices: alloc::vec![
                c + Point2::new(-half, -half),
                c + Point2::new(half, -half),
                c + Point2::new(half, half),
                c + Point2::new(-half, half),
            ],
            tags: alloc::vec![
                EdgeTag::Bound(0),
                EdgeTag::Bound(1),
                EdgeTag::Bound(2),
                EdgeTag::Bound(3)
            ],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices).max(0.0)
    }

    pub fn edge(&self, k: usize) -> (Point2, Point2) {
        let n = self.vertices.len();
        (self.vertices[k], self.vertices[(k + 1) % n])
    }

    /// True if a side of the initial square survives with positive length.
    pub fn touches_bound(&self, eps: f64) -> bool {
        (0..self.tags.len()).any(|k| {
            matches!(self.tags[k], EdgeTag::Bound(_)) && {
                let (a, b) = self.edge(k);
                (b - a).norm() > eps
            }
        })
    }

    /// Clip by one halfplane. Points within `eps` of the boundary count as
    /// inside.
    pub fn clip(&mut self, hp: &HalfPlane, eps: f64) {
        let n = self.vertices.len();
        if n == 0 {
            return;
        }
        let d: Vec<f64> = self.vertices.iter().map(|&v| hp.excess(v)).collect();
        if d.iter().all(|&x| x <= eps) {
            return;
        }
        if d.iter().all(|&x| x > eps) {
            self.vertices.clear();
            self.tags.clear();
            return;
        }
        let mut verts = Vec::with_capacity(n + 1);
        let mut tags = Vec::with_capacity(n + 1);
        for k in 0..n {
            let j = (k + 1) % n;
            let (a, b) = (self.vertices[k], self.vertices[j]);
            let (da, db) = (d[k], d[j]);
            let cut = |da: f64, db: f64| {
                let t = if (da - db).abs() > 0.0 {
                    (da / (da - db)).clamp(0.0, 1.0)
                } else {
                    0.5
                };
                a + (b - a) * t
            };
            if da <= eps {
                verts.push(a);
                tags.push(self.tags[k]);
                if db > eps {
                    verts.push(cut(da, db));
                    tags.push(EdgeTag::Constraint(hp.tag));
                }
            } else if db <= eps {
                verts.push(cut(da, db));
                tags.push(self.tags[k]);
            }
        }
        self.vertices = verts;
        self.tags = tags;
        self.dedup(eps);
    }

    /// Drop zero-length edges; collapse to empty if fewer than three
    /// distinct vertices remain.
    fn dedup(&mut self, eps: f64) {
        let mut changed = true;
        while changed && self.vertices.len() >= 2 {
            changed = false;
            let n = self.vertices.len();
            for k in 0..n {
                let j = (k + 1) % n;
                if (self.vertices[j] - self.vertices[k]).norm() <= eps {
                    // Edge k is degenerate: remove vertex j, keep its outgoing tag on k.
                    self.tags[k] = self.tags[j];
                    self.vertices.remove(j);
                    self.tags.remove(j);
                    changed = true;
                    break;
                }
            }
        }
        if self.vertices.len() < 3 {
            self.vertices.clear();
            self.tags.clear();
        }
    }

    /// Recompute every vertex as the intersection of the lines of its two
    /// adjacent edges when they meet at a well-conditioned angle.
    fn refine(&mut self, lines: &dyn Fn(EdgeTag) -> (Point2, f64)) {
        let n = self.vertices.len();
        for k in 0..n {
            let prev = self.tags[(k + n - 1) % n];
            let next = self.tags[k];
            if prev == next {
                continue;
            }
            let (n1, c1) = lines(prev);
            let (n2, c2) = lines(next);
            let det = cross2(n1, n2);
            if det.abs() <= 1e-8 * n1.norm() * n2.norm() {
                continue;
            }
            let x = (c1 * n2.y - c2 * n1.y) / det;
            let y = (n1.x * c2 - n2.x * c1) / det;
            self.vertices[k] = Point2::new(x, y);
        }
    }
}

/// Intersection of `halfplanes` inside the square of half-width `half`
/// centered at `center`. Tags of the output edges refer to
/// `halfplanes[i].tag`.
pub fn intersect_halfplanes(
    halfplanes: &[HalfPlane],
    center: Point2,
    half: f64,
    eps: f64,
) -> TaggedPolygon {
    let mut poly = TaggedPolygon::square(center, half);
    for hp in halfplanes {
        poly.clip(hp, eps);
        if poly.is_empty() {
            return poly;
        }
    }
    let lines = |tag: EdgeTag| -> (Point2, f64) {
        match tag {
            EdgeTag::Bound(side) => {
                let (nrm, off) = match side {
                    0 => (Point2::new(0.0, -1.0), half - center.y),
                    1 => (Point2::new(1.0, 0.0), half + center.x),
                    2 => (Point2::new(0.0, 1.0), half + center.y),
                    _ => (Point2::new(-1.0, 0.0), half - center.x),
                };
                (nrm, off)
            }
            EdgeTag::Constraint(t) => {
                let hp = halfplanes
                    .iter()
                    .find(|h| h.tag == t)
                    .expect("tag of a clipping halfplane");
                (hp.normal, hp.offset)
            }
        }
    };
    poly.refine(&lines);
    poly
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn shoelace_unit_square() {
        let sq = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        assert!((signed_area(&sq) - 1.0).abs() < 1e-15);
        let c = centroid(&sq);
        assert!((c - Point2::new(0.5, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn hull_drops_collinear_and_interior_points() {
        let pts = vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.5, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
            Point2::new(0.3, 0.4),
        ];
        let h = convex_hull_indices(&pts, 1e-12);
        assert_eq!(h.len(), 4);
        assert!(!h.contains(&1) && !h.contains(&5));
        let poly: Vec<Point2> = h.iter().map(|&i| pts[i]).collect();
        assert!(signed_area(&poly) > 0.0);
    }

    #[test]
    fn diamond_from_four_halfplanes() {
        // |x| + |y| <= 1
        let hps = [
            HalfPlane::new(Point2::new(1.0, 1.0), 1.0, 0),
            HalfPlane::new(Point2::new(-1.0, 1.0), 1.0, 1),
            HalfPlane::new(Point2::new(-1.0, -1.0), 1.0, 2),
            HalfPlane::new(Point2::new(1.0, -1.0), 1.0, 3),
        ];
        let poly = intersect_halfplanes(&hps, Point2::zeros(), 1e6, 1e-12);
        assert_eq!(poly.vertices.len(), 4);
        assert!((poly.area() - 2.0).abs() < 1e-12);
        assert!(!poly.touches_bound(1e-12));
        assert!(poly
            .tags
            .iter()
            .all(|t| matches!(t, EdgeTag::Constraint(_))));
    }

    #[test]
    fn infeasible_halfplanes_give_empty_polygon() {
        let hps = [
            HalfPlane::new(Point2::new(1.0, 0.0), -1.0, 0),
            HalfPlane::new(Point2::new(-1.0, 0.0), -1.0, 1),
        ];
        assert!(intersect_halfplanes(&hps, Point2::zeros(), 10.0, 1e-12).is_empty());
    }

    #[test]
    fn unbounded_intersection_touches_bound() {
        let hps = [HalfPlane::new(Point2::new(1.0, 0.0), 1.0, 0)];
        let poly = intersect_halfplanes(&hps, Point2::zeros(), 10.0, 1e-12);
        assert!(poly.touches_bound(1e-12));
    }

    #[test]
    fn concurrent_lines_do_not_leave_slivers() {
        // Four lines through (1, 0) plus a box: the corner must be a single vertex.
        let mut hps = vec![];
        for (k, a) in [0.3f64, 0.7, 1.1, 1.5].iter().enumerate() {
            let n = Point2::new(a.cos(), a.sin());
            hps.push(HalfPlane::new(n, n.x, k));
        }
        hps.push(HalfPlane::new(Point2::new(-1.0, 0.0), 1.0, 10));
        hps.push(HalfPlane::new(Point2::new(0.0, -1.0), 1.0, 11));
        let poly = intersect_halfplanes(&hps, Point2::zeros(), 100.0, 1e-12);
        for k in 0..poly.vertices.len() {
            let (a, b) = poly.edge(k);
            assert!((b - a).norm() > 1e-9);
        }
    }
}
