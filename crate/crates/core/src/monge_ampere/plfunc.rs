//! Piecewise-linear convex functions and their subgradient cells.

use alloc::vec::Vec;

use super::weight::{integrate_polygon, integrate_segment, Quadrature, QuadratureFailure, Weight};
use super::MAError;
use crate::planar::{intersect_halfplanes, EdgeTag, HalfPlane, TaggedPolygon};
use crate::Point2;

/// Lower convex envelope of the lifted points `(nodes[i], values[i])`.
#[derive(Clone, Debug, PartialEq)]
pub struct PLConvexFunction {
    nodes: Vec<Point2>,
    values: Vec<f64>,
}

/// Convex region of slope space used to cut off unbounded cells.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeWindow {
    /// Counterclockwise convex polygon.
    pub polygon: Vec<Point2>,
}

impl SlopeWindow {
    pub fn square(center: Point2, half: f64) -> Self {
        let polygon = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
            .iter()
            .map(|&(x, y)| center + Point2::new(x * half, y * half))
            .collect();
        Self { polygon }
    }

    pub fn area(&self) -> f64 {
        crate::planar::signed_area(&self.polygon)
    }

    fn halfplanes(&self, first_tag: usize) -> impl Iterator<Item = HalfPlane> + '_ {
        let n = self.polygon.len();
        (0..n).map(move |k| {
            let (a, b) = (self.polygon[k], self.polygon[(k + 1) % n]);
            let nrm = Point2::new(b.y - a.y, a.x - b.x);
            HalfPlane::new(nrm, nrm.dot(&a), first_tag + k)
        })
    }
}

/// The subdifferential of the envelope at one node, possibly cut by a
/// window.
#[derive(Clone, Debug, PartialEq)]
pub struct SubgradientCell {
    pub node: usize,
    /// Counterclockwise polygon in slope space.
    pub polygon: Vec<Point2>,
    /// For each edge of `polygon`, the node whose halfplane produced it, or
    /// `None` for window edges.
    pub neighbours: Vec<Option<usize>>,
    pub area: f64,
    /// True if the window cut the cell.
    pub clipped: bool,
}

impl SubgradientCell {
    pub fn edge(&self, k: usize) -> (Point2, Point2) {
        (self.polygon[k], self.polygon[(k + 1) % self.polygon.len()])
    }
}

impl PLConvexFunction {
    pub fn new(nodes: Vec<Point2>, values: Vec<f64>) -> Result<Self, MAError> {
        if nodes.len() != values.len() {
            return Err(MAError::InvalidProblem("nodes and values differ in length"));
        }
        if nodes.len() < 3 {
            return Err(MAError::InvalidProblem("need at least 3 nodes"));
        }
        if nodes.iter().any(|p| !p.x.is_finite() || !p.y.is_finite())
            || values.iter().any(|v| !v.is_finite())
        {
            return Err(MAError::InvalidProblem("non-finite node or value"));
        }
        for i in 0..nodes.len() {
            for j in 0..i {
                if nodes[i] == nodes[j] {
                    return Err(MAError::InvalidProblem("repeated node"));
                }
            }
        }
        Ok(Self { nodes, values })
    }

    pub fn nodes(&self) -> &[Point2] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn with_values(&self, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), self.nodes.len());
        Self {
            nodes: self.nodes.clone(),
            values,
        }
    }

    /// `u + ⟨a, x⟩ + b`.
    pub fn add_affine(&self, a: Point2, b: f64) -> Self {
        let values = self
            .nodes
            .iter()
            .zip(&self.values)
            .map(|(x, v)| v + a.dot(x) + b)
            .collect();
        Self {
            nodes: self.nodes.clone(),
            values,
        }
    }

    /// Slope scale used for clipping tolerances.
    fn slope_scale(&self, i: usize) -> f64 {
        let mut s: f64 = 1.0;
        for j in 0..self.nodes.len() {
            if j != i {
                s = s.max(
                    (self.values[j] - self.values[i]).abs()
                        / (self.nodes[j] - self.nodes[i]).norm(),
                );
            }
        }
        s
    }

    fn halfplanes(&self, i: usize) -> Vec<HalfPlane> {
        let (bi, ui) = (self.nodes[i], self.values[i]);
        (0..self.nodes.len())
            .filter(|&j| j != i)
            .map(|j| HalfPlane::new(self.nodes[j] - bi, self.values[j] - ui, j))
            .collect()
    }

    /// Slopes of supporting planes at node `i`, cut by `window` if given.
    /// Without a window the cell must be bounded, which holds exactly when
    /// the node lies strictly inside the convex hull of the others.
    /// Returns an empty polygon when the node is above the envelope.
    pub fn cell(&self, i: usize, window: Option<&SlopeWindow>) -> Result<SubgradientCell, MAError> {
        let scale = self.slope_scale(i);
        let eps = 1e-13 * scale;
        let mut hps = self.halfplanes(i);
        let n = self.nodes.len();
        let poly: TaggedPolygon = match window {
            Some(w) => {
                hps.extend(w.halfplanes(n));
                let c = crate::planar::centroid(&w.polygon);
                let half = w.polygon.iter().map(|p| (p - c).amax()).fold(0.0, f64::max) * 2.0 + 1.0;
                intersect_halfplanes(&hps, c, half, eps)
            }
            None => {
                let mut half = 4.0 * scale;
                loop {
                    let p = intersect_halfplanes(&hps, Point2::zeros(), half, eps);
                    if !p.touches_bound(eps) {
                        break p;
                    }
                    half *= 16.0;
                    if half > 1e15 * scale {
                        return Err(MAError::UnboundedCell(i));
                    }
                }
            }
        };
        let neighbours: Vec<Option<usize>> = poly
            .tags
            .iter()
            .map(|t| match *t {
                EdgeTag::Constraint(j) if j < n => Some(j),
                _ => None,
            })
            .collect();
        let clipped = window.is_some() && neighbours.iter().any(Option::is_none);
        let area = poly.area().max(0.0);
        Ok(SubgradientCell {
            node: i,
            polygon: poly.vertices,
            neighbours,
            area,
            clipped,
        })
    }

    /// Is node `i` on the envelope, allowing it to be lowered by `delta`?
    pub fn on_envelope(&self, i: usize, delta: f64, window: &SlopeWindow) -> bool {
        let mut lowered = self.clone();
        lowered.values[i] -= delta;
        lowered
            .cell(i, Some(window))
            .map(|c| c.area > 0.0)
            .unwrap_or(false)
    }

    /// Indices lying strictly above the envelope by more than `delta`.
    pub fn off_envelope(&self, delta: f64, window: &SlopeWindow) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| !self.on_envelope(i, delta, window))
            .collect()
    }

    /// Envelope value at an arbitrary point `x`: the maximum over the
    /// supporting planes of the node cells.
    pub fn evaluate(&self, x: Point2, window: &SlopeWindow) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for i in 0..self.nodes.len() {
            if let Ok(c) = self.cell(i, Some(window)) {
                for p in &c.polygon {
                    best = best.max(self.values[i] + p.dot(&(x - self.nodes[i])));
                }
            }
        }
        best
    }
}

/// Subgradient cell of a node with bounded cell, and its area. Fails with
/// `NotEnvelopeVertex` when the cell has no interior.
pub fn ma_measure(u: &PLConvexFunction, node: usize) -> Result<SubgradientCell, MAError> {
    ma_measure_in(u, node, None)
}

pub fn ma_measure_in(
    u: &PLConvexFunction,
    node: usize,
    window: Option<&SlopeWindow>,
) -> Result<SubgradientCell, MAError> {
    if node >= u.len() {
        return Err(MAError::InvalidProblem("node index out of range"));
    }
    let c = u.cell(node, window)?;
    if c.polygon.len() < 3 || c.area <= 0.0 {
        return Err(MAError::NotEnvelopeVertex(node));
    }
    Ok(c)
}

/// `∫_cell θ(p, u(Bᵢ), Bᵢ) dp`.
pub fn cell_mass(
    u: &PLConvexFunction,
    cell: &SubgradientCell,
    theta: &dyn Weight,
    q: Quadrature,
) -> Result<f64, QuadratureFailure> {
    if cell.polygon.len() < 3 {
        return Ok(0.0);
    }
    if let Some(c) = theta.constant() {
        return Ok(c * cell.area);
    }
    let (x, z) = (u.nodes[cell.node], u.values[cell.node]);
    integrate_polygon(&|p| theta.eval(p, z, x), &cell.polygon, q)
}

/// θ-weighted length of cell edges, per neighbour, for mass derivatives.
pub(crate) fn edge_weights(
    u: &PLConvexFunction,
    cell: &SubgradientCell,
    theta: &dyn Weight,
) -> Vec<(usize, f64)> {
    let (x, z) = (u.nodes[cell.node], u.values[cell.node]);
    (0..cell.polygon.len())
        .filter_map(|k| {
            let j = cell.neighbours[k]?;
            let (a, b) = cell.edge(k);
            let w = match theta.constant() {
                Some(c) => c * (b - a).norm(),
                None => integrate_segment(&|p| theta.eval(p, z, x), a, b),
            };
            Some((j, w))
        })
        .collect()
}

/// Conditional curvature of node `node`: the θ-measure of its cell.
pub fn conditional_curvature(
    u: &PLConvexFunction,
    node: usize,
    theta: &dyn Weight,
    q: Quadrature,
) -> Result<f64, MAError> {
    let cell = ma_measure(u, node)?;
    Ok(cell_mass(u, &cell, theta, q)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monge_ampere::weight::{ConstantWeight, FnWeight};
    use alloc::vec;

    fn cone() -> PLConvexFunction {
        // max(|x|, |y|) sampled at the origin and the corners of [−1, 1]².
        let nodes = vec![
            Point2::new(-1.0, -1.0),
            Point2::new(1.0, -1.0),
            Point2::new(1.0, 1.0),
            Point2::new(-1.0, 1.0),
            Point2::new(0.0, 0.0),
        ];
        PLConvexFunction::new(nodes, vec![1.0, 1.0, 1.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn cone_atom_is_a_diamond_of_area_two() {
        let c = ma_measure(&cone(), 4).unwrap();
        assert_eq!(c.polygon.len(), 4);
        assert!((c.area - 2.0).abs() < 1e-12);
        let twice =
            conditional_curvature(&cone(), 4, &ConstantWeight(2.0), Quadrature::default()).unwrap();
        assert!((twice - 4.0).abs() < 1e-12);
    }

    #[test]
    fn hull_nodes_need_a_window() {
        assert!(matches!(
            ma_measure(&cone(), 0),
            Err(MAError::UnboundedCell(0))
        ));
        let w = SlopeWindow::square(Point2::zeros(), 3.0);
        let total: f64 = (0..5).map(|i| cone().cell(i, Some(&w)).unwrap().area).sum();
        assert!((total - 36.0).abs() < 1e-9);
    }

    #[test]
    fn node_above_envelope_has_no_cell() {
        let mut u = cone();
        u.values_mut()[4] = 1.5;
        assert!(matches!(
            ma_measure(&u, 4),
            Err(MAError::NotEnvelopeVertex(4))
        ));
        let w = SlopeWindow::square(Point2::zeros(), 3.0);
        assert_eq!(u.off_envelope(1e-9, &w), vec![4]);
        assert!(cone().off_envelope(1e-9, &w).is_empty());
    }

    #[test]
    fn polynomial_weight_is_integrated_exactly() {
        // ∫ over the diamond |p₁| + |p₂| ≤ 1 of 1 + p₁² is 2 + 1/3.
        let theta = FnWeight::slope_only(|p: Point2, _z, _x| 1.0 + p.x * p.x);
        let m = conditional_curvature(&cone(), 4, &theta, Quadrature::default()).unwrap();
        assert!((m - 7.0 / 3.0).abs() < 1e-13);
    }
}
