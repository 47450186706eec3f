//! Comparison angles and the excess of geodesic triangles.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use super::geodesic::{shortest_path_with, GeodesicError, SearchLimits, SurfacePoint};
use super::net::MetricNet;
use crate::Tolerance;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AngleError {
    #[error("sides {0}, {1}, {2} violate the triangle inequality")]
    TriangleInequalityViolated(f64, f64, f64),
    #[error("need at least 2 samples")]
    TooFewSamples,
    #[error("the sampled sequences differ in length")]
    LengthMismatch,
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
}

/// Angle opposite `d` in the planar triangle with sides `x`, `y`, `d`.
///
/// Uses Kahan's cancellation-free form, so nearly flat and nearly
/// degenerate triangles keep full accuracy. Sides outside the triangle
/// inequality by no more than a few ulps are snapped onto it.
pub fn comparison_angle(x: f64, y: f64, d: f64) -> Result<f64, AngleError> {
    if !(x > 0.0 && y > 0.0 && d >= 0.0) || !(x + y + d).is_finite() {
        return Err(AngleError::TriangleInequalityViolated(x, y, d));
    }
    let slack = 8.0 * f64::EPSILON * (x + y);
    let lo = (x - y).abs();
    let hi = x + y;
    if d < lo - slack || d > hi + slack {
        return Err(AngleError::TriangleInequalityViolated(x, y, d));
    }
    let c = d.clamp(lo, hi);
    let (a, b) = if x >= y { (x, y) } else { (y, x) };
    let mu = if b >= c { c - (a - b) } else { b - (a - c) };
    let num = ((a - b) + c) * mu;
    let den = (a + (b + c)) * ((a - c) + b);
    if den <= 0.0 {
        return Ok(PI);
    }
    Ok(2.0 * (num / den).max(0.0).sqrt().atan())
}

/// Comparison angles on nested scales and their monotonicity audit.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanReport {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub distances: Vec<f64>,
    pub angles: Vec<f64>,
    /// Indices `k` with `angles[k + 1] > angles[k] + tol`.
    pub violations: Vec<usize>,
    /// Angle at the smallest sampled scale. A finite-sample estimate, not a
    /// converged limit.
    pub limit_estimate: f64,
    pub tolerance: f64,
}

/// Audit given side lengths, ordered from the smallest scale up.
pub fn scan_from_distances(
    xs: &[f64],
    ys: &[f64],
    ds: &[f64],
    tol: f64,
) -> Result<ScanReport, AngleError> {
    if xs.len() != ys.len() || xs.len() != ds.len() {
        return Err(AngleError::LengthMismatch);
    }
    if xs.len() < 2 {
        return Err(AngleError::TooFewSamples);
    }
    let angles = xs
        .iter()
        .zip(ys)
        .zip(ds)
        .map(|((&x, &y), &d)| comparison_angle(x, y, d))
        .collect::<Result<Vec<_>, _>>()?;
    let violations = (0..angles.len() - 1)
        .filter(|&k| angles[k + 1] > angles[k] + tol)
        .collect();
    Ok(ScanReport {
        xs: xs.to_vec(),
        ys: ys.to_vec(),
        distances: ds.to_vec(),
        limit_estimate: angles[0],
        angles,
        violations,
        tolerance: tol,
    })
}

/// Comparison angles at `o` for the points `Xₖ`, `Yₖ` at distances
/// `k/samples` of the way along the shortest paths `oa` and `ob`,
/// `k = 1..=samples`, with `dₖ` the intrinsic distance `Xₖ Yₖ`. On a
/// non-negatively curved net the angles never increase with `k`.
pub fn angle_monotonicity_scan(
    net: &MetricNet,
    o: SurfacePoint,
    a: SurfacePoint,
    b: SurfacePoint,
    samples: usize,
    angle_tol: f64,
) -> Result<ScanReport, AngleError> {
    if samples < 2 {
        return Err(AngleError::TooFewSamples);
    }
    let limits = SearchLimits::default();
    let tol = Tolerance::default();
    let oa = shortest_path_with(net, o, a, limits, tol)?;
    let ob = shortest_path_with(net, o, b, limits, tol)?;
    let (x, y) = (oa.length, ob.length);
    let mut xs = Vec::with_capacity(samples);
    let mut ys = Vec::with_capacity(samples);
    let mut ds = Vec::with_capacity(samples);
    for k in 1..=samples {
        let f = k as f64 / samples as f64;
        let (xk, yk) = (x * f, y * f);
        let d = shortest_path_with(net, oa.point_at(xk), ob.point_at(yk), limits, tol)?.length;
        xs.push(xk);
        ys.push(yk);
        ds.push(d);
    }
    scan_from_distances(&xs, &ys, &ds, angle_tol)
}

/// `α + β + γ − π` for the geodesic triangle `abc`, each angle estimated at
/// the smallest of `samples` nested scales.
pub fn triangle_excess(
    net: &MetricNet,
    a: SurfacePoint,
    b: SurfacePoint,
    c: SurfacePoint,
    samples: usize,
) -> Result<f64, AngleError> {
    let tol = 1e-9;
    let alpha = angle_monotonicity_scan(net, a, b, c, samples, tol)?.limit_estimate;
    let beta = angle_monotonicity_scan(net, b, c, a, samples, tol)?.limit_estimate;
    let gamma = angle_monotonicity_scan(net, c, a, b, samples, tol)?.limit_estimate;
    Ok(alpha + beta + gamma - PI)
}
