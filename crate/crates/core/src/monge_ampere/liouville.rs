//! Entire solutions of `det D²u = f` are quadratic: watch the recovered
//! values flatten towards a quadratic on a fixed window as the domain grows.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use nalgebra::{DMatrix, DVector};

use super::problem::MAProblem;
use super::solver::{solve_ma, SolveOptions};
use super::MAError;
use crate::Point2;

#[derive(Clone, Debug, PartialEq)]
pub struct LiouvilleConfig {
    /// Half-widths of the square domains, increasing.
    pub radii: Vec<f64>,
    pub f: f64,
    pub spacing: f64,
    /// Half-width of the fixed inner window.
    pub window: f64,
    /// Added to the boundary value at the edge midpoint `(R, 0)`.
    pub bump: f64,
    pub solve: SolveOptions,
}

impl Default for LiouvilleConfig {
    fn default() -> Self {
        Self {
            radii: alloc::vec![1.0, 4.0],
            f: 1.0,
            spacing: 0.25,
            window: 0.5,
            bump: 0.0,
            solve: SolveOptions {
                tol: 1e-10,
                ..SolveOptions::default()
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LiouvilleRow {
    pub radius: f64,
    pub nodes: usize,
    /// Max-norm distance on the window from the least-squares quadratic.
    pub deviation: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeviationReport {
    pub rows: Vec<LiouvilleRow>,
    /// Deviations never increase with the radius. Reported, not enforced.
    pub non_increasing: bool,
}

/// Least-squares quadratic through `(x, z)` samples; returns the six
/// coefficients of `1, x, y, x², xy, y²` and the largest residual.
pub fn fit_quadratic(points: &[Point2], values: &[f64]) -> ([f64; 6], f64) {
    let basis = |p: &Point2| [1.0, p.x, p.y, p.x * p.x, p.x * p.y, p.y * p.y];
    let a = DMatrix::from_fn(points.len(), 6, |r, c| basis(&points[r])[c]);
    let b = DVector::from_column_slice(values);
    let coef = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-14)
        .expect("svd with both factors");
    let fitted = a * &coef;
    let dev = fitted
        .iter()
        .zip(values)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let mut out = [0.0; 6];
    out.copy_from_slice(coef.as_slice());
    (out, dev)
}

/// Square grid on `[−R, R]²` with masses `f·h²` and boundary data
/// `√f·|x|²/2`, plus `bump` at the edge midpoint `(R, 0)`.
pub fn liouville_problem(
    radius: f64,
    f: f64,
    spacing: f64,
    bump: f64,
) -> Result<MAProblem, MAError> {
    if !(f > 0.0 && f.is_finite()) {
        return Err(MAError::InvalidProblem("f must be positive"));
    }
    if !(radius > 0.0 && spacing > 0.0) {
        return Err(MAError::InvalidProblem(
            "radius and spacing must be positive",
        ));
    }
    let m = (2.0 * radius / spacing).round() as usize;
    if m < 2 || m % 2 == 1 {
        return Err(MAError::InvalidProblem("need an even number of grid steps"));
    }
    let h = 2.0 * radius / m as f64;
    let s = f.sqrt();
    let (mut bn, mut bv, mut inodes) = (Vec::new(), Vec::new(), Vec::new());
    for j in 0..=m {
        for i in 0..=m {
            let p = Point2::new(-radius + h * i as f64, -radius + h * j as f64);
            if i == 0 || j == 0 || i == m || j == m {
                let extra = if i == m && 2 * j == m { bump } else { 0.0 };
                bn.push(p);
                bv.push(0.5 * s * p.norm_squared() + extra);
            } else {
                inodes.push(p);
            }
        }
    }
    let masses = alloc::vec![f * h * h; inodes.len()];
    Ok(MAProblem::new(bn, bv, inodes, masses))
}

pub fn liouville_probe(cfg: &LiouvilleConfig) -> Result<DeviationReport, MAError> {
    let mut rows = Vec::new();
    for &r in &cfg.radii {
        let problem = liouville_problem(r, cfg.f, cfg.spacing, cfg.bump)?;
        let sol = solve_ma(&problem, cfg.solve)?;
        let u = &sol.function;
        let eps = 1e-9 * r;
        let (pts, vals): (Vec<Point2>, Vec<f64>) = u
            .nodes()
            .iter()
            .zip(u.values())
            .filter(|(p, _)| p.amax() <= cfg.window + eps)
            .map(|(p, v)| (*p, *v))
            .unzip();
        let (_, deviation) = fit_quadratic(&pts, &vals);
        rows.push(LiouvilleRow {
            radius: r,
            nodes: u.len(),
            deviation,
            residual: sol.residual,
        });
    }
    let non_increasing = rows.windows(2).all(|w| w[1].deviation <= w[0].deviation);
    Ok(DeviationReport {
        rows,
        non_increasing,
    })
}
