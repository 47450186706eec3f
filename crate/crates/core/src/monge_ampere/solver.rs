//! Measure-matching solves for the Dirichlet problem.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use nalgebra::{DMatrix, DVector};

use super::plfunc::{cell_mass, edge_weights, PLConvexFunction};
use super::problem::MAProblem;
use super::weight::{plane_integral, Quadrature};
use super::MAError;
use crate::Point2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Monotone per-node lowering sweeps.
    OlikerPrussner,
    /// Damped Newton on the interior values; needs `θ` independent of `z`.
    Newton,
    /// Newton when `θ` is independent of `z` and the start puts every
    /// interior node on the envelope; sweeps otherwise.
    Hybrid,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Bound on `|mᵢ − μᵢ| / μᵢ`.
    pub tol: f64,
    /// Newton iterations.
    pub max_iter: usize,
    /// Sweeps of the monotone method.
    pub max_sweeps: usize,
    pub method: Method,
    pub quadrature: Quadrature,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 100,
            max_sweeps: 20_000,
            method: Method::Hybrid,
            quadrature: Quadrature {
                relative: 1e-10,
                max_depth: 8,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MASolution {
    pub function: PLConvexFunction,
    pub num_boundary: usize,
    /// Achieved interior masses.
    pub masses: Vec<f64>,
    /// Final `max |mᵢ − μᵢ| / μᵢ`.
    pub residual: f64,
    /// `Σ |mᵢ − μᵢ|` after each sweep of the monotone method.
    pub sweep_residuals: Vec<f64>,
    /// Relative residual before each Newton step.
    pub newton_residuals: Vec<f64>,
    pub iterations: usize,
    /// The method that produced the result.
    pub method: Method,
}

impl MASolution {
    pub fn interior_values(&self) -> &[f64] {
        &self.function.values()[self.num_boundary..]
    }
}

/// Upper bound on the total interior mass, `∫ max_i θ(p, ·, Bᵢ) dp`, when
/// `θ` does not depend on `z`. `None` if the bound is infinite or not
/// available.
pub fn mass_bound(problem: &MAProblem) -> Option<f64> {
    let w = &problem.weight;
    if w.constant().is_some() || w.depends_on_z() {
        return None;
    }
    let xs: &[Point2] = if w.depends_on_x() {
        &problem.interior_nodes
    } else {
        &problem.interior_nodes[..1]
    };
    plane_integral(&|p| xs.iter().map(|&x| w.eval(p, 0.0, x)).fold(0.0, f64::max))
}

/// Solve from the default start: a paraboloid under the boundary data for
/// Newton, values above the data for the monotone sweeps.
pub fn solve_ma(problem: &MAProblem, opts: SolveOptions) -> Result<MASolution, MAError> {
    problem.validate()?;
    check_feasible(problem)?;
    match opts.method {
        Method::OlikerPrussner => sweeps(problem, start_above(problem), opts),
        Method::Newton => newton(problem, start_below(problem), opts),
        Method::Hybrid if problem.weight.depends_on_z() => {
            sweeps(problem, start_above(problem), opts)
        }
        Method::Hybrid => match newton(problem, start_below(problem), opts) {
            Ok(s) => Ok(s),
            Err(MAError::MaxIterExceeded { iterations: 0, .. }) => {
                sweeps(problem, start_above(problem), opts)
            }
            Err(e) => Err(e),
        },
    }
}

/// Solve starting from the given interior values.
pub fn solve_ma_from(
    problem: &MAProblem,
    start: &[f64],
    opts: SolveOptions,
) -> Result<MASolution, MAError> {
    problem.validate()?;
    if start.len() != problem.num_interior() {
        return Err(MAError::InvalidProblem("start has the wrong length"));
    }
    check_feasible(problem)?;
    let start = start.to_vec();
    match opts.method {
        Method::OlikerPrussner => sweeps(problem, start, opts),
        Method::Newton => newton(problem, start, opts),
        Method::Hybrid if problem.weight.depends_on_z() => sweeps(problem, start, opts),
        Method::Hybrid => match newton(problem, start.clone(), opts) {
            Ok(s) => Ok(s),
            Err(MAError::MaxIterExceeded { iterations: 0, .. }) => sweeps(problem, start, opts),
            Err(e) => Err(e),
        },
    }
}

/// Relative margin applied to [`mass_bound`].
pub const BOUND_MARGIN: f64 = 1e-7;

fn check_feasible(problem: &MAProblem) -> Result<(), MAError> {
    if let Some(bound) = mass_bound(problem) {
        let total = problem.total_mass();
        // The bound carries quadrature error of order 1e-9; totals within
        // that margin are treated as unattainable.
        if total >= bound * (1.0 - BOUND_MARGIN) {
            return Err(MAError::Infeasible { total, bound });
        }
    }
    Ok(())
}

fn start_above(problem: &MAProblem) -> Vec<f64> {
    let top = problem
        .boundary_values
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    vec![top + 1.0; problem.num_interior()]
}

/// Interior values on a paraboloid lying below all boundary data, with
/// total curvature of the order of the prescribed mass.
fn start_below(problem: &MAProblem) -> Vec<f64> {
    let c = crate::planar::centroid(&problem.domain);
    let area = crate::planar::signed_area(&problem.domain);
    let bottom = problem
        .boundary_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let rho2 = problem
        .boundary_nodes
        .iter()
        .map(|b| (b - c).norm_squared())
        .fold(0.0, f64::max);
    let theta0 = problem.weight.eval(Point2::zeros(), bottom, c);
    let k = 0.5 * (problem.total_mass() / (area * theta0)).sqrt();
    problem
        .interior_nodes
        .iter()
        .map(|b| bottom + k * ((b - c).norm_squared() - rho2))
        .collect()
}

fn node_mass(
    problem: &MAProblem,
    u: &PLConvexFunction,
    i: usize,
    q: Quadrature,
) -> Result<f64, MAError> {
    let cell = u.cell(i, None)?;
    Ok(cell_mass(u, &cell, &*problem.weight, q)?)
}

fn all_masses(
    problem: &MAProblem,
    u: &PLConvexFunction,
    q: Quadrature,
) -> Result<Vec<f64>, MAError> {
    let nb = problem.num_boundary();
    (0..problem.num_interior())
        .map(|k| node_mass(problem, u, nb + k, q))
        .collect()
}

fn relative_residual(m: &[f64], mu: &[f64]) -> f64 {
    m.iter()
        .zip(mu)
        .map(|(a, b)| (a - b).abs() / b)
        .fold(0.0, f64::max)
}

fn l1(m: &[f64], mu: &[f64]) -> f64 {
    m.iter().zip(mu).map(|(a, b)| (a - b).abs()).sum()
}

fn newton(problem: &MAProblem, start: Vec<f64>, opts: SolveOptions) -> Result<MASolution, MAError> {
    let nb = problem.num_boundary();
    let n = problem.num_interior();
    let mu = &problem.masses;
    let q = opts.quadrature;
    let mut u = problem.function(&start);
    let mut m = all_masses(problem, &u, q)?;
    let floor = 0.5 * m.iter().chain(mu).copied().fold(f64::INFINITY, f64::min);
    if floor.is_nan() || floor <= 0.0 {
        // Some node is off the envelope; Newton cannot start here.
        return Err(MAError::MaxIterExceeded {
            iterations: 0,
            residual: relative_residual(&m, mu),
        });
    }
    let mut history = Vec::new();
    for it in 0..=opts.max_iter {
        let r = relative_residual(&m, mu);
        history.push(r);
        if r <= opts.tol {
            return Ok(MASolution {
                function: u,
                num_boundary: nb,
                masses: m,
                residual: r,
                sweep_residuals: Vec::new(),
                newton_residuals: history,
                iterations: it,
                method: Method::Newton,
            });
        }
        if it == opts.max_iter {
            break;
        }
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for k in 0..n {
            let i = nb + k;
            let cell = u.cell(i, None)?;
            for (j, w) in edge_weights(&u, &cell, &*problem.weight) {
                let d = w / (u.nodes()[j] - u.nodes()[i]).norm();
                jac[(k, k)] -= d;
                if j >= nb {
                    jac[(k, j - nb)] += d;
                }
            }
        }
        let f = DVector::from_iterator(n, m.iter().zip(mu).map(|(a, b)| b - a));
        let step = match jac.lu().solve(&f) {
            Some(s) => s,
            None => break,
        };
        let norm0 = l1(&m, mu);
        let mut alpha = 1.0;
        let mut accepted = false;
        while alpha > 1e-10 {
            let vals: Vec<f64> = (0..n)
                .map(|k| u.values()[nb + k] + alpha * step[k])
                .collect();
            let cand = problem.function(&vals);
            let mc = all_masses(problem, &cand, q)?;
            let min = mc.iter().copied().fold(f64::INFINITY, f64::min);
            if min >= floor && l1(&mc, mu) <= (1.0 - 0.5 * alpha) * norm0 {
                u = cand;
                m = mc;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Err(MAError::MaxIterExceeded {
        iterations: history.len(),
        residual: relative_residual(&m, mu),
    })
}

/// Set `u[i]` so that its mass lies in `[lo, hi]`; mass decreases as the
/// value rises.
fn adjust_node(
    problem: &MAProblem,
    u: &mut PLConvexFunction,
    i: usize,
    lo: f64,
    hi: f64,
    scale: f64,
    q: Quadrature,
) -> Result<(), MAError> {
    let v0 = u.values()[i];
    let mass_at = |u: &mut PLConvexFunction, v: f64| -> Result<f64, MAError> {
        u.values_mut()[i] = v;
        node_mass(problem, u, i, q)
    };
    let m0 = mass_at(u, v0)?;
    if (lo..=hi).contains(&m0) {
        return Ok(());
    }
    let dir = if m0 < lo { -1.0 } else { 1.0 };
    let (mut a, mut fa) = (v0, m0);
    let mut step = scale;
    let (mut b, mut fb);
    let mut tries = 0;
    loop {
        b = v0 + dir * step;
        fb = mass_at(u, b)?;
        if (lo..=hi).contains(&fb) {
            return Ok(());
        }
        if (dir < 0.0 && fb > hi) || (dir > 0.0 && fb < lo) {
            break;
        }
        a = b;
        fa = fb;
        step *= 2.0;
        tries += 1;
        if tries > 200 {
            u.values_mut()[i] = v0;
            return Err(MAError::MaxIterExceeded {
                iterations: 0,
                residual: f64::INFINITY,
            });
        }
    }
    // Illinois iteration on mass(v) − target, bracketed by a and b.
    let target = 0.5 * (lo + hi);
    let (mut ga, mut gb) = (fa - target, fb - target);
    for _ in 0..200 {
        let mut c = b - gb * (b - a) / (gb - ga);
        if !(c > a.min(b) && c < a.max(b)) {
            c = 0.5 * (a + b);
        }
        let fc = mass_at(u, c)?;
        if (lo..=hi).contains(&fc) {
            return Ok(());
        }
        let gc = fc - target;
        if gc * gb < 0.0 {
            a = b;
            ga = gb;
        } else {
            ga *= 0.5;
        }
        b = c;
        gb = gc;
        if (b - a).abs() <= 4.0 * f64::EPSILON * (a.abs() + b.abs()) {
            return Ok(());
        }
    }
    Ok(())
}

fn sweeps(problem: &MAProblem, start: Vec<f64>, opts: SolveOptions) -> Result<MASolution, MAError> {
    let nb = problem.num_boundary();
    let n = problem.num_interior();
    let mu = &problem.masses;
    let q = opts.quadrature;
    let mut u = problem.function(&start);
    let spread = problem
        .boundary_values
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
        - problem
            .boundary_values
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
    let scale = 1e-2 * (1.0 + spread);
    let mut history = Vec::new();
    let mut m = all_masses(problem, &u, q)?;
    for sweep in 0..=opts.max_sweeps {
        let r = relative_residual(&m, mu);
        if sweep > 0 {
            history.push(l1(&m, mu));
        }
        if r <= opts.tol {
            return Ok(MASolution {
                function: u,
                num_boundary: nb,
                masses: m,
                residual: r,
                sweep_residuals: history,
                newton_residuals: Vec::new(),
                iterations: sweep,
                method: Method::OlikerPrussner,
            });
        }
        if sweep == opts.max_sweeps {
            break;
        }
        for k in 0..n {
            let lo = mu[k] * (1.0 - 0.1 * opts.tol);
            adjust_node(problem, &mut u, nb + k, lo, mu[k], scale, q)?;
        }
        m = all_masses(problem, &u, q)?;
    }
    Err(MAError::MaxIterExceeded {
        iterations: opts.max_sweeps,
        residual: relative_residual(&m, mu),
    })
}
