//! Minkowski's variational principle solved by damped Newton.
//!
//! With `c = ΣAᵢ / 3` the convex function `Φ(h) = Σ Aᵢhᵢ − c·ln V(h)` has
//! gradient `A − cF/V`, where `F(h)` are the face areas of the halfspace
//! intersection. At its minimum the areas are proportional to `A`, and the
//! body scaled by `√(c/V)` has areas exactly `A`. `Φ` is invariant under
//! translations when `ΣAᵢnᵢ = 0`, which leaves a 3-dimensional null space
//! handled by a small Levenberg shift.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use super::{check_closing, MinkowskiError, MinkowskiProblem};
use crate::polytope::{support_cells, ConvexPolytope, GeometryError, SupportCells};
use crate::{Tolerance, Vector3};

/// Face areas of `{x : ⟨x, nᵢ⟩ ≤ hᵢ}`, 0 for faces that do not touch.
pub fn area_map(normals: &[Vector3], support_numbers: &[f64]) -> Result<Vec<f64>, GeometryError> {
    Ok(
        crate::polytope::polytope_from_support(normals, support_numbers)?
            .areas()
            .to_vec(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinkowskiOptions {
    /// Bound on `|Fᵢ − Aᵢ| / Aᵢ` for the returned body.
    pub tol: f64,
    pub max_iter: usize,
    /// Allowed `|ΣAᵢnᵢ| / ΣAᵢ`.
    pub closing_tol: f64,
}

impl Default for MinkowskiOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200,
            closing_tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MinkowskiSolution {
    /// Centroid at the origin.
    pub polytope: ConvexPolytope,
    /// Support numbers of `polytope`, one per problem normal.
    pub support_numbers: Vec<f64>,
    /// `max |Fᵢ − Aᵢ| / Aᵢ`.
    pub residual: f64,
    pub iterations: usize,
    /// Relative gradient norm before each Newton step.
    pub history: Vec<f64>,
}

struct State {
    h: Vec<f64>,
    cells: SupportCells,
    volume: f64,
    phi: f64,
}

fn evaluate(problem: &MinkowskiProblem, h: Vec<f64>, c: f64) -> Option<State> {
    let cells = support_cells(problem.normals(), &h, Tolerance::new(1e-12)).ok()?;
    // Volume from the face areas, which come straight from the clipped
    // polygons; the assembled vertex set merges near-coincident corners and
    // is too noisy for the line search near solutions with high-degree
    // vertices.
    let volume = cells
        .polytope
        .areas()
        .iter()
        .zip(&h)
        .map(|(a, x)| a * x)
        .sum::<f64>()
        / 3.0;
    if volume.is_nan() || volume <= 0.0 {
        return None;
    }
    let phi = problem
        .areas()
        .iter()
        .zip(&h)
        .map(|(a, x)| a * x)
        .sum::<f64>()
        - c * volume.ln();
    Some(State {
        h,
        cells,
        volume,
        phi,
    })
}

fn gradient(problem: &MinkowskiProblem, s: &State, c: f64) -> Vec<f64> {
    let f = s.cells.polytope.areas();
    problem
        .areas()
        .iter()
        .zip(f)
        .map(|(a, fi)| a - c * fi / s.volume)
        .collect()
}

fn relative(problem: &MinkowskiProblem, g: &[f64]) -> f64 {
    g.iter()
        .zip(problem.areas())
        .map(|(x, a)| x.abs() / a)
        .fold(0.0, f64::max)
}

fn hessian(problem: &MinkowskiProblem, s: &State, c: f64) -> DMatrix<f64> {
    let m = problem.len();
    let n = problem.normals();
    let f = s.cells.polytope.areas();
    let v = s.volume;
    let mut hv = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        for &(j, len) in &s.cells.adjacency[i] {
            let cos = n[i].dot(&n[j]).clamp(-1.0, 1.0);
            let sin = n[i].cross(&n[j]).norm();
            if sin < 1e-14 {
                continue;
            }
            hv[(i, j)] += len / sin;
            hv[(i, i)] -= len * cos / sin;
        }
    }
    let fv = DVector::from_column_slice(f);
    (&fv * fv.transpose()) * (c / (v * v)) - hv * (c / v)
}

/// Solve from `hᵢ = 1`.
pub fn solve_minkowski(
    problem: &MinkowskiProblem,
    opts: MinkowskiOptions,
) -> Result<MinkowskiSolution, MinkowskiError> {
    solve_minkowski_from(problem, &vec![1.0; problem.len()], opts)
}

/// Solve from the given support numbers, which must describe a body with
/// interior.
pub fn solve_minkowski_from(
    problem: &MinkowskiProblem,
    start: &[f64],
    opts: MinkowskiOptions,
) -> Result<MinkowskiSolution, MinkowskiError> {
    if start.len() != problem.len() {
        return Err(MinkowskiError::InvalidProblem("start has the wrong length"));
    }
    let total: f64 = problem.areas().iter().sum();
    let defect = check_closing(problem).norm();
    let threshold = opts.closing_tol * total;
    if defect > threshold {
        return Err(MinkowskiError::ClosingDefect { defect, threshold });
    }
    let c = total / 3.0;
    let mut s = evaluate(problem, start.to_vec(), c)
        .ok_or(MinkowskiError::Geometry(GeometryError::EmptyBody))?;
    let mut history = Vec::new();
    let mut shift = 1e-10;
    for it in 0..=opts.max_iter {
        let g = gradient(problem, &s, c);
        let r = relative(problem, &g);
        history.push(r);
        // The area residual of the rescaled body equals the relative
        // gradient; stop a little below tol to absorb rounding.
        if r <= 0.5 * opts.tol {
            return finish(problem, s, c, it, history, opts);
        }
        if it == opts.max_iter {
            return Err(MinkowskiError::MaxIterExceeded {
                iterations: it,
                residual: r,
            });
        }
        let hess = hessian(problem, &s, c);
        let scale = (0..problem.len())
            .map(|i| hess[(i, i)].abs())
            .fold(0.0, f64::max)
            .max(1e-300);
        let gv = DVector::from_column_slice(&g);
        let mut accepted = false;
        for _ in 0..40 {
            let mut a = hess.clone();
            for i in 0..problem.len() {
                a[(i, i)] += shift * scale;
            }
            let step = match a.cholesky() {
                Some(ch) => -ch.solve(&gv),
                None => {
                    shift *= 10.0;
                    continue;
                }
            };
            let slope = gv.dot(&step);
            let mut alpha = 1.0;
            while alpha > 1e-12 {
                let h: Vec<f64> =
                    s.h.iter()
                        .zip(step.iter())
                        .map(|(x, d)| x + alpha * d)
                        .collect();
                if let Some(next) = evaluate(problem, h, c) {
                    if next.phi <= s.phi + 1e-4 * alpha * slope + 1e-15 * s.phi.abs() {
                        s = next;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if accepted {
                if alpha == 1.0 {
                    shift = (shift * 0.1).max(1e-12);
                }
                break;
            }
            shift *= 10.0;
        }
        if !accepted {
            return Err(MinkowskiError::MaxIterExceeded {
                iterations: it,
                residual: r,
            });
        }
    }
    unreachable!()
}

fn finish(
    problem: &MinkowskiProblem,
    s: State,
    c: f64,
    iterations: usize,
    history: Vec<f64>,
    opts: MinkowskiOptions,
) -> Result<MinkowskiSolution, MinkowskiError> {
    let factor = (c / s.volume).sqrt();
    let body = s.cells.polytope.scaled(factor);
    let polytope = body.centered();
    let areas = polytope.areas();
    let degenerate: Vec<usize> = (0..problem.len())
        .filter(|&i| areas[i] <= opts.tol * problem.areas()[i])
        .collect();
    if !degenerate.is_empty() {
        return Err(MinkowskiError::DegenerateFace(degenerate));
    }
    let residual = areas
        .iter()
        .zip(problem.areas())
        .map(|(f, a)| (f - a).abs() / a)
        .fold(0.0, f64::max);
    let support_numbers = polytope.support_numbers().to_vec();
    Ok(MinkowskiSolution {
        polytope,
        support_numbers,
        residual,
        iterations,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::convex_hull;

    fn cube_normals() -> Vec<Vector3> {
        vec![
            Vector3::x(),
            -Vector3::x(),
            Vector3::y(),
            -Vector3::y(),
            Vector3::z(),
            -Vector3::z(),
        ]
    }

    #[test]
    fn area_map_of_cubes() {
        let a = area_map(&cube_normals(), &[0.5; 6]).unwrap();
        assert!(a.iter().all(|x| (x - 1.0).abs() < 1e-12));
        let a = area_map(&cube_normals(), &[1.0; 6]).unwrap();
        assert!(a.iter().all(|x| (x - 4.0).abs() < 1e-12));
    }

    #[test]
    fn unit_areas_give_the_unit_cube() {
        let p = MinkowskiProblem::new(cube_normals(), vec![1.0; 6]).unwrap();
        let s = solve_minkowski(&p, MinkowskiOptions::default()).unwrap();
        for h in &s.support_numbers {
            assert!((h - 0.5).abs() < 1e-9, "{h}");
        }
        assert!(s.residual < 1e-10);
    }

    #[test]
    fn box_round_trip() {
        let pts: Vec<Vector3> = (0..8)
            .map(|k| {
                let sign = |bit: usize| if k & bit == 0 { -1.0 } else { 1.0 };
                Vector3::new(sign(1), 0.5 * sign(2), 0.25 * sign(4))
            })
            .collect();
        let body = convex_hull(&pts).unwrap();
        let p = MinkowskiProblem::from_polytope(&body).unwrap();
        let s = solve_minkowski(&p, MinkowskiOptions::default()).unwrap();
        for (h, h0) in s.support_numbers.iter().zip(body.support_numbers()) {
            assert!((h - h0).abs() < 1e-8);
        }
    }

    #[test]
    fn unclosed_data_is_rejected() {
        let mut areas = vec![1.0; 6];
        areas[0] = 2.0;
        let p = MinkowskiProblem::new(cube_normals(), areas).unwrap();
        assert!(matches!(
            solve_minkowski(&p, MinkowskiOptions::default()),
            Err(MinkowskiError::ClosingDefect { .. })
        ));
    }
}
