//! Continuation over a parameter from a solvable problem to a target.

use alloc::vec::Vec;

use super::problem::MAProblem;
use super::solver::{solve_ma, solve_ma_from, MASolution, SolveOptions};
use super::MAError;

/// A family `t ↦ problem(t)` sampled on an increasing grid from 0 to 1.
pub struct HomotopySchedule<F> {
    pub grid: Vec<f64>,
    pub family: F,
    /// Start each solve from the previous solution.
    pub warm_start: bool,
}

impl<F: Fn(f64) -> MAProblem> HomotopySchedule<F> {
    /// `steps` equal steps on `[0, 1]`.
    pub fn uniform(steps: usize, family: F) -> Self {
        let grid = (0..=steps).map(|k| k as f64 / steps as f64).collect();
        Self {
            grid,
            family,
            warm_start: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HomotopyOptions {
    pub solve: SolveOptions,
    /// Steps whose masses change by more than this fraction are split.
    pub max_mass_change: f64,
    pub min_step: f64,
}

impl Default for HomotopyOptions {
    fn default() -> Self {
        Self {
            solve: SolveOptions::default(),
            max_mass_change: 0.5,
            min_step: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomotopyStep {
    pub t: f64,
    pub solution: MASolution,
    /// False for intermediate parameters inserted by step splitting.
    pub on_grid: bool,
}

fn relative_change(a: &MAProblem, b: &MAProblem) -> f64 {
    a.masses
        .iter()
        .zip(&b.masses)
        .map(|(x, y)| (x - y).abs() / x.min(*y))
        .fold(0.0, f64::max)
}

/// Solve along the schedule. A failed or too large step is halved; once the
/// step falls below `min_step` the driver stops with `MinStepReached`.
pub fn homotopy_solve<F: Fn(f64) -> MAProblem>(
    schedule: &HomotopySchedule<F>,
    opts: HomotopyOptions,
) -> Result<Vec<HomotopyStep>, MAError> {
    let grid = &schedule.grid;
    if grid.len() < 2 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(MAError::InvalidProblem("grid must increase"));
    }
    let mut t = grid[0];
    let mut problem = (schedule.family)(t);
    let mut current = solve_ma(&problem, opts.solve)?;
    let mut steps = Vec::new();
    steps.push(HomotopyStep {
        t,
        solution: current.clone(),
        on_grid: true,
    });
    for &target in &grid[1..] {
        let mut h = target - t;
        while t < target {
            if h < opts.min_step {
                return Err(MAError::MinStepReached { last_t: t });
            }
            let next_t = if t + h >= target { target } else { t + h };
            let next = (schedule.family)(next_t);
            if relative_change(&problem, &next) > opts.max_mass_change {
                h *= 0.5;
                continue;
            }
            let attempt = if schedule.warm_start {
                solve_ma_from(&next, current.interior_values(), opts.solve)
            } else {
                solve_ma(&next, opts.solve)
            };
            match attempt {
                Ok(s) => {
                    t = next_t;
                    problem = next;
                    current = s;
                    steps.push(HomotopyStep {
                        t,
                        solution: current.clone(),
                        on_grid: t == target,
                    });
                    h *= 2.0;
                }
                Err(MAError::InvalidProblem(m)) => return Err(MAError::InvalidProblem(m)),
                Err(_) => h *= 0.5,
            }
        }
    }
    Ok(steps)
}
