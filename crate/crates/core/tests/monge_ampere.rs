use std::f64::consts::PI;
use std::sync::Arc;

use polyconvex::monge_ampere::{
    homotopy_solve, liouville_probe, ma_measure, maximum_principle_check, solve_ma, FnWeight,
    HomotopyOptions, HomotopySchedule, LiouvilleConfig, MAError, MAProblem, PLConvexFunction,
    SlopeWindow, SolveOptions,
};
use polyconvex::Point2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit_square() -> Vec<Point2> {
    vec![
        Point2::new(0.0, 0.0),
        Point2::new(1.0, 0.0),
        Point2::new(1.0, 1.0),
        Point2::new(0.0, 1.0),
    ]
}

/// Gradients of all lower-hull facets through node `i`, by testing every
/// triple of lifted points against all others.
fn brute_force_facet_slopes(nodes: &[Point2], values: &[f64], i: usize) -> Vec<Point2> {
    let n = nodes.len();
    let mut out = Vec::new();
    for j in 0..n {
        for k in 0..n {
            if j == i || k == i || j >= k {
                continue;
            }
            let (e1, e2) = (nodes[j] - nodes[i], nodes[k] - nodes[i]);
            let det = e1.x * e2.y - e1.y * e2.x;
            if det.abs() < 1e-12 {
                continue;
            }
            let (d1, d2) = (values[j] - values[i], values[k] - values[i]);
            let p = Point2::new((d1 * e2.y - d2 * e1.y) / det, (e1.x * d2 - e2.x * d1) / det);
            let below =
                (0..n).all(|l| values[l] - values[i] - p.dot(&(nodes[l] - nodes[i])) >= -1e-12);
            if below {
                out.push(p);
            }
        }
    }
    out
}

#[test]
fn cone_atom_has_mass_two() {
    let mut nodes = vec![
        Point2::new(-1.0, -1.0),
        Point2::new(1.0, -1.0),
        Point2::new(1.0, 1.0),
        Point2::new(-1.0, 1.0),
    ];
    nodes.push(Point2::zeros());
    let u = PLConvexFunction::new(nodes, vec![1.0, 1.0, 1.0, 1.0, 0.0]).unwrap();
    let c = ma_measure(&u, 4).unwrap();
    assert!((c.area - 2.0).abs() <= 1e-12);
    for v in &c.polygon {
        assert!((v.x.abs() + v.y.abs() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn quadratic_measure_fills_the_domain() {
    // For |x|²/2 the gradient map is the identity, so the cells cut to the
    // slope window G tile G.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let w = SlopeWindow {
        polygon: unit_square(),
    };
    for _ in 0..10 {
        let mut nodes = unit_square();
        for _ in 0..20 {
            nodes.push(Point2::new(
                rng.random_range(0.02..0.98),
                rng.random_range(0.02..0.98),
            ));
        }
        let values = nodes.iter().map(|p| 0.5 * p.norm_squared()).collect();
        let u = PLConvexFunction::new(nodes, values).unwrap();
        let total: f64 = (0..u.len())
            .map(|i| u.cell(i, Some(&w)).unwrap().area)
            .sum();
        assert!((total - 1.0).abs() < 1e-9, "{total}");
    }
}

#[test]
fn cells_match_monte_carlo_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let samples = 1_000_000;
    for _ in 0..20 {
        let mut nodes = unit_square();
        for _ in 0..3 {
            nodes.push(Point2::new(
                rng.random_range(0.15..0.85),
                rng.random_range(0.15..0.85),
            ));
        }
        let a = rng.random_range(0.5..3.0);
        let values: Vec<f64> = nodes
            .iter()
            .map(|p| a * p.norm_squared() + rng.random_range(-0.05..0.05))
            .collect();
        let u = PLConvexFunction::new(nodes.clone(), values.clone()).unwrap();
        for i in 4..7 {
            let slopes = brute_force_facet_slopes(&nodes, &values, i);
            let cell = u.cell(i, None).unwrap();
            if slopes.len() < 3 {
                assert!(cell.area < 1e-12);
                continue;
            }
            let (lo, hi) = slopes.iter().fold(
                (
                    Point2::repeat(f64::INFINITY),
                    Point2::repeat(f64::NEG_INFINITY),
                ),
                |(lo, hi), p| (lo.inf(p), hi.sup(p)),
            );
            let mut hits = 0usize;
            for _ in 0..samples {
                let p = Point2::new(rng.random_range(lo.x..hi.x), rng.random_range(lo.y..hi.y));
                let best = (0..nodes.len())
                    .min_by(|&j, &k| {
                        (values[j] - p.dot(&nodes[j]))
                            .partial_cmp(&(values[k] - p.dot(&nodes[k])))
                            .unwrap()
                    })
                    .unwrap();
                hits += (best == i) as usize;
            }
            let estimate = hits as f64 / samples as f64 * (hi.x - lo.x) * (hi.y - lo.y);
            assert!(
                (estimate - cell.area).abs() <= 0.01 * cell.area,
                "{estimate} vs {}",
                cell.area
            );
        }
    }
}

#[test]
fn additivity_and_translation_covariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let w = SlopeWindow::square(Point2::new(0.3, -0.2), 6.0);
    for _ in 0..10 {
        let mut nodes = unit_square();
        for _ in 0..8 {
            nodes.push(Point2::new(
                rng.random_range(0.05..0.95),
                rng.random_range(0.05..0.95),
            ));
        }
        let values: Vec<f64> = nodes
            .iter()
            .map(|p| p.norm_squared() + rng.random_range(-0.05..0.05))
            .collect();
        let u = PLConvexFunction::new(nodes, values).unwrap();
        let total: f64 = (0..u.len())
            .map(|i| u.cell(i, Some(&w)).unwrap().area)
            .sum();
        assert!((total - w.area()).abs() < 1e-9 * w.area());
        let shift = Point2::new(0.7, -1.1);
        let v = u.add_affine(shift, 0.4);
        for i in 4..u.len() {
            let (a, b) = (u.cell(i, None).unwrap(), v.cell(i, None).unwrap());
            assert!((a.area - b.area).abs() < 1e-12);
            let ca = polyconvex::planar::centroid(&a.polygon);
            let cb = polyconvex::planar::centroid(&b.polygon);
            if a.area > 1e-9 {
                assert!((cb - ca - shift).norm() < 1e-9);
            }
        }
    }
}

#[test]
fn lowering_a_node_moves_mass_monotonically() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut nodes = unit_square();
    for _ in 0..6 {
        nodes.push(Point2::new(
            rng.random_range(0.1..0.9),
            rng.random_range(0.1..0.9),
        ));
    }
    let values: Vec<f64> = nodes.iter().map(|p| p.norm_squared()).collect();
    let u = PLConvexFunction::new(nodes, values.clone()).unwrap();
    for i in 4..u.len() {
        let mut lowered = values.clone();
        lowered[i] -= 0.01;
        let v = u.with_values(lowered);
        for j in 4..u.len() {
            let (before, after) = (u.cell(j, None).unwrap().area, v.cell(j, None).unwrap().area);
            if i == j {
                assert!(after >= before - 1e-12);
            } else {
                assert!(after <= before + 1e-12);
            }
        }
    }
}

/// Perturbed paraboloid on a 7 × 7 grid; returns the problem with masses
/// read off the forward map and the true interior values.
fn forward_instance(rng: &mut ChaCha8Rng) -> (MAProblem, Vec<f64>) {
    let a = rng.random_range(0.5..2.0);
    let (mut bn, mut bv, mut inodes, mut iv) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for j in 0..7 {
        for i in 0..7 {
            let p = Point2::new(i as f64 / 6.0, j as f64 / 6.0);
            let v = a * p.norm_squared() + rng.random_range(-0.003..0.003);
            if i == 0 || j == 0 || i == 6 || j == 6 {
                bn.push(p);
                bv.push(v);
            } else {
                inodes.push(p);
                iv.push(v);
            }
        }
    }
    let mut p = MAProblem::new(bn, bv, inodes, vec![1.0; 25]);
    let u = p.function(&iv);
    p.masses = (0..25)
        .map(|k| ma_measure(&u, p.num_boundary() + k).unwrap().area)
        .collect();
    (p, iv)
}

#[test]
fn inverse_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..10 {
        let (p, truth) = forward_instance(&mut rng);
        let s = solve_ma(
            &p,
            SolveOptions {
                tol: 1e-12,
                ..Default::default()
            },
        )
        .unwrap();
        let err = s
            .interior_values()
            .iter()
            .zip(&truth)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-7, "{err}");
    }
}

#[test]
fn sweeps_lower_the_residual_monotonically() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let (p, truth) = forward_instance(&mut rng);
    let opts = SolveOptions {
        tol: 1e-8,
        method: polyconvex::monge_ampere::Method::OlikerPrussner,
        ..Default::default()
    };
    let s = solve_ma(&p, opts).unwrap();
    assert!(s.sweep_residuals.len() > 2);
    for w in s.sweep_residuals.windows(2) {
        assert!(w[1] <= w[0], "{} then {}", w[0], w[1]);
    }
    let err = s
        .interior_values()
        .iter()
        .zip(&truth)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-5, "{err}");
}

#[test]
fn maximum_principle_on_ordered_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let opts = SolveOptions {
        tol: 1e-11,
        ..Default::default()
    };
    for _ in 0..20 {
        let (p2, _) = forward_instance(&mut rng);
        let mut p1 = p2.clone();
        for m in &mut p1.masses {
            *m *= rng.random_range(1.0..2.0);
        }
        let c = rng.random_range(0.0..0.1);
        for g in &mut p1.boundary_values {
            *g -= c;
        }
        let (u1, u2) = (solve_ma(&p1, opts).unwrap(), solve_ma(&p2, opts).unwrap());
        let r = maximum_principle_check(&u1.function, &u2.function, &p1, &p2, 1e-9).unwrap();
        assert!(r.holds(), "{r:?}");
        assert!(matches!(
            maximum_principle_check(&u2.function, &u1.function, &p2, &p1, 1e-9),
            Err(MAError::IncomparableProblems(_))
        ));
    }
}

#[test]
fn shifted_boundary_shifts_the_solution() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let (p, _) = forward_instance(&mut rng);
    let mut q = p.clone();
    for g in &mut q.boundary_values {
        *g += 0.25;
    }
    let opts = SolveOptions {
        tol: 1e-12,
        ..Default::default()
    };
    let (a, b) = (solve_ma(&p, opts).unwrap(), solve_ma(&q, opts).unwrap());
    for (x, y) in a.interior_values().iter().zip(b.interior_values()) {
        assert!((y - x - 0.25).abs() < 1e-9);
    }
}

fn grid_problem(m: usize) -> MAProblem {
    let (mut bn, mut bv, mut inodes) = (Vec::new(), Vec::new(), Vec::new());
    for j in 0..=m {
        for i in 0..=m {
            let p = Point2::new(i as f64 / m as f64, j as f64 / m as f64);
            if i == 0 || j == 0 || i == m || j == m {
                bn.push(p);
                bv.push(0.5 * p.norm_squared());
            } else {
                inodes.push(p);
            }
        }
    }
    let h2 = 1.0 / (m * m) as f64;
    let n = inodes.len();
    MAProblem::new(bn, bv, inodes, vec![h2; n])
}

#[test]
fn homotopy_to_skewed_masses() {
    let base = grid_problem(5);
    let skew: Vec<f64> = base
        .interior_nodes
        .iter()
        .map(|p| 1.0 + 9.0 * (p.x - 0.2) / 0.6)
        .collect();
    let family = |t: f64| {
        let mut p = base.clone();
        for (m, s) in p.masses.iter_mut().zip(&skew) {
            *m *= 1.0 + t * (s - 1.0);
        }
        p
    };
    let schedule = HomotopySchedule::uniform(4, family);
    let opts = HomotopyOptions::default();
    let steps = homotopy_solve(&schedule, opts).unwrap();
    let last = steps.last().unwrap();
    assert_eq!(last.t, 1.0);
    assert!(last.solution.residual <= opts.solve.tol);
    let direct = solve_ma(&family(1.0), opts.solve).unwrap();
    for (a, b) in last
        .solution
        .interior_values()
        .iter()
        .zip(direct.interior_values())
    {
        assert!((a - b).abs() < 1e-8);
    }
}

#[test]
fn constant_family_gives_constant_solutions() {
    let base = grid_problem(4);
    let schedule = HomotopySchedule::uniform(3, |_t| base.clone());
    let steps = homotopy_solve(&schedule, HomotopyOptions::default()).unwrap();
    let first = steps[0].solution.interior_values().to_vec();
    for s in &steps {
        for (a, b) in s.solution.interior_values().iter().zip(&first) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn homotopy_stops_at_the_mass_bound() {
    // ∫ (1 + |p|²)⁻² dp = π, and the total mass 0.3π + tπ reaches it at 0.7.
    let theta = Arc::new(FnWeight::slope_only(|p: Point2, _z, _x| {
        1.0 / (1.0 + p.norm_squared()).powi(2)
    }));
    let base = grid_problem(4).with_weight(theta);
    let n = base.num_interior() as f64;
    let family = |t: f64| {
        let mut p = base.clone();
        p.masses = vec![(0.3 + t) * PI / n; base.num_interior()];
        p
    };
    let schedule = HomotopySchedule::uniform(10, family);
    match homotopy_solve(&schedule, HomotopyOptions::default()) {
        Err(MAError::MinStepReached { last_t }) => assert!((last_t - 0.7).abs() < 0.05, "{last_t}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn liouville_exact_and_bumped() {
    let exact = liouville_probe(&LiouvilleConfig {
        radii: vec![1.0, 2.0],
        ..Default::default()
    })
    .unwrap();
    for row in &exact.rows {
        assert!(row.deviation < 1e-8, "{row:?}");
    }
    let bumped = liouville_probe(&LiouvilleConfig {
        bump: 1.0,
        ..Default::default()
    })
    .unwrap();
    assert!(
        bumped.rows[1].deviation < bumped.rows[0].deviation,
        "{bumped:?}"
    );
    assert!(matches!(
        liouville_probe(&LiouvilleConfig {
            f: 0.0,
            ..Default::default()
        }),
        Err(MAError::InvalidProblem(_))
    ));
}
