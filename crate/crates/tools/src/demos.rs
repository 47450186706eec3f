//! Curated scenarios, each ending in threshold checks.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use polyconvex::intrinsic::{
    locate_on_polytope, net_from_polytope, polytope_vertex_classes, shortest_path,
    vertex_curvatures,
};
use polyconvex::minkowski::{solve_minkowski, MinkowskiOptions, MinkowskiProblem};
use polyconvex::monge_ampere::{
    homotopy_solve, liouville_probe, FnWeight, HomotopyOptions, HomotopySchedule, LiouvilleConfig,
    MAError, MAProblem,
};
use polyconvex::polytope::{convex_hull, polytope_from_support, ConvexPolytope, FULL_SPHERE};
use polyconvex::rigidity::{
    bending_space, main_lemma_check, solve_defo, GridPatch, TriangulatedSurface, RANK_TOLERANCE,
};
use polyconvex::{Point2, Tolerance, Vector3};

use crate::cli::RunConfig;
use crate::io::{write_off, Mesh};
use crate::report::{real, reals, Report, Table};

pub const DEMOS: &[(&str, &str)] = &[
    (
        "egregium",
        "vertex curvature against spherical image on 100 random hulls",
    ),
    (
        "cube-geodesic",
        "opposite corners of the unit cube are sqrt(5) apart",
    ),
    (
        "liouville",
        "deviation from a quadratic as the domain grows",
    ),
    (
        "homotopy",
        "continuation to skewed masses and to an infeasible target",
    ),
    (
        "minkowski-roundtrip",
        "20 random polytopes rebuilt from face data",
    ),
    (
        "rigidity",
        "bending spaces of classic triangulated surfaces",
    ),
    (
        "bending",
        "convergence of the bending equation and sign of its curvature",
    ),
];

/// `None` if no demo has this name.
pub fn run(name: &str, c: &RunConfig) -> Option<Report> {
    Some(match name {
        "egregium" => egregium(c),
        "cube-geodesic" => cube_geodesic(c),
        "liouville" => liouville(c),
        "homotopy" => homotopy(c),
        "minkowski-roundtrip" => minkowski_roundtrip(c, 64, 20),
        "rigidity" => rigidity(c),
        "bending" => bending(c),
        _ => return None,
    })
}

pub fn unit_vector(rng: &mut ChaCha8Rng) -> Vector3 {
    loop {
        let v = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

pub fn unit_cube() -> ConvexPolytope {
    let pts: Vec<Vector3> = (0..8)
        .map(|i| Vector3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64))
        .collect();
    convex_hull(&pts).expect("cube")
}

fn egregium(c: &RunConfig) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(c.global.seed);
    let tol = c.tol_or(1e-9);
    let mut r = c.report();
    let (mut gap, mut total_gap, mut vertices) = (0.0f64, 0.0f64, 0usize);
    for _ in 0..100 {
        let n = rng.random_range(4..=50);
        let pts: Vec<Vector3> = (0..n)
            .map(|_| unit_vector(&mut rng) * rng.random_range(0.5..1.0))
            .collect();
        let Ok(p) = convex_hull(&pts) else { continue };
        let net = net_from_polytope(&p);
        let k = match vertex_curvatures(&net, Tolerance::default()) {
            Ok(k) => k,
            Err(e) => {
                r.fail(e);
                return r;
            }
        };
        let classes = polytope_vertex_classes(&p, &net);
        for v in 0..p.vertices().len() {
            let cone = p.normal_cone_area(v).unwrap_or(f64::NAN);
            gap = gap.max((k.curvatures[classes[v]] - cone).abs());
        }
        vertices += p.vertices().len();
        total_gap = total_gap.max((k.total - FULL_SPHERE).abs());
    }
    r.metric("vertices", vertices);
    r.metric("max_vertex_gap", real(gap));
    r.metric("max_total_gap", real(total_gap));
    r.check("vertex_curvature_is_spherical_image", gap <= tol);
    r.check("total_is_4pi", total_gap <= tol);
    r
}

fn cube_geodesic(c: &RunConfig) -> Report {
    let cube = unit_cube();
    let net = net_from_polytope(&cube);
    let at = |x: Vector3| locate_on_polytope(&cube, x, Tolerance::default()).expect("on the cube");
    let mut r = c.report();
    match shortest_path(&net, at(Vector3::zeros()), at(Vector3::new(1.0, 1.0, 1.0))) {
        Ok(path) => {
            r.metric("length", real(path.length));
            r.metric("faces", path.faces());
            r.metric("error", real((path.length - 5f64.sqrt()).abs()));
            r.check(
                "is_sqrt5",
                (path.length - 5f64.sqrt()).abs() <= c.tol_or(1e-9),
            );
        }
        Err(e) => r.fail(e),
    }
    r
}

fn liouville(c: &RunConfig) -> Report {
    let cfg = LiouvilleConfig {
        radii: vec![1.0, 2.0, 4.0],
        bump: 1.0,
        ..Default::default()
    };
    let mut r = c.report();
    r.config["options"] = json!({ "radii": cfg.radii, "bump": cfg.bump, "window": cfg.window, "spacing": cfg.spacing });
    match liouville_probe(&cfg) {
        Ok(d) => {
            let mut t = Table::new(&["R", "nodes", "deviation", "residual"]);
            for row in &d.rows {
                t.push(vec![
                    real(row.radius),
                    row.nodes.into(),
                    real(row.deviation),
                    real(row.residual),
                ]);
            }
            r.tables.insert("deviation".into(), t);
            r.metric("non_increasing", d.non_increasing);
            let (first, last) = (&d.rows[0], &d.rows[d.rows.len() - 1]);
            r.check("flattens", last.deviation < first.deviation);
        }
        Err(e) => r.fail(e),
    }
    r
}

/// Grid on the unit square with data `|x|²/2` and masses `h²`.
pub fn grid_problem(m: usize) -> MAProblem {
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
    let n = inodes.len();
    MAProblem::new(bn, bv, inodes, vec![1.0 / (m * m) as f64; n])
}

fn homotopy(c: &RunConfig) -> Report {
    let mut r = c.report();
    let opts = HomotopyOptions::default();

    // Masses growing tenfold across the square.
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
    match homotopy_solve(&HomotopySchedule::uniform(4, family), opts) {
        Ok(steps) => {
            let last = steps.last().expect("start step");
            r.metric("skewed_steps", steps.len());
            r.metric("skewed_residual", real(last.solution.residual));
            r.check(
                "skewed_reaches_1",
                last.t == 1.0 && last.solution.residual <= opts.solve.tol,
            );
        }
        Err(e) => r.fail(e),
    }

    // With θ = (1 + |p|²)⁻² the attainable mass is π; masses (0.3 + t)π
    // cross it at t = 0.7.
    let theta = Arc::new(FnWeight::slope_only(|p: Point2, _z, _x| {
        1.0 / (1.0 + p.norm_squared()).powi(2)
    }));
    let base = grid_problem(4).with_weight(theta);
    let n = base.num_interior();
    let family = |t: f64| {
        let mut p = base.clone();
        p.masses = vec![(0.3 + t) * PI / n as f64; n];
        p
    };
    match homotopy_solve(&HomotopySchedule::uniform(10, family), opts) {
        Err(MAError::MinStepReached { last_t }) => {
            r.metric("infeasible_last_t", real(last_t));
            r.check("stops_near_0.7", (last_t - 0.7).abs() <= 0.05);
        }
        Ok(_) => {
            r.check("stops_near_0.7", false);
        }
        Err(e) => r.fail(e),
    }
    r
}

/// Intersection of `faces` random halfspaces at distance 0.8 to 1.2.
pub fn random_polytope(rng: &mut ChaCha8Rng, faces: usize) -> ConvexPolytope {
    loop {
        let normals: Vec<Vector3> = (0..faces).map(|_| unit_vector(rng)).collect();
        let h: Vec<f64> = (0..faces).map(|_| rng.random_range(0.8..1.2)).collect();
        if let Ok(p) = polytope_from_support(&normals, &h) {
            return p;
        }
    }
}

/// Round trips on `count` random polytopes with up to `faces` faces. One
/// polytope gets a per-face table.
pub fn minkowski_roundtrip(c: &RunConfig, faces: usize, count: usize) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(c.global.seed);
    let d = MinkowskiOptions::default();
    let opts = MinkowskiOptions {
        tol: c.tol_or(d.tol),
        max_iter: c.max_iter_or(d.max_iter),
        ..d
    };
    let mut r = c.report();
    let (mut worst, mut worst_volume) = (0.0f64, 0.0f64);
    let mut residuals = Vec::new();
    for k in 0..count {
        let m = rng.random_range(faces.min(8)..=faces);
        let body = random_polytope(&mut rng, m);
        let result = MinkowskiProblem::from_polytope(&body)
            .and_then(|p| Ok((solve_minkowski(&p, opts)?, p)));
        let (sol, problem) = match result {
            Ok(x) => x,
            Err(e) => {
                r.fail(format!("polytope {k}: {e}"));
                return r;
            }
        };
        let centered = body.centered();
        let truth: Vec<f64> = problem
            .normals()
            .iter()
            .map(|n| {
                centered
                    .vertices()
                    .iter()
                    .map(|v| v.dot(n))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        let scale = truth.iter().fold(0.0f64, |s, h| s.max(h.abs()));
        let errors: Vec<f64> = sol
            .support_numbers
            .iter()
            .zip(&truth)
            .map(|(a, b)| (a - b).abs() / scale)
            .collect();
        worst = worst.max(errors.iter().copied().fold(0.0, f64::max));
        let p = &sol.polytope;
        let third = p
            .areas()
            .iter()
            .zip(p.support_numbers())
            .map(|(a, h)| a * h)
            .sum::<f64>()
            / 3.0;
        worst_volume = worst_volume.max((p.volume() - third).abs() / p.volume());
        residuals.push(sol.residual);
        if k == 0 {
            let mut t = Table::new(&["face", "area", "h_true", "h_recovered", "relative_error"]);
            for i in 0..problem.len() {
                t.push(vec![
                    i.into(),
                    real(problem.areas()[i]),
                    real(truth[i]),
                    real(sol.support_numbers[i]),
                    real(errors[i]),
                ]);
            }
            r.tables.insert("residuals".into(), t);
            r.attachments
                .insert("recovered".into(), write_off(&Mesh::from_polytope(p)));
        }
    }
    r.metric("solver_residuals", reals(&residuals));
    r.metric("max_support_error", real(worst));
    r.metric("max_volume_identity_error", real(worst_volume));
    r.check("support_numbers_recovered", worst <= 1e-6);
    r.check("volume_identity", worst_volume <= 1e-9);
    r
}

fn rigidity(c: &RunConfig) -> Report {
    let mut r = c.report();
    let octa: Vec<Vector3> = (0..6)
        .map(|k| {
            let mut v = Vector3::zeros();
            v[k / 2] = if k % 2 == 0 { 1.0 } else { -1.0 };
            v
        })
        .collect();
    let phi = 0.5 * (1.0 + 5f64.sqrt());
    let mut ico = Vec::new();
    for a in [1.0, -1.0] {
        for b in [phi, -phi] {
            ico.extend([
                Vector3::new(0.0, a, b),
                Vector3::new(a, b, 0.0),
                Vector3::new(b, 0.0, a),
            ]);
        }
    }
    let cases = [
        (
            "octahedron",
            TriangulatedSurface::from_polytope(&convex_hull(&octa).expect("octahedron")),
            0,
        ),
        (
            "icosahedron",
            TriangulatedSurface::from_polytope(&convex_hull(&ico).expect("icosahedron")),
            0,
        ),
        (
            "cube_with_face_centers",
            TriangulatedSurface::from_polytope_with_face_centers(&unit_cube()),
            6,
        ),
    ];
    let mut t = Table::new(&[
        "surface",
        "vertices",
        "kernel_dim",
        "nontrivial_dim",
        "trivial_defect",
    ]);
    for (name, s, expected) in &cases {
        match bending_space(s, c.tol_or(RANK_TOLERANCE)) {
            Ok(b) => {
                t.push(vec![
                    (*name).into(),
                    s.num_vertices().into(),
                    b.kernel_dim.into(),
                    b.nontrivial_dim.into(),
                    real(b.trivial_defect),
                ]);
                r.check(
                    &format!("{name}_nontrivial_{expected}"),
                    b.nontrivial_dim == *expected,
                );
            }
            Err(e) => {
                r.fail(format!("{name}: {e}"));
                return r;
            }
        }
    }
    r.tables.insert("surfaces".into(), t);
    r
}

fn bending(c: &RunConfig) -> Report {
    let mut r = c.report();
    // z = |x|²/2 + 0.2xy makes the equation ζ_xx − 0.4ζ_xy + ζ_yy = 0,
    // solved by Re exp(x + (0.2 + i√0.96)y).
    let z = |x: f64, y: f64| 0.5 * (x * x + y * y) + 0.2 * x * y;
    let zeta = |x: f64, y: f64| (x + 0.2 * y).exp() * (0.96f64.sqrt() * y).cos();
    let mut errors = Vec::new();
    for n in [9, 17, 33, 65] {
        let exact = match GridPatch::from_fns(n, n, 1.0 / (n - 1) as f64, [0.0, 0.0], z, zeta) {
            Ok(p) => p,
            Err(e) => {
                r.fail(e);
                return r;
            }
        };
        let interior_zero = exact.zeta().iter().enumerate().map(|(k, &v)| {
            if exact.is_boundary(k % n, k / n) {
                v
            } else {
                0.0
            }
        });
        let solved = exact
            .with_zeta(interior_zero.collect())
            .and_then(|p| solve_defo(&p));
        match solved {
            Ok(s) => errors.push(
                s.zeta()
                    .iter()
                    .zip(exact.zeta())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max),
            ),
            Err(e) => {
                r.fail(e);
                return r;
            }
        }
    }
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    r.metric("errors", reals(&errors));
    r.metric("orders", reals(&orders));
    r.check(
        "second_order",
        orders.iter().all(|o| (o - 2.0).abs() <= 0.3),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(c.global.seed);
    let mut worst = f64::NEG_INFINITY;
    let mut held = true;
    for _ in 0..50 {
        let n = rng.random_range(6..24);
        let (a, cc) = (rng.random_range(1.0..3.0), rng.random_range(1.0..3.0));
        let b = rng.random_range(-0.5..0.5) * f64::sqrt(a * cc);
        let cubic: [f64; 4] = std::array::from_fn(|_| rng.random_range(-0.03..0.03));
        let z = move |x: f64, y: f64| {
            0.5 * (a * x * x + 2.0 * b * x * y + cc * y * y)
                + cubic[0] * x * x * x
                + cubic[1] * x * x * y
                + cubic[2] * x * y * y
                + cubic[3] * y * y * y
        };
        let noise: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let check = GridPatch::from_fns(n, n, 1.0 / (n - 1) as f64, [0.0, 0.0], z, |_, _| 0.0)
            .and_then(|p| p.with_zeta(noise))
            .and_then(|p| solve_defo(&p))
            .and_then(|s| main_lemma_check(&s, c.tol_or(1e-8)));
        match check {
            Ok(l) => {
                worst = worst.max(l.max_det);
                held &= l.holds();
            }
            Err(e) => {
                r.fail(e);
                return r;
            }
        }
    }
    r.metric("max_det_hessian_zeta", real(worst));
    r.check("nonpositive_curvature", held);
    r
}
