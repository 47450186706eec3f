use polyconvex::minkowski::{
    area_map, discretize_curvature, solve_minkowski, solve_minkowski_from, CurvatureSample,
    MinkowskiOptions, MinkowskiProblem,
};
use polyconvex::polytope::{convex_hull, polytope_from_support, ConvexPolytope};
use polyconvex::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit_vector(rng: &mut ChaCha8Rng) -> Vector3 {
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

/// Alternates hulls of random points on an ellipsoid with intersections of
/// random halfspaces; at most 64 faces either way.
fn random_polytope(rng: &mut ChaCha8Rng, k: usize) -> ConvexPolytope {
    if k.is_multiple_of(2) {
        let axes = Vector3::new(
            rng.random_range(0.5..2.0),
            rng.random_range(0.5..2.0),
            rng.random_range(0.5..2.0),
        );
        let n = rng.random_range(8..=30);
        let pts: Vec<Vector3> = (0..n)
            .map(|_| unit_vector(rng).component_mul(&axes))
            .collect();
        convex_hull(&pts).unwrap()
    } else {
        loop {
            let m = rng.random_range(8..=64);
            let normals: Vec<Vector3> = (0..m).map(|_| unit_vector(rng)).collect();
            let h: Vec<f64> = (0..m).map(|_| rng.random_range(0.8..1.2)).collect();
            if let Ok(p) = polytope_from_support(&normals, &h) {
                return p;
            }
        }
    }
}

#[test]
fn round_trip_recovers_support_numbers() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for k in 0..20 {
        let body = random_polytope(&mut rng, k);
        assert!(body.num_faces() <= 64);
        let problem = MinkowskiProblem::from_polytope(&body).unwrap();
        let sol = solve_minkowski(&problem, MinkowskiOptions::default()).unwrap();
        assert!(sol.residual <= 1e-10);
        // Compare support numbers of both bodies centered at their centroids.
        let centered = body.centered();
        let original: Vec<f64> = problem
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
        let scale = original.iter().fold(0.0f64, |s, h| s.max(h.abs()));
        for (a, b) in sol.support_numbers.iter().zip(&original) {
            assert!((a - b).abs() <= 1e-6 * scale, "{a} vs {b}");
        }
        assert!(sol.polytope.centroid().norm() < 1e-9 * scale);
        let p = &sol.polytope;
        let third: f64 = p
            .areas()
            .iter()
            .zip(p.support_numbers())
            .map(|(a, h)| a * h)
            .sum::<f64>()
            / 3.0;
        assert!((p.volume() - third).abs() <= 1e-9 * p.volume());
    }
}

#[test]
fn volume_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for k in 0..20 {
        let body = random_polytope(&mut rng, k);
        let third: f64 = body
            .areas()
            .iter()
            .zip(body.support_numbers())
            .map(|(a, h)| a * h)
            .sum::<f64>()
            / 3.0;
        assert!((body.volume() - third).abs() <= 1e-9 * body.volume());
    }
}

#[test]
fn volume_gradient_is_the_area_vector() {
    // Random halfspace intersections are simple polytopes, where the
    // volume is smooth in the support numbers. At vertices of degree above
    // 3 it is only C¹ and central differences pick up an O(step) error.
    // Redundant halfspaces report the support number of the body, which
    // puts their plane through a vertex, so they are dropped.
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    for _ in 0..20 {
        let body = random_polytope(&mut rng, 1);
        let faces: Vec<usize> = (0..body.num_faces())
            .filter(|&f| body.areas()[f] > 0.0)
            .collect();
        let n: Vec<_> = faces.iter().map(|&f| body.normals()[f]).collect();
        let h: Vec<f64> = faces.iter().map(|&f| body.support_numbers()[f]).collect();
        let a: Vec<f64> = faces.iter().map(|&f| body.areas()[f]).collect();
        let d = 1e-5 * body.diameter();
        for i in 0..n.len() {
            let (mut up, mut dn) = (h.clone(), h.clone());
            up[i] += d;
            dn[i] -= d;
            let vol = |x: &[f64]| polytope_from_support(&n, x).unwrap().volume();
            let fd = (vol(&up) - vol(&dn)) / (2.0 * d);
            assert!(
                (fd - a[i]).abs() <= 1e-6 * a.iter().sum::<f64>(),
                "face {i}: {fd} vs {}",
                a[i]
            );
        }
    }
}

#[test]
fn area_map_is_homogeneous_of_degree_two() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let body = random_polytope(&mut rng, 1);
    let h = body.support_numbers().to_vec();
    let a1 = area_map(body.normals(), &h).unwrap();
    let a2 = area_map(
        body.normals(),
        &h.iter().map(|x| 1.7 * x).collect::<Vec<_>>(),
    )
    .unwrap();
    for (x, y) in a1.iter().zip(&a2) {
        assert!((y - 1.7 * 1.7 * x).abs() <= 1e-12 * (1.0 + y));
    }
}

#[test]
fn different_starts_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let body = random_polytope(&mut rng, 2);
    let problem = MinkowskiProblem::from_polytope(&body).unwrap();
    let a = solve_minkowski(&problem, MinkowskiOptions::default()).unwrap();
    let start: Vec<f64> = (0..problem.len())
        .map(|_| rng.random_range(1.0..3.0))
        .collect();
    let b = solve_minkowski_from(&problem, &start, MinkowskiOptions::default()).unwrap();
    for (x, y) in a.support_numbers.iter().zip(&b.support_numbers) {
        assert!((x - y).abs() < 1e-8);
    }
}

#[test]
fn equal_octahedral_areas_give_the_regular_octahedron() {
    let mut normals = Vec::new();
    for &x in &[-1.0, 1.0] {
        for &y in &[-1.0, 1.0] {
            for &z in &[-1.0, 1.0] {
                normals.push(Vector3::new(x, y, z) / 3f64.sqrt());
            }
        }
    }
    let problem = MinkowskiProblem::new(normals.clone(), vec![1.0; 8]).unwrap();
    let s = solve_minkowski(&problem, MinkowskiOptions::default()).unwrap();
    let h0 = s.support_numbers[0];
    assert!(s.support_numbers.iter().all(|h| (h - h0).abs() < 1e-9));
    let again = polytope_from_support(&normals, &s.support_numbers).unwrap();
    assert_eq!(again.vertices().len(), 6);
}

#[test]
fn curvature_profile_on_162_cells() {
    let sample = CurvatureSample::on_icosphere(2, |n| 1.0 / (1.0 + 0.3 * n.z * n.z));
    let d = discretize_curvature(&sample).unwrap();
    // The profile is even, so the partition defect is pure round-off here.
    assert!(d.defect_before.norm() < 1e-9);
    let s = solve_minkowski(&d.problem, MinkowskiOptions::default()).unwrap();
    assert!(s.residual < 1e-10);
    // K is smallest at the poles, so the body is flattened there (oblate).
    let hz = s.support_numbers[d
        .problem
        .normals()
        .iter()
        .position(|n| n.z > 0.999)
        .unwrap()];
    let hx = s
        .support_numbers
        .iter()
        .zip(d.problem.normals())
        .filter(|(_, n)| n.z.abs() < 0.2)
        .map(|(h, _)| *h)
        .fold(f64::INFINITY, f64::min);
    assert!(hz < hx, "{hz} vs {hx}");
}
