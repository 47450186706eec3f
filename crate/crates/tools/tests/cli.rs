use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use polyconvex::minkowski::MinkowskiProblem;
use polyconvex::polytope::{convex_hull, polytope_from_support};
use polyconvex::{Tolerance, Vector3};
use polyconvex_tools::io::{
    parse_off, parse_problem_str, to_canonical_json, write_off, Mesh, MinkowskiProblemFile,
    PatchFile, ProblemFile, RigidityProblemFile,
};
use polyconvex_tools::report::parse_report;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CUBE_OFF: &str = "OFF\n8 6 0\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n0 0 1\n1 0 1\n0 1 1\n1 1 1\n\
4 0 2 3 1\n4 4 5 7 6\n4 0 1 5 4\n4 2 6 7 3\n4 0 4 6 2\n4 1 3 7 5\n";

fn polyconvex(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyconvex"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn unit_vector(rng: &mut ChaCha8Rng) -> Vector3 {
    loop {
        let v = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        if v.norm() > 0.1 && v.norm() <= 1.0 {
            return v.normalize();
        }
    }
}

#[test]
fn cube_curvatures_from_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cube.off"), CUBE_OFF).unwrap();
    let out = polyconvex(
        &["net", "curvature", "cube.off", "--out", "r.json"],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = parse_report(&dir.path().join("r.json")).unwrap();
    assert!(r.passed);
    let ks = r.metrics["curvatures"].as_array().unwrap();
    assert_eq!(ks.len(), 8);
    for k in ks {
        assert!((k.as_f64().unwrap() - PI / 2.0).abs() < 1e-12);
    }
    assert!((r.metrics["total"].as_f64().unwrap() - 4.0 * PI).abs() < 1e-12);
    assert_eq!(r.config["inputs"][0], "cube.off");
}

#[test]
fn missing_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = polyconvex(&["ma", "solve", "missing.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("missing.json") && err.contains("usage:"),
        "{err}"
    );
}

#[test]
fn bad_arguments_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["frobnicate"][..],
        &["demo", "nope"],
        &["--tol=0", "demo", "rigidity"],
        &["net"],
    ] {
        let out = polyconvex(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn malformed_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.off"), "OFF\n3 1 0\n0 0 0\n1 0\n").unwrap();
    std::fs::write(
        dir.path().join("bad.json"),
        r#"{"kind": "ma-problem", "nodes": []}"#,
    )
    .unwrap();
    for f in ["bad.off", "bad.json"] {
        let out = polyconvex(&["net", "validate", f], dir.path());
        assert_eq!(out.status.code(), Some(2), "{f}");
    }
}

#[test]
fn failed_check_still_writes_the_report() {
    // Checkerboard ζ on a convex bowl is far from a solution of the bending
    // equation: the residual is too large to bound the sign of det Hess ζ.
    // The solved patch passes.
    let dir = tempfile::tempdir().unwrap();
    let n = 7;
    let h = 1.0 / (n - 1) as f64;
    let z: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| 0.5 * ((i as f64 * h).powi(2) + (j as f64 * h).powi(2)))
                .collect()
        })
        .collect();
    let zeta: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| if (i + j) % 2 == 0 { 1.0 } else { 0.0 })
                .collect()
        })
        .collect();
    let file = ProblemFile::RigidityProblem(RigidityProblemFile {
        surface: None,
        patch: Some(PatchFile {
            h,
            origin: [0.0, 0.0],
            z,
            zeta,
        }),
    });
    std::fs::write(dir.path().join("p.json"), to_canonical_json(&file)).unwrap();
    let out = polyconvex(
        &["rigidity", "defo", "check", "p.json", "--out", "r.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let r = parse_report(&dir.path().join("r.json")).unwrap();
    assert!(!r.passed);
    assert!(
        r.error.as_deref().is_some_and(|e| e.contains("residual")),
        "{:?}",
        r.error
    );

    let out = polyconvex(
        &["rigidity", "defo", "solve", "p.json", "--out", "s.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let s = parse_report(&dir.path().join("s.json")).unwrap();
    let solved: PatchFile = serde_json::from_value(s.metrics["solution"].clone()).unwrap();
    std::fs::write(
        dir.path().join("q.json"),
        to_canonical_json(&ProblemFile::RigidityProblem(RigidityProblemFile {
            surface: None,
            patch: Some(solved),
        })),
    )
    .unwrap();
    let out = polyconvex(&["rigidity", "defo", "check", "q.json"], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn same_seed_gives_the_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let strip = |s: String| {
        s.lines()
            .filter(|l| !l.contains("\"timestamp\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let run = |seed: &str| {
        let out = polyconvex(
            &["minkowski", "roundtrip", "--faces", "20", "--seed", seed],
            dir.path(),
        );
        assert_eq!(out.status.code(), Some(0));
        strip(String::from_utf8(out.stdout).unwrap())
    };
    let a = run("7");
    assert_eq!(a, run("7"));
    assert_ne!(a, run("8"));
    assert!(a.contains("\"residuals\""));
}

#[test]
fn off_round_trip_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10 {
        let pts: Vec<Vector3> = (0..30)
            .map(|_| unit_vector(&mut rng) * rng.random_range(0.3..3.0))
            .collect();
        let p = convex_hull(&pts).unwrap();
        let mesh = Mesh::from_polytope(&p);
        let text = write_off(&mesh);
        let back = parse_off(&text).unwrap();
        assert_eq!(back, mesh);
        assert_eq!(write_off(&back), text);
        let q = back.to_polytope(Tolerance::default()).unwrap();
        for (a, b) in p.areas().iter().zip(q.areas()) {
            assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }
    }
}

#[test]
fn problem_files_round_trip_through_canonical_json() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let normals: Vec<[f64; 3]> = (0..12).map(|_| unit_vector(&mut rng).into()).collect();
    let file = ProblemFile::MinkowskiProblem(MinkowskiProblemFile {
        normals: Some(normals),
        areas: Some((0..12).map(|_| rng.random_range(0.1..1.0)).collect()),
        curvature: None,
    });
    let text = to_canonical_json(&file);
    let back = parse_problem_str(&text).unwrap();
    assert_eq!(back, file);
    assert_eq!(to_canonical_json(&back), text);
}

#[test]
fn fifty_face_solution_report_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    // Planes tangent to the unit sphere all touch the body.
    let normals: Vec<Vector3> = (0..50).map(|_| unit_vector(&mut rng)).collect();
    let body = polytope_from_support(&normals, &[1.0; 50]).unwrap();
    let problem = MinkowskiProblem::from_polytope(&body).unwrap();
    assert_eq!(problem.len(), 50);
    let file = ProblemFile::MinkowskiProblem(MinkowskiProblemFile {
        normals: Some(problem.normals().iter().map(|&n| n.into()).collect()),
        areas: Some(problem.areas().to_vec()),
        curvature: None,
    });
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.json"), to_canonical_json(&file)).unwrap();
    let out = polyconvex(
        &["minkowski", "solve", "m.json", "--out", "r.json"],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let path = dir.path().join("r.json");
    let r = parse_report(&path).unwrap();
    assert_eq!(r.to_json(), std::fs::read_to_string(&path).unwrap());
    let solved = parse_off(&r.attachments["polytope"])
        .unwrap()
        .to_polytope(Tolerance::default())
        .unwrap();
    assert_eq!(solved.num_faces(), 50);
    for (n, a) in problem.normals().iter().zip(problem.areas()) {
        let f = (0..50)
            .find(|&f| (solved.normals()[f] - n).norm() < 1e-9)
            .unwrap();
        assert!((solved.areas()[f] - a).abs() <= 1e-9 * a);
    }
}
