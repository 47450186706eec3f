//! Command-line front end.
//!
//! Every run produces a [`Report`]. Exit codes: 0 when the run passed, 1
//! when a check or solver failed (the report is still written), 2 for usage
//! errors and unreadable or malformed input.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use polyconvex::intrinsic::{
    locate_on_polytope, net_from_polytope, polytope_vertex_classes, shortest_path, validate_net,
    vertex_curvatures, EdgeRef, Identification, MetricNet, SurfacePoint,
};
use polyconvex::minkowski::{
    check_closing, discretize_curvature, solve_minkowski, CurvatureSample, MinkowskiOptions,
    MinkowskiProblem,
};
use polyconvex::monge_ampere::{
    homotopy_solve, solve_ma, HomotopyOptions, HomotopySchedule, MAProblem, SolveOptions,
};
use polyconvex::polytope::ConvexPolytope;
use polyconvex::rigidity::{
    bending_space, defo_residual, main_lemma_check, solve_defo, RANK_TOLERANCE,
};
use polyconvex::{Point2, Tolerance, Vector3};

use crate::demos;
use crate::io::{
    parse_problem, write_off, write_text, CurvatureValues, IoError, MaProblemFile, Mesh,
    MinkowskiProblemFile, NetFile, PatchFile, ProblemFile,
};
use crate::report::{real, reals, Report, Table};
use crate::theta::{ExprWeight, Expression, CURVATURE_VARIABLES};

#[derive(Debug, Parser)]
#[command(
    name = "polyconvex",
    version,
    about = "Polyhedral convex geometry toolkit"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalArgs {
    /// Tolerance override (must be positive).
    #[arg(long, global = true, value_parser = positive)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    /// Seed for randomized runs.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Report path; stdout if absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Polyhedral metrics given by nets or convex polytopes.
    Net {
        #[command(subcommand)]
        action: NetAction,
    },
    /// Monge–Ampère Dirichlet problems.
    Ma {
        #[command(subcommand)]
        action: MaAction,
    },
    /// Polytopes from face normals and areas.
    Minkowski {
        #[command(subcommand)]
        action: MinkowskiAction,
    },
    /// Infinitesimal bendings.
    Rigidity {
        #[command(subcommand)]
        action: RigidityAction,
    },
    /// Curated scenarios; `demo list` names them.
    Demo { name: String },
}

#[derive(Debug, Subcommand)]
pub enum NetAction {
    /// Check the gluing conditions.
    Validate { file: PathBuf },
    /// Vertex curvatures `2π − θ`.
    Curvature { file: PathBuf },
    /// Shortest path between two surface points.
    Geodesic {
        file: PathBuf,
        /// `x,y,z` on a polytope, or `k:x,y` in polygon `k` of a net.
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum MaAction {
    Solve {
        file: PathBuf,
        /// Reach the masses by continuation from uniform masses in this
        /// many steps.
        #[arg(long)]
        homotopy: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum MinkowskiAction {
    Solve {
        file: PathBuf,
    },
    /// Closing condition of the data only.
    Check {
        file: PathBuf,
    },
    /// Solve for the face data of a random polytope and compare.
    Roundtrip {
        #[arg(long, default_value_t = 20)]
        faces: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum RigidityAction {
    /// Bending space of a triangulated surface (OFF or JSON).
    Analyze { file: PathBuf },
    /// The bending equation on a grid patch.
    Defo {
        #[command(subcommand)]
        action: DefoAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum DefoAction {
    Solve { file: PathBuf },
    Check { file: PathBuf },
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(_) => Err("must be positive and finite".into()),
        Err(e) => Err(e.to_string()),
    }
}

/// Effective configuration of a run, embedded in its report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub inputs: Vec<String>,
    #[serde(flatten)]
    pub global: GlobalArgs,
    /// Further command options.
    pub options: Value,
}

impl RunConfig {
    pub fn new(subcommand: &str, global: &GlobalArgs) -> Self {
        Self {
            subcommand: subcommand.into(),
            inputs: Vec::new(),
            global: global.clone(),
            options: json!({}),
        }
    }

    pub fn tol_or(&self, default: f64) -> f64 {
        self.global.tol.unwrap_or(default)
    }

    pub fn max_iter_or(&self, default: usize) -> usize {
        self.global.max_iter.unwrap_or(default)
    }

    pub fn report(&self) -> Report {
        Report::new(
            self.subcommand.clone(),
            serde_json::to_value(self).expect("config serializes"),
        )
    }
}

/// Failures that end a run without a report.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{0}")]
    Usage(String),
    #[error("unknown demo `{0}`; try `demo list`")]
    UnknownDemo(String),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let report = match dispatch(&cli) {
        Ok(Some(r)) => r,
        Ok(None) => return EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("usage: polyconvex [--tol T] [--max-iter N] [--seed S] [--out PATH] [--format json|csv] <net|ma|minkowski|rigidity|demo> ...");
            return EXIT_USAGE;
        }
    };
    match emit(&report, &cli.global) {
        Ok(()) if report.passed => EXIT_OK,
        Ok(()) => EXIT_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn emit(report: &Report, global: &GlobalArgs) -> Result<(), IoError> {
    let mut report = report.clone();
    report.stamp();
    let text = match global.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    match &global.out {
        Some(path) => write_text(path, &text),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

/// `Ok(None)` when the command printed its output itself.
fn dispatch(cli: &Cli) -> Result<Option<Report>, CliError> {
    let g = &cli.global;
    let with_input = |name: &str, file: &Path| {
        let mut c = RunConfig::new(name, g);
        c.inputs.push(file.display().to_string());
        c
    };
    let report = match &cli.command {
        Command::Net { action } => match action {
            NetAction::Validate { file } => net_validate(&with_input("net validate", file), file)?,
            NetAction::Curvature { file } => {
                net_curvature(&with_input("net curvature", file), file)?
            }
            NetAction::Geodesic { file, from, to } => {
                let mut c = with_input("net geodesic", file);
                c.options = json!({ "from": from, "to": to });
                net_geodesic(&c, file, from, to)?
            }
        },
        Command::Ma {
            action: MaAction::Solve { file, homotopy },
        } => {
            let mut c = with_input("ma solve", file);
            c.options = json!({ "homotopy": homotopy });
            ma_solve(&c, file, *homotopy)?
        }
        Command::Minkowski { action } => match action {
            MinkowskiAction::Solve { file } => {
                minkowski_solve(&with_input("minkowski solve", file), file)?
            }
            MinkowskiAction::Check { file } => {
                minkowski_check(&with_input("minkowski check", file), file)?
            }
            MinkowskiAction::Roundtrip { faces } => {
                let mut c = RunConfig::new("minkowski roundtrip", g);
                c.options = json!({ "faces": faces });
                if *faces < 4 {
                    return Err(CliError::Usage("--faces must be at least 4".into()));
                }
                demos::minkowski_roundtrip(&c, *faces, 1)
            }
        },
        Command::Rigidity { action } => match action {
            RigidityAction::Analyze { file } => {
                rigidity_analyze(&with_input("rigidity analyze", file), file)?
            }
            RigidityAction::Defo {
                action: DefoAction::Solve { file },
            } => defo_solve(&with_input("rigidity defo solve", file), file)?,
            RigidityAction::Defo {
                action: DefoAction::Check { file },
            } => defo_check(&with_input("rigidity defo check", file), file)?,
        },
        Command::Demo { name } if name == "list" => {
            for (name, about) in demos::DEMOS {
                println!("{name:<22}{about}");
            }
            return Ok(None);
        }
        Command::Demo { name } => {
            let c = RunConfig::new(&format!("demo {name}"), g);
            demos::run(name, &c).ok_or_else(|| CliError::UnknownDemo(name.clone()))?
        }
    };
    Ok(Some(report))
}

// ---- net --------------------------------------------------------------------

enum Surface {
    Polytope(ConvexPolytope, MetricNet),
    Net(MetricNet),
}

impl Surface {
    fn net(&self) -> &MetricNet {
        match self {
            Self::Polytope(_, n) | Self::Net(n) => n,
        }
    }
}

fn net_from_file(f: &NetFile) -> Result<MetricNet, IoError> {
    let polygons = f
        .polygons
        .iter()
        .map(|p| p.iter().map(|&[x, y]| Point2::new(x, y)).collect())
        .collect();
    let ids = f
        .identifications
        .iter()
        .map(|g| {
            let mut id = Identification::new(
                EdgeRef {
                    polygon: g.a[0],
                    edge: g.a[1],
                },
                EdgeRef {
                    polygon: g.b[0],
                    edge: g.b[1],
                },
            );
            id.reversed = g.reversed;
            id
        })
        .collect();
    MetricNet::new(polygons, ids).map_err(|e| IoError::schema("net", e.to_string()))
}

fn load_surface(file: &Path, tol: Tolerance) -> Result<Surface, IoError> {
    match parse_problem(file, None)? {
        ProblemFile::Mesh(m) => {
            let p = m.to_polytope(tol)?;
            let net = net_from_polytope(&p);
            Ok(Surface::Polytope(p, net))
        }
        ProblemFile::Net(n) => Ok(Surface::Net(net_from_file(&n)?)),
        other => Err(IoError::schema(
            "kind",
            format!("expected `mesh` or `net`, found `{}`", other.kind()),
        )),
    }
}

fn net_validate(c: &RunConfig, file: &Path) -> Result<Report, CliError> {
    let tol = Tolerance::new(c.tol_or(Tolerance::DEFAULT_RELATIVE));
    let s = load_surface(file, tol)?;
    let v = validate_net(s.net(), tol);
    let mut r = c.report();
    r.metric("euler_characteristic", v.euler_characteristic);
    r.metric("connected", v.connected);
    r.metric("unpaired_edges", v.unpaired_edges.len());
    r.metric("edge_length_offenders", v.edge_lengths.offenders.clone());
    r.metric(
        "max_length_difference",
        real(v.length_differences.iter().copied().fold(0.0, f64::max)),
    );
    r.metric("angle_sum_offenders", v.angle_sums.offenders.clone());
    r.metric("class_angles", reals(&v.class_angles));
    r.check("topology", v.topology.passed);
    r.check("edge_lengths", v.edge_lengths.passed);
    r.check("angle_sums", v.angle_sums.passed);
    Ok(r)
}

fn net_curvature(c: &RunConfig, file: &Path) -> Result<Report, CliError> {
    let tol = Tolerance::new(c.tol_or(Tolerance::DEFAULT_RELATIVE));
    let s = load_surface(file, tol)?;
    let mut r = c.report();
    let k = match vertex_curvatures(s.net(), tol) {
        Ok(k) => k,
        Err(e) => {
            r.fail(e);
            return Ok(r);
        }
    };
    r.metric("total", real(k.total));
    r.metric(
        "total_minus_4pi",
        real(k.total - 4.0 * std::f64::consts::PI),
    );
    let mut t = Table::new(&["class", "angle", "curvature"]);
    for (i, (a, kk)) in k.angles.iter().zip(&k.curvatures).enumerate() {
        t.push(vec![i.into(), real(*a), real(*kk)]);
    }
    r.tables.insert("vertices".into(), t);
    r.metric("curvatures", reals(&k.curvatures));
    if let Surface::Polytope(p, net) = &s {
        // Intrinsic curvature against the spherical image of each vertex.
        let classes = polytope_vertex_classes(p, net);
        let gap = (0..p.vertices().len())
            .filter(|&v| classes[v] != usize::MAX)
            .map(|v| (k.curvatures[classes[v]] - p.normal_cone_area(v).unwrap_or(f64::NAN)).abs())
            .fold(0.0, f64::max);
        r.metric("max_spherical_image_gap", real(gap));
        r.check("matches_spherical_image", gap <= c.tol_or(1e-9));
    }
    Ok(r)
}

fn parse_point(s: &Surface, text: &str) -> Result<SurfacePoint, CliError> {
    let bad = || CliError::Usage(format!("cannot read point `{text}`"));
    let nums = |t: &str| -> Result<Vec<f64>, CliError> {
        t.split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
            .collect()
    };
    match s {
        Surface::Polytope(p, _) => {
            let x = nums(text)?;
            if x.len() != 3 {
                return Err(bad());
            }
            locate_on_polytope(p, Vector3::new(x[0], x[1], x[2]), Tolerance::new(1e-7))
                .ok_or_else(|| CliError::Usage(format!("point `{text}` is not on the surface")))
        }
        Surface::Net(net) => {
            let (k, rest) = text.split_once(':').ok_or_else(bad)?;
            let k: usize = k.trim().parse().map_err(|_| bad())?;
            let x = nums(rest)?;
            if x.len() != 2 || k >= net.polygons().len() {
                return Err(bad());
            }
            Ok(SurfacePoint::new(k, Point2::new(x[0], x[1])))
        }
    }
}

fn net_geodesic(c: &RunConfig, file: &Path, from: &str, to: &str) -> Result<Report, CliError> {
    let s = load_surface(file, Tolerance::new(c.tol_or(Tolerance::DEFAULT_RELATIVE)))?;
    let (p, q) = (parse_point(&s, from)?, parse_point(&s, to)?);
    let mut r = c.report();
    match shortest_path(s.net(), p, q) {
        Ok(path) => {
            r.metric("length", real(path.length));
            r.metric("faces", path.faces());
            let mut t = Table::new(&["polygon", "x0", "y0", "x1", "y1"]);
            for l in &path.legs {
                t.push(vec![
                    l.polygon.into(),
                    real(l.start.x),
                    real(l.start.y),
                    real(l.end.x),
                    real(l.end.y),
                ]);
            }
            r.tables.insert("legs".into(), t);
        }
        Err(e) => r.fail(e),
    }
    Ok(r)
}

// ---- ma ---------------------------------------------------------------------

fn ma_problem(f: &MaProblemFile) -> Result<MAProblem, IoError> {
    let pt = |[x, y]: [f64; 2]| Point2::new(x, y);
    let mut p = MAProblem::new(
        f.boundary.iter().map(|b| pt(b.node)).collect(),
        f.boundary.iter().map(|b| b.value).collect(),
        f.nodes.iter().map(|&x| pt(x)).collect(),
        f.masses.clone(),
    );
    if let Some(d) = &f.domain {
        p.domain = d.iter().map(|&x| pt(x)).collect();
    }
    if let Some(src) = &f.theta {
        let w = ExprWeight::parse(src).map_err(|e| IoError::schema("theta", e.to_string()))?;
        p = p.with_weight(Arc::new(w));
    }
    p.validate()
        .map_err(|e| IoError::schema("ma-problem", e.to_string()))?;
    Ok(p)
}

fn ma_solve(c: &RunConfig, file: &Path, homotopy: Option<usize>) -> Result<Report, CliError> {
    let ProblemFile::MaProblem(f) = parse_problem(file, Some("ma-problem"))? else {
        unreachable!()
    };
    let problem = ma_problem(&f)?;
    let defaults = SolveOptions::default();
    let opts = SolveOptions {
        tol: c.tol_or(defaults.tol),
        max_iter: c.max_iter_or(defaults.max_iter),
        ..defaults
    };
    let mut r = c.report();
    let result = match homotopy {
        Some(0) => return Err(CliError::Usage("--homotopy needs at least one step".into())),
        Some(steps) => {
            let mean = problem.total_mass() / problem.num_interior() as f64;
            let family = |t: f64| {
                let mut p = problem.clone();
                for m in &mut p.masses {
                    *m = (1.0 - t) * mean + t * *m;
                }
                p
            };
            let schedule = HomotopySchedule::uniform(steps, family);
            homotopy_solve(
                &schedule,
                HomotopyOptions {
                    solve: opts,
                    ..Default::default()
                },
            )
            .map(|s| {
                r.metric("homotopy_steps", s.len());
                r.metric(
                    "homotopy_t",
                    reals(&s.iter().map(|x| x.t).collect::<Vec<_>>()),
                );
                s.last().expect("at least the start").solution.clone()
            })
        }
        None => solve_ma(&problem, opts),
    };
    match result {
        Ok(s) => {
            r.metric("residual", real(s.residual));
            r.metric("iterations", s.iterations);
            r.metric("method", format!("{:?}", s.method));
            r.metric("sweep_residuals", s.sweep_residuals.len());
            let mut t = Table::new(&["x", "y", "value", "mass", "achieved"]);
            for (k, x) in problem.interior_nodes.iter().enumerate() {
                let v = s.interior_values()[k];
                t.push(vec![
                    real(x.x),
                    real(x.y),
                    real(v),
                    real(problem.masses[k]),
                    real(s.masses[k]),
                ]);
            }
            r.tables.insert("interior".into(), t);
            r.check("converged", s.residual <= opts.tol);
        }
        Err(e) => r.fail(e),
    }
    Ok(r)
}

// ---- minkowski ----------------------------------------------------------------

/// Normals and areas from the file, with the curvature repair if the data
/// came as a profile.
fn minkowski_data(
    f: &MinkowskiProblemFile,
    r: &mut Report,
) -> Result<(Vec<Vector3>, Vec<f64>), IoError> {
    let v3 = |[x, y, z]: [f64; 3]| Vector3::new(x, y, z);
    match (&f.normals, &f.areas, &f.curvature) {
        (Some(n), Some(a), None) => Ok((n.iter().map(|&x| v3(x)).collect(), a.clone())),
        (None, None, Some(k)) => {
            let (centers, cell_areas) = match (&k.cells, k.level) {
                (Some(cells), None) => (
                    cells.iter().map(|c| v3(c.center)).collect(),
                    cells.iter().map(|c| c.area).collect(),
                ),
                (None, Some(level)) if level <= 5 => polyconvex::minkowski::icosphere(level),
                (None, Some(_)) => return Err(IoError::schema("curvature.level", "at most 5")),
                _ => {
                    return Err(IoError::schema(
                        "curvature",
                        "give exactly one of `cells` and `level`",
                    ))
                }
            };
            let curvature: Vec<f64> = match &k.k {
                CurvatureValues::Samples(v) => v.clone(),
                CurvatureValues::Expression(src) => {
                    let e = Expression::compile(src, CURVATURE_VARIABLES)
                        .map_err(|e| IoError::schema("curvature.K", e.to_string()))?;
                    centers
                        .iter()
                        .map(|n: &Vector3| e.eval(&[n.x, n.y, n.z]))
                        .collect::<Result<_, _>>()
                        .map_err(|e| IoError::schema("curvature.K", e.to_string()))?
                }
            };
            if curvature.len() != centers.len() {
                return Err(IoError::schema("curvature.K", "one value per cell"));
            }
            let d = discretize_curvature(&CurvatureSample {
                centers,
                cell_areas,
                curvature,
            })
            .map_err(|e| IoError::schema("curvature", e.to_string()))?;
            r.metric("defect_before_repair", real(d.defect_before.norm()));
            r.metric(
                "repair_norm",
                real(d.correction.iter().map(|x| x * x).sum::<f64>().sqrt()),
            );
            Ok((d.problem.normals().to_vec(), d.problem.areas().to_vec()))
        }
        _ => Err(IoError::schema(
            "minkowski-problem",
            "give `normals` and `areas`, or `curvature`",
        )),
    }
}

fn minkowski_solve(c: &RunConfig, file: &Path) -> Result<Report, CliError> {
    let ProblemFile::MinkowskiProblem(f) = parse_problem(file, Some("minkowski-problem"))? else {
        unreachable!()
    };
    let mut r = c.report();
    let (normals, areas) = minkowski_data(&f, &mut r)?;
    let problem = MinkowskiProblem::new(normals, areas)
        .map_err(|e| IoError::schema("minkowski-problem", e.to_string()))?;
    let d = MinkowskiOptions::default();
    let opts = MinkowskiOptions {
        tol: c.tol_or(d.tol),
        max_iter: c.max_iter_or(d.max_iter),
        ..d
    };
    match solve_minkowski(&problem, opts) {
        Ok(s) => {
            let p = &s.polytope;
            r.metric("residual", real(s.residual));
            r.metric("iterations", s.iterations);
            r.metric("volume", real(p.volume()));
            r.metric("support_numbers", reals(&s.support_numbers));
            r.attachments
                .insert("polytope".into(), write_off(&Mesh::from_polytope(p)));
            r.check("converged", s.residual <= opts.tol);
        }
        Err(e) => r.fail(e),
    }
    Ok(r)
}

fn minkowski_check(c: &RunConfig, file: &Path) -> Result<Report, CliError> {
    let ProblemFile::MinkowskiProblem(f) = parse_problem(file, Some("minkowski-problem"))? else {
        unreachable!()
    };
    let mut r = c.report();
    let (normals, areas) = minkowski_data(&f, &mut r)?;
    let total: f64 = areas.iter().sum();
    match MinkowskiProblem::new(normals, areas) {
        Ok(p) => {
            let defect = check_closing(&p).norm() / total;
            r.metric("relative_closing_defect", real(defect));
            r.check(
                "closes",
                defect <= c.tol_or(MinkowskiOptions::default().closing_tol),
            );
        }
        Err(e) => r.fail(e),
    }
    Ok(r)
}

// ---- rigidity -------------------------------------------------------------------

fn rigidity_analyze(c: &RunConfig, file: &Path) -> Result<Report, CliError> {
    let surface = match parse_problem(file, None)? {
        ProblemFile::Mesh(m) => m.to_surface(false)?,
        ProblemFile::RigidityProblem(p) => match p.surface {
            Some(s) => {
                let m = Mesh {
                    vertices: s.vertices,
                    faces: s.triangles.iter().map(|t| t.to_vec()).collect(),
                };
                m.to_surface(s.with_boundary)?
            }
            None => return Err(IoError::schema("surface", "missing").into()),
        },
        other => {
            return Err(IoError::schema(
                "kind",
                format!(
                    "expected `mesh` or `rigidity-problem`, found `{}`",
                    other.kind()
                ),
            )
            .into())
        }
    };
    let mut r = c.report();
    r.metric("vertices", surface.num_vertices());
    r.metric("edges", surface.edges().len());
    match bending_space(&surface, c.tol_or(RANK_TOLERANCE)) {
        Ok(b) => {
            r.metric("kernel_dim", b.kernel_dim);
            r.metric("nontrivial_dim", b.nontrivial_dim);
            r.metric("trivial_defect", real(b.trivial_defect));
            r.metric("threshold", real(b.threshold));
            r.metric(
                "smallest_singular_values",
                reals(&b.spectrum[..b.spectrum.len().min(12)]),
            );
            r.metric("flat_vertices", b.flat_vertices.clone());
            r.metric("rigid", b.nontrivial_dim == 0);
        }
        Err(e) => r.fail(e),
    }
    Ok(r)
}

fn load_patch(file: &Path) -> Result<polyconvex::rigidity::GridPatch, IoError> {
    match parse_problem(file, Some("rigidity-problem"))? {
        ProblemFile::RigidityProblem(p) => p
            .patch
            .ok_or_else(|| IoError::schema("patch", "missing"))?
            .to_patch(),
        _ => unreachable!(),
    }
}

fn defo_solve(c: &RunConfig, file: &Path) -> Result<Report, CliError> {
    let patch = load_patch(file)?;
    let mut r = c.report();
    match solve_defo(&patch) {
        Ok(s) => {
            r.metric("residual", real(defo_residual(&s)));
            r.metric("nx", s.nx());
            r.metric("ny", s.ny());
            r.metric(
                "solution",
                serde_json::to_value(PatchFile::from_patch(&s)).expect("patch serializes"),
            );
        }
        Err(e) => r.fail(e),
    }
    Ok(r)
}

fn defo_check(c: &RunConfig, file: &Path) -> Result<Report, CliError> {
    let patch = load_patch(file)?;
    let mut r = c.report();
    match main_lemma_check(&patch, c.tol_or(1e-8)) {
        Ok(l) => {
            r.metric("checked", l.checked);
            r.metric("max_det", real(l.max_det));
            r.metric("residual", real(l.residual));
            r.metric("residual_bound", real(l.residual_bound));
            let mut t = Table::new(&["i", "j", "det"]);
            for &(i, j, d) in &l.violations {
                t.push(vec![i.into(), j.into(), real(d)]);
            }
            r.tables.insert("violations".into(), t);
            r.check("nonpositive_curvature", l.holds());
        }
        Err(e) => r.fail(e),
    }
    Ok(r)
}
