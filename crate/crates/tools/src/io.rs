//! OFF meshes and JSON problem files.
//!
//! Reals are written as `{:.16e}`, which is lossless for `f64`, so
//! `parse(write(x)) == x` holds exactly on canonical content.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use polyconvex::polytope::ConvexPolytope;
use polyconvex::rigidity::{GridPatch, RigidityError, TriangulatedSurface};
use polyconvex::{Tolerance, Vector3};
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read { path: String, source: io::Error },
    #[error("{path}: {source}")]
    Write { path: String, source: io::Error },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("schema error in `{field}`: {constraint}")]
    Schema { field: String, constraint: String },
}

impl IoError {
    fn parse(line: usize, message: impl Into<String>) -> Self {
        Self::Parse {
            line,
            message: message.into(),
        }
    }

    pub fn schema(field: impl Into<String>, constraint: impl Into<String>) -> Self {
        Self::Schema {
            field: field.into(),
            constraint: constraint.into(),
        }
    }

    fn json(e: serde_json::Error) -> Self {
        if e.is_data() {
            // serde reports the offending field inside the message.
            Self::Schema {
                field: format!("line {} column {}", e.line(), e.column()),
                constraint: e.to_string(),
            }
        } else {
            Self::Parse {
                line: e.line(),
                message: e.to_string(),
            }
        }
    }
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}

// ---- OFF ------------------------------------------------------------------

/// Polygonal mesh as stored in OFF files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<Vec<usize>>,
}

impl Mesh {
    pub fn from_polytope(p: &ConvexPolytope) -> Self {
        Self {
            vertices: p.vertices().iter().map(|v| [v.x, v.y, v.z]).collect(),
            faces: p.faces().iter().filter(|f| f.len() >= 3).cloned().collect(),
        }
    }

    pub fn from_surface(s: &TriangulatedSurface) -> Self {
        Self {
            vertices: s.vertices().iter().map(|v| [v.x, v.y, v.z]).collect(),
            faces: s.triangles().iter().map(|t| t.to_vec()).collect(),
        }
    }

    pub fn points(&self) -> Vec<Vector3> {
        self.vertices
            .iter()
            .map(|v| Vector3::new(v[0], v[1], v[2]))
            .collect()
    }

    pub fn to_polytope(&self, tol: Tolerance) -> Result<ConvexPolytope, IoError> {
        ConvexPolytope::from_faces(self.points(), self.faces.clone(), tol)
            .map_err(|e| IoError::schema("faces", format!("not a convex polytope boundary: {e}")))
    }

    /// Polygonal faces are fanned from their first vertex.
    pub fn to_surface(&self, with_boundary: bool) -> Result<TriangulatedSurface, IoError> {
        let mut tris = Vec::new();
        for f in &self.faces {
            for k in 1..f.len().saturating_sub(1) {
                tris.push([f[0], f[k], f[k + 1]]);
            }
        }
        let made = if with_boundary {
            TriangulatedSurface::with_boundary(self.points(), tris)
        } else {
            TriangulatedSurface::new(self.points(), tris)
        };
        made.map_err(|e| IoError::schema("faces", e.to_string()))
    }
}

/// Reads ASCII OFF: an `OFF` line, counts `nv nf ne`, vertices, then faces
/// as `k i₁ … i_k`. `#` starts a comment.
pub fn parse_off(text: &str) -> Result<Mesh, IoError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (n, header) = lines
        .next()
        .ok_or_else(|| IoError::parse(1, "empty file"))?;
    let mut counts_line = None;
    if header != "OFF" {
        // Header and counts may share a line.
        match header.strip_prefix("OFF") {
            Some(rest) if !rest.trim().is_empty() => counts_line = Some((n, rest.trim())),
            _ => return Err(IoError::parse(n, "expected `OFF` header")),
        }
    }
    let (n, counts) = match counts_line {
        Some(c) => c,
        None => lines
            .next()
            .ok_or_else(|| IoError::parse(n + 1, "missing counts line"))?,
    };
    let counts: Vec<usize> = parse_fields(n, counts)?;
    if counts.len() < 2 {
        return Err(IoError::parse(n, "counts line needs `nv nf [ne]`"));
    }
    let (nv, nf) = (counts[0], counts[1]);
    let mut vertices = Vec::with_capacity(nv);
    for k in 0..nv {
        let (n, l) = lines
            .next()
            .ok_or_else(|| IoError::parse(0, format!("missing vertex {k}")))?;
        let xs: Vec<f64> = parse_fields(n, l)?;
        if xs.len() < 3 || xs[..3].iter().any(|x| !x.is_finite()) {
            return Err(IoError::parse(n, "vertex needs 3 finite coordinates"));
        }
        vertices.push([xs[0], xs[1], xs[2]]);
    }
    let mut faces = Vec::with_capacity(nf);
    for k in 0..nf {
        let (n, l) = lines
            .next()
            .ok_or_else(|| IoError::parse(0, format!("missing face {k}")))?;
        let xs: Vec<usize> = l
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| IoError::parse(n, format!("bad index `{t}`")))
            })
            .collect::<Result<_, _>>()?;
        let Some((&len, rest)) = xs.split_first() else {
            return Err(IoError::parse(n, "empty face"));
        };
        // Trailing colour values are allowed and ignored.
        if len < 3 || rest.len() < len {
            return Err(IoError::parse(n, format!("face declares {len} vertices")));
        }
        if let Some(bad) = rest[..len].iter().find(|&&i| i >= nv) {
            return Err(IoError::parse(
                n,
                format!("vertex index {bad} out of range"),
            ));
        }
        faces.push(rest[..len].to_vec());
    }
    Ok(Mesh { vertices, faces })
}

fn parse_fields<T: std::str::FromStr>(line: usize, text: &str) -> Result<Vec<T>, IoError> {
    text.split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| IoError::parse(line, format!("cannot parse `{t}`")))
        })
        .collect()
}

pub fn write_off(mesh: &Mesh) -> String {
    let mut s = String::new();
    let _ = write!(s, "OFF\n{} {} 0\n", mesh.vertices.len(), mesh.faces.len());
    for v in &mesh.vertices {
        let _ = writeln!(s, "{:.16e} {:.16e} {:.16e}", v[0], v[1], v[2]);
    }
    for f in &mesh.faces {
        let _ = write!(s, "{}", f.len());
        for i in f {
            let _ = write!(s, " {i}");
        }
        s.push('\n');
    }
    s
}

// ---- JSON problem files --------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryNode {
    pub node: [f64; 2],
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaProblemFile {
    /// Counterclockwise convex polygon; defaults to the hull of the
    /// boundary nodes.
    #[serde(default)]
    pub domain: Option<Vec<[f64; 2]>>,
    pub boundary: Vec<BoundaryNode>,
    pub nodes: Vec<[f64; 2]>,
    pub masses: Vec<f64>,
    /// Expression in `p1`, `p2`, `z`, `x1`, `x2`; `null` means θ ≡ 1.
    #[serde(default)]
    pub theta: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvatureCell {
    pub center: [f64; 3],
    pub area: f64,
}

/// Curvature either per cell or as an expression in `nx`, `ny`, `nz`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CurvatureValues {
    Samples(Vec<f64>),
    Expression(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvatureData {
    /// Explicit cells, or `level` for the dual cells of a subdivided
    /// icosahedron.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<CurvatureCell>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    #[serde(rename = "K")]
    pub k: CurvatureValues,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinkowskiProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normals: Option<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub areas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curvature: Option<CurvatureData>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceFile {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
    #[serde(default)]
    pub with_boundary: bool,
}

/// Grid patch: rows are `y = const`, `z[j][i]` at `origin + h·(i, j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchFile {
    pub h: f64,
    #[serde(default)]
    pub origin: [f64; 2],
    pub z: Vec<Vec<f64>>,
    pub zeta: Vec<Vec<f64>>,
}

impl PatchFile {
    pub fn from_patch(p: &GridPatch) -> Self {
        let rows = |v: &[f64]| v.chunks(p.nx()).map(|r| r.to_vec()).collect();
        Self {
            h: p.h(),
            origin: p.origin(),
            z: rows(p.z()),
            zeta: rows(p.zeta()),
        }
    }

    pub fn to_patch(&self) -> Result<GridPatch, IoError> {
        let ny = self.z.len();
        let nx = self.z.first().map_or(0, Vec::len);
        if self.zeta.len() != ny || self.z.iter().chain(&self.zeta).any(|r| r.len() != nx) {
            return Err(IoError::schema(
                "z/zeta",
                "rows must form equal rectangular arrays",
            ));
        }
        let flat = |a: &[Vec<f64>]| a.iter().flatten().copied().collect();
        GridPatch::new(nx, ny, self.h, self.origin, flat(&self.z), flat(&self.zeta)).map_err(|e| {
            match e {
                RigidityError::InvalidPatch(c) => IoError::schema("patch", c),
                other => IoError::schema("patch", other.to_string()),
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigidityProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patch: Option<PatchFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GluedEdges {
    pub a: [usize; 2],
    pub b: [usize; 2],
    #[serde(default = "yes")]
    pub reversed: bool,
}

fn yes() -> bool {
    true
}

/// Polygons in their own frames; `a`/`b` are `[polygon, edge]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetFile {
    pub polygons: Vec<Vec<[f64; 2]>>,
    pub identifications: Vec<GluedEdges>,
}

/// Any JSON input, discriminated by its top-level `kind`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProblemFile {
    Mesh(Mesh),
    MaProblem(MaProblemFile),
    MinkowskiProblem(MinkowskiProblemFile),
    RigidityProblem(RigidityProblemFile),
    Net(NetFile),
}

impl ProblemFile {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Mesh(_) => "mesh",
            Self::MaProblem(_) => "ma-problem",
            Self::MinkowskiProblem(_) => "minkowski-problem",
            Self::RigidityProblem(_) => "rigidity-problem",
            Self::Net(_) => "net",
        }
    }
}

/// Parses a problem file. `.off` files become `mesh`; everything else is
/// JSON with a `kind`. If `expected` is given the kind must match.
pub fn parse_problem(path: &Path, expected: Option<&str>) -> Result<ProblemFile, IoError> {
    let text = read_text(path)?;
    let is_off = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("off"));
    let file = if is_off {
        ProblemFile::Mesh(parse_off(&text)?)
    } else {
        parse_problem_str(&text)?
    };
    if let Some(kind) = expected {
        if file.kind() != kind {
            return Err(IoError::schema(
                "kind",
                format!("expected `{kind}`, found `{}`", file.kind()),
            ));
        }
    }
    Ok(file)
}

pub fn parse_problem_str(text: &str) -> Result<ProblemFile, IoError> {
    serde_json::from_str(text).map_err(IoError::json)
}

/// Canonical JSON: pretty-printed, reals as `{:.16e}`.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, ExactFloats::default());
    value
        .serialize(&mut ser)
        .expect("in-memory serialization cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

/// Pretty printer that writes every `f64` with 17 significant digits.
#[derive(Default)]
struct ExactFloats(PrettyFormatter<'static>);

impl Formatter for ExactFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}
