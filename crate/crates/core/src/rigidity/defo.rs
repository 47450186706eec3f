use alloc::vec;
use alloc::vec::Vec;

use super::RigidityError;
use crate::linalg::BandMatrix;

/// Values of the graph `z` and of the vertical bending component `ζ` on a
/// uniform `nx × ny` grid with spacing `h`. Node `(i, j)` sits at
/// `origin + h·(i, j)` and is stored at `j·nx + i`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridPatch {
    nx: usize,
    ny: usize,
    h: f64,
    origin: [f64; 2],
    z: Vec<f64>,
    zeta: Vec<f64>,
}

impl GridPatch {
    pub fn new(
        nx: usize,
        ny: usize,
        h: f64,
        origin: [f64; 2],
        z: Vec<f64>,
        zeta: Vec<f64>,
    ) -> Result<Self, RigidityError> {
        if nx < 3 || ny < 3 {
            return Err(RigidityError::InvalidPatch(
                "need at least 3 nodes per axis",
            ));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(RigidityError::InvalidPatch("spacing must be positive"));
        }
        if z.len() != nx * ny || zeta.len() != nx * ny {
            return Err(RigidityError::InvalidPatch(
                "array sizes do not match the grid",
            ));
        }
        if z.iter().chain(&zeta).any(|v| !v.is_finite()) {
            return Err(RigidityError::InvalidPatch("non-finite value"));
        }
        Ok(Self {
            nx,
            ny,
            h,
            origin,
            z,
            zeta,
        })
    }

    /// Sample `z` and `ζ` from closures.
    pub fn from_fns(
        nx: usize,
        ny: usize,
        h: f64,
        origin: [f64; 2],
        z: impl Fn(f64, f64) -> f64,
        zeta: impl Fn(f64, f64) -> f64,
    ) -> Result<Self, RigidityError> {
        let mut zs = Vec::with_capacity(nx * ny);
        let mut ws = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (x, y) = (origin[0] + h * i as f64, origin[1] + h * j as f64);
                zs.push(z(x, y));
                ws.push(zeta(x, y));
            }
        }
        Self::new(nx, ny, h, origin, zs, ws)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn zeta(&self) -> &[f64] {
        &self.zeta
    }

    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.origin[0] + self.h * i as f64,
            self.origin[1] + self.h * j as f64,
        )
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny
    }

    /// Discrete Hessian `(f_xx, f_xy, f_yy)` at an interior node: central
    /// second differences and the 4-corner mixed stencil.
    fn hessian(&self, f: &[f64], i: usize, j: usize) -> [f64; 3] {
        let at = |di: isize, dj: isize| {
            f[self.idx((i as isize + di) as usize, (j as isize + dj) as usize)]
        };
        let h2 = self.h * self.h;
        let c = at(0, 0);
        [
            (at(1, 0) - 2.0 * c + at(-1, 0)) / h2,
            (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h2),
            (at(0, 1) - 2.0 * c + at(0, -1)) / h2,
        ]
    }

    pub fn hessian_z(&self, i: usize, j: usize) -> [f64; 3] {
        self.hessian(&self.z, i, j)
    }

    pub fn hessian_zeta(&self, i: usize, j: usize) -> [f64; 3] {
        self.hessian(&self.zeta, i, j)
    }

    fn interior(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..self.ny - 1).flat_map(move |j| (1..self.nx - 1).map(move |i| (i, j)))
    }

    /// `z_xx ζ_yy − 2 z_xy ζ_xy + z_yy ζ_xx` at an interior node.
    pub fn defo_at(&self, i: usize, j: usize) -> f64 {
        let [a, b, c] = self.hessian_z(i, j);
        let [p, q, r] = self.hessian_zeta(i, j);
        a * r - 2.0 * b * q + c * p
    }

    /// Interior nodes where the discrete Hessian of `z` is not positive definite.
    pub fn nonconvex_nodes(&self) -> Vec<(usize, usize)> {
        self.interior()
            .filter(|&(i, j)| {
                let [a, b, c] = self.hessian_z(i, j);
                !(a > 0.0 && a * c - b * b > 0.0)
            })
            .collect()
    }

    pub fn with_zeta(&self, zeta: Vec<f64>) -> Result<Self, RigidityError> {
        Self::new(self.nx, self.ny, self.h, self.origin, self.z.clone(), zeta)
    }
}

/// Max-norm of the bending equation over interior nodes.
pub fn defo_residual(patch: &GridPatch) -> f64 {
    patch
        .interior()
        .map(|(i, j)| patch.defo_at(i, j).abs())
        .fold(0.0, f64::max)
}

/// Dirichlet solve for `ζ`: boundary values are taken from `patch.zeta()`,
/// interior values are ignored and replaced.
pub fn solve_defo(patch: &GridPatch) -> Result<GridPatch, RigidityError> {
    let bad = patch.nonconvex_nodes();
    if !bad.is_empty() {
        return Err(RigidityError::NotStrictlyConvex(bad));
    }
    let m = patch.nx - 2;
    let n = m * (patch.ny - 2);
    let unknown = |i: usize, j: usize| (j - 1) * m + (i - 1);
    let mut mat = BandMatrix::zeros(n, m + 1, m + 1);
    let mut rhs = vec![0.0; n];
    for (i, j) in patch.interior() {
        let [a, b, c] = patch.hessian_z(i, j);
        let row = unknown(i, j);
        // h²·(c ζ_xx − 2b ζ_xy + a ζ_yy)
        let stencil = [
            (0isize, 0isize, -2.0 * (a + c)),
            (1, 0, c),
            (-1, 0, c),
            (0, 1, a),
            (0, -1, a),
            (1, 1, -0.5 * b),
            (-1, -1, -0.5 * b),
            (1, -1, 0.5 * b),
            (-1, 1, 0.5 * b),
        ];
        for (di, dj, w) in stencil {
            let (ii, jj) = ((i as isize + di) as usize, (j as isize + dj) as usize);
            if patch.is_boundary(ii, jj) {
                rhs[row] -= w * patch.zeta[patch.idx(ii, jj)];
            } else {
                mat.add(row, unknown(ii, jj), w);
            }
        }
    }
    mat.solve(&mut rhs)
        .map_err(|e| RigidityError::Singular(e.0))?;
    let mut zeta = patch.zeta.clone();
    for (i, j) in patch.interior() {
        zeta[patch.idx(i, j)] = rhs[unknown(i, j)];
    }
    patch.with_zeta(zeta)
}

/// Outcome of the sign check on `det Hess ζ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LemmaReport {
    /// Interior nodes where `Hess z` is positive definite.
    pub checked: usize,
    pub max_det: f64,
    pub residual: f64,
    /// Largest `det Hess ζ` the residual alone could allow.
    pub residual_bound: f64,
    /// Nodes with `det Hess ζ > tol`, with that determinant.
    pub violations: Vec<(usize, usize, f64)>,
    pub tolerance: f64,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `det Hess ζ ≤ tol` wherever `Hess z ≻ 0`.
///
/// With `P = Hess z ≻ 0` and pairing `⟨adj P, Hess ζ⟩ = r`, one has
/// `det Hess ζ ≤ r²/(4 det P)`. If that bound, taken over the checked
/// nodes, already exceeds `tol` the check cannot tell anything and
/// `PrecisionWarning` is returned.
pub fn main_lemma_check(patch: &GridPatch, tol: f64) -> Result<LemmaReport, RigidityError> {
    let residual = defo_residual(patch);
    let mut checked = 0;
    let mut max_det = f64::NEG_INFINITY;
    let mut residual_bound: f64 = 0.0;
    let mut violations = Vec::new();
    for (i, j) in patch.interior() {
        let [a, b, c] = patch.hessian_z(i, j);
        let det_z = a * c - b * b;
        if !(a > 0.0 && det_z > 0.0) {
            continue;
        }
        checked += 1;
        let r = patch.defo_at(i, j);
        residual_bound = residual_bound.max(r * r / (4.0 * det_z));
        let [p, q, s] = patch.hessian_zeta(i, j);
        let det = p * s - q * q;
        max_det = max_det.max(det);
        if det > tol {
            violations.push((i, j, det));
        }
    }
    if residual_bound > tol {
        return Err(RigidityError::PrecisionWarning {
            residual,
            bound: residual_bound,
        });
    }
    Ok(LemmaReport {
        checked,
        max_det,
        residual,
        residual_bound,
        violations,
        tolerance: tol,
    })
}
