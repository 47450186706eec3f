//! Weights `θ(p, z, x)` and the quadratures that integrate them over slope
//! cells.

use alloc::sync::Arc;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::Point2;

/// Positive weight of the conditional curvature, a function of the slope
/// `p`, the value `z` and the position `x`.
pub trait Weight: Send + Sync {
    fn eval(&self, p: Point2, z: f64, x: Point2) -> f64;

    fn depends_on_z(&self) -> bool {
        true
    }

    fn depends_on_x(&self) -> bool {
        true
    }

    /// `Some(c)` if the weight is the constant `c`; enables exact
    /// integration.
    fn constant(&self) -> Option<f64> {
        None
    }
}

pub type SharedWeight = Arc<dyn Weight>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantWeight(pub f64);

impl Weight for ConstantWeight {
    fn eval(&self, _p: Point2, _z: f64, _x: Point2) -> f64 {
        self.0
    }
    fn depends_on_z(&self) -> bool {
        false
    }
    fn depends_on_x(&self) -> bool {
        false
    }
    fn constant(&self) -> Option<f64> {
        Some(self.0)
    }
}

/// Weight given by a closure, with declared dependencies.
pub struct FnWeight<F> {
    f: F,
    z: bool,
    x: bool,
}

impl<F: Fn(Point2, f64, Point2) -> f64 + Send + Sync> FnWeight<F> {
    /// Depends on all of `p`, `z`, `x`.
    pub fn new(f: F) -> Self {
        Self {
            f,
            z: true,
            x: true,
        }
    }

    /// Depends on the slope only.
    pub fn slope_only(f: F) -> Self {
        Self {
            f,
            z: false,
            x: false,
        }
    }

    pub fn with_dependence(f: F, z: bool, x: bool) -> Self {
        Self { f, z, x }
    }
}

impl<F: Fn(Point2, f64, Point2) -> f64 + Send + Sync> Weight for FnWeight<F> {
    fn eval(&self, p: Point2, z: f64, x: Point2) -> f64 {
        (self.f)(p, z, x)
    }
    fn depends_on_z(&self) -> bool {
        self.z
    }
    fn depends_on_x(&self) -> bool {
        self.x
    }
}

pub fn unit_weight() -> SharedWeight {
    Arc::new(ConstantWeight(1.0))
}

/// Seven-point degree-5 rule on a triangle: barycentric points and weights
/// (weights sum to 1).
const TRI7: [(f64, f64, f64, f64); 7] = [
    (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225),
    (
        0.059_715_871_789_770,
        0.470_142_064_105_115,
        0.470_142_064_105_115,
        0.132_394_152_788_506,
    ),
    (
        0.470_142_064_105_115,
        0.059_715_871_789_770,
        0.470_142_064_105_115,
        0.132_394_152_788_506,
    ),
    (
        0.470_142_064_105_115,
        0.470_142_064_105_115,
        0.059_715_871_789_770,
        0.132_394_152_788_506,
    ),
    (
        0.797_426_985_353_087,
        0.101_286_507_323_456,
        0.101_286_507_323_456,
        0.125_939_180_544_827,
    ),
    (
        0.101_286_507_323_456,
        0.797_426_985_353_087,
        0.101_286_507_323_456,
        0.125_939_180_544_827,
    ),
    (
        0.101_286_507_323_456,
        0.101_286_507_323_456,
        0.797_426_985_353_087,
        0.125_939_180_544_827,
    ),
];

/// Five-point Gauss–Legendre on `[0, 1]`.
const GL5: [(f64, f64); 5] = [
    (0.046_910_077_030_668, 0.118_463_442_528_095),
    (0.230_765_344_947_158, 0.239_314_335_249_683),
    (0.5, 0.284_444_444_444_444),
    (0.769_234_655_052_842, 0.239_314_335_249_683),
    (0.953_089_922_969_332, 0.118_463_442_528_095),
];

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("weight is not finite and positive at slope ({0}, {1})")]
pub struct QuadratureFailure(pub f64, pub f64);

/// Adaptive integration settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    /// Refine a triangle while the rule and its four-way split differ by
    /// more than this fraction.
    pub relative: f64,
    pub max_depth: u32,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            relative: 1e-3,
            max_depth: 12,
        }
    }
}

fn tri_rule<G: Fn(Point2) -> f64>(
    g: &G,
    a: Point2,
    b: Point2,
    c: Point2,
) -> Result<f64, QuadratureFailure> {
    let area = 0.5 * crate::planar::cross2(b - a, c - a).abs();
    let mut s = 0.0;
    for &(l1, l2, l3, w) in &TRI7 {
        let p = a * l1 + b * l2 + c * l3;
        let v = g(p);
        if !v.is_finite() {
            return Err(QuadratureFailure(p.x, p.y));
        }
        s += w * v;
    }
    Ok(s * area)
}

fn adaptive<G: Fn(Point2) -> f64>(
    g: &G,
    a: Point2,
    b: Point2,
    c: Point2,
    whole: f64,
    q: Quadrature,
    depth: u32,
) -> Result<f64, QuadratureFailure> {
    let (ab, bc, ca) = ((a + b) * 0.5, (b + c) * 0.5, (c + a) * 0.5);
    let parts = [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)];
    let mut vals = [0.0; 4];
    for (k, &(x, y, z)) in parts.iter().enumerate() {
        vals[k] = tri_rule(g, x, y, z)?;
    }
    let split: f64 = vals.iter().sum();
    if depth >= q.max_depth || (split - whole).abs() <= q.relative * split.abs() + 1e-300 {
        return Ok(split);
    }
    let mut total = 0.0;
    for (k, &(x, y, z)) in parts.iter().enumerate() {
        total += adaptive(g, x, y, z, vals[k], q, depth + 1)?;
    }
    Ok(total)
}

/// ∫ over a convex polygon of `g`, by fan triangulation and adaptive
/// refinement.
pub fn integrate_polygon<G: Fn(Point2) -> f64>(
    g: &G,
    poly: &[Point2],
    q: Quadrature,
) -> Result<f64, QuadratureFailure> {
    if poly.len() < 3 {
        return Ok(0.0);
    }
    let o = crate::planar::centroid(poly);
    let mut total = 0.0;
    for k in 0..poly.len() {
        let (a, b) = (poly[k], poly[(k + 1) % poly.len()]);
        let whole = tri_rule(g, o, a, b)?;
        total += adaptive(g, o, a, b, whole, q, 0)?;
    }
    Ok(total)
}

fn gl5<G: Fn(Point2) -> f64>(g: &G, a: Point2, b: Point2) -> f64 {
    GL5.iter()
        .map(|&(t, w)| w * g(a + (b - a) * t))
        .sum::<f64>()
        * (b - a).norm()
}

fn segment_adaptive<G: Fn(Point2) -> f64>(
    g: &G,
    a: Point2,
    b: Point2,
    whole: f64,
    depth: u32,
) -> f64 {
    let m = (a + b) * 0.5;
    let (l, r) = (gl5(g, a, m), gl5(g, m, b));
    if depth >= 30 || (l + r - whole).abs() <= 1e-12 * (l + r).abs() + 1e-300 {
        return l + r;
    }
    segment_adaptive(g, a, m, l, depth + 1) + segment_adaptive(g, m, b, r, depth + 1)
}

/// ∫ of `g` along the segment `[a, b]` (arclength measure), adaptive
/// Gauss–Legendre.
pub fn integrate_segment<G: Fn(Point2) -> f64>(g: &G, a: Point2, b: Point2) -> f64 {
    segment_adaptive(g, a, b, gl5(g, a, b), 0)
}

/// Eight-point Gauss–Legendre on `[0, 1]`.
const GL8: [(f64, f64); 8] = [
    (0.019_855_071_751_231_856, 0.050_614_268_145_188_13),
    (0.101_666_761_293_186_63, 0.111_190_517_226_687_24),
    (0.237_233_795_041_835_5, 0.156_853_322_938_943_64),
    (0.408_282_678_752_175_1, 0.181_341_891_689_181),
    (0.591_717_321_247_825, 0.181_341_891_689_181),
    (0.762_766_204_958_164_5, 0.156_853_322_938_943_64),
    (0.898_333_238_706_813_4, 0.111_190_517_226_687_24),
    (0.980_144_928_248_768_1, 0.050_614_268_145_188_13),
];

/// `∫_{R²} g(p) dp` for a positive `g`, or `None` if the integral does not
/// settle between radii 10⁴ and 10⁸.
///
/// Polar coordinates with `r = eˢ − 1`, composite Gauss–Legendre in `s` and
/// the periodic trapezoid rule in angle.
pub fn plane_integral<G: Fn(Point2) -> f64>(g: &G) -> Option<f64> {
    const ANGLES: usize = 64;
    const PANELS_PER_UNIT: usize = 12;
    let s_inner = (1e4f64).ln_1p();
    let s_outer = (1e8f64).ln_1p();
    let radial = |s0: f64, s1: f64| -> f64 {
        let panels = ((s1 - s0) * PANELS_PER_UNIT as f64).ceil() as usize;
        let h = (s1 - s0) / panels as f64;
        let mut total = 0.0;
        for k in 0..panels {
            for &(t, w) in &GL8 {
                let s = s0 + h * (k as f64 + t);
                let r = s.exp_m1();
                let ring: f64 = (0..ANGLES)
                    .map(|j| {
                        let phi = 2.0 * PI * j as f64 / ANGLES as f64;
                        g(Point2::new(r * phi.cos(), r * phi.sin()))
                    })
                    .sum::<f64>()
                    * (2.0 * PI / ANGLES as f64);
                total += w * h * ring * r * (r + 1.0);
            }
        }
        total
    };
    let inner = radial(0.0, s_inner);
    let tail = radial(s_inner, s_outer);
    let total = inner + tail;
    if !total.is_finite() || tail > 1e-6 * total {
        None
    } else {
        Some(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rule_is_exact_for_quintics() {
        // ∫ over the unit right triangle of x⁵ is 1/42, of x²y³ is 1/420.
        let tri = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ];
        let q = Quadrature {
            relative: 1.0,
            max_depth: 0,
        };
        let a = integrate_polygon(&|p: Point2| p.x.powi(5), &tri, q).unwrap();
        assert!((a - 1.0 / 42.0).abs() < 1e-14);
        let b = integrate_polygon(&|p: Point2| p.x * p.x * p.y.powi(3), &tri, q).unwrap();
        assert!((b - 1.0 / 420.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_gaussian_on_square() {
        let sq = vec![
            Point2::new(-1.0, -1.0),
            Point2::new(1.0, -1.0),
            Point2::new(1.0, 1.0),
            Point2::new(-1.0, 1.0),
        ];
        let q = Quadrature {
            relative: 1e-10,
            max_depth: 12,
        };
        let v = integrate_polygon(&|p: Point2| (-p.norm_squared()).exp(), &sq, q).unwrap();
        let erf1 = 0.842_700_792_949_714_9;
        assert!((v - PI * erf1 * erf1).abs() < 1e-9);
    }

    #[test]
    fn plane_integral_of_decaying_weight() {
        let v = plane_integral(&|p: Point2| 1.0 / (1.0 + p.norm_squared()).powi(2)).unwrap();
        assert!((v - PI).abs() < 1e-8, "{v}");
        assert!(plane_integral(&|_p: Point2| 1.0).is_none());
        assert!(plane_integral(&|p: Point2| 1.0 / (1.0 + p.norm_squared())).is_none());
    }
}
