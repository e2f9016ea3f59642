//! Numerical range of `S_d = [[a, d], [c conj(d), b]]` and of the generalized
//! quadratic operator.
//!
//! `W(S_d)` is a closed elliptical disk with foci at the eigenvalues
//! `(a + b +- sqrt((a - b)^2 + 4 c d^2)) / 2` and semi-axes
//!
//! ```text
//! a_d = sqrt(X + Y) / (2 sqrt 2)
//! b_d = sqrt(X - Y) / (2 sqrt 2)
//! X = |a - b|^2 + 2 (1 + |c|^2) d^2,  Y = |(a - b)^2 + 4 c d^2|
//! ```
//!
//! `X - Y` is taken as `(X^2 - Y^2) / (X + Y)` with
//! `X^2 - Y^2 = 4 d^2 |c conj(a - b) - (a - b)|^2 + 4 d^4 (1 - |c|^2)^2`,
//! which is exact where the direct difference cancels and vanishes precisely
//! when `S_d` is normal. Only `|d|` matters, so `d` is taken real here.
//!
//! When `||A||` is not attained, `W(T)` is the union `E_d` of `W(S_t)` over
//! `0 < t < d`, which falls into four cases:
//!
//! 1. `|c| != 1`: the open elliptical disk.
//! 2. `a != b`, `c = (a - b)^2 / |a - b|^2`: an open segment.
//! 3. `a = b`, `|c| = 1`: the open segment `a +- d sqrt(c)`.
//! 4. otherwise: the open disk together with the two boundary points `a`, `b`.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, ToleranceConfig};
use crate::model::{model_norm, GqoParams, OperatorModel};

pub fn s_matrix(params: &GqoParams, d: Complex64) -> Matrix {
    let GqoParams { a, b, c } = *params;
    Matrix::from_rows(&[vec![a, d], vec![c * d.conj(), b]]).expect("2x2 from finite entries")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseData {
    pub focus1: Complex64,
    pub focus2: Complex64,
    pub semi_major: f64,
    pub semi_minor: f64,
    pub center: Complex64,
}

impl EllipseData {
    /// `|z - f1| + |z - f2|`.
    pub fn focal_sum(&self, z: Complex64) -> f64 {
        (z - self.focus1).norm() + (z - self.focus2).norm()
    }

    /// Angle of the major axis; zero for a circle.
    pub fn rotation(&self) -> f64 {
        let axis = self.focus1 - self.focus2;
        if axis.norm() == 0.0 {
            0.0
        } else {
            axis.arg()
        }
    }

    /// Point at parameter `t` of `center + e^{i phi} (a_d cos t + i b_d sin t)`.
    pub fn point_at(&self, t: f64) -> Complex64 {
        let local = Complex64::new(self.semi_major * t.cos(), self.semi_minor * t.sin());
        self.center + Complex64::from_polar(1.0, self.rotation()) * local
    }

    /// The boundary point maximizing `Re(e^{-i theta} z)`.
    pub fn support_point(&self, theta: f64) -> Complex64 {
        let phi = self.rotation();
        let psi = theta - phi;
        let (p, q) = (self.semi_major * psi.cos(), self.semi_minor * psi.sin());
        let h = p.hypot(q);
        if h == 0.0 {
            return self.center;
        }
        let local = Complex64::new(self.semi_major * p / h, self.semi_minor * q / h);
        self.center + Complex64::from_polar(1.0, phi) * local
    }
}

fn check_d(d: f64, strictly_positive: bool) -> Result<()> {
    let ok = d.is_finite() && if strictly_positive { d > 0.0 } else { d >= 0.0 };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "d must be finite and {}, got {d}",
            if strictly_positive { "positive" } else { "nonnegative" }
        )))
    }
}

/// Foci, semi-axes and center of `W(S_d)`.
pub fn ellipse_data(params: &GqoParams, d: f64) -> Result<EllipseData> {
    check_d(d, true)?;
    Ok(ellipse_unchecked(params, d))
}

fn ellipse_unchecked(params: &GqoParams, d: f64) -> EllipseData {
    let GqoParams { a, b, c } = *params;
    let delta = a - b;
    let d2 = d * d;
    let disc = delta * delta + c * 4.0 * d2;
    let root = disc.sqrt();
    let x = delta.norm_sqr() + 2.0 * (1.0 + c.norm_sqr()) * d2;
    let y = disc.norm();
    let sum = x + y;
    let lopsided = 1.0 - c.norm_sqr();
    let x2_minus_y2 = 4.0 * d2 * (c * delta.conj() - delta).norm_sqr() + 4.0 * d2 * d2 * lopsided * lopsided;
    let scale = 1.0 / (2.0 * SQRT_2);
    let semi_minor = if sum > 0.0 { scale * (x2_minus_y2 / sum).sqrt() } else { 0.0 };
    EllipseData {
        focus1: (a + b + root) * 0.5,
        focus2: (a + b - root) * 0.5,
        semi_major: scale * sum.sqrt(),
        semi_minor,
        center: (a + b) * 0.5,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Degeneracy {
    NonDegenerate,
    SegTypeEqualDiag,
    SegTypeAligned,
}

/// Classification predicates with the distance of each to its threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Predicates {
    /// `||c| - 1|`.
    pub unit_c: f64,
    /// `|a - b| / max(1, |a|, |b|)`.
    pub equal_diag: f64,
    /// `|c - (a - b)^2 / |a - b|^2|`, infinite when `a = b`.
    pub aligned: f64,
}

impl Predicates {
    pub fn of(params: &GqoParams) -> Self {
        let GqoParams { a, b, c } = *params;
        let delta = a - b;
        let aligned = if delta.norm() == 0.0 {
            f64::INFINITY
        } else {
            (c - delta * delta / delta.norm_sqr()).norm()
        };
        Self {
            unit_c: (c.norm() - 1.0).abs(),
            equal_diag: delta.norm() / 1f64.max(a.norm()).max(b.norm()),
            aligned,
        }
    }

    pub fn is_unit_c(&self, eq_tol: f64) -> bool {
        self.unit_c <= eq_tol
    }

    pub fn is_equal_diag(&self, eq_tol: f64) -> bool {
        self.equal_diag <= eq_tol
    }

    pub fn is_aligned(&self, eq_tol: f64) -> bool {
        self.aligned <= eq_tol
    }
}

/// Whether `W(S_d)` is a segment for `d > 0`; independent of `d`.
pub fn classify_degeneracy(params: &GqoParams, cfg: &ToleranceConfig) -> Degeneracy {
    let p = Predicates::of(params);
    if p.is_equal_diag(cfg.eq_tol) {
        if p.is_unit_c(cfg.eq_tol) {
            Degeneracy::SegTypeEqualDiag
        } else {
            Degeneracy::NonDegenerate
        }
    } else if p.is_aligned(cfg.eq_tol) {
        Degeneracy::SegTypeAligned
    } else {
        Degeneracy::NonDegenerate
    }
}

/// `S_d` is normal iff `|c| = 1` and `c conj(a - b) = a - b`.
pub fn is_normal_sd(params: &GqoParams, cfg: &ToleranceConfig) -> bool {
    let GqoParams { a, b, c } = *params;
    let delta = a - b;
    let p = Predicates::of(params);
    p.is_unit_c(cfg.eq_tol)
        && (p.is_equal_diag(cfg.eq_tol) || (c * delta.conj() - delta).norm() <= cfg.eq_tol * delta.norm())
}

/// Which of the four `E_d` cases the scalars fall into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnionCase {
    /// `|c| != 1`.
    OpenDisk,
    /// `a != b`, `c = (a - b)^2 / |a - b|^2`.
    OpenSegmentAligned,
    /// `a = b`, `|c| = 1`.
    OpenSegmentEqualDiag,
    /// `a != b`, `|c| = 1`, not aligned.
    #[serde(rename = "interior_plus_ab")]
    InteriorPlusAB,
}

pub fn union_case(params: &GqoParams, cfg: &ToleranceConfig) -> UnionCase {
    match classify_degeneracy(params, cfg) {
        Degeneracy::SegTypeAligned => UnionCase::OpenSegmentAligned,
        Degeneracy::SegTypeEqualDiag => UnionCase::OpenSegmentEqualDiag,
        Degeneracy::NonDegenerate => {
            if Predicates::of(params).is_unit_c(cfg.eq_tol) {
                UnionCase::InteriorPlusAB
            } else {
                UnionCase::OpenDisk
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Disk(EllipseData),
    Segment { end1: Complex64, end2: Complex64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Closure {
    Closed,
    Open,
    #[serde(rename = "interior_plus_ab")]
    InteriorPlusAB { a: Complex64, b: Complex64 },
    ClosedSegment,
    OpenSegment,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRegion")]
pub struct RegionDescriptor {
    shape: Shape,
    closure: Closure,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRegion {
    shape: Shape,
    closure: Closure,
}

impl TryFrom<RawRegion> for RegionDescriptor {
    type Error = Error;

    fn try_from(raw: RawRegion) -> Result<Self> {
        Self::new(raw.shape, raw.closure)
    }
}

impl RegionDescriptor {
    pub fn new(shape: Shape, closure: Closure) -> Result<Self> {
        let finite = |z: Complex64| z.re.is_finite() && z.im.is_finite();
        let shape_ok = match shape {
            Shape::Disk(e) => {
                [e.focus1, e.focus2, e.center].into_iter().all(finite)
                    && e.semi_minor.is_finite()
                    && e.semi_minor >= 0.0
                    && e.semi_major >= e.semi_minor
            }
            Shape::Segment { end1, end2 } => finite(end1) && finite(end2),
        };
        if !shape_ok {
            return Err(Error::InvalidParameter("malformed region shape".into()));
        }
        match (shape, closure) {
            (Shape::Disk(_), Closure::Closed | Closure::Open) => {}
            (Shape::Disk(e), Closure::InteriorPlusAB { a, b }) => {
                let band = ToleranceConfig::default().geom_tol * (1.0 + e.center.norm() + e.semi_major);
                for p in [a, b] {
                    if !finite(p) || (e.focal_sum(p) - 2.0 * e.semi_major).abs() > band {
                        return Err(Error::InvalidParameter(
                            "exceptional points of an interior-plus-points region must lie on the ellipse".into(),
                        ));
                    }
                }
            }
            (Shape::Segment { .. }, Closure::ClosedSegment | Closure::OpenSegment) => {}
            _ => {
                return Err(Error::InvalidParameter("closure does not match region shape".into()));
            }
        }
        Ok(Self { shape, closure })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn closure(&self) -> &Closure {
        &self.closure
    }

    /// Largest modulus of a point in the region, a natural size for
    /// tolerances.
    pub fn scale(&self) -> f64 {
        match self.shape {
            Shape::Disk(e) => e.center.norm() + e.semi_major,
            Shape::Segment { end1, end2 } => end1.norm().max(end2.norm()),
        }
    }

    pub fn is_closed(&self) -> bool {
        matches!(self.closure, Closure::Closed | Closure::ClosedSegment)
    }

    /// The same shape with its closure.
    pub fn closed(&self) -> Self {
        let closure = match self.shape {
            Shape::Disk(_) => Closure::Closed,
            Shape::Segment { .. } => Closure::ClosedSegment,
        };
        Self { shape: self.shape, closure }
    }
}

fn segment(end1: Complex64, end2: Complex64, closed: bool) -> RegionDescriptor {
    RegionDescriptor {
        shape: Shape::Segment { end1, end2 },
        closure: if closed { Closure::ClosedSegment } else { Closure::OpenSegment },
    }
}

fn degenerate_endpoints(params: &GqoParams, d: f64, kind: Degeneracy) -> (Complex64, Complex64) {
    let GqoParams { a, b, c } = *params;
    match kind {
        Degeneracy::SegTypeEqualDiag => {
            let step = c.sqrt() * d;
            (a + step, a - step)
        }
        Degeneracy::SegTypeAligned => {
            let delta = a - b;
            let k = 1.0 / delta.norm_sqr();
            let stretch = delta * (1.0 + 4.0 * k * d * d).sqrt();
            ((a + b + stretch) * 0.5, (a + b - stretch) * 0.5)
        }
        Degeneracy::NonDegenerate => unreachable!("only called for segments"),
    }
}

/// `W(S_d)`.
pub fn closed_region(params: &GqoParams, d: f64, cfg: &ToleranceConfig) -> Result<RegionDescriptor> {
    check_d(d, false)?;
    if d == 0.0 {
        return Ok(segment(params.a, params.b, true));
    }
    Ok(match classify_degeneracy(params, cfg) {
        Degeneracy::NonDegenerate => RegionDescriptor {
            shape: Shape::Disk(ellipse_unchecked(params, d)),
            closure: Closure::Closed,
        },
        kind => {
            let (e1, e2) = degenerate_endpoints(params, d, kind);
            segment(e1, e2, true)
        }
    })
}

/// `W(S_d)` for a complex `d`; only `|d|` enters.
pub fn closed_region_complex(params: &GqoParams, d: Complex64, cfg: &ToleranceConfig) -> Result<RegionDescriptor> {
    closed_region(params, d.norm(), cfg)
}

/// `E_d`, the union of `W(S_t)` over `0 < t < d`.
pub fn open_union_region(params: &GqoParams, d: f64, cfg: &ToleranceConfig) -> Result<RegionDescriptor> {
    check_d(d, true)?;
    let closed = closed_region(params, d, cfg)?;
    let closure = match union_case(params, cfg) {
        UnionCase::OpenDisk => Closure::Open,
        UnionCase::OpenSegmentAligned | UnionCase::OpenSegmentEqualDiag => Closure::OpenSegment,
        UnionCase::InteriorPlusAB => Closure::InteriorPlusAB {
            a: params.a,
            b: params.b,
        },
    };
    Ok(RegionDescriptor {
        shape: closed.shape,
        closure,
    })
}

/// `W(T)`: `W(S_d)` when `||A|| = d` is attained, `E_d` otherwise, and the
/// closed segment `[a, b]` when `A = 0`.
pub fn gqo_numerical_range(
    params: &GqoParams,
    model: &OperatorModel,
    cfg: &ToleranceConfig,
) -> Result<RegionDescriptor> {
    if model.is_zero() {
        return Ok(segment(params.a, params.b, true));
    }
    let norm = model_norm(model, cfg)?;
    if norm.attained {
        closed_region(params, norm.value, cfg)
    } else {
        open_union_region(params, norm.value, cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Inside,
    OnBoundaryIncluded,
    OnBoundaryExcluded,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub value: Membership,
    pub boundary_distance: f64,
}

impl MembershipVerdict {
    pub fn is_member(&self) -> bool {
        matches!(self.value, Membership::Inside | Membership::OnBoundaryIncluded)
    }
}

fn distance_to_segment(z: Complex64, p: Complex64, q: Complex64) -> f64 {
    let dir = q - p;
    let len2 = dir.norm_sqr();
    if len2 == 0.0 {
        return (z - p).norm();
    }
    let t = ((z - p) * dir.conj()).re / len2;
    (z - (p + dir * t.clamp(0.0, 1.0))).norm()
}

/// Three-valued membership with a boundary band of width `cfg.geom_tol`.
///
/// For a disk the boundary distance is the focal-sum defect
/// `||z - f1| + |z - f2| - 2 a_d|`. For a segment, the endpoints are its
/// boundary: points within the band of the segment are `Inside` unless they
/// are within the band of an endpoint.
pub fn membership(region: &RegionDescriptor, z: Complex64, cfg: &ToleranceConfig) -> MembershipVerdict {
    let tol = cfg.geom_tol;
    match region.shape {
        Shape::Disk(e) => {
            let signed = e.focal_sum(z) - 2.0 * e.semi_major;
            let boundary_distance = signed.abs();
            let value = if boundary_distance <= tol {
                let included = match region.closure {
                    Closure::Closed => true,
                    Closure::InteriorPlusAB { a, b } => (z - a).norm() <= tol || (z - b).norm() <= tol,
                    _ => false,
                };
                if included {
                    Membership::OnBoundaryIncluded
                } else {
                    Membership::OnBoundaryExcluded
                }
            } else if signed < 0.0 {
                Membership::Inside
            } else {
                Membership::Outside
            };
            MembershipVerdict { value, boundary_distance }
        }
        Shape::Segment { end1, end2 } => {
            let off = distance_to_segment(z, end1, end2);
            if off > tol {
                return MembershipVerdict {
                    value: Membership::Outside,
                    boundary_distance: off,
                };
            }
            let to_end = (z - end1).norm().min((z - end2).norm());
            let value = if to_end <= tol {
                if region.is_closed() {
                    Membership::OnBoundaryIncluded
                } else {
                    Membership::OnBoundaryExcluded
                }
            } else {
                Membership::Inside
            };
            MembershipVerdict {
                value,
                boundary_distance: to_end,
            }
        }
    }
}

/// Euclidean distance from `z` to the closure of the region; zero inside.
pub fn outward_distance(region: &RegionDescriptor, z: Complex64) -> f64 {
    match region.shape {
        Shape::Segment { end1, end2 } => distance_to_segment(z, end1, end2),
        Shape::Disk(e) => {
            if e.focal_sum(z) <= 2.0 * e.semi_major {
                return 0.0;
            }
            let local = (z - e.center) * Complex64::from_polar(1.0, -e.rotation());
            let (x, y) = (local.re.abs(), local.im.abs());
            let (p, q) = (e.semi_major, e.semi_minor);
            // The nearest point is (p^2 x / (s + p^2), q^2 y / (s + q^2)) where
            // s > 0 solves F(s) = 0; F decreases and changes sign on [0, hi].
            let f = |s: f64| (p * x / (s + p * p)).powi(2) + (q * y / (s + q * q)).powi(2) - 1.0;
            let (mut lo, mut hi) = (0.0, (p * p * x * x + q * q * y * y).sqrt());
            if f(lo) <= 0.0 {
                return 0.0;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if f(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let s = 0.5 * (lo + hi);
            let near = Complex64::new(p * p * x / (s + p * p), q * q * y / (s + q * q));
            (Complex64::new(x, y) - near).norm()
        }
    }
}

/// `n >= 2` points on the boundary curve: uniform in the ellipse parameter,
/// or evenly spaced along a segment including both endpoints.
pub fn boundary_points(region: &RegionDescriptor, n: usize) -> Result<Vec<Complex64>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 boundary points, got {n}")));
    }
    Ok(match region.shape {
        Shape::Disk(e) => (0..n).map(|j| e.point_at(2.0 * PI * j as f64 / n as f64)).collect(),
        Shape::Segment { end1, end2 } => (0..n)
            .map(|j| {
                let t = j as f64 / (n - 1) as f64;
                end1 + (end2 - end1) * t
            })
            .collect(),
    })
}

/// Extreme points in the directions `2 pi j / n`, the exact counterpart of a
/// support-function polygon.
pub fn support_points(region: &RegionDescriptor, n: usize) -> Result<Vec<Complex64>> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("need at least 3 directions, got {n}")));
    }
    Ok((0..n)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / n as f64;
            match region.shape {
                Shape::Disk(e) => e.support_point(theta),
                Shape::Segment { end1, end2 } => {
                    let dir = Complex64::from_polar(1.0, -theta);
                    if (dir * end1).re >= (dir * end2).re {
                        end1
                    } else {
                        end2
                    }
                }
            }
        })
        .collect())
}
