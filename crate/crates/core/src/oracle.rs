//! Brute-force checks of predicted numerical ranges.
//!
//! Random unit vectors are normalized standard complex Gaussians drawn from
//! a ChaCha20 stream seeded with a 64-bit integer, so a cloud depends only
//! on `(T, count, seed)`. Boundary polygons come from the support-function
//! method: for each direction `theta` the top eigenvector `x` of the
//! Hermitian part of `e^{-i theta} T` gives the extreme point `<Tx, x>`.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, outward_distance, RegionDescriptor};
use crate::linalg::{self, hermitian_eigen, Matrix, ToleranceConfig};
use crate::model::{GqoParams, OperatorModel};

#[derive(Debug, Clone, PartialEq)]
pub struct SampleCloud {
    pub points: Vec<Complex64>,
    pub seed: u64,
    pub count: usize,
}

/// A unit vector with rotation-invariant distribution.
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    loop {
        let x: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        if let Some(unit) = linalg::normalized(&x) {
            return unit;
        }
    }
}

/// A Haar-distributed unitary from Gram-Schmidt on Gaussian columns.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while columns.len() < n {
        let mut x = random_unit_vector(n, rng);
        for q in &columns {
            let proj = linalg::inner(&x, q);
            for (xi, qi) in x.iter_mut().zip(q) {
                *xi -= proj * qi;
            }
        }
        if let Some(unit) = linalg::normalized(&x).filter(|_| linalg::norm(&x) > 1e-8) {
            columns.push(unit);
        }
    }
    Matrix::from_columns(&columns).expect("n columns of length n")
}

fn check_square(t: &Matrix) -> Result<()> {
    if t.is_square() {
        Ok(())
    } else {
        Err(Error::Dimension(format!("numerical range needs a square matrix, got {}x{}", t.rows(), t.cols())))
    }
}

/// `<Tx, x>` for `count` random unit vectors `x`.
pub fn sample_range(t: &Matrix, count: usize, seed: u64) -> Result<SampleCloud> {
    check_square(t)?;
    if count == 0 {
        return Err(Error::InvalidParameter("sample count must be positive".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let points = (0..count)
        .map(|_| {
            let x = random_unit_vector(t.rows(), &mut rng);
            linalg::inner(&t.matvec(&x), &x)
        })
        .collect();
    Ok(SampleCloud { points, seed, count })
}

/// Counterclockwise convex polygon.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPolygon {
    vertices: Vec<Complex64>,
}

fn cross(o: Complex64, p: Complex64, q: Complex64) -> f64 {
    ((p - o).conj() * (q - o)).im
}

/// Whether the chain `o -> mid -> p` should drop `mid`: a right turn, or a
/// turn within `flat` of straight with `mid` between its neighbours. An
/// almost straight turn that doubles back keeps `mid`; it is the far end of
/// a thin hull.
fn drop_middle(o: Complex64, mid: Complex64, p: Complex64, flat: f64) -> bool {
    let turn = cross(o, mid, p);
    turn <= 0.0 || (turn <= flat && ((mid - o).conj() * (p - mid)).re >= 0.0)
}

impl BoundaryPolygon {
    /// Convex hull of the points, counterclockwise, with collinear and
    /// coincident vertices removed.
    pub fn hull(points: &[Complex64]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("hull of no points".into()));
        }
        let mut pts = points.to_vec();
        pts.sort_by(|p, q| p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im)));
        pts.dedup_by(|p, q| (*p - *q).norm() <= 1e-12);
        if pts.len() <= 2 {
            return Ok(Self { vertices: pts });
        }
        let scale = pts.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let flat = 1e-14 * scale * scale;
        let mut lower: Vec<Complex64> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2 && drop_middle(lower[lower.len() - 2], lower[lower.len() - 1], p, flat) {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<Complex64> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2 && drop_middle(upper[upper.len() - 2], upper[upper.len() - 1], p, flat) {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        lower.dedup_by(|p, q| (*p - *q).norm() <= 1e-12);
        if lower.len() > 1 && (lower[0] - lower[lower.len() - 1]).norm() <= 1e-12 {
            lower.pop();
        }
        Ok(Self { vertices: lower })
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    /// Edges of the closed polyline; a single vertex gives one null edge.
    fn edges(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    fn perimeter(&self) -> f64 {
        self.edges().map(|(p, q)| (q - p).norm()).sum()
    }

    /// At least `count` points along the closed polyline, every vertex
    /// included.
    pub fn resample(&self, count: usize) -> Vec<Complex64> {
        let total = self.perimeter();
        if total == 0.0 {
            return self.vertices.clone();
        }
        let mut out = Vec::with_capacity(count + self.vertices.len());
        for (p, q) in self.edges() {
            let pieces = ((q - p).norm() / total * count as f64).ceil().max(1.0) as usize;
            out.extend((0..pieces).map(|j| p + (q - p) * (j as f64 / pieces as f64)));
        }
        out
    }

    fn distance_to(&self, z: Complex64) -> f64 {
        self.edges()
            .map(|(p, q)| segment_distance(z, p, q))
            .fold(f64::INFINITY, f64::min)
    }
}

fn segment_distance(z: Complex64, p: Complex64, q: Complex64) -> f64 {
    let dir = q - p;
    let len2 = dir.norm_sqr();
    if len2 == 0.0 {
        return (z - p).norm();
    }
    let t = (((z - p) * dir.conj()).re / len2).clamp(0.0, 1.0);
    (z - (p + dir * t)).norm()
}

/// Points resampled per curve in `hausdorff`.
pub const HAUSDORFF_RESAMPLE: usize = 1024;

/// Symmetric Hausdorff distance between the two closed polylines, each
/// resampled at `HAUSDORFF_RESAMPLE` points and measured against the other
/// polyline.
pub fn hausdorff(pa: &BoundaryPolygon, pb: &BoundaryPolygon) -> f64 {
    let one_way = |from: &BoundaryPolygon, to: &BoundaryPolygon| {
        from.resample(HAUSDORFF_RESAMPLE)
            .into_iter()
            .map(|z| to.distance_to(z))
            .fold(0.0, f64::max)
    };
    one_way(pa, pb).max(one_way(pb, pa))
}

/// Extreme points `<T x_theta, x_theta>` for `theta = 2 pi j / angles`, in
/// direction order.
pub fn support_points(t: &Matrix, angles: usize, cfg: &ToleranceConfig) -> Result<Vec<Complex64>> {
    check_square(t)?;
    if angles < 3 {
        return Err(Error::InvalidParameter(format!("need at least 3 angles, got {angles}")));
    }
    let adj = t.adjoint();
    (0..angles)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / angles as f64;
            let rot = Complex64::from_polar(1.0, -theta);
            // (e^{-i theta} T + e^{i theta} T*) / 2
            let herm = (&t.scale(rot * 0.5)) + &adj.scale(rot.conj() * 0.5);
            let (_, x) = hermitian_eigen(&herm, cfg)?.top();
            Ok(linalg::inner(&t.matvec(&x), &x))
        })
        .collect()
}

pub fn support_boundary(t: &Matrix, angles: usize, cfg: &ToleranceConfig) -> Result<BoundaryPolygon> {
    BoundaryPolygon::hull(&support_points(t, angles, cfg)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub samples: usize,
    pub angles: usize,
    pub seed: u64,
    /// Largest Euclidean distance of a Rayleigh sample outside `W(S_d)`.
    pub max_outward_violation: f64,
    /// `geom_tol (1 + scale)`, the allowed violation.
    pub violation_tolerance: f64,
    /// Support polygon against the predicted polygon with the same
    /// directions.
    pub hausdorff_closed: f64,
    /// Support polygon against the predicted boundary sampled uniformly in
    /// the ellipse parameter; includes the polygon's chord error.
    pub hausdorff_dense: f64,
    pub passed: bool,
}

/// Points sampled from the predicted boundary for `hausdorff_dense`.
pub fn dense_boundary_count(angles: usize) -> usize {
    4096.max(8 * angles)
}

/// Samples and support boundary of the assembled `T` against the closed
/// predicted region.
pub fn verify_region(
    params: &GqoParams,
    off: &Matrix,
    cfg: &ToleranceConfig,
    samples: usize,
    angles: usize,
    seed: u64,
) -> Result<VerifyReport> {
    let t = crate::model::assemble_matrix(*params, off).into_block();
    let region = geometry::gqo_numerical_range(params, &OperatorModel::Matrix(off.clone()), cfg)?;
    let cloud = sample_range(&t, samples, seed)?;
    let max_outward_violation = cloud
        .points
        .iter()
        .map(|&z| outward_distance(&region, z))
        .fold(0.0, f64::max);
    let violation_tolerance = cfg.geom_tol * (1.0 + region.scale());

    let polygon = support_boundary(&t, angles, cfg)?;
    let matched = BoundaryPolygon::hull(&geometry::support_points(&region, angles)?)?;
    let dense = BoundaryPolygon::hull(&geometry::boundary_points(&region, dense_boundary_count(angles))?)?;
    Ok(VerifyReport {
        samples,
        angles,
        seed,
        max_outward_violation,
        violation_tolerance,
        hausdorff_closed: hausdorff(&polygon, &matched),
        hausdorff_dense: hausdorff(&polygon, &dense),
        passed: max_outward_violation <= violation_tolerance,
    })
}

/// Closed region of the assembled operator, for callers holding a report.
pub fn predicted_region(params: &GqoParams, off: &Matrix, cfg: &ToleranceConfig) -> Result<RegionDescriptor> {
    geometry::gqo_numerical_range(params, &OperatorModel::Matrix(off.clone()), cfg)
}

/// `re,im` rows with a header line.
pub fn write_csv<W: Write>(out: &mut W, points: &[Complex64]) -> io::Result<()> {
    writeln!(out, "re,im")?;
    for z in points {
        writeln!(out, "{},{}", z.re, z.im)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{closed_region, membership, EllipseData, Shape};

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn one() -> Matrix {
        Matrix::from_real(1, 1, &[1.0]).unwrap()
    }

    #[test]
    fn hermitian_samples_are_real() {
        let t = Matrix::from_real(2, 2, &[0.0, 0.0, 0.0, 1.0]).unwrap();
        let cloud = sample_range(&t, 2000, 7).unwrap();
        assert_eq!(cloud.points.len(), 2000);
        for z in &cloud.points {
            assert!(z.im.abs() < 1e-15 && (-1e-15..=1.0 + 1e-15).contains(&z.re), "{z}");
        }
    }

    #[test]
    fn jordan_samples_in_half_disk() {
        let t = Matrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let cloud = sample_range(&t, 5000, 1).unwrap();
        assert!(cloud.points.iter().all(|z| z.norm() <= 0.5 + 1e-12));
    }

    #[test]
    fn sampling_is_deterministic() {
        let t = Matrix::from_rows(&[vec![c(1.0, 2.0), c(0.0, -1.0)], vec![c(3.0, 0.0), c(-1.0, 0.5)]]).unwrap();
        let first = sample_range(&t, 300, 99).unwrap();
        let second = sample_range(&t, 300, 99).unwrap();
        let bits = |cl: &SampleCloud| cl.points.iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect::<Vec<_>>();
        assert_eq!(bits(&first), bits(&second));
        assert_ne!(bits(&first), bits(&sample_range(&t, 300, 100).unwrap()));
    }

    #[test]
    fn rejects_bad_sampling_input() {
        assert!(matches!(sample_range(&Matrix::zeros(2, 3), 5, 0), Err(Error::Dimension(_))));
        assert!(sample_range(&one(), 0, 0).is_err());
    }

    #[test]
    fn hermitian_support_is_segment() {
        let t = Matrix::from_real(2, 2, &[0.0, 0.0, 0.0, 1.0]).unwrap();
        let poly = support_boundary(&t, 36, &cfg()).unwrap();
        let v = poly.vertices();
        assert_eq!(v.len(), 2, "{v:?}");
        assert!((v[0] - c(0.0, 0.0)).norm() < 1e-14 && (v[1] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn jordan_support_on_circle() {
        let t = Matrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let poly = support_boundary(&t, 360, &cfg()).unwrap();
        assert_eq!(poly.vertices().len(), 360);
        assert!(poly.vertices().iter().all(|z| (z.norm() - 0.5).abs() <= 1e-9));
    }

    #[test]
    fn ellipse_support_matches_prediction() {
        let t = Matrix::from_real(2, 2, &[1.0, 1.0, 0.0, -1.0]).unwrap();
        let poly = support_boundary(&t, 720, &cfg()).unwrap();
        let region = closed_region(&GqoParams::real(1.0, -1.0, 0.0), 1.0, &cfg()).unwrap();
        let matched = BoundaryPolygon::hull(&geometry::support_points(&region, 720).unwrap()).unwrap();
        assert!(hausdorff(&poly, &matched) <= 1e-6);
        // Chord error of the 720-gon: about (a_d^2 / b_d)(1 - cos(pi / 720)).
        let dense = BoundaryPolygon::hull(&geometry::boundary_points(&region, 8192).unwrap()).unwrap();
        let h = hausdorff(&poly, &dense);
        let sag = 2.5 * (1.0 - (PI / 720.0).cos());
        assert!(h <= 1.05 * sag && h >= 0.5 * sag, "{h} vs {sag}");
    }

    #[test]
    fn hausdorff_examples() {
        let square = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)];
        let p = BoundaryPolygon::hull(&square).unwrap();
        assert_eq!(hausdorff(&p, &p), 0.0);
        let shifted = BoundaryPolygon::hull(&square.map(|z| z + 1.0)).unwrap();
        assert!((hausdorff(&p, &shifted) - 1.0).abs() < 1e-12);

        let circle = |r: f64| {
            let e = EllipseData {
                focus1: c(0.0, 0.0),
                focus2: c(0.0, 0.0),
                semi_major: r,
                semi_minor: r,
                center: c(0.0, 0.0),
            };
            let region = RegionDescriptor::new(Shape::Disk(e), geometry::Closure::Closed).unwrap();
            BoundaryPolygon::hull(&geometry::boundary_points(&region, 4096).unwrap()).unwrap()
        };
        assert!((hausdorff(&circle(1.0), &circle(1.1)) - 0.1).abs() <= 1e-3);
    }

    #[test]
    fn hull_is_counterclockwise_and_convex() {
        let pts = [c(0.0, 0.0), c(2.0, 0.0), c(1.0, 0.5), c(2.0, 2.0), c(0.0, 2.0), c(1.0, 1.0), c(2.0, 1.0)];
        let v = BoundaryPolygon::hull(&pts).unwrap().vertices().to_vec();
        assert_eq!(v, vec![c(0.0, 0.0), c(2.0, 0.0), c(2.0, 2.0), c(0.0, 2.0)]);
    }

    #[test]
    fn thin_hull_keeps_both_ends() {
        let e = 1.0 - f64::EPSILON;
        let pts = [c(1.0, 0.0), c(e, e), c(e, -e)];
        let v = BoundaryPolygon::hull(&pts).unwrap().vertices().to_vec();
        assert_eq!(v.len(), 3);
        assert!(v.contains(&c(e, e)) && v.contains(&c(e, -e)));

        let collinear = [c(0.0, 0.0), c(0.0, 1.0), c(1e-17, 0.5), c(0.0, 2.0)];
        let v = BoundaryPolygon::hull(&collinear).unwrap().vertices().to_vec();
        assert!(v.contains(&c(0.0, 0.0)) && v.contains(&c(0.0, 2.0)));
    }

    #[test]
    fn verify_examples() {
        let circle = verify_region(&GqoParams::real(0.0, 0.0, 0.0), &one(), &cfg(), 10_000, 720, 1).unwrap();
        assert!(circle.max_outward_violation <= 1e-9 && circle.passed);
        assert!(circle.hausdorff_closed <= 1e-6, "{}", circle.hausdorff_closed);

        let ellipse = verify_region(&GqoParams::real(1.0, -1.0, 0.0), &one(), &cfg(), 10_000, 720, 2).unwrap();
        assert!(ellipse.max_outward_violation <= 1e-9 && ellipse.passed);
        assert!(ellipse.hausdorff_closed <= 1e-5, "{}", ellipse.hausdorff_closed);

        let p = GqoParams::real(0.0, 2.0, 1.0);
        let seg = verify_region(&p, &one(), &cfg(), 10_000, 720, 3).unwrap();
        assert!(seg.max_outward_violation <= 1e-9);
        let t = crate::model::assemble_matrix(p, &one()).into_block();
        let region = predicted_region(&p, &one(), &cfg()).unwrap();
        for z in sample_range(&t, 10_000, 3).unwrap().points {
            assert!(outward_distance(&region, z) <= 1e-9);
        }
    }

    #[test]
    fn refining_angles_does_not_hurt() {
        let p = GqoParams::new(c(0.3, 1.0), c(-1.0, 0.2), c(0.4, -0.7)).unwrap();
        let a = Matrix::from_real(2, 2, &[1.0, 0.3, -0.2, 0.8]).unwrap();
        let coarse = verify_region(&p, &a, &cfg(), 10, 90, 0).unwrap();
        let fine = verify_region(&p, &a, &cfg(), 10, 1440, 0).unwrap();
        assert!(fine.hausdorff_closed <= coarse.hausdorff_closed + 1e-12);
        assert!(fine.hausdorff_dense <= coarse.hausdorff_dense + 1e-12);
    }

    #[test]
    fn csv_layout() {
        let mut out = Vec::new();
        write_csv(&mut out, &[c(1.0, -0.5), c(0.1, 2.0)]).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "re,im\n1,-0.5\n0.1,2\n");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn scalar() -> impl Strategy<Value = Complex64> {
            (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(x, y)| Complex64::new(x, y))
        }

        fn matrix() -> impl Strategy<Value = Matrix> {
            (1usize..=3, 1usize..=3, proptest::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 9)).prop_map(
                |(m, n, e)| Matrix::new(m, n, e[..m * n].iter().map(|&(x, y)| c(x, y)).collect()).unwrap(),
            )
        }

        fn params() -> impl Strategy<Value = GqoParams> {
            let unit = (0.0..std::f64::consts::TAU).prop_map(|t| Complex64::from_polar(1.0, t));
            (scalar(), scalar(), prop_oneof![scalar(), unit]).prop_map(|(a, b, cc)| GqoParams::new(a, b, cc).unwrap())
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn samples_stay_in_predicted_region(p in params(), a in matrix(), seed in any::<u64>()) {
                let t = crate::model::assemble_matrix(p, &a).into_block();
                let region = predicted_region(&p, &a, &cfg()).unwrap();
                let tol = ToleranceConfig { geom_tol: 1e-9 * (1.0 + region.scale()), ..cfg() };
                for z in sample_range(&t, 2000, seed).unwrap().points {
                    let v = membership(&region, z, &tol);
                    prop_assert_ne!(v.value, geometry::Membership::Outside, "{} {:?}", z, v);
                }
            }

            #[test]
            fn support_boundary_is_unitarily_invariant(n in 2usize..=5, seed in any::<u64>()) {
                let mut rng = ChaCha20Rng::seed_from_u64(seed);
                let t = Matrix::from_columns(&(0..n).map(|_| random_unit_vector(n, &mut rng)).collect::<Vec<_>>()).unwrap();
                let u = random_unitary(n, &mut rng);
                let conj = &(&u.adjoint() * &t) * &u;
                let h = hausdorff(&support_boundary(&t, 120, &cfg()).unwrap(), &support_boundary(&conj, 120, &cfg()).unwrap());
                prop_assert!(h <= 1e-8, "{h}");
            }

            #[test]
            fn unitary_is_unitary(n in 1usize..=6, seed in any::<u64>()) {
                let u = random_unitary(n, &mut ChaCha20Rng::seed_from_u64(seed));
                prop_assert!((&u.adjoint() * &u).max_abs_diff(&Matrix::identity(n)) <= 1e-12);
            }

            #[test]
            fn phase_of_d_leaves_range_unchanged(p in params(), d in 0.0..3.0f64, theta in 0.0..std::f64::consts::TAU) {
                let rotated = geometry::s_matrix(&p, Complex64::from_polar(d, theta));
                let plain = geometry::s_matrix(&p, Complex64::new(d, 0.0));
                let h = hausdorff(&support_boundary(&rotated, 90, &cfg()).unwrap(), &support_boundary(&plain, 90, &cfg()).unwrap());
                prop_assert!(h <= 1e-8 * (1.0 + d + p.a.norm() + p.b.norm()), "{h}");
            }

            #[test]
            fn union_pieces_lie_in_range(p in params(), a in matrix(), seed in any::<u64>()) {
                // Every W(S_t) with t = |<Av, u>| for unit u, v sits inside W(T).
                let mut rng = ChaCha20Rng::seed_from_u64(seed);
                let region = predicted_region(&p, &a, &cfg()).unwrap();
                let tol = ToleranceConfig { geom_tol: 1e-9 * (1.0 + region.scale()), ..cfg() };
                for _ in 0..4 {
                    let u = random_unit_vector(a.rows(), &mut rng);
                    let v = random_unit_vector(a.cols(), &mut rng);
                    let t = linalg::inner(&a.matvec(&v), &u).norm();
                    let s = geometry::s_matrix(&p, Complex64::new(t, 0.0));
                    let sub_seed: u64 = rand::Rng::random(&mut rng);
                    for z in sample_range(&s, 500, sub_seed).unwrap().points {
                        prop_assert_ne!(membership(&region, z, &tol).value, geometry::Membership::Outside);
                    }
                }
            }
        }
    }
}
