//! Thickness thresholds below which the reduced densities are convex in
//! their polyconvexity variables, and numerical convexity checks.

use nalgebra::{DMatrix, Matrix3, SMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::{ConstantsMode, Material, Model, ShellCoefficients};
use crate::linalg::Mat2;
use crate::reference::{RefPoint, ReferenceField};

/// Which polynomial `g(t)` to use for the root-based thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polynomial {
    /// Coefficients obtained by expanding the defining inequality.
    Derived,
    /// Coefficients in their literal form (kept for comparison).
    Literal,
}

fn sqrt_bound(num: f64, max: f64) -> f64 {
    if max > 0.0 { (num / max).sqrt() } else { f64::INFINITY }
}

/// Coefficients `[g₀, g₁, g₂, g₃]` (ascending powers of `t = h²`) of the
/// cubic whose smallest positive root bounds the mixed `(E,G)` coupling.
pub fn full_shell_cubic(mean: f64, gauss: f64, c: f64, variant: Polynomial) -> [f64; 4] {
    let (ah, k) = (mean.abs(), gauss);
    let ahk = (mean * gauss).abs();
    let c2 = match variant {
        Polynomial::Derived => c * c,
        Polynomial::Literal => 0.0,
    };
    // the literal version has C in place of C² in the t², t³ terms
    let cq = match variant {
        Polynomial::Derived => c * c,
        Polynomial::Literal => c,
    };
    [
        1.0 / 3.0,
        -(7.0 * k / 90.0 + ah * ah / 9.0 + c * ah / 9.0 + c2 / 36.0),
        k * k / 120.0 - c * ahk / 120.0 + k * ah * c / 60.0 + cq * k / 120.0,
        -k.powi(3) / 1600.0 + c * ahk * k / 800.0 - cq * k * k / 1600.0,
    ]
}

/// Coefficients `[g₀, g₁, g₂]` of the quadratic bounding the 3×3 minor of `∇²F`.
pub fn curvature_quadratic(mean: f64, gauss: f64, variant: Polynomial) -> [f64; 3] {
    let kc = match variant {
        Polynomial::Derived => gauss / 1800.0,
        Polynomial::Literal => gauss / 450.0,
    };
    [2.0 / 135.0, kc - mean * mean / 90.0, -gauss * gauss / 2400.0]
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * t + a)
}

/// Smallest positive root of a polynomial of degree ≤ 3 (ascending
/// coefficients), or `+∞`. Leading coefficients that are negligible
/// relative to the others are dropped.
pub fn smallest_positive_root(coeffs: &[f64]) -> f64 {
    let scale = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    if scale == 0.0 {
        return f64::INFINITY;
    }
    let mut deg = coeffs.len() - 1;
    while deg > 0 && coeffs[deg].abs() <= 1e-14 * scale {
        deg -= 1;
    }
    let c = &coeffs[..=deg];
    match deg {
        0 => f64::INFINITY,
        1 => {
            let t = -c[0] / c[1];
            if t > 0.0 { t } else { f64::INFINITY }
        }
        2 => {
            let disc = c[1] * c[1] - 4.0 * c[2] * c[0];
            if disc < 0.0 {
                return f64::INFINITY;
            }
            let q = -0.5 * (c[1] + c[1].signum() * disc.sqrt());
            let mut roots = [q / c[2], if q != 0.0 { c[0] / q } else { f64::NAN }];
            roots.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Greater));
            roots.into_iter().find(|t| *t > 0.0).unwrap_or(f64::INFINITY)
        }
        _ => {
            // monotone pieces between critical points, then bisection
            let hi = 1.0 + c[..3].iter().map(|a| (a / c[3]).abs()).fold(0.0, f64::max);
            let dq = [c[1], 2.0 * c[2], 3.0 * c[3]];
            let mut cuts = vec![0.0];
            let disc = dq[1] * dq[1] - 4.0 * dq[2] * dq[0];
            if disc >= 0.0 {
                let s = disc.sqrt();
                let mut crit = [(-dq[1] - s) / (2.0 * dq[2]), (-dq[1] + s) / (2.0 * dq[2])];
                crit.sort_by(|a, b| a.partial_cmp(b).unwrap());
                cuts.extend(crit.iter().filter(|t| **t > 0.0 && **t < hi));
            }
            cuts.push(hi);
            for w in cuts.windows(2) {
                let (mut a, mut b) = (w[0], w[1]);
                let (fa, fb) = (horner(c, a), horner(c, b));
                if fa == 0.0 && a > 0.0 {
                    return a;
                }
                if fb.abs() <= 1e-15 * scale {
                    return b;
                }
                if fa.signum() == fb.signum() {
                    continue;
                }
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if horner(c, m).signum() == fa.signum() {
                        a = m;
                    } else {
                        b = m;
                    }
                    if b - a <= 1e-15 * b {
                        break;
                    }
                }
                // one Newton polish step
                let m = 0.5 * (a + b);
                let d = horner(&dq, m);
                let polished = if d != 0.0 { m - horner(c, m) / d } else { m };
                return if (polished - m).abs() <= (b - a) { polished } else { m };
            }
            f64::INFINITY
        }
    }
}

/// A threshold and where on the grid it is attained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Located {
    pub value: f64,
    pub at: Option<(f64, f64)>,
}

impl Located {
    fn infinite() -> Self {
        Self { value: f64::INFINITY, at: None }
    }

    fn min_over(points: &[RefPoint], f: impl Fn(&RefPoint) -> f64) -> Self {
        let mut best = Self::infinite();
        for p in points {
            let v = f(p);
            if v < best.value {
                best = Self { value: v, at: Some(p.x) };
            }
        }
        best
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FullShellThreshold {
    pub h1_prime: f64,
    pub h1_second: Located,
    pub h1: f64,
    pub h2: f64,
    pub h0: f64,
    /// `h₁″` from the literal cubic, for comparison.
    pub h1_second_literal: f64,
}

pub fn full_shell_threshold(r: &ReferenceField) -> FullShellThreshold {
    let h1_prime = sqrt_bound(20.0 / 3.0, r.max_gauss);
    let second = |variant| {
        Located::min_over(&r.points, |p| smallest_positive_root(&full_shell_cubic(p.mean, p.gauss, r.c_y0, variant)))
    };
    let mut h1_second = second(Polynomial::Derived);
    h1_second.value = h1_second.value.sqrt();
    let h1 = h1_prime.min(h1_second.value);
    let h2 = h1_prime;
    FullShellThreshold {
        h1_prime,
        h1_second,
        h1,
        h2,
        h0: h1.min(h2),
        h1_second_literal: second(Polynomial::Literal).value.sqrt(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedShellThreshold {
    pub max_t: f64,
    pub h0: Located,
}

pub fn truncated_shell_threshold(r: &ReferenceField) -> TruncatedShellThreshold {
    let mut worst = Located { value: 0.0, at: None };
    for p in &r.points {
        let t = r.t_value(p);
        if t > worst.value {
            worst = Located { value: t, at: Some(p.x) };
        }
    }
    let h0 = Located { value: sqrt_bound(1.0, worst.value), at: worst.at };
    TruncatedShellThreshold { max_t: worst.value, h0 }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureThreshold {
    pub h1: f64,
    pub h2_prime: f64,
    pub h2_second: f64,
    pub h2: f64,
    pub h3: Located,
    pub h0: f64,
    /// `h₃` from the literal quadratic, for comparison.
    pub h3_literal: f64,
}

pub fn curvature_threshold(r: &ReferenceField) -> CurvatureThreshold {
    let h1 = sqrt_bound(12.0, r.max_neg_gauss);
    let h2_prime = sqrt_bound(16.0 / 3.0, r.max_neg_gauss);
    let h2_second = sqrt_bound(20.0 / 3.0, r.max_gauss);
    let h2 = h1.min(h2_prime).min(h2_second);
    let third = |variant| {
        Located::min_over(&r.points, |p| smallest_positive_root(&curvature_quadratic(p.mean, p.gauss, variant)))
    };
    let mut h3 = third(Polynomial::Derived);
    h3.value = h3.value.sqrt();
    CurvatureThreshold {
        h1,
        h2_prime,
        h2_second,
        h2,
        h3,
        h0: h3.value.min(h2),
        h3_literal: third(Polynomial::Literal).value.sqrt(),
    }
}

/// Hessian of the quadratic `F(r, X, Y)` of the Taylor volumetric term.
pub fn hessian_f(lambda: f64, area: f64, h: f64, mean: f64, gauss: f64) -> Matrix3<f64> {
    let (h3, h5) = (h.powi(3), h.powi(5));
    let m = Matrix3::new(
        2.0 * h + gauss * h3 / 6.0,
        0.0,
        h3 / 6.0,
        0.0,
        2.0 * h3 / 3.0 + h5 / 40.0 * (16.0 * mean * mean - 4.0 * gauss),
        -mean * h5 / 10.0,
        h3 / 6.0,
        -mean * h5 / 10.0,
        h5 / 40.0,
    );
    m * (0.25 * lambda * area)
}

/// Principal minors `[m₁₁, m₂₂, m₃₃, M₁₂, M₁₃, M₂₃, det]`.
pub fn principal_minors(m: &Matrix3<f64>) -> [f64; 7] {
    let minor = |i: usize, j: usize| m[(i, i)] * m[(j, j)] - m[(i, j)] * m[(j, i)];
    [m[(0, 0)], m[(1, 1)], m[(2, 2)], minor(0, 1), minor(0, 2), minor(1, 2), m.determinant()]
}

pub type Mat12 = SMatrix<f64, 12, 12>;

/// `(E, G)` as a flat 12-vector, `E = z[0..6]`, `G = z[6..12]`, row-major 3×2.
fn gram(z: &[f64; 12], a: usize, b: usize) -> Mat2<f64> {
    let e = |k: usize, i: usize, j: usize| z[6 * k + 2 * i + j];
    let mut q = Mat2::zero();
    for r in 0..2 {
        for s in 0..2 {
            q.0[r][s] = (0..3).map(|i| e(a, i, r) * e(b, i, s)).sum();
        }
    }
    q
}

/// The quadratic part of the shell density as a function of `(E, G) = (∇m, ∇n)`.
pub fn shell_form(rp: &RefPoint, coeffs: &ShellCoefficients, mu: f64, z: &[f64; 12]) -> f64 {
    let (ee, eg, gg) = (gram(z, 0, 0), gram(z, 0, 1), gram(z, 1, 1));
    let c = &coeffs.c;
    0.5 * mu
        * (c[0] * rp.f0(&ee) + c[1] * rp.f0(&eg) + c[2] * rp.f0(&gg) + c[3] * rp.f1(&ee) + c[4] * rp.f1(&eg)
            + c[5] * rp.f2(&ee)
            + c[6] * rp.f2(&eg)
            + c[7] * rp.f2(&gg))
}

/// Exact Hessian of [`shell_form`] by polarization.
pub fn shell_hessian(rp: &RefPoint, coeffs: &ShellCoefficients, mu: f64) -> Mat12 {
    let q = |z: &[f64; 12]| shell_form(rp, coeffs, mu, z);
    let unit = |i: usize| {
        let mut z = [0.0; 12];
        z[i] = 1.0;
        z
    };
    let mut h = Mat12::zeros();
    for i in 0..12 {
        h[(i, i)] = 2.0 * q(&unit(i));
        for j in 0..i {
            let mut z = unit(i);
            z[j] = 1.0;
            let v = q(&z) - q(&unit(i)) - q(&unit(j));
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    h
}

/// Minimum eigenvalue of a symmetric matrix and its spectral scale.
pub fn min_eigen<const N: usize>(m: SMatrix<f64, N, N>) -> (f64, f64) {
    let d = DMatrix::from_column_slice(N, N, m.as_slice());
    let e = SymmetricEigen::new(d).eigenvalues;
    let min = e.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = e.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    (min, scale)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShellDensity {
    /// Fifth-order density (Models I and III).
    Full,
    /// Third-order density (Model II).
    Truncated,
}

/// Result of Hessian sampling: worst normalized eigenvalue and where.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexitySample {
    pub min_eigenvalue: f64,
    pub scale: f64,
    pub at: (f64, f64),
    /// Smallest `dᵀ H d / |d|²` over random directions, by second differences.
    pub min_rayleigh: f64,
}

impl ConvexitySample {
    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue >= -tol * self.scale && self.min_rayleigh >= -tol * self.scale.max(1e-300) * 10.0
    }
}

/// Samples the shell-density Hessian at `n_samples` random grid points and
/// random `(E, G)` base points and directions.
pub fn sample_convexity(density: ShellDensity, r: &ReferenceField, mu: f64, h: f64, n_samples: usize, seed: u64) -> ConvexitySample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = ConvexitySample { min_eigenvalue: f64::INFINITY, scale: 0.0, at: (0.0, 0.0), min_rayleigh: f64::INFINITY };
    let mut cache: Vec<Option<Mat12>> = vec![None; r.points.len()];
    for _ in 0..n_samples {
        let p = rng.gen_range(0..r.points.len());
        let rp = &r.points[p];
        let coeffs = match density {
            ShellDensity::Full => ShellCoefficients::full(h, rp.mean, rp.gauss),
            ShellDensity::Truncated => ShellCoefficients::truncated(h, rp.mean, rp.gauss, false),
        };
        let hess = *cache[p].get_or_insert_with(|| shell_hessian(rp, &coeffs, mu));
        let (min, scale) = min_eigen(hess);
        worst.scale = worst.scale.max(scale);
        if min < worst.min_eigenvalue {
            worst.min_eigenvalue = min;
            worst.at = rp.x;
        }
        // second difference along a random direction at a random base point
        let z0: [f64; 12] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let d: [f64; 12] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let dn: f64 = d.iter().map(|v| v * v).sum();
        let f = |s: f64| {
            let z: [f64; 12] = std::array::from_fn(|i| z0[i] + s * d[i]);
            shell_form(rp, &coeffs, mu, &z)
        };
        let rq = (f(1.0) - 2.0 * f(0.0) + f(-1.0)) / dn;
        worst.min_rayleigh = worst.min_rayleigh.min(rq);
    }
    worst
}

/// Convexity thresholds for all models and the verdict for a thickness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub chart: String,
    pub h: f64,
    pub h_geom: f64,
    pub margin: f64,
    pub full_shell: FullShellThreshold,
    pub truncated_shell: TruncatedShellThreshold,
    pub curvature: CurvatureThreshold,
    pub safety: f64,
    /// Effective `h_max` for Models I, II, III.
    pub h_max: [f64; 3],
    pub pass: [bool; 3],
}

impl AdmissibilityReport {
    pub fn new(r: &ReferenceField, h: f64, safety: f64) -> Self {
        let geom = r.check_thickness(h);
        let full = full_shell_threshold(r);
        let truncated = truncated_shell_threshold(r);
        let curv = curvature_threshold(r);
        let h_max = [
            geom.h_geom.min(safety * full.h0),
            geom.h_geom.min(safety * truncated.h0.value),
            geom.h_geom.min(safety * full.h0.min(curv.h0)),
        ];
        Self {
            chart: r.name.clone(),
            h,
            h_geom: geom.h_geom,
            margin: geom.margin,
            full_shell: full,
            truncated_shell: truncated,
            curvature: curv,
            safety,
            h_max,
            pass: h_max.map(|m| h < m),
        }
    }

    pub fn index(model: Model) -> usize {
        model.number() as usize - 1
    }

    pub fn passes(&self, model: Model) -> bool {
        self.pass[Self::index(model)]
    }

    pub fn reason(&self, model: Model) -> String {
        if self.h >= self.h_geom {
            format!("h*max|kappa| = {} >= 2", self.margin)
        } else {
            format!("model {model} convexity threshold {}", self.h_max[Self::index(model)])
        }
    }

    /// `(name, value)` rows for text and CSV output.
    pub fn rows(&self) -> Vec<(String, f64)> {
        let l = |s: &str| s.to_string();
        vec![
            (l("h"), self.h),
            (l("margin"), self.margin),
            (l("h_geom"), self.h_geom),
            (l("full_shell.h1_prime"), self.full_shell.h1_prime),
            (l("full_shell.h1_second"), self.full_shell.h1_second.value),
            (l("full_shell.h1"), self.full_shell.h1),
            (l("full_shell.h2"), self.full_shell.h2),
            (l("full_shell.h0"), self.full_shell.h0),
            (l("full_shell.h1_second_literal"), self.full_shell.h1_second_literal),
            (l("truncated_shell.max_t"), self.truncated_shell.max_t),
            (l("truncated_shell.h0"), self.truncated_shell.h0.value),
            (l("curvature.h1"), self.curvature.h1),
            (l("curvature.h2_prime"), self.curvature.h2_prime),
            (l("curvature.h2_second"), self.curvature.h2_second),
            (l("curvature.h2"), self.curvature.h2),
            (l("curvature.h3"), self.curvature.h3.value),
            (l("curvature.h0"), self.curvature.h0),
            (l("curvature.h3_literal"), self.curvature.h3_literal),
            (l("model1.h_max"), self.h_max[0]),
            (l("model2.h_max"), self.h_max[1]),
            (l("model3.h_max"), self.h_max[2]),
        ]
    }
}

/// Checks the selected model before minimization.
pub fn require_admissible(report: &AdmissibilityReport, model: Model) -> crate::error::Result<()> {
    if report.passes(model) {
        Ok(())
    } else {
        Err(crate::error::ShellError::InadmissibleThickness {
            h: report.h,
            h_max: report.h_max[AdmissibilityReport::index(model)],
            reason: report.reason(model),
        })
    }
}

/// Shell densities of a material at its thickness, exposed for diagnostics.
pub fn model_density(model: Model) -> ShellDensity {
    match model {
        Model::II => ShellDensity::Truncated,
        _ => ShellDensity::Full,
    }
}

/// Second difference of `x ↦ −log x` and `x ↦ x²` along random segments of
/// the positive axis; both must be nonnegative.
pub fn sample_curv_convexity(mat: &Material, mode: ConstantsMode, n: usize, seed: u64) -> f64 {
    let cfg = crate::energy::EnergyConfig { material: *mat, model: Model::I, constants: mode };
    let c_log = cfg.log_coefficient();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..n {
        let x = rng.gen_range(0.01..10.0);
        let d = rng.gen_range(1e-3..0.5) * x;
        let f = |x: f64| c_log * x.ln() + 0.25 * mat.lambda * x * x;
        worst = worst.min(f(x + d) - 2.0 * f(x) + f(x - d));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::chart::{CatalogChart, Chart};
    use crate::geometry::grid::Grid;

    fn reference(chart: &CatalogChart, h: f64) -> ReferenceField {
        let grid = Grid::new(chart.domain(), 9, 9).unwrap();
        ReferenceField::from_chart(chart, &grid, h).unwrap()
    }

    #[test]
    fn root_finder_cases() {
        assert!((smallest_positive_root(&[-2.0, 1.0]) - 2.0).abs() < 1e-15);
        assert_eq!(smallest_positive_root(&[1.0, 1.0]), f64::INFINITY);
        assert!((smallest_positive_root(&[6.0, -5.0, 1.0]) - 2.0).abs() < 1e-14);
        // (t−1)(t−2)(t−3)
        assert!((smallest_positive_root(&[-6.0, 11.0, -6.0, 1.0]) - 1.0).abs() < 1e-13);
        // (t+1)(t−0.5)(t−4) with a sign flip
        let c = [2.0, -2.5, -3.5, 1.0].map(|v: f64| -v);
        assert!((smallest_positive_root(&c) - 0.5).abs() < 1e-13);
        assert_eq!(smallest_positive_root(&[1.0 / 3.0, 0.0, 0.0, 0.0]), f64::INFINITY);
        // negligible cubic term drops to the quadratic
        assert!((smallest_positive_root(&[6.0, -5.0, 1.0, 1e-20]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn plate_thresholds_are_infinite() {
        let r = reference(&CatalogChart::plate(), 1.0);
        let rep = AdmissibilityReport::new(&r, 100.0, 1.0);
        for (name, v) in rep.rows() {
            if name.contains('.') && name != "truncated_shell.max_t" || name.contains("h_max") || name == "h_geom" {
                assert_eq!(v, f64::INFINITY, "{name}");
            }
        }
        assert!(rep.pass.iter().all(|p| *p));
    }

    #[test]
    fn sphere_thresholds() {
        let r = reference(&CatalogChart::sphere_cap(1.0, 0.5), 0.1);
        let full = full_shell_threshold(&r);
        assert!((full.h1_prime - (20.0f64 / 3.0).sqrt()).abs() < 1e-9);
        let t: f64 = 1.0 / 12.0 + (1.0 + 2f64.sqrt() / 2.0).powi(2) / 3.0;
        let truncated = truncated_shell_threshold(&r);
        assert!((truncated.h0.value - 1.0 / t.sqrt()).abs() < 1e-9);
        let curv = curvature_threshold(&r);
        assert_eq!((curv.h1, curv.h2_prime), (f64::INFINITY, f64::INFINITY));
        assert!((curv.h2_second - (20.0f64 / 3.0).sqrt()).abs() < 1e-9);
        // quadratic 2/135 + t(1/1800 − 1/90) − t²/2400
        let (a, b, c): (f64, f64, f64) = (-1.0 / 2400.0, 1.0 / 1800.0 - 1.0 / 90.0, 2.0 / 135.0);
        let root = (-b - (b * b - 4.0 * a * c).sqrt()) / (2.0 * a);
        assert!((curv.h3.value - root.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn thresholds_scale_with_size() {
        let r1 = reference(&CatalogChart::sphere_cap(1.0, 0.5), 0.1);
        let r2 = reference(&CatalogChart::sphere_cap(3.0, 0.5), 0.1);
        let (a, b) = (full_shell_threshold(&r1), full_shell_threshold(&r2));
        assert!((b.h0 / a.h0 - 3.0).abs() < 1e-6);
        let (a, b) = (curvature_threshold(&r1), curvature_threshold(&r2));
        assert!((b.h0 / a.h0 - 3.0).abs() < 1e-6);
        let (a, b) = (truncated_shell_threshold(&r1), truncated_shell_threshold(&r2));
        assert!((b.h0.value / a.h0.value - 3.0).abs() < 1e-6);
    }

    #[test]
    fn hessian_f_matches_plate_example_and_second_differences() {
        let m = hessian_f(4.0, 1.0, 1.0, 0.0, 0.0);
        let expect = Matrix3::new(2.0, 0.0, 1.0 / 6.0, 0.0, 2.0 / 3.0, 0.0, 1.0 / 6.0, 0.0, 1.0 / 40.0);
        assert!((m - expect).abs().max() < 1e-15);
        let (lam, a, h, hh, k) = (1.7, 0.8, 0.3, -0.6, 0.2);
        let f = |v: [f64; 3]| {
            let [r, x, y] = v;
            0.25 * lam * a
                * (h * r * r + h.powi(3) / 12.0 * (k * r * r + 4.0 * x * x + 2.0 * r * y)
                    + h.powi(5) / 80.0 * ((16.0 * hh * hh - 4.0 * k) * x * x - 8.0 * hh * x * y + y * y))
        };
        let m = hessian_f(lam, a, h, hh, k);
        let s = 1e-3;
        for i in 0..3 {
            for j in 0..3 {
                let e = |i: usize, d: f64| {
                    let mut v = [0.3, -0.2, 0.5];
                    v[i] += d;
                    v
                };
                let pp = { let mut v = e(i, s); v[j] += s; f(v) };
                let pm = { let mut v = e(i, s); v[j] -= s; f(v) };
                let mp = { let mut v = e(i, -s); v[j] += s; f(v) };
                let mm = { let mut v = e(i, -s); v[j] -= s; f(v) };
                let fd = (pp - pm - mp + mm) / (4.0 * s * s);
                assert!((fd - m[(i, j)]).abs() < 1e-8, "{i}{j}");
            }
        }
    }

    #[test]
    fn plate_and_thin_sphere_are_convex() {
        let plate = reference(&CatalogChart::plate(), 1.0);
        for h in [0.01, 1.0, 100.0] {
            let s = sample_convexity(ShellDensity::Full, &plate, 1.0, h, 20, 1);
            assert!(s.is_psd(1e-12), "{s:?}");
        }
        let sphere = reference(&CatalogChart::sphere_cap(1.0, 0.5), 0.1);
        let h0 = full_shell_threshold(&sphere).h0;
        let s = sample_convexity(ShellDensity::Full, &sphere, 1.0, 0.5 * h0, 50, 2);
        assert!(s.is_psd(1e-12), "{s:?}");
    }

    #[test]
    fn curvature_terms_convex() {
        let m = Material::new(1.0, 3.0, 0.1).unwrap();
        assert!(sample_curv_convexity(&m, ConstantsMode::Consistent, 1000, 3) >= 0.0);
        assert!(sample_curv_convexity(&m, ConstantsMode::Literal, 1000, 4) >= 0.0);
    }
}
