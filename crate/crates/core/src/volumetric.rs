//! Brute-force through-thickness integration of the parent 3D energy under
//! the Kirchhoff–Love ansatz `φ = m + x₃ n_m`, plus the intermediate
//! expansion coefficients used by the reduced models.

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{locate, Material};
use crate::error::{Location, Result, ShellError};
use crate::geometry::fundamental::{lift_flat, SurfaceJet};
use crate::linalg::Vec3;
use crate::reference::{RefPoint, ReferenceField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThicknessRule {
    GaussLegendre,
    Simpson,
}

/// Nodes and weights on `[−h/2, h/2]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThicknessQuadrature {
    pub rule: ThicknessRule,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl ThicknessQuadrature {
    pub fn gauss_legendre(n: usize, h: f64) -> Self {
        let (x, w) = gauss_legendre(n);
        Self {
            rule: ThicknessRule::GaussLegendre,
            nodes: x.iter().map(|t| 0.5 * h * t).collect(),
            weights: w.iter().map(|v| 0.5 * h * v).collect(),
        }
    }

    /// Composite Simpson with `intervals` (even) subintervals.
    pub fn simpson(intervals: usize, h: f64) -> Self {
        let n = intervals.max(2) + intervals % 2;
        let dx = h / n as f64;
        let nodes = (0..=n).map(|k| -0.5 * h + k as f64 * dx).collect();
        let weights = crate::geometry::grid::simpson_1d(n + 1, dx);
        Self { rule: ThicknessRule::Simpson, nodes, weights }
    }

    /// Default rule: 16-node Gauss–Legendre.
    pub fn standard(h: f64) -> Self {
        Self::gauss_legendre(16, h)
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for k in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p2) / (k + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// `(h/6)[f(−h/2) + 4f(0) + f(h/2)]`.
pub fn simpson_thickness(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    h / 6.0 * (f(-0.5 * h) + 4.0 * f(0.0) + f(0.5 * h))
}

/// Ciarlet–Geymonat stored energy.
pub fn w_cg(f: &Matrix3<f64>, mat: &Material) -> Result<f64> {
    let det = f.determinant();
    if !(det > 0.0) {
        return Err(ShellError::NonPositiveDeterminant(det));
    }
    let ld = det.ln();
    Ok(0.5 * mat.mu * (f.norm_squared() - 2.0 * ld - 3.0) + 0.25 * mat.lambda * (det * det - 2.0 * ld - 1.0))
}

/// How `(∇Θ)⁻¹` is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InverseMode {
    ClosedForm,
    DirectSolve,
}

fn columns(a: Vec3<f64>, b: Vec3<f64>, c: Vec3<f64>) -> Matrix3<f64> {
    Matrix3::from_columns(&[Vector3::from(a.0), Vector3::from(b.0), Vector3::from(c.0)])
}

/// Ansatz quantities at `(x′, x₃)`.
#[derive(Clone, Debug)]
pub struct AnsatzPoint {
    pub x3: f64,
    pub grad_theta: Matrix3<f64>,
    pub grad_theta_inv: Matrix3<f64>,
    pub grad_phi: Matrix3<f64>,
    pub f: Matrix3<f64>,
    pub det_f: f64,
    pub b: f64,
}

impl AnsatzPoint {
    pub fn new(rp: &RefPoint, ref_jet: &SurfaceJet<f64>, jet: &SurfaceJet<f64>, x3: f64, mode: InverseMode) -> Self {
        let (n0, dn0) = ref_jet.normal_derivatives();
        let (nm, dnm) = jet.normal_derivatives();
        let theta0 = columns(ref_jet.d1, ref_jet.d2, n0);
        let grad_theta = columns(ref_jet.d1 + dn0[0].scale(x3), ref_jet.d2 + dn0[1].scale(x3), n0);
        let grad_phi = columns(jet.d1 + dnm[0].scale(x3), jet.d2 + dnm[1].scale(x3), nm);
        let b = rp.b(x3);
        let grad_theta_inv = match mode {
            InverseMode::ClosedForm => {
                let mut e33 = Matrix3::zeros();
                e33[(2, 2)] = 1.0;
                let bmat = lift_flat(&rp.shape) - Matrix3::identity() * (2.0 * rp.mean);
                let left = (Matrix3::identity() + bmat * x3 + e33 * (rp.gauss * x3 * x3)) / b;
                left * theta0.try_inverse().unwrap_or_else(Matrix3::zeros)
            }
            InverseMode::DirectSolve => grad_theta.try_inverse().unwrap_or_else(Matrix3::zeros),
        };
        let f = grad_phi * grad_theta_inv;
        let det_f = f.determinant();
        Self { x3, grad_theta, grad_theta_inv, grad_phi, f, det_f, b }
    }
}

/// Through-thickness integrals per unit reference area at one point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ThicknessIntegrals {
    /// `∫ W_CG(F) b dx₃`
    pub energy: f64,
    /// `∫ ‖F‖² b dx₃`
    pub norm_sq: f64,
    /// `∫ log det F · b dx₃`
    pub log_det: f64,
    /// `∫ (det F)² b dx₃`
    pub det_sq: f64,
}

pub fn integrate_point(
    rp: &RefPoint,
    ref_jet: &SurfaceJet<f64>,
    jet: &SurfaceJet<f64>,
    mat: &Material,
    quad: &ThicknessQuadrature,
    mode: InverseMode,
) -> Result<ThicknessIntegrals> {
    let mut out = ThicknessIntegrals::default();
    for (&x3, &w) in quad.nodes.iter().zip(&quad.weights) {
        let ap = AnsatzPoint::new(rp, ref_jet, jet, x3, mode);
        if !(ap.det_f > 0.0) || !(ap.b > 0.0) {
            let location = Location { x3: Some(x3), ..Location::at(rp.x.0, rp.x.1) };
            let (quantity, value) = if ap.b > 0.0 { ("det F", ap.det_f) } else { ("b(x3)", ap.b) };
            return Err(ShellError::OrientationViolation { location, quantity, value });
        }
        let wb = w * ap.b;
        out.energy += wb * w_cg(&ap.f, mat)?;
        out.norm_sq += wb * ap.f.norm_squared();
        out.log_det += wb * ap.det_f.ln();
        out.det_sq += wb * ap.det_f * ap.det_f;
    }
    Ok(out)
}

/// `∫_ω ∫ W_CG(F_ξ) a_{y₀} b(x₃) dx₃ dx′` on the reference grid.
pub fn integrate_3d(
    reference: &ReferenceField,
    ref_jets: &[SurfaceJet<f64>],
    jets: &[SurfaceJet<f64>],
    mat: &Material,
    quad: &ThicknessQuadrature,
    mode: InverseMode,
) -> Result<f64> {
    let grid = &reference.grid;
    if jets.len() != grid.len() || ref_jets.len() != grid.len() {
        return Err(ShellError::ShapeMismatch(format!("{} jets for {} nodes", jets.len(), grid.len())));
    }
    let per_node = (0..grid.len())
        .into_par_iter()
        .map(|p| {
            integrate_point(&reference.points[p], &ref_jets[p], &jets[p], mat, quad, mode)
                .map(|t| t.energy)
                .map_err(|e| locate(e, grid.ij(p)))
        })
        .collect::<Result<Vec<_>>>()?;
    let w = grid.simpson_weights();
    Ok(per_node.iter().enumerate().map(|(p, e)| w[p] * reference.points[p].area * e).sum())
}

/// `α₀…α₄`: moments of the fourth-order expansion of `1/b` over the thickness.
pub fn alphas(h: f64, mean: f64, gauss: f64) -> [f64; 5] {
    let (h3, h5) = (h.powi(3) / 12.0, h.powi(5) / 80.0);
    let (hh, k) = (mean, gauss);
    [
        h + h3 * (4.0 * hh * hh - k) + h5 * (k * k - 12.0 * hh * hh * k + 16.0 * hh.powi(4)),
        h3 * 2.0 * hh + h5 * (8.0 * hh.powi(3) - 4.0 * hh * k),
        h3 + h5 * (4.0 * hh * hh - k),
        h5 * 2.0 * hh,
        h5,
    ]
}

/// Coefficients multiplying `F₀/F₁/F₂` of `I, Q, III` and the standalone term.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceTable {
    pub alpha: [f64; 5],
    /// `[Fᵢ(I), Fᵢ(Q), Fᵢ(III)]` for `i = 0, 1, 2`.
    pub f: [[f64; 3]; 3],
    pub standalone: f64,
}

pub fn trace_expansion_alpha(h: f64, mean: f64, gauss: f64) -> TraceTable {
    let a = alphas(h, mean, gauss);
    let (hh, k) = (mean, gauss);
    let f = [
        [
            a[0] - 4.0 * hh * a[1] + 4.0 * hh * hh * a[2],
            2.0 * a[1] - 8.0 * hh * a[2] + 8.0 * hh * hh * a[3],
            a[2] - 4.0 * hh * a[3] + 4.0 * hh * hh * a[4],
        ],
        [a[1] - 2.0 * hh * a[2], 2.0 * a[2] - 4.0 * hh * a[3], a[3] - 2.0 * hh * a[4]],
        [a[2], 2.0 * a[3], a[4]],
    ];
    let standalone = a[0] - 4.0 * hh * a[1] + a[2] * (2.0 * k + 4.0 * hh * hh) - 4.0 * hh * k * a[3] + k * k * a[4];
    TraceTable { alpha: a, f, standalone }
}

/// `c₁…c₄` with `(b_m/b_{y₀})² = 1 + Σ cₚ x₃ᵖ + O(x₃⁵)`.
pub fn det2_taylor_coeffs(mean: f64, gauss: f64, dh: f64, dk: f64) -> [f64; 4] {
    let (h0, k0) = (mean, gauss);
    [
        -4.0 * dh,
        -8.0 * h0 * dh + 4.0 * dh * dh + 2.0 * dk,
        -16.0 * h0 * h0 * dh + 16.0 * h0 * dh * dh + 4.0 * k0 * dh + 4.0 * h0 * dk - 4.0 * dh * dk,
        -32.0 * h0.powi(3) * dh + 48.0 * h0 * h0 * dh * dh + 8.0 * h0 * h0 * dk + 16.0 * h0 * k0 * dh
            - 16.0 * h0 * dh * dk
            - 8.0 * k0 * dh * dh
            - 2.0 * k0 * dk
            + dk * dk,
    ]
}

/// Fifth-order expansion of `∫ log det F_ξ · b dx₃` per unit reference area.
/// Diagnostic only.
pub fn logdet_taylor_reduction(mean: f64, gauss: f64, ratio: f64, dh: f64, dk: f64, h: f64) -> f64 {
    let lr = ratio.ln();
    let (h0, k0) = (mean, gauss);
    h * lr
        + h.powi(3) / 12.0 * (k0 * lr + dk - 2.0 * dh * dh)
        + h.powi(5) / 80.0
            * (-4.0 * dh.powi(4) - 32.0 / 3.0 * h0 * dh.powi(3) + (2.0 * k0 - 8.0 * h0 * h0) * dh * dh
                + 4.0 * h0 * dh * dk
                + 4.0 * dh * dh * dk
                - 0.5 * dk * dk)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::chart::{CatalogChart, Chart};
    use crate::geometry::grid::Grid;

    fn mat() -> Material {
        Material::new(1.0, 2.0, 0.1).unwrap()
    }

    #[test]
    fn gauss_rule_exactness() {
        for n in [2, 5, 16] {
            let q = ThicknessQuadrature::gauss_legendre(n, 0.3);
            assert!((q.weights.iter().sum::<f64>() - 0.3).abs() < 1e-15);
            let deg = 2 * n - 2;
            let exact = 2.0 * 0.15f64.powi(deg as i32 + 1) / (deg + 1) as f64;
            assert!((q.integrate(|x| x.powi(deg as i32)) - exact).abs() < 1e-15);
        }
    }

    #[test]
    fn simpson_thickness_examples() {
        let h = 0.7f64;
        assert!((simpson_thickness(|x| x * x, h) - h.powi(3) / 12.0).abs() < 1e-15);
        assert!(simpson_thickness(|x| x.powi(3), h).abs() < 1e-16);
        // (h/6)·2·(h/2)⁴ = h⁵/48, exceeding h⁵/80 by h⁵/120
        let quartic = simpson_thickness(|x| x.powi(4), h);
        assert!((quartic - h.powi(5) / 48.0).abs() < 1e-15);
        assert!((quartic - h.powi(5) / 80.0 - h.powi(5) / 120.0).abs() < 1e-15);
        let q = ThicknessQuadrature::simpson(8, h);
        assert!((q.integrate(|x| x.powi(3) + x * x) - h.powi(3) / 12.0).abs() < 1e-15);
    }

    #[test]
    fn w_cg_examples() {
        let m = mat();
        assert_eq!(w_cg(&Matrix3::identity(), &m).unwrap(), 0.0);
        let f = Matrix3::from_diagonal(&Vector3::new(2.0, 1.0, 1.0));
        let expect = (3.0 - 2.0 * 2f64.ln()) * (0.5 * m.mu + 0.25 * m.lambda);
        assert!((w_cg(&f, &m).unwrap() - expect).abs() < 1e-14);
        let mut last = 0.0;
        for k in 1..10 {
            let t = 10f64.powi(-k);
            let v = w_cg(&Matrix3::from_diagonal(&Vector3::new(t, 1.0, 1.0)), &m).unwrap();
            assert!(v > last);
            last = v;
        }
        assert!(w_cg(&Matrix3::from_diagonal(&Vector3::new(-1.0, 1.0, 1.0)), &m).is_err());
    }

    #[test]
    fn ansatz_properties_on_sphere() {
        let chart = CatalogChart::sphere_cap(1.0, 0.6);
        let h = 0.4;
        let jet = chart.jet(1.3, 0.2);
        let rp = RefPoint::new(&jet, (1.3, 0.2), h).unwrap();
        for x3 in [-0.2, -0.05, 0.0, 0.11, 0.2] {
            let a = AnsatzPoint::new(&rp, &jet, &jet, x3, InverseMode::ClosedForm);
            let d = AnsatzPoint::new(&rp, &jet, &jet, x3, InverseMode::DirectSolve);
            let det = a.grad_theta.determinant();
            assert!((det - rp.area * a.b).abs() < 1e-12 * det.abs());
            assert!((a.grad_theta_inv * a.grad_theta - Matrix3::identity()).abs().max() < 1e-12);
            assert!((a.grad_theta_inv - d.grad_theta_inv).abs().max() < 1e-12);
            assert!((a.f - Matrix3::identity()).abs().max() < 1e-12);
        }
    }

    #[test]
    fn identity_integrates_to_zero() {
        let chart = CatalogChart::cylinder_patch(1.0, 1.0);
        let grid = Grid::new(chart.domain(), 9, 9).unwrap();
        let h = 0.1;
        let r = ReferenceField::from_chart(&chart, &grid, h).unwrap();
        let jets: Vec<_> = (0..grid.len()).map(|p| { let (a, b) = grid.point(p); chart.jet(a, b) }).collect();
        let e = integrate_3d(&r, &jets, &jets, &mat().with_thickness(h), &ThicknessQuadrature::standard(h), InverseMode::ClosedForm).unwrap();
        assert!(e.abs() < 1e-14, "{e}");
    }

    #[test]
    fn alpha_examples() {
        let a = alphas(0.2, 0.0, 0.0);
        let expect = [0.2, 0.0, 0.008 / 12.0, 0.0, 0.2f64.powi(5) / 80.0];
        for k in 0..5 {
            assert!((a[k] - expect[k]).abs() < 1e-17);
        }
        let a = alphas(0.1, -1.0, 1.0);
        assert!((a[0] - (0.1 + 0.001 / 12.0 * 3.0 + 1e-5 / 80.0 * 5.0)).abs() < 1e-16);
    }

    #[test]
    fn table_matches_reduced_coefficients() {
        use crate::energy::ShellCoefficients;
        for &(h, hh, k) in &[(0.1, -1.0, 1.0), (0.3, 0.4, -0.7), (0.05, 2.0, 0.5)] {
            let t = trace_expansion_alpha(h, hh, k);
            let s = ShellCoefficients::full(h, hh, k);
            let flat = [t.f[0][0], t.f[0][1], t.f[0][2], t.f[1][0], t.f[1][1], t.f[2][0], t.f[2][1], t.f[2][2]];
            for i in 0..8 {
                assert!((flat[i] - s.c[i]).abs() < 1e-15, "{i}: {} vs {}", flat[i], s.c[i]);
            }
            assert!(t.f[1][2].abs() < 1e-18);
            assert!((t.standalone - s.standalone).abs() < 1e-15);
        }
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(det2_taylor_coeffs(0.3, 0.2, 0.0, 0.0), [0.0; 4]);
        let d = 0.25;
        let c = det2_taylor_coeffs(0.0, 0.0, d, 0.0);
        assert_eq!(c[..3], [-4.0 * d, 4.0 * d * d, 0.0]);
        assert_eq!(logdet_taylor_reduction(0.5, 0.1, 1.0, 0.0, 0.0, 0.2), 0.0);
        assert!((logdet_taylor_reduction(0.0, 0.0, 1.5, 0.0, 0.0, 0.2) - 0.2 * 1.5f64.ln()).abs() < 1e-16);
    }
}
