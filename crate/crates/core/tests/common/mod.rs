//! Independent reference computations shared by the integration tests.
//! Nothing here goes through the crate's energy or volumetric code paths.
#![allow(dead_code)]

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use cgshell::geometry::fundamental::SurfaceJet;
use cgshell::linalg::Vec3;

pub fn v3(v: Vec3<f64>) -> Vector3<f64> {
    Vector3::new(v[0], v[1], v[2])
}

/// Unit normal and its two parameter derivatives from a second-order jet.
pub fn normal_and_derivatives(j: &SurfaceJet<f64>) -> (Vector3<f64>, [Vector3<f64>; 2]) {
    let (d1, d2) = (v3(j.d1), v3(j.d2));
    let dd = [[v3(j.d11), v3(j.d12)], [v3(j.d12), v3(j.d22)]];
    let c = d1.cross(&d2);
    let len = c.norm();
    let n = c / len;
    let dn = [0, 1].map(|a| {
        let dc = dd[a][0].cross(&d2) + d1.cross(&dd[a][1]);
        (dc - n * n.dot(&dc)) / len
    });
    (n, dn)
}

/// `[∂₁y + x₃∂₁n | ∂₂y + x₃∂₂n | n]`
pub fn shell_gradient(j: &SurfaceJet<f64>, x3: f64) -> Matrix3<f64> {
    let (n, dn) = normal_and_derivatives(j);
    Matrix3::from_columns(&[v3(j.d1) + dn[0] * x3, v3(j.d2) + dn[1] * x3, n])
}

/// Compressible neo-Hookean density vanishing at the identity.
pub fn stored_energy(f: &Matrix3<f64>, mu: f64, lambda: f64) -> f64 {
    let j = f.determinant();
    assert!(j > 0.0, "det F = {j}");
    0.5 * mu * (f.norm_squared() - 3.0) + 0.25 * lambda * (j * j - 1.0) - (mu + 0.5 * lambda) * j.ln()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Golub-Welsch.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut t = nalgebra::DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
        t[(k, k - 1)] = b;
        t[(k - 1, k)] = b;
    }
    let eig = t.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n).map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2))).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

/// `∫∫ W(∇Φ (∇Θ)⁻¹) det ∇Θ dx₃ dx′` with in-plane weights `w` and an
/// `n`-point Gauss rule through the thickness.
pub fn energy_3d(
    ref_jets: &[SurfaceJet<f64>],
    jets: &[SurfaceJet<f64>],
    w: &[f64],
    h: f64,
    mu: f64,
    lambda: f64,
    n: usize,
) -> f64 {
    let (xs, ws) = gauss_legendre(n);
    let mut total = 0.0;
    for p in 0..jets.len() {
        let mut acc = 0.0;
        for (s, ws) in xs.iter().zip(&ws) {
            let x3 = 0.5 * h * s;
            let gt = shell_gradient(&ref_jets[p], x3);
            let gp = shell_gradient(&jets[p], x3);
            let f = gp * gt.try_inverse().expect("invertible reference");
            acc += 0.5 * h * ws * stored_energy(&f, mu, lambda) * gt.determinant();
        }
        total += w[p] * acc;
    }
    total
}

/// Taylor coefficients `a₀…a_{m}` of an analytic `f` at 0 from a trapezoidal
/// Cauchy integral on `|z| = ρ`.
pub fn taylor_coefficients(f: impl Fn(Complex64) -> Complex64, rho: f64, m: usize) -> Vec<f64> {
    let npts = 128;
    let vals: Vec<(Complex64, Complex64)> = (0..npts)
        .map(|k| {
            let z = Complex64::from_polar(rho, 2.0 * std::f64::consts::PI * k as f64 / npts as f64);
            (z, f(z))
        })
        .collect();
    (0..=m)
        .map(|j| {
            let s: Complex64 = vals.iter().map(|(z, v)| v / z.powu(j as u32)).sum();
            (s / npts as f64).re
        })
        .collect()
}

/// `∫_{-1/2}^{1/2} g(s) ds` for complex `g` by composite Simpson.
pub fn simpson_complex(g: impl Fn(f64) -> Complex64, intervals: usize) -> Complex64 {
    let n = intervals + intervals % 2;
    let dx = 1.0 / n as f64;
    let mut acc = g(-0.5) + g(0.5);
    for k in 1..n {
        acc += g(-0.5 + k as f64 * dx) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * (dx / 3.0)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
