//! Fundamental forms, shape operator and curvatures of a parametrized surface.
//!
//! Sign convention: `II := -(∇y)ᵀ ∇n` with `n = ∂₁y × ∂₂y / |∂₁y × ∂₂y|`.
//! A sphere with outward normal therefore has `L = -(1/R)·𝟙` and a
//! *negative* mean curvature `H = -1/R`. Every formula downstream relies on
//! this convention.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Location, Result, ShellError};
use crate::linalg::{Mat2, Vec3};
use crate::scalar::Scalar;

/// Threshold on `|∂₁y × ∂₂y|` below which a chart counts as degenerate.
pub const EPS_RANK: f64 = 1e-12;

/// Position and parameter derivatives of a surface up to second order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceJet<T> {
    pub pos: Vec3<T>,
    pub d1: Vec3<T>,
    pub d2: Vec3<T>,
    pub d11: Vec3<T>,
    pub d12: Vec3<T>,
    pub d22: Vec3<T>,
}

impl<T: Scalar> SurfaceJet<T> {
    pub fn zero() -> Self {
        Self {
            pos: Vec3::zero(),
            d1: Vec3::zero(),
            d2: Vec3::zero(),
            d11: Vec3::zero(),
            d12: Vec3::zero(),
            d22: Vec3::zero(),
        }
    }

    /// Unnormalized normal `∂₁y × ∂₂y`.
    pub fn cross(&self) -> Vec3<T> {
        self.d1.cross(&self.d2)
    }

    /// Components in the fixed order `pos, d1, d2, d11, d12, d22`.
    pub fn components(&self) -> [Vec3<T>; 6] {
        [self.pos, self.d1, self.d2, self.d11, self.d12, self.d22]
    }

    pub fn from_components(c: [Vec3<T>; 6]) -> Self {
        Self { pos: c[0], d1: c[1], d2: c[2], d11: c[3], d12: c[4], d22: c[5] }
    }

    /// Normal derivatives `∂ᵢn = P(∂ᵢ(∂₁y×∂₂y)) / |∂₁y×∂₂y|`, `P = 𝟙 − n⊗n`.
    pub fn normal_derivatives(&self) -> (Vec3<T>, [Vec3<T>; 2]) {
        let c = self.cross();
        let inv = c.norm().recip();
        let n = c.scale(inv);
        let dc1 = self.d11.cross(&self.d2) + self.d1.cross(&self.d12);
        let dc2 = self.d12.cross(&self.d2) + self.d1.cross(&self.d22);
        let proj = |v: Vec3<T>| (v - n.scale(n.dot(&v))).scale(inv);
        (n, [proj(dc1), proj(dc2)])
    }
}

impl SurfaceJet<f64> {
    pub fn add_scaled(&self, other: &Self, s: f64) -> Self {
        let a = self.components();
        let b = other.components();
        let mut c = a;
        for k in 0..6 {
            c[k] = a[k] + b[k].scale(s);
        }
        Self::from_components(c)
    }
}

/// The pointwise quantities entering the reduced energies, generic so that
/// they can be differentiated with respect to the jet.
#[derive(Clone, Copy, Debug)]
pub struct SurfaceForms<T> {
    pub first: Mat2<T>,
    /// `II_ij = n·∂ᵢⱼy`, identical to `-(∇y)ᵀ∇n` for any jet.
    pub second: Mat2<T>,
    pub normal: Vec3<T>,
    pub area: T,
}

impl<T: Scalar> SurfaceForms<T> {
    pub fn from_jet(jet: &SurfaceJet<T>) -> Self {
        let c = jet.cross();
        let area = c.norm();
        let normal = c.scale(area.recip());
        let g11 = jet.d1.dot(&jet.d1);
        let g12 = jet.d1.dot(&jet.d2);
        let g22 = jet.d2.dot(&jet.d2);
        let b11 = normal.dot(&jet.d11);
        let b12 = normal.dot(&jet.d12);
        let b22 = normal.dot(&jet.d22);
        Self {
            first: Mat2::new(g11, g12, g12, g22),
            second: Mat2::new(b11, b12, b12, b22),
            normal,
            area,
        }
    }

    pub fn first_inv(&self) -> Mat2<T> {
        self.first.inverse()
    }

    /// Shape operator `L = I⁻¹ II`.
    pub fn shape(&self) -> Mat2<T> {
        self.first_inv() * self.second
    }

    /// `III = II I⁻¹ II`, equal to `(∇n)ᵀ∇n`.
    pub fn third(&self) -> Mat2<T> {
        self.second * self.first_inv() * self.second
    }

    pub fn mean(&self) -> T {
        self.shape().trace() * 0.5
    }

    pub fn gauss(&self) -> T {
        self.second.det() / self.first.det()
    }
}

/// Per-point geometric bundle of a surface.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FundamentalData {
    pub first: Mat2<f64>,
    pub second: Mat2<f64>,
    pub third: Mat2<f64>,
    pub shape: Mat2<f64>,
    pub mean: f64,
    pub gauss: f64,
    pub area: f64,
    pub normal: Vec3<f64>,
    pub kappa1: f64,
    pub kappa2: f64,
}

/// Principal curvatures from `κ = H ± √(H² − K)`. Discriminants within
/// round-off of zero are umbilics; the square root would otherwise blow a
/// 1e-16 error up to 1e-8.
pub fn principal_curvatures(mean: f64, gauss: f64) -> (f64, f64) {
    let disc = mean * mean - gauss;
    let scale = mean * mean + gauss.abs();
    debug_assert!(disc >= -1e-12 * (1.0 + scale), "complex curvatures: {disc}");
    let r = if disc <= 64.0 * f64::EPSILON * scale { 0.0 } else { disc.sqrt() };
    (mean - r, mean + r)
}

pub fn fundamental_data(jet: &SurfaceJet<f64>, at: Location) -> Result<FundamentalData> {
    let cn = jet.cross().norm();
    if !(cn > EPS_RANK) {
        return Err(ShellError::DegenerateChart(at, cn));
    }
    let (n, dn) = jet.normal_derivatives();
    let d = [jet.d1, jet.d2];
    let mut second = Mat2::<f64>::zero();
    let mut third = Mat2::<f64>::zero();
    for i in 0..2 {
        for j in 0..2 {
            second.0[i][j] = -d[i].dot(&dn[j]);
            third.0[i][j] = dn[i].dot(&dn[j]);
        }
    }
    // symmetric by construction for exact jets; average away round-off
    let s = 0.5 * (second.0[0][1] + second.0[1][0]);
    second.0[0][1] = s;
    second.0[1][0] = s;
    let first = Mat2::new(d[0].dot(&d[0]), d[0].dot(&d[1]), d[1].dot(&d[0]), d[1].dot(&d[1]));
    let shape = first.inverse() * second;
    let mean = 0.5 * shape.trace();
    let gauss = shape.det();
    let (kappa1, kappa2) = principal_curvatures(mean, gauss);
    Ok(FundamentalData {
        first,
        second,
        third,
        shape,
        mean,
        gauss,
        area: cn,
        normal: n,
        kappa1,
        kappa2,
    })
}

/// `M̂`: the 2×2 block in the upper-left corner and `1` at position (3,3).
pub fn lift_hat(m: &Mat2<f64>) -> Matrix3<f64> {
    let mut out = lift_flat(m);
    out[(2, 2)] = 1.0;
    out
}

/// `M♭`: the 2×2 block in the upper-left corner, zeros elsewhere.
pub fn lift_flat(m: &Mat2<f64>) -> Matrix3<f64> {
    let mut out = Matrix3::zeros();
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = m.0[i][j];
        }
    }
    out
}
