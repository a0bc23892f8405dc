//! Fixed-size vectors and 2×2 matrices generic over [`Scalar`].

use serde::{Deserialize, Serialize};
use std::ops::{Add, Index, Mul, Neg, Sub};

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec3<T>(pub [T; 3]);

impl<T: Scalar> Vec3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self([x, y, z])
    }

    pub fn zero() -> Self {
        Self([T::zero(); 3])
    }

    pub fn from_f64(v: Vec3<f64>) -> Self {
        Self([T::cst(v.0[0]), T::cst(v.0[1]), T::cst(v.0[2])])
    }

    pub fn dot(&self, o: &Self) -> T {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn cross(&self, o: &Self) -> Self {
        let [a0, a1, a2] = self.0;
        let [b0, b1, b2] = o.0;
        Self([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0])
    }

    pub fn norm_sq(&self) -> T {
        self.dot(self)
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, s: T) -> Self {
        Self([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }

    pub fn re(&self) -> Vec3<f64> {
        Vec3([self.0[0].re(), self.0[1].re(), self.0[2].re()])
    }
}

impl Vec3<f64> {
    pub fn e(k: usize) -> Self {
        let mut v = [0.0; 3];
        v[k] = 1.0;
        Vec3(v)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

impl<T: Scalar> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl<T: Scalar> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl<T: Scalar> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl<T> Index<usize> for Vec3<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

/// Row-major 2×2 matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2<T>(pub [[T; 2]; 2]);

impl<T: Scalar> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Self([[a, b], [c, d]])
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn zero() -> Self {
        Self([[T::zero(); 2]; 2])
    }

    pub fn diag(a: T, b: T) -> Self {
        Self::new(a, T::zero(), T::zero(), b)
    }

    pub fn from_f64(m: &Mat2<f64>) -> Self {
        Self([
            [T::cst(m.0[0][0]), T::cst(m.0[0][1])],
            [T::cst(m.0[1][0]), T::cst(m.0[1][1])],
        ])
    }

    pub fn det(&self) -> T {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> T {
        self.0[0][0] + self.0[1][1]
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.0[0][0], self.0[1][0], self.0[0][1], self.0[1][1])
    }

    /// Inverse via the adjugate; caller guarantees `det != 0`.
    pub fn inverse(&self) -> Self {
        let inv_det = self.det().recip();
        Self::new(
            self.0[1][1] * inv_det,
            -self.0[0][1] * inv_det,
            -self.0[1][0] * inv_det,
            self.0[0][0] * inv_det,
        )
    }

    /// Frobenius inner product `tr(Aᵀ B)`.
    pub fn inner(&self, o: &Self) -> T {
        self.0[0][0] * o.0[0][0]
            + self.0[0][1] * o.0[0][1]
            + self.0[1][0] * o.0[1][0]
            + self.0[1][1] * o.0[1][1]
    }

    /// Frobenius inner product with a constant matrix.
    pub fn inner_f64(&self, o: &Mat2<f64>) -> T {
        self.0[0][0] * o.0[0][0]
            + self.0[0][1] * o.0[0][1]
            + self.0[1][0] * o.0[1][0]
            + self.0[1][1] * o.0[1][1]
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(
            self.0[0][0] * s,
            self.0[0][1] * s,
            self.0[1][0] * s,
            self.0[1][1] * s,
        )
    }

    pub fn re(&self) -> Mat2<f64> {
        Mat2([
            [self.0[0][0].re(), self.0[0][1].re()],
            [self.0[1][0].re(), self.0[1][1].re()],
        ])
    }
}

impl Mat2<f64> {
    pub fn frobenius(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.0[i][j] - o.0[i][j]).abs());
            }
        }
        m
    }

    /// Closed-form eigen-decomposition of a symmetric 2×2 matrix:
    /// returns `(λ₁, λ₂, v₁)` with `λ₁ ≤ λ₂` and unit eigenvector `v₁`.
    pub fn sym_eigen(&self) -> (f64, f64, [f64; 2]) {
        let (a, b, d) = (self.0[0][0], 0.5 * (self.0[0][1] + self.0[1][0]), self.0[1][1]);
        let mean = 0.5 * (a + d);
        let r = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        let (l1, l2) = (mean - r, mean + r);
        let v = if b.abs() > f64::EPSILON * (a.abs() + d.abs()) {
            let (x, y) = (b, l1 - a);
            let n = (x * x + y * y).sqrt();
            [x / n, y / n]
        } else if a <= d {
            [1.0, 0.0]
        } else {
            [0.0, 1.0]
        };
        (l1, l2, v)
    }

    /// `f(S)` for symmetric `S` through its eigen-decomposition.
    pub fn sym_apply(&self, f: impl Fn(f64) -> f64) -> Self {
        let (l1, l2, v) = self.sym_eigen();
        let w = [-v[1], v[0]];
        let (f1, f2) = (f(l1), f(l2));
        let e = |i: usize, j: usize| f1 * v[i] * v[j] + f2 * w[i] * w[j];
        Mat2([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }
}

impl<T: Scalar> Add for Mat2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(
            self.0[0][0] + o.0[0][0],
            self.0[0][1] + o.0[0][1],
            self.0[1][0] + o.0[1][0],
            self.0[1][1] + o.0[1][1],
        )
    }
}

impl<T: Scalar> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(
            self.0[0][0] - o.0[0][0],
            self.0[0][1] - o.0[0][1],
            self.0[1][0] - o.0[1][0],
            self.0[1][1] - o.0[1][1],
        )
    }
}

impl<T: Scalar> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let a = &self.0;
        let b = &o.0;
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}
