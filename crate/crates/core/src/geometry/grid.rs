//! Uniform tensor-product node grids with composite Simpson weights.

use serde::{Deserialize, Serialize};

use crate::error::{Result, ShellError};
use crate::geometry::chart::Domain;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub domain: Domain,
    pub n1: usize,
    pub n2: usize,
}

impl Grid {
    /// Both sizes must be odd (composite Simpson) and at least 5.
    pub fn new(domain: Domain, n1: usize, n2: usize) -> Result<Self> {
        if n1 < 5 || n2 < 5 {
            return Err(ShellError::GridTooSmall { n1, n2, min: 5 });
        }
        if n1 % 2 == 0 || n2 % 2 == 0 {
            return Err(ShellError::Config(format!("grid sizes must be odd, got {n1}x{n2}")));
        }
        Ok(Self { domain, n1, n2 })
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx1(&self) -> f64 {
        self.domain.width() / (self.n1 - 1) as f64
    }

    pub fn dx2(&self) -> f64 {
        self.domain.height() / (self.n2 - 1) as f64
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n1 + i
    }

    #[inline]
    pub fn ij(&self, idx: usize) -> (usize, usize) {
        (idx % self.n1, idx / self.n1)
    }

    pub fn x1(&self, i: usize) -> f64 {
        if i == self.n1 - 1 {
            self.domain.b1
        } else {
            self.domain.a1 + i as f64 * self.dx1()
        }
    }

    pub fn x2(&self, j: usize) -> f64 {
        if j == self.n2 - 1 {
            self.domain.b2
        } else {
            self.domain.a2 + j as f64 * self.dx2()
        }
    }

    pub fn point(&self, idx: usize) -> (f64, f64) {
        let (i, j) = self.ij(idx);
        (self.x1(i), self.x2(j))
    }

    pub fn on_boundary(&self, idx: usize) -> bool {
        let (i, j) = self.ij(idx);
        i == 0 || j == 0 || i == self.n1 - 1 || j == self.n2 - 1
    }

    /// Tensor-product composite Simpson weights, one per node.
    pub fn simpson_weights(&self) -> Vec<f64> {
        let w1 = simpson_1d(self.n1, self.dx1());
        let w2 = simpson_1d(self.n2, self.dx2());
        let mut w = Vec::with_capacity(self.len());
        for b in &w2 {
            for a in &w1 {
                w.push(a * b);
            }
        }
        w
    }
}

/// Composite Simpson weights for `n` (odd) equispaced nodes.
pub fn simpson_1d(n: usize, dx: f64) -> Vec<f64> {
    debug_assert!(n % 2 == 1 && n >= 3);
    (0..n)
        .map(|i| {
            let c = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * dx / 3.0
        })
        .collect()
}
