//! Finite-difference stencils on uniform grids.
//!
//! Weights come from Fornberg's recursion, so the same code produces
//! central interior stencils and one-sided boundary stencils of matching
//! formal order.

use crate::error::{Result, ShellError};
use crate::geometry::fundamental::SurfaceJet;
use crate::geometry::grid::Grid;
use crate::linalg::Vec3;

/// Weights `c[d][k]` of the `d`-th derivative at `z` from nodes `x`,
/// for `d = 0..=max_d`.
pub fn fornberg(z: f64, x: &[f64], max_d: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; max_d + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    for i in 1..n {
        let mn = i.min(max_d);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// One-dimensional stencil: `(node index, weight)` pairs.
pub type Stencil1 = Vec<(usize, f64)>;

/// Stencil for derivative `d` at node `i` of `n` equispaced nodes with
/// spacing `dx`, accurate to `order`.
pub fn stencil_1d(i: usize, n: usize, dx: f64, d: usize, order: usize) -> Stencil1 {
    // central: 2⌊(d+1)/2⌋ − 1 + order points; one-sided: d + order points
    let half = (d + 1) / 2 + order / 2 - 1;
    let (lo, len) = if i >= half && i + half < n {
        (i - half, 2 * half + 1)
    } else {
        let len = d + order;
        let lo = if i < half { 0 } else { n - len };
        (lo, len)
    };
    let x: Vec<f64> = (lo..lo + len).map(|k| k as f64 - i as f64).collect();
    let w = fornberg(0.0, &x, d);
    let scale = dx.powi(d as i32);
    (lo..lo + len)
        .zip(w[d].iter())
        .filter(|(_, w)| **w != 0.0)
        .map(|(k, w)| (k, w / scale))
        .collect()
}

/// Minimum grid size per direction for a stencil order.
pub fn min_nodes(order: usize) -> usize {
    (2 + order).max(5)
}

/// Linear map from nodal values to jets: for every node, the list of
/// contributing nodes with their coefficients in the component order
/// `pos, d1, d2, d11, d12, d22`.
#[derive(Clone, Debug)]
pub struct GridStencils {
    pub order: usize,
    pub coeffs: Vec<Vec<(usize, [f64; 6])>>,
}

impl GridStencils {
    pub fn new(grid: &Grid, order: usize) -> Result<Self> {
        if order != 2 && order != 4 {
            return Err(ShellError::Config(format!("stencil order must be 2 or 4, got {order}")));
        }
        let min = min_nodes(order);
        if grid.n1 < min || grid.n2 < min {
            return Err(ShellError::GridTooSmall { n1: grid.n1, n2: grid.n2, min });
        }
        let (dx1, dx2) = (grid.dx1(), grid.dx2());
        let s1: Vec<[Stencil1; 2]> = (0..grid.n1)
            .map(|i| [stencil_1d(i, grid.n1, dx1, 1, order), stencil_1d(i, grid.n1, dx1, 2, order)])
            .collect();
        let s2: Vec<[Stencil1; 2]> = (0..grid.n2)
            .map(|j| [stencil_1d(j, grid.n2, dx2, 1, order), stencil_1d(j, grid.n2, dx2, 2, order)])
            .collect();
        let mut coeffs = Vec::with_capacity(grid.len());
        for j in 0..grid.n2 {
            for i in 0..grid.n1 {
                let mut acc: Vec<(usize, [f64; 6])> = Vec::new();
                let mut add = |node: usize, comp: usize, w: f64| {
                    if let Some(e) = acc.iter_mut().find(|e| e.0 == node) {
                        e.1[comp] += w;
                    } else {
                        let mut c = [0.0; 6];
                        c[comp] = w;
                        acc.push((node, c));
                    }
                };
                add(grid.index(i, j), 0, 1.0);
                for &(k, w) in &s1[i][0] {
                    add(grid.index(k, j), 1, w);
                }
                for &(l, w) in &s2[j][0] {
                    add(grid.index(i, l), 2, w);
                }
                for &(k, w) in &s1[i][1] {
                    add(grid.index(k, j), 3, w);
                }
                for &(k, wk) in &s1[i][0] {
                    for &(l, wl) in &s2[j][0] {
                        add(grid.index(k, l), 4, wk * wl);
                    }
                }
                for &(l, w) in &s2[j][1] {
                    add(grid.index(i, l), 5, w);
                }
                acc.sort_by_key(|e| e.0);
                coeffs.push(acc);
            }
        }
        Ok(Self { order, coeffs })
    }

    pub fn jet(&self, node: usize, values: &[Vec3<f64>]) -> SurfaceJet<f64> {
        let mut c = [Vec3::zero(); 6];
        for (q, w) in &self.coeffs[node] {
            let v = values[*q];
            for k in 0..6 {
                if w[k] != 0.0 {
                    c[k] = c[k] + v.scale(w[k]);
                }
            }
        }
        SurfaceJet::from_components(c)
    }

    /// Nodes whose jets depend on the value at `node`.
    pub fn dependents(&self) -> Vec<Vec<usize>> {
        let mut dep = vec![Vec::new(); self.coeffs.len()];
        for (p, list) in self.coeffs.iter().enumerate() {
            for (q, _) in list {
                dep[*q].push(p);
            }
        }
        dep
    }
}

/// Derivative fields of nodal positions on a uniform grid.
pub fn finite_difference_derivatives(
    grid: &Grid,
    values: &[Vec3<f64>],
    order: usize,
) -> Result<Vec<SurfaceJet<f64>>> {
    if values.len() != grid.len() {
        return Err(ShellError::ShapeMismatch(format!(
            "{} nodal values for a {}x{} grid",
            values.len(),
            grid.n1,
            grid.n2
        )));
    }
    let st = GridStencils::new(grid, order)?;
    Ok((0..grid.len()).map(|p| st.jet(p, values)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::chart::Domain;

    #[test]
    fn fornberg_reproduces_textbook_weights() {
        let w = fornberg(0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0], 2);
        let d1 = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        let d2 = [-1.0 / 12.0, 4.0 / 3.0, -2.5, 4.0 / 3.0, -1.0 / 12.0];
        for k in 0..5 {
            assert!((w[1][k] - d1[k]).abs() < 1e-14);
            assert!((w[2][k] - d2[k]).abs() < 1e-14);
        }
    }

    fn field(g: &Grid, f: impl Fn(f64, f64) -> [f64; 3]) -> Vec<Vec3<f64>> {
        (0..g.len()).map(|p| {
            let (x, y) = g.point(p);
            Vec3(f(x, y))
        }).collect()
    }

    #[test]
    fn linear_and_quadratic_fields_are_exact() {
        let g = Grid::new(Domain::new(0.0, 2.0, -1.0, 1.0), 7, 9).unwrap();
        let lin = field(&g, |x, y| [2.0 * x - y + 1.0, x + 3.0 * y, -x]);
        for order in [2, 4] {
            for (p, jet) in finite_difference_derivatives(&g, &lin, order).unwrap().iter().enumerate() {
                assert!((jet.d1 - Vec3([2.0, 1.0, -1.0])).max_abs() < 1e-12, "node {p}");
                assert!((jet.d2 - Vec3([-1.0, 3.0, 0.0])).max_abs() < 1e-12);
                assert!(jet.d11.max_abs() < 1e-10 && jet.d12.max_abs() < 1e-10 && jet.d22.max_abs() < 1e-10);
            }
        }
        let quad = field(&g, |x, y| [x * x, x * y, y * y - x]);
        for jet in finite_difference_derivatives(&g, &quad, 2).unwrap() {
            assert!((jet.d11 - Vec3([2.0, 0.0, 0.0])).max_abs() < 1e-9);
            assert!((jet.d12 - Vec3([0.0, 1.0, 0.0])).max_abs() < 1e-9);
            assert!((jet.d22 - Vec3([0.0, 0.0, 2.0])).max_abs() < 1e-9);
        }
    }

    fn max_error(n: usize, order: usize) -> f64 {
        let g = Grid::new(Domain::new(0.0, 1.0, 0.0, 1.0), n, n).unwrap();
        let vals = field(&g, |x, y| [(2.0 * x).sin() * y.cos(), 0.0, 0.0]);
        let jets = finite_difference_derivatives(&g, &vals, order).unwrap();
        let mut err: f64 = 0.0;
        for (p, jet) in jets.iter().enumerate() {
            let (x, y) = g.point(p);
            let exact = [
                2.0 * (2.0 * x).cos() * y.cos(),
                -4.0 * (2.0 * x).sin() * y.cos(),
                -2.0 * (2.0 * x).cos() * y.sin(),
            ];
            err = err
                .max((jet.d1[0] - exact[0]).abs())
                .max((jet.d11[0] - exact[1]).abs())
                .max((jet.d12[0] - exact[2]).abs());
        }
        err
    }

    #[test]
    fn convergence_matches_stencil_order() {
        for order in [2, 4] {
            let ratio = max_error(17, order) / max_error(33, order);
            let observed = ratio.log2();
            assert!((observed - order as f64).abs() < 0.6, "order {order}: observed {observed}");
        }
    }

    #[test]
    fn too_small_grid_is_rejected() {
        let g = Grid::new(Domain::unit(), 5, 5).unwrap();
        assert!(matches!(GridStencils::new(&g, 4), Err(ShellError::GridTooSmall { .. })));
        assert!(GridStencils::new(&g, 2).is_ok());
    }
}
