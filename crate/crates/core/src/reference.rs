//! Precomputed reference-surface fields on the quadrature grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Location, Result, ShellError};
use crate::geometry::chart::Chart;
use crate::geometry::fundamental::{fundamental_data, SurfaceJet};
use crate::geometry::grid::Grid;
use crate::geometry::stencil::finite_difference_derivatives;
use crate::linalg::{Mat2, Vec3};
use crate::scalar::Scalar;

/// Reference quantities at one grid node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefPoint {
    pub x: (f64, f64),
    pub pos: Vec3<f64>,
    pub normal: Vec3<f64>,
    pub first: Mat2<f64>,
    pub first_inv: Mat2<f64>,
    pub first_inv_sqrt: Mat2<f64>,
    pub second: Mat2<f64>,
    pub shape: Mat2<f64>,
    pub mean: f64,
    pub gauss: f64,
    pub area: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    /// `1 + hH + h²K/4` (value of `b` at `x₃ = −h/2`).
    pub a_minus: f64,
    /// `1 − hH + h²K/4` (value of `b` at `x₃ = +h/2`).
    pub a_plus: f64,
    /// Kernels of the contractions `F₀`, `F₁`, `F₂`.
    pub k0: Mat2<f64>,
    pub k1: Mat2<f64>,
    pub k2: Mat2<f64>,
    /// `|I^{1/2} L I^{-1/2}|` (Frobenius).
    pub shape_norm: f64,
}

impl RefPoint {
    pub fn new(jet: &SurfaceJet<f64>, x: (f64, f64), h: f64) -> Result<Self> {
        let fd = fundamental_data(jet, Location::at(x.0, x.1))?;
        let first_inv = fd.first.inverse();
        let first_inv_sqrt = fd.first.sym_apply(|l| 1.0 / l.sqrt());
        let first_sqrt = fd.first.sym_apply(f64::sqrt);
        let l = fd.shape;
        let k0 = first_inv;
        let k1 = l * first_inv + first_inv * l.transpose();
        let k2 = l * first_inv * l.transpose();
        let shape_norm = (first_sqrt * l * first_inv_sqrt).frobenius();
        let (a_minus, a_plus) = faces(fd.mean, fd.gauss, h);
        Ok(Self {
            x,
            pos: jet.pos,
            normal: fd.normal,
            first: fd.first,
            first_inv,
            first_inv_sqrt,
            second: fd.second,
            shape: l,
            mean: fd.mean,
            gauss: fd.gauss,
            area: fd.area,
            kappa1: fd.kappa1,
            kappa2: fd.kappa2,
            a_minus,
            a_plus,
            k0,
            k1,
            k2,
            shape_norm,
        })
    }

    /// `F₀(Q) = ⟨Q, I⁻¹⟩`.
    pub fn f0<T: Scalar>(&self, q: &Mat2<T>) -> T {
        q.inner_f64(&self.k0)
    }

    /// `F₁(Q) = ⟨Q, L I⁻¹ + I⁻¹ Lᵀ⟩`.
    pub fn f1<T: Scalar>(&self, q: &Mat2<T>) -> T {
        q.inner_f64(&self.k1)
    }

    /// `F₂(Q) = ⟨Q, L I⁻¹ Lᵀ⟩`.
    pub fn f2<T: Scalar>(&self, q: &Mat2<T>) -> T {
        q.inner_f64(&self.k2)
    }

    /// `b(x₃) = 1 − 2H x₃ + K x₃²`.
    pub fn b(&self, x3: f64) -> f64 {
        1.0 - 2.0 * self.mean * x3 + self.gauss * x3 * x3
    }

    pub fn max_abs_kappa(&self) -> f64 {
        self.kappa1.abs().max(self.kappa2.abs())
    }
}

/// `(A⁻, A⁺) = (1 + hH + h²K/4, 1 − hH + h²K/4)`.
pub fn faces<T: Scalar>(mean: T, gauss: T, h: f64) -> (T, T) {
    let q = gauss * (0.25 * h * h) + 1.0;
    (q + mean * h, q - mean * h)
}

/// Result of the geometric thickness condition `h·max|κ| < 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThicknessCheck {
    pub margin: f64,
    pub pass: bool,
    /// `2 / max|κ|`, infinite for flat references.
    pub h_geom: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceField {
    pub name: String,
    pub grid: Grid,
    pub h: f64,
    pub points: Vec<RefPoint>,
    /// `2·max |I^{1/2} L I^{-1/2}|`.
    pub c_y0: f64,
    pub max_t: f64,
    pub max_gauss: f64,
    pub max_neg_gauss: f64,
    pub max_abs_kappa: f64,
}

impl ReferenceField {
    pub fn from_jets(name: &str, grid: &Grid, jets: &[SurfaceJet<f64>], h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(ShellError::Config(format!("thickness must be positive, got {h}")));
        }
        if jets.len() != grid.len() {
            return Err(ShellError::ShapeMismatch(format!("{} jets for {} nodes", jets.len(), grid.len())));
        }
        let points = jets
            .par_iter()
            .enumerate()
            .map(|(p, jet)| {
                RefPoint::new(jet, grid.point(p), h).map_err(|e| match e {
                    ShellError::DegenerateChart(mut loc, v) => {
                        loc.node = Some(grid.ij(p));
                        ShellError::DegenerateChart(loc, v)
                    }
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let fold = |f: &dyn Fn(&RefPoint) -> f64| points.iter().map(f).fold(0.0_f64, f64::max);
        let c_y0 = 2.0 * fold(&|p| p.shape_norm);
        let mut field = Self {
            name: name.to_string(),
            grid: grid.clone(),
            h,
            c_y0,
            max_t: 0.0,
            max_gauss: fold(&|p| p.gauss),
            max_neg_gauss: fold(&|p| -p.gauss),
            max_abs_kappa: fold(&|p| p.max_abs_kappa()),
            points,
        };
        field.max_t = field.points.iter().map(|p| field.t_value(p)).fold(0.0_f64, f64::max);
        Ok(field)
    }

    /// Reference built from analytic chart derivatives.
    pub fn from_chart(chart: &dyn Chart, grid: &Grid, h: f64) -> Result<Self> {
        let jets: Vec<_> = (0..grid.len())
            .map(|p| {
                let (x1, x2) = grid.point(p);
                chart.jet(x1, x2)
            })
            .collect();
        Self::from_jets(&chart.name(), grid, &jets, h)
    }

    /// Reference built from nodal positions through finite differences.
    pub fn from_nodes(name: &str, grid: &Grid, nodes: &[Vec3<f64>], order: usize, h: f64) -> Result<Self> {
        let jets = finite_difference_derivatives(grid, nodes, order)?;
        Self::from_jets(name, grid, &jets, h)
    }

    /// `T = K/12 + (|H| + C/4)²/3` at a point.
    pub fn t_value(&self, p: &RefPoint) -> f64 {
        let s = p.mean.abs() + 0.25 * self.c_y0;
        p.gauss / 12.0 + s * s / 3.0
    }

    pub fn nodes(&self) -> Vec<Vec3<f64>> {
        self.points.iter().map(|p| p.pos).collect()
    }

    pub fn check_thickness(&self, h: f64) -> ThicknessCheck {
        let margin = h * self.max_abs_kappa;
        let h_geom = if self.max_abs_kappa > 0.0 { 2.0 / self.max_abs_kappa } else { f64::INFINITY };
        ThicknessCheck { margin, pass: margin < 2.0, h_geom }
    }

    /// Cache key: chart name, grid size and thickness.
    pub fn cache_key(&self) -> String {
        format!("{}_{}x{}_h{}", self.name, self.grid.n1, self.grid.n2, self.h)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer(f, self)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::io::BufReader::new(std::fs::File::open(path)?);
        Ok(serde_json::from_reader(f)?)
    }
}
