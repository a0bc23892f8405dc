//! Reduced energies against through-thickness integration of the 3D energy
//! for a smooth test deformation, over a list of thicknesses.

use serde::{Deserialize, Serialize};

use crate::energy::{total_energy, ConstantsMode, EnergyConfig, Material, Model};
use crate::error::Result;
use crate::geometry::chart::{Chart, PerturbedChart};
use crate::geometry::fundamental::SurfaceJet;
use crate::geometry::grid::Grid;
use crate::reference::ReferenceField;
use crate::volumetric::{integrate_3d, InverseMode, ThicknessQuadrature};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestDeformation {
    /// `m = y₀`
    Natural,
    /// Smooth perturbation of `y₀` with the configured amplitude.
    Perturbed,
}

impl TestDeformation {
    pub fn label(&self) -> &'static str {
        match self {
            TestDeformation::Natural => "natural",
            TestDeformation::Perturbed => "perturbed",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub h: f64,
    pub deformation: TestDeformation,
    pub model: Model,
    pub reduced: f64,
    pub volumetric: f64,
    pub error: f64,
    /// `error / (μ h |ω|)`
    pub scaled_error: f64,
}

pub struct CompareSetup<'a> {
    pub chart: &'a dyn Chart,
    pub grid: Grid,
    pub mu: f64,
    pub lambda: f64,
    pub amplitude: f64,
    pub thickness_points: usize,
    pub constants: ConstantsMode,
    pub models: Vec<Model>,
}

fn chart_jets(chart: &dyn Chart, grid: &Grid) -> Vec<SurfaceJet<f64>> {
    (0..grid.len())
        .map(|p| {
            let (x1, x2) = grid.point(p);
            chart.jet(x1, x2)
        })
        .collect()
}

/// Rows for every `h`, deformation and model.
pub fn compare_reduction(setup: &CompareSetup, h_list: &[f64]) -> Result<Vec<CompareRow>> {
    let ref_jets = chart_jets(setup.chart, &setup.grid);
    let perturbed = PerturbedChart::new(setup.chart, setup.amplitude);
    let def_jets = chart_jets(&perturbed, &setup.grid);
    let mut rows = Vec::new();
    for &h in h_list {
        let reference = ReferenceField::from_jets(&setup.chart.name(), &setup.grid, &ref_jets, h)?;
        let mat = Material::new(setup.mu, setup.lambda, h)?;
        let quad = ThicknessQuadrature::gauss_legendre(setup.thickness_points, h);
        let area: f64 = setup.grid.simpson_weights().iter().zip(&reference.points).map(|(w, p)| w * p.area).sum();
        for (kind, jets) in [(TestDeformation::Natural, &ref_jets), (TestDeformation::Perturbed, &def_jets)] {
            let volumetric = integrate_3d(&reference, &ref_jets, jets, &mat, &quad, InverseMode::ClosedForm)?;
            for &model in &setup.models {
                let cfg = EnergyConfig { material: mat, model, constants: setup.constants };
                let reduced = total_energy(&reference, jets, &cfg, None, false)?.internal();
                let error = (reduced - volumetric).abs();
                rows.push(CompareRow {
                    h,
                    deformation: kind,
                    model,
                    reduced,
                    volumetric,
                    error,
                    scaled_error: error / (setup.mu * h * area),
                });
            }
        }
    }
    Ok(rows)
}

/// Least-squares slope of `log e` against `log h`.
pub fn fit_order(h: &[f64], e: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = h.iter().zip(e).map(|(h, e)| (h.ln(), e.max(f64::MIN_POSITIVE).ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Fitted order per model over the perturbed rows.
pub fn fitted_orders(rows: &[CompareRow]) -> Vec<(Model, f64)> {
    let mut models: Vec<Model> = rows.iter().map(|r| r.model).collect();
    models.sort_by_key(|m| m.number());
    models.dedup();
    models
        .into_iter()
        .map(|m| {
            let (h, e): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| r.model == m && r.deformation == TestDeformation::Perturbed)
                .map(|r| (r.h, r.error))
                .unzip();
            (m, fit_order(&h, &e))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::chart::CatalogChart;

    #[test]
    fn slope_of_power_law() {
        let h = [0.1, 0.05, 0.025];
        let e: Vec<f64> = h.iter().map(|h: &f64| 3.0 * h.powi(5)).collect();
        assert!((fit_order(&h, &e) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn natural_rows_vanish() {
        let chart = CatalogChart::cylinder_patch(1.0, 1.0);
        let setup = CompareSetup {
            grid: Grid::new(chart.domain(), 9, 9).unwrap(),
            chart: &chart,
            mu: 1.0,
            lambda: 2.0,
            amplitude: 0.05,
            thickness_points: 16,
            constants: ConstantsMode::Consistent,
            models: Model::ALL.to_vec(),
        };
        let rows = compare_reduction(&setup, &[0.05]).unwrap();
        assert_eq!(rows.len(), 6);
        for r in rows.iter().filter(|r| r.deformation == TestDeformation::Natural) {
            assert!(r.scaled_error <= 1e-12, "{r:?}");
        }
    }
}
