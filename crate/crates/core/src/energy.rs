//! Reduced shell energy densities and their assembly over the grid.
//!
//! All densities are per unit reference area: the total internal energy is
//! `∫ w · a_{y₀} dx′`. The bending-type quantity entering the shell term is
//! the mixed form `Q = (∇m)ᵀ∇n_m`, which is what appears in the expansion of
//! `‖F‖²` through the thickness.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Location, Result, ShellError};
use crate::geometry::fundamental::SurfaceJet;
use crate::linalg::{Mat2, Vec3};
use crate::loads::LoadField;
use crate::reference::{faces, RefPoint, ReferenceField};
use crate::scalar::Scalar;

/// Relative floor on `a_m / a_{y₀}` and `A^±_m` below which evaluation aborts.
pub const EPS_ORIENT: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub mu: f64,
    pub lambda: f64,
    pub h: f64,
}

impl Material {
    pub fn new(mu: f64, lambda: f64, h: f64) -> Result<Self> {
        if !(mu > 0.0 && lambda > 0.0 && h > 0.0) {
            return Err(ShellError::Config(format!(
                "material parameters must be positive: mu={mu}, lambda={lambda}, h={h}"
            )));
        }
        Ok(Self { mu, lambda, h })
    }

    pub fn with_thickness(&self, h: f64) -> Self {
        Self { h, ..*self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    I,
    II,
    III,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::I, Model::II, Model::III];

    pub fn number(&self) -> u8 {
        match self {
            Model::I => 1,
            Model::II => 2,
            Model::III => 3,
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Model::I => "I",
            Model::II => "II",
            Model::III => "III",
        };
        f.write_str(s)
    }
}

impl FromStr for Model {
    type Err = ShellError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" | "I" | "i" => Ok(Model::I),
            "2" | "II" | "ii" => Ok(Model::II),
            "3" | "III" | "iii" => Ok(Model::III),
            other => Err(ShellError::Config(format!("unknown model '{other}'"))),
        }
    }
}

/// Calibration of additive constants and of the log coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstantsMode {
    /// Constants `−3μ/2`, `−λ/4`, log coefficient `−(λ+2μ)/4`, and an
    /// `a_{y₀}` factor on the volumetric square term.
    Literal,
    /// Constants and coefficients that reproduce through-thickness
    /// integration of the parent energy; vanishes at `m = y₀`.
    Consistent,
}

impl FromStr for ConstantsMode {
    type Err = ShellError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "paper" | "literal" | "paper-literal" => Ok(ConstantsMode::Literal),
            "oracle" | "consistent" | "oracle-consistent" => Ok(ConstantsMode::Consistent),
            other => Err(ShellError::Config(format!("unknown constants mode '{other}'"))),
        }
    }
}

impl fmt::Display for ConstantsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstantsMode::Literal => "literal",
            ConstantsMode::Consistent => "consistent",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyConfig {
    pub material: Material,
    pub model: Model,
    pub constants: ConstantsMode,
}

impl EnergyConfig {
    pub fn new(material: Material, model: Model) -> Self {
        Self { material, model, constants: ConstantsMode::Consistent }
    }

    pub fn log_coefficient(&self) -> f64 {
        let Material { mu, lambda, .. } = self.material;
        match self.constants {
            ConstantsMode::Consistent => -(mu + 0.5 * lambda),
            ConstantsMode::Literal => -(lambda + 2.0 * mu) / 4.0,
        }
    }
}

/// Deformed-surface quantities at one point.
#[derive(Clone, Copy, Debug)]
pub struct DeformedPoint<T> {
    pub first: Mat2<T>,
    /// `Q = (∇m)ᵀ∇n_m`, equal to `−II_m`.
    pub mixed: Mat2<T>,
    pub third: Mat2<T>,
    pub normal: Vec3<T>,
    pub area: T,
    pub mean: T,
    pub gauss: T,
    pub a_minus: T,
    pub a_plus: T,
}

impl<T: Scalar> DeformedPoint<T> {
    pub fn from_jet(jet: &SurfaceJet<T>, h: f64) -> Self {
        let area = jet.cross().norm();
        let (normal, dn) = jet.normal_derivatives();
        let d = [jet.d1, jet.d2];
        let first = Mat2::new(d[0].dot(&d[0]), d[0].dot(&d[1]), d[1].dot(&d[0]), d[1].dot(&d[1]));
        let q12 = (d[0].dot(&dn[1]) + d[1].dot(&dn[0])) * 0.5;
        let mixed = Mat2::new(d[0].dot(&dn[0]), q12, q12, d[1].dot(&dn[1]));
        let t12 = dn[0].dot(&dn[1]);
        let third = Mat2::new(dn[0].dot(&dn[0]), t12, t12, dn[1].dot(&dn[1]));
        let det_first = first.det();
        let inv = first.inverse();
        // L = I⁻¹ II with II = −Q
        let mean = -(inv * mixed).trace() * 0.5;
        let gauss = mixed.det() / det_first;
        let (a_minus, a_plus) = faces(mean, gauss, h);
        Self { first, mixed, third, normal, area, mean, gauss, a_minus, a_plus }
    }

    /// Rejects points violating orientation preservation.
    pub fn check(&self, rp: &RefPoint) -> Result<()> {
        let loc = Location::at(rp.x.0, rp.x.1);
        let ratio = self.area.re() / rp.area;
        let violations = [("a_m/a_y0", ratio), ("A-_m", self.a_minus.re()), ("A+_m", self.a_plus.re())];
        for (quantity, value) in violations {
            if !(value > EPS_ORIENT) {
                return Err(ShellError::OrientationViolation { location: loc, quantity, value });
            }
        }
        Ok(())
    }
}

/// Coefficients of the shell density, in the order
/// `F₀(I), F₀(Q), F₀(III), F₁(I), F₁(Q), F₂(I), F₂(Q), F₂(III)`, plus the
/// standalone term.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellCoefficients {
    pub c: [f64; 8],
    pub standalone: f64,
}

impl ShellCoefficients {
    /// Full fifth-order table.
    pub fn full(h: f64, mean: f64, gauss: f64) -> Self {
        let (h3, h5) = (h.powi(3), h.powi(5));
        let (hh, k) = (mean, gauss);
        Self {
            c: [
                h - h3 * k / 12.0 + h5 * k * k / 80.0,
                -h3 * hh / 3.0,
                h3 / 12.0 - h5 * k / 80.0,
                -h5 * hh * k / 40.0,
                h3 / 6.0 - h5 * k / 40.0,
                h3 / 12.0 + h5 * (4.0 * hh * hh - k) / 80.0,
                h5 * hh / 20.0,
                h5 / 80.0,
            ],
            standalone: h + h3 * k / 12.0,
        }
    }

    /// Third-order table. `literal` selects the standalone term
    /// `h³K/6` instead of the integrated value `h + h³K/12`.
    pub fn truncated(h: f64, mean: f64, gauss: f64, literal: bool) -> Self {
        let h3 = h.powi(3);
        let k = gauss;
        Self {
            c: [h - h3 * k / 12.0, -h3 * mean / 3.0, h3 / 12.0, 0.0, h3 / 6.0, h3 / 12.0, 0.0, 0.0],
            standalone: if literal { h3 * k / 6.0 } else { h + h3 * k / 12.0 },
        }
    }

    pub fn for_model(model: Model, mode: ConstantsMode, h: f64, mean: f64, gauss: f64) -> Self {
        match model {
            Model::I | Model::III => Self::full(h, mean, gauss),
            Model::II => Self::truncated(h, mean, gauss, mode == ConstantsMode::Literal),
        }
    }

    /// `Σ cᵢ·Fᵢ + standalone`.
    pub fn apply<T: Scalar>(&self, rp: &RefPoint, first: &Mat2<T>, mixed: &Mat2<T>, third: &Mat2<T>) -> T {
        let c = &self.c;
        let mut s = rp.f0(first) * c[0] + rp.f0(mixed) * c[1] + rp.f0(third) * c[2];
        if c[3] != 0.0 {
            s += rp.f1(first) * c[3];
        }
        s += rp.f1(mixed) * c[4] + rp.f2(first) * c[5];
        if c[6] != 0.0 || c[7] != 0.0 {
            s += rp.f2(mixed) * c[6] + rp.f2(third) * c[7];
        }
        s + self.standalone
    }
}

/// Shell density without the additive constant.
pub fn w_shell<T: Scalar>(dp: &DeformedPoint<T>, rp: &RefPoint, cfg: &EnergyConfig) -> T {
    let Material { mu, h, .. } = cfg.material;
    let coeffs = ShellCoefficients::for_model(cfg.model, cfg.constants, h, rp.mean, rp.gauss);
    coeffs.apply(rp, &dp.first, &dp.mixed, &dp.third) * (0.5 * mu)
}

/// Simpson reduction of the `log det F` contribution.
pub fn w_curv_log<T: Scalar>(dp: &DeformedPoint<T>, rp: &RefPoint, cfg: &EnergyConfig) -> T {
    let h = cfg.material.h;
    let r = dp.area / rp.area;
    let lm = (r * dp.a_minus / rp.a_minus).ln() * rp.a_minus;
    let l0 = r.ln() * 4.0;
    let lp = (r * dp.a_plus / rp.a_plus).ln() * rp.a_plus;
    (lm + l0 + lp) * (cfg.log_coefficient() * h / 6.0)
}

/// Simpson reduction of the `(det F)²` contribution.
pub fn w_curv_det2_simpson<T: Scalar>(dp: &DeformedPoint<T>, rp: &RefPoint, cfg: &EnergyConfig) -> T {
    let Material { lambda, h, .. } = cfg.material;
    let r = dp.area / rp.area;
    let sm = r * dp.a_minus / rp.a_minus;
    let sp = r * dp.a_plus / rp.a_plus;
    let sum = sm * sm * rp.a_minus + r * r * 4.0 + sp * sp * rp.a_plus;
    let scale = match cfg.constants {
        ConstantsMode::Consistent => 1.0,
        ConstantsMode::Literal => rp.area,
    };
    sum * (0.25 * lambda * h / 6.0 * scale)
}

/// Fifth-order Taylor reduction of the `(det F)²` contribution.
pub fn w_curv_det2_taylor<T: Scalar>(dp: &DeformedPoint<T>, rp: &RefPoint, cfg: &EnergyConfig) -> T {
    let Material { lambda, h, .. } = cfg.material;
    let r = dp.area / rp.area;
    let bracket = det2_taylor_bracket(rp.mean, rp.gauss, dp.mean - rp.mean, dp.gauss - rp.gauss, h);
    let scale = match cfg.constants {
        ConstantsMode::Consistent => 1.0,
        ConstantsMode::Literal => rp.area,
    };
    r * r * bracket * (0.25 * lambda * scale)
}

/// `h + h³/12(K + 4ΔH² + 2ΔK) + h⁵/80(16H²ΔH² − 8HΔHΔK − 4KΔH² + ΔK²)`.
pub fn det2_taylor_bracket<T: Scalar>(mean: f64, gauss: f64, dh: T, dk: T, h: f64) -> T {
    let (h3, h5) = (h.powi(3) / 12.0, h.powi(5) / 80.0);
    let dh2 = dh * dh;
    let third = (dh2 * 4.0 + dk * 2.0 + gauss) * h3;
    let fifth = (dh2 * (16.0 * mean * mean - 4.0 * gauss) - dh * dk * (8.0 * mean) + dk * dk) * h5;
    third + fifth + h
}

/// Additive constant per unit reference area.
pub fn constant_density(rp: &RefPoint, cfg: &EnergyConfig) -> f64 {
    let Material { mu, lambda, h } = cfg.material;
    let c = 1.5 * mu + 0.25 * lambda;
    match cfg.constants {
        ConstantsMode::Consistent => -c * (h + h.powi(3) * rp.gauss / 12.0),
        ConstantsMode::Literal => -c,
    }
}

/// Density terms at a point.
#[derive(Clone, Copy, Debug)]
pub struct Terms<T> {
    pub shell: T,
    pub log: T,
    pub det2: T,
    pub constant: f64,
}

impl<T: Scalar> Terms<T> {
    pub fn total(&self) -> T {
        self.shell + self.log + self.det2 + self.constant
    }
}

pub fn point_terms<T: Scalar>(jet: &SurfaceJet<T>, rp: &RefPoint, cfg: &EnergyConfig) -> Result<(Terms<T>, DeformedPoint<T>)> {
    let dp = DeformedPoint::from_jet(jet, cfg.material.h);
    dp.check(rp)?;
    let det2 = match cfg.model {
        Model::I | Model::II => w_curv_det2_simpson(&dp, rp, cfg),
        Model::III => w_curv_det2_taylor(&dp, rp, cfg),
    };
    let terms = Terms {
        shell: w_shell(&dp, rp, cfg),
        log: w_curv_log(&dp, rp, cfg),
        det2,
        constant: constant_density(rp, cfg),
    };
    Ok((terms, dp))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub shell_term: f64,
    pub curv_log_term: f64,
    pub curv_det2_term: f64,
    pub constant_term: f64,
    pub load_term: f64,
    pub total: f64,
    /// Per-node internal densities (per unit reference area), when retained.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub densities: Option<Vec<f64>>,
}

impl EnergyBreakdown {
    pub fn internal(&self) -> f64 {
        self.shell_term + self.curv_log_term + self.curv_det2_term + self.constant_term
    }
}

/// Total reduced energy of a state given by its jets at the reference nodes.
pub fn total_energy(
    reference: &ReferenceField,
    jets: &[SurfaceJet<f64>],
    cfg: &EnergyConfig,
    loads: Option<&LoadField>,
    keep_densities: bool,
) -> Result<EnergyBreakdown> {
    let grid = &reference.grid;
    if jets.len() != grid.len() {
        return Err(ShellError::ShapeMismatch(format!("{} state jets for {} nodes", jets.len(), grid.len())));
    }
    let weights = grid.simpson_weights();
    let per_node: Vec<Terms<f64>> = jets
        .par_iter()
        .zip(reference.points.par_iter())
        .enumerate()
        .map(|(p, (jet, rp))| {
            point_terms(jet, rp, cfg).map(|t| t.0).map_err(|e| locate(e, grid.ij(p)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = EnergyBreakdown::default();
    for (p, t) in per_node.iter().enumerate() {
        let w = weights[p] * reference.points[p].area;
        out.shell_term += w * t.shell;
        out.curv_log_term += w * t.log;
        out.curv_det2_term += w * t.det2;
        out.constant_term += w * t.constant;
    }
    if let Some(loads) = loads {
        out.load_term = loads.potential(reference, jets);
    }
    out.total = out.internal() - out.load_term;
    if keep_densities {
        out.densities = Some(per_node.iter().map(|t| t.total()).collect());
    }
    Ok(out)
}

/// For Model II with literal constants, how far the literal standalone
/// term `h³K/6` falls from the integrated `h + h³K/12`, as an energy:
/// `(μ/2)∫ a_{y₀}(h + h³K/12 − h³K/6) dx′`. `None` in every other setting.
pub fn standalone_gap(reference: &ReferenceField, cfg: &EnergyConfig) -> Option<f64> {
    if cfg.model != Model::II || cfg.constants != ConstantsMode::Literal {
        return None;
    }
    let h = cfg.material.h;
    let literal = |k: f64| ShellCoefficients::truncated(h, 0.0, k, true).standalone;
    let integrated = |k: f64| ShellCoefficients::truncated(h, 0.0, k, false).standalone;
    let w = reference.grid.simpson_weights();
    let gap: f64 = reference.points.iter().zip(&w).map(|(rp, w)| w * rp.area * (integrated(rp.gauss) - literal(rp.gauss))).sum();
    Some(0.5 * cfg.material.mu * gap)
}

pub(crate) fn locate(e: ShellError, node: (usize, usize)) -> ShellError {
    match e {
        ShellError::OrientationViolation { mut location, quantity, value } => {
            location.node = Some(node);
            ShellError::OrientationViolation { location, quantity, value }
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::chart::{CatalogChart, Chart};
    use crate::geometry::grid::Grid;

    fn plate_point(h: f64) -> RefPoint {
        RefPoint::new(&CatalogChart::plate().jet(0.5, 0.5), (0.5, 0.5), h).unwrap()
    }

    fn cfg(model: Model, h: f64) -> EnergyConfig {
        EnergyConfig::new(Material::new(1.3, 0.7, h).unwrap(), model)
    }

    fn stretched_plate_jet(c1: f64, c2: f64) -> SurfaceJet<f64> {
        SurfaceJet {
            pos: Vec3::zero(),
            d1: Vec3([c1, 0.0, 0.0]),
            d2: Vec3([0.0, c2, 0.0]),
            ..SurfaceJet::zero()
        }
    }

    #[test]
    fn plate_identity_densities_vanish() {
        let h = 0.1;
        let rp = plate_point(h);
        for model in Model::ALL {
            let c = cfg(model, h);
            let (t, _) = point_terms(&stretched_plate_jet(1.0, 1.0), &rp, &c).unwrap();
            assert!(t.total().abs() < 1e-15, "{model}: {}", t.total());
        }
    }

    #[test]
    fn plate_in_plane_stretch() {
        let h = 0.2;
        let rp = plate_point(h);
        let c = cfg(Model::I, h);
        let dp = DeformedPoint::from_jet(&stretched_plate_jet(2.0, 1.0), h);
        let mu = c.material.mu;
        // I_m = diag(4,1): F₀ = 5
        assert!((w_shell(&dp, &rp, &c) - 0.5 * mu * (5.0 * h + h)).abs() < 1e-14);
        // a_m = 2
        let lam = c.material.lambda;
        assert!((w_curv_det2_simpson(&dp, &rp, &c) - 0.25 * lam * h * 4.0).abs() < 1e-14);
        assert!((w_curv_log(&dp, &rp, &c) - c.log_coefficient() * h * 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn models_one_and_two_agree_for_flat_plate_deformations() {
        let h = 0.3;
        let rp = plate_point(h);
        let dp = DeformedPoint::from_jet(&stretched_plate_jet(1.3, 0.8), h);
        let a = w_shell(&dp, &rp, &cfg(Model::I, h));
        let b = w_shell(&dp, &rp, &cfg(Model::II, h));
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn truncated_table_is_full_table_to_third_order() {
        let (mean, gauss) = (-0.7, 0.3);
        for k in 0..8 {
            // the difference must be exactly fifth order in h
            let gap = |h: f64| ShellCoefficients::full(h, mean, gauss).c[k] - ShellCoefficients::truncated(h, mean, gauss, false).c[k];
            let (a, b) = (gap(0.1) / 0.1f64.powi(5), gap(0.2) / 0.2f64.powi(5));
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "coefficient {k}: {a} vs {b}");
        }
        let h = 0.1;
        assert_eq!(ShellCoefficients::full(h, mean, gauss).standalone, ShellCoefficients::truncated(h, mean, gauss, false).standalone);
        assert!((ShellCoefficients::truncated(h, mean, gauss, true).standalone - h.powi(3) * gauss / 6.0).abs() < 1e-18);
    }

    #[test]
    fn collapse_is_reported() {
        let rp = plate_point(0.1);
        let err = point_terms(&stretched_plate_jet(1e-12, 1.0), &rp, &cfg(Model::I, 0.1)).unwrap_err();
        assert!(matches!(err, ShellError::OrientationViolation { quantity: "a_m/a_y0", .. }));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn log_barrier_blows_up() {
        let rp = plate_point(0.1);
        let c = cfg(Model::I, 0.1);
        let mut last = f64::NEG_INFINITY;
        for k in 1..8 {
            let s = 10f64.powi(-k);
            let dp = DeformedPoint::from_jet(&stretched_plate_jet(s, 1.0), 0.1);
            let w = w_curv_log(&dp, &rp, &c);
            assert!(w > last);
            last = w;
        }
    }

    #[test]
    fn dual_and_plain_evaluation_agree() {
        use crate::scalar::Dual;
        let chart = CatalogChart::sphere_cap(1.0, 0.5);
        let rp = RefPoint::new(&chart.jet(1.4, 0.2), (1.4, 0.2), 0.1).unwrap();
        let jet = chart.jet(1.45, 0.1);
        let comps = jet.components();
        let mut dual = [Vec3::<Dual<18>>::zero(); 6];
        for k in 0..6 {
            for i in 0..3 {
                dual[k].0[i] = Dual::variable(comps[k].0[i], 3 * k + i);
            }
        }
        let djet = SurfaceJet::from_components(dual);
        for model in Model::ALL {
            let c = cfg(model, 0.1);
            let (tf, _) = point_terms(&jet, &rp, &c).unwrap();
            let (td, _) = point_terms(&djet, &rp, &c).unwrap();
            assert!((tf.total() - td.total().re).abs() < 1e-14);
            // spot check one partial derivative
            let step = 1e-6;
            let mut plus = comps;
            plus[3].0[1] += step;
            let mut minus = comps;
            minus[3].0[1] -= step;
            let e = |c: [Vec3<f64>; 6]| point_terms(&SurfaceJet::from_components(c), &rp, &cfg(model, 0.1)).unwrap().0.total();
            let fd = (e(plus) - e(minus)) / (2.0 * step);
            assert!((fd - td.total().eps[10]).abs() < 1e-7 * (1.0 + fd.abs()));
        }
    }

    #[test]
    fn sphere_natural_state_total_vanishes() {
        let chart = CatalogChart::sphere_cap(1.0, 0.4);
        let grid = Grid::new(chart.domain(), 9, 9).unwrap();
        let h = 0.1;
        let r = ReferenceField::from_chart(&chart, &grid, h).unwrap();
        let jets: Vec<_> = (0..grid.len()).map(|p| { let (a, b) = grid.point(p); chart.jet(a, b) }).collect();
        for model in Model::ALL {
            let e = total_energy(&r, &jets, &cfg(model, h), None, false).unwrap();
            assert!(e.total.abs() < 1e-14, "{model}: {}", e.total);
        }
    }
}
