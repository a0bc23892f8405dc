//! Reduction of 3D body forces and tractions to midsurface resultants, and
//! the linear load potential `L(m, n_m)`.

use serde::{Deserialize, Serialize};
use std::str::FromStr;

use crate::error::{Result, ShellError};
use crate::geometry::fundamental::SurfaceJet;
use crate::geometry::grid::{simpson_1d, Grid};
use crate::linalg::Vec3;
use crate::reference::ReferenceField;
use crate::scalar::Scalar;
use crate::volumetric::ThicknessQuadrature;

/// An edge of the parameter rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Edge {
    /// `x₁ = a₁`
    Left,
    /// `x₁ = b₁`
    Right,
    /// `x₂ = a₂`
    Bottom,
    /// `x₂ = b₂`
    Top,
}

impl Edge {
    pub const ALL: [Edge; 4] = [Edge::Left, Edge::Right, Edge::Bottom, Edge::Top];

    /// Node indices along the edge, in increasing tangential parameter.
    pub fn nodes(&self, grid: &Grid) -> Vec<usize> {
        match self {
            Edge::Left => (0..grid.n2).map(|j| grid.index(0, j)).collect(),
            Edge::Right => (0..grid.n2).map(|j| grid.index(grid.n1 - 1, j)).collect(),
            Edge::Bottom => (0..grid.n1).map(|i| grid.index(i, 0)).collect(),
            Edge::Top => (0..grid.n1).map(|i| grid.index(i, grid.n2 - 1)).collect(),
        }
    }

    fn spacing(&self, grid: &Grid) -> f64 {
        match self {
            Edge::Left | Edge::Right => grid.dx2(),
            Edge::Bottom | Edge::Top => grid.dx1(),
        }
    }

    fn tangent_is_d2(&self) -> bool {
        matches!(self, Edge::Left | Edge::Right)
    }
}

impl FromStr for Edge {
    type Err = ShellError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "left" => Ok(Edge::Left),
            "right" => Ok(Edge::Right),
            "bottom" => Ok(Edge::Bottom),
            "top" => Ok(Edge::Top),
            other => Err(ShellError::Config(format!("unknown edge '{other}'"))),
        }
    }
}

/// Measure used for boundary curve integrals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeMeasure {
    /// `dτ` in the parameter domain.
    Parameter,
    /// `|∂_τ y₀| dτ`.
    Surface,
}

/// Per-node line-integration weights over the union of `edges`.
pub fn edge_weights(reference: &ReferenceField, jets: &[SurfaceJet<f64>], edges: &[Edge], measure: EdgeMeasure) -> Vec<f64> {
    let grid = &reference.grid;
    let mut w = vec![0.0; grid.len()];
    for edge in edges {
        let nodes = edge.nodes(grid);
        let ws = simpson_1d(nodes.len(), edge.spacing(grid));
        for (p, wk) in nodes.into_iter().zip(ws) {
            let ds = match measure {
                EdgeMeasure::Parameter => 1.0,
                EdgeMeasure::Surface => {
                    let j = &jets[p];
                    if edge.tangent_is_d2() { j.d2.norm() } else { j.d1.norm() }
                }
            };
            w[p] += wk * ds;
        }
    }
    w
}

/// Polynomial profile in `x₃`: `Σ cₖ x₃ᵏ`, vector valued.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Profile(pub Vec<Vec3<f64>>);

impl Profile {
    pub fn constant(v: [f64; 3]) -> Self {
        Profile(vec![Vec3(v)])
    }

    pub fn eval(&self, x3: f64) -> Vec3<f64> {
        let mut acc = Vec3::zero();
        for c in self.0.iter().rev() {
            acc = acc.scale(x3) + *c;
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.max_abs() == 0.0)
    }
}

/// Loads in 3D form.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LoadSpec {
    /// Body force per unit volume.
    pub body: Profile,
    /// Traction on `x₃ = h/2`.
    pub face_plus: Vec3<f64>,
    /// Traction on `x₃ = −h/2`.
    pub face_minus: Vec3<f64>,
    /// Lateral traction on `γ_t × (−h/2, h/2)`.
    pub lateral: Profile,
}

/// Midsurface resultants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resultants {
    /// `f̄ = ∫ f̃ dx₃ + t̃⁺ + t̃⁻`
    pub force: Vec3<f64>,
    /// `∫ x₃ f̃ dx₃ + (h/2)(t̃⁺ − t̃⁻)`
    pub moment: Vec3<f64>,
    /// `t̄ = ∫ t̃ dx₃`
    pub edge_force: Vec3<f64>,
    /// `∫ x₃ t̃ dx₃`
    pub edge_moment: Vec3<f64>,
}

impl Resultants {
    pub fn zero() -> Self {
        Self { force: Vec3::zero(), moment: Vec3::zero(), edge_force: Vec3::zero(), edge_moment: Vec3::zero() }
    }
}

pub fn reduce_loads(spec: &LoadSpec, h: f64, quad: &ThicknessQuadrature) -> Resultants {
    let integrate = |p: &Profile, k: i32| -> Vec3<f64> {
        let mut acc = Vec3::zero();
        for (x3, w) in quad.nodes.iter().zip(&quad.weights) {
            acc = acc + p.eval(*x3).scale(w * x3.powi(k));
        }
        acc
    };
    Resultants {
        force: integrate(&spec.body, 0) + spec.face_plus + spec.face_minus,
        moment: integrate(&spec.body, 1) + (spec.face_plus - spec.face_minus).scale(0.5 * h),
        edge_force: integrate(&spec.lateral, 0),
        edge_moment: integrate(&spec.lateral, 1),
    }
}

/// Nodal load data ready for quadrature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoadField {
    pub force: Vec<Vec3<f64>>,
    pub moment: Vec<Vec3<f64>>,
    pub edge_force: Vec<Vec3<f64>>,
    pub edge_moment: Vec<Vec3<f64>>,
    /// Surface weights (parameter measure `dx′`).
    pub area_weights: Vec<f64>,
    /// Line weights on `γ_t`.
    pub edge_weights: Vec<f64>,
}

impl LoadField {
    /// Spatially uniform resultants; `traction_edges` is `γ_t`.
    pub fn uniform(
        reference: &ReferenceField,
        ref_jets: &[SurfaceJet<f64>],
        res: &Resultants,
        traction_edges: &[Edge],
        measure: EdgeMeasure,
    ) -> Self {
        let n = reference.grid.len();
        Self {
            force: vec![res.force; n],
            moment: vec![res.moment; n],
            edge_force: vec![res.edge_force; n],
            edge_moment: vec![res.edge_moment; n],
            area_weights: reference.grid.simpson_weights(),
            edge_weights: edge_weights(reference, ref_jets, traction_edges, measure),
        }
    }

    /// Tabulated per-node area resultants, no edge loads.
    pub fn tabulated(reference: &ReferenceField, force: Vec<Vec3<f64>>, moment: Vec<Vec3<f64>>) -> Result<Self> {
        let n = reference.grid.len();
        if force.len() != n || moment.len() != n {
            return Err(ShellError::ShapeMismatch(format!("load table has {} rows for {n} nodes", force.len())));
        }
        Ok(Self {
            force,
            moment,
            edge_force: vec![Vec3::zero(); n],
            edge_moment: vec![Vec3::zero(); n],
            area_weights: reference.grid.simpson_weights(),
            edge_weights: vec![0.0; n],
        })
    }

    /// Contribution of node `p` to `L`, given the displacement and normal change there.
    pub fn node_potential<T: Scalar>(&self, p: usize, v: &Vec3<T>, dn: &Vec3<T>) -> T {
        let mut out = (v.dot(&Vec3::from_f64(self.force[p])) + dn.dot(&Vec3::from_f64(self.moment[p]))) * self.area_weights[p];
        if self.edge_weights[p] != 0.0 {
            out += (v.dot(&Vec3::from_f64(self.edge_force[p])) + dn.dot(&Vec3::from_f64(self.edge_moment[p])))
                * self.edge_weights[p];
        }
        out
    }

    pub fn potential(&self, reference: &ReferenceField, jets: &[SurfaceJet<f64>]) -> f64 {
        jets.iter()
            .zip(&reference.points)
            .enumerate()
            .map(|(p, (jet, rp))| {
                let n = jet.cross();
                let n = n.scale(1.0 / n.norm());
                self.node_potential(p, &(jet.pos - rp.pos), &(n - rp.normal))
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::chart::{CatalogChart, Chart};
    use proptest::prelude::*;

    fn v(x: f64, y: f64, z: f64) -> Vec3<f64> {
        Vec3([x, y, z])
    }

    #[test]
    fn reduce_examples() {
        let h = 0.3;
        let q = ThicknessQuadrature::gauss_legendre(4, h);
        let c = [1.0, -2.0, 0.5];
        let r = reduce_loads(&LoadSpec { body: Profile::constant(c), ..Default::default() }, h, &q);
        assert!((r.force - v(1.0, -2.0, 0.5).scale(h)).max_abs() < 1e-15);
        assert!(r.moment.max_abs() < 1e-16);

        let p = 2.0;
        let spec = LoadSpec { face_plus: v(0.0, 0.0, p), face_minus: v(0.0, 0.0, -p), ..Default::default() };
        let r = reduce_loads(&spec, h, &q);
        assert!(r.force.max_abs() == 0.0 && (r.moment - v(0.0, 0.0, h * p)).max_abs() < 1e-15);

        let spec = LoadSpec { body: Profile(vec![Vec3::zero(), Vec3(c)]), ..Default::default() };
        let r = reduce_loads(&spec, h, &q);
        assert!(r.force.max_abs() < 1e-16);
        assert!((r.moment - Vec3(c).scale(h.powi(3) / 12.0)).max_abs() < 1e-15);
    }

    fn setup() -> (ReferenceField, Vec<SurfaceJet<f64>>) {
        let chart = CatalogChart::cylinder_patch(1.0, 1.0);
        let grid = Grid::new(chart.domain(), 9, 11).unwrap();
        let jets: Vec<_> = (0..grid.len()).map(|p| { let (a, b) = grid.point(p); chart.jet(a, b) }).collect();
        (ReferenceField::from_jets("cyl", &grid, &jets, 0.1).unwrap(), jets)
    }

    #[test]
    fn edge_lengths() {
        let (r, jets) = setup();
        let d = r.grid.domain;
        let w = edge_weights(&r, &jets, &Edge::ALL, EdgeMeasure::Parameter);
        assert!((w.iter().sum::<f64>() - 2.0 * (d.width() + d.height())).abs() < 1e-12);
        // arclength parametrization: same lengths through y₀
        let w = edge_weights(&r, &jets, &Edge::ALL, EdgeMeasure::Surface);
        assert!((w.iter().sum::<f64>() - 2.0 * (d.width() + d.height())).abs() < 1e-12);
    }

    #[test]
    fn translation_potential() {
        let (r, jets) = setup();
        let f = v(0.1, 0.2, -0.3);
        let t = v(1.0, 0.0, 0.5);
        let res = Resultants { force: f, edge_force: t, ..Resultants::zero() };
        let field = LoadField::uniform(&r, &jets, &res, &[Edge::Top], EdgeMeasure::Parameter);
        assert_eq!(field.potential(&r, &jets), 0.0);
        let c = v(0.3, -1.0, 2.0);
        let moved: Vec<_> = jets.iter().map(|j| SurfaceJet { pos: j.pos + c, ..*j }).collect();
        let expect = f.dot(&c) * r.grid.domain.area() + t.dot(&c) * r.grid.domain.width();
        assert!((field.potential(&r, &moved) - expect).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn potential_is_linear(a in -2.0..2.0f64, b in -2.0..2.0f64, s in 0..1000u64) {
            let (r, jets) = setup();
            let res = Resultants { force: v(0.3, 0.1, 1.0), moment: v(0.0, 0.5, -0.2), edge_force: v(1.0, 1.0, 0.0), edge_moment: v(0.1, 0.0, 0.3) };
            let field = LoadField::uniform(&r, &jets, &res, &[Edge::Left, Edge::Top], EdgeMeasure::Surface);
            let n = r.grid.len();
            let pseudo = |k: usize, salt: u64| ((k as u64 * 2654435761 + salt * 97 + s) % 1000) as f64 / 1000.0 - 0.5;
            let v1: Vec<_> = (0..n).map(|k| (v(pseudo(k, 1), pseudo(k, 2), pseudo(k, 3)), v(pseudo(k, 4), pseudo(k, 5), pseudo(k, 6)))).collect();
            let v2: Vec<_> = (0..n).map(|k| (v(pseudo(k, 7), pseudo(k, 8), pseudo(k, 9)), v(pseudo(k, 10), pseudo(k, 11), pseudo(k, 12)))).collect();
            let total = |d: &dyn Fn(usize) -> (Vec3<f64>, Vec3<f64>)| (0..n).map(|k| { let (dv, dn) = d(k); field.node_potential(k, &dv, &dn) }).sum::<f64>();
            let l1 = total(&|k| v1[k]);
            let l2 = total(&|k| v2[k]);
            let lc = total(&|k| (v1[k].0.scale_pair(a, v2[k].0, b), v1[k].1.scale_pair(a, v2[k].1, b)));
            prop_assert!((lc - (a * l1 + b * l2)).abs() < 1e-12);
        }
    }

    trait ScalePair {
        fn scale_pair(&self, a: f64, o: Vec3<f64>, b: f64) -> Vec3<f64>;
    }
    impl ScalePair for Vec3<f64> {
        fn scale_pair(&self, a: f64, o: Vec3<f64>, b: f64) -> Vec3<f64> {
            self.scale(a) + o.scale(b)
        }
    }
}
