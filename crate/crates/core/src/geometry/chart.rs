//! Analytic surface charts over rectangular parameter domains.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Result, ShellError};
use crate::geometry::fundamental::SurfaceJet;
use crate::linalg::Vec3;

/// Rectangle `[a₁,b₁]×[a₂,b₂]` in parameter space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
}

impl Domain {
    pub fn new(a1: f64, b1: f64, a2: f64, b2: f64) -> Self {
        Self { a1, b1, a2, b2 }
    }

    pub fn unit() -> Self {
        Self::new(0.0, 1.0, 0.0, 1.0)
    }

    pub fn width(&self) -> f64 {
        self.b1 - self.a1
    }

    pub fn height(&self) -> f64 {
        self.b2 - self.a2
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.a1 + self.b1), 0.5 * (self.a2 + self.b2))
    }

    /// Normalized coordinates in `[0,1]²`.
    pub fn normalize(&self, x1: f64, x2: f64) -> (f64, f64) {
        ((x1 - self.a1) / self.width(), (x2 - self.a2) / self.height())
    }
}

/// A surface with analytically evaluable derivatives.
pub trait Chart: Send + Sync {
    fn domain(&self) -> Domain;
    fn jet(&self, x1: f64, x2: f64) -> SurfaceJet<f64>;
    fn name(&self) -> String;

    fn position(&self, x1: f64, x2: f64) -> Vec3<f64> {
        self.jet(x1, x2).pos
    }
}

/// Height functions available for graph charts `z = f(x₁,x₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum GraphFn {
    /// `c00 + c10 x + c01 y + c20 x² + c11 xy + c02 y²`
    Quadratic([f64; 6]),
    /// `A sin(k₁ x) sin(k₂ y)`
    Bump { amplitude: f64, k1: f64, k2: f64 },
}

impl GraphFn {
    /// `(f, f₁, f₂, f₁₁, f₁₂, f₂₂)`
    fn eval(&self, x: f64, y: f64) -> [f64; 6] {
        match *self {
            GraphFn::Quadratic(c) => [
                c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y,
                c[1] + 2.0 * c[3] * x + c[4] * y,
                c[2] + c[4] * x + 2.0 * c[5] * y,
                2.0 * c[3],
                c[4],
                2.0 * c[5],
            ],
            GraphFn::Bump { amplitude: a, k1, k2 } => {
                let (s1, c1) = (k1 * x).sin_cos();
                let (s2, c2) = (k2 * y).sin_cos();
                [
                    a * s1 * s2,
                    a * k1 * c1 * s2,
                    a * k2 * s1 * c2,
                    -a * k1 * k1 * s1 * s2,
                    a * k1 * k2 * c1 * c2,
                    -a * k2 * k2 * s1 * s2,
                ]
            }
        }
    }
}

/// Built-in chart catalog.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CatalogChart {
    /// `y = (x₁, x₂, 0)` on `[0,l₁]×[0,l₂]`.
    Plate { l1: f64, l2: f64 },
    /// Spherical patch around the equator, `x₁ = θ ∈ [π/2−α, π/2+α]`,
    /// `x₂ = φ ∈ [−α, α]`, outward normal.
    SphereCap { radius: f64, half_angle: f64 },
    /// `y = (R cos(s/R), R sin(s/R), z)`, `x₁ = s` (arc length) over the
    /// opening angle, `x₂ = z ∈ [0, height]`, outward normal.
    CylinderPatch { radius: f64, height: f64, angle: f64 },
    /// `y = (x₁, x₂, f(x₁,x₂))`.
    Graph { f: GraphFn, domain: Domain },
}

impl CatalogChart {
    pub fn plate() -> Self {
        CatalogChart::Plate { l1: 1.0, l2: 1.0 }
    }

    pub fn sphere_cap(radius: f64, half_angle: f64) -> Self {
        CatalogChart::SphereCap { radius, half_angle }
    }

    pub fn cylinder_patch(radius: f64, height: f64) -> Self {
        CatalogChart::CylinderPatch { radius, height, angle: 0.5 * PI }
    }

    /// Look up a catalog entry by name with `key → value` parameters.
    pub fn from_name(name: &str, param: impl Fn(&str) -> Option<f64>) -> Result<Self> {
        let get = |k: &str, default: f64| param(k).unwrap_or(default);
        let chart = match name {
            "plate" => CatalogChart::Plate { l1: get("l1", 1.0), l2: get("l2", 1.0) },
            "sphere-cap" => CatalogChart::SphereCap {
                radius: get("radius", 1.0),
                half_angle: get("half_angle", 0.5),
            },
            "cylinder-patch" => CatalogChart::CylinderPatch {
                radius: get("radius", 1.0),
                height: get("height", 1.0),
                angle: get("angle", 0.5 * PI),
            },
            "graph" => {
                let domain = Domain::new(get("a1", 0.0), get("b1", 1.0), get("a2", 0.0), get("b2", 1.0));
                let f = if param("amplitude").is_some() {
                    GraphFn::Bump {
                        amplitude: get("amplitude", 0.0),
                        k1: get("k1", PI),
                        k2: get("k2", PI),
                    }
                } else {
                    GraphFn::Quadratic([
                        get("c00", 0.0),
                        get("c10", 0.0),
                        get("c01", 0.0),
                        get("c20", 0.0),
                        get("c11", 0.0),
                        get("c02", 0.0),
                    ])
                };
                CatalogChart::Graph { f, domain }
            }
            other => return Err(ShellError::Config(format!("unknown chart '{other}'"))),
        };
        chart.validate()?;
        Ok(chart)
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            CatalogChart::Plate { l1, l2 } => l1 > 0.0 && l2 > 0.0,
            CatalogChart::SphereCap { radius, half_angle } => {
                radius > 0.0 && half_angle > 0.0 && half_angle < 0.5 * PI
            }
            CatalogChart::CylinderPatch { radius, height, angle } => {
                radius > 0.0 && height > 0.0 && angle > 0.0
            }
            CatalogChart::Graph { domain, .. } => domain.width() > 0.0 && domain.height() > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(ShellError::Config(format!("invalid chart parameters: {self:?}")))
        }
    }
}

impl Chart for CatalogChart {
    fn domain(&self) -> Domain {
        match *self {
            CatalogChart::Plate { l1, l2 } => Domain::new(0.0, l1, 0.0, l2),
            CatalogChart::SphereCap { half_angle, .. } => {
                Domain::new(0.5 * PI - half_angle, 0.5 * PI + half_angle, -half_angle, half_angle)
            }
            CatalogChart::CylinderPatch { radius, height, angle } => {
                let half = 0.5 * angle * radius;
                Domain::new(-half, half, 0.0, height)
            }
            CatalogChart::Graph { domain, .. } => domain,
        }
    }

    fn jet(&self, x1: f64, x2: f64) -> SurfaceJet<f64> {
        let v = |a: f64, b: f64, c: f64| Vec3([a, b, c]);
        match *self {
            CatalogChart::Plate { .. } => SurfaceJet {
                pos: v(x1, x2, 0.0),
                d1: Vec3::e(0),
                d2: Vec3::e(1),
                ..SurfaceJet::zero()
            },
            CatalogChart::SphereCap { radius: r, .. } => {
                let (st, ct) = x1.sin_cos();
                let (sp, cp) = x2.sin_cos();
                SurfaceJet {
                    pos: v(r * st * cp, r * st * sp, r * ct),
                    d1: v(r * ct * cp, r * ct * sp, -r * st),
                    d2: v(-r * st * sp, r * st * cp, 0.0),
                    d11: v(-r * st * cp, -r * st * sp, -r * ct),
                    d12: v(-r * ct * sp, r * ct * cp, 0.0),
                    d22: v(-r * st * cp, -r * st * sp, 0.0),
                }
            }
            CatalogChart::CylinderPatch { radius: r, .. } => {
                let (s, c) = (x1 / r).sin_cos();
                SurfaceJet {
                    pos: v(r * c, r * s, x2),
                    d1: v(-s, c, 0.0),
                    d2: Vec3::e(2),
                    d11: v(-c / r, -s / r, 0.0),
                    ..SurfaceJet::zero()
                }
            }
            CatalogChart::Graph { f, .. } => {
                let [z, z1, z2, z11, z12, z22] = f.eval(x1, x2);
                SurfaceJet {
                    pos: v(x1, x2, z),
                    d1: v(1.0, 0.0, z1),
                    d2: v(0.0, 1.0, z2),
                    d11: v(0.0, 0.0, z11),
                    d12: v(0.0, 0.0, z12),
                    d22: v(0.0, 0.0, z22),
                }
            }
        }
    }

    fn name(&self) -> String {
        match self {
            CatalogChart::Plate { .. } => "plate".into(),
            CatalogChart::SphereCap { .. } => "sphere-cap".into(),
            CatalogChart::CylinderPatch { .. } => "cylinder-patch".into(),
            CatalogChart::Graph { .. } => "graph".into(),
        }
    }
}

/// Smooth test deformation `m = y₀ + ε·s·δ(u)` built from a reference
/// chart, with `u ∈ [0,1]²` the normalized parameters and
/// `δ(u) = sin(πu₁)sin(πu₂)·d + ½ sin(πu₁)cos(πu₂)·e` for fixed directions
/// `d` (normal at the domain center) and `e` (first tangent there).
pub struct PerturbedChart<'a> {
    pub base: &'a dyn Chart,
    pub amplitude: f64,
    dir_a: Vec3<f64>,
    dir_b: Vec3<f64>,
}

impl<'a> PerturbedChart<'a> {
    /// `amplitude` is absolute (length units).
    pub fn new(base: &'a dyn Chart, amplitude: f64) -> Self {
        let (c1, c2) = base.domain().center();
        let jet = base.jet(c1, c2);
        let n = jet.cross();
        let dir_a = n.scale(1.0 / n.norm());
        let dir_b = jet.d1.scale(1.0 / jet.d1.norm());
        Self { base, amplitude, dir_a, dir_b }
    }
}

impl Chart for PerturbedChart<'_> {
    fn domain(&self) -> Domain {
        self.base.domain()
    }

    fn jet(&self, x1: f64, x2: f64) -> SurfaceJet<f64> {
        let dom = self.base.domain();
        let (u1, u2) = dom.normalize(x1, x2);
        let (k1, k2) = (PI / dom.width(), PI / dom.height());
        let (s1, c1) = (PI * u1).sin_cos();
        let (s2, c2) = (PI * u2).sin_cos();
        // phi = s1 s2, psi = ½ s1 c2, with derivatives in x
        let phi = [s1 * s2, k1 * c1 * s2, k2 * s1 * c2, -k1 * k1 * s1 * s2, k1 * k2 * c1 * c2, -k2 * k2 * s1 * s2];
        let psi = [
            0.5 * s1 * c2,
            0.5 * k1 * c1 * c2,
            -0.5 * k2 * s1 * s2,
            -0.5 * k1 * k1 * s1 * c2,
            -0.5 * k1 * k2 * c1 * s2,
            -0.5 * k2 * k2 * s1 * c2,
        ];
        let base = self.base.jet(x1, x2);
        let mut c = base.components();
        for k in 0..6 {
            let delta = self.dir_a.scale(phi[k]) + self.dir_b.scale(psi[k]);
            c[k] = c[k] + delta.scale(self.amplitude);
        }
        SurfaceJet::from_components(c)
    }

    fn name(&self) -> String {
        format!("{}+perturbation({})", self.base.name(), self.amplitude)
    }
}
