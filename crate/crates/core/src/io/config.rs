//! Flat `key = value` run configuration with dotted sections.
//!
//! ```text
//! # sphere cap, model I
//! chart = sphere-cap
//! chart.radius = 1
//! grid.n1 = 33
//! grid.n2 = 33
//! material.mu = 1
//! material.lambda = 1
//! thickness = 0.05
//! loads.body = 0 0 -1
//! boundary.clamped = left, right
//! ```
//!
//! Vectors are three numbers separated by spaces or commas; `x₃`-profiles
//! are vectors separated by `;` (constant, linear, ... coefficients).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::energy::{ConstantsMode, Material, Model};
use crate::error::{Result, ShellError};
use crate::geometry::chart::{CatalogChart, Chart};
use crate::geometry::grid::Grid;
use crate::linalg::Vec3;
use crate::loads::{Edge, EdgeMeasure, LoadSpec, Profile, Resultants};
use crate::minimizer::{GradientMode, SolverConfig};

const KEYS: &[&str] = &[
    "chart",
    "grid.n1",
    "grid.n2",
    "grid.order",
    "material.mu",
    "material.lambda",
    "thickness",
    "model",
    "constants",
    "loads.body",
    "loads.face_plus",
    "loads.face_minus",
    "loads.lateral",
    "loads.force",
    "loads.moment",
    "loads.edge_force",
    "loads.edge_moment",
    "loads.traction_edges",
    "loads.edge_measure",
    "loads.thickness_points",
    "boundary.clamped",
    "boundary.edge_measure",
    "solver.max_iterations",
    "solver.gradient_tolerance",
    "solver.penalty",
    "solver.gradient",
    "solver.memory",
    "solver.snapshot_every",
    "admissibility.safety",
    "compare.h_list",
    "compare.amplitude",
    "compare.thickness_points",
    "deformation",
    "output.dir",
];

/// Loads either as 3D data or as resultants given directly.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadConfig {
    pub spec: LoadSpec,
    pub resultants: Option<Resultants>,
    pub traction_edges: Vec<Edge>,
    pub edge_measure: EdgeMeasure,
    pub thickness_points: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareConfig {
    pub h_list: Vec<f64>,
    pub amplitude: f64,
    pub thickness_points: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub chart: CatalogChart,
    pub n1: usize,
    pub n2: usize,
    pub order: usize,
    pub material: Material,
    pub model: Model,
    pub constants: ConstantsMode,
    pub loads: LoadConfig,
    pub clamped: Vec<Edge>,
    pub boundary_measure: EdgeMeasure,
    pub solver: SolverConfig,
    pub safety: f64,
    pub compare: CompareConfig,
    pub deformation: Option<PathBuf>,
    pub output_dir: PathBuf,
}

fn cfg_err(key: &str, msg: impl std::fmt::Display) -> ShellError {
    ShellError::Config(format!("{key}: {msg}"))
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.trim().parse::<T>().map_err(|e| cfg_err(key, e))
}

fn parse_vec3(key: &str, v: &str) -> Result<Vec3<f64>> {
    let parts: Vec<&str> = v.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
    if parts.len() != 3 {
        return Err(cfg_err(key, format!("expected 3 components, got '{v}'")));
    }
    let mut out = [0.0; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = parse_num(key, p)?;
    }
    Ok(Vec3(out))
}

fn parse_profile(key: &str, v: &str) -> Result<Profile> {
    v.split(';').map(|c| parse_vec3(key, c)).collect::<Result<Vec<_>>>().map(Profile)
}

fn parse_list<T>(key: &str, v: &str, f: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(f).collect::<Result<Vec<_>>>().map_err(|e| match e {
        ShellError::Config(m) => ShellError::Config(m),
        e => cfg_err(key, e),
    })
}

fn parse_measure(key: &str, v: &str) -> Result<EdgeMeasure> {
    match v.trim() {
        "parameter" => Ok(EdgeMeasure::Parameter),
        "surface" => Ok(EdgeMeasure::Surface),
        other => Err(cfg_err(key, format!("unknown measure '{other}'"))),
    }
}

/// Raw `key → value` map; later duplicates are an error.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| ShellError::Config(format!("line {}: expected 'key = value'", lineno + 1)))?;
        let k = k.trim().to_string();
        if map.insert(k.clone(), v.trim().to_string()).is_some() {
            return Err(ShellError::Config(format!("line {}: duplicate key '{k}'", lineno + 1)));
        }
    }
    Ok(map)
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ShellError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let map = parse_pairs(text)?;
        for k in map.keys() {
            if !KEYS.contains(&k.as_str()) && !k.starts_with("chart.") {
                return Err(ShellError::Config(format!("unknown key '{k}'")));
            }
        }
        let get = |k: &str| map.get(k).map(String::as_str);
        let num = |k: &str, default: f64| -> Result<f64> { get(k).map_or(Ok(default), |v| parse_num(k, v)) };
        let int = |k: &str, default: usize| -> Result<usize> { get(k).map_or(Ok(default), |v| parse_num(k, v)) };

        let chart_name = get("chart").unwrap_or("plate");
        let mut chart_params = BTreeMap::new();
        for (k, v) in map.iter().filter_map(|(k, v)| k.strip_prefix("chart.").map(|s| (s, v))) {
            chart_params.insert(k.to_string(), parse_num::<f64>(&format!("chart.{k}"), v)?);
        }
        let chart = CatalogChart::from_name(chart_name, |k| chart_params.get(k).copied())?;

        let (n1, n2) = (int("grid.n1", 33)?, int("grid.n2", 33)?);
        for (k, n) in [("grid.n1", n1), ("grid.n2", n2)] {
            if n < 9 || n % 2 == 0 {
                return Err(cfg_err(k, format!("grid size must be odd and at least 9, got {n}")));
            }
        }
        let order = int("grid.order", 2)?;
        let h = num("thickness", 0.01)?;
        let material = Material::new(num("material.mu", 1.0)?, num("material.lambda", 1.0)?, h)
            .map_err(|e| ShellError::Config(e.to_string()))?;
        let model = get("model").map_or(Ok(Model::I), Model::from_str)?;
        let constants = get("constants").map_or(Ok(ConstantsMode::Consistent), ConstantsMode::from_str)?;

        let vec_or_zero = |k: &str| get(k).map_or(Ok(Vec3::zero()), |v| parse_vec3(k, v));
        let spec = LoadSpec {
            body: get("loads.body").map_or(Ok(Profile::default()), |v| parse_profile("loads.body", v))?,
            face_plus: vec_or_zero("loads.face_plus")?,
            face_minus: vec_or_zero("loads.face_minus")?,
            lateral: get("loads.lateral").map_or(Ok(Profile::default()), |v| parse_profile("loads.lateral", v))?,
        };
        let direct = ["loads.force", "loads.moment", "loads.edge_force", "loads.edge_moment"];
        let resultants = if direct.iter().any(|k| map.contains_key(*k)) {
            if ["loads.body", "loads.face_plus", "loads.face_minus", "loads.lateral"].iter().any(|k| map.contains_key(*k)) {
                return Err(ShellError::Config("give loads either as 3D data or as resultants, not both".into()));
            }
            Some(Resultants {
                force: vec_or_zero("loads.force")?,
                moment: vec_or_zero("loads.moment")?,
                edge_force: vec_or_zero("loads.edge_force")?,
                edge_moment: vec_or_zero("loads.edge_moment")?,
            })
        } else {
            None
        };
        let edges = |k: &str, default: &[Edge]| -> Result<Vec<Edge>> {
            match get(k) {
                None => Ok(default.to_vec()),
                Some("none") => Ok(Vec::new()),
                Some(v) => parse_list(k, v, Edge::from_str),
            }
        };
        let loads = LoadConfig {
            spec,
            resultants,
            traction_edges: edges("loads.traction_edges", &[])?,
            edge_measure: get("loads.edge_measure").map_or(Ok(EdgeMeasure::Surface), |v| parse_measure("loads.edge_measure", v))?,
            thickness_points: int("loads.thickness_points", 16)?,
        };
        let clamped = edges("boundary.clamped", &[])?;

        let defaults = SolverConfig::default();
        let solver = SolverConfig {
            max_iterations: int("solver.max_iterations", defaults.max_iterations)?,
            gradient_tolerance: num("solver.gradient_tolerance", defaults.gradient_tolerance)?,
            penalty: num("solver.penalty", material.mu * h)?,
            gradient_mode: match get("solver.gradient").unwrap_or("ad") {
                "ad" | "automatic" => GradientMode::Automatic,
                "fd" | "finite-difference" => GradientMode::FiniteDifference,
                other => return Err(cfg_err("solver.gradient", format!("unknown mode '{other}'"))),
            },
            memory: int("solver.memory", defaults.memory)?,
            snapshot_every: get("solver.snapshot_every").map(|v| parse_num("solver.snapshot_every", v)).transpose()?,
            ..defaults
        };
        if !(solver.gradient_tolerance > 0.0) || solver.memory == 0 || !(solver.penalty >= 0.0) {
            return Err(ShellError::Config("solver tolerances must be positive".into()));
        }

        let compare = CompareConfig {
            h_list: get("compare.h_list")
                .map_or(Ok(vec![0.04, 0.02, 0.01, 0.005]), |v| parse_list("compare.h_list", v, |s| parse_num("compare.h_list", s)))?,
            amplitude: num("compare.amplitude", 0.05)?,
            thickness_points: int("compare.thickness_points", 16)?,
        };
        if compare.h_list.iter().any(|h| !(*h > 0.0)) {
            return Err(cfg_err("compare.h_list", "thicknesses must be positive"));
        }

        Ok(Self {
            chart,
            n1,
            n2,
            order,
            material,
            model,
            constants,
            loads,
            clamped,
            boundary_measure: get("boundary.edge_measure").map_or(Ok(EdgeMeasure::Surface), |v| parse_measure("boundary.edge_measure", v))?,
            solver,
            safety: num("admissibility.safety", 1.0)?,
            compare,
            deformation: get("deformation").map(PathBuf::from),
            output_dir: PathBuf::from(get("output.dir").unwrap_or("out")),
        })
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.chart.domain(), self.n1, self.n2)
    }

    pub fn h(&self) -> f64 {
        self.material.h
    }

    /// Replace the thickness, keeping material constants.
    pub fn with_thickness(mut self, h: f64) -> Result<Self> {
        self.material = Material::new(self.material.mu, self.material.lambda, h).map_err(|e| ShellError::Config(e.to_string()))?;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::parse("").unwrap();
        assert_eq!(c.chart, CatalogChart::plate());
        assert_eq!((c.n1, c.n2), (33, 33));
        assert_eq!(c.model, Model::I);
        assert_eq!(c.constants, ConstantsMode::Consistent);
        assert!(c.clamped.is_empty());
    }

    #[test]
    fn full_example() {
        let text = "
            # comment
            chart = sphere-cap
            chart.radius = 2
            chart.half_angle = 0.4
            grid.n1 = 9
            grid.n2 = 11
            material.mu = 3
            material.lambda = 2
            thickness = 0.05   # trailing comment
            model = III
            constants = paper
            loads.body = 0 0 -1; 0, 0, 0.5
            loads.face_plus = 1 0 0
            loads.traction_edges = right
            boundary.clamped = left, bottom
            solver.gradient = fd
            compare.h_list = 0.1, 0.05
        ";
        let c = RunConfig::parse(text).unwrap();
        assert_eq!(c.chart, CatalogChart::sphere_cap(2.0, 0.4));
        assert_eq!((c.n1, c.n2), (9, 11));
        assert_eq!(c.material, Material::new(3.0, 2.0, 0.05).unwrap());
        assert_eq!(c.model, Model::III);
        assert_eq!(c.constants, ConstantsMode::Literal);
        assert_eq!(c.loads.spec.body, Profile(vec![Vec3([0.0, 0.0, -1.0]), Vec3([0.0, 0.0, 0.5])]));
        assert_eq!(c.loads.spec.face_plus, Vec3([1.0, 0.0, 0.0]));
        assert_eq!(c.loads.traction_edges, vec![Edge::Right]);
        assert_eq!(c.clamped, vec![Edge::Left, Edge::Bottom]);
        assert_eq!(c.solver.gradient_mode, GradientMode::FiniteDifference);
        assert_eq!(c.compare.h_list, vec![0.1, 0.05]);
        assert_eq!(c.solver.penalty, 3.0 * 0.05);
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "grid.n1 = 8",
            "grid.n1 = 7",
            "thickness = -1",
            "material.mu = 0",
            "colour = red",
            "model = 4",
            "loads.body = 1 2",
            "chart = torus",
            "no equals sign",
            "thickness = 1\nthickness = 2",
            "loads.force = 0 0 1\nloads.body = 0 0 1",
        ] {
            let err = RunConfig::parse(text).unwrap_err();
            assert_eq!(err.exit_code(), 1, "{text}: {err}");
        }
    }
}
