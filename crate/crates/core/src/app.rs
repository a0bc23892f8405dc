//! Command-line front end: argument types and command implementations.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::compare::{compare_reduction, fitted_orders, CompareSetup};
use crate::convexity::AdmissibilityReport;
use crate::energy::{standalone_gap, total_energy, ConstantsMode, EnergyConfig, Model};
use crate::error::Result;
use crate::geometry::chart::Chart;
use crate::geometry::fundamental::SurfaceJet;
use crate::geometry::stencil::GridStencils;
use crate::io::config::RunConfig;
use crate::io::report::{self, fmt_f64};
use crate::io::vtk::VtkSurface;
use crate::linalg::Vec3;
use crate::loads::{reduce_loads, LoadField, Resultants};
use crate::minimizer::{minimize, precheck, Problem};
use crate::reference::ReferenceField;
use crate::volumetric::ThicknessQuadrature;

#[derive(Debug, Parser)]
#[command(name = "cgshell", version, about = "Reduced nonlinear shell models from the Ciarlet-Geymonat energy")]
pub struct Cli {
    /// Run configuration (flat `key = value` file).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override the model (1, 2 or 3).
    #[arg(long, global = true)]
    pub model: Option<Model>,
    /// Override the constants calibration (`paper` or `oracle`).
    #[arg(long, global = true)]
    pub constants: Option<ConstantsMode>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Proceed even when the thickness exceeds the admissible bound.
    #[arg(long, global = true)]
    pub force: bool,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Thickness admissibility and convexity thresholds.
    Check,
    /// Energy breakdown of a deformation (default `m = y₀`).
    Energy {
        /// Deformed midsurface as a VTK structured grid.
        #[arg(long)]
        deformation: Option<PathBuf>,
        /// Also write per-node densities.
        #[arg(long)]
        densities: bool,
    },
    /// Reduced energies against through-thickness 3D integration.
    Compare3d {
        /// Comma-separated thicknesses (overrides `compare.h_list`).
        #[arg(long, value_delimiter = ',')]
        h_list: Option<Vec<f64>>,
    },
    /// Minimize the selected model.
    Minimize,
    /// Reduce 3D loads to midsurface resultants.
    LoadsReduce,
}

/// Resolved configuration with command-line overrides applied.
pub fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_path(p)?,
        None => RunConfig::parse("")?,
    };
    if let Some(m) = cli.model {
        cfg.model = m;
    }
    if let Some(c) = cli.constants {
        cfg.constants = c;
    }
    if let Some(o) = &cli.out {
        cfg.output_dir = o.clone();
    }
    Ok(cfg)
}

fn out_path(cfg: &RunConfig, name: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(&cfg.output_dir)?;
    Ok(cfg.output_dir.join(name))
}

fn energy_config(cfg: &RunConfig) -> EnergyConfig {
    EnergyConfig { material: cfg.material, model: cfg.model, constants: cfg.constants }
}

/// Reference geometry sampled from the chart at the grid nodes and
/// differentiated with the same stencils as deformations.
pub fn discrete_reference(cfg: &RunConfig) -> Result<(ReferenceField, Vec<SurfaceJet<f64>>)> {
    let grid = cfg.grid()?;
    let nodes: Vec<Vec3<f64>> = (0..grid.len())
        .map(|p| {
            let (a, b) = grid.point(p);
            cfg.chart.position(a, b)
        })
        .collect();
    let reference = ReferenceField::from_nodes(&cfg.chart.name(), &grid, &nodes, cfg.order, cfg.h())?;
    let st = GridStencils::new(&grid, cfg.order)?;
    let jets = (0..grid.len()).map(|p| st.jet(p, &nodes)).collect();
    Ok((reference, jets))
}

pub fn resultants(cfg: &RunConfig) -> Resultants {
    cfg.loads.resultants.unwrap_or_else(|| {
        let quad = ThicknessQuadrature::gauss_legendre(cfg.loads.thickness_points, cfg.h());
        reduce_loads(&cfg.loads.spec, cfg.h(), &quad)
    })
}

fn load_field(cfg: &RunConfig, reference: &ReferenceField, ref_jets: &[SurfaceJet<f64>]) -> Option<LoadField> {
    let r = resultants(cfg);
    let zero = [r.force, r.moment, r.edge_force, r.edge_moment].iter().all(|v| v.max_abs() == 0.0);
    (!zero).then(|| LoadField::uniform(reference, ref_jets, &r, &cfg.loads.traction_edges, cfg.loads.edge_measure))
}

pub fn check(cfg: &RunConfig) -> Result<i32> {
    let grid = cfg.grid()?;
    let reference = ReferenceField::from_chart(&cfg.chart, &grid, cfg.h())?;
    let rep = AdmissibilityReport::new(&reference, cfg.h(), cfg.safety);
    println!("chart {}  h = {}", rep.chart, fmt_f64(rep.h));
    for (k, v) in rep.rows() {
        println!("  {k:<30} {}", fmt_f64(v));
    }
    for m in Model::ALL {
        let i = AdmissibilityReport::index(m);
        println!("  model {m}: {}", if rep.pass[i] { "admissible".to_string() } else { format!("not admissible ({})", rep.reason(m)) });
    }
    report::write_admissibility(&out_path(cfg, "admissibility.csv")?, &rep)?;
    Ok(if rep.passes(cfg.model) { 0 } else { 2 })
}

pub fn energy(cfg: &RunConfig, deformation: Option<&Path>, densities: bool) -> Result<i32> {
    let (reference, ref_jets) = discrete_reference(cfg)?;
    let grid = &reference.grid;
    let nodes = match deformation.or(cfg.deformation.as_deref()) {
        Some(p) => VtkSurface::read(p)?.into_points(grid)?,
        None => reference.nodes(),
    };
    let st = GridStencils::new(grid, cfg.order)?;
    let jets: Vec<_> = (0..grid.len()).map(|p| st.jet(p, &nodes)).collect();
    let loads = load_field(cfg, &reference, &ref_jets);
    let b = total_energy(&reference, &jets, &energy_config(cfg), loads.as_ref(), densities)?;
    let mut rows = report::breakdown_rows(&b);
    if let Some(gap) = standalone_gap(&reference, &energy_config(cfg)) {
        // literal standalone term of Model II differs from the integrated volume
        rows.push(vec!["standalone_gap".into(), fmt_f64(gap)]);
    }
    for row in &rows {
        println!("{:<16} {}", row[0], row[1]);
    }
    report::write_table(out_path(cfg, "energy.csv")?, &["term", "value"], &rows)?;
    if let Some(d) = &b.densities {
        VtkSurface::new("energy density", grid, nodes.clone())
            .with_scalars("density", d.clone())
            .write(&out_path(cfg, "density.vtk")?)?;
    }
    Ok(0)
}

pub fn compare3d(cfg: &RunConfig, h_list: Option<&[f64]>) -> Result<i32> {
    let h_list = h_list.unwrap_or(&cfg.compare.h_list);
    let setup = CompareSetup {
        chart: &cfg.chart,
        grid: cfg.grid()?,
        mu: cfg.material.mu,
        lambda: cfg.material.lambda,
        amplitude: cfg.compare.amplitude,
        thickness_points: cfg.compare.thickness_points,
        constants: cfg.constants,
        models: Model::ALL.to_vec(),
    };
    let rows = compare_reduction(&setup, h_list)?;
    report::write_compare(&out_path(cfg, "compare3d.csv")?, &rows)?;
    for r in &rows {
        println!(
            "h={:<8} {:<9} model {:<3} reduced={:<24} 3d={:<24} err={}",
            fmt_f64(r.h),
            r.deformation.label(),
            r.model.to_string(),
            fmt_f64(r.reduced),
            fmt_f64(r.volumetric),
            fmt_f64(r.error)
        );
    }
    let orders = fitted_orders(&rows);
    let table: Vec<Vec<String>> = orders.iter().map(|(m, o)| vec![m.to_string(), fmt_f64(*o)]).collect();
    report::write_table(out_path(cfg, "compare3d_orders.csv")?, &["model", "fitted_order"], &table)?;
    for (m, o) in orders {
        println!("model {m}: fitted order {o:.3}");
    }
    Ok(0)
}

pub fn run_minimize(cfg: &RunConfig, force: bool) -> Result<i32> {
    let (reference, ref_jets) = discrete_reference(cfg)?;
    let rep = precheck(&reference, cfg.model, cfg.h(), cfg.safety, force)?;
    if !rep.passes(cfg.model) {
        eprintln!("warning: h = {} is not admissible for model {} ({}); continuing because of --force", cfg.h(), cfg.model, rep.reason(cfg.model));
    }
    let loads = load_field(cfg, &reference, &ref_jets);
    let problem = Problem::new(&reference, cfg.order, energy_config(cfg), loads.as_ref(), &cfg.clamped, cfg.solver.penalty, cfg.boundary_measure)?;
    let initial = match &cfg.deformation {
        Some(p) => VtkSurface::read(p)?.into_points(&reference.grid)?,
        None => reference.nodes(),
    };
    let res = minimize(&problem, &initial, &cfg.solver)?;
    let grid = &reference.grid;
    let displacement: Vec<Vec3<f64>> = res.nodes.iter().zip(reference.nodes()).map(|(a, b)| *a - b).collect();
    VtkSurface::new(&format!("{} model {} final", reference.name, cfg.model), grid, res.nodes.clone())
        .with_vectors("displacement", displacement)
        .write(&out_path(cfg, "final.vtk")?)?;
    for (it, nodes) in &res.snapshots {
        VtkSurface::new(&format!("iterate {it}"), grid, nodes.clone()).write(&out_path(cfg, &format!("iterate_{it:06}.vtk"))?)?;
    }
    report::write_trace(&out_path(cfg, "trace.csv")?, &res.trace)?;
    report::write_breakdown(&out_path(cfg, "energy.csv")?, &res.breakdown)?;
    let last = res.trace.last().expect("trace has the initial row");
    println!("termination {:?} after {} iterations, energy {}, gradient norm {}", res.termination, last.iter, fmt_f64(last.energy), fmt_f64(last.grad_norm));
    Ok(0)
}

pub fn loads_reduce(cfg: &RunConfig) -> Result<i32> {
    let r = resultants(cfg);
    for (k, v) in [("force", r.force), ("moment", r.moment), ("edge_force", r.edge_force), ("edge_moment", r.edge_moment)] {
        println!("{k:<12} {} {} {}", fmt_f64(v[0]), fmt_f64(v[1]), fmt_f64(v[2]));
    }
    report::write_resultants(&out_path(cfg, "resultants.csv")?, &r)?;
    Ok(0)
}

/// Dispatch; the returned value is the process exit code.
pub fn run(cli: &Cli) -> Result<i32> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Check => check(&cfg),
        Command::Energy { deformation, densities } => energy(&cfg, deformation.as_deref(), *densities),
        Command::Compare3d { h_list } => compare3d(&cfg, h_list.as_deref()),
        Command::Minimize => run_minimize(&cfg, cli.force),
        Command::LoadsReduce => loads_reduce(&cfg),
    }
}
