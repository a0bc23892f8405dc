//! Minimization of the discrete reduced energy over nodal midsurface
//! positions, with clamped edges and orientation-preserving iterates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

use crate::convexity::{require_admissible, AdmissibilityReport};
use crate::energy::{locate, point_terms, DeformedPoint, EnergyBreakdown, EnergyConfig, Model};
use crate::error::{Location, Result, ShellError};
use crate::geometry::fundamental::SurfaceJet;
use crate::geometry::stencil::GridStencils;
use crate::linalg::Vec3;
use crate::loads::{edge_weights, Edge, EdgeMeasure, LoadField};
use crate::reference::ReferenceField;
use crate::scalar::{Dual, Scalar};

/// Relative feasibility floor on `a_m / a_{y₀}` and `A^±_m` for accepted steps.
pub const EPS_FEAS: f64 = 1e-8;
/// Steps below this are reported as collapsed.
pub const MIN_STEP: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GradientMode {
    /// Forward-mode dual numbers through the per-node density.
    Automatic,
    /// Central differences with step `1e-6·scale`.
    FiniteDifference,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Tolerance on `‖g‖ / (μ h |ω| / ℓ)`.
    pub gradient_tolerance: f64,
    pub armijo_c1: f64,
    pub backtrack: f64,
    pub memory: usize,
    /// Penalty weight `β` on `∫_{γ_d} |n_m − n_{y₀}|² ds`.
    pub penalty: f64,
    pub gradient_mode: GradientMode,
    pub fd_step: f64,
    /// Keep every `k`-th iterate.
    pub snapshot_every: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            gradient_tolerance: 1e-7,
            armijo_c1: 1e-4,
            backtrack: 0.5,
            memory: 10,
            penalty: 1.0,
            gradient_mode: GradientMode::Automatic,
            fd_step: 1e-6,
            snapshot_every: None,
        }
    }
}

/// Discrete objective: internal energy, load potential and boundary penalty.
pub struct Problem<'a> {
    pub reference: &'a ReferenceField,
    pub stencils: GridStencils,
    pub energy: EnergyConfig,
    pub loads: Option<&'a LoadField>,
    pub free: Vec<bool>,
    pub penalty_weights: Vec<f64>,
    pub penalty: f64,
    weights: Vec<f64>,
    dependents: Vec<Vec<usize>>,
    /// Characteristic length of the reference surface.
    pub length_scale: f64,
}

impl<'a> Problem<'a> {
    /// `clamped` edges are `γ_d`: positions fixed, normals penalized.
    pub fn new(
        reference: &'a ReferenceField,
        order: usize,
        energy: EnergyConfig,
        loads: Option<&'a LoadField>,
        clamped: &[Edge],
        penalty: f64,
        measure: EdgeMeasure,
    ) -> Result<Self> {
        let grid = &reference.grid;
        let stencils = GridStencils::new(grid, order)?;
        let mut free = vec![true; grid.len()];
        for e in clamped {
            for p in e.nodes(grid) {
                free[p] = false;
            }
        }
        let ref_jets: Vec<_> = (0..grid.len()).map(|p| stencils.jet(p, &reference.nodes())).collect();
        let penalty_weights = edge_weights(reference, &ref_jets, clamped, measure);
        let weights = grid.simpson_weights().iter().zip(&reference.points).map(|(w, p)| w * p.area).collect();
        let dependents = stencils.dependents();
        let nodes = reference.nodes();
        let (mut lo, mut hi) = ([f64::INFINITY; 3], [f64::NEG_INFINITY; 3]);
        for v in &nodes {
            for i in 0..3 {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        let length_scale = (0..3).map(|i| (hi[i] - lo[i]).powi(2)).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        Ok(Self { reference, stencils, energy, loads, free, penalty_weights, penalty, weights, dependents, length_scale })
    }

    pub fn reference_area(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Natural gradient scale `μ h |ω| / ℓ`.
    pub fn gradient_scale(&self) -> f64 {
        self.energy.material.mu * self.energy.material.h * self.reference_area() / self.length_scale
    }

    pub fn jets(&self, nodes: &[Vec3<f64>]) -> Vec<SurfaceJet<f64>> {
        (0..nodes.len()).map(|p| self.stencils.jet(p, nodes)).collect()
    }

    /// Contribution of node `p` to the objective.
    pub fn node_objective<T: Scalar>(&self, p: usize, jet: &SurfaceJet<T>) -> Result<T> {
        let rp = &self.reference.points[p];
        let (terms, dp): (_, DeformedPoint<T>) = point_terms(jet, rp, &self.energy)?;
        let mut out = terms.total() * self.weights[p];
        let dn = dp.normal - Vec3::from_f64(rp.normal);
        if let Some(loads) = self.loads {
            let v = jet.pos - Vec3::from_f64(rp.pos);
            out -= loads.node_potential(p, &v, &dn);
        }
        if self.penalty_weights[p] != 0.0 {
            out += dn.norm_sq() * (self.penalty * self.penalty_weights[p]);
        }
        Ok(out)
    }

    fn node_values(&self, jets: &[SurfaceJet<f64>]) -> Result<Vec<f64>> {
        let grid = &self.reference.grid;
        jets.par_iter()
            .enumerate()
            .map(|(p, jet)| self.node_objective(p, jet).map_err(|e| locate(e, grid.ij(p))))
            .collect()
    }

    pub fn objective(&self, nodes: &[Vec3<f64>]) -> Result<f64> {
        Ok(self.node_values(&self.jets(nodes))?.iter().sum())
    }

    /// Penalty contribution `β ∫_{γ_d} |n_m − n_{y₀}|² ds` divided by `β`.
    pub fn boundary_normal_deviation(&self, nodes: &[Vec3<f64>]) -> f64 {
        let jets = self.jets(nodes);
        (0..jets.len())
            .filter(|p| self.penalty_weights[*p] != 0.0)
            .map(|p| {
                let n = jets[p].cross();
                let n = n.scale(1.0 / n.norm());
                self.penalty_weights[p] * (n - self.reference.points[p].normal).norm_sq()
            })
            .sum()
    }

    pub fn breakdown(&self, nodes: &[Vec3<f64>]) -> Result<EnergyBreakdown> {
        crate::energy::total_energy(self.reference, &self.jets(nodes), &self.energy, self.loads, false)
    }

    pub fn gradient(&self, nodes: &[Vec3<f64>], mode: GradientMode, step: f64) -> Result<Vec<Vec3<f64>>> {
        let mut g = match mode {
            GradientMode::Automatic => self.gradient_ad(nodes)?,
            GradientMode::FiniteDifference => self.gradient_fd(nodes, step)?,
        };
        for (p, gp) in g.iter_mut().enumerate() {
            if !self.free[p] {
                *gp = Vec3::zero();
            }
        }
        Ok(g)
    }

    fn gradient_ad(&self, nodes: &[Vec3<f64>]) -> Result<Vec<Vec3<f64>>> {
        let grid = &self.reference.grid;
        let local: Vec<[f64; 18]> = (0..nodes.len())
            .into_par_iter()
            .map(|p| {
                let comps = self.stencils.jet(p, nodes).components();
                let mut dual = [Vec3::<Dual<18>>::zero(); 6];
                for k in 0..6 {
                    for i in 0..3 {
                        dual[k].0[i] = Dual::variable(comps[k][i], 3 * k + i);
                    }
                }
                self.node_objective(p, &SurfaceJet::from_components(dual))
                    .map(|v| v.eps)
                    .map_err(|e| locate(e, grid.ij(p)))
            })
            .collect::<Result<_>>()?;
        let mut g = vec![Vec3::zero(); nodes.len()];
        for (p, eps) in local.iter().enumerate() {
            for (q, c) in &self.stencils.coeffs[p] {
                for k in 0..6 {
                    if c[k] != 0.0 {
                        for i in 0..3 {
                            g[*q].0[i] += c[k] * eps[3 * k + i];
                        }
                    }
                }
            }
        }
        Ok(g)
    }

    fn gradient_fd(&self, nodes: &[Vec3<f64>], step: f64) -> Result<Vec<Vec3<f64>>> {
        let grid = &self.reference.grid;
        let jets = self.jets(nodes);
        let delta = step * self.length_scale;
        (0..nodes.len())
            .into_par_iter()
            .map(|q| {
                let mut gq = Vec3::zero();
                if !self.free[q] {
                    return Ok(gq);
                }
                for i in 0..3 {
                    let mut acc = 0.0;
                    for &p in &self.dependents[q] {
                        let c = self.stencils.coeffs[p].iter().find(|e| e.0 == q).map(|e| e.1).unwrap_or([0.0; 6]);
                        let shifted = |s: f64| {
                            let mut comps = jets[p].components();
                            for k in 0..6 {
                                comps[k].0[i] += s * c[k];
                            }
                            SurfaceJet::from_components(comps)
                        };
                        let plus = self.node_objective(p, &shifted(delta)).map_err(|e| locate(e, grid.ij(p)))?;
                        let minus = self.node_objective(p, &shifted(-delta)).map_err(|e| locate(e, grid.ij(p)))?;
                        acc += plus - minus;
                    }
                    gq.0[i] = acc / (2.0 * delta);
                }
                Ok(gq)
            })
            .collect()
    }

    /// Pointwise feasibility: `a_m ≥ ε a_{y₀}` and `A^±_m ≥ ε` at every node.
    pub fn check_feasible(&self, nodes: &[Vec3<f64>], eps: f64) -> Result<FeasibilityStats> {
        let jets = self.jets(nodes);
        let mut stats = FeasibilityStats { min_area_ratio: f64::INFINITY, min_face: f64::INFINITY };
        for (p, jet) in jets.iter().enumerate() {
            let rp = &self.reference.points[p];
            let dp = DeformedPoint::from_jet(jet, self.energy.material.h);
            let ratio = dp.area / rp.area;
            let face = dp.a_minus.min(dp.a_plus);
            stats.min_area_ratio = stats.min_area_ratio.min(ratio);
            stats.min_face = stats.min_face.min(face);
            if !(ratio >= eps && face >= eps) {
                let mut location = Location::at(rp.x.0, rp.x.1);
                location.node = Some(self.reference.grid.ij(p));
                let (quantity, value) = if ratio >= eps { ("A+-_m", face) } else { ("a_m/a_y0", ratio) };
                return Err(ShellError::OrientationViolation { location, quantity, value });
            }
        }
        Ok(stats)
    }

    /// Largest `α·βᵏ` keeping `x + α d` feasible.
    pub fn project_admissible(&self, nodes: &[Vec3<f64>], dir: &[Vec3<f64>], alpha: f64, factor: f64) -> Result<f64> {
        let mut a = alpha;
        loop {
            if a < MIN_STEP {
                return Err(ShellError::StepCollapsed(a));
            }
            if self.check_feasible(&axpy(nodes, a, dir), EPS_FEAS).is_ok() {
                return Ok(a);
            }
            a *= factor;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityStats {
    pub min_area_ratio: f64,
    pub min_face: f64,
}

pub fn axpy(x: &[Vec3<f64>], a: f64, d: &[Vec3<f64>]) -> Vec<Vec3<f64>> {
    x.iter().zip(d).map(|(x, d)| *x + d.scale(a)).collect()
}

fn dot(a: &[Vec3<f64>], b: &[Vec3<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub energy: f64,
    pub grad_norm: f64,
    pub step: f64,
    pub min_area_ratio: f64,
    pub min_face: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    GradientTolerance,
    MaxIterations,
    StepCollapsed,
}

#[derive(Clone, Debug)]
pub struct MinimizeResult {
    pub nodes: Vec<Vec3<f64>>,
    pub breakdown: EnergyBreakdown,
    pub trace: Vec<TraceRow>,
    pub termination: Termination,
    pub snapshots: Vec<(usize, Vec<Vec3<f64>>)>,
}

/// Thickness gate before minimization; `force` skips it.
pub fn precheck(reference: &ReferenceField, model: Model, h: f64, safety: f64, force: bool) -> Result<AdmissibilityReport> {
    let report = AdmissibilityReport::new(reference, h, safety);
    if !force {
        require_admissible(&report, model)?;
    }
    Ok(report)
}

/// L-BFGS with Armijo backtracking and feasibility-preserving steps.
pub fn minimize(problem: &Problem, initial: &[Vec3<f64>], cfg: &SolverConfig) -> Result<MinimizeResult> {
    let n = problem.reference.grid.len();
    if initial.len() != n {
        return Err(ShellError::ShapeMismatch(format!("{} initial nodes for {n} grid nodes", initial.len())));
    }
    let ref_nodes = problem.reference.nodes();
    let mut x: Vec<Vec3<f64>> = initial.iter().enumerate().map(|(p, v)| if problem.free[p] { *v } else { ref_nodes[p] }).collect();
    let stats = problem
        .check_feasible(&x, EPS_FEAS)
        .map_err(|e| ShellError::InadmissibleInitialState(e.to_string()))?;
    let mut f = problem.objective(&x).map_err(|e| ShellError::InadmissibleInitialState(e.to_string()))?;
    let mut g = problem.gradient(&x, cfg.gradient_mode, cfg.fd_step)?;
    let gscale = problem.gradient_scale();
    let norm = |g: &[Vec3<f64>]| dot(g, g).sqrt();
    let mut trace = vec![TraceRow { iter: 0, energy: f, grad_norm: norm(&g), step: 0.0, min_area_ratio: stats.min_area_ratio, min_face: stats.min_face }];
    let mut memory: VecDeque<(Vec<Vec3<f64>>, Vec<Vec3<f64>>, f64)> = VecDeque::new();
    let mut snapshots = Vec::new();
    let mut termination = Termination::MaxIterations;
    for iter in 1..=cfg.max_iterations {
        if norm(&g) <= cfg.gradient_tolerance * gscale {
            termination = Termination::GradientTolerance;
            break;
        }
        // two-loop recursion
        let mut d: Vec<Vec3<f64>> = g.iter().map(|v| -*v).collect();
        let mut alphas = Vec::with_capacity(memory.len());
        for (s, y, rho) in memory.iter().rev() {
            let a = rho * dot(s, &d);
            d = axpy(&d, -a, y);
            alphas.push(a);
        }
        if let Some((s, y, _)) = memory.back() {
            let gamma = dot(s, y) / dot(y, y);
            d.iter_mut().for_each(|v| *v = v.scale(gamma));
        } else {
            let gamma = problem.length_scale * 1e-2 / norm(&g).max(f64::MIN_POSITIVE);
            d.iter_mut().for_each(|v| *v = v.scale(gamma));
        }
        for ((s, y, rho), a) in memory.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &d);
            d = axpy(&d, a - b, s);
        }
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            memory.clear();
            let gamma = problem.length_scale * 1e-2 / norm(&g);
            d = g.iter().map(|v| v.scale(-gamma)).collect();
            slope = dot(&g, &d);
        }
        let mut alpha = match problem.project_admissible(&x, &d, 1.0, cfg.backtrack) {
            Ok(a) => a,
            Err(ShellError::StepCollapsed(_)) if !memory.is_empty() => {
                memory.clear();
                continue;
            }
            Err(ShellError::StepCollapsed(_)) => {
                termination = Termination::StepCollapsed;
                break;
            }
            Err(e) => return Err(e),
        };
        let (x_new, f_new) = loop {
            let cand = axpy(&x, alpha, &d);
            match problem.objective(&cand) {
                Ok(fc) if fc <= f + cfg.armijo_c1 * alpha * slope => break (cand, fc),
                Ok(_) | Err(ShellError::OrientationViolation { .. }) => alpha *= cfg.backtrack,
                Err(e) => return Err(e),
            }
            if alpha < MIN_STEP {
                termination = Termination::StepCollapsed;
                break (x.clone(), f);
            }
        };
        if termination == Termination::StepCollapsed {
            // retry once along steepest descent before giving up
            if !memory.is_empty() {
                memory.clear();
                termination = Termination::MaxIterations;
                continue;
            }
            break;
        }
        let g_new = problem.gradient(&x_new, cfg.gradient_mode, cfg.fd_step)?;
        let s: Vec<_> = x_new.iter().zip(&x).map(|(a, b)| *a - *b).collect();
        let y: Vec<_> = g_new.iter().zip(&g).map(|(a, b)| *a - *b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if memory.len() == cfg.memory {
                memory.pop_front();
            }
            memory.push_back((s, y, 1.0 / sy));
        } else {
            memory.clear();
        }
        let stats = problem.check_feasible(&x_new, EPS_FEAS)?;
        x = x_new;
        f = f_new;
        g = g_new;
        trace.push(TraceRow { iter, energy: f, grad_norm: norm(&g), step: alpha, min_area_ratio: stats.min_area_ratio, min_face: stats.min_face });
        if let Some(k) = cfg.snapshot_every {
            if k > 0 && iter % k == 0 {
                snapshots.push((iter, x.clone()));
            }
        }
    }
    if termination == Termination::MaxIterations && norm(&g) <= cfg.gradient_tolerance * gscale {
        termination = Termination::GradientTolerance;
    }
    let breakdown = problem.breakdown(&x)?;
    Ok(MinimizeResult { nodes: x, breakdown, trace, termination, snapshots })
}
