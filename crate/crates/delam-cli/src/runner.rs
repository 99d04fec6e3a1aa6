//! Builds, runs and records one benchmark.

use std::path::Path;

use delam::analytic::{dcb_curve, enf_curve, mmb_curve, slb_curve, AnalyticCurve, Branch};
use delam::laminate::{effective_rigidities_slb, PlyLayup};
use delam::mesh::{build_model, Case, LayeredModel};
use delam::solver::{run_analysis, AnalysisReport, Schedule, SolverSettings};
use serde::{Deserialize, Serialize};

use crate::compare::{XyCurve, XyPoint};
use crate::config::{Resolved, RunConfig};
use crate::curve_io::{rows, write_curve, CurveRow};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshMeta {
    pub element_size: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strip_width: Option<f64>,
    pub a0_requested: f64,
    pub a0_actual: f64,
    pub nodes: usize,
    pub shell_elements: usize,
    pub cohesive_elements: usize,
    pub contact_elements: usize,
    pub layers: usize,
    pub unknowns: usize,
    pub profile: usize,
}

/// Written next to the curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub case: Case,
    pub material: String,
    pub target_displacement: f64,
    pub completed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub increments: usize,
    pub total_iterations: usize,
    pub cuts: usize,
    pub jumps: usize,
    pub wall_time_s: f64,
    pub peak_load_n: f64,
    pub energy_error: f64,
    /// Closed-form solution the curve is meant to be compared against.
    pub reference: String,
    pub mesh: MeshMeta,
    pub solver: SolverSettings,
}

impl RunMeta {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        toml::from_str(&text).map_err(|e| CliError::Csv(path.to_path_buf(), e.to_string()))
    }
}

pub struct RunOutcome {
    pub resolved: Resolved,
    pub report: AnalysisReport,
    pub rows: Vec<CurveRow>,
    pub meta: RunMeta,
}

pub fn reference_curve(r: &Resolved) -> Result<AnalyticCurve> {
    let g = &r.spec.geometry;
    let props = &r.spec.interfaces[r.spec.cracked_interface];
    let curve = match g.case {
        Case::Dcb => dcb_curve(g, &r.ply),
        Case::Enf => enf_curve(g, &r.ply)?,
        Case::Mmb => mmb_curve(g, &r.ply, props)?,
        Case::Slb => {
            let (bottom, top) = r.slb_arms.as_ref().expect("SLB runs resolve both arms");
            let whole = PlyLayup::new(bottom.plies.iter().chain(&top.plies).copied().collect());
            // The load goes into the top arm over the cracked length.
            let (d1, d0, _) = effective_rigidities_slb(top, &whole, r.rigidity)?;
            slb_curve(g, d0, d1, props, r.slb_mode_mix)?
        }
    };
    Ok(curve)
}

pub fn analytic_xy(curve: &AnalyticCurve) -> XyCurve {
    XyCurve {
        points: curve
            .points
            .iter()
            .map(|p| XyPoint { delta: p.delta, load: p.load, peak_eligible: p.branch != Branch::PropagationPastLoad })
            .collect(),
    }
}

pub fn simulated_xy(rows: &[CurveRow]) -> XyCurve {
    let mut pts = vec![XyPoint { delta: 0.0, load: 0.0, peak_eligible: true }];
    pts.extend(rows.iter().map(|r| XyPoint { delta: r.displacement, load: r.load, peak_eligible: true }));
    XyCurve { points: pts }
}

fn mesh_meta(config: &RunConfig, r: &Resolved, model: &LayeredModel, report: &AnalysisReport) -> MeshMeta {
    let s = model.summary();
    MeshMeta {
        element_size: config.element_size,
        strip_width: config.strip_width,
        a0_requested: r.spec.geometry.a0,
        a0_actual: s.a0_actual,
        nodes: s.nodes,
        shell_elements: s.shell_elements,
        cohesive_elements: s.cohesive_elements,
        contact_elements: s.contact_elements,
        layers: s.layers,
        unknowns: report.unknowns,
        profile: report.profile,
    }
}

/// Runs the analysis without touching the file system.
pub fn execute(config: &RunConfig, progress: impl FnMut(&delam::solver::CurvePoint)) -> Result<RunOutcome> {
    let resolved = config.resolve()?;
    let model = build_model(&resolved.spec)?;
    let report = run_analysis(&model, Schedule { target: resolved.target }, resolved.settings, progress)?;
    let rows = rows(&report.curve);
    let reference = reference_curve(&resolved)?.variant;
    let meta = RunMeta {
        case: config.case,
        material: resolved.material.clone(),
        target_displacement: resolved.target,
        completed: report.completed,
        failure: report.failure.clone(),
        increments: rows.len(),
        total_iterations: report.total_iterations,
        cuts: report.cuts,
        jumps: report.jumps,
        wall_time_s: report.wall_time_s,
        peak_load_n: report.curve.peak_load(),
        energy_error: report.curve.energy_error(),
        reference,
        mesh: mesh_meta(config, &resolved, &model, &report),
        solver: resolved.settings,
    };
    Ok(RunOutcome { resolved, report, rows, meta })
}

/// Runs and writes the curve and metadata. A run that stops short still
/// writes what it reached before reporting the failure.
pub fn run(config: &RunConfig, progress: impl FnMut(&delam::solver::CurvePoint)) -> Result<RunOutcome> {
    let out = execute(config, progress)?;
    write_curve(&out.resolved.curve_path, &out.rows)?;
    let meta = toml::to_string(&out.meta).expect("run metadata always serializes");
    std::fs::write(&out.resolved.meta_path, meta).map_err(|e| CliError::Io(out.resolved.meta_path.clone(), e))?;
    if let Some(f) = &out.report.failure {
        return Err(CliError::NoConvergence(f.clone()));
    }
    Ok(out)
}
