//! Run configuration: a TOML file with named material blocks.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use delam::cohesive::{penalty_stiffness, CohesiveProperties};
use delam::laminate::{OrthotropicPly, Ply, PlyLayup, RigidityModel};
use delam::mesh::{BenchmarkGeometry, Case, GridPolicy, ModelSpec, PENALTY_ALPHA};
use delam::solver::SolverSettings;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Specimen dimensions that replace the built-in ones.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lever: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlySpec {
    pub angle: f64,
    pub thickness: f64,
}

/// Arms of the single-leg bending specimen, plies bottom-up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SlbOptions {
    pub bottom: Vec<PlySpec>,
    pub top: Vec<PlySpec>,
    /// Shear ratio used for the analytic toughness.
    pub mode_mix: f64,
}

impl Default for SlbOptions {
    fn default() -> Self {
        let arm = vec![
            PlySpec { angle: 0.0, thickness: 0.5 },
            PlySpec { angle: 90.0, thickness: 1.0 },
            PlySpec { angle: 0.0, thickness: 0.5 },
        ];
        Self { bottom: arm.clone(), top: arm, mode_mix: 0.4 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    /// Defaults to `<case>_<size>mm.csv` in the working directory.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<PathBuf>,
    /// Defaults to the curve path with a `.meta.toml` extension.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub case: Case,
    pub element_size: f64,
    /// Name of a built-in ply or of a `[materials.NAME]` block; defaults per case.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub material: Option<String>,
    /// End of the displacement ramp, mm; defaults per case.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_displacement: Option<f64>,
    /// Mesh a strip of this width and scale loads to the full width.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strip_width: Option<f64>,
    /// Narrow beams use the inverted ABD relation; wide plates take D11.
    #[serde(default)]
    pub plane_strain: bool,
    #[serde(default)]
    pub grid: GridPolicy,
    #[serde(default)]
    pub geometry: GeometryOverrides,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default)]
    pub slb: SlbOptions,
    #[serde(default)]
    pub output: OutputPaths,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub materials: BTreeMap<String, OrthotropicPly>,
}

pub fn builtin_materials() -> BTreeMap<String, OrthotropicPly> {
    BTreeMap::from([
        ("t300_1076".to_string(), OrthotropicPly::t300_1076()),
        ("im7_8552".to_string(), OrthotropicPly::im7_8552()),
        ("c12k_r6376".to_string(), OrthotropicPly::c12k_r6376()),
    ])
}

pub fn default_material(case: Case) -> &'static str {
    match case {
        Case::Dcb => "t300_1076",
        Case::Enf | Case::Mmb => "im7_8552",
        Case::Slb => "c12k_r6376",
    }
}

/// Ramp end that carries each specimen well past its peak.
pub fn default_target(case: Case) -> f64 {
    match case {
        Case::Dcb => 6.0,
        Case::Enf => 2.0,
        Case::Mmb => 2.5,
        Case::Slb => 6.0,
    }
}

fn bad(key: &str, message: impl Into<String>) -> CliError {
    CliError::Config { key: key.to_string(), message: message.into() }
}

/// Everything a run needs, with names and defaults resolved.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub spec: ModelSpec,
    pub ply: OrthotropicPly,
    pub material: String,
    pub target: f64,
    pub settings: SolverSettings,
    pub rigidity: RigidityModel,
    pub slb_arms: Option<(PlyLayup, PlyLayup)>,
    pub slb_mode_mix: f64,
    pub curve_path: PathBuf,
    pub meta_path: PathBuf,
}

impl RunConfig {
    pub fn new(case: Case, element_size: f64) -> Self {
        Self {
            case,
            element_size,
            material: None,
            target_displacement: None,
            strip_width: None,
            plane_strain: false,
            grid: GridPolicy::default(),
            geometry: GeometryOverrides::default(),
            solver: SolverSettings::default(),
            slb: SlbOptions::default(),
            output: OutputPaths::default(),
            materials: BTreeMap::new(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let key = e.span().map(|s| text[s].to_string()).unwrap_or_default();
            CliError::Config { key, message: e.message().to_string() }
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configurations always serialize")
    }

    /// Full configuration with every default spelled out, built-in
    /// materials included.
    pub fn defaults(case: Case) -> Self {
        let mut c = Self::new(case, 2.0);
        c.material = Some(default_material(case).to_string());
        c.target_displacement = Some(default_target(case));
        c.materials = builtin_materials();
        c
    }

    pub fn geometry(&self) -> BenchmarkGeometry {
        let mut g = BenchmarkGeometry::for_case(self.case);
        let o = &self.geometry;
        g.length = o.length.unwrap_or(g.length);
        g.a0 = o.a0.unwrap_or(g.a0);
        g.width = o.width.unwrap_or(g.width);
        g.lever = o.lever.unwrap_or(g.lever);
        if let Some(h) = o.h {
            (g.h, g.t1, g.t2) = (h, h, h);
        }
        g
    }

    pub fn resolve(&self) -> Result<Resolved> {
        if !(self.element_size > 0.0) {
            return Err(bad("element_size", "must be positive"));
        }
        let name = self.material.clone().unwrap_or_else(|| default_material(self.case).to_string());
        let ply = self
            .materials
            .get(&name)
            .copied()
            .or_else(|| builtin_materials().get(&name).copied())
            .ok_or_else(|| bad("material", format!("unknown material '{name}'")))?;
        ply.validate().map_err(|e| bad(&format!("materials.{name}"), e.to_string()))?;
        let target = self.target_displacement.unwrap_or(default_target(self.case));
        if !(target > 0.0) {
            return Err(bad("target_displacement", "must be positive"));
        }
        let g = self.geometry();
        g.validate().map_err(|e| bad("geometry", e.to_string()))?;
        let rigidity = if self.plane_strain { RigidityModel::PlaneStrain } else { RigidityModel::GeneralizedPlaneStress };
        let (mut spec, slb_arms) = if self.case == Case::Slb {
            let arm = |plies: &[PlySpec], key: &str| -> Result<PlyLayup> {
                if plies.is_empty() {
                    return Err(bad(key, "needs at least one ply"));
                }
                Ok(PlyLayup::new(plies.iter().map(|p| Ply { material: ply, angle_deg: p.angle, thickness: p.thickness }).collect()))
            };
            let bottom = arm(&self.slb.bottom, "slb.bottom")?;
            let top = arm(&self.slb.top, "slb.top")?;
            let spec = ModelSpec::layered(g, &bottom, &top, self.element_size).map_err(|e| bad("slb", e.to_string()))?;
            (spec, Some((bottom, top)))
        } else {
            let k = penalty_stiffness(ply.e33, g.h, PENALTY_ALPHA);
            CohesiveProperties::from_ply(&ply, k).map_err(|e| bad(&format!("materials.{name}"), e.to_string()))?;
            let spec = ModelSpec::unidirectional(g, ply, self.element_size).map_err(|e| bad("material", e.to_string()))?;
            (spec, None)
        };
        if let Some(w) = self.strip_width {
            if !(w > 0.0 && w <= g.width) {
                return Err(bad("strip_width", format!("must lie in (0, {}]", g.width)));
            }
        }
        if !(0.0..=1.0).contains(&self.slb.mode_mix) {
            return Err(bad("slb.mode_mix", "must lie in [0, 1]"));
        }
        spec.strip_width = self.strip_width;
        spec.policy = self.grid;
        let curve_path = self
            .output
            .curve
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{}_{}mm.csv", self.case, self.element_size)));
        let meta_path = self.output.meta.clone().unwrap_or_else(|| curve_path.with_extension("meta.toml"));
        Ok(Resolved {
            spec,
            ply,
            material: name,
            target,
            settings: self.solver,
            rigidity,
            slb_arms,
            slb_mode_mix: self.slb.mode_mix,
            curve_path,
            meta_path,
        })
    }
}
