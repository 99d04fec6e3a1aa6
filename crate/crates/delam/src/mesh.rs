//! Structured layered meshes for the DCB, ENF, MMB and SLB specimens.
//!
//! Every shell layer shares one rectangular grid split into triangles. Nodes
//! are numbered x-major, then y, then layer, which keeps the stiffness profile
//! narrow. Each node carries (u, v, w, θx, θy).

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::cohesive::{penalty_stiffness, CohesiveProperties, PlateShape, StructuralCe};
use crate::error::{Error, Result};
use crate::laminate::{OrthotropicPly, PlyLayup, Section};
use crate::plate::triangle_local_frame;
use crate::shell::ShellElement;

pub const DOFS_PER_NODE: usize = 5;
pub const U: usize = 0;
pub const V: usize = 1;
pub const W: usize = 2;
pub const THETA_X: usize = 3;
pub const THETA_Y: usize = 4;

/// Penalty factor α in K = α·E3/t.
pub const PENALTY_ALPHA: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    Dcb,
    Enf,
    Mmb,
    Slb,
}

impl std::fmt::Display for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Case::Dcb => "dcb",
            Case::Enf => "enf",
            Case::Mmb => "mmb",
            Case::Slb => "slb",
        };
        f.write_str(s)
    }
}

/// Specimen dimensions in mm. `h` is the arm thickness of the unidirectional
/// specimens; `t1`/`t2` are the upper/lower arm thicknesses of the SLB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkGeometry {
    pub case: Case,
    /// Total length 2L.
    pub length: f64,
    pub a0: f64,
    pub h: f64,
    pub t1: f64,
    pub t2: f64,
    pub width: f64,
    /// MMB lever arm c.
    pub lever: f64,
}

impl BenchmarkGeometry {
    pub fn dcb() -> Self {
        Self { case: Case::Dcb, length: 150.0, a0: 30.5, h: 1.5, t1: 1.5, t2: 1.5, width: 25.0, lever: 0.0 }
    }

    pub fn enf() -> Self {
        Self { case: Case::Enf, length: 101.6, a0: 35.0, h: 2.25, t1: 2.25, t2: 2.25, width: 25.4, lever: 0.0 }
    }

    pub fn mmb() -> Self {
        Self { case: Case::Mmb, length: 100.8, a0: 25.4, h: 2.25, t1: 2.25, t2: 2.25, width: 25.4, lever: 41.3 }
    }

    pub fn slb() -> Self {
        Self { case: Case::Slb, length: 177.8, a0: 60.0, h: 2.0, t1: 2.0, t2: 2.0, width: 25.4, lever: 0.0 }
    }

    pub fn for_case(case: Case) -> Self {
        match case {
            Case::Dcb => Self::dcb(),
            Case::Enf => Self::enf(),
            Case::Mmb => Self::mmb(),
            Case::Slb => Self::slb(),
        }
    }

    /// Half span L.
    pub fn half(&self) -> f64 {
        0.5 * self.length
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.width > 0.0 && self.a0 > 0.0 && self.a0 < self.length) {
            return Err(Error::Geometry("require 0 < a0 < 2L and b > 0".into()));
        }
        if matches!(self.case, Case::Enf | Case::Mmb | Case::Slb) && self.a0 >= self.half() {
            return Err(Error::Geometry("three-point specimens require a0 < L".into()));
        }
        if self.case == Case::Mmb && !(self.lever > 0.0) {
            return Err(Error::Geometry("MMB lever length must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridPolicy {
    /// Grid lines at 0, a0, L and 2L with uniform spacing between them.
    #[default]
    Conforming,
    /// Uniform spacing; a0 snaps to the nearest grid line.
    Snap,
}

/// Input to [`build_model`].
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub geometry: BenchmarkGeometry,
    /// Shell layers from the bottom up; each must be mid-plane symmetric.
    pub layers: Vec<PlyLayup>,
    /// Interface k lies between layers k and k+1.
    pub cracked_interface: usize,
    pub interfaces: Vec<CohesiveProperties>,
    pub element_size: f64,
    /// Mesh only this much of the width and scale loads by `width / strip`.
    pub strip_width: Option<f64>,
    pub policy: GridPolicy,
    pub precrack_contact: bool,
}

impl ModelSpec {
    /// Two identical unidirectional arms with one interface.
    pub fn unidirectional(geometry: BenchmarkGeometry, ply: OrthotropicPly, element_size: f64) -> Result<Self> {
        let arm = PlyLayup::single(ply, 0.0, geometry.h);
        let k = penalty_stiffness(ply.e33, geometry.h, PENALTY_ALPHA);
        Ok(Self {
            geometry,
            layers: vec![arm.clone(), arm],
            cracked_interface: 0,
            interfaces: vec![CohesiveProperties::from_ply(&ply, k)?],
            element_size,
            strip_width: None,
            policy: GridPolicy::Conforming,
            precrack_contact: true,
        })
    }

    /// One shell layer per ply; plies are listed bottom-up within each arm.
    pub fn layered(
        geometry: BenchmarkGeometry,
        bottom_arm: &PlyLayup,
        top_arm: &PlyLayup,
        element_size: f64,
    ) -> Result<Self> {
        let layers: Vec<PlyLayup> = bottom_arm
            .plies
            .iter()
            .chain(&top_arm.plies)
            .map(|p| PlyLayup::new(vec![*p]))
            .collect();
        if bottom_arm.plies.is_empty() || top_arm.plies.is_empty() {
            return Err(Error::EmptyLayup);
        }
        let mut interfaces = Vec::new();
        for pair in layers.windows(2) {
            let (a, b) = (&pair[0].plies[0], &pair[1].plies[0]);
            let thin = if a.thickness <= b.thickness { a } else { b };
            let k = penalty_stiffness(thin.material.e33, thin.thickness, PENALTY_ALPHA);
            interfaces.push(CohesiveProperties::from_ply(&thin.material, k)?);
        }
        Ok(Self {
            geometry,
            layers,
            cracked_interface: bottom_arm.plies.len() - 1,
            interfaces,
            element_size,
            strip_width: None,
            policy: GridPolicy::Conforming,
            precrack_contact: true,
        })
    }
}

/// u_dof = Σ coef·u_term + lambda·λ, where every term is an unconstrained DoF.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub dof: usize,
    pub terms: Vec<(usize, f64)>,
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellInstance {
    pub nodes: [usize; 3],
    pub layer: usize,
    pub kind: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CeInstance {
    pub bot: [usize; 3],
    pub top: [usize; 3],
    pub interface: usize,
    pub kind: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayeredModel {
    pub geometry: BenchmarkGeometry,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub n_layers: usize,
    pub layer_thickness: Vec<f64>,
    /// Shell element stiffness per distinct (layer, shape).
    pub shell_types: Vec<ShellElement>,
    pub shells: Vec<ShellInstance>,
    pub ce_types: Vec<StructuralCe>,
    pub ces: Vec<CeInstance>,
    pub a0: f64,
    /// Factor from the meshed strip to the full specimen width.
    pub load_scale: f64,
    pub constraints: Vec<Constraint>,
    pub sets: Vec<(String, Vec<usize>)>,
}

/// Counts and sizes for logging.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSummary {
    pub nodes: usize,
    pub dofs: usize,
    pub shell_elements: usize,
    pub cohesive_elements: usize,
    pub contact_elements: usize,
    pub a0_actual: f64,
    pub nx: usize,
    pub ny: usize,
    pub layers: usize,
    pub load_scale: f64,
    pub sets: Vec<(String, usize)>,
}

impl LayeredModel {
    pub fn n_nodes(&self) -> usize {
        self.xs.len() * self.ys.len() * self.n_layers
    }

    pub fn n_dofs(&self) -> usize {
        self.n_nodes() * DOFS_PER_NODE
    }

    pub fn node(&self, ix: usize, iy: usize, layer: usize) -> usize {
        (ix * self.ys.len() + iy) * self.n_layers + layer
    }

    /// (x, y, layer) of a node.
    pub fn node_position(&self, n: usize) -> (f64, f64, usize) {
        let layer = n % self.n_layers;
        let p = n / self.n_layers;
        (self.xs[p / self.ys.len()], self.ys[p % self.ys.len()], layer)
    }

    pub fn shell_dofs(nodes: &[usize; 3]) -> [usize; 15] {
        let mut d = [0; 15];
        for (i, n) in nodes.iter().enumerate() {
            d[2 * i] = n * DOFS_PER_NODE + U;
            d[2 * i + 1] = n * DOFS_PER_NODE + V;
            for k in 0..3 {
                d[6 + 3 * i + k] = n * DOFS_PER_NODE + W + k;
            }
        }
        d
    }

    pub fn ce_dofs(ce: &CeInstance) -> [usize; 30] {
        let mut d = [0; 30];
        d[..15].copy_from_slice(&Self::shell_dofs(&ce.bot));
        d[15..].copy_from_slice(&Self::shell_dofs(&ce.top));
        d
    }

    pub fn ce(&self, c: &CeInstance) -> &StructuralCe {
        &self.ce_types[c.kind]
    }

    pub fn shell(&self, s: &ShellInstance) -> &ShellElement {
        &self.shell_types[s.kind]
    }

    pub fn set(&self, name: &str) -> Option<&[usize]> {
        self.sets.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn summary(&self) -> ModelSummary {
        let contact = self.ces.iter().filter(|c| self.ce(c).contact).count();
        ModelSummary {
            nodes: self.n_nodes(),
            dofs: self.n_dofs(),
            shell_elements: self.shells.len(),
            cohesive_elements: self.ces.len() - contact,
            contact_elements: contact,
            a0_actual: self.a0,
            nx: self.xs.len() - 1,
            ny: self.ys.len() - 1,
            layers: self.n_layers,
            load_scale: self.load_scale,
            sets: self.sets.iter().map(|(n, v)| (n.clone(), v.len())).collect(),
        }
    }
}

fn divisions(len: f64, size: f64) -> usize {
    ((len / size).round() as usize).max(1)
}

fn uniform(a: f64, b: f64, n: usize, out: &mut Vec<f64>) {
    for i in 0..n {
        out.push(a + (b - a) * i as f64 / n as f64);
    }
}

/// Grid lines along the length and the realised crack length.
fn x_grid(g: &BenchmarkGeometry, size: f64, policy: GridPolicy) -> (Vec<f64>, f64) {
    let two_l = g.length;
    let three_point = g.case != Case::Dcb;
    match policy {
        GridPolicy::Conforming => {
            let mut stations = vec![0.0, g.a0];
            if three_point {
                stations.push(g.half());
            }
            stations.push(two_l);
            let mut xs = Vec::new();
            for w in stations.windows(2) {
                uniform(w[0], w[1], divisions(w[1] - w[0], size), &mut xs);
            }
            xs.push(two_l);
            (xs, g.a0)
        }
        GridPolicy::Snap => {
            let mut n = divisions(two_l, size);
            if three_point && n % 2 == 1 {
                n += 1;
            }
            let mut xs = Vec::new();
            uniform(0.0, two_l, n, &mut xs);
            xs.push(two_l);
            let a0 = xs[1..n]
                .iter()
                .cloned()
                .min_by(|a, b| (a - g.a0).abs().total_cmp(&(b - g.a0).abs()))
                .unwrap_or(xs[1]);
            (xs, a0)
        }
    }
}

fn key(v: f64) -> u64 {
    // Grid spacings come from identical arithmetic, so rounding to ~1e-9 mm
    // only merges true duplicates.
    (v * 1e9).round() as u64
}

pub fn build_model(spec: &ModelSpec) -> Result<LayeredModel> {
    let g = &spec.geometry;
    g.validate()?;
    let size = spec.element_size;
    if !(size > 0.0 && size < g.length) {
        return Err(Error::Geometry(format!("element size {size} must be positive and below the specimen length")));
    }
    let n_layers = spec.layers.len();
    if n_layers < 2 || spec.interfaces.len() != n_layers - 1 || spec.cracked_interface >= n_layers - 1 {
        return Err(Error::Geometry("need at least two layers and one property set per interface".into()));
    }
    let mesh_width = spec.strip_width.unwrap_or(g.width);
    if !(mesh_width > 0.0 && mesh_width <= g.width) {
        return Err(Error::Geometry("strip width must lie in (0, b]".into()));
    }
    let sections = spec.layers.iter().map(Section::from_layup).collect::<Result<Vec<_>>>()?;

    let (xs, a0) = x_grid(g, size, spec.policy);
    let mut ys = Vec::new();
    uniform(0.0, mesh_width, divisions(mesh_width, size), &mut ys);
    ys.push(mesh_width);
    let ny1 = ys.len();
    let node = |ix: usize, iy: usize, layer: usize| (ix * ny1 + iy) * n_layers + layer;

    let mut shell_types = Vec::new();
    let mut shell_keys: HashMap<(usize, u8, u64, u64), usize> = HashMap::new();
    let mut shells = Vec::new();
    let mut ce_types = Vec::new();
    let mut ce_keys: HashMap<(usize, u8, u64, u64, bool), usize> = HashMap::new();
    let mut ces = Vec::new();

    for ix in 0..xs.len() - 1 {
        let (x0, x1) = (xs[ix], xs[ix + 1]);
        let bonded = x0 >= a0 - 1e-9 * g.length;
        for iy in 0..ny1 - 1 {
            let (y0, y1) = (ys[iy], ys[iy + 1]);
            let (dx, dy) = (x1 - x0, y1 - y0);
            // Counter-clockwise: (00, 10, 11) and (00, 11, 01).
            let tris: [([usize; 3], [[f64; 2]; 3]); 2] = [
                ([node(ix, iy, 0), node(ix + 1, iy, 0), node(ix + 1, iy + 1, 0)], [[x0, y0], [x1, y0], [x1, y1]]),
                ([node(ix, iy, 0), node(ix + 1, iy + 1, 0), node(ix, iy + 1, 0)], [[x0, y0], [x1, y1], [x0, y1]]),
            ];
            for (kind, (base, pts)) in tris.iter().enumerate() {
                let tri = triangle_local_frame(*pts)?;
                debug_assert_eq!(tri.order, [0, 1, 2]);
                let mut kinds = Vec::with_capacity(n_layers);
                for (layer, sec) in sections.iter().enumerate() {
                    let k = (layer, kind as u8, key(dx), key(dy));
                    let id = match shell_keys.get(&k) {
                        Some(id) => *id,
                        None => {
                            shell_types.push(ShellElement::new(sec, tri)?);
                            shell_keys.insert(k, shell_types.len() - 1);
                            shell_types.len() - 1
                        }
                    };
                    kinds.push(id);
                    shells.push(ShellInstance { nodes: base.map(|n| n + layer), layer, kind: id });
                }
                for (itf, props) in spec.interfaces.iter().enumerate() {
                    let contact = itf == spec.cracked_interface && !bonded;
                    if contact && !spec.precrack_contact {
                        continue;
                    }
                    let k = (itf, kind as u8, key(dx), key(dy), contact);
                    let id = match ce_keys.get(&k) {
                        Some(id) => *id,
                        None => {
                            let bot = &shell_types[kinds[itf]];
                            let top = &shell_types[kinds[itf + 1]];
                            let ce = StructuralCe::new(
                                tri,
                                &PlateShape::new(&tri, &bot.plate.c)?,
                                &PlateShape::new(&tri, &top.plate.c)?,
                                sections[itf].thickness,
                                sections[itf + 1].thickness,
                                *props,
                                contact,
                            )?;
                            ce_types.push(ce);
                            ce_keys.insert(k, ce_types.len() - 1);
                            ce_types.len() - 1
                        }
                    };
                    ces.push(CeInstance {
                        bot: base.map(|n| n + itf),
                        top: base.map(|n| n + itf + 1),
                        interface: itf,
                        kind: id,
                    });
                }
            }
        }
    }

    let mut model = LayeredModel {
        geometry: *g,
        xs,
        ys,
        n_layers,
        layer_thickness: sections.iter().map(|s| s.thickness).collect(),
        shell_types,
        shells,
        ce_types,
        ces,
        a0,
        load_scale: g.width / mesh_width,
        constraints: Vec::new(),
        sets: Vec::new(),
    };
    boundary_and_load_sets(&mut model, spec.cracked_interface);
    Ok(model)
}

fn nearest(xs: &[f64], x: f64) -> usize {
    (0..xs.len()).min_by(|a, b| (xs[*a] - x).abs().total_cmp(&(xs[*b] - x).abs())).unwrap_or(0)
}

/// Supports, the driven DoF set and rigid-motion pins for the specimen. The
/// control parameter λ is the load-point displacement, positive in the
/// direction of the applied load.
pub fn boundary_and_load_sets(model: &mut LayeredModel, cracked_interface: usize) {
    let g = model.geometry;
    let nx = model.xs.len() - 1;
    let ny1 = model.ys.len();
    let top = model.n_layers - 1;
    let dof = |n: usize, k: usize| n * DOFS_PER_NODE + k;
    let row = |m: &LayeredModel, ix: usize, layer: usize| -> Vec<usize> {
        (0..ny1).map(|iy| m.node(ix, iy, layer)).collect()
    };
    let fixed = |d: usize| Constraint { dof: d, terms: vec![], lambda: 0.0 };
    let mut cons = Vec::new();
    let mut sets = Vec::new();
    let mid = nearest(&model.xs, g.half());

    match g.case {
        Case::Dcb => {
            let up = row(model, 0, top);
            let down = row(model, 0, 0);
            for n in &up {
                cons.push(Constraint { dof: dof(*n, W), terms: vec![], lambda: 0.5 });
            }
            for n in &down {
                cons.push(Constraint { dof: dof(*n, W), terms: vec![], lambda: -0.5 });
                cons.push(fixed(dof(*n, U)));
            }
            cons.push(fixed(dof(down[0], V)));
            // Mirror symmetry of the arms removes the free rotation about the load line.
            let (tail_top, tail_bot) = (model.node(nx, 0, top), model.node(nx, 0, 0));
            cons.push(Constraint { dof: dof(tail_bot, W), terms: vec![(dof(tail_top, W), -1.0)], lambda: 0.0 });
            sets.push(("load_top".to_string(), up));
            sets.push(("load_bottom".to_string(), down));
        }
        Case::Enf | Case::Mmb | Case::Slb => {
            let left_layer = if g.case == Case::Slb { cracked_interface + 1 } else { 0 };
            let left = row(model, 0, left_layer);
            let right = row(model, nx, 0);
            for n in left.iter().chain(&right) {
                cons.push(fixed(dof(*n, W)));
            }
            for n in &right {
                cons.push(fixed(dof(*n, U)));
            }
            cons.push(fixed(dof(right[0], V)));
            let load = row(model, mid, top);
            if g.case == Case::Mmb {
                let (l, c) = (g.half(), g.lever);
                let hinge = row(model, 0, top);
                let master = dof(hinge[0], W);
                for n in &hinge[1..] {
                    cons.push(Constraint { dof: dof(*n, W), terms: vec![(master, 1.0)], lambda: 0.0 });
                }
                // Rigid lever: hinge at x = 0, saddle at L, load point at L + c.
                for n in &load {
                    cons.push(Constraint {
                        dof: dof(*n, W),
                        terms: vec![(master, c / (l + c))],
                        lambda: -l / (l + c),
                    });
                }
                sets.push(("hinge".to_string(), hinge));
            } else {
                for n in &load {
                    cons.push(Constraint { dof: dof(*n, W), terms: vec![], lambda: -1.0 });
                }
            }
            sets.push(("support_left".to_string(), left));
            sets.push(("support_right".to_string(), right));
            sets.push(("load".to_string(), load));
        }
    }
    model.constraints = cons;
    model.sets = sets;
}
