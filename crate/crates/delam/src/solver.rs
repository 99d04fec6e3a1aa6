//! Displacement-controlled quasi-static analysis with secant iterations.
//!
//! All physical DoFs are expressed as u = G·z + g·λ, where z are the
//! unknowns and λ the control displacement. The reported load is the force
//! work-conjugate to λ, P = gᵀ·f_int.

use std::collections::VecDeque;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use serde::{Deserialize, Serialize};

use crate::cohesive::{CohesiveState, Mat30, PointStiffness, Vec30, NGAUSS};
use crate::error::{Error, Result};
use crate::mesh::LayeredModel;
use crate::shell::Vec15;
use crate::skyline::Skyline;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSettings {
    /// Relative residual tolerance.
    pub tol_r: f64,
    /// Relative correction tolerance.
    pub tol_d: f64,
    pub max_iterations: usize,
    /// Successive halvings allowed for one increment.
    pub max_cuts: usize,
    /// First increment as a fraction of the ramp; also the largest increment.
    pub initial_fraction: f64,
    pub growth: f64,
    pub cut: f64,
    /// Grow the increment after convergence within this many iterations.
    pub fast_iterations: usize,
    /// Secant pairs kept by the quasi-Newton mixing; 0 gives plain fixed-point
    /// iteration.
    pub anderson_depth: usize,
    /// Iterations between refactorizations of the secant matrix.
    pub refactor_interval: usize,
    /// Iteration budget for an increment that has to jump to a new
    /// equilibrium branch after every cut has failed.
    pub jump_iterations: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tol_r: 5e-3,
            tol_d: 1e-2,
            max_iterations: 25,
            max_cuts: 6,
            initial_fraction: 0.01,
            growth: 1.5,
            cut: 0.5,
            fast_iterations: 8,
            anderson_depth: 5,
            refactor_interval: 8,
            jump_iterations: 2000,
        }
    }
}

/// Map from physical DoFs to unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    pub n_free: usize,
    /// Row i of G lives in `entries[start[i]..start[i + 1]]`.
    start: Vec<usize>,
    entries: Vec<(usize, f64)>,
    pub g: Vec<f64>,
}

impl DofMap {
    pub fn new(n_dofs: usize, constraints: &[crate::mesh::Constraint]) -> Result<Self> {
        let mut prescribed: Vec<Option<usize>> = vec![None; n_dofs];
        for (k, c) in constraints.iter().enumerate() {
            if c.dof >= n_dofs || prescribed[c.dof].is_some() {
                return Err(Error::Geometry(format!("DoF {} constrained twice or out of range", c.dof)));
            }
            prescribed[c.dof] = Some(k);
        }
        let mut free_index = vec![usize::MAX; n_dofs];
        let mut n_free = 0;
        for i in 0..n_dofs {
            if prescribed[i].is_none() {
                free_index[i] = n_free;
                n_free += 1;
            }
        }
        let mut start = Vec::with_capacity(n_dofs + 1);
        let mut entries = Vec::with_capacity(n_free);
        let mut g = vec![0.0; n_dofs];
        for i in 0..n_dofs {
            start.push(entries.len());
            match prescribed[i] {
                None => entries.push((free_index[i], 1.0)),
                Some(k) => {
                    let c = &constraints[k];
                    g[i] = c.lambda;
                    for (d, coef) in &c.terms {
                        if *d >= n_dofs || free_index[*d] == usize::MAX {
                            return Err(Error::Geometry(format!("constraint on DoF {i} refers to a constrained DoF")));
                        }
                        entries.push((free_index[*d], *coef));
                    }
                }
            }
        }
        start.push(entries.len());
        Ok(Self { n_free, start, entries, g })
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.entries[self.start[i]..self.start[i + 1]]
    }

    pub fn expand(&self, z: &[f64], lambda: f64) -> Vec<f64> {
        (0..self.g.len())
            .map(|i| self.row(i).iter().map(|(r, c)| c * z[*r]).sum::<f64>() + self.g[i] * lambda)
            .collect()
    }

    /// Gᵀ·f.
    pub fn reduce(&self, f: &[f64]) -> Vec<f64> {
        let mut r = vec![0.0; self.n_free];
        for (i, fi) in f.iter().enumerate() {
            for (k, c) in self.row(i) {
                r[*k] += c * fi;
            }
        }
        r
    }

    /// gᵀ·f.
    pub fn control_force(&self, f: &[f64]) -> f64 {
        self.g.iter().zip(f).map(|(a, b)| a * b).sum()
    }
}

/// One converged point of the load–displacement curve. Loads and energies
/// refer to the full specimen width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub increment: usize,
    pub displacement: f64,
    pub load: f64,
    pub iterations: usize,
    pub converged: bool,
    pub dissipation: f64,
    pub external_work: f64,
    pub strain_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LoadDisplacementCurve {
    pub points: Vec<CurvePoint>,
}

impl LoadDisplacementCurve {
    pub fn peak_load(&self) -> f64 {
        self.points.iter().map(|p| p.load.abs()).fold(0.0, f64::max)
    }

    /// |W_ext − (U + D)| / W_ext at the last point.
    pub fn energy_error(&self) -> f64 {
        match self.points.last() {
            Some(p) if p.external_work > 0.0 => {
                (p.external_work - p.strain_energy - p.dissipation).abs() / p.external_work
            }
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub curve: LoadDisplacementCurve,
    pub completed: bool,
    pub wall_time_s: f64,
    pub total_iterations: usize,
    pub cuts: usize,
    /// Increments resolved as a snap-through to a new branch.
    pub jumps: usize,
    pub unknowns: usize,
    pub profile: usize,
    pub failure: Option<String>,
}

/// Result of one accepted increment before scaling to the full width.
#[derive(Debug, Clone)]
pub struct IncrementResult {
    pub iterations: usize,
    pub load: f64,
    /// Physical DoF vector.
    pub u: Vec<f64>,
    /// Internal forces of the matrix used in the last solve.
    pub f_int: Vec<f64>,
}

/// Mutable analysis state over a model.
pub struct Analysis<'m> {
    model: &'m LayeredModel,
    pub map: DofMap,
    pub settings: SolverSettings,
    first: Vec<usize>,
    base: Skyline,
    /// Gᵀ·K_base·g.
    base_coupling: Vec<f64>,
    undamaged: Vec<Mat30>,
    committed: Vec<CohesiveState>,
    committed_diag: Vec<PointStiffness>,
    z: Vec<f64>,
    lambda: f64,
}

/// Linear solves spent settling the initial contact pattern.
const SEED_ROUNDS: usize = 20;

fn undamaged_diag(k: f64) -> PointStiffness {
    [[k; 3]; NGAUSS]
}

impl<'m> Analysis<'m> {
    pub fn new(model: &'m LayeredModel, settings: SolverSettings) -> Result<Self> {
        let map = DofMap::new(model.n_dofs(), &model.constraints)?;
        let n = map.n_free;
        let mut first: Vec<usize> = (0..n).collect();
        let mut touch = |dofs: &[usize]| {
            let reds: Vec<usize> = dofs.iter().flat_map(|d| map.row(*d).iter().map(|(r, _)| *r)).collect();
            if let Some(lo) = reds.iter().min() {
                for r in &reds {
                    first[*r] = first[*r].min(*lo);
                }
            }
        };
        for s in &model.shells {
            touch(&LayeredModel::shell_dofs(&s.nodes));
        }
        for c in &model.ces {
            touch(&LayeredModel::ce_dofs(c));
        }
        let undamaged: Vec<Mat30> = model.ce_types.iter().map(|c| c.undamaged_stiffness()).collect();
        let mut committed = Vec::with_capacity(model.ces.len() * NGAUSS);
        let mut committed_diag = Vec::with_capacity(model.ces.len());
        for c in &model.ces {
            let ce = model.ce(c);
            committed.extend(ce.initial_states());
            committed_diag.push(undamaged_diag(ce.props.k));
        }
        let mut a = Self {
            model,
            map,
            settings,
            base: Skyline::new(first.clone()),
            first,
            base_coupling: vec![0.0; n],
            undamaged,
            committed,
            committed_diag,
            z: vec![0.0; n],
            lambda: 0.0,
        };
        a.build_base();
        a.seed_contact()?;
        Ok(a)
    }

    /// Contact state for the first step: closed, then repeated linear solves
    /// that open the points pulled apart. Points never reclose, which keeps
    /// the sequence finite where a free active set would cycle. The response
    /// is linear in the control, so the pattern holds for any first step.
    fn seed_contact(&mut self) -> Result<()> {
        let contact: Vec<usize> = (0..self.model.ces.len()).filter(|i| self.model.ce(&self.model.ces[*i]).contact).collect();
        for i in &contact {
            self.committed_diag[*i] = [[self.model.ce(&self.model.ces[*i]).props.k, 0.0, 0.0]; NGAUSS];
        }
        for _ in 0..SEED_ROUNDS {
            if contact.is_empty() {
                break;
            }
            let (k, coupling) = self.secant(&self.committed_diag)?;
            let mut z: Vec<f64> = coupling.iter().map(|v| -v).collect();
            k.solve(&mut z);
            let u = self.map.expand(&z, 1.0);
            let (_, diag) = self.trial(&u, &self.committed, None);
            let mut changed = false;
            for i in &contact {
                for (now, next) in self.committed_diag[*i].iter_mut().zip(&diag[*i]) {
                    if now[0] > 0.0 && next[0] == 0.0 {
                        now[0] = 0.0;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        Ok(())
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn states(&self) -> &[CohesiveState] {
        &self.committed
    }

    fn scatter<const N: usize>(
        map: &DofMap,
        k: &mut Skyline,
        coupling: &mut [f64],
        dofs: &[usize; N],
        ke: &nalgebra::SMatrix<f64, N, N>,
    ) {
        let mut kg = [0.0; N];
        let mut any_g = false;
        for b in 0..N {
            if map.g[dofs[b]] != 0.0 {
                any_g = true;
            }
        }
        if any_g {
            for a in 0..N {
                kg[a] = (0..N).map(|b| ke[(a, b)] * map.g[dofs[b]]).sum();
            }
        }
        for a in 0..N {
            let ra = map.row(dofs[a]);
            if ra.is_empty() {
                continue;
            }
            for (i, ci) in ra {
                if any_g {
                    coupling[*i] += ci * kg[a];
                }
                for b in 0..N {
                    let v = ke[(a, b)];
                    if v == 0.0 {
                        continue;
                    }
                    for (j, cj) in map.row(dofs[b]) {
                        if i <= j {
                            k.add(*i, *j, ci * cj * v);
                        }
                    }
                }
            }
        }
    }

    fn build_base(&mut self) {
        let mut k = Skyline::new(self.first.clone());
        let mut coupling = vec![0.0; self.map.n_free];
        for s in &self.model.shells {
            let dofs = LayeredModel::shell_dofs(&s.nodes);
            Self::scatter(&self.map, &mut k, &mut coupling, &dofs, &self.model.shell(s).k);
        }
        for c in &self.model.ces {
            if self.model.ce(c).contact {
                continue;
            }
            let dofs = LayeredModel::ce_dofs(c);
            Self::scatter(&self.map, &mut k, &mut coupling, &dofs, &self.undamaged[c.kind]);
        }
        self.base = k;
        self.base_coupling = coupling;
    }

    /// Factored secant matrix for the given point stiffnesses, with its
    /// coupling to the control DoFs.
    /// The exact secant matrix can be indefinite when a stiff centroid sits
    /// amid damaged points; the capped form is used only then.
    fn secant(&self, diag: &[PointStiffness]) -> Result<(Skyline, Vec<f64>)> {
        match self.secant_with(diag, false) {
            Err(Error::NotPositiveDefinite(_)) => self.secant_with(diag, true),
            r => r,
        }
    }

    fn secant_with(&self, diag: &[PointStiffness], capped: bool) -> Result<(Skyline, Vec<f64>)> {
        let mut k = self.base.clone();
        let mut coupling = self.base_coupling.clone();
        for (i, c) in self.model.ces.iter().enumerate() {
            let ce = self.model.ce(c);
            if ce.contact && diag[i].iter().all(|p| p.iter().all(|v| *v == 0.0)) {
                continue;
            }
            if !ce.contact && diag[i] == undamaged_diag(ce.props.k) {
                continue;
            }
            let mut ke = if capped { ce.iteration_stiffness(&diag[i]) } else { ce.stiffness(&diag[i]) };
            if !ce.contact {
                ke -= &self.undamaged[c.kind];
            }
            let dofs = LayeredModel::ce_dofs(c);
            Self::scatter(&self.map, &mut k, &mut coupling, &dofs, &ke);
        }
        k.factor()?;
        Ok((k, coupling))
    }

    fn gather<const N: usize>(u: &[f64], dofs: &[usize; N]) -> nalgebra::SVector<f64, N> {
        nalgebra::SVector::<f64, N>::from_fn(|i, _| u[dofs[i]])
    }

    /// Trial states and point stiffnesses at displacement `u`, starting from
    /// the history `from`.
    fn trial(&self, u: &[f64], from: &[CohesiveState], previous: Option<&[PointStiffness]>) -> (Vec<CohesiveState>, Vec<PointStiffness>) {
        let mut states = Vec::with_capacity(self.committed.len());
        let mut diags = Vec::with_capacity(self.model.ces.len());
        for (i, c) in self.model.ces.iter().enumerate() {
            let q: Vec30 = Self::gather(u, &LayeredModel::ce_dofs(c));
            let (s, d) = self.model.ce(c).trial_from(&q, &from[i * NGAUSS..(i + 1) * NGAUSS], previous.map(|p| &p[i]));
            states.extend(s);
            diags.push(d);
        }
        (states, diags)
    }

    /// Internal force vector for displacement `u` and point stiffnesses.
    pub fn internal_force(&self, u: &[f64], diag: &[PointStiffness]) -> Vec<f64> {
        let mut f = vec![0.0; u.len()];
        for s in &self.model.shells {
            let dofs = LayeredModel::shell_dofs(&s.nodes);
            let q: Vec15 = Self::gather(u, &dofs);
            let fe = self.model.shell(s).f_int(&q);
            for (a, d) in dofs.iter().enumerate() {
                f[*d] += fe[a];
            }
        }
        for (i, c) in self.model.ces.iter().enumerate() {
            let dofs = LayeredModel::ce_dofs(c);
            let q: Vec30 = Self::gather(u, &dofs);
            let fe = self.model.ce(c).internal_force(&q, &diag[i]);
            for (a, d) in dofs.iter().enumerate() {
                f[*d] += fe[a];
            }
        }
        f
    }

    fn norm(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Advances to control value `lambda` and commits on convergence. On
    /// failure the committed state is unchanged.
    pub fn solve_increment(&mut self, lambda: f64) -> Result<IncrementResult> {
        let s = self.settings;
        self.iterate(lambda, s.anderson_depth, false, s.max_iterations, s.refactor_interval)
    }

    /// Local snap-through: no equilibrium state lies near the committed one,
    /// so the iteration runs with damage held non-decreasing between iterates.
    /// Damage then grows monotonically until the structure settles on the
    /// next stable branch.
    pub fn solve_jump(&mut self, lambda: f64) -> Result<IncrementResult> {
        let s = self.settings;
        match self.iterate(lambda, s.anderson_depth, true, s.jump_iterations, s.refactor_interval) {
            // An extrapolated iterate damaged enough to leave a mechanism;
            // a fresh secant matrix each iteration keeps damage growth gradual.
            Err(Error::NotPositiveDefinite(_)) => self.iterate(lambda, 0, true, s.jump_iterations, 1),
            r => r,
        }
    }

    fn iterate(
        &mut self,
        lambda: f64,
        depth: usize,
        monotone: bool,
        max_iterations: usize,
        refactor_interval: usize,
    ) -> Result<IncrementResult> {
        let s = self.settings;
        let z_start = self.z.clone();
        // Predictor: the committed secant matrix carries the whole step.
        let (mut k, coupling) = self.secant(&self.committed_diag)?;
        let mut z: Vec<f64> = coupling.iter().map(|v| -v * lambda).collect();
        k.solve(&mut z);
        let mut z_prev = z_start.clone();
        let mut history = self.committed.clone();
        let mut mixer = Anderson::new(depth);
        let mut age = 0;
        let mut previous: Option<Vec<PointStiffness>> = Some(self.committed_diag.clone());
        for it in 0..max_iterations {
            let u = self.map.expand(&z, lambda);
            let (states, diag) = self.trial(&u, &history, previous.as_deref());
            let f_int = self.internal_force(&u, &diag);
            let mut r = self.map.reduce(&f_int);
            let residual = Self::norm(&r);
            let reference = Self::norm(&f_int).max(f64::MIN_POSITIVE);
            let dz = Self::distance(&z, &z_prev);
            let dz_total = Self::distance(&z, &z_start);
            if residual <= s.tol_r * reference && (it == 0 || dz <= s.tol_d * dz_total) {
                let load = self.map.control_force(&f_int);
                self.z = z;
                self.lambda = lambda;
                self.committed = states;
                self.committed_diag = diag;
                return Ok(IncrementResult { iterations: it + 1, load, u, f_int });
            }
            age += 1;
            if age >= refactor_interval {
                k = self.secant(&diag)?.0;
                mixer.reset();
                age = 0;
            }
            if monotone {
                history = states;
            }
            k.solve(&mut r);
            let g: Vec<f64> = z.iter().zip(&r).map(|(a, b)| a - b).collect();
            let next = mixer.next(&z, &g);
            z_prev = std::mem::replace(&mut z, next);
            previous = Some(diag);
        }
        Err(Error::NoConvergence { control: lambda, cuts: 0 })
    }

    fn distance(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    }

    /// Elastic energy stored in shells and interfaces at the committed state.
    pub fn strain_energy(&self, u: &[f64]) -> f64 {
        let mut e = 0.0;
        for s in &self.model.shells {
            let q: Vec15 = Self::gather(u, &LayeredModel::shell_dofs(&s.nodes));
            e += 0.5 * q.dot(&(self.model.shell(s).k * q));
        }
        for (i, c) in self.model.ces.iter().enumerate() {
            let q: Vec30 = Self::gather(u, &LayeredModel::ce_dofs(c));
            e += self.model.ce(c).elastic_energy(&q, &self.committed_diag[i]);
        }
        e
    }

    pub fn dissipation(&self) -> f64 {
        self.model
            .ces
            .iter()
            .enumerate()
            .map(|(i, c)| self.model.ce(c).dissipation(&self.committed[i * NGAUSS..(i + 1) * NGAUSS]))
            .sum()
    }
}

/// Anderson mixing of the fixed-point map z ↦ G(z), a multisecant
/// quasi-Newton update built from the last `depth` iterates.
struct Anderson {
    depth: usize,
    last: Option<(Vec<f64>, Vec<f64>)>,
    df: VecDeque<Vec<f64>>,
    dg: VecDeque<Vec<f64>>,
}

impl Anderson {
    fn new(depth: usize) -> Self {
        Self { depth, last: None, df: VecDeque::new(), dg: VecDeque::new() }
    }

    fn reset(&mut self) {
        self.last = None;
        self.df.clear();
        self.dg.clear();
    }

    fn next(&mut self, z: &[f64], g: &[f64]) -> Vec<f64> {
        if self.depth == 0 {
            return g.to_vec();
        }
        let f: Vec<f64> = g.iter().zip(z).map(|(a, b)| a - b).collect();
        if let Some((f0, g0)) = self.last.take() {
            self.df.push_back(f.iter().zip(&f0).map(|(a, b)| a - b).collect());
            self.dg.push_back(g.iter().zip(&g0).map(|(a, b)| a - b).collect());
            if self.df.len() > self.depth {
                self.df.pop_front();
                self.dg.pop_front();
            }
        }
        self.last = Some((f.clone(), g.to_vec()));
        let m = self.df.len();
        if m == 0 {
            return g.to_vec();
        }
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let normal = DMatrix::from_fn(m, m, |i, j| dot(&self.df[i], &self.df[j]));
        let rhs = DVector::from_fn(m, |i, _| dot(&self.df[i], &f));
        let cutoff = 1e-12 * normal.amax();
        let gamma = match normal.svd(true, true).solve(&rhs, cutoff) {
            Ok(v) => v,
            Err(_) => return g.to_vec(),
        };
        let mut out = g.to_vec();
        for (k, dg) in self.dg.iter().enumerate() {
            for (o, d) in out.iter_mut().zip(dg) {
                *o -= gamma[k] * d;
            }
        }
        out
    }
}

/// Ramp of the control displacement from zero to `target`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub target: f64,
}

/// Runs the displacement ramp with adaptive increments. `progress` sees every
/// accepted point.
pub fn run_analysis(
    model: &LayeredModel,
    schedule: Schedule,
    settings: SolverSettings,
    mut progress: impl FnMut(&CurvePoint),
) -> Result<AnalysisReport> {
    let t0 = Instant::now();
    let mut an = Analysis::new(model, settings)?;
    let scale = model.load_scale;
    let mut curve = LoadDisplacementCurve::default();
    let mut report = AnalysisReport {
        curve: LoadDisplacementCurve::default(),
        completed: true,
        wall_time_s: 0.0,
        total_iterations: 0,
        cuts: 0,
        jumps: 0,
        unknowns: an.map.n_free,
        profile: an.base.profile_len(),
        failure: None,
    };
    let target = schedule.target;
    let max_step = target.abs() * settings.initial_fraction;
    let mut step = max_step;
    let (mut work, mut last_load) = (0.0, 0.0);
    let eps = 1e-12 * target.abs();
    while (target - an.lambda()).abs() > eps && max_step > 0.0 {
        let mut cuts = 0;
        let res = loop {
            let next = if (target - an.lambda()).abs() <= step + eps { target } else { an.lambda() + step * target.signum() };
            match an.solve_increment(next) {
                Ok(r) => break Ok(r),
                Err(Error::NoConvergence { .. }) | Err(Error::NotPositiveDefinite(_)) if cuts < settings.max_cuts => {
                    cuts += 1;
                    report.cuts += 1;
                    step *= settings.cut;
                }
                Err(Error::NoConvergence { .. }) | Err(Error::NotPositiveDefinite(_)) => {
                    report.jumps += 1;
                    break an.solve_jump(next).map_err(|e| match e {
                        Error::NoConvergence { control, .. } => Error::NoConvergence { control, cuts },
                        e => e,
                    });
                }
                Err(e) => break Err(e),
            }
        };
        let r = match res {
            Ok(r) => r,
            Err(e) => {
                report.completed = false;
                report.failure = Some(e.to_string());
                break;
            }
        };
        let prev = curve.points.last().map(|p| p.displacement).unwrap_or(0.0);
        let load = r.load * scale;
        work += 0.5 * (load + last_load) * (an.lambda() - prev);
        last_load = load;
        report.total_iterations += r.iterations;
        let p = CurvePoint {
            increment: curve.points.len() + 1,
            displacement: an.lambda(),
            load,
            iterations: r.iterations,
            converged: true,
            dissipation: an.dissipation() * scale,
            external_work: work,
            strain_energy: an.strain_energy(&r.u) * scale,
        };
        progress(&p);
        curve.points.push(p);
        if r.iterations <= settings.fast_iterations {
            step = (step * settings.growth).min(max_step);
        }
    }
    report.curve = curve;
    report.wall_time_s = t0.elapsed().as_secs_f64();
    Ok(report)
}

/// Unreduced global stiffness and internal force for displacement `u` and
/// committed states; the matrix profile spans all DoFs.
pub fn assemble(model: &LayeredModel, states: &[CohesiveState], u: &[f64]) -> (Skyline, Vec<f64>) {
    let n = model.n_dofs();
    let mut first: Vec<usize> = (0..n).collect();
    let mut touch = |dofs: &[usize]| {
        let lo = *dofs.iter().min().unwrap();
        for d in dofs {
            first[*d] = first[*d].min(lo);
        }
    };
    for s in &model.shells {
        touch(&LayeredModel::shell_dofs(&s.nodes));
    }
    for c in &model.ces {
        touch(&LayeredModel::ce_dofs(c));
    }
    let mut k = Skyline::new(first);
    let mut f = vec![0.0; n];
    fn add<const N: usize>(k: &mut Skyline, f: &mut [f64], dofs: &[usize; N], ke: &nalgebra::SMatrix<f64, N, N>, u: &[f64]) {
        for a in 0..N {
            for b in 0..N {
                if dofs[a] <= dofs[b] {
                    k.add(dofs[a], dofs[b], ke[(a, b)]);
                }
                f[dofs[a]] += ke[(a, b)] * u[dofs[b]];
            }
        }
    }
    for s in &model.shells {
        add(&mut k, &mut f, &LayeredModel::shell_dofs(&s.nodes), &model.shell(s).k, u);
    }
    for (i, c) in model.ces.iter().enumerate() {
        let dofs = LayeredModel::ce_dofs(c);
        let q = nalgebra::SVector::<f64, 30>::from_fn(|a, _| u[dofs[a]]);
        let (ke, _, _) = model.ce(c).k_ce_and_f_int(&q, &states[i * NGAUSS..(i + 1) * NGAUSS]);
        add(&mut k, &mut f, &dofs, &ke, u);
    }
    (k, f)
}
