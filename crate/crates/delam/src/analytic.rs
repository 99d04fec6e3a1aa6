//! Closed-form load–displacement curves for the four specimens.
//!
//! The three-point bending specimens (ENF, SLB) share one beam model: a
//! simply supported span 2L loaded at mid-span, with rigidity D1 over the
//! crack and D0 elsewhere (per unit width). DCB uses corrected beam theory;
//! MMB uses the standard lever-partitioned solution with the same
//! crack-tip corrections.

use serde::{Deserialize, Serialize};

use crate::cohesive::CohesiveProperties;
use crate::error::{Error, Result};
use crate::laminate::OrthotropicPly;
use crate::mesh::BenchmarkGeometry;

/// Crack-length samples per propagation branch.
const SAMPLES: usize = 240;

/// Ply moduli are tabulated in GPa.
const GPA: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Elastic,
    /// Crack tip between the support and the load point.
    Propagation,
    /// Crack tip past the load point (three-point specimens only).
    PropagationPastLoad,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticPoint {
    pub delta: f64,
    pub load: f64,
    pub crack_length: f64,
    pub branch: Branch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticCurve {
    pub points: Vec<AnalyticPoint>,
    /// Largest relative loss of displacement along the propagation branch;
    /// zero when δ is single valued.
    pub snapback: f64,
    pub variant: String,
}

impl AnalyticCurve {
    fn new(points: Vec<AnalyticPoint>, variant: &str) -> Self {
        let mut snapback: f64 = 0.0;
        let mut reached: f64 = 0.0;
        for p in &points {
            reached = reached.max(p.delta);
            if reached > 0.0 {
                snapback = snapback.max((reached - p.delta) / reached);
            }
        }
        Self { points, snapback, variant: variant.to_owned() }
    }

    /// δ is single valued up to a relative loss of `tol`.
    pub fn is_single_valued(&self, tol: f64) -> bool {
        self.snapback <= tol
    }

    /// Highest load before the crack passes the load point; the stiffening
    /// branch beyond it is not a fracture peak.
    pub fn peak(&self) -> AnalyticPoint {
        *self
            .points
            .iter()
            .filter(|p| p.branch != Branch::PropagationPastLoad)
            .max_by(|a, b| a.load.total_cmp(&b.load))
            .expect("analytic curves are never empty")
    }

    /// Load at displacement `delta`, taken from the first segment that spans it.
    pub fn load_at(&self, delta: f64) -> Option<f64> {
        self.points.windows(2).find_map(|w| {
            let (p, q) = (w[0], w[1]);
            let (lo, hi) = if p.delta <= q.delta { (p, q) } else { (q, p) };
            if delta < lo.delta || delta > hi.delta {
                return None;
            }
            if hi.delta == lo.delta {
                return Some(hi.load.max(lo.load));
            }
            let t = (delta - lo.delta) / (hi.delta - lo.delta);
            Some(lo.load + t * (hi.load - lo.load))
        })
    }

    pub fn max_delta(&self) -> f64 {
        self.points.iter().map(|p| p.delta).fold(0.0, f64::max)
    }

    /// Drops every point past displacement `delta_max`.
    pub fn truncated(mut self, delta_max: f64) -> Self {
        if let Some(k) = self.points.iter().position(|p| p.delta > delta_max) {
            self.points.truncate(k.max(1));
        }
        self
    }
}

fn elastic_points(compliance: f64, p_crit: f64, a0: f64) -> Vec<AnalyticPoint> {
    (0..=20)
        .map(|i| {
            let p = p_crit * i as f64 / 20.0;
            AnalyticPoint { delta: compliance * p, load: p, crack_length: a0, branch: Branch::Elastic }
        })
        .collect()
}

/// Mid-span loaded beam with a crack from one support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreePointBeam {
    /// Half span L.
    pub l: f64,
    pub width: f64,
    /// Rigidity per unit width of the intact section.
    pub d0: f64,
    /// D0/D1.
    pub r: f64,
}

impl ThreePointBeam {
    pub fn new(l: f64, width: f64, d0: f64, r: f64) -> Result<Self> {
        if !(r > 1.0) {
            return Err(Error::NoPropagation(format!("rigidity ratio {r} must exceed 1")));
        }
        Ok(Self { l, width, d0, r })
    }

    pub fn compliance(&self, a: f64) -> f64 {
        let (l, r) = (self.l, self.r);
        let c = if a < l {
            2.0 * l.powi(3) + a.powi(3) * (r - 1.0)
        } else {
            (r - 1.0) * (a.powi(3) - 6.0 * l * a * a + 12.0 * l * l * a) - (6.0 * r - 8.0) * l.powi(3)
        };
        c / (12.0 * self.width * self.d0)
    }

    pub fn dc_da(&self, a: f64) -> f64 {
        let (l, r) = (self.l, self.r);
        let s = if a < l { 3.0 * a * a } else { 3.0 * a * a - 12.0 * l * a + 12.0 * l * l };
        (r - 1.0) * s / (12.0 * self.width * self.d0)
    }

    /// G = P²/(2b)·dC/da.
    pub fn energy_release_rate(&self, p: f64, a: f64) -> f64 {
        let (l, r, b) = (self.l, self.r, self.width);
        if a < l {
            p * p * a * a * (r - 1.0) / (8.0 * b * b * self.d0)
        } else {
            p * p * (r - 1.0) * (3.0 * a * a - 12.0 * a * l + 12.0 * l * l) / (24.0 * b * b * self.d0)
        }
    }

    pub fn critical_load(&self, a: f64, gc: f64) -> f64 {
        (gc / self.energy_release_rate(1.0, a)).sqrt()
    }

    /// Elastic branch at `a0`, then propagation through and past the load point.
    pub fn curve(&self, a0: f64, gc: f64, variant: &str) -> Result<AnalyticCurve> {
        let l = self.l;
        if !(a0 > 0.0 && a0 < 2.0 * l) {
            return Err(Error::Geometry(format!("crack length {a0} outside (0, 2L)")));
        }
        let p0 = self.critical_load(a0, gc);
        let mut pts = elastic_points(self.compliance(a0), p0, a0);
        let a_end = 1.95 * l;
        let mut push = |a: f64, branch| {
            let p = self.critical_load(a, gc);
            pts.push(AnalyticPoint { delta: self.compliance(a) * p, load: p, crack_length: a, branch });
        };
        if a0 < l {
            for i in 1..=SAMPLES {
                push(a0 + (l - a0) * i as f64 / SAMPLES as f64, Branch::Propagation);
            }
        }
        let start = a0.max(l);
        for i in 1..=SAMPLES {
            push(start + (a_end - start) * i as f64 / SAMPLES as f64, Branch::PropagationPastLoad);
        }
        Ok(AnalyticCurve::new(pts, variant))
    }
}

/// Single-leg bending: rigidities from the laminate, toughness at a fixed
/// shear ratio `b`.
pub fn slb_curve(
    geometry: &BenchmarkGeometry,
    d0: f64,
    d1: f64,
    props: &CohesiveProperties,
    b: f64,
) -> Result<AnalyticCurve> {
    geometry.validate()?;
    let beam = ThreePointBeam::new(geometry.half(), geometry.width, d0, d0 / d1)?;
    beam.curve(geometry.a0, props.gc(b), "three-point beam, fixed mode mix")
}

/// End-notched flexure with two identical arms of thickness h, so D0 = 4·D1
/// (D1 counts both arms). `e11` in MPa.
pub fn enf_beam(geometry: &BenchmarkGeometry, e11: f64) -> Result<ThreePointBeam> {
    let h = geometry.h;
    ThreePointBeam::new(geometry.half(), geometry.width, e11 * (2.0 * h).powi(3) / 12.0, 4.0)
}

pub fn enf_curve(geometry: &BenchmarkGeometry, ply: &OrthotropicPly) -> Result<AnalyticCurve> {
    geometry.validate()?;
    enf_beam(geometry, ply.e11 * GPA)?.curve(geometry.a0, ply.giic, "linear elastic fracture mechanics beam")
}

/// Crack length at which the ENF propagation branch turns back in δ.
pub fn enf_snapback_length(half_span: f64) -> f64 {
    half_span / 3f64.cbrt()
}

/// Crack-tip rotation correction χ of corrected beam theory.
pub fn cbt_chi(ply: &OrthotropicPly) -> f64 {
    let gamma = 1.18 * (ply.e11 * ply.e22).sqrt() / ply.g13;
    let t = gamma / (1.0 + gamma);
    (ply.e11 / (11.0 * ply.g13) * (3.0 - 2.0 * t * t)).sqrt()
}

/// Double cantilever beam by corrected beam theory.
pub fn dcb_curve(geometry: &BenchmarkGeometry, ply: &OrthotropicPly) -> AnalyticCurve {
    let (b, h, e) = (geometry.width, geometry.h, ply.e11 * GPA);
    let dh = cbt_chi(ply) * h;
    let compliance = |a: f64| 8.0 * (a + dh).powi(3) / (e * b * h.powi(3));
    let load = |a: f64| (ply.gic * b * b * h.powi(3) * e / 12.0).sqrt() / (a + dh);
    let a0 = geometry.a0;
    let mut pts = elastic_points(compliance(a0), load(a0), a0);
    let a_end = 0.9 * geometry.length;
    for i in 1..=SAMPLES {
        let a = a0 + (a_end - a0) * i as f64 / SAMPLES as f64;
        let p = load(a);
        pts.push(AnalyticPoint { delta: compliance(a) * p, load: p, crack_length: a, branch: Branch::Propagation });
    }
    AnalyticCurve::new(pts, "corrected beam theory")
}

/// Mode I and II energy release rates per unit P² and the load-point
/// compliance of the mixed-mode bending specimen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmbBeam {
    pub l: f64,
    pub c: f64,
    pub width: f64,
    pub h: f64,
    pub e11: f64,
    pub chi: f64,
}

impl MmbBeam {
    pub fn new(geometry: &BenchmarkGeometry, ply: &OrthotropicPly) -> Self {
        Self {
            l: geometry.half(),
            c: geometry.lever,
            width: geometry.width,
            h: geometry.h,
            e11: ply.e11 * GPA,
            chi: cbt_chi(ply),
        }
    }

    fn denominator(&self) -> f64 {
        16.0 * self.width * self.width * self.h.powi(3) * self.l * self.l * self.e11
    }

    pub fn g_i(&self, p: f64, a: f64) -> f64 {
        let (l, c) = (self.l, self.c);
        12.0 * p * p * (3.0 * c - l).powi(2) * (a + self.chi * self.h).powi(2) / self.denominator()
    }

    pub fn g_ii(&self, p: f64, a: f64) -> f64 {
        let (l, c) = (self.l, self.c);
        9.0 * p * p * (c + l).powi(2) * (a + 0.42 * self.chi * self.h).powi(2) / self.denominator()
    }

    /// Shear ratio G_II/(G_I + G_II); independent of the load.
    pub fn mode_mix(&self, a: f64) -> f64 {
        let (gi, gii) = (self.g_i(1.0, a), self.g_ii(1.0, a));
        gii / (gi + gii)
    }

    pub fn compliance(&self, a: f64) -> f64 {
        let (l, c, h) = (self.l, self.c, self.h);
        let ai = a + self.chi * h;
        let aii = a + 0.42 * self.chi * h;
        let num = 8.0 * ai.powi(3) * (3.0 * c - l).powi(2) + (6.0 * aii.powi(3) + 4.0 * l.powi(3)) * (c + l).powi(2);
        num / (16.0 * l * l * self.e11 * self.width * h.powi(3))
    }

    pub fn critical_load(&self, a: f64, props: &CohesiveProperties) -> f64 {
        let g = self.g_i(1.0, a) + self.g_ii(1.0, a);
        (props.gc(self.mode_mix(a)) / g).sqrt()
    }
}

/// Mixed-mode bending; the lever length sets the mode mix, and the toughness
/// follows the interaction law at the current mix.
pub fn mmb_curve(
    geometry: &BenchmarkGeometry,
    ply: &OrthotropicPly,
    props: &CohesiveProperties,
) -> Result<AnalyticCurve> {
    geometry.validate()?;
    let beam = MmbBeam::new(geometry, ply);
    let a0 = geometry.a0;
    let mut pts = elastic_points(beam.compliance(a0), beam.critical_load(a0, props), a0);
    let a_end = 0.95 * beam.l;
    for i in 1..=SAMPLES {
        let a = a0 + (a_end - a0) * i as f64 / SAMPLES as f64;
        let p = beam.critical_load(a, props);
        pts.push(AnalyticPoint { delta: beam.compliance(a) * p, load: p, crack_length: a, branch: Branch::Propagation });
    }
    Ok(AnalyticCurve::new(pts, "lever-partitioned beam theory with crack-tip corrections"))
}
