//! Error metrics between a simulated and a reference load–displacement curve.
//!
//! Loads enter through their magnitude, so flipping the sign convention of
//! both curves changes nothing. Errors are signed, positive when the
//! simulation is higher.

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XyPoint {
    pub delta: f64,
    pub load: f64,
    /// False on branches that must not set the peak (a stiffening
    /// reference branch past the load point).
    pub peak_eligible: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct XyCurve {
    pub points: Vec<XyPoint>,
}

impl XyCurve {
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Self {
        Self { points: pairs.iter().map(|(d, l)| XyPoint { delta: *d, load: *l, peak_eligible: true }).collect() }
    }

    fn range(&self) -> (f64, f64) {
        self.points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.delta), hi.max(p.delta)))
    }

    /// Load magnitude at `delta` on the first segment that spans it.
    pub fn load_at(&self, delta: f64) -> Option<f64> {
        self.points.windows(2).find_map(|w| {
            let (a, b) = (w[0], w[1]);
            let (lo, hi) = if a.delta <= b.delta { (a, b) } else { (b, a) };
            if delta < lo.delta || delta > hi.delta {
                return None;
            }
            if hi.delta == lo.delta {
                return Some(hi.load.abs().max(lo.load.abs()));
            }
            let t = (delta - lo.delta) / (hi.delta - lo.delta);
            Some(lo.load.abs() + t * (hi.load.abs() - lo.load.abs()))
        })
    }

    /// Highest eligible load with δ in [lo, hi], and its displacement.
    fn peak(&self, lo: f64, hi: f64) -> Option<(f64, f64)> {
        self.points
            .iter()
            .filter(|p| p.peak_eligible && p.delta >= lo && p.delta <= hi)
            .map(|p| (p.load.abs(), p.delta))
            .max_by(|a, b| a.0.total_cmp(&b.0))
    }

    /// Least-squares slope through the origin of the points within the
    /// first 20% of the displacement to the peak.
    fn initial_stiffness(&self, delta_peak: f64) -> Option<f64> {
        let limit = 0.2 * delta_peak;
        let pick: Vec<&XyPoint> = self.points.iter().filter(|p| p.delta > 0.0 && p.delta <= limit).collect();
        let pick = if pick.is_empty() {
            self.points.iter().find(|p| p.delta > 0.0).into_iter().collect()
        } else {
            pick
        };
        let sxx: f64 = pick.iter().map(|p| p.delta * p.delta).sum();
        let sxy: f64 = pick.iter().map(|p| p.delta * p.load.abs()).sum();
        (sxx > 0.0).then(|| sxy / sxx)
    }

    /// ∫|P| dδ along the curve, restricted to δ in [lo, hi].
    fn area(&self, lo: f64, hi: f64) -> f64 {
        self.points
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let (p, q) = (a.load.abs(), b.load.abs());
                if a.delta == b.delta {
                    return 0.0;
                }
                let at = |x: f64| p + (q - p) * (x - a.delta) / (b.delta - a.delta);
                let (s, e) = (a.delta.clamp(lo, hi), b.delta.clamp(lo, hi));
                0.5 * (at(s) + at(e)) * (e - s)
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub peak_load_error_pct: f64,
    pub initial_stiffness_error_pct: f64,
    pub area_error_pct: f64,
    /// Mean |P_sim − P_ref|/P_ref over simulated points past the simulated peak.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub post_peak_mean_error_pct: Option<f64>,
    pub common_range_mm: [f64; 2],
    pub sim_peak_n: f64,
    pub ref_peak_n: f64,
    pub sim_stiffness_n_per_mm: f64,
    pub ref_stiffness_n_per_mm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mesh: Option<crate::runner::MeshMeta>,
}

fn pct(sim: f64, reference: f64) -> f64 {
    100.0 * (sim - reference) / reference
}

pub fn compare(sim: &XyCurve, reference: &XyCurve) -> Result<ComparisonReport> {
    if sim.points.is_empty() || reference.points.is_empty() {
        return Err(CliError::Compare("both curves need at least one point".into()));
    }
    let (s_lo, s_hi) = sim.range();
    let (r_lo, r_hi) = reference.range();
    let (lo, hi) = (s_lo.max(r_lo), s_hi.min(r_hi));
    if !(hi > lo) {
        return Err(CliError::Compare(format!(
            "displacement ranges [{s_lo}, {s_hi}] and [{r_lo}, {r_hi}] do not overlap"
        )));
    }
    let none = || CliError::Compare("no peak inside the common range".into());
    let (sp, sd) = sim.peak(lo, hi).ok_or_else(none)?;
    let (rp, rd) = reference.peak(lo, hi).ok_or_else(none)?;
    let flat = || CliError::Compare("no loaded point to fit a stiffness".into());
    let sk = sim.initial_stiffness(sd).ok_or_else(flat)?;
    let rk = reference.initial_stiffness(rd).ok_or_else(flat)?;
    let post: Vec<f64> = sim
        .points
        .iter()
        .filter(|p| p.delta > sd && p.delta <= hi)
        .filter_map(|p| reference.load_at(p.delta).filter(|r| *r > 0.0).map(|r| (p.load.abs() - r).abs() / r))
        .collect();
    Ok(ComparisonReport {
        peak_load_error_pct: pct(sp, rp),
        initial_stiffness_error_pct: pct(sk, rk),
        area_error_pct: pct(sim.area(lo, hi), reference.area(lo, hi)),
        post_peak_mean_error_pct: (!post.is_empty()).then(|| 100.0 * post.iter().sum::<f64>() / post.len() as f64),
        common_range_mm: [lo, hi],
        sim_peak_n: sp,
        ref_peak_n: rp,
        sim_stiffness_n_per_mm: sk,
        ref_stiffness_n_per_mm: rk,
        runtime_s: None,
        mesh: None,
    })
}
