//! Classical laminate theory for the shell sections.

use nalgebra::{Matrix3, Matrix6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// GPa to MPa.
const GPA: f64 = 1000.0;

/// Engineering constants of a unidirectional ply.
///
/// Moduli are in GPa, toughnesses in kJ/m² (numerically N/mm), strengths in MPa.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrthotropicPly {
    pub e11: f64,
    pub e22: f64,
    pub e33: f64,
    pub nu12: f64,
    pub nu13: f64,
    pub nu23: f64,
    pub g12: f64,
    pub g13: f64,
    pub g23: f64,
    pub gic: f64,
    pub giic: f64,
    pub eta: f64,
    pub tau_ic: f64,
    pub tau_iic: f64,
}

impl OrthotropicPly {
    pub fn nu21(&self) -> f64 {
        self.nu12 * self.e22 / self.e11
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidPly(msg.to_string()));
        let moduli = [self.e11, self.e22, self.e33, self.g12, self.g13, self.g23];
        if moduli.iter().any(|m| !(*m > 0.0)) {
            return bad("moduli must be positive");
        }
        for nu in [self.nu12, self.nu13, self.nu23] {
            if !(0.0..0.5).contains(&nu) {
                return bad("Poisson ratios must lie in [0, 0.5)");
            }
        }
        if !(1.0 - self.nu12 * self.nu21() > 0.0) {
            return bad("1 - nu12*nu21 must be positive");
        }
        if !(self.gic > 0.0 && self.giic >= self.gic) {
            return bad("toughness requires GIIc >= GIc > 0");
        }
        if !(self.tau_ic > 0.0 && self.tau_iic > 0.0) {
            return bad("strengths must be positive");
        }
        if !(self.eta > 0.0) {
            return bad("mixed-mode exponent must be positive");
        }
        Ok(())
    }

    /// T300/1076 graphite/epoxy.
    pub fn t300_1076() -> Self {
        Self {
            e11: 139.4,
            e22: 10.16,
            e33: 10.16,
            nu12: 0.30,
            nu13: 0.30,
            nu23: 0.436,
            g12: 4.6,
            g13: 4.6,
            g23: 3.54,
            gic: 0.170,
            giic: 0.494,
            eta: 1.62,
            tau_ic: 30.0,
            tau_iic: 60.0,
        }
    }

    /// IM7/8552 graphite/epoxy.
    pub fn im7_8552() -> Self {
        Self {
            e11: 161.0,
            e22: 11.38,
            e33: 11.38,
            nu12: 0.32,
            nu13: 0.32,
            nu23: 0.45,
            g12: 5.2,
            g13: 5.2,
            g23: 3.9,
            gic: 0.212,
            giic: 0.774,
            eta: 2.1,
            tau_ic: 30.0,
            tau_iic: 60.0,
        }
    }

    /// C12K/R6376 graphite/epoxy. The shear strength is an estimate.
    pub fn c12k_r6376() -> Self {
        Self {
            e11: 146.9,
            e22: 10.6,
            e33: 10.6,
            nu12: 0.33,
            nu13: 0.33,
            nu23: 0.33,
            g12: 5.45,
            g13: 5.45,
            g23: 3.99,
            gic: 0.34,
            giic: 1.286,
            eta: 3.39,
            tau_ic: 25.0,
            tau_iic: 38.0,
        }
    }
}

/// Plane-stress stiffness in material axes, MPa.
pub fn reduced_stiffness(ply: &OrthotropicPly) -> Result<Matrix3<f64>> {
    let den = 1.0 - ply.nu12 * ply.nu21();
    if !(den > 0.0) {
        return Err(Error::InvalidPly("1 - nu12*nu21 must be positive".into()));
    }
    let q11 = ply.e11 * GPA / den;
    let q22 = ply.e22 * GPA / den;
    let q12 = ply.nu12 * ply.e22 * GPA / den;
    let q66 = ply.g12 * GPA;
    Ok(Matrix3::new(q11, q12, 0.0, q12, q22, 0.0, 0.0, 0.0, q66))
}

/// Rotates a plane-stress stiffness by `angle_deg` about the laminate normal.
pub fn transform_stiffness(q: &Matrix3<f64>, angle_deg: f64) -> Matrix3<f64> {
    let (s, c) = angle_deg.to_radians().sin_cos();
    let (c2, s2, cs) = (c * c, s * s, c * s);
    // Engineering-strain transformation: eps_ply = T eps_lam.
    let t = Matrix3::new(
        c2,
        s2,
        cs,
        s2,
        c2,
        -cs,
        -2.0 * cs,
        2.0 * cs,
        c2 - s2,
    );
    let qb = t.transpose() * q * t;
    0.5 * (qb + qb.transpose())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ply {
    pub material: OrthotropicPly,
    pub angle_deg: f64,
    pub thickness: f64,
}

/// Plies listed from the bottom face upwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlyLayup {
    pub plies: Vec<Ply>,
}

impl PlyLayup {
    pub fn new(plies: Vec<Ply>) -> Self {
        Self { plies }
    }

    pub fn single(material: OrthotropicPly, angle_deg: f64, thickness: f64) -> Self {
        Self::new(vec![Ply { material, angle_deg, thickness }])
    }

    pub fn thickness(&self) -> f64 {
        self.plies.iter().map(|p| p.thickness).sum()
    }

    fn validate(&self) -> Result<()> {
        if self.plies.is_empty() {
            return Err(Error::EmptyLayup);
        }
        for p in &self.plies {
            p.material.validate()?;
            if !(p.thickness > 0.0) {
                return Err(Error::InvalidPly("ply thickness must be positive".into()));
            }
        }
        Ok(())
    }

    /// Bottom-to-top layup reversed, i.e. the section seen upside down.
    pub fn flipped(&self) -> Self {
        Self::new(self.plies.iter().rev().copied().collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BendingRigidity {
    pub d11: f64,
    pub d12: f64,
    pub d16: f64,
    pub d22: f64,
    pub d26: f64,
    pub d66: f64,
}

impl BendingRigidity {
    pub fn from_matrix(d: &Matrix3<f64>) -> Self {
        Self {
            d11: d[(0, 0)],
            d12: d[(0, 1)],
            d16: d[(0, 2)],
            d22: d[(1, 1)],
            d26: d[(1, 2)],
            d66: d[(2, 2)],
        }
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::new(
            self.d11, self.d12, self.d16, self.d12, self.d22, self.d26, self.d16, self.d26,
            self.d66,
        )
    }
}

/// A, B and D matrices about the layup mid-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abd {
    pub a: Matrix3<f64>,
    pub b: Matrix3<f64>,
    pub d: Matrix3<f64>,
}

impl Abd {
    pub fn matrix(&self) -> Matrix6<f64> {
        let mut m = Matrix6::zeros();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.a);
        m.fixed_view_mut::<3, 3>(0, 3).copy_from(&self.b);
        m.fixed_view_mut::<3, 3>(3, 0).copy_from(&self.b);
        m.fixed_view_mut::<3, 3>(3, 3).copy_from(&self.d);
        m
    }
}

pub fn abd(layup: &PlyLayup) -> Result<Abd> {
    layup.validate()?;
    let mut z0 = -0.5 * layup.thickness();
    let (mut a, mut b, mut d) = (Matrix3::zeros(), Matrix3::zeros(), Matrix3::zeros());
    for p in &layup.plies {
        let z1 = z0 + p.thickness;
        let qb = transform_stiffness(&reduced_stiffness(&p.material)?, p.angle_deg);
        a += qb * (z1 - z0);
        b += qb * ((z1 * z1 - z0 * z0) / 2.0);
        d += qb * ((z1.powi(3) - z0.powi(3)) / 3.0);
        z0 = z1;
    }
    Ok(Abd { a, b, d })
}

pub fn bending_rigidity(layup: &PlyLayup) -> Result<BendingRigidity> {
    Ok(BendingRigidity::from_matrix(&abd(layup)?.d))
}

/// Thickness-averaged in-plane stiffness A/t, MPa.
pub fn membrane_stiffness(layup: &PlyLayup) -> Result<Matrix3<f64>> {
    Ok(abd(layup)?.a / layup.thickness())
}

/// Stiffness data one shell layer needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Section {
    pub bending: BendingRigidity,
    /// A/t, MPa.
    pub membrane: Matrix3<f64>,
    pub thickness: f64,
    /// Through-thickness modulus, MPa.
    pub e33: f64,
}

impl Section {
    /// Fails if the layup carries membrane-bending coupling.
    pub fn from_layup(layup: &PlyLayup) -> Result<Self> {
        let abd = abd(layup)?;
        let limit = 1e-9 * abd.a.amax();
        let coupling = abd.b.amax();
        if coupling > limit {
            return Err(Error::Coupling { coupling, limit });
        }
        let t = layup.thickness();
        let e33 = layup.plies.iter().map(|p| p.material.e33 * p.thickness).sum::<f64>() * GPA / t;
        Ok(Self {
            bending: BendingRigidity::from_matrix(&abd.d),
            membrane: abd.a / t,
            thickness: t,
            e33,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RigidityModel {
    /// Narrow beam: D = 1/δ11 from the inverted ABD relation.
    #[default]
    GeneralizedPlaneStress,
    /// Wide plate: D = D11.
    PlaneStrain,
}

/// Effective bending rigidity per unit width of a possibly unsymmetric layup.
pub fn effective_rigidity(layup: &PlyLayup, model: RigidityModel) -> Result<f64> {
    let abd = abd(layup)?;
    match model {
        RigidityModel::PlaneStrain => Ok(abd.d[(0, 0)]),
        RigidityModel::GeneralizedPlaneStress => {
            let inv = abd.matrix().try_inverse().ok_or(Error::SingularAbd)?;
            let delta11 = inv[(3, 3)];
            if !(delta11 > 0.0) || !delta11.is_finite() {
                return Err(Error::SingularAbd);
            }
            Ok(1.0 / delta11)
        }
    }
}

/// Rigidities (D1, D0, R = D0/D1) of the cracked loaded arm and the intact
/// section of a single-leg bending specimen.
pub fn effective_rigidities_slb(
    cracked_top: &PlyLayup,
    uncracked: &PlyLayup,
    model: RigidityModel,
) -> Result<(f64, f64, f64)> {
    let d1 = effective_rigidity(cracked_top, model)?;
    let d0 = effective_rigidity(uncracked, model)?;
    Ok((d1, d0, d0 / d1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn iso(e: f64, nu: f64) -> OrthotropicPly {
        let g = e / (2.0 * (1.0 + nu));
        OrthotropicPly {
            e11: e,
            e22: e,
            e33: e,
            nu12: nu,
            nu13: nu,
            nu23: nu,
            g12: g,
            g13: g,
            g23: g,
            gic: 1.0,
            giic: 1.0,
            eta: 1.0,
            tau_ic: 1.0,
            tau_iic: 1.0,
        }
    }

    #[test]
    fn isotropic_reduced_stiffness() {
        let q = reduced_stiffness(&iso(1.0, 0.3)).unwrap() / GPA;
        assert_relative_eq!(q[(0, 0)], 1.0 / 0.91, max_relative = 1e-14);
        assert_relative_eq!(q[(2, 2)], 1.0 / 2.6, max_relative = 1e-14);
    }

    #[test]
    fn t300_q11() {
        let q = reduced_stiffness(&OrthotropicPly::t300_1076()).unwrap();
        let nu21 = 0.30 * 10.16 / 139.4;
        assert_relative_eq!(q[(0, 0)], 139_400.0 / (1.0 - 0.30 * nu21), max_relative = 1e-14);
        assert!((q[(0, 0)] - 140_320.0).abs() < 10.0);
        assert_eq!(q[(0, 2)], 0.0);
        assert_eq!(q[(1, 2)], 0.0);
    }

    #[test]
    fn rejects_nonphysical_ply() {
        let mut p = OrthotropicPly::t300_1076();
        p.nu12 = 0.49;
        p.e22 = 800.0;
        assert!(reduced_stiffness(&p).is_err());
    }

    #[test]
    fn quarter_turn_swaps_axes() {
        let q = reduced_stiffness(&OrthotropicPly::t300_1076()).unwrap();
        let r = transform_stiffness(&q, 90.0);
        assert_relative_eq!(r[(0, 0)], q[(1, 1)], max_relative = 1e-12);
        assert_relative_eq!(r[(1, 1)], q[(0, 0)], max_relative = 1e-12);
        assert_relative_eq!(r[(0, 1)], q[(0, 1)], max_relative = 1e-12);
        assert_relative_eq!(r[(2, 2)], q[(2, 2)], max_relative = 1e-12);
        assert_eq!(transform_stiffness(&q, 0.0), q);
    }

    #[test]
    fn single_ply_rigidities() {
        let p = OrthotropicPly::t300_1076();
        let l = PlyLayup::single(p, 0.0, 1.5);
        let q = reduced_stiffness(&p).unwrap();
        let d = bending_rigidity(&l).unwrap();
        assert_relative_eq!(d.d11, q[(0, 0)] * 1.5f64.powi(3) / 12.0, max_relative = 1e-13);
        let m = membrane_stiffness(&l).unwrap();
        assert_relative_eq!(m[(0, 0)], q[(0, 0)], max_relative = 1e-13);
        assert_relative_eq!(m[(0, 1)], 0.30 * 10_160.0 / (1.0 - 0.30 * p.nu21()), max_relative = 1e-13);
        let s = Section::from_layup(&l).unwrap();
        assert_relative_eq!(s.e33, 10_160.0, max_relative = 1e-14);
    }

    #[test]
    fn unsymmetric_layer_is_rejected() {
        let p = OrthotropicPly::t300_1076();
        let l = PlyLayup::new(vec![
            Ply { material: p, angle_deg: 0.0, thickness: 0.5 },
            Ply { material: p, angle_deg: 90.0, thickness: 0.5 },
        ]);
        assert!(matches!(Section::from_layup(&l), Err(Error::Coupling { .. })));
        assert!(matches!(abd(&PlyLayup::new(vec![])), Err(Error::EmptyLayup)));
    }

    #[test]
    fn identical_sections_give_unit_ratio() {
        let p = OrthotropicPly::c12k_r6376();
        let l = PlyLayup::single(p, 0.0, 2.0);
        let (d1, d0, r) = effective_rigidities_slb(&l, &l, RigidityModel::default()).unwrap();
        assert_eq!(d1, d0);
        assert_eq!(r, 1.0);
        let ps = effective_rigidity(&l, RigidityModel::PlaneStrain).unwrap();
        assert_relative_eq!(ps, bending_rigidity(&l).unwrap().d11, max_relative = 1e-14);
        assert!(ps > d1);
    }
}
