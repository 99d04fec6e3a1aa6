//! Flat shell: constant-strain membrane superposed on the cubic plate.
//!
//! Element DoF order: (u1, v1, u2, v2, u3, v3, w1, θx1, θy1, w2, θx2, θy2, w3, θx3, θy3).

use nalgebra::{SMatrix, SVector};

use crate::error::Result;
use crate::laminate::Section;
use crate::plate::{k_plate, PlateMatrices, TriangleGeometry};

pub type Mat6 = SMatrix<f64, 6, 6>;
pub type Mat15 = SMatrix<f64, 15, 15>;
pub type Vec15 = SVector<f64, 15>;

pub fn b_membrane(tri: &TriangleGeometry) -> SMatrix<f64, 3, 6> {
    let (x, y) = (tri.x, tri.y);
    let mut b = SMatrix::<f64, 3, 6>::zeros();
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let bi = y[j] - y[k];
        let ci = x[k] - x[j];
        b[(0, 2 * i)] = bi;
        b[(1, 2 * i + 1)] = ci;
        b[(2, 2 * i)] = ci;
        b[(2, 2 * i + 1)] = bi;
    }
    b / (2.0 * tri.area)
}

pub fn k_membrane(section: &Section, tri: &TriangleGeometry) -> Mat6 {
    let b = b_membrane(tri);
    let k = b.transpose() * section.membrane * b * (section.thickness * tri.area);
    0.5 * (k + k.transpose())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShellElement {
    pub tri: TriangleGeometry,
    pub plate: PlateMatrices,
    pub k: Mat15,
}

impl ShellElement {
    pub fn new(section: &Section, tri: TriangleGeometry) -> Result<Self> {
        let plate = k_plate(&section.bending, &tri)?;
        let k = k_shell(&k_membrane(section, &tri), &plate);
        Ok(Self { tri, plate, k })
    }

    pub fn f_int(&self, q: &Vec15) -> Vec15 {
        f_int_shell(&self.k, q)
    }
}

/// Block-diagonal assembly; membrane and bending are uncoupled.
pub fn k_shell(k_mem: &Mat6, plate: &PlateMatrices) -> Mat15 {
    let mut k = Mat15::zeros();
    k.fixed_view_mut::<6, 6>(0, 0).copy_from(k_mem);
    k.fixed_view_mut::<9, 9>(6, 6).copy_from(&plate.k);
    k
}

pub fn f_int_shell(k: &Mat15, q: &Vec15) -> Vec15 {
    k * q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laminate::{OrthotropicPly, PlyLayup};
    use crate::plate::triangle_local_frame;
    use approx::assert_relative_eq;

    fn setup() -> (Section, TriangleGeometry) {
        let s = Section::from_layup(&PlyLayup::single(OrthotropicPly::t300_1076(), 30.0, 1.5)).unwrap();
        let tri = triangle_local_frame([[0.0, 0.0], [2.0, 0.3], [0.4, 1.5]]).unwrap();
        (s, tri)
    }

    #[test]
    fn membrane_b_entries() {
        let (_, tri) = setup();
        let b = b_membrane(&tri) * (2.0 * tri.area);
        assert_relative_eq!(b[(0, 0)], tri.y[1] - tri.y[2], epsilon = 1e-14);
        assert_relative_eq!(b[(1, 1)], tri.x[2] - tri.x[1], epsilon = 1e-14);
    }

    #[test]
    fn membrane_rigid_modes_and_uniform_strain() {
        let (s, tri) = setup();
        let k = k_membrane(&s, &tri);
        let scale = k.amax();
        for mode in 0..3 {
            let mut q = SVector::<f64, 6>::zeros();
            for i in 0..3 {
                let (u, v) = match mode {
                    0 => (1.0, 0.0),
                    1 => (0.0, 1.0),
                    _ => (-tri.y[i], tri.x[i]),
                };
                q[2 * i] = u;
                q[2 * i + 1] = v;
            }
            assert!((k * q).amax() < 1e-10 * scale);
        }
        let mut q = SVector::<f64, 6>::zeros();
        for i in 0..3 {
            q[2 * i] = tri.x[i];
        }
        let e = 0.5 * q.dot(&(k * q));
        assert_relative_eq!(e, 0.5 * s.membrane[(0, 0)] * s.thickness * tri.area, max_relative = 1e-12);
    }

    #[test]
    fn shell_blocks_are_uncoupled() {
        let (s, tri) = setup();
        let el = ShellElement::new(&s, tri).unwrap();
        assert!(el.k.fixed_view::<6, 9>(0, 6).iter().all(|v| *v == 0.0));
        assert!(el.k.fixed_view::<9, 6>(6, 0).iter().all(|v| *v == 0.0));
        assert_eq!(el.f_int(&Vec15::zeros()), Vec15::zeros());
    }
}
