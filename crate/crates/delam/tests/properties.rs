use approx::assert_relative_eq;
use delam::laminate::{abd, effective_rigidity, reduced_stiffness, transform_stiffness, OrthotropicPly, Ply, PlyLayup, RigidityModel};
use delam::plate::{k_plate, triangle_local_frame};
use nalgebra::SVector;
use proptest::prelude::*;

fn layup(angles: &[f64], t: f64) -> PlyLayup {
    let m = OrthotropicPly::im7_8552();
    PlyLayup::new(angles.iter().map(|a| Ply { material: m, angle_deg: *a, thickness: t }).collect())
}

#[test]
fn symmetric_layup_has_no_coupling() {
    let l = layup(&[0.0, 45.0, -45.0, 90.0, 90.0, -45.0, 45.0, 0.0], 0.125);
    let m = abd(&l).unwrap();
    assert!(m.b.amax() < 1e-9 * m.a.amax());
    // D11 of a single ply is Q11·t³/12.
    let one = layup(&[0.0], 2.0);
    let q = reduced_stiffness(&OrthotropicPly::im7_8552()).unwrap();
    assert_relative_eq!(abd(&one).unwrap().d[(0, 0)], q[(0, 0)] * 8.0 / 12.0, max_relative = 1e-12);
}

#[test]
fn unsymmetric_arm_is_more_compliant_as_a_beam() {
    let l = layup(&[0.0, 90.0], 1.0);
    let narrow = effective_rigidity(&l, RigidityModel::GeneralizedPlaneStress).unwrap();
    let wide = effective_rigidity(&l, RigidityModel::PlaneStrain).unwrap();
    assert!(narrow < wide);
}

fn triangle() -> impl Strategy<Value = [[f64; 2]; 3]> {
    let c = -5.0f64..5.0;
    [(c.clone(), c.clone()), (c.clone(), c.clone()), (c.clone(), c)]
        .prop_map(|p| p.map(|(x, y)| [x, y]))
        .prop_filter("well shaped", |p| {
            let area = 0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1])).abs();
            let l2 = |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
            let longest = l2(p[0], p[1]).max(l2(p[1], p[2])).max(l2(p[2], p[0]));
            area > 0.05 * longest
        })
}

proptest! {
    #[test]
    fn half_turn_leaves_ply_stiffness_unchanged(angle in -180.0f64..180.0) {
        let q = reduced_stiffness(&OrthotropicPly::c12k_r6376()).unwrap();
        let a = transform_stiffness(&q, angle);
        let b = transform_stiffness(&q, angle + 180.0);
        prop_assert!((a - b).amax() <= 1e-9 * q.amax());
        prop_assert!((a - a.transpose()).amax() <= 1e-9 * q.amax());
        // The invariant U1-type trace is preserved by rotation.
        let inv = |m: &nalgebra::Matrix3<f64>| m[(0, 0)] + m[(1, 1)] + 2.0 * m[(0, 1)];
        prop_assert!((inv(&a) - inv(&q)).abs() <= 1e-9 * q.amax());
    }

    #[test]
    fn flipping_a_layup_keeps_bending_and_negates_coupling(angles in prop::collection::vec(-90.0f64..90.0, 1..6)) {
        let l = layup(&angles, 0.2);
        let a = abd(&l).unwrap();
        let f = abd(&l.flipped()).unwrap();
        prop_assert!((a.d - f.d).amax() <= 1e-9 * a.d.amax());
        prop_assert!((a.b + f.b).amax() <= 1e-9 * a.a.amax());
    }

    #[test]
    fn plate_reproduces_rigid_and_constant_curvature_fields(pts in triangle(), kx in -1.0f64..1.0, ky in -1.0f64..1.0, kxy in -1.0f64..1.0) {
        let tri = triangle_local_frame(pts).unwrap();
        let l = layup(&[30.0], 1.5);
        let d = delam::laminate::bending_rigidity(&l).unwrap();
        let pm = k_plate(&d, &tri).unwrap();
        prop_assert!((pm.k - pm.k.transpose()).amax() <= 1e-10 * pm.k.amax());
        let field = |f: &dyn Fn(f64, f64) -> (f64, f64, f64)| {
            SVector::<f64, 9>::from_fn(|r, _| {
                let i = r / 3;
                let v = f(pts[tri.order[i]][0], pts[tri.order[i]][1]);
                [v.0, v.1, v.2][r % 3]
            })
        };
        let rigid = field(&|x, y| (0.2 + 0.7 * x - 0.4 * y, 0.7, -0.4));
        prop_assert!((pm.k * rigid).amax() <= 1e-10 * pm.k.amax());
        // w = ½kx·x² + ½ky·y² + ½kxy·xy has curvature (kx, ky, kxy).
        let quad = field(&|x, y| (0.5 * (kx * x * x + ky * y * y + kxy * x * y), kx * x + 0.5 * kxy * y, ky * y + 0.5 * kxy * x));
        let kappa = nalgebra::Vector3::new(kx, ky, kxy);
        let energy = 0.5 * kappa.dot(&(d.matrix() * kappa)) * tri.area;
        let fe = 0.5 * quad.dot(&(pm.k * quad));
        prop_assert!((fe - energy).abs() <= 1e-8 * (energy.abs() + 1e-12 * pm.k.amax()), "{fe} vs {energy}");
    }
}
