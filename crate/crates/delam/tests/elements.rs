use approx::assert_relative_eq;
use delam::cohesive::{PointStiffness, Vec30, NGAUSS};
use delam::laminate::{BendingRigidity, OrthotropicPly, PlyLayup, Section};
use delam::mesh::{build_model, BenchmarkGeometry, LayeredModel, ModelSpec, DOFS_PER_NODE, THETA_X, THETA_Y, U, V, W};
use delam::plate::{h_matrix, k_plate, t_matrix, triangle_local_frame, TriangleGeometry};
use delam::quadrature::cowper_13;
use delam::shell::{ShellElement, Vec15};
use nalgebra::{DMatrix, SMatrix, SVector};

fn skew_triangle() -> TriangleGeometry {
    triangle_local_frame([[0.3, -0.2], [2.1, 0.4], [0.7, 1.6]]).unwrap()
}

fn orthotropic_d() -> BendingRigidity {
    BendingRigidity { d11: 5.0, d12: 1.0, d16: 0.3, d22: 2.0, d26: -0.2, d66: 1.1 }
}

fn rank(m: &DMatrix<f64>) -> (usize, usize) {
    let eig = m.clone().symmetric_eigen();
    let top = eig.eigenvalues.amax();
    let pos = eig.eigenvalues.iter().filter(|v| **v > 1e-9 * top).count();
    let neg = eig.eigenvalues.iter().filter(|v| **v < -1e-9 * top).count();
    assert_eq!(neg, 0, "negative eigenvalues: {:?}", eig.eigenvalues);
    (pos, m.nrows() - pos)
}

/// Nodal plate vector (w, ∂w/∂x, ∂w/∂y) of a field given in global coordinates.
fn plate_dofs(tri: &TriangleGeometry, f: impl Fn(f64, f64) -> (f64, f64, f64)) -> SVector<f64, 9> {
    let mut v = SVector::<f64, 9>::zeros();
    for i in 0..3 {
        let (w, wx, wy) = f(tri.x[i] + tri.centroid[0], tri.y[i] + tri.centroid[1]);
        v[3 * i] = w;
        v[3 * i + 1] = wx;
        v[3 * i + 2] = wy;
    }
    v
}

#[test]
fn plate_stiffness_has_three_rigid_modes() {
    let pm = k_plate(&orthotropic_d(), &skew_triangle()).unwrap();
    let k = DMatrix::from_column_slice(9, 9, pm.k.as_slice());
    assert_eq!(rank(&k), (6, 3));
}

#[test]
fn shell_stiffness_has_six_rigid_modes() {
    let layup = PlyLayup::single(OrthotropicPly::im7_8552(), 30.0, 2.25);
    let shell = ShellElement::new(&Section::from_layup(&layup).unwrap(), skew_triangle()).unwrap();
    let k = DMatrix::from_column_slice(15, 15, shell.k.as_slice());
    assert_eq!(rank(&k), (9, 6));
}

#[test]
fn linear_deflection_has_no_cubic_part() {
    let tri = skew_triangle();
    let pm = k_plate(&orthotropic_d(), &tri).unwrap();
    let w = plate_dofs(&tri, |x, y| (0.7 - 1.3 * x + 0.4 * y, -1.3, 0.4));
    assert!((pm.c * w).amax() < 1e-12);
    assert!((pm.k * w).amax() < 1e-11);
}

#[test]
fn constant_curvature_energies() {
    let tri = skew_triangle();
    let d = orthotropic_d();
    let pm = k_plate(&d, &tri).unwrap();
    let a = tri.area;
    // (field, energy ½κᵀDκ·A)
    let cases: [(Box<dyn Fn(f64, f64) -> (f64, f64, f64)>, f64); 3] = [
        (Box::new(|x, _| (0.5 * x * x, x, 0.0)), 0.5 * d.d11 * a),
        (Box::new(|_, y| (0.5 * y * y, 0.0, y)), 0.5 * d.d22 * a),
        (Box::new(|x, y| (x * y, y, x)), 2.0 * d.d66 * a),
    ];
    for (f, expected) in cases {
        let w = plate_dofs(&tri, f);
        assert_relative_eq!(0.5 * w.dot(&(pm.k * w)), expected, max_relative = 1e-8);
    }
}

#[test]
fn energy_matrix_matches_quadrature() {
    let tri = skew_triangle();
    let d = orthotropic_d();
    let h = h_matrix(&d, &tri).unwrap();
    // Curvatures (w_xx, w_yy, 2w_xy) of the seven quadratic and cubic monomials.
    let g = |x: f64, y: f64| {
        SMatrix::<f64, 3, 7>::from_row_slice(&[
            2.0, 0.0, 0.0, 6.0 * x, 2.0 * y, 0.0, 0.0, //
            0.0, 0.0, 2.0, 0.0, 0.0, 2.0 * x, 6.0 * y, //
            0.0, 2.0, 0.0, 0.0, 4.0 * x, 4.0 * y, 0.0,
        ])
    };
    let mut oracle = SMatrix::<f64, 7, 7>::zeros();
    for p in cowper_13() {
        let (x, y) = tri.point(p.l);
        let gm = g(x, y);
        oracle += gm.transpose() * d.matrix() * gm * (p.w * tri.area);
    }
    assert!((h - oracle).amax() < 1e-12 * oracle.amax(), "{h} vs {oracle}");
}

#[test]
fn edge_rows_of_t_integrate_boundary_fields() {
    let tri = skew_triangle();
    let t = t_matrix(&tri);
    // Cubic w: the Hermite edge interpolant is exact, so row 3 + e is ∫w ds.
    let cubic = |x: f64, y: f64| {
        (
            0.4 + x - 0.3 * y + 0.2 * x * x * y - 0.7 * y * y * y + 0.1 * x * x * x,
            1.0 + 0.4 * x * y + 0.3 * x * x,
            -0.3 + 0.2 * x * x - 2.1 * y * y,
        )
    };
    // Quadratic w: the normal slope is linear along an edge.
    let quad = |x: f64, y: f64| (0.3 * x * x - 0.8 * x * y + 0.5 * y * y + x, 0.6 * x - 0.8 * y + 1.0, -0.8 * x + y);
    let gl = [(-(0.6f64).sqrt(), 5.0 / 9.0), (0.0, 8.0 / 9.0), ((0.6f64).sqrt(), 5.0 / 9.0)];
    let qc = t * plate_dofs(&tri, cubic);
    let qq = t * plate_dofs(&tri, quad);
    for e in 0..3 {
        let (i, j) = (e, (e + 1) % 3);
        let g = |k: usize| (tri.x[k] + tri.centroid[0], tri.y[k] + tri.centroid[1]);
        let (pi, pj) = (g(i), g(j));
        let (s, c) = tri.gamma[e].sin_cos();
        let l = tri.len[e];
        let (mut w_int, mut near, mut far) = (0.0, 0.0, 0.0);
        for (xi, wt) in gl {
            let r = 0.5 * (1.0 + xi);
            let (x, y) = (pi.0 + r * (pj.0 - pi.0), pi.1 + r * (pj.1 - pi.1));
            w_int += 0.5 * l * wt * cubic(x, y).0;
            let (_, wx, wy) = quad(x, y);
            let dn = c * wx + s * wy;
            near += 0.5 * l * wt * dn * (1.0 - r);
            far += 0.5 * l * wt * dn * r;
        }
        assert_relative_eq!(qc[3 + e], w_int, max_relative = 1e-12);
        assert_relative_eq!(qq[6 + 2 * e], -near, max_relative = 1e-12, epsilon = 1e-14);
        assert_relative_eq!(qq[7 + 2 * e], -far, max_relative = 1e-12, epsilon = 1e-14);
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

#[test]
fn quadrature_is_exact_to_degree_seven() {
    // ∫ L1^a L2^b L3^c dA = 2A·a!b!c!/(a+b+c+2)!
    let rule = cowper_13();
    for a in 0..=7u32 {
        for b in 0..=(7 - a) {
            for c in 0..=(7 - a - b) {
                let q: f64 = rule.iter().map(|p| p.w * p.l[0].powi(a as i32) * p.l[1].powi(b as i32) * p.l[2].powi(c as i32)).sum();
                let exact = 2.0 * factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 2);
                assert_relative_eq!(q, exact, max_relative = 1e-12);
            }
        }
    }
}

fn layer_mid_z(m: &LayeredModel) -> Vec<f64> {
    let mut z = Vec::new();
    let mut bottom = 0.0;
    for t in &m.layer_thickness {
        z.push(bottom + 0.5 * t);
        bottom += t;
    }
    z
}

/// Kirchhoff rigid motion: translation, small rotations about all three axes.
fn rigid_motion(m: &LayeredModel) -> Vec<f64> {
    let z = layer_mid_z(m);
    let (u0, v0, w0, bx, by, rz) = (0.3, -0.2, 0.7, 1.1e-2, -0.6e-2, 0.9e-2);
    let mut u = vec![0.0; m.n_dofs()];
    for n in 0..m.n_nodes() {
        let (x, y, l) = m.node_position(n);
        let d = n * DOFS_PER_NODE;
        u[d + U] = u0 - z[l] * bx - rz * y;
        u[d + V] = v0 - z[l] * by + rz * x;
        u[d + W] = w0 + bx * x + by * y;
        u[d + THETA_X] = bx;
        u[d + THETA_Y] = by;
    }
    u
}

fn slb_model() -> LayeredModel {
    let ply = OrthotropicPly::c12k_r6376();
    let arm = PlyLayup::new(vec![
        delam::laminate::Ply { material: ply, angle_deg: 0.0, thickness: 0.5 },
        delam::laminate::Ply { material: ply, angle_deg: 90.0, thickness: 1.0 },
        delam::laminate::Ply { material: ply, angle_deg: 0.0, thickness: 0.5 },
    ]);
    let mut spec = ModelSpec::layered(BenchmarkGeometry::slb(), &arm, &arm, 10.0).unwrap();
    spec.strip_width = Some(10.0);
    build_model(&spec).unwrap()
}

#[test]
fn rigid_motion_opens_no_interface() {
    let m = slb_model();
    let u = rigid_motion(&m);
    for c in &m.ces {
        let dofs = LayeredModel::ce_dofs(c);
        let q = Vec30::from_fn(|i, _| u[dofs[i]]);
        for o in m.ce(c).openings(&q) {
            for v in o {
                assert!(v.abs() < 1e-10, "opening {v:e}");
            }
        }
    }
    for s in &m.shells {
        let dofs = LayeredModel::shell_dofs(&s.nodes);
        let q = Vec15::from_fn(|i, _| u[dofs[i]]);
        let f = m.shell(s).f_int(&q);
        assert!(f.amax() < 1e-8 * m.shell(s).k.amax(), "{}", f.amax());
    }
}

#[test]
fn cohesive_force_is_energy_gradient() {
    let m = slb_model();
    let c = m.ces.iter().find(|c| !m.ce(c).contact).unwrap();
    let ce = m.ce(c);
    let k = ce.props.k;
    // Mixed pattern of damaged and intact points, negative-weight centroid included.
    let diag: PointStiffness = std::array::from_fn(|g| {
        let s = 0.2 + 0.8 * ((g * 7) % 5) as f64 / 4.0;
        [s * k, (1.2 - s) * k, 0.5 * k]
    });
    let q = Vec30::from_fn(|i, _| 1e-3 * ((i as f64 * 1.7).sin() + 0.3));
    let f = ce.internal_force(&q, &diag);
    let h = 1e-7;
    for i in 0..30 {
        let mut qp = q;
        let mut qm = q;
        qp[i] += h;
        qm[i] -= h;
        let fd = (ce.elastic_energy(&qp, &diag) - ce.elastic_energy(&qm, &diag)) / (2.0 * h);
        assert!((fd - f[i]).abs() <= 1e-6 * f.amax(), "dof {i}: {fd} vs {}", f[i]);
    }
    // K·q reproduces the force for the same point stiffnesses.
    assert!((ce.stiffness(&diag) * q - f).amax() <= 1e-10 * f.amax());
    assert_eq!(diag.len(), NGAUSS);
}
