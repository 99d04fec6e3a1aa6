//! Allman's triangular cubic plate element for symmetric orthotropic sections.
//!
//! Nodal DoFs per element: (w, ∂w/∂x, ∂w/∂y) at each vertex. The cubic field is
//! `w = A1 + A2 x + A3 y + α·(x², xy, y², x³, x²y, xy², y³)` in a frame centred
//! on the centroid; only α carries strain energy.

use nalgebra::{Matrix3, SMatrix, SVector};

use crate::error::{Error, Result};
use crate::laminate::BendingRigidity;

pub type Mat7 = SMatrix<f64, 7, 7>;
pub type Mat7x12 = SMatrix<f64, 7, 12>;
pub type Mat12x9 = SMatrix<f64, 12, 9>;
pub type Mat7x9 = SMatrix<f64, 7, 9>;
pub type Mat9 = SMatrix<f64, 9, 9>;
pub type Vec7 = SVector<f64, 7>;

const MIN_AREA: f64 = 1e-12;
const MAX_ASPECT: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleGeometry {
    /// Vertex coordinates relative to the centroid, counter-clockwise.
    pub x: [f64; 3],
    pub y: [f64; 3],
    /// Global position of the centroid.
    pub centroid: [f64; 2],
    /// Lengths of edges 1-2, 2-3, 3-1.
    pub len: [f64; 3],
    /// Angles from the x axis to the outward normals of edges 1-2, 2-3, 3-1.
    pub gamma: [f64; 3],
    pub area: f64,
    /// `order[k]` is the input vertex placed at local position k.
    pub order: [usize; 3],
}

/// Builds the centroidal frame, swapping vertices 2 and 3 if they arrive clockwise.
pub fn triangle_local_frame(pts: [[f64; 2]; 3]) -> Result<TriangleGeometry> {
    let signed = 0.5
        * ((pts[1][0] - pts[0][0]) * (pts[2][1] - pts[0][1])
            - (pts[2][0] - pts[0][0]) * (pts[1][1] - pts[0][1]));
    let order = if signed < 0.0 { [0, 2, 1] } else { [0, 1, 2] };
    let area = signed.abs();
    let p = order.map(|i| pts[i]);
    let cx = (p[0][0] + p[1][0] + p[2][0]) / 3.0;
    let cy = (p[0][1] + p[1][1] + p[2][1]) / 3.0;
    let x = p.map(|v| v[0] - cx);
    let y = p.map(|v| v[1] - cy);
    let mut len = [0.0; 3];
    let mut gamma = [0.0; 3];
    for i in 0..3 {
        let j = (i + 1) % 3;
        let (dx, dy) = (x[j] - x[i], y[j] - y[i]);
        len[i] = dx.hypot(dy);
        // Outward normal of a counter-clockwise edge is the tangent turned clockwise.
        gamma[i] = (-dx).atan2(dy);
    }
    let lmax = len.iter().cloned().fold(0.0, f64::max);
    if !(area >= MIN_AREA) || lmax * lmax / (2.0 * area) > MAX_ASPECT {
        return Err(Error::Degenerate(format!(
            "area {area:.3e}, longest edge {lmax:.3e}"
        )));
    }
    Ok(TriangleGeometry { x, y, centroid: [cx, cy], len, gamma, area, order })
}

impl TriangleGeometry {
    /// Area coordinates of a point given in the centroidal frame.
    pub fn area_coords(&self, px: f64, py: f64) -> [f64; 3] {
        let (x, y) = (self.x, self.y);
        let mut l = [0.0; 3];
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            l[i] = ((x[j] * y[k] - x[k] * y[j]) + (y[j] - y[k]) * px + (x[k] - x[j]) * py)
                / (2.0 * self.area);
        }
        l
    }

    /// Centroidal coordinates of the point with area coordinates `l`.
    pub fn point(&self, l: [f64; 3]) -> (f64, f64) {
        (
            l[0] * self.x[0] + l[1] * self.x[1] + l[2] * self.x[2],
            l[0] * self.y[0] + l[1] * self.y[1] + l[2] * self.y[2],
        )
    }
}

/// ∫x^p y^q dA for p + q ≤ 2 in the centroidal frame; the first moments vanish.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonomialIntegrals {
    pub area: f64,
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

pub fn monomial_integrals(tri: &TriangleGeometry) -> MonomialIntegrals {
    let (x, y, a) = (tri.x, tri.y, tri.area);
    MonomialIntegrals {
        area: a,
        xx: a / 12.0 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]),
        xy: a / 12.0 * (x[0] * y[0] + x[1] * y[1] + x[2] * y[2]),
        yy: a / 12.0 * (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]),
    }
}

/// Curvature operator split as `G(x, y) = G0 + x·Gx + y·Gy`, mapping α to
/// (w_xx, w_yy, 2w_xy).
fn curvature_operator() -> [SMatrix<f64, 3, 7>; 3] {
    let g0 = SMatrix::<f64, 3, 7>::from_row_slice(&[
        2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, //
        0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0,
    ]);
    let gx = SMatrix::<f64, 3, 7>::from_row_slice(&[
        0.0, 0.0, 0.0, 6.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 0.0, 0.0, 2.0, 0.0, //
        0.0, 0.0, 0.0, 0.0, 4.0, 0.0, 0.0,
    ]);
    let gy = SMatrix::<f64, 3, 7>::from_row_slice(&[
        0.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 6.0, //
        0.0, 0.0, 0.0, 0.0, 0.0, 4.0, 0.0,
    ]);
    [g0, gx, gy]
}

/// Strain energy matrix: ∫U0 dA = ½ αᵀHα.
pub fn h_matrix(d: &BendingRigidity, tri: &TriangleGeometry) -> Result<Mat7> {
    let dm = d.matrix();
    let m = monomial_integrals(tri);
    let [g0, gx, gy] = curvature_operator();
    let cross = gx.transpose() * dm * gy;
    let h = g0.transpose() * dm * g0 * m.area
        + gx.transpose() * dm * gx * m.xx
        + gy.transpose() * dm * gy * m.yy
        + (cross + cross.transpose()) * m.xy;
    let h = 0.5 * (h + h.transpose());
    if h.cholesky().is_none() {
        return Err(Error::Degenerate("H is not positive definite".into()));
    }
    Ok(h)
}

/// Moment resultants (Mx, My, Mxy) per unit α at (x, y), and their x and y
/// derivatives. Moments follow M = −D·κ.
fn moment_operator(dm: &Matrix3<f64>, x: f64, y: f64) -> SMatrix<f64, 3, 7> {
    let [g0, gx, gy] = curvature_operator();
    -(dm * (g0 + gx * x + gy * y))
}

fn normal_moment(m: &SMatrix<f64, 3, 7>, gamma: f64) -> SMatrix<f64, 1, 7> {
    let (s, c) = gamma.sin_cos();
    m.row(0) * (c * c) + m.row(1) * (s * s) + m.row(2) * (2.0 * s * c)
}

fn twisting_moment(m: &SMatrix<f64, 3, 7>, gamma: f64) -> SMatrix<f64, 1, 7> {
    let (s2, c2) = (2.0 * gamma).sin_cos();
    (m.row(1) - m.row(0)) * (0.5 * s2) + m.row(2) * c2
}

/// Maps α to the generalized boundary forces
/// (R1, R2, R3, Vn12, Vn23, Vn31, Mn12, Mn21, Mn23, Mn32, Mn31, Mn13): Q = Bᵀα.
pub fn b_matrix(d: &BendingRigidity, tri: &TriangleGeometry) -> Mat7x12 {
    let dm = d.matrix();
    let [_, gx, gy] = curvature_operator();
    let mdx = -(dm * gx);
    let mdy = -(dm * gy);
    let at_node: [SMatrix<f64, 3, 7>; 3] =
        std::array::from_fn(|i| moment_operator(&dm, tri.x[i], tri.y[i]));
    let g = tri.gamma;
    let mut b = Mat7x12::zeros();
    for n in 0..3 {
        // Corner force: jump of the twisting moment from the incoming to the outgoing edge.
        let (out, inc) = (n, (n + 2) % 3);
        let r = twisting_moment(&at_node[n], g[out]) - twisting_moment(&at_node[n], g[inc]);
        b.set_column(n, &r.transpose());
    }
    for e in 0..3 {
        let (s, c) = g[e].sin_cos();
        let dmn_dx = normal_moment(&mdx, g[e]);
        let dmn_dy = normal_moment(&mdy, g[e]);
        let dmns_dx = twisting_moment(&mdx, g[e]);
        let dmns_dy = twisting_moment(&mdy, g[e]);
        let vn = dmn_dx * c + dmn_dy * s - dmns_dx * (2.0 * s) + dmns_dy * (2.0 * c);
        b.set_column(3 + e, &vn.transpose());
        let (i, j) = (e, (e + 1) % 3);
        b.set_column(6 + 2 * e, &normal_moment(&at_node[i], g[e]).transpose());
        b.set_column(7 + 2 * e, &normal_moment(&at_node[j], g[e]).transpose());
    }
    b
}

/// Maps nodal DoFs to the generalized boundary displacements: q = T·W̄.
pub fn t_matrix(tri: &TriangleGeometry) -> Mat12x9 {
    let mut t = Mat12x9::zeros();
    for n in 0..3 {
        t[(n, 3 * n)] = 1.0;
    }
    for e in 0..3 {
        let (i, j) = (e, (e + 1) % 3);
        let l = tri.len[e];
        let (s, c) = tri.gamma[e].sin_cos();
        // Cubic Hermite edge integral; the tangential slope is −s·θx + c·θy.
        let k = l * l / 12.0;
        let row = 3 + e;
        t[(row, 3 * i)] = l / 2.0;
        t[(row, 3 * i + 1)] = -k * s;
        t[(row, 3 * i + 2)] = k * c;
        t[(row, 3 * j)] = l / 2.0;
        t[(row, 3 * j + 1)] = k * s;
        t[(row, 3 * j + 2)] = -k * c;
        // Linear normal slope c·θx + s·θy weighted by the edge shape functions.
        for (row, near, far) in [(6 + 2 * e, i, j), (7 + 2 * e, j, i)] {
            t[(row, 3 * near + 1)] = -l / 3.0 * c;
            t[(row, 3 * near + 2)] = -l / 3.0 * s;
            t[(row, 3 * far + 1)] = -l / 6.0 * c;
            t[(row, 3 * far + 2)] = -l / 6.0 * s;
        }
    }
    t
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlateMatrices {
    pub h: Mat7,
    pub b: Mat7x12,
    pub t: Mat12x9,
    /// α = C·W̄.
    pub c: Mat7x9,
    pub k: Mat9,
}

pub fn k_plate(d: &BendingRigidity, tri: &TriangleGeometry) -> Result<PlateMatrices> {
    let h = h_matrix(d, tri)?;
    let b = b_matrix(d, tri);
    let t = t_matrix(tri);
    let bt = b * t;
    let chol = h
        .cholesky()
        .ok_or_else(|| Error::Degenerate("H is not positive definite".into()))?;
    let c = chol.solve(&bt);
    let k = bt.transpose() * c;
    let k = 0.5 * (k + k.transpose());
    Ok(PlateMatrices { h, b, t, c, k })
}

/// Cubic field helpers shared with the cohesive element.
pub(crate) fn r_w(x: f64, y: f64) -> Vec7 {
    Vec7::from_column_slice(&[x * x, x * y, y * y, x * x * x, x * x * y, x * y * y, y * y * y])
}

pub(crate) fn r_x(x: f64, y: f64) -> Vec7 {
    Vec7::from_column_slice(&[2.0 * x, y, 0.0, 3.0 * x * x, 2.0 * x * y, y * y, 0.0])
}

pub(crate) fn r_y(x: f64, y: f64) -> Vec7 {
    Vec7::from_column_slice(&[0.0, x, 2.0 * y, 0.0, x * x, 2.0 * x * y, 3.0 * y * y])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn d_iso() -> BendingRigidity {
        BendingRigidity { d11: 3.0, d12: 0.9, d16: 0.0, d22: 3.0, d26: 0.0, d66: 1.05 }
    }

    #[test]
    fn equilateral_frame() {
        let r = 1.0 / 3f64.sqrt();
        let pts = [0.0f64, 120.0, 240.0].map(|a| {
            let t = (a + 90.0f64).to_radians();
            [r * t.cos(), r * t.sin()]
        });
        let tri = triangle_local_frame(pts).unwrap();
        assert_relative_eq!(tri.area, 3f64.sqrt() / 4.0, max_relative = 1e-14);
        for i in 0..3 {
            assert_relative_eq!(tri.x[i], pts[i][0], epsilon = 1e-14);
            assert_relative_eq!(tri.len[i], 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn right_triangle_frame() {
        let tri = triangle_local_frame([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(tri.area, 0.5);
        assert_relative_eq!(tri.centroid[0], 1.0 / 3.0);
        assert_relative_eq!(tri.x[0], -1.0 / 3.0);
        // Edge 1-2 lies on y = 0 with the triangle above it.
        assert_relative_eq!(tri.gamma[0], -std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn clockwise_input_is_reordered() {
        let tri = triangle_local_frame([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(tri.order, [0, 2, 1]);
        assert!(tri.area > 0.0);
    }

    #[test]
    fn collinear_rejected() {
        assert!(triangle_local_frame([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]).is_err());
        assert!(triangle_local_frame([[0.0, 0.0], [1e5, 0.0], [0.0, 1e-2]]).is_err());
    }

    #[test]
    fn centroid_first_moments_vanish() {
        let tri = triangle_local_frame([[0.3, -1.0], [2.0, 0.4], [-0.5, 1.7]]).unwrap();
        let sx: f64 = tri.x.iter().sum();
        let sy: f64 = tri.y.iter().sum();
        assert!(sx.abs() < 1e-15 && sy.abs() < 1e-15);
        assert_eq!(monomial_integrals(&tri).area, tri.area);
    }

    #[test]
    fn h11_is_four_d11_area() {
        let tri = triangle_local_frame([[0.0, 0.0], [2.0, 0.3], [0.4, 1.5]]).unwrap();
        let d = d_iso();
        let h = h_matrix(&d, &tri).unwrap();
        assert_relative_eq!(h[(0, 0)], 4.0 * d.d11 * tri.area, max_relative = 1e-14);
        // No D16/D26 → α1α2 coupling vanishes.
        assert_eq!(h[(0, 1)], 0.0);
    }

    #[test]
    fn b_constant_moment_entries() {
        let tri = triangle_local_frame([[0.0, 0.0], [2.0, 0.3], [0.4, 1.5]]).unwrap();
        let d = BendingRigidity { d11: 5.0, d12: 1.0, d16: 0.3, d22: 2.0, d26: -0.2, d66: 1.1 };
        let m = moment_operator(&d.matrix(), tri.x[1], tri.y[1]);
        assert_eq!([m[(0, 0)], m[(0, 1)], m[(0, 2)]], [-10.0, -0.6, -2.0]);
        let zero = BendingRigidity { d11: 0.0, d12: 0.0, d16: 0.0, d22: 0.0, d26: 0.0, d66: 0.0 };
        assert_eq!(b_matrix(&zero, &tri), Mat7x12::zeros());
    }

    #[test]
    fn t_matrix_selector_and_edge_rows() {
        let tri = triangle_local_frame([[0.0, 0.0], [2.0, 0.3], [0.4, 1.5]]).unwrap();
        let t = t_matrix(&tri);
        assert_eq!(t[(0, 0)], 1.0);
        assert!((1..9).all(|j| t[(0, j)] == 0.0));
        let l = tri.len[0];
        assert_relative_eq!(t[(3, 0)], l / 2.0);
        assert_relative_eq!(t[(3, 1)], -l * l / 12.0 * tri.gamma[0].sin());
    }

    #[test]
    fn constant_curvature_energy() {
        let tri = triangle_local_frame([[0.0, 0.0], [2.0, 0.3], [0.4, 1.5]]).unwrap();
        let d = BendingRigidity { d11: 5.0, d12: 1.0, d16: 0.3, d22: 2.0, d26: -0.2, d66: 1.1 };
        let pm = k_plate(&d, &tri).unwrap();
        // w = x²/2 in global coordinates.
        let mut wv = nalgebra::SVector::<f64, 9>::zeros();
        for i in 0..3 {
            let gx = tri.x[i] + tri.centroid[0];
            wv[3 * i] = 0.5 * gx * gx;
            wv[3 * i + 1] = gx;
        }
        let e = 0.5 * wv.dot(&(pm.k * wv));
        assert_relative_eq!(e, 0.5 * d.d11 * tri.area, max_relative = 1e-10);
    }
}
