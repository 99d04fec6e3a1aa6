//! Structural cohesive element between two shell layers and its bilinear
//! mixed-mode damage law.
//!
//! Element DoF order: [u1, v1, u2, v2, u3, v3]bot, [w, θx, θy ×3]bot, then the
//! same 15 entries for the top shell.

use nalgebra::{Matrix3, SMatrix, SVector};

use crate::error::{Error, Result};
use crate::laminate::OrthotropicPly;
use crate::plate::{r_w, r_x, r_y, Mat7x9, TriangleGeometry};
use crate::quadrature::cowper_13;

pub type Row9 = SMatrix<f64, 1, 9>;
pub type Mat3x30 = SMatrix<f64, 3, 30>;
pub type Mat30 = SMatrix<f64, 30, 30>;
pub type Vec30 = SVector<f64, 30>;

pub const NGAUSS: usize = 13;

/// K = α·E3/t with E3 in GPa; N/mm³.
pub fn penalty_stiffness(e3_gpa: f64, t: f64, alpha: f64) -> f64 {
    alpha * e3_gpa * 1000.0 / t
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CohesiveProperties {
    /// Penalty stiffness, N/mm³.
    pub k: f64,
    /// Toughnesses, N/mm.
    pub gic: f64,
    pub giic: f64,
    /// Strengths, MPa.
    pub tau_ic: f64,
    pub tau_iic: f64,
    pub eta: f64,
}

impl CohesiveProperties {
    pub fn new(k: f64, gic: f64, giic: f64, tau_ic: f64, tau_iic: f64, eta: f64) -> Result<Self> {
        let p = Self { k, gic, giic, tau_ic, tau_iic, eta };
        if !(k > 0.0 && gic > 0.0 && giic > 0.0 && tau_ic > 0.0 && tau_iic > 0.0 && eta > 0.0) {
            return Err(Error::Cohesive("all properties must be positive".into()));
        }
        for (tau, g) in [(tau_ic, gic), (tau_iic, giic)] {
            if !(tau * tau / (2.0 * k) < g) {
                return Err(Error::Cohesive(format!(
                    "onset opening must precede final opening (tau {tau}, G {g}, K {k})"
                )));
            }
        }
        Ok(p)
    }

    pub fn from_ply(ply: &OrthotropicPly, k: f64) -> Result<Self> {
        Self::new(k, ply.gic, ply.giic, ply.tau_ic, ply.tau_iic, ply.eta)
    }

    /// Mixed-mode toughness for shear ratio `b`.
    pub fn gc(&self, b: f64) -> f64 {
        self.gic + (self.giic - self.gic) * b.powf(self.eta)
    }

    /// Onset and final effective openings for shear ratio `b`.
    pub fn openings(&self, b: f64) -> (f64, f64) {
        let i0 = self.tau_ic / self.k;
        let s0 = self.tau_iic / self.k;
        let i_f = 2.0 * self.gic / (self.k * i0);
        let s_f = 2.0 * self.giic / (self.k * s0);
        let bn = b.powf(self.eta);
        let d0 = (i0 * i0 + (s0 * s0 - i0 * i0) * bn).sqrt();
        let df = (i0 * i_f + (s0 * s_f - i0 * i_f) * bn) / d0;
        (d0, df)
    }
}

/// History of one integration point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CohesiveState {
    /// Largest effective opening reached.
    pub lambda_max: f64,
    pub d: f64,
    /// Shear ratio at the last damage growth; `None` while undamaged.
    pub mode_mix: Option<f64>,
    /// Energy per unit area dissipated so far.
    pub dissipated: f64,
}

fn effective_opening(delta: &[f64; 3]) -> (f64, f64) {
    let n = delta[0].max(0.0);
    let sh2 = delta[1] * delta[1] + delta[2] * delta[2];
    let l2 = n * n + sh2;
    let b = if l2 > 0.0 { sh2 / l2 } else { 0.0 };
    (l2.sqrt(), b)
}

/// Advances a committed state to the opening `delta`; returns the trial state
/// with d and d_I.
///
/// The mode mix follows the current openings and d never decreases. Growth
/// from d to d' at mix B dissipates ½K·δ0·δf/(δf − δ0)·(λ(d') − λ(d)), where
/// λ(d) inverts the bilinear law at B; on a fixed-mix path this sums to
/// Gc(B) exactly.
pub fn damage_update(
    delta: &[f64; 3],
    state: &CohesiveState,
    props: &CohesiveProperties,
) -> (CohesiveState, f64, f64) {
    let (lambda, b) = effective_opening(delta);
    let mut next = *state;
    next.lambda_max = state.lambda_max.max(lambda);
    let (d0, df) = props.openings(b);
    if lambda > d0 {
        let d = (df * (lambda - d0) / (lambda * (df - d0))).clamp(0.0, 1.0);
        if d > state.d {
            let opening_at = |d: f64| d0 * df / (df - d * (df - d0));
            next.dissipated += 0.5 * props.k * d0 * df / (df - d0) * (opening_at(d) - opening_at(state.d));
            next.d = d;
            next.mode_mix = Some(b);
        }
    }
    let d_i = if delta[0] >= 0.0 { next.d } else { 0.0 };
    (next, next.d, d_i)
}

/// Diagonal of D_CE.
pub fn d_ce_matrix(d: f64, d_i: f64, k: f64) -> Matrix3<f64> {
    Matrix3::from_diagonal(&nalgebra::Vector3::new((1.0 - d_i) * k, (1.0 - d) * k, (1.0 - d) * k))
}

/// Shape functions of w, θx and θy over one plate element.
#[derive(Debug, Clone, PartialEq)]
pub struct PlateShape {
    /// M_A⁻¹(B_A − M_α C): the rigid coefficients (A1, A2, A3) per nodal DoF.
    p: SMatrix<f64, 3, 9>,
    c: Mat7x9,
}

impl PlateShape {
    pub fn new(tri: &TriangleGeometry, c: &Mat7x9) -> Result<Self> {
        let mut ma = Matrix3::zeros();
        let mut malpha = SMatrix::<f64, 3, 7>::zeros();
        let mut ba = SMatrix::<f64, 3, 9>::zeros();
        for i in 0..3 {
            let (x, y) = (tri.x[i], tri.y[i]);
            ma[(i, 0)] = 1.0;
            ma[(i, 1)] = x;
            ma[(i, 2)] = y;
            malpha.set_row(i, &r_w(x, y).transpose());
            ba[(i, 3 * i)] = 1.0;
        }
        let inv = ma
            .try_inverse()
            .ok_or_else(|| Error::Degenerate("collinear nodes in shape functions".into()))?;
        Ok(Self { p: inv * (ba - malpha * c), c: *c })
    }

    pub fn w(&self, x: f64, y: f64) -> Row9 {
        self.p.row(0) + self.p.row(1) * x + self.p.row(2) * y + r_w(x, y).transpose() * self.c
    }

    pub fn theta_x(&self, x: f64, y: f64) -> Row9 {
        self.p.row(1) + r_x(x, y).transpose() * self.c
    }

    pub fn theta_y(&self, x: f64, y: f64) -> Row9 {
        self.p.row(2) + r_y(x, y).transpose() * self.c
    }
}

/// Opening operator at area coordinates `l`: Δ = B_CE·q.
pub fn b_ce(
    tri: &TriangleGeometry,
    bot: &PlateShape,
    top: &PlateShape,
    h_bot: f64,
    h_top: f64,
    l: [f64; 3],
) -> Result<Mat3x30> {
    let (x, y) = tri.point(l);
    if l.iter().any(|li| *li < -1e-12) {
        return Err(Error::OutsideTriangle(x + tri.centroid[0], y + tri.centroid[1]));
    }
    let mut b = Mat3x30::zeros();
    for i in 0..3 {
        b[(1, 2 * i)] = -l[i];
        b[(2, 2 * i + 1)] = -l[i];
        b[(1, 15 + 2 * i)] = l[i];
        b[(2, 15 + 2 * i + 1)] = l[i];
    }
    b.fixed_view_mut::<1, 9>(0, 6).copy_from(&(-bot.w(x, y)));
    b.fixed_view_mut::<1, 9>(0, 21).copy_from(&top.w(x, y));
    b.fixed_view_mut::<1, 9>(1, 6).copy_from(&(bot.theta_x(x, y) * (0.5 * h_bot)));
    b.fixed_view_mut::<1, 9>(1, 21).copy_from(&(top.theta_x(x, y) * (0.5 * h_top)));
    b.fixed_view_mut::<1, 9>(2, 6).copy_from(&(bot.theta_y(x, y) * (0.5 * h_bot)));
    b.fixed_view_mut::<1, 9>(2, 21).copy_from(&(top.theta_y(x, y) * (0.5 * h_top)));
    Ok(b)
}

pub fn opening_vector(b: &Mat3x30, q: &Vec30) -> [f64; 3] {
    let d = b * q;
    [d[0], d[1], d[2]]
}

/// Penetration tolerated at an open contact point, as a fraction of the mode
/// I onset opening. Where the arms of a closed pre-crack bend alike the
/// normal gap is zero up to round-off over long stretches, and a sharp
/// switch lets the active set cycle without end.
pub const CONTACT_BAND: f64 = 0.01;

/// The centroid of the 13-point rule carries a negative weight, so a pattern
/// with the centroid stiffer than its neighbours (closed contact amid open
/// points, an intact centroid amid damaged ones) makes Σ w·D·bbᵀ indefinite.
/// Capping the centroid at the smallest stiffness of the other points keeps
/// the sum positive semidefinite: it splits into Σ w_g (D_g − D_0) b bᵀ over
/// positive weights plus D_0 times the exactly integrated ∫ b bᵀ.
fn clamp_negative_weight_point(diag: &mut PointStiffness) {
    for i in 0..3 {
        let floor = diag[1..].iter().map(|p| p[i]).fold(f64::INFINITY, f64::min);
        diag[0][i] = diag[0][i].min(floor);
    }
}

/// A cohesive element with its opening operators precomputed at the 13
/// integration points.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralCe {
    pub tri: TriangleGeometry,
    pub h_bot: f64,
    pub h_top: f64,
    pub props: CohesiveProperties,
    /// Pre-crack contact: permanently fully damaged, resists closure only.
    pub contact: bool,
    b: Vec<Mat3x30>,
    /// Quadrature weight times area.
    wa: [f64; NGAUSS],
}

/// Per-point secant stiffness diagonal.
pub type PointStiffness = [[f64; 3]; NGAUSS];

impl StructuralCe {
    pub fn new(
        tri: TriangleGeometry,
        bot: &PlateShape,
        top: &PlateShape,
        h_bot: f64,
        h_top: f64,
        props: CohesiveProperties,
        contact: bool,
    ) -> Result<Self> {
        let rule = cowper_13();
        let b = rule
            .iter()
            .map(|g| b_ce(&tri, bot, top, h_bot, h_top, g.l))
            .collect::<Result<Vec<_>>>()?;
        let wa = std::array::from_fn(|i| rule[i].w * tri.area);
        Ok(Self { tri, h_bot, h_top, props, contact, b, wa })
    }

    pub fn b_at(&self, g: usize) -> &Mat3x30 {
        &self.b[g]
    }

    pub fn weight(&self, g: usize) -> f64 {
        self.wa[g]
    }

    pub fn openings(&self, q: &Vec30) -> [[f64; 3]; NGAUSS] {
        std::array::from_fn(|g| opening_vector(&self.b[g], q))
    }

    pub fn initial_states(&self) -> Vec<CohesiveState> {
        let s = if self.contact {
            CohesiveState { d: 1.0, ..Default::default() }
        } else {
            CohesiveState::default()
        };
        vec![s; NGAUSS]
    }

    /// Trial states and secant stiffness diagonals for the current opening.
    pub fn trial(&self, q: &Vec30, committed: &[CohesiveState]) -> (Vec<CohesiveState>, PointStiffness) {
        self.trial_from(q, committed, None)
    }

    /// As [`Self::trial`], except that a contact point recorded open in
    /// `previous` closes only once it penetrates deeper than
    /// `CONTACT_BAND`·τ_I/K. Opening is never delayed, so contact carries no
    /// tension.
    pub fn trial_from(
        &self,
        q: &Vec30,
        committed: &[CohesiveState],
        previous: Option<&PointStiffness>,
    ) -> (Vec<CohesiveState>, PointStiffness) {
        let k = self.props.k;
        let band = CONTACT_BAND * self.props.tau_ic / k;
        let mut states = Vec::with_capacity(NGAUSS);
        let mut diag = [[0.0; 3]; NGAUSS];
        for (g, delta) in self.openings(q).iter().enumerate() {
            if self.contact {
                states.push(committed[g]);
                let was_open = previous.is_some_and(|p| p[g][0] == 0.0);
                let closed = delta[0] < if was_open { -band } else { 0.0 };
                diag[g] = [if closed { k } else { 0.0 }, 0.0, 0.0];
            } else {
                let (s, d, d_i) = damage_update(delta, &committed[g], &self.props);
                states.push(s);
                diag[g] = [(1.0 - d_i) * k, (1.0 - d) * k, (1.0 - d) * k];
            }
        }
        if self.contact {
            // Contact has no history, so the capped centroid can stand in
            // the law itself and keep it consistent with the iteration matrix.
            clamp_negative_weight_point(&mut diag);
        }
        (states, diag)
    }

    pub fn stiffness(&self, diag: &PointStiffness) -> Mat30 {
        let mut k = Mat30::zeros();
        for g in 0..NGAUSS {
            for i in 0..3 {
                let c = self.wa[g] * diag[g][i];
                if c != 0.0 {
                    let row = self.b[g].row(i).transpose();
                    k.ger(c, &row, &row, 1.0);
                }
            }
        }
        k
    }

    /// Positive semidefinite stand-in for [`Self::stiffness`], used as the
    /// iteration matrix.
    pub fn iteration_stiffness(&self, diag: &PointStiffness) -> Mat30 {
        let mut d = *diag;
        clamp_negative_weight_point(&mut d);
        self.stiffness(&d)
    }

    /// Stiffness with every point intact.
    pub fn undamaged_stiffness(&self) -> Mat30 {
        let k = self.props.k;
        self.stiffness(&[[k; 3]; NGAUSS])
    }

    /// Secant stiffness, internal force and trial states.
    pub fn k_ce_and_f_int(&self, q: &Vec30, committed: &[CohesiveState]) -> (Mat30, Vec30, Vec<CohesiveState>) {
        let (states, diag) = self.trial(q, committed);
        let k = self.stiffness(&diag);
        let f = k * q;
        (k, f, states)
    }

    /// Internal force Σ w·A·Bᵀ(D∘Δ) for given point stiffnesses.
    pub fn internal_force(&self, q: &Vec30, diag: &PointStiffness) -> Vec30 {
        let mut f = Vec30::zeros();
        for g in 0..NGAUSS {
            let d = self.b[g] * q;
            let t = nalgebra::Vector3::new(diag[g][0] * d[0], diag[g][1] * d[1], diag[g][2] * d[2]);
            f.gemv_tr(self.wa[g], &self.b[g], &t, 1.0);
        }
        f
    }

    /// Recoverable energy stored at the given openings and stiffnesses.
    pub fn elastic_energy(&self, q: &Vec30, diag: &PointStiffness) -> f64 {
        self.openings(q)
            .iter()
            .zip(diag)
            .zip(&self.wa)
            .map(|((d, k), w)| 0.5 * w * (k[0] * d[0] * d[0] + k[1] * d[1] * d[1] + k[2] * d[2] * d[2]))
            .sum()
    }

    pub fn dissipation(&self, states: &[CohesiveState]) -> f64 {
        if self.contact {
            return 0.0;
        }
        states.iter().zip(&self.wa).map(|(s, w)| w * s.dissipated).sum()
    }
}
