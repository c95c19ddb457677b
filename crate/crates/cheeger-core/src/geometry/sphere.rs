//! `S² × S²` with the product of round unit metrics, acted on diagonally by
//! the rotation group.
//!
//! Conventions: `so(3) ≅ ℝ³` under the hat isomorphism with `Q` the Euclidean
//! dot product, action fields `X*(p) = (X × p₁, X × p₂)`, and the connection
//! given by tangential projection of the flat derivative. The orbit form is
//! `g(X*, Y*) = Xᵀ G_p Y` with `G_p = 2I − p₁p₁ᵀ − p₂p₂ᵀ`, whose kernel is
//! exactly the isotropy algebra.

use nalgebra::{DMatrix, DVector, Vector3};

use crate::algebra::LieAlgebra;
use crate::error::{CheegerError, Result};
use crate::geometry::{GeometryBackend, Point, PointFrame};

/// Sign of the calibrated two-form, `dw_Z(V, W) = sign · Z·(v₁×w₁ + v₂×w₂)`.
///
/// Equal to `g(∇_V Z*, W)`; the factor is pinned by agreement of the deformed
/// curvature with the finite-difference coordinate oracle.
pub const DW_SPHERE_SIGN: f64 = 1.0;

/// Points within this distance of the (anti)diagonal are snapped onto it so
/// the isotropy kernel is exact.
pub const DIAGONAL_SNAP_TOL: f64 = 1e-8;

/// A point of `S² × S²`, stored as two unit vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    p1: Vector3<f64>,
    p2: Vector3<f64>,
    diagonal: bool,
    antidiagonal: bool,
}

impl SpherePoint {
    /// Validates unit norms (tolerance `1e-8`, then renormalizes exactly) and
    /// flags points on, or within `1e-8` of, the diagonal or antidiagonal.
    pub fn new(p1: [f64; 3], p2: [f64; 3]) -> Result<Self> {
        let mut p1 = Vector3::from(p1);
        let mut p2 = Vector3::from(p2);
        for p in [&p1, &p2] {
            if (p.norm() - 1.0).abs() > 1e-8 {
                return Err(CheegerError::InvalidPoint(format!(
                    "sphere coordinates must be unit vectors (|p| = {})",
                    p.norm()
                )));
            }
        }
        p1.normalize_mut();
        p2.normalize_mut();
        let diagonal = (p1 - p2).norm() <= DIAGONAL_SNAP_TOL;
        let antidiagonal = (p1 + p2).norm() <= DIAGONAL_SNAP_TOL;
        if diagonal {
            p2 = p1;
        } else if antidiagonal {
            p2 = -p1;
        }
        Ok(Self { p1, p2, diagonal, antidiagonal })
    }

    pub fn p1(&self) -> Vector3<f64> {
        self.p1
    }

    pub fn p2(&self) -> Vector3<f64> {
        self.p2
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    pub fn is_antidiagonal(&self) -> bool {
        self.antidiagonal
    }

    pub fn coords(&self) -> [f64; 6] {
        [self.p1.x, self.p1.y, self.p1.z, self.p2.x, self.p2.y, self.p2.z]
    }

    /// Deterministic orthonormal tangent frame of one factor.
    fn factor_frame(p: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
        let mut best = 0;
        for i in 1..3 {
            if p[i].abs() < p[best].abs() {
                best = i;
            }
        }
        let mut axis = Vector3::zeros();
        axis[best] = 1.0;
        let f1 = p.cross(&axis).normalize();
        let f2 = p.cross(&f1);
        (f1, f2)
    }
}

/// Diagonal rotation action on the product of two round unit spheres.
#[derive(Debug, Clone)]
pub struct SphereBackend {
    acting: LieAlgebra,
}

impl SphereBackend {
    pub fn new() -> Self {
        Self { acting: LieAlgebra::builtin("so3").expect("builtin so3") }
    }

    fn point<'a>(&self, p: &'a Point) -> Result<&'a SpherePoint> {
        match p {
            Point::Sphere(sp) => Ok(sp),
            _ => Err(CheegerError::InvalidPoint("sphere backend expects Point::Sphere".into())),
        }
    }

    fn split(v: &DVector<f64>) -> (Vector3<f64>, Vector3<f64>) {
        (Vector3::new(v[0], v[1], v[2]), Vector3::new(v[3], v[4], v[5]))
    }

    fn join(a: Vector3<f64>, b: Vector3<f64>) -> DVector<f64> {
        DVector::from_vec(vec![a.x, a.y, a.z, b.x, b.y, b.z])
    }

    /// Orbit form `G_p = 2I − p₁p₁ᵀ − p₂p₂ᵀ` on `ℝ³`.
    pub fn orbit_form(sp: &SpherePoint) -> DMatrix<f64> {
        let mut g = DMatrix::identity(3, 3) * 2.0;
        for p in [sp.p1(), sp.p2()] {
            for i in 0..3 {
                for j in 0..3 {
                    g[(i, j)] -= p[i] * p[j];
                }
            }
        }
        g
    }

    /// Project an ambient `ℝ³ × ℝ³` vector onto the tangent space at `p`.
    pub fn project_tangent(sp: &SpherePoint, v: &DVector<f64>) -> DVector<f64> {
        let (v1, v2) = Self::split(v);
        let u1 = v1 - sp.p1() * sp.p1().dot(&v1);
        let u2 = v2 - sp.p2() * sp.p2().dot(&v2);
        Self::join(u1, u2)
    }

    /// `g_t` via the submersion definition: the horizontal lift of `u` into
    /// `M × G` with the `g + (1/t)Q` metric has G-component
    /// `z_u = -t(I + tG_q)⁻¹ w_u`, `w_u = q₁×u₁ + q₂×u₂`.
    fn metric_t_at(
        q1: &Vector3<f64>,
        q2: &Vector3<f64>,
        u: &DVector<f64>,
        v: &DVector<f64>,
        t: f64,
    ) -> Result<f64> {
        let (u1, u2) = Self::split(u);
        let (v1, v2) = Self::split(v);
        let wu = q1.cross(&u1) + q2.cross(&u2);
        let wv = q1.cross(&v1) + q2.cross(&v2);
        let mut gq = DMatrix::identity(3, 3) * 2.0;
        for p in [q1, q2] {
            for i in 0..3 {
                for j in 0..3 {
                    gq[(i, j)] -= p[i] * p[j];
                }
            }
        }
        let sys = DMatrix::identity(3, 3) + &gq * t;
        let chol = sys.cholesky().ok_or(CheegerError::OutsideValidity {
            t,
            t_min: -1.0 / gq.symmetric_eigen().eigenvalues.max(),
        })?;
        let mu = chol.solve(&DVector::from_vec(vec![wu.x, wu.y, wu.z]));
        let mv = chol.solve(&DVector::from_vec(vec![wv.x, wv.y, wv.z]));
        let zu = Vector3::new(mu[0], mu[1], mu[2]) * (-t);
        let zv = Vector3::new(mv[0], mv[1], mv[2]) * (-t);
        let lift_u = Self::join(u1 + zu.cross(q1), u2 + zu.cross(q2));
        let lift_v = Self::join(v1 + zv.cross(q1), v2 + zv.cross(q2));
        // (1/t)·Q(zu, zv) with zu = -t(...)⁻¹wu stays finite as t → 0
        Ok(lift_u.dot(&lift_v) + t * mu.dot(&mv))
    }

    fn exp_chart(p: &Vector3<f64>, e1: &Vector3<f64>, e2: &Vector3<f64>, x: &[f64]) -> Vector3<f64> {
        let v = e1 * x[0] + e2 * x[1];
        let r = v.norm();
        if r < 1e-14 {
            return *p;
        }
        p * r.cos() + v * (r.sin() / r)
    }

    fn exp_chart_diff(
        p: &Vector3<f64>,
        e1: &Vector3<f64>,
        e2: &Vector3<f64>,
        x: &[f64],
        axis: usize,
    ) -> Vector3<f64> {
        let v = e1 * x[0] + e2 * x[1];
        let ea = if axis == 0 { *e1 } else { *e2 };
        let r = v.norm();
        if r < 1e-7 {
            // series: q = p(1 - r²/2) + v(1 - r²/6)
            let dr2 = 2.0 * v.dot(&ea);
            return p * (-0.5 * dr2) + ea - (v * dr2 + ea * (v.dot(&v))) / 6.0;
        }
        let dr = v.dot(&ea) / r;
        p * (-r.sin() * dr) + v * ((r.cos() * r - r.sin()) / (r * r) * dr) + ea * (r.sin() / r)
    }
}

impl Default for SphereBackend {
    fn default() -> Self {
        Self::new()
    }
}

impl GeometryBackend for SphereBackend {
    fn algebra(&self) -> &LieAlgebra {
        &self.acting
    }

    fn embedding_dim(&self) -> usize {
        6
    }

    fn validate_point(&self, p: &Point) -> Result<()> {
        self.point(p).map(|_| ())
    }

    fn metric0(&self, _p: &Point, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        u.dot(v)
    }

    fn curvature0(&self, _p: &Point, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
        let (v1, v2) = Self::split(v);
        let (w1, w2) = Self::split(w);
        let gram = |a: &Vector3<f64>, b: &Vector3<f64>| a.dot(a) * b.dot(b) - a.dot(b).powi(2);
        gram(&v1, &w1) + gram(&v2, &w2)
    }

    fn action_field(&self, p: &Point, x: &DVector<f64>) -> DVector<f64> {
        let sp = self.point(p).expect("validated point");
        let xv = Vector3::new(x[0], x[1], x[2]);
        Self::join(xv.cross(&sp.p1()), xv.cross(&sp.p2()))
    }

    fn dw_functional(&self, _p: &Point, v: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        let (v1, v2) = Self::split(v);
        let (w1, w2) = Self::split(w);
        let d = (v1.cross(&w1) + v2.cross(&w2)) * DW_SPHERE_SIGN;
        DVector::from_vec(vec![d.x, d.y, d.z])
    }

    fn action_connection(&self, p: &Point, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        // ∇_{X*}Y* = tangential((Y × (X × p₁), Y × (X × p₂)))
        let sp = self.point(p).expect("validated point");
        let xv = Vector3::new(x[0], x[1], x[2]);
        let yv = Vector3::new(y[0], y[1], y[2]);
        let d1 = yv.cross(&xv.cross(&sp.p1()));
        let d2 = yv.cross(&xv.cross(&sp.p2()));
        Self::join(d1 - sp.p1() * sp.p1().dot(&d1), d2 - sp.p2() * sp.p2().dot(&d2))
    }

    fn frame(&self, p: &Point) -> Result<PointFrame> {
        let sp = self.point(p)?;
        // action matrix: columns e_i ↦ (e_i × p₁, e_i × p₂)
        let mut action = DMatrix::zeros(6, 3);
        for i in 0..3 {
            let mut e = DVector::zeros(3);
            e[i] = 1.0;
            action.set_column(i, &self.action_field(p, &e));
        }
        let svd = action.clone().svd(false, true);
        let vt = svd.v_t.as_ref().expect("svd v_t");
        let smax = svd.singular_values.max();
        let mut iso_cols = Vec::new();
        let mut m_cols = Vec::new();
        for i in 0..3 {
            let row = vt.row(i).transpose();
            if svd.singular_values[i] <= 1e-10 * smax {
                iso_cols.push(row);
            } else {
                m_cols.push(row);
            }
        }
        let isotropy = if iso_cols.is_empty() {
            DMatrix::zeros(3, 0)
        } else {
            DMatrix::from_columns(&iso_cols)
        };
        let m_basis = DMatrix::from_columns(&m_cols);
        let vertical = &action * &m_basis;
        // horizontal: tangent frame orthogonalized against the vertical space
        let (f11, f12) = SpherePoint::factor_frame(&sp.p1());
        let (f21, f22) = SpherePoint::factor_frame(&sp.p2());
        let tangent_cols = [
            Self::join(f11, Vector3::zeros()),
            Self::join(f12, Vector3::zeros()),
            Self::join(Vector3::zeros(), f21),
            Self::join(Vector3::zeros(), f22),
        ];
        let mut h_cols: Vec<DVector<f64>> = Vec::new();
        let mut accumulated: Vec<DVector<f64>> = vertical
            .column_iter()
            .map(|c| {
                let c = c.clone_owned();
                let n = c.norm();
                c / n
            })
            .collect();
        // re-orthonormalize the vertical images among themselves first
        let mut vert_on: Vec<DVector<f64>> = Vec::new();
        for c in &accumulated {
            let mut v = c.clone();
            for u in &vert_on {
                let t = u.dot(&v);
                v -= u * t;
            }
            let n = v.norm();
            if n > 1e-12 {
                vert_on.push(v / n);
            }
        }
        accumulated = vert_on;
        for c in &tangent_cols {
            let mut v = c.clone();
            for _ in 0..2 {
                for u in &accumulated {
                    let t = u.dot(&v);
                    v -= u * t;
                }
            }
            let n = v.norm();
            if n > 1e-10 {
                let v = v / n;
                accumulated.push(v.clone());
                h_cols.push(v);
            }
        }
        let horizontal = if h_cols.is_empty() {
            DMatrix::zeros(6, 0)
        } else {
            DMatrix::from_columns(&h_cols)
        };
        let gq = Self::orbit_form(sp);
        let p_matrix = m_basis.transpose() * &gq * &m_basis;
        let p_matrix = (&p_matrix + p_matrix.transpose()) * 0.5;
        PointFrame::assemble(
            p.clone(),
            isotropy,
            m_basis,
            vertical,
            horizontal,
            p_matrix,
            DMatrix::identity(6, 6),
        )
    }

    fn chart_dim(&self, _p: &Point) -> usize {
        4
    }

    fn chart_frame(&self, p: &Point) -> DMatrix<f64> {
        let sp = self.point(p).expect("validated point");
        let (f11, f12) = SpherePoint::factor_frame(&sp.p1());
        let (f21, f22) = SpherePoint::factor_frame(&sp.p2());
        DMatrix::from_columns(&[
            Self::join(f11, Vector3::zeros()),
            Self::join(f12, Vector3::zeros()),
            Self::join(Vector3::zeros(), f21),
            Self::join(Vector3::zeros(), f22),
        ])
    }

    fn chart_metric_t(&self, p: &Point, t: f64, x: &[f64]) -> Result<DMatrix<f64>> {
        let sp = self.point(p)?;
        if x.len() != 4 {
            return Err(CheegerError::DimensionMismatch { expected: 4, got: x.len() });
        }
        if x[..2].iter().map(|a| a * a).sum::<f64>().sqrt() > 3.0
            || x[2..].iter().map(|a| a * a).sum::<f64>().sqrt() > 3.0
        {
            return Err(CheegerError::InvalidPoint(
                "chart coordinates too close to the antipodal singularity".into(),
            ));
        }
        let (f11, f12) = SpherePoint::factor_frame(&sp.p1());
        let (f21, f22) = SpherePoint::factor_frame(&sp.p2());
        let q1 = Self::exp_chart(&sp.p1(), &f11, &f12, &x[..2]);
        let q2 = Self::exp_chart(&sp.p2(), &f21, &f22, &x[2..]);
        let mut frame = Vec::with_capacity(4);
        for a in 0..2 {
            frame.push(Self::join(
                Self::exp_chart_diff(&sp.p1(), &f11, &f12, &x[..2], a),
                Vector3::zeros(),
            ));
        }
        for a in 0..2 {
            frame.push(Self::join(
                Vector3::zeros(),
                Self::exp_chart_diff(&sp.p2(), &f21, &f22, &x[2..], a),
            ));
        }
        let mut g = DMatrix::zeros(4, 4);
        for a in 0..4 {
            for b in a..4 {
                let v = Self::metric_t_at(&q1, &q2, &frame[a], &frame[b], t)?;
                g[(a, b)] = v;
                g[(b, a)] = v;
            }
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{oneill_a, point_frame, shape_operator};
    use approx::assert_abs_diff_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn pt(p1: [f64; 3], p2: [f64; 3]) -> Point {
        Point::sphere(p1, p2).unwrap()
    }

    fn generic() -> Point {
        pt([1.0, 0.0, 0.0], [0.0, 0.0, 1.0])
    }

    fn rand_tangent(rng: &mut StdRng, sp: &SpherePoint) -> DVector<f64> {
        let r1 = Vector3::new(
            rng.random::<f64>() - 0.5,
            rng.random::<f64>() - 0.5,
            rng.random::<f64>() - 0.5,
        );
        let r2 = Vector3::new(
            rng.random::<f64>() - 0.5,
            rng.random::<f64>() - 0.5,
            rng.random::<f64>() - 0.5,
        );
        SphereBackend::join(sp.p1().cross(&r1), sp.p2().cross(&r2))
    }

    #[test]
    fn point_validation_and_flags() {
        assert!(SpherePoint::new([1.0, 0.0, 0.0], [2.0, 0.0, 0.0]).is_err());
        let d = SpherePoint::new([0.0, 0.0, 1.0], [1e-9, 0.0, 1.0]).unwrap();
        assert!(d.is_diagonal());
        assert_eq!(d.p1(), d.p2());
        let a = SpherePoint::new([0.0, 0.0, 1.0], [0.0, 1e-9, -1.0]).unwrap();
        assert!(a.is_antidiagonal());
        let g = SpherePoint::new([1.0, 0.0, 0.0], [0.0, 0.0, 1.0]).unwrap();
        assert!(!g.is_diagonal() && !g.is_antidiagonal());
    }

    #[test]
    fn frame_dimensions_generic_and_diagonal() {
        let b = SphereBackend::new();
        let f = point_frame(&b, &generic()).unwrap();
        assert_eq!(f.isotropy.ncols(), 0);
        assert_eq!(f.m_basis.ncols(), 3);
        assert_eq!(f.vertical.ncols(), 3);
        assert_eq!(f.horizontal.ncols(), 1);
        assert_eq!(f.tangent_dim(), 4);

        let f = point_frame(&b, &pt([0.0, 0.0, 1.0], [0.0, 0.0, 1.0])).unwrap();
        assert_eq!(f.isotropy.ncols(), 1);
        assert_eq!(f.m_basis.ncols(), 2);
        assert_eq!(f.horizontal.ncols(), 2);
        // isotropy = rotations about the common axis
        let iso = f.isotropy.column(0);
        assert_abs_diff_eq!(iso[2].abs(), 1.0, epsilon = 1e-12);

        let f = point_frame(&b, &pt([0.0, 0.0, 1.0], [0.0, 0.0, -1.0])).unwrap();
        assert_eq!(f.isotropy.ncols(), 1);
    }

    #[test]
    fn curvature0_values() {
        let b = SphereBackend::new();
        let p = generic();
        // same-factor orthonormal plane on a unit sphere
        let v = DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let w = DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_abs_diff_eq!(b.curvature0(&p, &v, &w), 1.0, epsilon = 1e-15);
        // mixed plane is flat in the product metric
        let w = DVector::from_vec(vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert_abs_diff_eq!(b.curvature0(&p, &v, &w), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn orbit_form_reproduces_action_inner_products() {
        let b = SphereBackend::new();
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..100 {
            let p1 = Vector3::new(
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
            )
            .normalize();
            let p2 = Vector3::new(
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
            )
            .normalize();
            let p = pt([p1.x, p1.y, p1.z], [p2.x, p2.y, p2.z]);
            let sp = match &p {
                Point::Sphere(sp) => sp.clone(),
                _ => unreachable!(),
            };
            let gq = SphereBackend::orbit_form(&sp);
            let x = DVector::from_vec(vec![rng.random::<f64>(), rng.random(), rng.random()]);
            let y = DVector::from_vec(vec![rng.random::<f64>(), rng.random(), rng.random()]);
            let lhs = (x.transpose() * &gq * &y)[0];
            let rhs = b.action_field(&p, &x).dot(&b.action_field(&p, &y));
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
        }
    }

    #[test]
    fn dw_vanishes_on_mixed_pairs() {
        let b = SphereBackend::new();
        let p = generic();
        let v = DVector::from_vec(vec![0.0, 0.3, -0.1, 0.0, 0.0, 0.0]);
        let w = DVector::from_vec(vec![0.0, 0.0, 0.0, 0.2, 0.5, 0.0]);
        let d = b.dw_functional(&p, &v, &w);
        assert!(d.amax() < 1e-15);
    }

    #[test]
    fn dw_antisymmetric_and_z_linear() {
        let b = SphereBackend::new();
        let p = generic();
        let sp = match &p {
            Point::Sphere(sp) => sp.clone(),
            _ => unreachable!(),
        };
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..50 {
            let v = rand_tangent(&mut rng, &sp);
            let w = rand_tangent(&mut rng, &sp);
            let z1 = DVector::from_vec(vec![rng.random::<f64>(), rng.random(), rng.random()]);
            let z2 = DVector::from_vec(vec![rng.random::<f64>(), rng.random(), rng.random()]);
            let a = 1.7;
            assert_abs_diff_eq!(b.dw(&p, &z1, &v, &w), -b.dw(&p, &z1, &w, &v), epsilon = 1e-12);
            assert_abs_diff_eq!(
                b.dw(&p, &(z1.clone() * a + &z2), &v, &w),
                a * b.dw(&p, &z1, &v, &w) + b.dw(&p, &z2, &v, &w),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn shape_operator_matches_finite_difference_flow() {
        // ∇_{X*}Y* against a finite-difference derivative along the action flow
        let b = SphereBackend::new();
        let p = generic();
        let sp = match &p {
            Point::Sphere(sp) => sp.clone(),
            _ => unreachable!(),
        };
        let f = point_frame(&b, &p).unwrap();
        let u = f.horizontal.column(0).clone_owned();
        let x = f.m_basis.column(1).clone_owned();
        let s = shape_operator(&b, &f, &u, &x).unwrap();
        // finite-difference oracle for the connection
        let h = 1e-5;
        let rot = |z: &Vector3<f64>, v: &Vector3<f64>, s: f64| {
            // Rodrigues rotation of v about axis z|z| by angle s|z|
            let th = z.norm() * s;
            if th.abs() < 1e-300 {
                return *v;
            }
            let k = z.normalize();
            v * th.cos() + k.cross(v) * th.sin() + k * (k.dot(v)) * (1.0 - th.cos())
        };
        for j in 0..f.m_basis.ncols() {
            let y = f.m_basis.column(j).clone_owned();
            let xv = Vector3::new(x[0], x[1], x[2]);
            let field = |s: f64| {
                let q1 = rot(&xv, &sp.p1(), s);
                let q2 = rot(&xv, &sp.p2(), s);
                let yv = Vector3::new(y[0], y[1], y[2]);
                SphereBackend::join(yv.cross(&q1), yv.cross(&q2))
            };
            let deriv = (field(h) - field(-h)) / (2.0 * h);
            let nab_fd = SphereBackend::project_tangent(&sp, &deriv);
            let lhs = b.metric0(&p, &s, &b.action_field(&p, &y));
            let rhs = nab_fd.dot(&u);
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-6);
        }
    }

    #[test]
    fn oneill_a_trivial_for_one_dimensional_horizontal_space() {
        let b = SphereBackend::new();
        let p = generic();
        let f = point_frame(&b, &p).unwrap();
        let u = f.horizontal.column(0).clone_owned();
        let a = oneill_a(&b, &f, &u, &(u.clone() * 2.0)).unwrap();
        assert!(a.amax() < 1e-12);
    }

    #[test]
    fn metric_t_matches_ct_route() {
        // submersion-definition g_t agrees with g(C_t u, v) built from the frame
        let b = SphereBackend::new();
        let p = generic();
        let sp = match &p {
            Point::Sphere(sp) => sp.clone(),
            _ => unreachable!(),
        };
        let f = point_frame(&b, &p).unwrap();
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..20 {
            let u = rand_tangent(&mut rng, &sp);
            let v = rand_tangent(&mut rng, &sp);
            let t = rng.random::<f64>() * 3.0;
            let lhs = SphereBackend::metric_t_at(&sp.p1(), &sp.p2(), &u, &v, t).unwrap();
            // C_t u = ((I + tP)^{-1} u_m)* + u^H
            let um = f.m_coords(&u);
            let sys = DMatrix::identity(3, 3) + f.p_matrix.clone() * t;
            let ct_um = sys.cholesky().unwrap().solve(&um);
            let ct_u = &f.vertical * ct_um + f.horizontal_part(&u);
            let rhs = ct_u.dot(&v);
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
        }
    }
}
