//! Compact Lie group `G` with a left-invariant metric `⟨x,y⟩ = Q(Φx,y)`,
//! acted on by a closed subgroup `K` by right translations.
//!
//! Everything happens in the left-invariant trivialization `T_pG ≅ g`: frames
//! are constant, points are irrelevant, and the action fields of `k` are the
//! constant vectors of `k` itself. The curvature of `g_Φ` is evaluated with
//! the Koszul formula `∇_x y = ½([x,y] − ad*_x y − ad*_y x)`.
//!
//! The construction submerses `g_Φ + (1/t)Q` only when `K` acts by
//! isometries, i.e. when `Φ` commutes with `ad(k)`; the defect is recorded in
//! [`GroupBackend::invariance_residual`] and left to the caller to police.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{LieAlgebra, MetricOperator, Subspace};
use crate::error::{CheegerError, Result};
use crate::geometry::{GeometryBackend, Point, PointFrame};

/// Coefficient of the trivialization formula `dw_Z(V,W) = c·Q(ΦZ, [v,w])`.
///
/// The exterior-derivative and action-field sign conventions are calibrated
/// once by requiring the deformed curvature to match the independent Koszul
/// oracle; a test asserts the calibration.
pub const DW_GROUP_COEF: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct GroupBackend {
    /// Full algebra `g` with `gram = I`.
    full: LieAlgebra,
    /// Acting subalgebra `k` as its own Lie algebra (basis = columns of `k_basis`).
    acting: LieAlgebra,
    /// Embedding of the acting basis into `g` (Q-orthonormal columns).
    k_basis: DMatrix<f64>,
    phi: DMatrix<f64>,
    /// `g_Φ`-orthonormal basis of the horizontal space `Φ⁻¹(k^⊥)`.
    h_basis: DMatrix<f64>,
    /// `P = Π_k Φ|_k` in `k_basis` coordinates.
    p_on_k: DMatrix<f64>,
    /// Cached adjoints `ad*_{e_i} = Φ⁻¹ ad_i^T Φ`.
    adstar: Vec<DMatrix<f64>>,
    /// Change of basis from the caller's original algebra basis, if any.
    input_transform: DMatrix<f64>,
    invariance_residual: f64,
}

impl GroupBackend {
    /// Build the backend from an algebra, a spanning set of the acting
    /// subalgebra and a metric operator, all in the algebra's own basis.
    ///
    /// Internally everything is re-expressed in a Q-orthonormal basis; when
    /// the input gram is not the identity, map vectors with
    /// [`input_transform`](Self::input_transform).
    pub fn new(alg: &LieAlgebra, k_span: &DMatrix<f64>, metric: &MetricOperator) -> Result<Self> {
        if !metric.is_positive() {
            return Err(CheegerError::NotPositiveDefinite { context: "metric operator".into() });
        }
        if alg.bi_invariance_residual() > 1e-10 {
            return Err(CheegerError::InvalidAlgebra(format!(
                "gram is not bi-invariant (residual {:.3e})",
                alg.bi_invariance_residual()
            )));
        }
        let (full, t) = alg.to_orthonormal()?;
        let t_inv = t.clone().try_inverse().expect("basis change invertible");
        let k_span_on = &t_inv * k_span;
        let phi = &t_inv * metric.phi() * &t;
        let phi = (&phi + phi.transpose()) * 0.5;

        let n = full.dim();
        let k_sub = Subspace::span(&full, &k_span_on)?;
        let m = k_sub.dim();
        let k_basis = k_sub.basis().clone();
        // bracket closure of k
        for i in 0..m {
            for j in (i + 1)..m {
                let b = full.bracket(
                    &k_basis.column(i).clone_owned(),
                    &k_basis.column(j).clone_owned(),
                )?;
                if !k_sub.contains(&full, &b, 1e-10) {
                    return Err(CheegerError::InvalidChain(
                        "acting subspace is not a subalgebra".into(),
                    ));
                }
            }
        }
        // acting algebra structure constants in the k_basis
        let mut entries = Vec::new();
        for a in 0..m {
            for b in (a + 1)..m {
                let br = full.bracket(
                    &k_basis.column(a).clone_owned(),
                    &k_basis.column(b).clone_owned(),
                )?;
                for c in 0..m {
                    let v = br.dot(&k_basis.column(c).clone_owned());
                    if v.abs() > 1e-14 {
                        entries.push((a, b, c, v));
                    }
                }
            }
        }
        let acting = LieAlgebra::new(m, &entries, DMatrix::identity(m, m))?;

        // horizontal space = kernel of (Φ k_basis)^T: the Euclidean complement
        // of span(Φ k_basis), then g_Φ-orthonormalized
        let phi_k = &phi * &k_basis;
        let mut span: Vec<DVector<f64>> = Vec::new();
        for c in phi_k.column_iter() {
            let mut v = c.clone_owned();
            for u in &span {
                let t = u.dot(&v);
                v -= u * t;
            }
            let nn = v.norm();
            if nn > 1e-12 {
                span.push(v / nn);
            }
        }
        let mut h_cols: Vec<DVector<f64>> = Vec::new();
        for i in 0..n {
            let mut v = DVector::zeros(n);
            v[i] = 1.0;
            for _ in 0..2 {
                for u in span.iter().chain(h_cols.iter()) {
                    let t = u.dot(&v);
                    v -= u * t;
                }
            }
            let nn = v.norm();
            if nn > 1e-9 {
                h_cols.push(v / nn);
            }
        }
        debug_assert_eq!(h_cols.len(), n - m);
        let g_inner = |x: &DVector<f64>, y: &DVector<f64>| (x.transpose() * &phi * y)[0];
        let mut h_on: Vec<DVector<f64>> = Vec::new();
        for c in &h_cols {
            let mut v = c.clone();
            for _ in 0..2 {
                for u in &h_on {
                    let t = g_inner(u, &v);
                    v -= u * t;
                }
            }
            let nn = g_inner(&v, &v).max(0.0).sqrt();
            if nn > 1e-12 {
                h_on.push(v / nn);
            }
        }
        let h_basis = if h_on.is_empty() {
            DMatrix::zeros(n, 0)
        } else {
            DMatrix::from_columns(&h_on)
        };

        let p_on_k = k_basis.transpose() * &phi * &k_basis;
        let p_on_k = (&p_on_k + p_on_k.transpose()) * 0.5;

        let phi_inv = phi
            .clone()
            .try_inverse()
            .ok_or(CheegerError::NotPositiveDefinite { context: "metric operator".into() })?;
        let adstar: Vec<DMatrix<f64>> =
            (0..n).map(|i| &phi_inv * full.ad_basis(i).transpose() * &phi).collect();

        let mut invariance_residual: f64 = 0.0;
        for a in 0..m {
            let ad = full.ad(&k_basis.column(a).clone_owned());
            invariance_residual = invariance_residual.max((&ad * &phi - &phi * &ad).amax());
        }

        Ok(Self {
            full,
            acting,
            k_basis,
            phi,
            h_basis,
            p_on_k,
            adstar,
            input_transform: t,
            invariance_residual,
        })
    }

    /// Convenience constructor with `K = G` and `Φ = Id` semantics preserved.
    pub fn full_group(alg: &LieAlgebra, metric: &MetricOperator) -> Result<Self> {
        let n = alg.dim();
        Self::new(alg, &DMatrix::identity(n, n), metric)
    }

    pub fn phi(&self) -> &DMatrix<f64> {
        &self.phi
    }

    pub fn subalgebra_basis(&self) -> &DMatrix<f64> {
        &self.k_basis
    }

    pub fn horizontal_basis(&self) -> &DMatrix<f64> {
        &self.h_basis
    }

    pub fn full_algebra(&self) -> &LieAlgebra {
        &self.full
    }

    /// Map vectors from the caller's original basis into backend coordinates.
    pub fn input_transform(&self) -> &DMatrix<f64> {
        &self.input_transform
    }

    /// `max_X∈k ‖[ad_X, Φ]‖`: zero exactly when the right `K`-action is isometric.
    pub fn invariance_residual(&self) -> f64 {
        self.invariance_residual
    }

    /// Koszul connection on left-invariant fields.
    pub fn gamma(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let n = self.full.dim();
        let mut out = self.full.bracket(x, y).expect("dim checked");
        for i in 0..n {
            if x[i] != 0.0 {
                out.axpy(-x[i], &(&self.adstar[i] * y), 1.0);
            }
            if y[i] != 0.0 {
                out.axpy(-y[i], &(&self.adstar[i] * x), 1.0);
            }
        }
        out * 0.5
    }

    /// Metric tensor `C_t` as a matrix on `g` (identity on the horizontal
    /// space, `(I + tP)⁻¹` on the vertical one).
    pub fn ct_matrix(&self, t: f64) -> Result<DMatrix<f64>> {
        let n = self.full.dim();
        let m = self.k_basis.ncols();
        let mix = {
            let mut mx = DMatrix::zeros(n, n);
            mx.view_mut((0, 0), (n, m)).copy_from(&self.k_basis);
            mx.view_mut((0, m), (n, n - m)).copy_from(&self.h_basis);
            mx
        };
        let mix_lu = mix.clone().lu();
        let ipt = DMatrix::identity(m, m) + &self.p_on_k * t;
        let ipt_chol = ipt
            .cholesky()
            .ok_or(CheegerError::OutsideValidity { t, t_min: -1.0 / self.p_on_k.clone().symmetric_eigen().eigenvalues.max() })?;
        let mut cols = Vec::with_capacity(n);
        for i in 0..n {
            let e = DVector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 });
            let coords = mix_lu.solve(&e).expect("frame invertible");
            let a = coords.rows(0, m).clone_owned();
            let b = coords.rows(m, n - m).clone_owned();
            cols.push(&self.k_basis * ipt_chol.solve(&a) + &self.h_basis * b);
        }
        Ok(DMatrix::from_columns(&cols))
    }

    /// Trivialized operator of the deformed metric, `Φ_t = Φ C_t`.
    pub fn phi_t(&self, t: f64) -> Result<DMatrix<f64>> {
        let m = &self.phi * self.ct_matrix(t)?;
        Ok((&m + m.transpose()) * 0.5)
    }
}

impl GeometryBackend for GroupBackend {
    fn algebra(&self) -> &LieAlgebra {
        &self.acting
    }

    fn embedding_dim(&self) -> usize {
        self.full.dim()
    }

    fn validate_point(&self, p: &Point) -> Result<()> {
        match p {
            Point::Group => Ok(()),
            _ => Err(CheegerError::InvalidPoint("group backend expects Point::Group".into())),
        }
    }

    fn metric0(&self, _p: &Point, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        (u.transpose() * &self.phi * v)[0]
    }

    fn curvature0(&self, _p: &Point, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
        let vw = self.full.bracket(v, w).expect("dim checked");
        let r = self.gamma(v, &self.gamma(w, w)) - self.gamma(w, &self.gamma(v, w))
            - self.gamma(&vw, w);
        (r.transpose() * &self.phi * v)[0]
    }

    fn action_field(&self, _p: &Point, x: &DVector<f64>) -> DVector<f64> {
        &self.k_basis * x
    }

    fn dw_functional(&self, _p: &Point, v: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        let vw = self.full.bracket(v, w).expect("dim checked");
        let paired = self.phi.transpose() * vw;
        DW_GROUP_COEF * (self.k_basis.transpose() * paired)
    }

    fn action_connection(&self, _p: &Point, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        self.gamma(&(&self.k_basis * x), &(&self.k_basis * y))
    }

    fn frame(&self, p: &Point) -> Result<PointFrame> {
        self.validate_point(p)?;
        let m = self.k_basis.ncols();
        PointFrame::assemble(
            p.clone(),
            DMatrix::zeros(m, 0),
            DMatrix::identity(m, m),
            self.k_basis.clone(),
            self.h_basis.clone(),
            self.p_on_k.clone(),
            self.phi.clone(),
        )
    }

    fn chart_dim(&self, _p: &Point) -> usize {
        self.full.dim()
    }

    fn chart_frame(&self, _p: &Point) -> DMatrix<f64> {
        DMatrix::identity(self.full.dim(), self.full.dim())
    }

    fn chart_metric_t(&self, _p: &Point, t: f64, x: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.full.dim();
        if x.len() != n {
            return Err(CheegerError::DimensionMismatch { expected: n, got: x.len() });
        }
        let mt = {
            let m = &self.phi * self.ct_matrix(t)?;
            (&m + m.transpose()) * 0.5
        };
        // d(exp)-Jacobian in the trivialization: J = Σ (-ad_x)^k / (k+1)!
        let ad_x = self.full.ad(&DVector::from_column_slice(x));
        let mut jac = DMatrix::<f64>::identity(n, n);
        let mut term = DMatrix::<f64>::identity(n, n);
        for k in 1..16 {
            term = &term * &ad_x;
            term.scale_mut(-1.0 / (k as f64 + 1.0));
            jac += &term;
            if term.amax() < 1e-18 {
                break;
            }
        }
        Ok(jac.transpose() * mt * &jac)
    }
}
