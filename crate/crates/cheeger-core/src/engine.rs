//! The deformation core: orbit tensor `P_t`, metric tensor `C_t`, horizontal
//! lifts, the deformed curvature `κ_c(t)` with its three summands, zero-plane
//! classification, and the group closed forms (`g_s` curvature, iterated
//! chain metrics, non-negativity scans).
//!
//! For `g_0`-orthonormal `V, W` the engine evaluates
//!
//! ```text
//! κ_c(t) = g(R(V,W)W,V) + (t³/4)‖[P V_m, P W_m]‖² + z(V,W,t)
//! z(V,W,t) = 3t · max_{|Z|=1} ℓ(Z)² / (1 + t·g(Z*,Z*)),
//!            ℓ(Z) = dw_Z(V,W) + (t/2)·Q([P V_m, P W_m], Z)
//! ```
//!
//! The maximum is a rank-one generalized Rayleigh quotient with closed form
//! `3t·ℓᵀ(I + tB)⁻¹ℓ`, `B : Z ↦ P(Z_m)`; a sampling maximizer stays in the
//! test suite as the anti-regression oracle. The squared wedge norm of the
//! moving plane is evaluated as the `g_t` Gram determinant
//! `t²‖PV_m ∧ PW_m‖² + t(‖PV_m‖² + ‖PW_m‖²) + 1`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{LieAlgebra, MetricOperator, SubalgebraChain, Subspace};
use crate::descent;
use crate::error::{CheegerError, Result};
use crate::geometry::{GeometryBackend, Point, PointFrame};

/// Unnormalized curvature below this is treated as a zero plane.
pub const ZERO_PLANE_CURVATURE_TOL: f64 = 1e-10;
/// Threshold on the dw-functional and bracket norms in the trichotomy.
pub const CLASSIFY_NORM_TOL: f64 = 1e-8;
/// Pivot tolerance of the Gram–Schmidt preprocessor.
pub const ORTHONORMALIZE_PIVOT_TOL: f64 = 1e-12;

/// Deformation parameter with its validity interval `(-1/λ_max(P), ∞)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DeformationParam {
    pub t: f64,
    pub t_min: f64,
}

impl DeformationParam {
    pub fn new(t: f64, frame: &PointFrame) -> Result<Self> {
        let t_min = frame.t_min();
        if !(t > t_min) {
            return Err(CheegerError::OutsideValidity { t, t_min });
        }
        Ok(Self { t, t_min })
    }
}

/// The three summands of `κ_c(t)` plus the wedge norm of the moving plane.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurvatureBreakdown {
    pub t: f64,
    pub base: f64,
    pub bracket_term: f64,
    pub z: f64,
    pub total: f64,
    pub wedge_sq: f64,
    pub sec: f64,
    /// Whether the Gram–Schmidt preprocessor had to adjust the input pair.
    pub orthonormalized: bool,
}

/// Trichotomy of a `κ_0 = 0` plane under the deformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PlaneClassTag {
    PositiveFirstOrder,
    PositiveAllT,
    FlatAllT,
    NotAZeroPlane,
}

/// Classification with its numeric evidence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlaneClass {
    pub tag: PlaneClassTag,
    /// Q-norm of the functional `Z ↦ dw_Z(V, W)`.
    pub dw_norm: f64,
    /// `‖[P V_m, P W_m]‖_Q`.
    pub bracket_norm: f64,
}

/// Orbit tensor of the deformed metric, `P_t = P(I + tP)⁻¹`.
pub fn orbit_tensor_t(p: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    let sym = (p - p.transpose()).amax();
    if sym > 1e-10 {
        return Err(CheegerError::NotPositiveDefinite {
            context: format!("orbit tensor not symmetric (defect {sym:.3e})"),
        });
    }
    let eig = p.clone().symmetric_eigen();
    let lam_max = eig.eigenvalues.max();
    let lam_min = eig.eigenvalues.min();
    if lam_min <= 0.0 {
        return Err(CheegerError::NotPositiveDefinite { context: "orbit tensor".into() });
    }
    let t_min = -1.0 / lam_max;
    if !(t > t_min) {
        return Err(CheegerError::OutsideValidity { t, t_min });
    }
    let n = p.nrows();
    let sys = DMatrix::identity(n, n) + p * t;
    let inv = sys.cholesky().ok_or(CheegerError::OutsideValidity { t, t_min })?.inverse();
    let out = p * inv;
    Ok((&out + out.transpose()) * 0.5)
}

/// Fixed-point-and-frame context: factors `I + tB` once so that many planes
/// can be evaluated at the same `(p, t)`.
pub struct DeformationContext<'a, B: GeometryBackend + ?Sized> {
    backend: &'a B,
    point: Point,
    frame: PointFrame,
    t: f64,
    ib_chol: Cholesky<f64, Dyn>,
}

impl<'a, B: GeometryBackend + ?Sized> DeformationContext<'a, B> {
    pub fn new(backend: &'a B, p: &Point, t: f64) -> Result<Self> {
        backend.validate_point(p)?;
        let frame = backend.frame(p)?;
        DeformationParam::new(t, &frame)?;
        let n = frame.acting_dim();
        let sys = DMatrix::identity(n, n) + &frame.b_matrix * t;
        let ib_chol = sys
            .cholesky()
            .ok_or(CheegerError::OutsideValidity { t, t_min: frame.t_min() })?;
        Ok(Self { backend, point: p.clone(), frame, t, ib_chol })
    }

    pub fn frame(&self) -> &PointFrame {
        &self.frame
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn point(&self) -> &Point {
        &self.point
    }

    pub fn backend(&self) -> &'a B {
        self.backend
    }

    fn g0(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        self.backend.metric0(&self.point, u, v)
    }

    /// Gram–Schmidt preprocessor; errors on a degenerate plane.
    pub fn orthonormalize(&self, v: &DVector<f64>, w: &DVector<f64>) -> Result<(DVector<f64>, DVector<f64>, bool)> {
        let nv = self.g0(v, v).max(0.0).sqrt();
        if nv <= ORTHONORMALIZE_PIVOT_TOL {
            return Err(CheegerError::DegeneratePlane);
        }
        let v1 = v / nv;
        let cross = self.g0(&v1, w);
        let w1 = w - &v1 * cross;
        let nw = self.g0(&w1, &w1).max(0.0).sqrt();
        if nw <= ORTHONORMALIZE_PIVOT_TOL {
            return Err(CheegerError::DegeneratePlane);
        }
        let w1 = w1 / nw;
        let adjusted =
            (nv - 1.0).abs() > 1e-12 || (nw - 1.0).abs() > 1e-12 || cross.abs() > 1e-12;
        Ok((v1, w1, adjusted))
    }

    /// The plane-dependent ingredients: `(d, b, PV_m, PW_m)` in acting coords.
    fn plane_parts(
        &self,
        v: &DVector<f64>,
        w: &DVector<f64>,
    ) -> Result<(DVector<f64>, DVector<f64>, DVector<f64>, DVector<f64>)> {
        let xv = self.frame.m_coords(v);
        let xw = self.frame.m_coords(w);
        let pv = self.frame.p_apply(&xv);
        let pw = self.frame.p_apply(&xw);
        let b = self.backend.algebra().bracket(&pv, &pw)?;
        let d = self.backend.dw_functional(&self.point, v, w);
        Ok((d, b, pv, pw))
    }

    /// Deformed unnormalized curvature of the moving plane, with breakdown.
    pub fn kappa(&self, v: &DVector<f64>, w: &DVector<f64>) -> Result<CurvatureBreakdown> {
        let (v, w, adjusted) = self.orthonormalize(v, w)?;
        let t = self.t;
        let base = self.backend.curvature0(&self.point, &v, &w);
        let (d, b, pv, pw) = self.plane_parts(&v, &w)?;
        let ell = &d + &b * (0.5 * t);
        let z = 3.0 * t * ell.dot(&self.ib_chol.solve(&ell));
        let bracket_term = t.powi(3) / 4.0 * b.dot(&b);
        let pv2 = pv.dot(&pv);
        let pw2 = pw.dot(&pw);
        let wedge_bivec = pv2 * pw2 - pv.dot(&pw).powi(2);
        let wedge_sq = t * t * wedge_bivec + t * (pv2 + pw2) + 1.0;
        let total = base + bracket_term + z;
        Ok(CurvatureBreakdown {
            t,
            base,
            bracket_term,
            z,
            total,
            wedge_sq,
            sec: total / wedge_sq,
            orthonormalized: adjusted,
        })
    }

    /// Closed-form O'Neill term (inputs need not be orthonormal; they are
    /// preprocessed the same way as in [`Self::kappa`]).
    pub fn z_term(&self, v: &DVector<f64>, w: &DVector<f64>) -> Result<f64> {
        let (v, w, _) = self.orthonormalize(v, w)?;
        let (d, b, _, _) = self.plane_parts(&v, &w)?;
        let ell = &d + &b * (0.5 * self.t);
        Ok(3.0 * self.t * ell.dot(&self.ib_chol.solve(&ell)))
    }

    /// Sampling oracle: maximize the Rayleigh quotient over `n` random unit
    /// directions. Never exceeds the closed form (up to roundoff).
    pub fn z_term_sampled<R: Rng>(
        &self,
        v: &DVector<f64>,
        w: &DVector<f64>,
        n: usize,
        rng: &mut R,
    ) -> Result<f64> {
        let (v, w, _) = self.orthonormalize(v, w)?;
        let (d, b, _, _) = self.plane_parts(&v, &w)?;
        let ell = &d + &b * (0.5 * self.t);
        let mut best = f64::NEG_INFINITY;
        let dim = self.frame.acting_dim();
        for _ in 0..n {
            let z = descent::random_unit(dim, rng);
            best = best.max(self.z_quotient(&ell, &z));
        }
        Ok(best)
    }

    /// Sampling plus local ascent of the quotient from the best sample.
    pub fn z_term_refined<R: Rng>(
        &self,
        v: &DVector<f64>,
        w: &DVector<f64>,
        n: usize,
        rng: &mut R,
    ) -> Result<f64> {
        let (v, w, _) = self.orthonormalize(v, w)?;
        let (d, b, _, _) = self.plane_parts(&v, &w)?;
        let ell = &d + &b * (0.5 * self.t);
        let dim = self.frame.acting_dim();
        let mut best = (f64::NEG_INFINITY, DVector::zeros(dim));
        for _ in 0..n {
            let z = descent::random_unit(dim, rng);
            let q = self.z_quotient(&ell, &z);
            if q > best.0 {
                best = (q, z);
            }
        }
        let neg = |z: &DVector<f64>| -self.z_quotient(&ell, &(z / z.norm()));
        let (zr, fr) = descent::projected_gradient(
            neg,
            |z: &DVector<f64>| z / z.norm(),
            best.1,
            1e-7,
            1e-14,
            200,
        );
        let _ = zr;
        Ok(best.0.max(-fr))
    }

    fn z_quotient(&self, ell: &DVector<f64>, z_unit: &DVector<f64>) -> f64 {
        let num = ell.dot(z_unit).powi(2);
        let den = 1.0 + self.t * (z_unit.transpose() * &self.frame.b_matrix * z_unit)[0];
        3.0 * self.t * num / den
    }

    /// Squared wedge norm `‖C_t⁻¹V ∧ C_t⁻¹W‖²_{g_t}` for a `g_0`-orthonormal pair.
    pub fn wedge_sq(&self, v: &DVector<f64>, w: &DVector<f64>) -> Result<f64> {
        Ok(self.kappa(v, w)?.wedge_sq)
    }

    /// `g_t(u, v) = g(C_t u, v)`.
    pub fn metric_t(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        let cu = apply_ct(&self.frame, u, self.t).expect("validity checked at construction");
        self.g0(&cu, v)
    }
}

/// `C_t(V) = (I + tP)⁻¹(V^vert) + V^hor`, the operator with `g_t = g(C_t·,·)`.
pub fn apply_ct(frame: &PointFrame, v: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
    DeformationParam::new(t, frame)?;
    let m = frame.m_basis.ncols();
    let x = frame.m_coords(v);
    let sys = DMatrix::identity(m, m) + &frame.p_matrix * t;
    let y = sys
        .cholesky()
        .ok_or(CheegerError::OutsideValidity { t, t_min: frame.t_min() })?
        .solve(&x);
    Ok(&frame.vertical * y + frame.horizontal_part(v))
}

/// Inverse metric tensor: `C_t⁻¹(V) = (I + tP)(V_m)* + V^hor`.
pub fn apply_ct_inv(frame: &PointFrame, v: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
    DeformationParam::new(t, frame)?;
    let x = frame.m_coords(v);
    let y = &x + &frame.p_matrix * x.clone() * t;
    Ok(&frame.vertical * y + frame.horizontal_part(v))
}

/// σ-horizontal lift of `C_t⁻¹X` into `M × G`: the pair `(X, -t P X_m)`.
///
/// At `t = 0` the lift degenerates to `(X, 0)`.
pub fn horizontal_lift(
    frame: &PointFrame,
    x: &DVector<f64>,
    t: f64,
) -> Result<(DVector<f64>, DVector<f64>)> {
    DeformationParam::new(t, frame)?;
    if t == 0.0 {
        return Ok((x.clone(), DVector::zeros(frame.acting_dim())));
    }
    let coords = frame.m_coords(x);
    Ok((x.clone(), -frame.p_apply(&coords) * t))
}

/// Orthonormalize a pair with respect to `g_0` at `p`.
pub fn orthonormalize_pair<B: GeometryBackend + ?Sized>(
    backend: &B,
    p: &Point,
    v: &DVector<f64>,
    w: &DVector<f64>,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let g = |a: &DVector<f64>, b: &DVector<f64>| backend.metric0(p, a, b);
    let nv = g(v, v).max(0.0).sqrt();
    if nv <= ORTHONORMALIZE_PIVOT_TOL {
        return Err(CheegerError::DegeneratePlane);
    }
    let v1 = v / nv;
    let w1 = w - &v1 * g(&v1, w);
    let nw = g(&w1, &w1).max(0.0).sqrt();
    if nw <= ORTHONORMALIZE_PIVOT_TOL {
        return Err(CheegerError::DegeneratePlane);
    }
    Ok((v1, w1 / nw))
}

/// `(d, b)` of a `g_0`-orthonormal plane: the dw functional and the bracket
/// `[P V_m, P W_m]`, both in acting-algebra coordinates.
pub fn plane_invariants<B: GeometryBackend + ?Sized>(
    backend: &B,
    frame: &PointFrame,
    v: &DVector<f64>,
    w: &DVector<f64>,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let pv = frame.p_apply(&frame.m_coords(v));
    let pw = frame.p_apply(&frame.m_coords(w));
    let b = backend.algebra().bracket(&pv, &pw)?;
    let d = backend.dw_functional(&frame.point, v, w);
    Ok((d, b))
}

/// One-shot deformed curvature at `(p, t)`.
pub fn kappa_c<B: GeometryBackend + ?Sized>(
    backend: &B,
    p: &Point,
    v: &DVector<f64>,
    w: &DVector<f64>,
    t: f64,
) -> Result<CurvatureBreakdown> {
    DeformationContext::new(backend, p, t)?.kappa(v, w)
}

/// Classify a plane by the trichotomy: first-order positivity when the dw
/// functional survives, eventual positivity when `[P V_m, P W_m] ≠ 0`,
/// otherwise flat for every `t`.
pub fn classify_zero_plane<B: GeometryBackend + ?Sized>(
    backend: &B,
    p: &Point,
    v: &DVector<f64>,
    w: &DVector<f64>,
) -> Result<PlaneClass> {
    let frame = backend.frame(p)?;
    let (v, w) = orthonormalize_pair(backend, p, v, w)?;
    let (d, b) = plane_invariants(backend, &frame, &v, &w)?;
    let dw_norm = d.norm();
    let bracket_norm = b.norm();
    let kappa0 = backend.curvature0(p, &v, &w);
    let tag = if kappa0.abs() > ZERO_PLANE_CURVATURE_TOL {
        PlaneClassTag::NotAZeroPlane
    } else if dw_norm > CLASSIFY_NORM_TOL {
        PlaneClassTag::PositiveFirstOrder
    } else if bracket_norm > CLASSIFY_NORM_TOL {
        PlaneClassTag::PositiveAllT
    } else {
        PlaneClassTag::FlatAllT
    };
    Ok(PlaneClass { tag, dw_norm, bracket_norm })
}

/// First three `t`-derivatives of `κ_c` at `t = 0` by Richardson-extrapolated
/// central differences on a 7-point stencil.
pub fn derivative_probe<B: GeometryBackend + ?Sized>(
    backend: &B,
    p: &Point,
    v: &DVector<f64>,
    w: &DVector<f64>,
    h: f64,
) -> Result<(f64, f64, f64)> {
    let frame = backend.frame(p)?;
    let t_min = frame.t_min();
    let mut h = h;
    if 2.0 * h >= -t_min {
        h = 1e-3;
        if 2.0 * h >= -t_min {
            return Err(CheegerError::OutsideValidity { t: -2.0 * h, t_min });
        }
    }
    let f = |t: f64| -> Result<f64> { Ok(kappa_c(backend, p, v, w, t)?.total) };
    let f0 = f(0.0)?;
    let fp1 = f(h)?;
    let fm1 = f(-h)?;
    let fp2 = f(2.0 * h)?;
    let fm2 = f(-2.0 * h)?;
    let fph = f(0.5 * h)?;
    let fmh = f(-0.5 * h)?;
    let d1 = |hh: f64, fp: f64, fm: f64| (fp - fm) / (2.0 * hh);
    let d2 = |hh: f64, fp: f64, fm: f64| (fp - 2.0 * f0 + fm) / (hh * hh);
    let k1 = (4.0 * d1(0.5 * h, fph, fmh) - d1(h, fp1, fm1)) / 3.0;
    let k2 = (4.0 * d2(0.5 * h, fph, fmh) - d2(h, fp1, fm1)) / 3.0;
    let d3_h = (fp2 - 2.0 * fp1 + 2.0 * fm1 - fm2) / (2.0 * h.powi(3));
    let d3_h2 = (fp1 - 2.0 * fph + 2.0 * fmh - fm1) / (2.0 * (0.5 * h).powi(3));
    let k3 = (4.0 * d3_h2 - d3_h) / 3.0;
    Ok((k1, k2, k3))
}

/// Curvature of the one-step deformed metric `g_s = sQ|_k + Q|_m` on a
/// compact Lie algebra:
///
/// ```text
/// ¼‖s[A,B]_m + (1-s)[A_m,B_m]_m‖² + (1-s)²‖[A_k,B_k]‖²
///   − (1-s)(2-s)Q([A_k,B_k],[A,B]_k) + ((4-3s)/4)‖[A,B]_k‖²
/// ```
///
/// At `s = 1` this is the bi-invariant `¼‖[A,B]‖²`; the positive sign of the
/// final term is pinned by that limit and by agreement with the deformation
/// route `s = 1/(1+t)`.
pub fn gs_curvature(
    alg: &LieAlgebra,
    k: &Subspace,
    a: &DVector<f64>,
    b: &DVector<f64>,
    s: f64,
) -> Result<f64> {
    gs_curvature_with_final_sign(alg, k, a, b, s, 1.0)
}

/// Diagnostic hook for the verification harness: evaluate the one-step
/// closed form with an explicit sign on its final term. Anything other than
/// `+1` must fail the bi-invariant limit at `s = 1`.
pub fn gs_curvature_with_final_sign(
    alg: &LieAlgebra,
    k: &Subspace,
    a: &DVector<f64>,
    b: &DVector<f64>,
    s: f64,
    final_sign: f64,
) -> Result<f64> {
    if s <= 0.0 {
        return Err(CheegerError::InvalidConfig(format!("scale s = {s} must be positive")));
    }
    let ak = k.project(alg, a);
    let am = a - &ak;
    let bk = k.project(alg, b);
    let bm = b - &bk;
    let ab = alg.bracket(a, b)?;
    let ab_k = k.project(alg, &ab);
    let ab_m = &ab - &ab_k;
    let akbk = alg.bracket(&ak, &bk)?;
    let ambm = alg.bracket(&am, &bm)?;
    let ambm_m = &ambm - k.project(alg, &ambm);
    let first = &ab_m * s + &ambm_m * (1.0 - s);
    Ok(0.25 * alg.q_inner(&first, &first)
        + (1.0 - s).powi(2) * alg.q_inner(&akbk, &akbk)
        - (1.0 - s) * (2.0 - s) * alg.q_inner(&akbk, &ab_k)
        + final_sign * (4.0 - 3.0 * s) / 4.0 * alg.q_inner(&ab_k, &ab_k))
}

/// Normalized `g_s` sectional curvature (divides by the `g_s` Gram determinant).
pub fn gs_sectional(
    alg: &LieAlgebra,
    k: &Subspace,
    a: &DVector<f64>,
    b: &DVector<f64>,
    s: f64,
) -> Result<f64> {
    let gs = |x: &DVector<f64>, y: &DVector<f64>| {
        let xk = k.project(alg, x);
        let yk = k.project(alg, y);
        s * alg.q_inner(&xk, &yk) + alg.q_inner(&(x - &xk), &(y - &yk))
    };
    let den = gs(a, a) * gs(b, b) - gs(a, b).powi(2);
    if den < 1e-12 {
        return Err(CheegerError::DegeneratePlane);
    }
    Ok(gs_curvature(alg, k, a, b, s)? / den)
}

/// Iterated chain metric from deformation parameters, composed one subgroup
/// at a time starting with the **largest** level (the order in which every
/// intermediate step is an isometric action on the previous metric).
///
/// Step `j` (0-based) deforms by level `k_{n-j}` with parameter `ts[j]`; a
/// block `b_i` ends with coefficient `(1 + ts[0] + … + ts[n-i])⁻¹`, so the
/// multiset of coefficients is `{(1 + partial sums)⁻¹} ∪ {1}`.
pub fn chain_metric(
    alg: &LieAlgebra,
    chain: &SubalgebraChain,
    ts: &[f64],
) -> Result<MetricOperator> {
    let n_levels = chain.levels().len();
    if ts.len() != n_levels {
        return Err(CheegerError::DimensionMismatch { expected: n_levels, got: ts.len() });
    }
    let mut coeffs = vec![1.0; chain.blocks().len()];
    for (step, &t) in ts.iter().enumerate() {
        let level = n_levels - 1 - step; // largest first
        for c in coeffs.iter_mut().take(level + 1) {
            let denom = 1.0 + t * *c;
            if denom <= 0.0 {
                return Err(CheegerError::NotPositiveDefinite {
                    context: format!("chain step {step} (t = {t}) loses positivity"),
                });
            }
            *c /= denom;
        }
    }
    let mut op = MetricOperator::from_block_coeffs(alg, chain, &coeffs)?;
    op.set_block_coeffs(coeffs);
    Ok(op)
}

/// Outcome of a non-negativity scan at one scale `s`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanPoint {
    pub s: f64,
    /// Minimal normalized sectional curvature found.
    pub min_sec: f64,
    /// Witness plane when `min_sec < -1e-8` (certified negative).
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
}

/// Scan `g_s` for negative curvature: `n_samples` random planes followed by
/// derivative-free local descent from the best ten.
pub fn nonneg_scan(
    alg: &LieAlgebra,
    k: &Subspace,
    s_values: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<Vec<ScanPoint>> {
    if n_samples == 0 {
        return Err(CheegerError::InvalidConfig("n_samples must be at least 1".into()));
    }
    use rand::SeedableRng;
    let n = alg.dim();
    let mut out = Vec::with_capacity(s_values.len());
    for (si, &s) in s_values.iter().enumerate() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ (si as u64).wrapping_mul(0x9e3779b97f4a7c15));
        let objective = |x: &DVector<f64>| -> f64 {
            let a = x.rows(0, n).clone_owned();
            let b = x.rows(n, n).clone_owned();
            gs_sectional(alg, k, &a, &b, s).unwrap_or(f64::INFINITY)
        };
        let mut samples: Vec<(f64, DVector<f64>)> = (0..n_samples)
            .map(|_| {
                let mut x = DVector::zeros(2 * n);
                let a = descent::random_unit(n, &mut rng);
                let b = descent::random_unit(n, &mut rng);
                x.rows_mut(0, n).copy_from(&a);
                x.rows_mut(n, n).copy_from(&b);
                (objective(&x), x)
            })
            .collect();
        samples.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
        let mut best = samples[0].0;
        let mut best_x = samples[0].1.clone();
        for (v0, x0) in samples.into_iter().take(10) {
            let (x, v) = descent::nelder_mead(&objective, &x0, 0.2, 800, 1e-14);
            if v < best {
                best = v;
                best_x = x;
            } else if v0 < best {
                best = v0;
            }
        }
        let witness = if best < -1e-8 {
            let a = best_x.rows(0, n).clone_owned();
            let b = best_x.rows(n, n).clone_owned();
            Some((a.iter().copied().collect(), b.iter().copied().collect()))
        } else {
            None
        };
        out.push(ScanPoint { s, min_sec: best, witness });
    }
    Ok(out)
}

/// Bracket the first scale at which `g_s` curvature turns negative, to the
/// requested width, by bisection on the scan verdict.
pub fn bracket_frontier(
    alg: &LieAlgebra,
    k: &Subspace,
    s_lo: f64,
    s_hi: f64,
    width: f64,
    n_samples: usize,
    seed: u64,
) -> Result<Option<(f64, f64)>> {
    let negative = |s: f64| -> Result<bool> {
        let pts = nonneg_scan(alg, k, &[s], n_samples, seed)?;
        Ok(pts[0].min_sec < -1e-8)
    };
    if negative(s_lo)? {
        return Ok(None); // frontier below the window
    }
    if !negative(s_hi)? {
        return Ok(None); // no sign change in the window
    }
    let (mut lo, mut hi) = (s_lo, s_hi);
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if negative(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some((lo, hi)))
}
