//! Base-space abstraction: points, tangent frames, action fields, `dw`,
//! shape operator and O'Neill tensor, with two shipped backends.
//!
//! A backend exposes, at every valid point: the unperturbed metric `g_0` and
//! its unnormalized curvature, the action-field map `X ↦ X*` of the acting
//! algebra, the calibrated two-form values `dw_Z(V, W)`, a connection for the
//! orbit shape operator, and a coordinate chart for the finite-difference
//! curvature oracle. Everything the deformation engine needs at a point is
//! collected into a [`PointFrame`].

mod group;
mod sphere;

pub use group::GroupBackend;
pub use sphere::{SphereBackend, SpherePoint};

use nalgebra::{DMatrix, DVector};

use crate::algebra::LieAlgebra;
use crate::error::{CheegerError, Result};

/// A point of the acted-on space.
///
/// The Lie-group backend works in the left-invariant trivialization, where
/// all frames are constant and the point is irrelevant.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    Group,
    Sphere(SpherePoint),
}

impl Point {
    pub fn sphere(p1: [f64; 3], p2: [f64; 3]) -> Result<Self> {
        Ok(Point::Sphere(SpherePoint::new(p1, p2)?))
    }
}

/// Orbit data at a point: isotropy, `m_p`, vertical/horizontal bases and the
/// orbit tensor `P` with `Q(PX, Y) = g(X*, Y*)`.
#[derive(Debug, Clone)]
pub struct PointFrame {
    pub point: Point,
    /// Q-orthonormal basis of the isotropy subalgebra (acting-algebra coords).
    pub isotropy: DMatrix<f64>,
    /// Q-orthonormal basis of `m_p` (acting-algebra coords).
    pub m_basis: DMatrix<f64>,
    /// Images `(m_basis_j)*` as tangent vectors (embedding coords).
    pub vertical: DMatrix<f64>,
    /// `g_0`-orthonormal basis of the horizontal space.
    pub horizontal: DMatrix<f64>,
    /// `g_0`-orthonormal tangent frame: vertical directions first, then horizontal.
    pub tangent_frame: DMatrix<f64>,
    /// Orbit tensor `P` on `m_p` in `m_basis` coordinates (symmetric positive).
    pub p_matrix: DMatrix<f64>,
    /// `Z ↦ P(Z_m)` on the whole acting algebra (kernel contains the isotropy).
    pub b_matrix: DMatrix<f64>,
    /// Gram matrix of `g_0` restricted to the embedding coordinates.
    metric_gram: DMatrix<f64>,
    /// Cholesky factor of the vertical Gram matrix `A^T G A` (`A` = vertical).
    vert_gram_chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
}

impl PointFrame {
    pub(crate) fn assemble(
        point: Point,
        isotropy: DMatrix<f64>,
        m_basis: DMatrix<f64>,
        vertical: DMatrix<f64>,
        horizontal: DMatrix<f64>,
        p_matrix: DMatrix<f64>,
        metric_gram: DMatrix<f64>,
    ) -> Result<Self> {
        let act_dim = isotropy.nrows();
        let vert_gram = vertical.transpose() * &metric_gram * &vertical;
        let vert_gram_chol = vert_gram
            .clone()
            .cholesky()
            .ok_or(CheegerError::NotPositiveDefinite { context: "vertical Gram matrix".into() })?;
        // b_matrix = M P M^T in acting coordinates (gram = I there)
        let b_matrix = &m_basis * &p_matrix * m_basis.transpose();
        // g0-orthonormal frame: orthonormalized vertical, then horizontal
        let mut frame_cols: Vec<DVector<f64>> = Vec::new();
        let g_inner = |x: &DVector<f64>, y: &DVector<f64>| (x.transpose() * &metric_gram * y)[0];
        for src in [&vertical, &horizontal] {
            for c in src.column_iter() {
                let mut v = c.clone_owned();
                for _ in 0..2 {
                    for u in &frame_cols {
                        let t = g_inner(u, &v);
                        v -= u * t;
                    }
                }
                let n = g_inner(&v, &v).max(0.0).sqrt();
                if n > 1e-12 {
                    frame_cols.push(v / n);
                }
            }
        }
        let tangent_frame = if frame_cols.is_empty() {
            DMatrix::zeros(vertical.nrows(), 0)
        } else {
            DMatrix::from_columns(&frame_cols)
        };
        debug_assert_eq!(isotropy.ncols() + m_basis.ncols(), act_dim);
        Ok(Self {
            point,
            isotropy,
            m_basis,
            vertical,
            horizontal,
            tangent_frame,
            p_matrix,
            b_matrix,
            metric_gram,
            vert_gram_chol,
        })
    }

    pub fn tangent_dim(&self) -> usize {
        self.tangent_frame.ncols()
    }

    pub fn acting_dim(&self) -> usize {
        self.isotropy.nrows()
    }

    /// Largest eigenvalue of `P`; the deformation is positive definite for
    /// `t > -1/λ_max`.
    pub fn lambda_max(&self) -> f64 {
        self.p_matrix.clone().symmetric_eigen().eigenvalues.max()
    }

    pub fn t_min(&self) -> f64 {
        -1.0 / self.lambda_max()
    }

    /// Coordinates in `m_basis` of the unique `X ∈ m_p` with `X* = V^vertical`.
    pub fn m_coords(&self, v: &DVector<f64>) -> DVector<f64> {
        let rhs = self.vertical.transpose() * &self.metric_gram * v;
        self.vert_gram_chol.solve(&rhs)
    }

    /// `V_m` as an acting-algebra vector.
    pub fn m_vector(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.m_basis * self.m_coords(v)
    }

    pub fn vertical_part(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.vertical * self.m_coords(v)
    }

    pub fn horizontal_part(&self, v: &DVector<f64>) -> DVector<f64> {
        v - self.vertical_part(v)
    }

    /// `P X` in acting-algebra coordinates, for `X` given in `m_basis` coords.
    pub fn p_apply(&self, m_coords: &DVector<f64>) -> DVector<f64> {
        &self.m_basis * (&self.p_matrix * m_coords)
    }

    pub fn metric_gram(&self) -> &DMatrix<f64> {
        &self.metric_gram
    }
}

/// Capability set shared by the shipped geometries.
///
/// Tangent vectors are represented in embedding coordinates: the
/// trivialization `g ≅ T_pG` for the group backend, and `ℝ³ × ℝ³` for the
/// sphere backend.
pub trait GeometryBackend {
    /// Acting Lie algebra, re-expressed with `gram = I`.
    fn algebra(&self) -> &LieAlgebra;

    /// Length of embedding-coordinate vectors.
    fn embedding_dim(&self) -> usize;

    fn validate_point(&self, p: &Point) -> Result<()>;

    /// `g_0` inner product of tangent vectors at `p`.
    fn metric0(&self, p: &Point, u: &DVector<f64>, v: &DVector<f64>) -> f64;

    /// Unnormalized curvature `g(R(V,W)W,V)`; a bi-invariant metric gives
    /// `¼‖[x,y]‖²`.
    fn curvature0(&self, p: &Point, v: &DVector<f64>, w: &DVector<f64>) -> f64;

    /// Action field `X*(p)`.
    fn action_field(&self, p: &Point, x: &DVector<f64>) -> DVector<f64>;

    /// Vector `d` with `dw_Z(V, W) = ⟨d, Z⟩` in acting-algebra coordinates,
    /// calibrated so that the deformed curvature matches the independent
    /// oracles (see the `DW_*` constants).
    fn dw_functional(&self, p: &Point, v: &DVector<f64>, w: &DVector<f64>) -> DVector<f64>;

    fn dw(&self, p: &Point, z: &DVector<f64>, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
        self.dw_functional(p, v, w).dot(z)
    }

    /// `∇_{X*} Y*` at `p` for acting-algebra vectors `X, Y`.
    fn action_connection(&self, p: &Point, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64>;

    fn frame(&self, p: &Point) -> Result<PointFrame>;

    /// Chart dimension for the coordinate oracle (equals the tangent dimension).
    fn chart_dim(&self, p: &Point) -> usize;

    /// Tangent vectors of the chart axes at the center point (columns).
    fn chart_frame(&self, p: &Point) -> DMatrix<f64>;

    /// Metric components of `g_t` at chart coordinates `x`, computed from the
    /// submersion definition rather than the curvature engine.
    fn chart_metric_t(&self, p: &Point, t: f64, x: &[f64]) -> Result<DMatrix<f64>>;
}

/// Compute the [`PointFrame`] at `p` (isotropy found as the numerical kernel
/// of `X ↦ X*` with a relative singular-value cutoff of `1e-10`).
pub fn point_frame<B: GeometryBackend + ?Sized>(backend: &B, p: &Point) -> Result<PointFrame> {
    backend.frame(p)
}

/// Shape operator of the orbit: the vertical vector `S_U(X*)` with
/// `g(S_U(X*), Y*) = g(∇_{X*}Y*, U)` for all `Y ∈ m_p`.
pub fn shape_operator<B: GeometryBackend + ?Sized>(
    backend: &B,
    frame: &PointFrame,
    u: &DVector<f64>,
    x: &DVector<f64>,
) -> Result<DVector<f64>> {
    let p = &frame.point;
    let hres = backend.metric0(p, &frame.vertical_part(u), &frame.vertical_part(u)).sqrt();
    if hres > 1e-8 {
        return Err(CheegerError::NotHorizontal { residual: hres });
    }
    let m = frame.m_basis.ncols();
    let mut rhs = DVector::zeros(m);
    for j in 0..m {
        let y = frame.m_basis.column(j).clone_owned();
        let nab = backend.action_connection(p, x, &y);
        rhs[j] = backend.metric0(p, &nab, u);
    }
    let coords = frame.vert_gram_chol.solve(&rhs);
    Ok(&frame.vertical * coords)
}

/// O'Neill tensor `A_U V`: the vertical vector with
/// `g(A_U V, X*) = -dw_X(U, V)` for all `X ∈ m_p`.
pub fn oneill_a<B: GeometryBackend + ?Sized>(
    backend: &B,
    frame: &PointFrame,
    u: &DVector<f64>,
    v: &DVector<f64>,
) -> Result<DVector<f64>> {
    let p = &frame.point;
    for arg in [u, v] {
        let vp = frame.vertical_part(arg);
        let res = backend.metric0(p, &vp, &vp).sqrt();
        if res > 1e-8 {
            return Err(CheegerError::NotHorizontal { residual: res });
        }
    }
    let d = backend.dw_functional(p, u, v);
    let m = frame.m_basis.ncols();
    let mut rhs = DVector::zeros(m);
    for j in 0..m {
        rhs[j] = -d.dot(&frame.m_basis.column(j).clone_owned());
    }
    let coords = frame.vert_gram_chol.solve(&rhs);
    Ok(&frame.vertical * coords)
}

/// Backend selection for scenario-driven runs.
#[derive(Debug, Clone)]
pub enum Backend {
    Group(GroupBackend),
    Sphere(SphereBackend),
}

macro_rules! delegate {
    ($self:ident, $m:ident ( $($arg:expr),* )) => {
        match $self {
            Backend::Group(b) => b.$m($($arg),*),
            Backend::Sphere(b) => b.$m($($arg),*),
        }
    };
}

impl GeometryBackend for Backend {
    fn algebra(&self) -> &LieAlgebra {
        delegate!(self, algebra())
    }
    fn embedding_dim(&self) -> usize {
        delegate!(self, embedding_dim())
    }
    fn validate_point(&self, p: &Point) -> Result<()> {
        delegate!(self, validate_point(p))
    }
    fn metric0(&self, p: &Point, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        delegate!(self, metric0(p, u, v))
    }
    fn curvature0(&self, p: &Point, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
        delegate!(self, curvature0(p, v, w))
    }
    fn action_field(&self, p: &Point, x: &DVector<f64>) -> DVector<f64> {
        delegate!(self, action_field(p, x))
    }
    fn dw_functional(&self, p: &Point, v: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        delegate!(self, dw_functional(p, v, w))
    }
    fn action_connection(&self, p: &Point, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        delegate!(self, action_connection(p, x, y))
    }
    fn frame(&self, p: &Point) -> Result<PointFrame> {
        delegate!(self, frame(p))
    }
    fn chart_dim(&self, p: &Point) -> usize {
        delegate!(self, chart_dim(p))
    }
    fn chart_frame(&self, p: &Point) -> DMatrix<f64> {
        delegate!(self, chart_frame(p))
    }
    fn chart_metric_t(&self, p: &Point, t: f64, x: &[f64]) -> Result<DMatrix<f64>> {
        delegate!(self, chart_metric_t(p, t, x))
    }
}
