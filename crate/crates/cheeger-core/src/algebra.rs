//! Compact Lie algebras given by structure constants, with a bi-invariant
//! inner product `Q`, nested subalgebra chains and block decompositions.
//!
//! A [`LieAlgebra`] stores the structure tensor `c[i][j][k]` of a basis
//! (`[e_i, e_j] = Σ_k c[i][j][k] e_k`) together with the Gram matrix of `Q`.
//! Everything downstream (orbit tensors, deformed curvature) works in a
//! `Q`-orthonormal basis, so the algebra knows how to re-express itself in
//! one.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{CheegerError, Result};
use crate::DEFAULT_TOL;

/// Compact Lie algebra with structure constants and bi-invariant Gram matrix.
#[derive(Debug, Clone)]
pub struct LieAlgebra {
    dim: usize,
    /// `ad[i] * y = [e_i, y]` in basis coordinates.
    ad: Vec<DMatrix<f64>>,
    gram: DMatrix<f64>,
    jacobi_residual: f64,
    bi_invariance_residual: f64,
}

/// Serialized form: `{"dim": n, "structure": [[i, j, k, value], ...], "gram": [[...]]}`.
///
/// Structure entries are 0-indexed; each entry sets `c[i][j][k] = value` and
/// its antisymmetric partner `c[j][i][k] = -value`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub dim: usize,
    pub structure: Vec<(usize, usize, usize, f64)>,
    pub gram: Vec<Vec<f64>>,
}

impl LieAlgebra {
    /// Build an algebra from sparse structure entries.
    ///
    /// Antisymmetry is enforced by construction; conflicting duplicate
    /// entries, a Jacobi residual above `1e-10`, or a non-SPD Gram matrix are
    /// rejected. The bi-invariance residual of `gram` is computed and stored
    /// but not gated, so that [`check_bi_invariance`] can be used as a
    /// diagnostic on deliberately non-invariant inner products.
    pub fn new(
        dim: usize,
        entries: &[(usize, usize, usize, f64)],
        gram: DMatrix<f64>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(CheegerError::InvalidAlgebra("dimension must be positive".into()));
        }
        if gram.nrows() != dim || gram.ncols() != dim {
            return Err(CheegerError::DimensionMismatch { expected: dim, got: gram.nrows() });
        }
        let mut c = vec![DMatrix::<f64>::zeros(dim, dim); dim]; // c[k][(i,j)]
        let mut set = vec![DMatrix::<u8>::zeros(dim, dim); dim];
        for &(i, j, k, v) in entries {
            if i >= dim || j >= dim || k >= dim {
                return Err(CheegerError::InvalidAlgebra(format!(
                    "structure index ({i},{j},{k}) out of range for dim {dim}"
                )));
            }
            if i == j && v != 0.0 {
                return Err(CheegerError::InvalidAlgebra(format!(
                    "c[{i}][{i}][{k}] must vanish by antisymmetry"
                )));
            }
            for (a, b, val) in [(i, j, v), (j, i, -v)] {
                if set[k][(a, b)] != 0 && (c[k][(a, b)] - val).abs() != 0.0 {
                    return Err(CheegerError::InvalidAlgebra(format!(
                        "conflicting entries for c[{a}][{b}][{k}]"
                    )));
                }
                c[k][(a, b)] = val;
                set[k][(a, b)] = 1;
            }
        }
        let mut ad = vec![DMatrix::<f64>::zeros(dim, dim); dim];
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    ad[i][(k, j)] = c[k][(i, j)];
                }
            }
        }
        if gram.clone().cholesky().is_none() {
            return Err(CheegerError::NotPositiveDefinite { context: "gram matrix".into() });
        }
        let mut alg = Self { dim, ad, gram, jacobi_residual: 0.0, bi_invariance_residual: 0.0 };
        alg.jacobi_residual = alg.compute_jacobi_residual();
        alg.bi_invariance_residual = alg.compute_bi_invariance_residual();
        if alg.jacobi_residual > DEFAULT_TOL {
            return Err(CheegerError::InvalidAlgebra(format!(
                "Jacobi identity fails: residual {:.3e}",
                alg.jacobi_residual
            )));
        }
        Ok(alg)
    }

    /// Built-in algebras: `so3`, `su2`, `su3`, `so4` and `torus(k)`.
    ///
    /// `so3`/`su2` use the cyclic basis `[e1,e2] = e3` with `Q = I`, so the
    /// bi-invariant curvature of the basis plane is exactly 1/4.
    pub fn builtin(name: &str) -> Result<Self> {
        let name = name.trim();
        if let Some(rest) = name.strip_prefix("torus(").and_then(|r| r.strip_suffix(')')) {
            let k: usize = rest
                .parse()
                .map_err(|_| CheegerError::InvalidAlgebra(format!("bad torus dimension: {rest}")))?;
            if k == 0 {
                return Err(CheegerError::InvalidAlgebra("torus dimension must be positive".into()));
            }
            return Self::new(k, &[], DMatrix::identity(k, k));
        }
        match name {
            "so3" | "su2" => Self::new(
                3,
                &[(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0)],
                DMatrix::identity(3, 3),
            ),
            "su3" => {
                let h = 0.5;
                let r = 3f64.sqrt() / 2.0;
                // standard totally antisymmetric constants, 0-indexed
                let entries = [
                    (0, 1, 2, 1.0),
                    (0, 3, 6, h),
                    (0, 4, 5, -h),
                    (1, 3, 5, h),
                    (1, 4, 6, h),
                    (2, 3, 4, h),
                    (2, 5, 6, -h),
                    (3, 4, 7, r),
                    (5, 6, 7, r),
                ];
                let mut full = Vec::new();
                for &(a, b, c, v) in &entries {
                    // expand the antisymmetric orbit over the remaining cyclic pairs
                    full.push((a, b, c, v));
                    full.push((b, c, a, v));
                    full.push((c, a, b, v));
                }
                Self::new(8, &full, DMatrix::identity(8, 8))
            }
            "so4" => {
                // basis E_ab = e_a e_b^T - e_b e_a^T, (a,b) in lexicographic order;
                // Q = -tr(XY)/2 is the identity on it
                let idx: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
                let basis: Vec<[[f64; 4]; 4]> = idx
                    .iter()
                    .map(|&(a, b)| {
                        let mut m = [[0.0; 4]; 4];
                        m[a][b] = 1.0;
                        m[b][a] = -1.0;
                        m
                    })
                    .collect();
                let mul = |x: &[[f64; 4]; 4], y: &[[f64; 4]; 4]| {
                    let mut out = [[0.0; 4]; 4];
                    for i in 0..4 {
                        for j in 0..4 {
                            for k in 0..4 {
                                out[i][j] += x[i][k] * y[k][j];
                            }
                        }
                    }
                    out
                };
                let mut entries = Vec::new();
                for i in 0..6 {
                    for j in (i + 1)..6 {
                        let com = {
                            let xy = mul(&basis[i], &basis[j]);
                            let yx = mul(&basis[j], &basis[i]);
                            let mut out = [[0.0; 4]; 4];
                            for a in 0..4 {
                                for b in 0..4 {
                                    out[a][b] = xy[a][b] - yx[a][b];
                                }
                            }
                            out
                        };
                        for (k, bk) in basis.iter().enumerate() {
                            let prod = mul(&com, bk);
                            let tr: f64 = (0..4).map(|a| prod[a][a]).sum();
                            let v = -0.5 * tr;
                            if v != 0.0 {
                                entries.push((i, j, k, v));
                            }
                        }
                    }
                }
                Self::new(6, &entries, DMatrix::identity(6, 6))
            }
            other => Err(CheegerError::InvalidAlgebra(format!("unknown builtin algebra: {other}"))),
        }
    }

    pub fn from_spec(spec: &AlgebraSpec) -> Result<Self> {
        let gram = DMatrix::from_fn(spec.dim, spec.dim, |i, j| {
            spec.gram.get(i).and_then(|r| r.get(j)).copied().unwrap_or(f64::NAN)
        });
        if gram.iter().any(|x| x.is_nan()) {
            return Err(CheegerError::InvalidAlgebra("gram matrix has wrong shape".into()));
        }
        Self::new(spec.dim, &spec.structure, gram)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: AlgebraSpec = serde_json::from_str(text)
            .map_err(|e| CheegerError::InvalidAlgebra(format!("JSON parse error: {e}")))?;
        Self::from_spec(&spec)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Structure constant `c[i][j][k]`, antisymmetric in `(i, j)` exactly as stored.
    pub fn structure(&self, i: usize, j: usize, k: usize) -> f64 {
        self.ad[i][(k, j)]
    }

    /// `ad(e_i)` as a matrix acting on coordinates.
    pub fn ad_basis(&self, i: usize) -> &DMatrix<f64> {
        &self.ad[i]
    }

    /// `ad(x)` for an arbitrary element.
    pub fn ad(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            if x[i] != 0.0 {
                out += &self.ad[i] * x[i];
            }
        }
        out
    }

    /// Lie bracket `[x, y]` by structure-constant contraction.
    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.dim || y.len() != self.dim {
            return Err(CheegerError::DimensionMismatch {
                expected: self.dim,
                got: if x.len() != self.dim { x.len() } else { y.len() },
            });
        }
        let mut out = DVector::zeros(self.dim);
        for i in 0..self.dim {
            if x[i] != 0.0 {
                out.axpy(x[i], &(&self.ad[i] * y), 1.0);
            }
        }
        Ok(out)
    }

    pub fn q_inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.gram * y)[(0, 0)]
    }

    pub fn q_norm(&self, x: &DVector<f64>) -> f64 {
        self.q_inner(x, x).max(0.0).sqrt()
    }

    /// Worst Jacobi residual over basis triples (Q-norms).
    pub fn jacobi_residual(&self) -> f64 {
        self.jacobi_residual
    }

    /// Max over basis triples of `|Q([z,x],y) + Q(x,[z,y])|`.
    pub fn bi_invariance_residual(&self) -> f64 {
        self.bi_invariance_residual
    }

    fn compute_jacobi_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let e = DMatrix::<f64>::identity(self.dim, self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let bij = &self.ad[i] * e.column(j);
                for k in 0..self.dim {
                    let mut r = self.ad(&bij.clone_owned()) * e.column(k);
                    let bjk = &self.ad[j] * e.column(k);
                    r += self.ad(&bjk.clone_owned()) * e.column(i);
                    let bki = &self.ad[k] * e.column(i);
                    r += self.ad(&bki.clone_owned()) * e.column(j);
                    let scale = self.q_norm(&e.column(i).clone_owned())
                        * self.q_norm(&e.column(j).clone_owned())
                        * self.q_norm(&e.column(k).clone_owned());
                    worst = worst.max(self.q_norm(&r) / scale.max(f64::MIN_POSITIVE));
                }
            }
        }
        worst
    }

    fn compute_bi_invariance_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let e = DMatrix::<f64>::identity(self.dim, self.dim);
        for z in 0..self.dim {
            for x in 0..self.dim {
                let zx = (&self.ad[z] * e.column(x)).clone_owned();
                for y in 0..self.dim {
                    let zy = (&self.ad[z] * e.column(y)).clone_owned();
                    let r = self.q_inner(&zx, &e.column(y).clone_owned())
                        + self.q_inner(&e.column(x).clone_owned(), &zy);
                    worst = worst.max(r.abs());
                }
            }
        }
        worst
    }

    /// Whether the stored Gram matrix is already the identity.
    pub fn has_orthonormal_gram(&self) -> bool {
        let id = DMatrix::<f64>::identity(self.dim, self.dim);
        (&self.gram - id).amax() <= 1e-14
    }

    /// Re-express the algebra in a Q-orthonormal basis.
    ///
    /// Returns the new algebra (gram = identity) and the change-of-basis
    /// matrix `T` whose columns are the new basis vectors in old coordinates
    /// (`x_old = T x_new`).
    pub fn to_orthonormal(&self) -> Result<(Self, DMatrix<f64>)> {
        if self.has_orthonormal_gram() {
            return Ok((self.clone(), DMatrix::identity(self.dim, self.dim)));
        }
        let chol = self
            .gram
            .clone()
            .cholesky()
            .ok_or(CheegerError::NotPositiveDefinite { context: "gram matrix".into() })?;
        let l = chol.l();
        let t = l
            .transpose()
            .try_inverse()
            .ok_or(CheegerError::NotPositiveDefinite { context: "gram factor".into() })?;
        let t_inv = l.transpose();
        let mut ad = Vec::with_capacity(self.dim);
        for a in 0..self.dim {
            let mut ad_a = DMatrix::zeros(self.dim, self.dim);
            for i in 0..self.dim {
                if t[(i, a)] != 0.0 {
                    ad_a += &self.ad[i] * t[(i, a)];
                }
            }
            ad.push(&t_inv * ad_a * &t);
        }
        let mut alg = Self {
            dim: self.dim,
            ad,
            gram: DMatrix::identity(self.dim, self.dim),
            jacobi_residual: 0.0,
            bi_invariance_residual: 0.0,
        };
        alg.jacobi_residual = alg.compute_jacobi_residual();
        alg.bi_invariance_residual = alg.compute_bi_invariance_residual();
        Ok((alg, t))
    }
}

/// Max over basis triples of the bi-invariance defect `|Q([z,x],y) + Q(x,[z,y])|`.
pub fn check_bi_invariance(alg: &LieAlgebra) -> f64 {
    alg.bi_invariance_residual()
}

/// A linear subspace with a cached Q-orthonormal basis (columns).
#[derive(Debug, Clone)]
pub struct Subspace {
    basis: DMatrix<f64>,
}

impl Subspace {
    /// Q-orthonormalize a spanning set; rank-deficient input is rejected.
    pub fn span(alg: &LieAlgebra, spanning: &DMatrix<f64>) -> Result<Self> {
        if spanning.nrows() != alg.dim() {
            return Err(CheegerError::DimensionMismatch {
                expected: alg.dim(),
                got: spanning.nrows(),
            });
        }
        let basis = q_gram_schmidt(alg, spanning, 1e-12)?;
        if basis.ncols() != spanning.ncols() {
            return Err(CheegerError::InvalidChain(
                "spanning set is linearly dependent".into(),
            ));
        }
        Ok(Self { basis })
    }

    pub(crate) fn from_orthonormal(basis: DMatrix<f64>) -> Self {
        Self { basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Q-orthogonal projection of `v` onto the subspace.
    pub fn project(&self, alg: &LieAlgebra, v: &DVector<f64>) -> DVector<f64> {
        let coeffs = self.basis.transpose() * alg.gram() * v;
        &self.basis * coeffs
    }

    /// Q-orthogonal projector as a matrix.
    pub fn projector(&self, alg: &LieAlgebra) -> DMatrix<f64> {
        &self.basis * self.basis.transpose() * alg.gram()
    }

    pub fn contains(&self, alg: &LieAlgebra, v: &DVector<f64>, tol: f64) -> bool {
        let r = v - self.project(alg, v);
        alg.q_norm(&r) <= tol * alg.q_norm(v).max(1.0)
    }
}

/// Gram–Schmidt w.r.t. the algebra's Q, dropping nothing: returns an error-free
/// orthonormal set of the *independent* columns (pivot tolerance `tol`).
fn q_gram_schmidt(alg: &LieAlgebra, cols: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>> {
    let mut kept: Vec<DVector<f64>> = Vec::new();
    for c in cols.column_iter() {
        let mut v = c.clone_owned();
        for u in &kept {
            let coeff = alg.q_inner(u, &v);
            v -= u * coeff;
        }
        // one re-orthogonalization pass for numerical hygiene
        for u in &kept {
            let coeff = alg.q_inner(u, &v);
            v -= u * coeff;
        }
        let n = alg.q_norm(&v);
        if n > tol {
            kept.push(v / n);
        }
    }
    if kept.is_empty() {
        return Ok(DMatrix::zeros(alg.dim(), 0));
    }
    Ok(DMatrix::from_columns(&kept))
}

/// A nested chain `k_1 ⊂ … ⊂ k_n ⊂ g` with its Q-orthogonal block
/// decomposition `b_i = k_i ∩ k_{i-1}^⊥`, plus the outer block `g ∩ k_n^⊥`.
#[derive(Debug, Clone)]
pub struct SubalgebraChain {
    levels: Vec<Subspace>,
    /// Level blocks followed by the outer block (omitted when `k_n = g`).
    blocks: Vec<Subspace>,
    n_level_blocks: usize,
}

impl SubalgebraChain {
    pub fn levels(&self) -> &[Subspace] {
        &self.levels
    }

    /// All blocks, innermost first; the last entry is the outer block when
    /// the top level is proper.
    pub fn blocks(&self) -> &[Subspace] {
        &self.blocks
    }

    pub fn n_level_blocks(&self) -> usize {
        self.n_level_blocks
    }

    pub fn has_outer_block(&self) -> bool {
        self.blocks.len() > self.n_level_blocks
    }
}

/// Decompose a nested chain of subalgebras into Q-orthonormal blocks.
///
/// Each level must be bracket-closed and strictly contained in the next;
/// blocks are pairwise Q-orthogonal and together span `g`.
pub fn chain_blocks(alg: &LieAlgebra, level_spans: &[DMatrix<f64>]) -> Result<SubalgebraChain> {
    if level_spans.is_empty() {
        return Err(CheegerError::InvalidChain("chain has no levels".into()));
    }
    let tol = DEFAULT_TOL;
    let mut levels = Vec::with_capacity(level_spans.len());
    for (idx, span) in level_spans.iter().enumerate() {
        let sub = Subspace::span(alg, span)?;
        // bracket closure
        for i in 0..sub.dim() {
            for j in (i + 1)..sub.dim() {
                let x = sub.basis().column(i).clone_owned();
                let y = sub.basis().column(j).clone_owned();
                let b = alg.bracket(&x, &y)?;
                let r = &b - sub.project(alg, &b);
                if alg.q_norm(&r) > tol {
                    return Err(CheegerError::InvalidChain(format!(
                        "level {idx} is not a subalgebra (closure residual {:.3e})",
                        alg.q_norm(&r)
                    )));
                }
            }
        }
        levels.push(sub);
    }
    for w in levels.windows(2) {
        let (inner, outer) = (&w[0], &w[1]);
        if inner.dim() >= outer.dim() {
            return Err(CheegerError::InvalidChain("levels must be strictly nested".into()));
        }
        for c in inner.basis().column_iter() {
            if !outer.contains(alg, &c.clone_owned(), tol) {
                return Err(CheegerError::InvalidChain("levels are not nested".into()));
            }
        }
    }
    // peel blocks level by level, then the outer complement
    let mut accumulated: Vec<DVector<f64>> = Vec::new();
    let mut blocks = Vec::new();
    let orth_against = |acc: &[DVector<f64>], v: &DVector<f64>| -> DVector<f64> {
        let mut v = v.clone();
        for _ in 0..2 {
            for u in acc {
                let c = alg.q_inner(u, &v);
                v -= u * c;
            }
        }
        v
    };
    for level in &levels {
        let mut block_cols = Vec::new();
        for c in level.basis().column_iter() {
            let v = orth_against(&accumulated, &c.clone_owned());
            let n = alg.q_norm(&v);
            if n > 1e-12 {
                let v = v / n;
                accumulated.push(v.clone());
                block_cols.push(v);
            }
        }
        if block_cols.is_empty() {
            return Err(CheegerError::InvalidChain("empty chain block".into()));
        }
        blocks.push(Subspace::from_orthonormal(DMatrix::from_columns(&block_cols)));
    }
    let n_level_blocks = blocks.len();
    let mut outer_cols = Vec::new();
    for i in 0..alg.dim() {
        let e = DVector::from_fn(alg.dim(), |r, _| if r == i { 1.0 } else { 0.0 });
        let v = orth_against(&accumulated, &e);
        let n = alg.q_norm(&v);
        if n > 1e-9 {
            let v = v / n;
            accumulated.push(v.clone());
            outer_cols.push(v);
        }
    }
    if !outer_cols.is_empty() {
        blocks.push(Subspace::from_orthonormal(DMatrix::from_columns(&outer_cols)));
    }
    let total: usize = blocks.iter().map(|b| b.dim()).sum();
    debug_assert_eq!(total, alg.dim());
    Ok(SubalgebraChain { levels, blocks, n_level_blocks })
}

/// Symmetric positive operator `Φ` encoding a left-invariant metric
/// `⟨x, y⟩ = Q(Φx, y)`.
#[derive(Debug, Clone)]
pub struct MetricOperator {
    phi: DMatrix<f64>,
    eigenvalues: DVector<f64>,
    positive: bool,
    block_coeffs: Option<Vec<f64>>,
}

impl MetricOperator {
    pub fn new(alg: &LieAlgebra, phi: DMatrix<f64>) -> Result<Self> {
        if phi.nrows() != alg.dim() || phi.ncols() != alg.dim() {
            return Err(CheegerError::DimensionMismatch { expected: alg.dim(), got: phi.nrows() });
        }
        // Q-symmetry: G Φ = Φ^T G
        let defect = (alg.gram() * &phi - phi.transpose() * alg.gram()).amax();
        if defect > 1e-12 {
            return Err(CheegerError::InvalidAlgebra(format!(
                "metric operator is not Q-symmetric (defect {defect:.3e})"
            )));
        }
        // eigenvalues of the operator in a Q-orthonormal basis
        let (_, t) = alg.to_orthonormal()?;
        let t_inv = t.clone().try_inverse().expect("change of basis invertible");
        let sym = &t_inv * &phi * &t;
        let sym = (&sym + sym.transpose()) * 0.5;
        let eig = sym.symmetric_eigen();
        let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let positive = eigenvalues[0] > 0.0;
        Ok(Self {
            phi,
            eigenvalues: DVector::from_vec(eigenvalues),
            positive,
            block_coeffs: None,
        })
    }

    pub fn identity(alg: &LieAlgebra) -> Self {
        let n = alg.dim();
        Self {
            phi: DMatrix::identity(n, n),
            eigenvalues: DVector::from_element(n, 1.0),
            positive: true,
            block_coeffs: None,
        }
    }

    /// Block metric `Σ_i c_i Q|_{b_i}` on the chain blocks (`coeffs` aligned
    /// with [`SubalgebraChain::blocks`]).
    pub fn from_block_coeffs(
        alg: &LieAlgebra,
        chain: &SubalgebraChain,
        coeffs: &[f64],
    ) -> Result<Self> {
        if coeffs.len() != chain.blocks().len() {
            return Err(CheegerError::DimensionMismatch {
                expected: chain.blocks().len(),
                got: coeffs.len(),
            });
        }
        let mut phi = DMatrix::zeros(alg.dim(), alg.dim());
        for (block, &c) in chain.blocks().iter().zip(coeffs) {
            phi += block.projector(alg) * c;
        }
        let mut op = Self::new(alg, phi)?;
        op.block_coeffs = Some(coeffs.to_vec());
        Ok(op)
    }

    pub fn phi(&self) -> &DMatrix<f64> {
        &self.phi
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn block_coeffs(&self) -> Option<&[f64]> {
        self.block_coeffs.as_deref()
    }

    pub(crate) fn set_block_coeffs(&mut self, coeffs: Vec<f64>) {
        self.block_coeffs = Some(coeffs);
    }
}
