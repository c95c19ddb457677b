//! Scenario configuration: a single JSON document selecting the backend, the
//! task and its parameters. Reports embed the fully resolved scenario so that
//! every number in them is traceable.

use cheeger_core::algebra::{AlgebraSpec, LieAlgebra, MetricOperator};
use cheeger_core::engine::chain_metric;
use cheeger_core::geometry::{Backend, GroupBackend, Point, SphereBackend};
use cheeger_core::{CheegerError, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Sweep,
    Zeros,
    Scan,
    Verify,
    Census,
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Task::Sweep => "sweep",
            Task::Zeros => "zeros",
            Task::Scan => "scan",
            Task::Verify => "verify",
            Task::Census => "census",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraRef {
    Name(String),
    Spec(AlgebraSpec),
}

impl AlgebraRef {
    pub fn build(&self) -> Result<LieAlgebra> {
        match self {
            AlgebraRef::Name(name) => LieAlgebra::builtin(name),
            AlgebraRef::Spec(spec) => LieAlgebra::from_spec(spec),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MetricSpec {
    #[default]
    Identity,
    /// Explicit symmetric operator matrix.
    Phi { phi: Vec<Vec<f64>> },
    /// Iterated chain metric from nested levels and deformation parameters.
    Chain { levels: Vec<Vec<Vec<f64>>>, ts: Vec<f64> },
    /// One-step metric `sQ|_k + Q|_m` for the configured subalgebra.
    Scale { s: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BackendSpec {
    Group {
        algebra: AlgebraRef,
        /// Spanning vectors of the acting subalgebra; omitted means all of `g`.
        #[serde(default)]
        subalgebra: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        metric: MetricSpec,
    },
    Sphere {
        /// Points of `S² × S²`, six reals each.
        points: Vec<[f64; 6]>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::List(v) => v.clone(),
            Grid::Range { start, stop, count } => {
                let n = (*count).max(2);
                (0..n)
                    .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneSpec {
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    #[serde(default)]
    pub id: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchSpec {
    pub multistarts: usize,
    pub descent_tol: f64,
    pub dedup_angle: f64,
    pub zero_threshold: f64,
    pub max_iter: usize,
}

impl Default for SearchSpec {
    fn default() -> Self {
        let d = cheeger_core::analysis::SearchConfig::default();
        Self {
            multistarts: d.multistarts,
            descent_tol: d.descent_tol,
            dedup_angle: d.dedup_angle,
            zero_threshold: d.zero_threshold,
            max_iter: d.max_iter,
        }
    }
}

impl SearchSpec {
    pub fn to_config(&self, seed: u64) -> cheeger_core::analysis::SearchConfig {
        cheeger_core::analysis::SearchConfig {
            multistarts: self.multistarts,
            descent_tol: self.descent_tol,
            dedup_angle: self.dedup_angle,
            zero_threshold: self.zero_threshold,
            seed,
            max_iter: self.max_iter,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CensusSpec {
    pub resolution: usize,
    /// Sublevel gate for grid clustering; clusters must still refine to the
    /// zero threshold to be counted.
    pub sublevel: f64,
    /// Confirm each component representative with the coordinate oracle.
    pub confirm_fd: bool,
}

impl Default for CensusSpec {
    fn default() -> Self {
        Self { resolution: 24, sublevel: 5e-2, confirm_fd: true }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSpec {
    pub samples: usize,
    /// Bracket the first negative scale within `[lo, hi]` to width `width`.
    pub frontier: Option<FrontierSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontierSpec {
    pub lo: f64,
    pub hi: f64,
    pub width: f64,
}

impl Default for ScanSpec {
    fn default() -> Self {
        Self { samples: 10_000, frontier: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySpec {
    /// Check names; empty runs the full suite.
    pub checks: Vec<String>,
    pub milnor_cases: usize,
    pub gs_cases: usize,
    pub z_cases: usize,
    pub sphere_cases: usize,
    /// Debug hook: evaluate the one-step closed form with the final term sign
    /// flipped, which must fail the bi-invariant-limit check.
    pub flip_gs_sign: bool,
}

impl Default for VerifySpec {
    fn default() -> Self {
        Self {
            checks: Vec::new(),
            milnor_cases: 200,
            gs_cases: 200,
            z_cases: 50,
            sphere_cases: 20,
            flip_gs_sign: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub task: Task,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub backend: Option<BackendSpec>,
    #[serde(default)]
    pub planes: Vec<PlaneSpec>,
    #[serde(default)]
    pub t_grid: Option<Grid>,
    #[serde(default)]
    pub s_grid: Option<Grid>,
    #[serde(default)]
    pub search: SearchSpec,
    #[serde(default)]
    pub census: CensusSpec,
    #[serde(default)]
    pub scan: ScanSpec,
    #[serde(default)]
    pub verify: VerifySpec,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let sc: Scenario = serde_json::from_str(text)
            .map_err(|e| CheegerError::InvalidConfig(format!("scenario schema: {e}")))?;
        sc.validate()?;
        Ok(sc)
    }

    fn validate(&self) -> Result<()> {
        match self.task {
            Task::Sweep => {
                if self.backend.is_none() {
                    return Err(CheegerError::InvalidConfig("sweep needs a backend".into()));
                }
                if self.planes.is_empty() {
                    return Err(CheegerError::InvalidConfig("sweep needs planes".into()));
                }
                if self.t_grid.is_none() {
                    return Err(CheegerError::InvalidConfig("sweep needs a t_grid".into()));
                }
            }
            Task::Zeros | Task::Census => {
                if self.backend.is_none() {
                    return Err(CheegerError::InvalidConfig(format!(
                        "{} needs a backend",
                        self.task
                    )));
                }
                if self.t_grid.is_none() {
                    return Err(CheegerError::InvalidConfig(format!(
                        "{} needs a t_grid",
                        self.task
                    )));
                }
            }
            Task::Scan => {
                match &self.backend {
                    Some(BackendSpec::Group { subalgebra: Some(_), .. }) => {}
                    _ => {
                        return Err(CheegerError::InvalidConfig(
                            "scan needs a group backend with an explicit subalgebra".into(),
                        ))
                    }
                }
                if self.s_grid.is_none() && self.scan.frontier.is_none() {
                    return Err(CheegerError::InvalidConfig(
                        "scan needs an s_grid or a frontier window".into(),
                    ));
                }
            }
            Task::Verify => {}
        }
        Ok(())
    }

    /// Build the geometry backend plus the list of evaluation points.
    pub fn build_backend(&self) -> Result<(Backend, Vec<Point>)> {
        let spec = self
            .backend
            .as_ref()
            .ok_or_else(|| CheegerError::InvalidConfig("missing backend".into()))?;
        match spec {
            BackendSpec::Group { algebra, subalgebra, metric } => {
                let alg = algebra.build()?;
                let n = alg.dim();
                let k_span = match subalgebra {
                    Some(cols) => columns_matrix(n, cols)?,
                    None => DMatrix::identity(n, n),
                };
                let op = build_metric(&alg, &k_span, metric)?;
                let backend = GroupBackend::new(&alg, &k_span, &op)?;
                Ok((Backend::Group(backend), vec![Point::Group]))
            }
            BackendSpec::Sphere { points } => {
                if points.is_empty() {
                    return Err(CheegerError::InvalidConfig("sphere backend needs points".into()));
                }
                let pts = points
                    .iter()
                    .map(|c| Point::sphere([c[0], c[1], c[2]], [c[3], c[4], c[5]]))
                    .collect::<Result<Vec<_>>>()?;
                Ok((Backend::Sphere(SphereBackend::new()), pts))
            }
        }
    }
}

pub fn build_metric(
    alg: &LieAlgebra,
    k_span: &DMatrix<f64>,
    spec: &MetricSpec,
) -> Result<MetricOperator> {
    match spec {
        MetricSpec::Identity => Ok(MetricOperator::identity(alg)),
        MetricSpec::Phi { phi } => {
            let m = rows_matrix(alg.dim(), phi)?;
            MetricOperator::new(alg, m)
        }
        MetricSpec::Chain { levels, ts } => {
            let spans = levels
                .iter()
                .map(|l| columns_matrix(alg.dim(), l))
                .collect::<Result<Vec<_>>>()?;
            let chain = cheeger_core::algebra::chain_blocks(alg, &spans)?;
            chain_metric(alg, &chain, ts)
        }
        MetricSpec::Scale { s } => {
            if *s <= 0.0 {
                return Err(CheegerError::InvalidConfig("metric scale must be positive".into()));
            }
            let k = cheeger_core::algebra::Subspace::span(alg, k_span)?;
            let proj = k.projector(alg);
            let phi = DMatrix::identity(alg.dim(), alg.dim()) + proj * (*s - 1.0);
            MetricOperator::new(alg, phi)
        }
    }
}

pub fn columns_matrix(dim: usize, cols: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    if cols.is_empty() {
        return Err(CheegerError::InvalidConfig("empty vector list".into()));
    }
    let vecs = cols
        .iter()
        .map(|c| {
            if c.len() != dim {
                Err(CheegerError::DimensionMismatch { expected: dim, got: c.len() })
            } else {
                Ok(DVector::from_column_slice(c))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_columns(&vecs))
}

pub fn rows_matrix(dim: usize, rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(CheegerError::DimensionMismatch {
            expected: dim,
            got: rows.first().map(|r| r.len()).unwrap_or(0),
        });
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| rows[i][j]))
}
