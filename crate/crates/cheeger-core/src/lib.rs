//! Cheeger deformations of non-negatively curved metrics under isometric
//! compact group actions.
//!
//! Given a manifold `(M, g)` with an isometric action of a compact Lie group
//! `G` carrying a bi-invariant metric `Q`, the Cheeger deformation `g_t` is
//! the metric submersed from `g + (1/t)Q` on `M × G`. This crate computes the
//! deformed unnormalized curvature of the moving plane
//! `span{C_t⁻¹V, C_t⁻¹W}` in closed form,
//!
//! ```text
//! κ_c(t) = g(R(V,W)W,V) + (t³/4)‖[P V_m, P W_m]‖²_Q + z(V,W,t),
//! ```
//!
//! locates and classifies zero-curvature planes on the Grassmannian, and
//! validates every formula against independent numerical oracles (a Koszul
//! construction for left-invariant metrics and a finite-difference coordinate
//! oracle).
//!
//! Two concrete geometries ship with the crate: a compact Lie group with a
//! left-invariant metric acted on by a subgroup, and `S² × S²` under the
//! diagonal rotation action.

pub mod algebra;
pub mod analysis;
mod descent;
pub mod engine;
pub mod error;
pub mod geometry;

pub use algebra::{LieAlgebra, MetricOperator, SubalgebraChain, Subspace};
pub use engine::{CurvatureBreakdown, DeformationParam, PlaneClass};
pub use error::{CheegerError, Result};
pub use geometry::{Backend, GeometryBackend, Point, PointFrame, SpherePoint};

/// Default absolute tolerance on Q-orthonormalized data.
pub const DEFAULT_TOL: f64 = 1e-10;
