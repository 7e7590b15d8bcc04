//! Boundary-element engine for the two-dimensional Laplace equation.
//!
//! Direct Green's-identity formulation: piecewise-constant traces and fluxes
//! on straight panels, collocation at panel midpoints, closed-form panel
//! integrals of the logarithmic kernel and its normal derivative. One extra
//! unknown constant together with the global flux-balance constraint removes
//! the degenerate-scale null space of the two-dimensional single layer.

mod field;
mod kernels;
mod mesh;
mod solve;

pub use field::{PointValue, PotentialField};
pub use kernels::{gauss_legendre_16, panel_integrals, PanelIntegrals};
pub use mesh::{BoundaryMesh, Contour, ContourRole, MeshParams, Panel, MAX_PANELS_PER_CONTOUR};
pub use solve::{solve_bvp, BCSpec, BvpOperator, ConditionKind, ContourCondition};
pub(crate) use solve::{influence_matrices, PIVOT_RATIO};
