//! Overlapping-aware stencil planning for multi-column-cell e-beam systems.
//!
//! The crate is organized around a shared domain model (`model`), a
//! self-contained LP/MILP engine with formulation builders (`lp`), the
//! successive-rounding 1D planner (`onedim`), the clustering + simulated
//! annealing 2D planner (`twodim`), and executable hardness-reduction
//! constructions (`reductions`).

pub mod error;
pub mod lp;
pub mod model;
pub mod onedim;
pub mod reductions;
pub mod twodim;

pub use error::Error;
pub use model::{
    CharId, CharacterCandidate, Instance, Placement, Position, SolutionReport, StencilMode,
    StencilSpec,
};
