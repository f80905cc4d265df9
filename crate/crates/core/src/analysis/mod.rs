//! Executable checks of the comparison, continuity and differentiability results for
//! eigenvalues as functions of the coefficients and the boundary condition.

mod chains;
mod frechet;
mod limits;
mod mollification;
mod surface;

pub use chains::{dirichlet_bracketing, verify_chain, BracketReport, BracketRow, ChainEntry, ChainKind, ChainReport, ChainViolation, Link};
pub use frechet::{default_direction, frechet, frechet_convergence, ConvergenceRow, Direction, DerivativeCheck, Target};
pub use limits::{jump_limits, predicted_limit, richardson, DivergenceCheck, LimitRow, LimitTable, PredictedLimit};
pub use mollification::{mollification_study, MollificationRow};
pub use surface::{bc_surface, surface_inversions, Inversion, SurfaceSample, SurfaceTable};
