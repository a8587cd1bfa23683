//! Numerical toolkit for multi-marginal monotonicity with the classical cost
//! c(x₁, …, x_N) = Σ_{i<j} ⟨x_i, x_j⟩ on X = (ℝᵈ)ᴺ.
//!
//! - [`space`], [`gamma`], [`grid`]: points, relations Γ ⊆ X and lattices.
//! - [`monotone`]: c-monotonicity, cyclic checks, resolvents, maximality.
//! - [`convex`]: convex-function catalog, prox, envelopes, conjugates,
//!   c-conjugation and the splitting criteria.
//! - [`gallery`]: ready-made instances with their expected verdicts.

pub mod convex;
pub mod error;
pub mod gallery;
pub mod gamma;
pub mod grid;
pub mod linalg;
pub mod monotone;
pub mod report;
pub mod space;

pub use error::{Error, Result};
pub use gamma::{GammaBody, GammaSet, IndexSubset, Marginal};
pub use grid::Grid;
pub use report::{CheckReport, Mode, Verdict, Witness, DEFAULT_TOL};
pub use space::{cost_eval, delta_perp_project, half_sq, sum_map, MultiPoint, SpaceConfig};
