//! Separated (tensor-decomposed) Galerkin solvers on convolution-enriched
//! 1D bases, with full-grid reference solvers for comparison.
//!
//! The numeric core is generic over [`Real`] (`f32`/`f64`); the aliases at
//! the crate root fix it to `f64`.

pub mod alloc;
pub mod basis;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod mesh;
pub mod operators;
pub mod oracles;
pub mod problem;
pub mod scalar;
pub mod separated;
pub mod solver;

pub use basis::{BasisKind, Hyperparams};
pub use error::{Error, Result};
pub use operators::{ConstraintSet, OperatorKind};
pub use scalar::Real;
pub use solver::{SolveMode, SolveTrace, SolverConfig};

pub type Mesh = mesh::Mesh1D<f64>;
pub type QuadRule = mesh::QuadRule<f64>;
pub type Basis = basis::Basis1D<f64>;
pub type BasisTable = basis::BasisTable<f64>;
pub type Hyper = basis::Hyperparams<f64>;
pub type Banded = operators::BandedMatrix<f64>;
pub type DimSpec = separated::DimSpec<f64>;
pub type Solution = separated::SeparatedSolution<f64>;
pub type Problem = problem::WeakProblem<f64>;
pub type Grid = grid::GridField<f64>;
