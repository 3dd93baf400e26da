//! Solver and a posteriori error estimators for one-dimensional
//! time-fractional diffusion.
//!
//! The library discretizes the Caputo-time, divergence-form-space model
//! problem with the L1 scheme on (possibly graded) time meshes and P1 finite
//! elements in space, then evaluates computable error estimators built from
//! linear and quadratic space-time reconstructions of the discrete solution:
//! residual-type spatial indicators, kernel-sum time estimators, assembled
//! global bounds in the L1(L2) and L2(L2) norms, and pointwise-in-time bounds
//! driven by the weakly singular kernel.
//!
//! The `tfdiff` binary reproduces the convergence-order experiment tables for
//! the built-in smooth/nonsmooth manufactured problems; see the crate README.

pub mod bounds;
pub mod coefficients;
pub mod config;
pub mod driver;
pub mod error;
pub mod estimators;
pub mod fem;
pub mod l1;
pub mod mesh;
pub mod problem;
pub mod quadrature;
pub mod reconstruct;
pub mod special;

pub use bounds::{final_bounds, GlobalBounds, PointwiseData};
pub use config::{ExampleId, GradingMode, OutputFormat, RunConfig};
pub use driver::{run_example, run_problem, sweep, TableRow};
pub use error::{Error, Result};
pub use estimators::Components;
pub use fem::{FemSpace, FemVec, Tridiag};
pub use l1::{march, L1Weights, Trajectory};
pub use mesh::{auto_grading, SpaceMesh, TimeMesh};
pub use problem::{Coefficient, ProblemSpec};
pub use reconstruct::ReconPack;
