//! Finite-difference discretizations and sparse eigenvalue solvers.
//!
//! Multi-dimensional operators are split into reflection-parity sectors.
//! Each sector is factored level by level (block LDLᵀ with Bunch–Kaufman
//! pivoting inside a level), which gives exact eigenvalue counts below a
//! shift and a direct solver for shift-invert Krylov–Schur. The spectrum is
//! sliced into windows whose eigenvalue count is known in advance.

mod grid;
mod krylov;
mod operator;
mod problem;
mod sector;
mod shooting;
mod solve;

pub use grid::{DomainMask, GridSpec, DEFAULT_NODE_CAP};
pub use operator::{
    build_dirichlet_nd, build_operator_1d, build_operator_nd, DiscreteOperator, OperatorOptions, PotentialDescriptor,
};
pub use shooting::power1d_spectrum;
pub use solve::{count_below, eigenvalues, eigenvalues_below, eigenvalues_with, EigenOptions};
pub use problem::{
    converge_problem, converge_spectrum, counting_function, ground_energy_1d, homotopy_to_dirichlet, BoxOptions,
    BoxPlan, ConvergeOptions, Problem,
};
