//! Series solver for a family of second-order elliptic problems on planar
//! domains, transplanted to the unit disk by a conformal map and solved as a
//! perturbation series in the strength of the non-harmonic coupling.

pub mod boundary;
pub mod canon;
pub mod conformal;
pub mod error;
pub mod field;
pub mod grid;
pub mod ops;
pub mod oracle;
pub mod solver;

pub use boundary::BoundaryFunction;
pub use canon::{canonical_params, AffineConjOp, CanonicalParams};
pub use conformal::ConformalMapSeries;
pub use error::{Error, Result};
pub use field::{
    analyze, conj_field, grid_values, inner_product, lp_norm, multiply, sample_field, synthesize,
    wirtinger_derivatives, DiskField,
};
pub use grid::{make_grid, GridRef, PolarGrid};
pub use ops::{poisson_extend, DiskOps, KernelId};
pub use oracle::{
    bruteforce_kernel, exact_solution, fd_compare, fd_solve, holder_boundary, opnorm_estimate,
    oracle_agreement, CartesianField, ExactSolutionSpec, KernelAgreement, SolutionFamily,
};
pub use solver::{
    iterate_step, residual_m, solve_series, SeriesReport, Solution, SolverConfig, StopReason,
    TermRecord,
};
