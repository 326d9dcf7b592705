//! Independent numerical solvers used to verify the closed forms.

pub mod arnoldi;
pub mod banded;
pub mod checks;
pub mod dense;
pub mod dirac;
pub mod shooting;

pub use checks::{quadrature_norm, residual_check, residual_profile, z_norm};
pub use dirac::{
    all_eigenvalues, dirac_eigenpairs, dirac_spectrum, DiracEigen, DiracOperator, DiracOptions,
    EigenStatus, Solver, Stencil, VectorPotential,
};
pub use shooting::{
    effective_eigenfunction, fixed_point_energy, shoot_all, shoot_effective, shoot_effective_with,
    FixedPoint, ShootOptions, ShootRoot,
};
