//! Bound states of the 1+1 dimensional Dirac equation with complex scalar,
//! pseudoscalar and vector couplings.

// links the system BLAS/LAPACK used by the dense eigensolver
extern crate openblas_src;

pub mod closedform;
pub mod couplings;
pub mod error;
mod fd;
pub mod grid;
pub mod mapping;
pub mod oracle;
pub mod quad;
pub mod specfun;
pub mod spectrum;

pub use error::{Error, Result};
pub use grid::GridSpec;
