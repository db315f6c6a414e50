//! Dense and tridiagonal symmetric kernels used by the eigensolvers.

mod dense;
mod ldl;
mod tridiag;

pub use dense::{sym_eigen, SymEigen};
pub use ldl::SymLdl;
pub use tridiag::{sturm_count, tridiag_lowest, Tridiagonal};
