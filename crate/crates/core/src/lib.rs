//! Matrix-free PageRank toolkit.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph_io`]: SNAP / Matrix Market loaders, the column-stochastic
//!   transition matrix and dataset statistics.
//! - [`operator`]: the matrix-free Google operator, generic sparse/dense
//!   operators and the vector kernels used by every solver.
//! - [`dense_small`]: SVD, Hessenberg eigensolver and QR for the small
//!   projected matrices.
//! - [`krylov`]: the pivoted Hessenberg process, Arnoldi (MGS) and Ritz pairs.
//! - [`solvers`]: power iteration (plain, linear and quadratic extrapolation)
//!   and the refined restarted Krylov PageRank drivers.
//! - [`diagnostics`]: decomposition checks, basis conditioning, the
//!   Arnoldi/Hessenberg QR relation and Ritz spectrum dumps.
//! - [`bench`]: parameter sweeps producing the iteration/mvp tables.

pub mod bench;
pub mod dense_small;
pub mod diagnostics;
pub mod error;
pub mod graph_io;
pub mod krylov;
pub mod operator;
pub mod solvers;

pub use error::{Error, Result};
