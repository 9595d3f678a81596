//! Dense kernels for the small projected matrices of a Krylov cycle.

mod eig;
mod matrix;
mod qr;
mod svd;

pub use eig::{hessenberg_eig, EigenPair};
pub use matrix::DenseMatrix;
pub use qr::qr_reduced;
pub use svd::{smallest_singular_triplet, svd, SingularTriplet, Svd};
