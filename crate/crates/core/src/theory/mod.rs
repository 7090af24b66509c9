//! Numerical checks of the information carried by unlabeled samples in
//! dense versus sparse regions, and blob confidence surfaces.

pub mod blob;
pub mod fisher;
pub mod quadrature;

pub use blob::{blob_surface, BlobConfig, GridSurface};
pub use fisher::{corollary_check, fisher_information, fisher_information_tol, CorollaryReport, Density1D, MixtureSpec, Region};
pub use quadrature::adaptive_simpson;
