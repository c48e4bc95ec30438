//! Small dense and banded linear algebra used by the construction.

mod band;
mod bandcols;
mod dense;

pub use band::{BandCholesky, BandLu, BandMatrix};
pub use bandcols::{BandColumn, BandColumns};
pub use dense::{least_squares, LeastSquares, Lu, Matrix};
