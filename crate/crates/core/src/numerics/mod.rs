//! Dense linear algebra, root finding, finite differences and quadrature.

mod diff;
mod lu;
mod matrix;
mod qr;
mod quad;
mod root;
mod search;

pub use diff::{central_weights, fornberg_weights, CentralStencil};
pub use lu::{lu_solve, DenseSystem, LuFactor, LuSolution};
pub use matrix::Matrix;
pub use qr::{least_squares, LeastSquares};
pub use quad::{gauss_legendre, integrate, integrate_composite};
pub use root::{newton_root, ExpGapTransform, Identity, RootOptions, RootReport, Transform};
pub use search::{golden_section_max, golden_section_min};
