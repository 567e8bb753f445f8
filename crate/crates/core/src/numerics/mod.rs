//! Self-contained numerical kernels used by the reservoir, channel and
//! separability code.

pub mod eigen;
pub mod quadrature;
pub mod root;

pub use eigen::{min_eigenvalue_hermitian4, HermitianMatrix4};
pub use quadrature::{
    cumulative_adaptive, cumulative_simpson, cumulative_trapezoid, integrate_adaptive,
    integrate_oscillatory, integrate_semi_infinite, QuadratureResult, DEFAULT_ABS_TOL,
    DEFAULT_REL_TOL,
};
pub use root::{bisect, find_root_bracketed, Bracket};
