//! Dense small-matrix arithmetic shared by every other module.

mod complex;
mod decomp;
mod matrix;

pub use complex::{cdot, cnorm, Complex, ComplexMatrix};
pub use decomp::{
    determinant, jacobi_svd, null_vector, singular_values, smallest_singular_value, solve,
    solve_complex, JacobiSvd, PIVOT_FLOOR,
};
pub use matrix::{dot, norm, normalized, RealMatrix};
