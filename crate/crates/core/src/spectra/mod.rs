//! Companion matrices, realification, odd-degree real roots, real eigenpairs
//! of odd-size real matrices, and eigenpairs of odd-size complex matrices
//! through singular combinations.

mod axis;
mod eigen;
mod poly;

pub use axis::{
    hessenberg, hessenberg_charpoly, real_odd_axis, real_odd_axis_charpoly, AxisMethod,
    AxisOptions, AxisReport, AXIS_RESIDUAL, SINGULAR_SIGMA,
};
pub use eigen::{
    complex_odd_eigen, singular_combination_search, SingularCombination, SpectralCertificate,
    EIGEN_RESIDUAL, SHIFT_NUDGE, WITNESS_PLANE, WITNESS_SIGMA,
};
pub use poly::{
    companion_matrix, companion_matrix_complex, odd_poly_real_root, realify, realify_i,
    PolynomialReal, RootReport,
};
