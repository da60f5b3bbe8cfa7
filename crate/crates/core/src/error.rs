use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error(
        "matrix has no null vector at tolerance {tol:e} (smallest singular value {sigma_min:e})"
    )]
    NoNullVector { sigma_min: f64, tol: f64 },

    #[error("map is not sphere-valued at {point:?} (norm {norm:e} before normalization)")]
    DegenerateMap { point: Vec<f64>, norm: f64 },

    #[error("map undersampled: consecutive angular jump {jump:.4} rad at {samples} samples")]
    Undersampled { jump: f64, samples: usize },

    #[error("degree did not converge: raw {raw:.6}, residual {residual:.4} at mesh level {level}")]
    NonConvergentDegree { raw: f64, residual: f64, level: u32 },

    #[error("irregular value: Jacobian determinant {det:e} at preimage {point:?}")]
    IrregularValue { point: Vec<f64>, det: f64 },

    #[error("singular-combination search failed: best sigma_min {sigma_min:e} at {witness:?}")]
    SearchFailure { witness: Vec<f64>, sigma_min: f64 },

    #[error("{0}")]
    Input(String),
}
