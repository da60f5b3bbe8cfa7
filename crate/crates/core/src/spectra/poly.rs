use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{Complex, ComplexMatrix, RealMatrix};

/// Monic `X^n + α_{n-1} X^{n-1} + … + α_0`, stored as `α_0 … α_{n-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialReal {
    coeffs: Vec<f64>,
}

impl PolynomialReal {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Parameter(
                "a monic polynomial needs degree >= 1".into(),
            ));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Parameter(
                "polynomial coefficients must be finite".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(1.0, |acc, &c| acc * x + c)
    }

    /// `1 + Σ |α_i|`; every real root lies in `[-M, M]`.
    pub fn cauchy_bound(&self) -> f64 {
        1.0 + self.coeffs.iter().map(|c| c.abs()).sum::<f64>()
    }
}

/// Companion matrix: ones on the subdiagonal, last column `-α_0 … -α_{n-1}`.
pub fn companion_matrix(p: &PolynomialReal) -> RealMatrix {
    let n = p.degree();
    let mut m = RealMatrix::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for (i, &a) in p.coeffs().iter().enumerate() {
        m[(i, n - 1)] = -a;
    }
    m
}

/// Companion matrix of a monic complex polynomial given by `α_0 … α_{n-1}`.
pub fn companion_matrix_complex(coeffs: &[Complex]) -> Result<ComplexMatrix> {
    let n = coeffs.len();
    if n == 0 {
        return Err(Error::Parameter(
            "a monic polynomial needs degree >= 1".into(),
        ));
    }
    let mut m = ComplexMatrix::zeros(n);
    for i in 1..n {
        m[(i, i - 1)] = Complex::ONE;
    }
    for (i, &a) in coeffs.iter().enumerate() {
        m[(i, n - 1)] = -a;
    }
    Ok(m)
}

/// Real `2n x 2n` form: each entry `a + ib` becomes `[[a, -b], [b, a]]`.
pub fn realify(t: &ComplexMatrix) -> RealMatrix {
    let n = t.n();
    let mut m = RealMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let c = t[(i, j)];
            m[(2 * i, 2 * j)] = c.re;
            m[(2 * i, 2 * j + 1)] = -c.im;
            m[(2 * i + 1, 2 * j)] = c.im;
            m[(2 * i + 1, 2 * j + 1)] = c.re;
        }
    }
    m
}

/// `realify(i T)`.
pub fn realify_i(t: &ComplexMatrix) -> RealMatrix {
    realify(&t.scale(Complex::I))
}

/// Interleaves `(re, im)` pairs into a complex vector.
pub(crate) fn complexify(v: &[f64]) -> Vec<Complex> {
    v.chunks_exact(2)
        .map(|c| Complex::new(c[0], c[1]))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RootReport {
    pub root: f64,
    pub residual: f64,
    pub bracket_width: f64,
    pub bound: f64,
    pub bisections: usize,
}

/// Real root of an odd-degree monic polynomial by bisection on `[-M, M]`.
///
/// Stops once `|p(x)| <= tol` and the bracket is at most `1e-14 M` wide, or
/// when the bracket can no longer be halved in floating point.
pub fn odd_poly_real_root(p: &PolynomialReal, tol: f64) -> Result<RootReport> {
    if p.degree().is_multiple_of(2) {
        return Err(Error::Parameter(format!(
            "degree {} is even; a real root is not guaranteed",
            p.degree()
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Parameter(format!(
            "tolerance {tol} must be positive"
        )));
    }
    let bound = p.cauchy_bound();
    let (mut lo, mut hi) = (-bound, bound);
    // monic odd degree: p(-M) < 0 < p(M)
    let mut bisections = 0;
    let mut best = (f64::INFINITY, 0.0);
    loop {
        let mid = 0.5 * (lo + hi);
        let v = p.eval(mid);
        if v.abs() < best.0 {
            best = (v.abs(), mid);
        }
        if v == 0.0 || (v.abs() <= tol && hi - lo <= 1e-14 * bound) || mid <= lo || mid >= hi {
            break;
        }
        bisections += 1;
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(RootReport {
        root: best.1,
        residual: best.0,
        bracket_width: hi - lo,
        bound,
        bisections,
    })
}
