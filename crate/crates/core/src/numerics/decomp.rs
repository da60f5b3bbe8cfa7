//! Elimination and Jacobi-rotation kernels for small dense matrices.

use super::complex::{Complex, ComplexMatrix};
use super::matrix::RealMatrix;
use crate::error::{Error, Result};

/// Pivots with magnitude at or below this are treated as exact zeros.
pub const PIVOT_FLOOR: f64 = 1e-300;

const JACOBI_EPS: f64 = 1e-15;
const JACOBI_MAX_SWEEPS: usize = 80;

/// In-place LU factorization with partial pivoting of a row-major `n x n` buffer.
/// Returns the row permutation, its parity, and whether some pivot vanished.
fn lu_in_place(a: &mut [f64], n: usize) -> (Vec<usize>, bool, bool) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut odd = false;
    let mut singular = false;
    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|i| (i, a[i * n + k].abs()))
            .fold(
                (k, -1.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        if pmax <= PIVOT_FLOOR {
            singular = true;
            continue;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
            odd = !odd;
        }
        let pivot = a[k * n + k];
        for i in k + 1..n {
            let f = a[i * n + k] / pivot;
            a[i * n + k] = f;
            if f != 0.0 {
                for j in k + 1..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
    }
    (perm, odd, singular)
}

/// Determinant by partial-pivot elimination. The sign comes from the
/// permutation parity.
pub fn determinant(m: &RealMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "determinant of {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let mut a = m.as_slice().to_vec();
    let (_, odd, singular) = lu_in_place(&mut a, n);
    if singular {
        return Ok(0.0);
    }
    let prod: f64 = (0..n).map(|i| a[i * n + i]).product();
    Ok(if odd { -prod } else { prod })
}

/// Solves `m x = b`. Fails on an exactly singular pivot.
pub fn solve(m: &RealMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if !m.is_square() || b.len() != m.rows() {
        return Err(Error::Dimension(
            "solve needs a square matrix and matching right-hand side".into(),
        ));
    }
    let n = m.rows();
    let mut a = m.as_slice().to_vec();
    let (perm, _, singular) = lu_in_place(&mut a, n);
    if singular {
        return Err(Error::Parameter("singular system".into()));
    }
    let mut x: Vec<f64> = perm.iter().map(|&p| b[p]).collect();
    for i in 0..n {
        for j in 0..i {
            x[i] -= a[i * n + j] * x[j];
        }
    }
    for i in (0..n).rev() {
        for j in i + 1..n {
            x[i] -= a[i * n + j] * x[j];
        }
        x[i] /= a[i * n + i];
    }
    Ok(x)
}

/// Solves `m x = b` over the complex numbers. A vanishing pivot is replaced by a
/// machine-epsilon sized one so shifted inverse iteration keeps going.
pub fn solve_complex(m: &ComplexMatrix, b: &[Complex]) -> Result<Vec<Complex>> {
    let n = m.n();
    if b.len() != n {
        return Err(Error::Dimension("right-hand side length mismatch".into()));
    }
    let mut a = m.as_slice().to_vec();
    let mut x = b.to_vec();
    let scale = a.iter().map(|c| c.abs()).fold(0.0, f64::max).max(1.0);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
            .unwrap_or(k);
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            x.swap(k, p);
        }
        if a[k * n + k].abs() <= PIVOT_FLOOR {
            a[k * n + k] = Complex::new(f64::EPSILON * scale, 0.0);
        }
        let pivot = a[k * n + k];
        for i in k + 1..n {
            let f = a[i * n + k] / pivot;
            if f == Complex::ZERO {
                continue;
            }
            for j in k + 1..n {
                a[i * n + j] = a[i * n + j] - f * a[k * n + j];
            }
            x[i] = x[i] - f * x[k];
        }
    }
    for i in (0..n).rev() {
        let mut acc = x[i];
        for j in i + 1..n {
            acc = acc - a[i * n + j] * x[j];
        }
        x[i] = acc / a[i * n + i];
    }
    Ok(x)
}

/// Singular values (descending) together with the right singular vectors,
/// stored as `vectors[k]` for `values[k]`.
#[derive(Clone, Debug)]
pub struct JacobiSvd {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// One-sided (Hestenes) Jacobi SVD of a square or tall matrix.
pub fn jacobi_svd(m: &RealMatrix) -> Result<JacobiSvd> {
    if m.rows() < m.cols() || m.cols() == 0 {
        return Err(Error::Dimension(format!(
            "SVD of {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.cols();
    // cols[j] is column j of the working matrix, v[j] column j of V.
    let mut cols: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..m.rows()).map(|i| m[(i, j)]).collect())
        .collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = cols[p]
                    .iter()
                    .zip(&cols[q])
                    .fold((0.0, 0.0, 0.0), |(a, b, g), (&x, &y)| {
                        (a + x * x, b + y * y, g + x * y)
                    });
                if gamma == 0.0 || gamma.abs() <= JACOBI_EPS * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<(f64, usize)> = cols
        .iter()
        .enumerate()
        .map(|(j, c)| (c.iter().map(|x| x * x).sum::<f64>().sqrt(), j))
        .collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    Ok(JacobiSvd {
        values: order.iter().map(|&(s, _)| s).collect(),
        vectors: order.iter().map(|&(_, j)| v[j].clone()).collect(),
    })
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    let (cp, cq) = (&mut left[p], &mut right[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

pub fn singular_values(m: &RealMatrix) -> Result<Vec<f64>> {
    Ok(jacobi_svd(m)?.values)
}

pub fn smallest_singular_value(m: &RealMatrix) -> Result<f64> {
    Ok(*jacobi_svd(m)?.values.last().expect("non-empty matrix"))
}

/// Unit vector spanning the numerical kernel. Requires `sigma_min <= tol`.
pub fn null_vector(m: &RealMatrix, tol: f64) -> Result<Vec<f64>> {
    let svd = jacobi_svd(m)?;
    let sigma_min = *svd.values.last().expect("non-empty matrix");
    if sigma_min > tol {
        return Err(Error::NoNullVector { sigma_min, tol });
    }
    Ok(svd.vectors.last().expect("non-empty matrix").clone())
}
