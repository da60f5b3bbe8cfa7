use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::poly::{odd_poly_real_root, PolynomialReal};
use crate::error::{Error, Result};
use crate::numerics::{dot, jacobi_svd, norm, solve_complex, ComplexMatrix, RealMatrix};

/// Below this smallest singular value the matrix is treated as singular.
pub const SINGULAR_SIGMA: f64 = 1e-12;

/// Largest accepted `‖Tv - λv‖`.
pub const AXIS_RESIDUAL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxisMethod {
    /// `T` is singular; the axis is a null vector.
    NullVector,
    /// Maximized `|⟨Tx/‖Tx‖, x⟩|`, then Rayleigh-quotient iteration.
    VectorField,
    /// Real root of the characteristic polynomial, then inverse iteration.
    CharPolyFallback,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxisReport {
    pub eigenvalue: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    /// `|⟨Tv, v⟩| / ‖Tv‖`; 1 on an eigenvector with nonzero eigenvalue.
    pub alignment: f64,
    pub method: AxisMethod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AxisOptions {
    pub starts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for AxisOptions {
    fn default() -> Self {
        Self {
            starts: 32,
            iterations: 400,
            seed: 0,
        }
    }
}

fn residual(t: &RealMatrix, v: &[f64], lambda: f64) -> f64 {
    let tv = t.mul_vec(v).expect("square");
    tv.iter()
        .zip(v)
        .map(|(a, b)| (a - lambda * b).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn alignment(t: &RealMatrix, v: &[f64]) -> f64 {
    let tv = t.mul_vec(v).expect("square");
    let n = norm(&tv);
    if n == 0.0 {
        1.0
    } else {
        dot(&tv, v).abs() / n
    }
}

fn unit(v: Vec<f64>) -> Option<Vec<f64>> {
    let n = norm(&v);
    (n > 0.0 && n.is_finite()).then(|| v.into_iter().map(|x| x / n).collect())
}

/// Solves `(T - shift I) y = x`, nudging exactly singular pivots.
fn shifted_solve(t: &RealMatrix, shift: f64, x: &[f64]) -> Option<Vec<f64>> {
    let n = t.rows();
    let mut m = t.clone();
    for i in 0..n {
        m[(i, i)] -= shift;
    }
    let c = ComplexMatrix::from_real(&m).ok()?;
    let rhs: Vec<_> = x
        .iter()
        .map(|&r| crate::numerics::Complex::new(r, 0.0))
        .collect();
    let y = solve_complex(&c, &rhs).ok()?;
    unit(y.into_iter().map(|z| z.re).collect())
}

/// `φ(x) = ⟨Tx, x⟩² / ‖Tx‖²` and its gradient.
fn objective(t: &RealMatrix, tt: &RealMatrix, x: &[f64]) -> (f64, Vec<f64>) {
    let y = t.mul_vec(x).expect("square");
    let a = dot(&y, x);
    let b = dot(&y, &y);
    let ty = tt.mul_vec(&y).expect("square");
    let tx = tt.mul_vec(x).expect("square");
    // ∇a = (T + Tᵀ) x, ∇b = 2 Tᵀ T x
    let grad = (0..x.len())
        .map(|i| (2.0 * a * (y[i] + tx[i]) * b - a * a * 2.0 * ty[i]) / (b * b))
        .collect();
    (a * a / b, grad)
}

/// Projected gradient ascent of `φ` on the unit sphere with an adaptive step.
fn ascend(t: &RealMatrix, tt: &RealMatrix, x0: Vec<f64>, iterations: usize) -> (Vec<f64>, f64) {
    let mut x = x0;
    let (mut phi, mut grad) = objective(t, tt, &x);
    let mut step = 0.5;
    for _ in 0..iterations {
        if 1.0 - phi < 1e-20 || step < 1e-16 {
            break;
        }
        let radial = dot(&grad, &x);
        let g: Vec<f64> = grad
            .iter()
            .zip(&x)
            .map(|(gi, xi)| gi - radial * xi)
            .collect();
        let candidate = match unit(x.iter().zip(&g).map(|(xi, gi)| xi + step * gi).collect()) {
            Some(c) => c,
            None => break,
        };
        let (phi_c, grad_c) = objective(t, tt, &candidate);
        if phi_c > phi {
            x = candidate;
            phi = phi_c;
            grad = grad_c;
            step *= 1.5;
        } else {
            step *= 0.5;
        }
    }
    (x, phi)
}

/// Rayleigh-quotient iteration; returns the best `(λ, v, residual)` seen.
fn rayleigh(t: &RealMatrix, x0: Vec<f64>) -> (f64, Vec<f64>, f64) {
    let scale = t.frobenius_norm().max(1.0);
    let mut x = x0;
    let mut lambda = dot(&t.mul_vec(&x).expect("square"), &x);
    let mut best = (lambda, x.clone(), residual(t, &x, lambda));
    for _ in 0..30 {
        if best.2 <= 1e-15 * scale {
            break;
        }
        let Some(y) = shifted_solve(t, lambda, &x) else {
            break;
        };
        x = y;
        lambda = dot(&t.mul_vec(&x).expect("square"), &x);
        let r = residual(t, &x, lambda);
        if r < best.2 {
            best = (lambda, x.clone(), r);
        }
    }
    best
}

fn check_odd_square(t: &RealMatrix) -> Result<()> {
    if !t.is_square() {
        return Err(Error::Dimension(format!(
            "{}x{} matrix is not square",
            t.rows(),
            t.cols()
        )));
    }
    if t.rows().is_multiple_of(2) {
        return Err(Error::Parameter(format!(
            "size {} is even; only odd sizes are guaranteed a real axis",
            t.rows()
        )));
    }
    Ok(())
}

/// A real eigenpair of an odd-size real matrix.
pub fn real_odd_axis(t: &RealMatrix, opts: AxisOptions) -> Result<AxisReport> {
    check_odd_square(t)?;
    let n = t.rows();
    let svd = jacobi_svd(t)?;
    if *svd.values.last().expect("non-empty") < SINGULAR_SIGMA {
        let v = svd.vectors.last().expect("non-empty").clone();
        let r = residual(t, &v, 0.0);
        return Ok(AxisReport {
            eigenvalue: 0.0,
            alignment: alignment(t, &v),
            vector: v,
            residual: r,
            method: AxisMethod::NullVector,
        });
    }
    let tt = t.transpose();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let starts: Vec<Vec<f64>> = (0..opts.starts)
        .filter_map(|_| unit((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()))
        .collect();
    let mut ascents: Vec<(usize, Vec<f64>, f64)> = starts
        .into_par_iter()
        .enumerate()
        .map(|(k, x0)| {
            let (x, phi) = ascend(t, &tt, x0, opts.iterations);
            (k, x, phi)
        })
        .collect();
    // converged starts in index order, then the rest by objective
    let converged = |phi: f64| 1.0 - phi <= 1e-8;
    ascents.sort_by(|a, b| {
        converged(b.2).cmp(&converged(a.2)).then_with(|| {
            if converged(a.2) {
                a.0.cmp(&b.0)
            } else {
                b.2.total_cmp(&a.2).then(a.0.cmp(&b.0))
            }
        })
    });
    for (_, x, _) in ascents {
        let (lambda, v, r) = rayleigh(t, x);
        if r <= AXIS_RESIDUAL {
            let a = alignment(t, &v);
            return Ok(AxisReport {
                eigenvalue: lambda,
                vector: v,
                residual: r,
                alignment: a,
                method: AxisMethod::VectorField,
            });
        }
    }
    log::info!("vector-field search stalled; falling back to the characteristic polynomial");
    real_odd_axis_charpoly(t)
}

/// Householder reduction to upper Hessenberg form (similar to `t`).
pub fn hessenberg(t: &RealMatrix) -> RealMatrix {
    let n = t.rows();
    let mut h = t.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<f64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let alpha = -x[0].signum() * norm(&x);
        if alpha == 0.0 {
            continue;
        }
        let mut v = x;
        v[0] -= alpha;
        let Some(v) = unit(v) else { continue };
        // H <- P H P with P = I - 2 v vᵀ acting on rows/cols k+1..n
        for j in 0..n {
            let s: f64 = (0..v.len()).map(|i| v[i] * h[(k + 1 + i, j)]).sum();
            for i in 0..v.len() {
                h[(k + 1 + i, j)] -= 2.0 * v[i] * s;
            }
        }
        for i in 0..n {
            let s: f64 = (0..v.len()).map(|j| h[(i, k + 1 + j)] * v[j]).sum();
            for j in 0..v.len() {
                h[(i, k + 1 + j)] -= 2.0 * s * v[j];
            }
        }
    }
    h
}

/// Coefficients of `det(λI - H)` (monic, low order first, leading 1 omitted)
/// for upper Hessenberg `H`, by the leading-minor recurrence.
pub fn hessenberg_charpoly(h: &RealMatrix) -> PolynomialReal {
    let n = h.rows();
    // p[k] holds det(λI - H_k) with all k + 1 coefficients, low order first
    let mut p: Vec<Vec<f64>> = vec![vec![1.0]];
    for k in 0..n {
        let prev = &p[k];
        let mut next = vec![0.0; k + 2];
        for (i, &c) in prev.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= h[(k, k)] * c;
        }
        let mut product = 1.0;
        for i in (0..k).rev() {
            product *= h[(i + 1, i)];
            let coef = h[(i, k)] * product;
            for (j, &c) in p[i].iter().enumerate() {
                next[j] -= coef * c;
            }
        }
        p.push(next);
    }
    let mut coeffs = p.pop().expect("n + 1 entries");
    coeffs.pop();
    PolynomialReal::new(coeffs).expect("finite Hessenberg entries")
}

/// Real eigenpair via a real root of the characteristic polynomial.
pub fn real_odd_axis_charpoly(t: &RealMatrix) -> Result<AxisReport> {
    check_odd_square(t)?;
    let poly = hessenberg_charpoly(&hessenberg(t));
    let scale = t.frobenius_norm().max(1.0);
    let root = odd_poly_real_root(&poly, 1e-14 * scale.powi(t.rows() as i32))?;
    let mut lambda = root.root;
    let svd = jacobi_svd(&{
        let mut m = t.clone();
        for i in 0..t.rows() {
            m[(i, i)] -= lambda;
        }
        m
    })?;
    let mut v = svd.vectors.last().expect("non-empty").clone();
    for _ in 0..3 {
        let Some(y) = shifted_solve(t, lambda + 1e-12 * scale, &v) else {
            break;
        };
        v = y;
        lambda = dot(&t.mul_vec(&v).expect("square"), &v);
    }
    let (lambda, v, r) = {
        let r = residual(t, &v, lambda);
        if r > AXIS_RESIDUAL {
            rayleigh(t, v)
        } else {
            (lambda, v, r)
        }
    };
    if r > AXIS_RESIDUAL {
        return Err(Error::SearchFailure {
            witness: v,
            sigma_min: r,
        });
    }
    Ok(AxisReport {
        eigenvalue: lambda,
        alignment: alignment(t, &v),
        vector: v,
        residual: r,
        method: AxisMethod::CharPolyFallback,
    })
}
