use serde::Serialize;

use super::poly::{complexify, realify, realify_i};
use crate::bundles::{min_rank_over_sphere, SpanFamily, SpanMinimum};
use crate::error::{Error, Result};
use crate::numerics::{cdot, cnorm, jacobi_svd, solve_complex, Complex, ComplexMatrix, RealMatrix};
use crate::sphere::SphereMesh;

/// Witnesses with `σ_min` above this are search failures.
pub const WITNESS_SIGMA: f64 = 1e-6;

/// Largest accepted `‖Tv - μv‖`.
pub const EIGEN_RESIDUAL: f64 = 1e-8;

/// `β² + γ²` must exceed this at the witness.
pub const WITNESS_PLANE: f64 = 1e-12;

/// Offset added to the shift in inverse iteration.
pub const SHIFT_NUDGE: f64 = 1e-12;

const POLISH_STEPS: usize = 2;
const EXTRA_POLISH_STEPS: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularCombination {
    #[serde(flatten)]
    pub minimum: SpanMinimum,
    /// The matrices were linearly dependent and the witness was read off
    /// directly without a sphere search.
    pub dependent: bool,
}

/// Coefficients `c` with `Σ c_i A_i = 0` exactly, for two members equal up
/// to sign.
fn exact_dependency(ms: &[RealMatrix]) -> Option<Vec<f64>> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..ms.len() {
        for j in i + 1..ms.len() {
            let sign = if ms[i] == ms[j] {
                -1.0
            } else if ms[i] == ms[j].scale(-1.0) {
                1.0
            } else {
                continue;
            };
            let mut c = vec![0.0; ms.len()];
            c[i] = h;
            c[j] = sign * h;
            return Some(c);
        }
    }
    None
}

/// Kernel vector of the `q² x r` matrix whose columns are the flattened
/// members, when its smallest singular value is negligible.
fn span_dependency(ms: &[RealMatrix]) -> Option<Vec<f64>> {
    let (q, r) = (ms[0].rows(), ms.len());
    let data = (0..q * q)
        .flat_map(|k| ms.iter().map(move |m| m.as_slice()[k]))
        .collect();
    let svd = jacobi_svd(&RealMatrix::new(q * q, r, data).ok()?).ok()?;
    let smallest = *svd.values.last()?;
    (smallest <= 1e-13 * svd.values[0]).then(|| svd.vectors.last().expect("r >= 1").clone())
}

/// Minimizes `σ_min(s_1 A_1 + s_2 A_2 + s_3 A_3)` over S².
///
/// Linearly dependent triples are caught first: a coefficient vector in the
/// kernel of the Gram matrix is itself a singular combination.
pub fn singular_combination_search(
    a1: &RealMatrix,
    a2: &RealMatrix,
    a3: &RealMatrix,
    mesh: &SphereMesh,
) -> Result<SingularCombination> {
    let fam = SpanFamily::new(vec![a1.clone(), a2.clone(), a3.clone()])?;
    let direct = exact_dependency(fam.matrices()).or_else(|| span_dependency(fam.matrices()));
    if let Some(mut c) = direct {
        crate::bundles::canonical_sign(&mut c);
        let svd = jacobi_svd(&crate::bundles::span_morphism(&fam, &c)?)?;
        let sigma_max = svd.values[0];
        let sigma_min = *svd.values.last().expect("non-empty");
        if sigma_min <= WITNESS_SIGMA {
            let rank = svd
                .values
                .iter()
                .filter(|&&v| v > crate::bundles::RANK_THRESHOLD * sigma_max)
                .count();
            let minimum = SpanMinimum {
                q: fam.q(),
                point: c,
                sigma_min,
                sigma_max,
                rank,
                mesh_level: mesh.level(),
                rerun: false,
                warning: false,
            };
            return Ok(SingularCombination {
                minimum,
                dependent: true,
            });
        }
    }
    Ok(SingularCombination {
        minimum: min_rank_over_sphere(&fam, mesh)?,
        dependent: false,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralCertificate {
    pub n: usize,
    pub eigenvalue: Complex,
    pub eigenvector: Vec<Complex>,
    pub residual: f64,
    /// `(α, β, γ)` with `αI + β realify(T) + γ realify(iT)` singular.
    pub witness: [f64; 3],
    pub witness_sigma_min: f64,
    /// `ρ = -α / (β + iγ)` read off the witness, before polishing.
    pub witness_eigenvalue: Complex,
    pub mesh_level: u32,
    pub polish_steps: usize,
    pub method: &'static str,
}

fn complex_residual(t: &ComplexMatrix, v: &[Complex], mu: Complex) -> f64 {
    let tv = t.mul_vec(v).expect("square");
    cnorm(
        &tv.iter()
            .zip(v)
            .map(|(&a, &b)| a - mu * b)
            .collect::<Vec<_>>(),
    )
}

fn cunit(v: Vec<Complex>) -> Option<Vec<Complex>> {
    let n = cnorm(&v);
    (n > 0.0 && n.is_finite()).then(|| v.into_iter().map(|z| z.scale(1.0 / n)).collect())
}

/// Rotates `v` so its largest-magnitude entry is real and positive.
fn fix_phase(v: &mut [Complex]) {
    let k = (0..v.len()).fold(
        0,
        |best, i| if v[i].abs() > v[best].abs() { i } else { best },
    );
    let phase = v[k].conj().scale(1.0 / v[k].abs());
    v.iter_mut().for_each(|z| *z = *z * phase);
    v[k] = Complex::new(v[k].re, 0.0);
}

/// Eigenpair of an odd-size complex matrix, found through a singular
/// combination of `I`, `realify(T)` and `realify(iT)`.
pub fn complex_odd_eigen(t: &ComplexMatrix, mesh: &SphereMesh) -> Result<SpectralCertificate> {
    let n = t.n();
    if n.is_multiple_of(2) {
        return Err(Error::Parameter(format!(
            "size {n} is even; only odd sizes are covered"
        )));
    }
    let d = realify(t);
    let e = realify_i(t);
    let found = singular_combination_search(&RealMatrix::identity(2 * n), &d, &e, mesh)?.minimum;
    let [alpha, beta, gamma] = [found.point[0], found.point[1], found.point[2]];
    if found.sigma_min > WITNESS_SIGMA || beta * beta + gamma * gamma <= WITNESS_PLANE {
        return Err(Error::SearchFailure {
            witness: found.point,
            sigma_min: found.sigma_min,
        });
    }
    let rho = Complex::new(-alpha, 0.0) / Complex::new(beta, gamma);

    let shifted = realify(&t.shifted(rho));
    let svd = jacobi_svd(&shifted)?;
    let mut v = cunit(complexify(svd.vectors.last().expect("non-empty"))).ok_or_else(|| {
        Error::SearchFailure {
            witness: found.point.clone(),
            sigma_min: found.sigma_min,
        }
    })?;
    let mut mu = cdot(&v, &t.mul_vec(&v)?);
    let mut steps = 0;
    let mut r = complex_residual(t, &v, mu);
    while steps < POLISH_STEPS || (r > EIGEN_RESIDUAL && steps < POLISH_STEPS + EXTRA_POLISH_STEPS)
    {
        let shift = mu + Complex::new(SHIFT_NUDGE, 0.0);
        let Some(w) = cunit(solve_complex(&t.shifted(shift), &v)?) else {
            break;
        };
        v = w;
        mu = cdot(&v, &t.mul_vec(&v)?);
        r = complex_residual(t, &v, mu);
        steps += 1;
    }
    if r > EIGEN_RESIDUAL {
        return Err(Error::SearchFailure {
            witness: found.point,
            sigma_min: found.sigma_min,
        });
    }
    fix_phase(&mut v);
    let r = complex_residual(t, &v, mu);
    Ok(SpectralCertificate {
        n,
        eigenvalue: mu,
        eigenvector: v,
        residual: r,
        witness: [alpha, beta, gamma],
        witness_sigma_min: found.sigma_min,
        witness_eigenvalue: rho,
        mesh_level: found.mesh_level,
        polish_steps: steps,
        method: "singular-combination",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::companion_matrix_complex;
    use crate::sphere::icosphere;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn equal_members_give_exact_witness() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = RealMatrix::new(4, 4, (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let b = RealMatrix::new(4, 4, (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let out = singular_combination_search(&a, &a, &b, &icosphere(1).unwrap()).unwrap();
        assert!(out.dependent);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(out.minimum.point, vec![h, -h, 0.0]);
        assert_eq!(out.minimum.sigma_min, 0.0);
    }

    #[test]
    fn general_dependency_detected() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = RealMatrix::new(3, 3, (0..9).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let b = RealMatrix::new(3, 3, (0..9).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let c = a.axpy(0.5, &b).unwrap().scale(2.0);
        let out = singular_combination_search(&a, &b, &c, &icosphere(1).unwrap()).unwrap();
        assert!(out.dependent);
        assert!(out.minimum.sigma_min < 1e-12);
    }

    #[test]
    fn quaternion_control() {
        let q = SpanFamily::quaternion();
        let [a, b, c] = [&q.matrices()[0], &q.matrices()[1], &q.matrices()[2]];
        let out = singular_combination_search(a, b, c, &icosphere(3).unwrap()).unwrap();
        assert!(!out.dependent);
        assert!((out.minimum.sigma_min - 1.0).abs() < 1e-10);
    }

    #[test]
    fn identity_direction_is_never_singular() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = ComplexMatrix::new(
            3,
            (0..9)
                .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap();
        let fam =
            SpanFamily::new(vec![RealMatrix::identity(6), realify(&t), realify_i(&t)]).unwrap();
        for s in [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]] {
            let m = crate::bundles::span_morphism(&fam, &s).unwrap();
            assert_eq!(crate::numerics::smallest_singular_value(&m).unwrap(), 1.0);
        }
    }

    #[test]
    fn diagonal_matrix() {
        let diag = [Complex::I, Complex::new(2.0, 0.0), Complex::new(1.0, 1.0)];
        let t = ComplexMatrix::diagonal(&diag);
        let cert = complex_odd_eigen(&t, &icosphere(3).unwrap()).unwrap();
        assert!(cert.residual < 1e-10, "{cert:?}");
        assert!(diag.iter().any(|&d| (d - cert.eigenvalue).abs() < 1e-9));
        assert!((cnorm(&cert.eigenvector) - 1.0).abs() < 1e-12);
        let [a, b, g] = cert.witness;
        assert!(a.abs() <= 1.0 && b * b + g * g >= 1.0 - a * a - 1e-12);
    }

    #[test]
    fn cube_roots_of_unity() {
        let t = companion_matrix_complex(&[Complex::new(-1.0, 0.0), Complex::ZERO, Complex::ZERO])
            .unwrap();
        let cert = complex_odd_eigen(&t, &icosphere(3).unwrap()).unwrap();
        let mu = cert.eigenvalue;
        assert!((mu * mu * mu - Complex::ONE).abs() < 1e-8, "{mu:?}");
    }

    #[test]
    fn even_size_rejected() {
        assert!(matches!(
            complex_odd_eigen(&ComplexMatrix::identity(2), &icosphere(0).unwrap()),
            Err(Error::Parameter(_))
        ));
    }
}
