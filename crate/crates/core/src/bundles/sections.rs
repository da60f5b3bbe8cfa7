use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::fields::{Parity, ParityPolynomial};
use crate::numerics::RealMatrix;
use crate::sphere::AntipodalSamples;

/// Parity of each component under `s -> -s`: `-1` for a canonical line
/// summand, `+1` for a trivial one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParitySignature {
    signs: Vec<i8>,
}

impl ParitySignature {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::Parameter(
                "signature must have at least one component".into(),
            ));
        }
        if let Some(bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::Parameter(format!(
                "signature entries must be +1 or -1, got {bad}"
            )));
        }
        Ok(Self { signs })
    }

    /// `k` canonical lines followed by `l` trivial ones.
    pub fn gammas_then_trivial(k: usize, l: usize) -> Self {
        let mut signs = vec![-1; k];
        signs.resize(k + l, 1);
        Self { signs }
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn gamma_count(&self) -> usize {
        self.signs.iter().filter(|&&s| s == -1).count()
    }
}

type SectionFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// A section of a sum of canonical and trivial lines over RP¹ or RP²,
/// represented as an equivariant function on the covering sphere.
#[derive(Clone)]
pub struct EquivariantSection {
    ambient_dim: usize,
    signature: ParitySignature,
    evaluator: Arc<SectionFn>,
}

impl EquivariantSection {
    /// `ambient_dim` is 2 for sections over RP¹ and 3 over RP².
    pub fn new<F>(ambient_dim: usize, signature: ParitySignature, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        if !(2..=3).contains(&ambient_dim) {
            return Err(Error::Parameter(format!(
                "sections live on S^1 or S^2, not in R^{ambient_dim}"
            )));
        }
        Ok(Self {
            ambient_dim,
            signature,
            evaluator: Arc::new(f),
        })
    }

    /// Section with one polynomial per component; the signature is read off
    /// the polynomial parities, so equivariance is exact.
    pub fn from_polynomials(components: Vec<ParityPolynomial>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::Parameter("no components".into()))?;
        let dim = first.dim();
        if components.iter().any(|c| c.dim() != dim) {
            return Err(Error::Dimension(
                "components disagree on the domain dimension".into(),
            ));
        }
        let signature =
            ParitySignature::new(components.iter().map(|c| c.parity().sign()).collect())?;
        Self::new(dim, signature, move |s| {
            components.iter().map(|c| c.eval(s)).collect()
        })
    }

    /// Random compliant section: odd polynomials in the canonical slots, even
    /// ones in the trivial slots, all terms up to `max_degree`.
    pub fn random<R: Rng + ?Sized>(
        ambient_dim: usize,
        signature: &ParitySignature,
        max_degree: u32,
        rng: &mut R,
    ) -> Result<Self> {
        let components = signature
            .signs()
            .iter()
            .map(|&s| {
                let parity = Parity::from_sign(s).expect("validated signature");
                ParityPolynomial::random(ambient_dim, parity, max_degree, rng)
            })
            .collect();
        Self::from_polynomials(components)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn signature(&self) -> &ParitySignature {
        &self.signature
    }

    pub fn components(&self) -> usize {
        self.signature.len()
    }

    pub fn eval(&self, s: &[f64]) -> Result<Vec<f64>> {
        if s.len() != self.ambient_dim {
            return Err(Error::Dimension(format!(
                "point in R^{} fed to a section on S^{}",
                s.len(),
                self.ambient_dim - 1
            )));
        }
        let v = (self.evaluator)(s);
        if v.len() != self.components() {
            return Err(Error::Dimension(format!(
                "section returned {} components, signature has {}",
                v.len(),
                self.components()
            )));
        }
        Ok(v)
    }
}

impl fmt::Debug for EquivariantSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EquivariantSection")
            .field("ambient_dim", &self.ambient_dim)
            .field("signature", &self.signature.signs)
            .finish_non_exhaustive()
    }
}

/// Rows `(x, y)` and `(-y, x)`, trivializing 2γ over RP¹.
pub fn canonical_sections_2gamma() -> [EquivariantSection; 2] {
    let sig = ParitySignature::gammas_then_trivial(2, 0);
    [
        EquivariantSection::new(2, sig.clone(), |s| vec![s[0], s[1]]).expect("valid"),
        EquivariantSection::new(2, sig, |s| vec![-s[1], s[0]]).expect("valid"),
    ]
}

/// The four quaternion-style rows trivializing 4γ over RP².
pub fn canonical_sections_4gamma() -> [EquivariantSection; 4] {
    let sig = ParitySignature::gammas_then_trivial(4, 0);
    let row =
        |f: fn(&[f64]) -> Vec<f64>| EquivariantSection::new(3, sig.clone(), f).expect("valid");
    [
        row(|s| vec![s[0], s[1], s[2], 0.0]),
        row(|s| vec![-s[1], s[0], 0.0, s[2]]),
        row(|s| vec![-s[2], 0.0, s[0], -s[1]]),
        row(|s| vec![0.0, -s[2], s[1], s[0]]),
    ]
}

/// Largest `|σ_i(-s) - sign_i σ_i(s)|` over antipodal sample pairs.
pub fn check_equivariance<S: AntipodalSamples>(
    sec: &EquivariantSection,
    samples: &S,
) -> Result<f64> {
    if samples.ambient_dim() != sec.ambient_dim() {
        return Err(Error::Dimension(
            "section and samples live on different spheres".into(),
        ));
    }
    let mut worst: f64 = 0.0;
    for i in samples.representatives() {
        let here = sec.eval(samples.point(i))?;
        let there = sec.eval(samples.point(samples.antipode(i)))?;
        for ((a, b), &sign) in here.iter().zip(&there).zip(sec.signature().signs()) {
            worst = worst.max((b - f64::from(sign) * a).abs());
        }
    }
    Ok(worst)
}

/// Square matrix whose row `i` is section `i` evaluated at `s`.
pub fn section_matrix(secs: &[EquivariantSection], s: &[f64]) -> Result<RealMatrix> {
    let k = secs.len();
    let first = secs
        .first()
        .ok_or_else(|| Error::Dimension("no sections".into()))?;
    if secs
        .iter()
        .any(|sec| sec.ambient_dim() != first.ambient_dim() || sec.components() != k)
    {
        return Err(Error::Dimension(format!(
            "need {k} sections with {k} components on a common sphere"
        )));
    }
    let mut data = Vec::with_capacity(k * k);
    for sec in secs {
        data.extend(sec.eval(s)?);
    }
    RealMatrix::new(k, k, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::determinant;
    use crate::sphere::{circle_grid, icosphere};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn signature_validation() {
        assert!(ParitySignature::new(vec![]).is_err());
        assert!(ParitySignature::new(vec![1, 0]).is_err());
        assert_eq!(
            ParitySignature::gammas_then_trivial(2, 1).signs(),
            &[-1, -1, 1]
        );
    }

    #[test]
    fn two_gamma_frames() {
        let secs = canonical_sections_2gamma();
        let m = section_matrix(&secs, &[1.0, 0.0]).unwrap();
        assert_eq!(m, RealMatrix::identity(2));
        let m = section_matrix(&secs, &[0.0, 1.0]).unwrap();
        assert_eq!(
            m,
            RealMatrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]).unwrap()
        );
        assert_eq!(determinant(&m).unwrap(), 1.0);
        let grid = circle_grid(256).unwrap();
        for sec in &secs {
            assert!(check_equivariance(sec, &grid).unwrap() <= 1e-15);
        }
    }

    #[test]
    fn four_gamma_identity_at_pole() {
        let secs = canonical_sections_4gamma();
        let m = section_matrix(&secs, &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(m, RealMatrix::identity(4));
        let mesh = icosphere(2).unwrap();
        for sec in &secs {
            assert!(check_equivariance(sec, &mesh).unwrap() <= 1e-15);
        }
    }

    #[test]
    fn parity_mismatch_is_detected() {
        // the +1 slot carries an odd function
        let sig = ParitySignature::new(vec![-1, 1]).unwrap();
        let sec = EquivariantSection::new(2, sig, |s| vec![s[0], s[1]]).unwrap();
        let grid = circle_grid(64).unwrap();
        let defect = check_equivariance(&sec, &grid).unwrap();
        assert!((defect - 2.0).abs() < 1e-12, "{defect}");
    }

    #[test]
    fn column_parity_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sig = ParitySignature::gammas_then_trivial(2, 1);
        let secs: Vec<_> = (0..3)
            .map(|_| EquivariantSection::random(3, &sig, 3, &mut rng).unwrap())
            .collect();
        let mesh = icosphere(2).unwrap();
        for i in mesh.representatives() {
            let here = section_matrix(&secs, &mesh.vertices()[i]).unwrap();
            let there = section_matrix(&secs, &mesh.vertices()[mesh.antipode_of(i)]).unwrap();
            let d: Vec<f64> = sig.signs().iter().map(|&s| f64::from(s)).collect();
            let expected = here.matmul(&RealMatrix::diagonal(&d)).unwrap();
            assert_eq!(there, expected);
        }
    }

    #[test]
    fn shape_errors() {
        let secs = canonical_sections_2gamma();
        assert!(section_matrix(&secs[..1], &[1.0, 0.0]).is_err());
        assert!(secs[0].eval(&[1.0, 0.0, 0.0]).is_err());
        assert!(
            EquivariantSection::new(4, ParitySignature::gammas_then_trivial(1, 0), |_| vec![0.0])
                .is_err()
        );
    }
}
