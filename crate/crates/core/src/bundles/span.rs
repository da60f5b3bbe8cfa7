use serde::{Deserialize, Serialize};

use super::search::{search_circle, search_sphere, SearchOutcome};
use crate::error::{Error, Result};
use crate::numerics::{jacobi_svd, smallest_singular_value, Complex, ComplexMatrix, RealMatrix};
use crate::sphere::{CircleGrid, SphereMesh};

/// Singular values below `RANK_THRESHOLD * sigma_max` count as zero.
pub const RANK_THRESHOLD: f64 = 1e-8;

/// Square matrices `A_1 … A_r` of a common size `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpanFamily {
    matrices: Vec<RealMatrix>,
}

impl SpanFamily {
    pub fn new(matrices: Vec<RealMatrix>) -> Result<Self> {
        let first = matrices
            .first()
            .ok_or_else(|| Error::Parameter("a span family needs r >= 1".into()))?;
        if !first.is_square() {
            return Err(Error::Dimension(format!(
                "{}x{} matrix is not square",
                first.rows(),
                first.cols()
            )));
        }
        if let Some(m) = matrices
            .iter()
            .find(|m| m.rows() != first.rows() || m.cols() != first.cols())
        {
            return Err(Error::Dimension(format!(
                "{}x{} matrix in a family of {}x{}",
                m.rows(),
                m.cols(),
                first.rows(),
                first.rows()
            )));
        }
        Ok(Self { matrices })
    }

    /// Left multiplication by `1, i, j` on the quaternions, as 4x4 real
    /// matrices. Every nonzero combination is invertible.
    pub fn quaternion() -> Self {
        let one = RealMatrix::identity(4);
        let i = RealMatrix::from_rows(&[
            [0.0, -1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
            [0.0, 0.0, 1.0, 0.0],
        ])
        .expect("4x4");
        let j = RealMatrix::from_rows(&[
            [0.0, 0.0, -1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
        ])
        .expect("4x4");
        Self {
            matrices: vec![one, i, j],
        }
    }

    pub fn q(&self) -> usize {
        self.matrices[0].rows()
    }

    pub fn r(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[RealMatrix] {
        &self.matrices
    }

    pub fn from_json(text: &str) -> Result<Self> {
        match parse_matrix_json(text)? {
            MatrixSet::Real(ms) => Self::new(ms),
            MatrixSet::Complex(_) => Err(Error::Input("span families must be real".into())),
        }
    }

    pub fn to_json(&self) -> String {
        let file = MatrixFile {
            q: self.q(),
            matrices: self
                .matrices
                .iter()
                .map(|m| MatrixEntry::Real(Grid::Flat(m.as_slice().to_vec())))
                .collect(),
        };
        serde_json::to_string(&file).expect("plain data serializes")
    }
}

/// `A(s) = Σ s_i A_i`.
pub fn span_morphism(fam: &SpanFamily, s: &[f64]) -> Result<RealMatrix> {
    if s.len() != fam.r() {
        return Err(Error::Dimension(format!(
            "{} coefficients for {} matrices",
            s.len(),
            fam.r()
        )));
    }
    let q = fam.q();
    let mut out = RealMatrix::zeros(q, q);
    for (m, &x) in fam.matrices.iter().zip(s) {
        out = out.axpy(x, m)?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpanMinimum {
    pub q: usize,
    pub point: Vec<f64>,
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// Singular values above `RANK_THRESHOLD * sigma_max` at the argmin.
    pub rank: usize,
    pub mesh_level: u32,
    pub rerun: bool,
    pub warning: bool,
}

fn sigma_min_at(fam: &SpanFamily, s: &[f64]) -> f64 {
    span_morphism(fam, s)
        .and_then(|m| smallest_singular_value(&m))
        .unwrap_or(f64::INFINITY)
}

fn finish(fam: &SpanFamily, found: SearchOutcome) -> Result<SpanMinimum> {
    let svd = jacobi_svd(&span_morphism(fam, &found.point)?)?;
    let sigma_max = svd.values[0];
    let rank = svd
        .values
        .iter()
        .filter(|&&v| v > RANK_THRESHOLD * sigma_max)
        .count();
    Ok(SpanMinimum {
        q: fam.q(),
        sigma_min: *svd.values.last().expect("non-empty"),
        sigma_max,
        rank,
        point: found.point,
        mesh_level: found.mesh_level,
        rerun: found.rerun,
        warning: found.warning,
    })
}

/// Minimum of `σ_min A(s)` over S² for a three-member family.
pub fn min_rank_over_sphere(fam: &SpanFamily, mesh: &SphereMesh) -> Result<SpanMinimum> {
    if fam.r() != 3 {
        return Err(Error::Dimension(format!(
            "sphere scan needs 3 matrices, family has {}",
            fam.r()
        )));
    }
    let found = search_sphere(&|s: &[f64]| sigma_min_at(fam, s), mesh)?;
    finish(fam, found)
}

/// Minimum of `σ_min A(s)` over S¹ for a two-member family.
pub fn min_rank_over_circle(fam: &SpanFamily, grid: &CircleGrid) -> Result<SpanMinimum> {
    if fam.r() != 2 {
        return Err(Error::Dimension(format!(
            "circle scan needs 2 matrices, family has {}",
            fam.r()
        )));
    }
    let found = search_circle(&|s: &[f64]| sigma_min_at(fam, s), grid)?;
    finish(fam, found)
}

/// Matrices read from the JSON input format.
#[derive(Clone, Debug, PartialEq)]
pub enum MatrixSet {
    Real(Vec<RealMatrix>),
    Complex(Vec<ComplexMatrix>),
}

#[derive(Serialize, Deserialize)]
struct MatrixFile {
    q: usize,
    matrices: Vec<MatrixEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum MatrixEntry {
    Real(Grid),
    Complex { re: Grid, im: Grid },
}

/// Row-major entries, flat or as a list of rows.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Grid {
    Flat(Vec<f64>),
    Rows(Vec<Vec<f64>>),
}

impl Grid {
    /// Flattens rows; ragged rows come back empty so the length check fails.
    fn flat(self) -> Vec<f64> {
        match self {
            Grid::Flat(v) => v,
            Grid::Rows(rows) if rows.iter().all(|r| r.len() == rows.len()) => {
                rows.into_iter().flatten().collect()
            }
            Grid::Rows(_) => Vec::new(),
        }
    }
}

/// Parses `{"q": n, "matrices": [[row-major], …]}`; each matrix may also
/// be given as a list of rows. Complex matrices are
/// written `{"re": [...], "im": [...]}`; if any entry is complex, real
/// entries are promoted and the whole set is complex.
pub fn parse_matrix_json(text: &str) -> Result<MatrixSet> {
    let file: MatrixFile =
        serde_json::from_str(text).map_err(|e| Error::Input(format!("matrix file: {e}")))?;
    let q = file.q;
    if q == 0 {
        return Err(Error::Input("q must be positive".into()));
    }
    let check = |v: &[f64], what: &str| {
        if v.len() == q * q {
            Ok(())
        } else {
            Err(Error::Input(format!(
                "{what} has {} entries, expected {}",
                v.len(),
                q * q
            )))
        }
    };
    let complex = file
        .matrices
        .iter()
        .any(|m| matches!(m, MatrixEntry::Complex { .. }));
    if !complex {
        let mut out = Vec::with_capacity(file.matrices.len());
        for (k, m) in file.matrices.into_iter().enumerate() {
            let MatrixEntry::Real(v) = m else {
                unreachable!()
            };
            let v = v.flat();
            check(&v, &format!("matrix {k}"))?;
            out.push(RealMatrix::new(q, q, v)?);
        }
        return Ok(MatrixSet::Real(out));
    }
    let mut out = Vec::with_capacity(file.matrices.len());
    for (k, m) in file.matrices.into_iter().enumerate() {
        let (re, im) = match m {
            MatrixEntry::Real(v) => (v.flat(), vec![0.0; q * q]),
            MatrixEntry::Complex { re, im } => (re.flat(), im.flat()),
        };
        check(&re, &format!("matrix {k} re"))?;
        check(&im, &format!("matrix {k} im"))?;
        out.push(ComplexMatrix::new(
            q,
            re.into_iter()
                .zip(im)
                .map(|(a, b)| Complex::new(a, b))
                .collect(),
        )?);
    }
    Ok(MatrixSet::Complex(out))
}

/// Writes complex matrices in the input format.
pub fn complex_matrices_to_json(ms: &[ComplexMatrix]) -> Result<String> {
    let q = ms
        .first()
        .ok_or_else(|| Error::Input("no matrices".into()))?
        .n();
    let matrices = ms
        .iter()
        .map(|m| MatrixEntry::Complex {
            re: Grid::Flat(m.as_slice().iter().map(|c| c.re).collect()),
            im: Grid::Flat(m.as_slice().iter().map(|c| c.im).collect()),
        })
        .collect();
    Ok(serde_json::to_string(&MatrixFile { q, matrices }).expect("plain data serializes"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{circle_grid, icosphere};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_identity() {
        let fam = SpanFamily::new(vec![RealMatrix::identity(3)]).unwrap();
        assert_eq!(
            span_morphism(&fam, &[1.0]).unwrap(),
            RealMatrix::identity(3)
        );
        assert!(span_morphism(&fam, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn quaternion_combinations_are_orthogonal_up_to_scale() {
        let fam = SpanFamily::quaternion();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let s: Vec<f64> = v.iter().map(|x| x / n).collect();
            let m = span_morphism(&fam, &s).unwrap();
            let gram = m.transpose().matmul(&m).unwrap();
            assert!(gram.max_abs_diff(&RealMatrix::identity(4)).unwrap() < 1e-14);
            assert!((smallest_singular_value(&m).unwrap() - 1.0).abs() < 1e-12);
        }
        let min = min_rank_over_sphere(&fam, &icosphere(2).unwrap()).unwrap();
        assert!((min.sigma_min - 1.0).abs() < 1e-10);
        assert_eq!(min.rank, 4);
        assert!(!min.warning);
    }

    #[test]
    fn explicit_cancellation_on_circle() {
        let fam = SpanFamily::new(vec![
            RealMatrix::identity(2),
            RealMatrix::diagonal(&[1.0, -1.0]),
        ])
        .unwrap();
        let min = min_rank_over_circle(&fam, &circle_grid(64).unwrap()).unwrap();
        assert!(min.sigma_min < 1e-9, "{min:?}");
        assert_eq!(min.rank, 1);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let at_diag = (min.point[0] - h).abs() < 1e-8 && (min.point[1].abs() - h).abs() < 1e-8;
        assert!(at_diag, "{:?}", min.point);
    }

    #[test]
    fn random_six_by_six_triples_are_singular_somewhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mesh = icosphere(3).unwrap();
        for _ in 0..3 {
            let ms = (0..3)
                .map(|_| {
                    RealMatrix::new(6, 6, (0..36).map(|_| rng.gen_range(-1.0..1.0)).collect())
                        .unwrap()
                })
                .collect();
            let min = min_rank_over_sphere(&SpanFamily::new(ms).unwrap(), &mesh).unwrap();
            assert!(min.sigma_min < 1e-5, "{min:?}");
        }
    }

    #[test]
    fn json_round_trip() {
        let fam = SpanFamily::quaternion();
        assert_eq!(SpanFamily::from_json(&fam.to_json()).unwrap(), fam);
        let text = r#"{"q": 1, "matrices": [{"re": [1.0], "im": [2.0]}, [3.0]]}"#;
        let MatrixSet::Complex(ms) = parse_matrix_json(text).unwrap() else {
            panic!()
        };
        assert_eq!(ms[0][(0, 0)], Complex::new(1.0, 2.0));
        assert_eq!(ms[1][(0, 0)], Complex::new(3.0, 0.0));
        let back = complex_matrices_to_json(&ms).unwrap();
        assert_eq!(parse_matrix_json(&back).unwrap(), MatrixSet::Complex(ms));
    }

    #[test]
    fn json_errors() {
        assert!(parse_matrix_json("{").is_err());
        assert!(parse_matrix_json(r#"{"q": 2, "matrices": [[1.0, 2.0, 3.0]]}"#).is_err());
        assert!(SpanFamily::from_json(r#"{"q": 1, "matrices": []}"#).is_err());
        assert!(
            SpanFamily::from_json(r#"{"q": 1, "matrices": [{"re": [1.0], "im": [0.0]}]}"#).is_err()
        );
    }
}
