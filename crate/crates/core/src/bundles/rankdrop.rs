use std::f64::consts::PI;

use serde::Serialize;

use super::search::{search_sphere, SearchOutcome};
use super::sections::{section_matrix, EquivariantSection};
use crate::degree::SurfaceMap;
use crate::error::{Error, Result};
use crate::numerics::{determinant, smallest_singular_value};
use crate::sphere::SphereMesh;

/// `|det|` below this counts as a zero of the determinant.
pub const DET_ZERO: f64 = 1e-8;

/// Bisection stops once the angular bracket is this narrow.
pub const BRACKET_WIDTH: f64 = 1e-12;

/// Column norms below this short-circuit `extract_rho_maps`.
pub const RHO_ZERO: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rp1Witness {
    pub point: [f64; 2],
    pub det: f64,
    /// Angles bracketing the sign change; equal when the start was already a zero.
    pub bracket: [f64; 2],
    pub det_at_start: f64,
    pub det_at_antipode: f64,
    pub bisections: usize,
}

fn check_rp1(secs: &[EquivariantSection]) -> Result<()> {
    if secs.len() != 2
        || secs
            .iter()
            .any(|s| s.ambient_dim() != 2 || s.components() != 2)
    {
        return Err(Error::Dimension(
            "RP^1 search needs two 2-component sections on S^1".into(),
        ));
    }
    let sig = secs[0].signature();
    if secs.iter().any(|s| s.signature() != sig) || sig.gamma_count() != 1 {
        return Err(Error::Parameter(
            "RP^1 search needs the shared signature (-1, +1)".into(),
        ));
    }
    Ok(())
}

fn det_at(secs: &[EquivariantSection], s: &[f64]) -> Result<f64> {
    determinant(&section_matrix(secs, s)?)
}

/// Zero of `det Λ` on the half circle from the angle `start` to its
/// antipode, by bisection on the sign change forced by `det Λ(-s) = -det Λ(s)`.
pub fn rank_drop_search_rp1(secs: &[EquivariantSection], start: f64) -> Result<Rp1Witness> {
    check_rp1(secs)?;
    let s0 = [start.cos(), start.sin()];
    let d0 = det_at(secs, &s0)?;
    let d1 = det_at(secs, &[-s0[0], -s0[1]])?;
    if d0.abs() < DET_ZERO {
        return Ok(Rp1Witness {
            point: s0,
            det: d0,
            bracket: [start, start],
            det_at_start: d0,
            det_at_antipode: d1,
            bisections: 0,
        });
    }
    let (mut lo, mut hi) = (start, start + PI);
    let mut d_lo = d0;
    let mut bisections = 0;
    while hi - lo > BRACKET_WIDTH {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let d_mid = det_at(secs, &[mid.cos(), mid.sin()])?;
        bisections += 1;
        if d_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if (d_mid > 0.0) == (d_lo > 0.0) {
            lo = mid;
            d_lo = d_mid;
        } else {
            hi = mid;
        }
    }
    let theta = 0.5 * (lo + hi);
    let point = [theta.cos(), theta.sin()];
    Ok(Rp1Witness {
        point,
        det: det_at(secs, &point)?,
        bracket: [lo, hi],
        det_at_start: d0,
        det_at_antipode: d1,
        bisections,
    })
}

fn check_rp2(secs: &[EquivariantSection]) -> Result<()> {
    if secs.len() != 3
        || secs
            .iter()
            .any(|s| s.ambient_dim() != 3 || s.components() != 3)
    {
        return Err(Error::Dimension(
            "RP^2 search needs three 3-component sections on S^2".into(),
        ));
    }
    Ok(())
}

/// Minimizes `σ_min Ω(s)` over S².
pub fn rank_drop_search_rp2(
    secs: &[EquivariantSection],
    mesh: &SphereMesh,
) -> Result<SearchOutcome> {
    check_rp2(secs)?;
    // σ_min Ω(-s) = σ_min Ω(s) because Ω(-s) = Ω(s) D with D a sign matrix
    let f = |s: &[f64]| {
        section_matrix(secs, s)
            .and_then(|m| smallest_singular_value(&m))
            .unwrap_or(f64::INFINITY)
    };
    search_sphere(&f, mesh)
}

/// Either the two normalized column maps, or a point where a column vanishes.
#[derive(Clone, Debug)]
pub enum RhoExtraction {
    Maps {
        rho: [SurfaceMap; 2],
        min_norms: [f64; 2],
    },
    RankDrop {
        point: Vec<f64>,
        column: usize,
        norm: f64,
    },
}

/// Column maps `ρ_k(s) = (τ_1^k(s), τ_2^k(s), τ_3^k(s))` for `k = 1, 2`.
///
/// Norms are checked at every mesh vertex and face centroid; a column below
/// `RHO_ZERO` makes `Ω` singular there, which is returned as the witness.
pub fn extract_rho_maps(secs: &[EquivariantSection], mesh: &SphereMesh) -> Result<RhoExtraction> {
    check_rp2(secs)?;
    if secs.iter().any(|s| s.signature().signs()[..2] != [-1, -1]) {
        return Err(Error::Parameter(
            "the first two components must be canonical-line slots".into(),
        ));
    }
    let samples = mesh
        .vertices()
        .iter()
        .copied()
        .chain((0..mesh.faces().len()).map(|f| mesh.centroid(f)));
    let mut min_norms = [f64::INFINITY; 2];
    for s in samples {
        let m = section_matrix(secs, &s)?;
        for (k, slot) in min_norms.iter_mut().enumerate() {
            let norm = (0..3).map(|i| m[(i, k)] * m[(i, k)]).sum::<f64>().sqrt();
            if norm < RHO_ZERO {
                return Ok(RhoExtraction::RankDrop {
                    point: s.to_vec(),
                    column: k,
                    norm,
                });
            }
            *slot = slot.min(norm);
        }
    }
    let column = |k: usize| {
        let secs = secs.to_vec();
        SurfaceMap::custom(move |s| {
            let mut v = [0.0; 3];
            for (i, sec) in secs.iter().enumerate() {
                v[i] = sec.eval(s).map(|row| row[k]).unwrap_or(f64::NAN);
            }
            v
        })
    };
    Ok(RhoExtraction::Maps {
        rho: [column(0), column(1)],
        min_norms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundles::search::RANK_DROP_TOL;
    use crate::bundles::sections::ParitySignature;
    use crate::degree::{brouwer_degree, check_antipode_preserving};
    use crate::fields::{Monomial, Parity, ParityPolynomial};
    use crate::sphere::icosphere;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gamma_eps(dim: usize, odd: ParityPolynomial, even: ParityPolynomial) -> EquivariantSection {
        assert_eq!(odd.dim(), dim);
        EquivariantSection::from_polynomials(vec![odd, even]).unwrap()
    }

    #[test]
    fn closed_form_zero() {
        // rows (x, 1) and (y, c): det = cx - y, zero where y = cx
        let c = 0.75;
        let secs = [
            gamma_eps(
                2,
                ParityPolynomial::coordinate(2, 0),
                ParityPolynomial::constant(2, 1.0),
            ),
            gamma_eps(
                2,
                ParityPolynomial::coordinate(2, 1),
                ParityPolynomial::constant(2, c),
            ),
        ];
        let w = rank_drop_search_rp1(&secs, 0.0).unwrap();
        assert!(w.det.abs() < DET_ZERO);
        assert!(w.bracket[1] - w.bracket[0] <= BRACKET_WIDTH);
        assert!((w.point[1] - c * w.point[0]).abs() < 1e-11);
        assert_eq!(w.det_at_antipode, -w.det_at_start);
    }

    #[test]
    fn start_on_zero_returns_immediately() {
        let secs = [
            gamma_eps(
                2,
                ParityPolynomial::coordinate(2, 1),
                ParityPolynomial::constant(2, 1.0),
            ),
            gamma_eps(
                2,
                ParityPolynomial::coordinate(2, 1),
                ParityPolynomial::constant(2, 2.0),
            ),
        ];
        let w = rank_drop_search_rp1(&secs, 0.0).unwrap();
        assert_eq!(w.bisections, 0);
        assert_eq!(w.point, [1.0, 0.0]);
    }

    #[test]
    fn random_compliant_pairs_drop_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let sig = ParitySignature::new(vec![-1, 1]).unwrap();
        for _ in 0..20 {
            let secs: Vec<_> = (0..2)
                .map(|_| EquivariantSection::random(2, &sig, 5, &mut rng).unwrap())
                .collect();
            let w = rank_drop_search_rp1(&secs, 0.3).unwrap();
            assert!(w.det.abs() < DET_ZERO, "{w:?}");
        }
    }

    #[test]
    fn rp1_rejects_two_gamma() {
        let secs = crate::bundles::canonical_sections_2gamma();
        assert!(rank_drop_search_rp1(&secs, 0.0).is_err());
    }

    #[test]
    fn trivial_control_has_no_rank_drop() {
        let sig = ParitySignature::gammas_then_trivial(0, 3);
        let secs: Vec<_> = (0..3)
            .map(|i| {
                EquivariantSection::new(3, sig.clone(), move |_| {
                    let mut e = vec![0.0; 3];
                    e[i] = 1.0;
                    e
                })
                .unwrap()
            })
            .collect();
        let r = rank_drop_search_rp2(&secs, &icosphere(2).unwrap()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!(!r.warning);
    }

    #[test]
    fn conflicting_identity_columns() {
        // first two columns both equal s; Ω has two equal columns everywhere
        let x = |axis| ParityPolynomial::coordinate(3, axis);
        let one = ParityPolynomial::constant(3, 1.0);
        let secs: Vec<_> = (0..3)
            .map(|i| EquivariantSection::from_polynomials(vec![x(i), x(i), one.clone()]).unwrap())
            .collect();
        let r = rank_drop_search_rp2(&secs, &icosphere(2).unwrap()).unwrap();
        assert!(r.value < 1e-6, "{r:?}");
    }

    #[test]
    fn random_compliant_triples_drop_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sig = ParitySignature::gammas_then_trivial(2, 1);
        let mesh = icosphere(3).unwrap();
        for _ in 0..3 {
            let secs: Vec<_> = (0..3)
                .map(|_| EquivariantSection::random(3, &sig, 3, &mut rng).unwrap())
                .collect();
            let r = rank_drop_search_rp2(&secs, &mesh).unwrap();
            assert!(r.value < RANK_DROP_TOL, "{r:?}");
        }
    }

    #[test]
    fn rho_maps_from_identity_columns() {
        // columns: identity, a fixed rotation of it, and a constant
        let x = |axis| ParityPolynomial::coordinate(3, axis);
        let rows = [(x(0), x(1)), (x(1), x(2)), (x(2), x(0))];
        let secs: Vec<_> = rows
            .into_iter()
            .map(|(a, b)| {
                EquivariantSection::from_polynomials(vec![a, b, ParityPolynomial::constant(3, 1.0)])
                    .unwrap()
            })
            .collect();
        let mesh = icosphere(3).unwrap();
        let RhoExtraction::Maps { rho, .. } = extract_rho_maps(&secs, &mesh).unwrap() else {
            panic!("columns never vanish");
        };
        for g in &rho {
            assert!(check_antipode_preserving(g, &mesh).unwrap() <= 1e-9);
            assert_eq!(brouwer_degree(g, &mesh).unwrap().rounded, 1);
        }
    }

    #[test]
    fn vanishing_column_short_circuits() {
        // column 1 is (x, 0, 0), zero on the great circle x = 0
        let zero = ParityPolynomial::new(3, Parity::Odd, vec![]).unwrap();
        let x = |axis| ParityPolynomial::coordinate(3, axis);
        let cubic = ParityPolynomial::new(
            3,
            Parity::Odd,
            vec![Monomial {
                exponents: vec![0, 0, 1],
                coeff: 1.0,
            }],
        )
        .unwrap();
        let secs = vec![
            EquivariantSection::from_polynomials(vec![
                x(0),
                x(1),
                ParityPolynomial::constant(3, 1.0),
            ])
            .unwrap(),
            EquivariantSection::from_polynomials(vec![
                zero.clone(),
                cubic,
                ParityPolynomial::constant(3, 0.0),
            ])
            .unwrap(),
            EquivariantSection::from_polynomials(vec![
                zero,
                x(0),
                ParityPolynomial::constant(3, 2.0),
            ])
            .unwrap(),
        ];
        let out = extract_rho_maps(&secs, &icosphere(2).unwrap()).unwrap();
        match out {
            RhoExtraction::RankDrop {
                point,
                column,
                norm,
            } => {
                assert_eq!(column, 0);
                assert!(norm < RHO_ZERO);
                assert!(point[0].abs() < RHO_ZERO);
                let m = section_matrix(&secs, &point).unwrap();
                assert!(smallest_singular_value(&m).unwrap() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }
}
