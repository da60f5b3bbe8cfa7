use std::f64::consts::PI;

use rayon::prelude::*;

use super::maps::SurfaceMap;
use super::{DegreeMethod, DegreeReport, CERTIFY_RESIDUAL};
use crate::error::{Error, Result};
use crate::geom::{cross, det3, dot3, norm3, normalize3, retract, sub3, tangent_frame, Vec3};
use crate::sphere::{icosphere, AntipodalSamples, SphereMesh, SpherePoint, MAX_LEVEL};

/// Finite-difference step as a fraction of the local edge length.
const FD_STEP_FRACTION: f64 = 1e-5;
/// Step used at preimages, which are not tied to a face size.
const PREIMAGE_FD_STEP: f64 = 1e-7;
/// Preimages whose Jacobian determinant falls below this are irregular.
pub const IRREGULAR_DET: f64 = 1e-8;

const NEWTON_MAX_ITER: usize = 60;
const NEWTON_TOL: f64 = 1e-13;
const DUPLICATE_DISTANCE: f64 = 1e-7;

/// Central-difference partials of `g` at `s` along the tangent frame, and the
/// signed area scaling `<g, d_u g x d_v g>`.
fn local_jacobian(g: &SurfaceMap, s: &Vec3, h: f64) -> Result<(Vec3, Vec3, Vec3, f64)> {
    let frame = tangent_frame(s);
    let value = g.eval(s)?;
    let du = sub3(
        &g.eval(&retract(s, &frame, h, 0.0))?,
        &g.eval(&retract(s, &frame, -h, 0.0))?,
    );
    let dv = sub3(
        &g.eval(&retract(s, &frame, 0.0, h))?,
        &g.eval(&retract(s, &frame, 0.0, -h))?,
    );
    let du = du.map(|x| x / (2.0 * h));
    let dv = dv.map(|x| x / (2.0 * h));
    let jac = dot3(&value, &cross(&du, &dv));
    Ok((value, du, dv, jac))
}

/// Degree as `(1/4pi) sum_f <g, d_u g x d_v g>(c_f) area_f` over mesh faces.
pub fn brouwer_degree(g: &SurfaceMap, mesh: &SphereMesh) -> Result<DegreeReport> {
    let report = brouwer_integral(g, mesh)?;
    if report.residual >= CERTIFY_RESIDUAL {
        return Err(Error::NonConvergentDegree {
            raw: report.raw_integral,
            residual: report.residual,
            level: mesh.level(),
        });
    }
    Ok(report)
}

/// The uncertified integral, whatever its residual.
pub fn brouwer_integral(g: &SurfaceMap, mesh: &SphereMesh) -> Result<DegreeReport> {
    let contributions = face_contributions(g, mesh)?;
    let raw = contributions.iter().sum::<f64>() / (4.0 * PI);
    Ok(DegreeReport::from_raw(raw, DegreeMethod::Integral).at_level(mesh.level()))
}

/// Per-face `jacobian * area` in face order.
pub fn face_contributions(g: &SurfaceMap, mesh: &SphereMesh) -> Result<Vec<f64>> {
    (0..mesh.faces().len())
        .into_par_iter()
        .map(|f| {
            let c = mesh.centroid(f);
            let h = FD_STEP_FRACTION * mesh.edge_length(f);
            local_jacobian(g, &c, h).map(|(_, _, _, jac)| jac * mesh.areas()[f])
        })
        .collect()
}

/// Runs the integral from `level` upward until the residual certifies.
pub fn brouwer_degree_refined(g: &SurfaceMap, level: u32, max_level: u32) -> Result<DegreeReport> {
    let max_level = max_level.min(MAX_LEVEL);
    let mut level = level.min(max_level);
    loop {
        let mesh = icosphere(level)?;
        match brouwer_degree(g, &mesh) {
            Err(Error::NonConvergentDegree { .. }) if level < max_level => level += 1,
            other => return other,
        }
    }
}

/// Signed count of preimages of `y`, located by spherical-triangle
/// containment of `y` in the images of mesh faces and polished by Newton.
pub fn degree_by_preimage(
    g: &SurfaceMap,
    y: &SpherePoint,
    mesh: &SphereMesh,
) -> Result<DegreeReport> {
    let preimages = preimages(g, y, mesh)?;
    let raw: f64 = preimages.iter().map(|p| f64::from(p.sign)).sum();
    Ok(DegreeReport::from_raw(raw, DegreeMethod::Preimage).at_level(mesh.level()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Preimage {
    pub point: Vec3,
    pub sign: i8,
    pub jacobian: f64,
}

pub fn preimages(g: &SurfaceMap, y: &SpherePoint, mesh: &SphereMesh) -> Result<Vec<Preimage>> {
    let target = y.coords();
    let images: Vec<Vec3> = mesh
        .vertices()
        .par_iter()
        .map(|v| g.eval(v))
        .collect::<Result<_>>()?;

    let seeds: Vec<Vec3> = mesh
        .faces()
        .iter()
        .enumerate()
        .filter_map(|(f, &[a, b, c])| {
            let (ga, gb, gc) = (&images[a], &images[b], &images[c]);
            let d = det3(ga, gb, gc);
            if d.abs() < 1e-15 {
                return None;
            }
            let w = [
                det3(&target, gb, gc) / d,
                det3(ga, &target, gc) / d,
                det3(ga, gb, &target) / d,
            ];
            let total = w[0] + w[1] + w[2];
            if total <= 0.0 || w.iter().any(|&x| x < -1e-9 * total) {
                return None;
            }
            let [va, vb, vc] = mesh.face_vertices(f);
            let guess: Vec3 = std::array::from_fn(|i| w[0] * va[i] + w[1] * vb[i] + w[2] * vc[i]);
            normalize3(&guess)
        })
        .collect();

    let polished: Vec<Option<Preimage>> = seeds
        .par_iter()
        .map(|s| newton_preimage(g, &target, s))
        .collect::<Result<_>>()?;

    let mut found: Vec<Preimage> = Vec::new();
    for p in polished.into_iter().flatten() {
        if found
            .iter()
            .all(|q| norm3(&sub3(&q.point, &p.point)) > DUPLICATE_DISTANCE)
        {
            found.push(p);
        }
    }
    Ok(found)
}

fn newton_preimage(g: &SurfaceMap, target: &Vec3, start: &Vec3) -> Result<Option<Preimage>> {
    let mut s = *start;
    for _ in 0..NEWTON_MAX_ITER {
        let (value, du, dv, jac) = local_jacobian(g, &s, PREIMAGE_FD_STEP)?;
        let r = sub3(target, &value);
        if norm3(&r) < NEWTON_TOL {
            if jac.abs() < IRREGULAR_DET {
                return Err(Error::IrregularValue {
                    point: s.to_vec(),
                    det: jac,
                });
            }
            return Ok(Some(Preimage {
                point: s,
                sign: if jac > 0.0 { 1 } else { -1 },
                jacobian: jac,
            }));
        }
        // Gauss–Newton step in the tangent chart at s.
        let (a, b, c) = (dot3(&du, &du), dot3(&du, &dv), dot3(&dv, &dv));
        let (p, q) = (dot3(&du, &r), dot3(&dv, &r));
        let det = a * c - b * b;
        if det.abs() < 1e-300 {
            return Err(Error::IrregularValue {
                point: s.to_vec(),
                det: jac,
            });
        }
        let (x, y) = ((c * p - b * q) / det, (a * q - b * p) / det);
        s = retract(&s, &tangent_frame(&s), x, y);
    }
    // Seeds that wander off are spurious containments near a fold.
    Ok(None)
}

/// Retries `degree_by_preimage` over a fixed list of generic targets until
/// one is a regular value.
pub fn degree_by_preimage_generic(g: &SurfaceMap, mesh: &SphereMesh) -> Result<DegreeReport> {
    const TARGETS: [Vec3; 4] = [
        [0.267, -0.534, 0.802],
        [-0.613, 0.358, 0.705],
        [0.408, 0.816, -0.408],
        [0.1, 0.2, -0.97],
    ];
    let mut last = None;
    for t in TARGETS {
        let y = SpherePoint::from_direction(t)?;
        match degree_by_preimage(g, &y, mesh) {
            Err(e @ Error::IrregularValue { .. }) => last = Some(e),
            other => return other,
        }
    }
    Err(last.expect("at least one target tried"))
}

/// `max |g(-s) + g(s)|` over the antipodal vertex pairs of `mesh`.
pub fn check_antipode_preserving(g: &SurfaceMap, mesh: &SphereMesh) -> Result<f64> {
    let defects: Vec<f64> = mesh
        .representatives()
        .into_par_iter()
        .map(|i| {
            let a = g.eval(&mesh.vertices()[i])?;
            let b = g.eval(&mesh.vertices()[mesh.antipode_of(i)])?;
            Ok(norm3(&[a[0] + b[0], a[1] + b[1], a[2] + b[2]]))
        })
        .collect::<Result<_>>()?;
    Ok(defects.into_iter().fold(0.0, f64::max))
}

/// Smallest `min(|a(s) - b(s)|, |a(s) + b(s)|)` over mesh vertices; zero
/// means the two maps coincide or are antipodal somewhere.
pub fn min_separation(a: &SurfaceMap, b: &SurfaceMap, mesh: &SphereMesh) -> Result<(f64, f64)> {
    let pairs: Vec<(f64, f64)> = mesh
        .vertices()
        .par_iter()
        .map(|v| {
            let (x, y) = (a.eval(v)?, b.eval(v)?);
            Ok((
                norm3(&sub3(&x, &y)),
                norm3(&[x[0] + y[0], x[1] + y[1], x[2] + y[2]]),
            ))
        })
        .collect::<Result<_>>()?;
    Ok(pairs.iter().fold((f64::INFINITY, f64::INFINITY), |acc, p| {
        (acc.0.min(p.0), acc.1.min(p.1))
    }))
}

/// Largest angle between the images of two vertices of one face. Small
/// values mean the mesh resolves `g`.
pub fn max_face_spread(g: &SurfaceMap, mesh: &SphereMesh) -> Result<f64> {
    let values: Vec<Vec3> = mesh
        .vertices()
        .par_iter()
        .map(|v| g.eval(v))
        .collect::<Result<_>>()?;
    let angle = |a: &Vec3, b: &Vec3| dot3(a, b).clamp(-1.0, 1.0).acos();
    Ok(mesh
        .faces()
        .par_iter()
        .map(|&[a, b, c]| {
            let (a, b, c) = (&values[a], &values[b], &values[c]);
            angle(a, b).max(angle(b, c)).max(angle(c, a))
        })
        .reduce(|| 0.0, f64::max))
}

/// Coarsest level in `start..=max` whose face spread is at most `limit`.
pub fn resolving_level(g: &SurfaceMap, start: u32, max: u32, limit: f64) -> Result<Option<u32>> {
    for level in start..=max.min(MAX_LEVEL) {
        if max_face_spread(g, &icosphere(level)?)? <= limit {
            return Ok(Some(level));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::maps::SampledSurfaceMap;
    use std::sync::Arc;

    fn north() -> SpherePoint {
        SpherePoint::new([0.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn identity_and_antipodal() {
        let mesh = icosphere(4).unwrap();
        let id = brouwer_degree(&SurfaceMap::Identity, &mesh).unwrap();
        assert_eq!(id.rounded, 1);
        assert!(id.residual < 1e-6, "{id:?}");
        assert_eq!(
            brouwer_degree(&SurfaceMap::Antipodal, &mesh)
                .unwrap()
                .rounded,
            -1
        );

        let p = preimages(&SurfaceMap::Identity, &north(), &mesh).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].sign, 1);
        let p = preimages(&SurfaceMap::Antipodal, &north(), &mesh).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].sign, -1);
        assert!((p[0].point[2] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn suspensions_agree_across_methods() {
        let mesh = icosphere(4).unwrap();
        let y = SpherePoint::from_direction([0.31, -0.42, 0.5]).unwrap();
        for k in -2..=3 {
            let g = SurfaceMap::Suspension(k);
            let integral = brouwer_degree(&g, &mesh).unwrap();
            let count = degree_by_preimage(&g, &y, &mesh).unwrap();
            assert_eq!(integral.rounded, i64::from(k));
            assert_eq!(count.rounded, i64::from(k), "k={k}");
        }
        let p = preimages(&SurfaceMap::Suspension(3), &y, &mesh).unwrap();
        assert_eq!(p.len(), 3);
        assert!(p.iter().all(|q| q.sign == 1));
    }

    #[test]
    fn negation_flips_degree() {
        let mesh = icosphere(3).unwrap();
        for (name, g, deg) in SurfaceMap::builtin_family() {
            let d = brouwer_degree(&g, &mesh).unwrap().rounded;
            let n = brouwer_degree(&g.clone().negated(), &mesh).unwrap().rounded;
            assert_eq!(d, deg, "{name}");
            assert_eq!(n, -d, "{name}");
        }
    }

    #[test]
    fn half_covering_map_does_not_certify() {
        // crushes the southern hemisphere onto the equator, so the image is
        // covered once over the north and not at all over the south
        let g = SurfaceMap::custom(|s| [s[0], s[1], s[2].max(0.0)]);
        let mesh = icosphere(2).unwrap();
        let raw = brouwer_integral(&g, &mesh).unwrap();
        assert!(raw.residual >= CERTIFY_RESIDUAL, "{raw:?}");
        assert!(matches!(
            brouwer_degree(&g, &mesh),
            Err(Error::NonConvergentDegree { .. })
        ));
    }

    #[test]
    fn irregular_value_is_reported() {
        // z -> z^2 style fold: Jacobian vanishes along the equator
        let g = SurfaceMap::custom(|s| [s[0], s[1], s[2] * s[2] - 0.5]);
        let mesh = icosphere(3).unwrap();
        let y = SpherePoint::from_direction(g.eval(&[1.0, 0.0, 0.0]).unwrap()).unwrap();
        let err = degree_by_preimage(&g, &y, &mesh).unwrap_err();
        assert!(matches!(err, Error::IrregularValue { .. }), "{err:?}");
    }

    #[test]
    fn sampled_map_degree() {
        let table = SampledSurfaceMap::from_map(&SurfaceMap::Suspension(2), 4).unwrap();
        let g = SurfaceMap::Sampled(Arc::new(table));
        let mesh = icosphere(3).unwrap();
        assert_eq!(brouwer_degree(&g, &mesh).unwrap().rounded, 2);
    }

    #[test]
    fn antipode_checks() {
        let mesh = icosphere(3).unwrap();
        assert_eq!(
            check_antipode_preserving(&SurfaceMap::Identity, &mesh).unwrap(),
            0.0
        );
        let constant = SurfaceMap::custom(|_| [0.0, 0.0, 1.0]);
        assert_eq!(check_antipode_preserving(&constant, &mesh).unwrap(), 2.0);
        let a = SurfaceMap::Linear([[2.0, 1.0, 0.0], [0.0, 1.0, 3.0], [1.0, 0.0, 1.0]]);
        assert!(check_antipode_preserving(&a, &mesh).unwrap() < 1e-12);
    }
}
