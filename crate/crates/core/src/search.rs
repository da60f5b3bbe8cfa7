//! Derivative-free minimization on S¹ and S²: a fixed-order scan of the
//! sample points followed by Nelder–Mead restarts in local charts.

use rayon::prelude::*;

use crate::geom::{retract, tangent_frame, Vec3};
use crate::sphere::{AntipodalSamples, CircleGrid, SphereMesh};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NelderMeadOptions {
    pub max_iter: usize,
    /// Stop once every vertex lies within this distance of the best one.
    pub diameter_tol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iter: 400,
            diameter_tol: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

/// Standard Nelder–Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2)
/// started from the axis-aligned simplex of edge `step` at `x0`.
pub fn nelder_mead<F>(f: F, x0: &[f64], step: f64, opts: NelderMeadOptions) -> NelderMeadResult
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = eval(&x);
        simplex.push((x, v));
    }

    let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
    };

    let mut iterations = 0;
    while iterations < opts.max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].0.clone();
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&best)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        if diameter < opts.diameter_tol || simplex[0].1 == 0.0 {
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64)
            .collect();
        let (worst, f_worst) = simplex[n].clone();
        let f_best = simplex[0].1;
        let f_second = simplex[n - 1].1;

        let reflected = lerp(&centroid, &worst, -1.0);
        let f_reflected = eval(&reflected);
        if f_reflected < f_best {
            let expanded = lerp(&centroid, &worst, -2.0);
            let f_expanded = eval(&expanded);
            simplex[n] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
            continue;
        }
        if f_reflected < f_second {
            simplex[n] = (reflected, f_reflected);
            continue;
        }
        let (contracted, f_contracted) = if f_reflected < f_worst {
            let c = lerp(&centroid, &reflected, 0.5);
            let v = eval(&c);
            (c, v)
        } else {
            let c = lerp(&centroid, &worst, 0.5);
            let v = eval(&c);
            (c, v)
        };
        if f_contracted < f_worst.min(f_reflected) {
            simplex[n] = (contracted, f_contracted);
            continue;
        }
        for vertex in simplex.iter_mut().skip(1) {
            let x = lerp(&best, &vertex.0, 0.5);
            let v = eval(&x);
            *vertex = (x, v);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    NelderMeadResult {
        x,
        value,
        iterations,
        evaluations,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereSearchOptions {
    pub restarts: usize,
    pub nelder_mead: NelderMeadOptions,
    /// When set, `f(-s) = f(s)` is assumed and only one point per antipodal
    /// pair is scanned.
    pub antipodal_symmetric: bool,
}

impl Default for SphereSearchOptions {
    fn default() -> Self {
        Self {
            restarts: 20,
            nelder_mead: NelderMeadOptions::default(),
            antipodal_symmetric: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SphereMinimum {
    pub point: Vec<f64>,
    pub value: f64,
    /// Sample index the winning restart started from.
    pub start_index: usize,
    pub evaluations: usize,
    /// `(sample index, value)` for every scanned sample, in scan order.
    pub scan: Vec<(usize, f64)>,
}

fn scan<S, F>(samples: &S, f: &F, symmetric: bool) -> Vec<(usize, f64)>
where
    S: AntipodalSamples + Sync,
    F: Fn(&[f64]) -> f64 + Sync,
{
    let indices: Vec<usize> = if symmetric {
        samples.representatives()
    } else {
        (0..samples.len()).collect()
    };
    indices
        .into_par_iter()
        .map(|i| (i, f(samples.point(i))))
        .collect()
}

fn best_starts(scan: &[(usize, f64)], count: usize) -> Vec<usize> {
    let mut ranked = scan.to_vec();
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    ranked
        .into_iter()
        .take(count.max(1))
        .map(|(i, _)| i)
        .collect()
}

/// Picks the lowest value; ties go to the restart listed first.
fn select<T>(candidates: Vec<(T, f64)>) -> (T, f64) {
    candidates
        .into_iter()
        .reduce(|best, cur| if cur.1 < best.1 { cur } else { best })
        .expect("at least one restart")
}

/// Minimizes `f` over S² (mesh scan, then Nelder–Mead in tangent charts).
pub fn minimize_on_sphere<F>(f: F, mesh: &SphereMesh, opts: SphereSearchOptions) -> SphereMinimum
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let scan = scan(mesh, &f, opts.antipodal_symmetric);
    let starts = best_starts(&scan, opts.restarts);
    let step = 0.5 * 1.1 / f64::from(1u32 << mesh.level());
    let runs: Vec<((Vec3, usize, usize), f64)> = starts
        .par_iter()
        .map(|&i| {
            let p = mesh.vertices()[i];
            let frame = tangent_frame(&p);
            let local = |uv: &[f64]| f(&retract(&p, &frame, uv[0], uv[1]));
            let r = nelder_mead(local, &[0.0, 0.0], step, opts.nelder_mead);
            (
                (retract(&p, &frame, r.x[0], r.x[1]), i, r.evaluations),
                r.value,
            )
        })
        .collect();
    let evaluations = scan.len() + runs.iter().map(|((_, _, e), _)| e).sum::<usize>();
    let ((point, start_index, _), value) = select(runs);
    SphereMinimum {
        point: point.to_vec(),
        value,
        start_index,
        evaluations,
        scan,
    }
}

/// Minimizes `f` over S¹ (grid scan, then Nelder–Mead in the angle).
pub fn minimize_on_circle<F>(f: F, grid: &CircleGrid, opts: SphereSearchOptions) -> SphereMinimum
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let scan = scan(grid, &f, opts.antipodal_symmetric);
    let starts = best_starts(&scan, opts.restarts);
    let step = 0.5 * std::f64::consts::TAU / grid.len() as f64;
    let runs: Vec<((f64, usize, usize), f64)> = starts
        .par_iter()
        .map(|&i| {
            let theta0 = grid.angle(i);
            let local = |t: &[f64]| f(&[(theta0 + t[0]).cos(), (theta0 + t[0]).sin()]);
            let r = nelder_mead(local, &[0.0], step, opts.nelder_mead);
            ((theta0 + r.x[0], i, r.evaluations), r.value)
        })
        .collect();
    let evaluations = scan.len() + runs.iter().map(|((_, _, e), _)| e).sum::<usize>();
    let ((theta, start_index, _), value) = select(runs);
    SphereMinimum {
        point: vec![theta.cos(), theta.sin()],
        value,
        start_index,
        evaluations,
        scan,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::dot3;
    use crate::sphere::{circle_grid, icosphere};

    #[test]
    fn nelder_mead_quadratic() {
        let r = nelder_mead(
            |x| (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 2.0).powi(2),
            &[0.0, 0.0],
            0.5,
            Default::default(),
        );
        assert!(
            (r.x[0] - 1.0).abs() < 1e-8 && (r.x[1] + 2.0).abs() < 1e-8,
            "{r:?}"
        );
    }

    #[test]
    fn nelder_mead_cone() {
        let r = nelder_mead(
            |x| (x[0] - 0.3).hypot(2.0 * (x[1] - 0.1)),
            &[0.0, 0.0],
            0.2,
            Default::default(),
        );
        assert!(r.value < 1e-9, "{r:?}");
    }

    #[test]
    fn sphere_minimum_of_distance() {
        let target = [0.48, -0.6, 0.64];
        let mesh = icosphere(3).unwrap();
        let opts = SphereSearchOptions {
            antipodal_symmetric: false,
            ..Default::default()
        };
        let m = minimize_on_sphere(|s| 1.0 - dot3(&[s[0], s[1], s[2]], &target), &mesh, opts);
        assert!(m.value < 1e-12);
        for (p, t) in m.point.iter().zip(target) {
            assert!((p - t).abs() < 1e-6);
        }
    }

    #[test]
    fn circle_minimum_of_symmetric_function() {
        let grid = circle_grid(64).unwrap();
        let a = 0.7f64;
        // zero at angle a and a + pi
        let m = minimize_on_circle(
            |s| (s[0] * a.sin() - s[1] * a.cos()).abs(),
            &grid,
            Default::default(),
        );
        assert!(m.value < 1e-10);
        let angle = m.point[1]
            .atan2(m.point[0])
            .rem_euclid(std::f64::consts::PI);
        assert!((angle - a).abs() < 1e-9);
    }
}
