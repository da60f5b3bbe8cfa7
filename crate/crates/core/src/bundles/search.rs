use serde::Serialize;

use crate::error::Result;
use crate::search::{minimize_on_circle, minimize_on_sphere, SphereSearchOptions};
use crate::sphere::{icosphere, CircleGrid, SphereMesh, MAX_LEVEL};

/// A minimum below this counts as a rank drop.
pub const RANK_DROP_TOL: f64 = 1e-5;

/// Minima in `(RANK_DROP_TOL, RERUN_CEILING)` trigger one finer re-run.
pub const RERUN_CEILING: f64 = 1e-2;

/// Result of minimizing an antipodally symmetric function over a sphere.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub point: Vec<f64>,
    pub value: f64,
    pub mesh_level: u32,
    pub rerun: bool,
    /// Set when the minimum stayed small but positive after the re-run.
    pub warning: bool,
    pub evaluations: usize,
}

fn ambiguous(value: f64) -> bool {
    value > RANK_DROP_TOL && value < RERUN_CEILING
}

/// Flips `p` so its first coordinate with `|x| > 1e-12` is positive.
pub fn canonical_sign(p: &mut [f64]) {
    if let Some(&x) = p.iter().find(|x| x.abs() > 1e-12) {
        if x < 0.0 {
            p.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

/// Mesh scan plus Nelder–Mead refinement of an even function on S², with
/// one re-run at the next mesh level when the minimum is ambiguous.
pub fn search_sphere<F>(f: &F, mesh: &SphereMesh) -> Result<SearchOutcome>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let opts = SphereSearchOptions::default();
    let first = minimize_on_sphere(f, mesh, opts);
    let mut out = SearchOutcome {
        point: first.point,
        value: first.value,
        mesh_level: mesh.level(),
        rerun: false,
        warning: false,
        evaluations: first.evaluations,
    };
    if ambiguous(out.value) && mesh.level() < MAX_LEVEL {
        let finer = icosphere(mesh.level() + 1)?;
        let second = minimize_on_sphere(f, &finer, opts);
        out.rerun = true;
        out.evaluations += second.evaluations;
        if second.value < out.value {
            out.point = second.point;
            out.value = second.value;
            out.mesh_level = finer.level();
        }
    }
    out.warning = ambiguous(out.value);
    canonical_sign(&mut out.point);
    Ok(out)
}

/// Circle analogue of [`search_sphere`]; the re-run doubles the grid.
pub fn search_circle<F>(f: &F, grid: &CircleGrid) -> Result<SearchOutcome>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    use crate::sphere::{circle_grid, AntipodalSamples};
    let opts = SphereSearchOptions::default();
    let first = minimize_on_circle(f, grid, opts);
    let mut out = SearchOutcome {
        point: first.point,
        value: first.value,
        mesh_level: 0,
        rerun: false,
        warning: false,
        evaluations: first.evaluations,
    };
    if ambiguous(out.value) {
        let finer = circle_grid(grid.len() * 2)?;
        let second = minimize_on_circle(f, &finer, opts);
        out.rerun = true;
        out.evaluations += second.evaluations;
        if second.value < out.value {
            out.point = second.point;
            out.value = second.value;
        }
    }
    out.warning = ambiguous(out.value);
    canonical_sign(&mut out.point);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_convention() {
        let mut p = vec![0.0, -0.6, 0.8];
        canonical_sign(&mut p);
        assert_eq!(p, vec![0.0, 0.6, -0.8]);
        let mut q = vec![1e-13, 0.6, 0.8];
        canonical_sign(&mut q);
        assert_eq!(q, vec![1e-13, 0.6, 0.8]);
    }
}
