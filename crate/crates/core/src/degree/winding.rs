use std::f64::consts::{PI, TAU};

use super::maps::CircleMap;
use super::{DegreeMethod, DegreeReport};
use crate::error::{Error, Result};
use crate::sphere::{circle_grid, AntipodalSamples, CircleGrid};

/// Largest grid the lift will refine to.
pub const MAX_CIRCLE_SAMPLES: usize = 1 << 20;

/// Refinement is triggered once any consecutive image gap reaches this.
const REFINE_JUMP: f64 = PI / 2.0;

fn wrap(delta: f64) -> f64 {
    let d = delta.rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// Image angles on an `m`-point grid and the signed consecutive gaps
/// (including the closing gap back to the first sample).
fn lifted_steps(f: &CircleMap, m: usize) -> Result<Vec<f64>> {
    let grid = circle_grid(m)?;
    let angles: Vec<f64> = grid
        .points()
        .iter()
        .map(|p| f.eval(p).map(|v| v[1].atan2(v[0])))
        .collect::<Result<_>>()?;
    Ok((0..m)
        .map(|k| wrap(angles[(k + 1) % m] - angles[k]))
        .collect())
}

/// Doubles the grid until consecutive gaps are comfortably below pi.
fn resolved_steps(f: &CircleMap, m: usize) -> Result<(Vec<f64>, usize)> {
    let mut m = m;
    loop {
        let steps = lifted_steps(f, m)?;
        let jump = steps.iter().map(|d| d.abs()).fold(0.0, f64::max);
        if jump < REFINE_JUMP {
            return Ok((steps, m));
        }
        if m * 2 > MAX_CIRCLE_SAMPLES {
            if jump < PI {
                return Ok((steps, m));
            }
            return Err(Error::Undersampled { jump, samples: m });
        }
        m *= 2;
    }
}

/// Degree of a self-map of S¹ by lifting the image angle along the grid.
pub fn winding_number(f: &CircleMap, m: usize) -> Result<DegreeReport> {
    let (steps, _) = resolved_steps(f, m)?;
    let raw = steps.iter().sum::<f64>() / TAU;
    Ok(DegreeReport::from_raw(raw, DegreeMethod::AngleLift))
}

/// Lifted image angle accumulated over the upper half of the circle, in
/// units of pi. Odd integer for antipode-preserving maps.
pub fn half_arc_turns(f: &CircleMap, m: usize) -> Result<f64> {
    let (steps, m) = resolved_steps(f, m)?;
    Ok(steps[..m / 2].iter().sum::<f64>() / PI)
}

/// `(1/2pi) ∫_0^1 (g1 g2' - g2 g1') dt` by the periodic trapezoid rule, with
/// `g'` from central differences at each node.
pub fn winding_integral(g: &CircleMap, m: usize) -> Result<f64> {
    let (_, m) = resolved_steps(g, m)?;
    let h = 1e-6 / m as f64;
    let mut total = 0.0;
    for k in 0..m {
        let t = k as f64 / m as f64;
        let v = g.eval_angle(TAU * t)?;
        let plus = g.eval_angle(TAU * (t + h))?;
        let minus = g.eval_angle(TAU * (t - h))?;
        let d = [
            (plus[0] - minus[0]) / (2.0 * h),
            (plus[1] - minus[1]) / (2.0 * h),
        ];
        total += v[0] * d[1] - v[1] * d[0];
    }
    Ok(total / m as f64 / TAU)
}

/// `max |f(-s) + f(s)|` over the antipodal pairs of `grid`.
pub fn check_antipode_preserving_circle(f: &CircleMap, grid: &CircleGrid) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in grid.representatives() {
        let a = f.eval(&grid.points()[i])?;
        let b = f.eval(&grid.points()[grid.antipode(i)])?;
        worst = worst.max((a[0] + b[0]).hypot(a[1] + b[1]));
    }
    Ok(worst)
}
