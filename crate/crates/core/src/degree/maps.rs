use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fields::ParityMap;
use crate::geom::{add3, det3, dot3, norm3, normalize3, scale3, Vec3};
use crate::sphere::{circle_grid, icosphere, CircleGrid, SphereMesh};

/// Outputs shorter than this before normalization are rejected.
pub const DEGENERATE_NORM: f64 = 1e-9;

type CircleFn = dyn Fn(&[f64; 2]) -> [f64; 2] + Send + Sync;
type SurfaceFn = dyn Fn(&Vec3) -> Vec3 + Send + Sync;

fn check_norm(point: &[f64], raw: &[f64]) -> Result<f64> {
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm.is_nan() || norm < DEGENERATE_NORM {
        return Err(Error::DegenerateMap {
            point: point.to_vec(),
            norm,
        });
    }
    Ok(norm)
}

/// A self-map of S¹. Every evaluation is normalized.
#[derive(Clone)]
pub enum CircleMap {
    /// `theta -> k theta`
    Power(i32),
    /// `theta -> k theta + eps sin(2 theta)`; antipode-preserving for odd `k`.
    OddPerturbed {
        k: i32,
        eps: f64,
    },
    /// Polynomial in `(x, y)`, normalized.
    Polynomial(ParityMap),
    Sampled(Arc<SampledCircleMap>),
    Negated(Box<CircleMap>),
    Custom(Arc<CircleFn>),
}

impl CircleMap {
    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(&[f64; 2]) -> [f64; 2] + Send + Sync + 'static,
    {
        CircleMap::Custom(Arc::new(f))
    }

    pub fn negated(self) -> Self {
        CircleMap::Negated(Box::new(self))
    }

    fn raw(&self, p: &[f64; 2]) -> Result<[f64; 2]> {
        Ok(match self {
            CircleMap::Power(k) => {
                let t = f64::from(*k) * p[1].atan2(p[0]);
                [t.cos(), t.sin()]
            }
            CircleMap::OddPerturbed { k, eps } => {
                let theta = p[1].atan2(p[0]);
                let t = f64::from(*k) * theta + eps * (2.0 * theta).sin();
                [t.cos(), t.sin()]
            }
            CircleMap::Polynomial(map) => {
                let v = map.eval(p);
                [v[0], v[1]]
            }
            CircleMap::Sampled(table) => table.interpolate(p),
            CircleMap::Negated(inner) => {
                let v = inner.eval(p)?;
                [-v[0], -v[1]]
            }
            CircleMap::Custom(f) => f(p),
        })
    }

    pub fn eval(&self, p: &[f64; 2]) -> Result<[f64; 2]> {
        let raw = self.raw(p)?;
        let n = check_norm(p, &raw)?;
        Ok([raw[0] / n, raw[1] / n])
    }

    /// Evaluates at parameter angle `theta`.
    pub fn eval_angle(&self, theta: f64) -> Result<[f64; 2]> {
        self.eval(&[theta.cos(), theta.sin()])
    }

    /// Parses `power:k=K`, `odd:k=K,eps=E` and `neg:<spec>`.
    pub fn parse(spec: &str) -> Result<Self> {
        if let Some(rest) = spec.strip_prefix("neg:") {
            return Ok(Self::parse(rest)?.negated());
        }
        let (name, params) = split_spec(spec);
        match name {
            "power" | "circle-power" => Ok(CircleMap::Power(param_i32(&params, "k")?)),
            "odd" | "circle-odd" => Ok(CircleMap::OddPerturbed {
                k: param_i32(&params, "k").unwrap_or(1),
                eps: param_f64(&params, "eps")?,
            }),
            _ => Err(Error::Input(format!("unknown circle map `{spec}`"))),
        }
    }
}

impl fmt::Debug for CircleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CircleMap::Power(k) => write!(f, "Power({k})"),
            CircleMap::OddPerturbed { k, eps } => write!(f, "OddPerturbed(k={k}, eps={eps})"),
            CircleMap::Polynomial(_) => write!(f, "Polynomial"),
            CircleMap::Sampled(t) => write!(f, "Sampled({} values)", t.values.len()),
            CircleMap::Negated(inner) => write!(f, "Negated({inner:?})"),
            CircleMap::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// Values on a circle grid, interpolated linearly in angle then renormalized.
#[derive(Clone, Debug)]
pub struct SampledCircleMap {
    values: Vec<[f64; 2]>,
}

impl SampledCircleMap {
    pub fn new(values: Vec<[f64; 2]>) -> Result<Self> {
        circle_grid(values.len())?;
        for (k, v) in values.iter().enumerate() {
            let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
            if (n - 1.0).abs() > 1e-9 {
                return Err(Error::Input(format!("sample {k} has norm {n}, expected 1")));
            }
        }
        Ok(Self { values })
    }

    pub fn from_map(map: &CircleMap, m: usize) -> Result<Self> {
        let grid: CircleGrid = circle_grid(m)?;
        let values = grid
            .points()
            .iter()
            .map(|p| map.eval(p))
            .collect::<Result<_>>()?;
        Ok(Self { values })
    }

    fn interpolate(&self, p: &[f64; 2]) -> [f64; 2] {
        let m = self.values.len();
        let u =
            p[1].atan2(p[0]).rem_euclid(std::f64::consts::TAU) / std::f64::consts::TAU * m as f64;
        let k = (u.floor() as usize).min(m - 1);
        let t = u - k as f64;
        let (a, b) = (self.values[k], self.values[(k + 1) % m]);
        [(1.0 - t) * a[0] + t * b[0], (1.0 - t) * a[1] + t * b[1]]
    }
}

/// A self-map of S². Every evaluation is normalized.
#[derive(Clone)]
pub enum SurfaceMap {
    Identity,
    Antipodal,
    /// Rotates longitude `k` times about the z axis, fixing z.
    Suspension(i32),
    /// `s -> M s` (row-major), normalized.
    Linear([[f64; 3]; 3]),
    Polynomial(ParityMap),
    /// `base(s) + weight * field(s)`, normalized.
    Perturbed {
        base: Box<SurfaceMap>,
        field: ParityMap,
        weight: f64,
    },
    /// `outer(inner(s))`
    Composed {
        outer: Box<SurfaceMap>,
        inner: Box<SurfaceMap>,
    },
    /// `(1 - t) from(s) + t to(s)`, normalized.
    Homotopy {
        from: Box<SurfaceMap>,
        to: Box<SurfaceMap>,
        t: f64,
    },
    Sampled(Arc<SampledSurfaceMap>),
    Negated(Box<SurfaceMap>),
    Custom(Arc<SurfaceFn>),
}

impl SurfaceMap {
    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(&Vec3) -> Vec3 + Send + Sync + 'static,
    {
        SurfaceMap::Custom(Arc::new(f))
    }

    pub fn negated(self) -> Self {
        SurfaceMap::Negated(Box::new(self))
    }

    pub fn compose(outer: SurfaceMap, inner: SurfaceMap) -> Self {
        SurfaceMap::Composed {
            outer: Box::new(outer),
            inner: Box::new(inner),
        }
    }

    pub fn homotopy(from: SurfaceMap, to: SurfaceMap, t: f64) -> Self {
        SurfaceMap::Homotopy {
            from: Box::new(from),
            to: Box::new(to),
            t,
        }
    }

    /// Rotation by `angle` about `axis` (Rodrigues).
    pub fn rotation(axis: Vec3, angle: f64) -> Self {
        let k = normalize3(&axis).expect("rotation axis must be nonzero");
        let (s, c) = angle.sin_cos();
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                let delta = if i == j { 1.0 } else { 0.0 };
                let cross = match (i, j) {
                    (0, 1) => -k[2],
                    (0, 2) => k[1],
                    (1, 0) => k[2],
                    (1, 2) => -k[0],
                    (2, 0) => -k[1],
                    (2, 1) => k[0],
                    _ => 0.0,
                };
                *entry = c * delta + s * cross + (1.0 - c) * k[i] * k[j];
            }
        }
        SurfaceMap::Linear(m)
    }

    fn raw(&self, s: &Vec3) -> Result<Vec3> {
        Ok(match self {
            SurfaceMap::Identity => *s,
            SurfaceMap::Antipodal => [-s[0], -s[1], -s[2]],
            SurfaceMap::Suspension(k) => {
                let r = s[0].hypot(s[1]);
                if r == 0.0 {
                    [0.0, 0.0, s[2]]
                } else {
                    let t = f64::from(*k) * s[1].atan2(s[0]);
                    [r * t.cos(), r * t.sin(), s[2]]
                }
            }
            SurfaceMap::Linear(m) => [dot3(&m[0], s), dot3(&m[1], s), dot3(&m[2], s)],
            SurfaceMap::Polynomial(map) => {
                let v = map.eval(s);
                [v[0], v[1], v[2]]
            }
            SurfaceMap::Perturbed {
                base,
                field,
                weight,
            } => {
                let b = base.eval(s)?;
                let v = field.eval(s);
                add3(&b, &scale3(&[v[0], v[1], v[2]], *weight))
            }
            SurfaceMap::Composed { outer, inner } => outer.raw(&inner.eval(s)?)?,
            SurfaceMap::Homotopy { from, to, t } => {
                add3(&scale3(&from.eval(s)?, 1.0 - t), &scale3(&to.eval(s)?, *t))
            }
            SurfaceMap::Sampled(table) => table.interpolate(s),
            SurfaceMap::Negated(inner) => scale3(&inner.eval(s)?, -1.0),
            SurfaceMap::Custom(f) => f(s),
        })
    }

    pub fn eval(&self, s: &Vec3) -> Result<Vec3> {
        let raw = self.raw(s)?;
        let n = check_norm(s, &raw)?;
        Ok(scale3(&raw, 1.0 / n))
    }

    /// Parses `identity`, `antipodal`, `suspension:k=K`, `reflection`,
    /// `linear:a11,a12,...,a33`, `odd-cubic`, or any of these behind `neg:`.
    pub fn parse(spec: &str) -> Result<Self> {
        if let Some(rest) = spec.strip_prefix("neg:") {
            return Ok(Self::parse(rest)?.negated());
        }
        if let Some(rest) = spec.strip_prefix("linear:") {
            let entries: Vec<f64> = rest
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Input(format!("linear entry `{x}`: {e}")))
                })
                .collect::<Result<_>>()?;
            if entries.len() != 9 {
                return Err(Error::Input(format!(
                    "linear map needs 9 entries, got {}",
                    entries.len()
                )));
            }
            let mut m = [[0.0; 3]; 3];
            for (i, row) in m.iter_mut().enumerate() {
                row.copy_from_slice(&entries[3 * i..3 * i + 3]);
            }
            return Ok(SurfaceMap::Linear(m));
        }
        let (name, params) = split_spec(spec);
        match name {
            "identity" => Ok(SurfaceMap::Identity),
            "antipodal" => Ok(SurfaceMap::Antipodal),
            "suspension" => Ok(SurfaceMap::Suspension(param_i32(&params, "k")?)),
            "reflection" => Ok(SurfaceMap::Linear([
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, 0.0, -1.0],
            ])),
            "odd-cubic" => Ok(odd_cubic()),
            _ => Err(Error::Input(format!("unknown map `{spec}`"))),
        }
    }

    /// Ten closed-form maps with known degrees, paired with those degrees.
    pub fn builtin_family() -> Vec<(&'static str, SurfaceMap, i64)> {
        let shear = [[1.0, 0.8, 0.0], [0.0, 1.0, -0.5], [0.3, 0.0, 1.0]];
        vec![
            ("identity", SurfaceMap::Identity, 1),
            ("antipodal", SurfaceMap::Antipodal, -1),
            ("suspension:k=-2", SurfaceMap::Suspension(-2), -2),
            ("suspension:k=2", SurfaceMap::Suspension(2), 2),
            ("suspension:k=3", SurfaceMap::Suspension(3), 3),
            (
                "reflection",
                SurfaceMap::parse("reflection").expect("builtin"),
                -1,
            ),
            ("rotation", SurfaceMap::rotation([1.0, 2.0, 2.0], 1.1), 1),
            ("shear", SurfaceMap::Linear(shear), 1),
            ("odd-cubic", odd_cubic(), 1),
            (
                "tilted-suspension:k=-3",
                SurfaceMap::compose(
                    SurfaceMap::rotation([0.0, 1.0, 1.0], 0.7),
                    SurfaceMap::Suspension(-3),
                ),
                -3,
            ),
        ]
    }
}

/// `s + (x³, y³, z³)/2`, an odd map homotopic to the identity.
fn odd_cubic() -> SurfaceMap {
    SurfaceMap::custom(|s| {
        [
            s[0] + 0.5 * s[0].powi(3),
            s[1] + 0.5 * s[1].powi(3),
            s[2] + 0.5 * s[2].powi(3),
        ]
    })
}

impl fmt::Debug for SurfaceMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceMap::Identity => write!(f, "Identity"),
            SurfaceMap::Antipodal => write!(f, "Antipodal"),
            SurfaceMap::Suspension(k) => write!(f, "Suspension({k})"),
            SurfaceMap::Linear(m) => write!(f, "Linear({m:?})"),
            SurfaceMap::Polynomial(_) => write!(f, "Polynomial"),
            SurfaceMap::Perturbed { base, weight, .. } => {
                write!(f, "Perturbed({base:?}, weight={weight})")
            }
            SurfaceMap::Composed { outer, inner } => write!(f, "Composed({outer:?} . {inner:?})"),
            SurfaceMap::Homotopy { from, to, t } => {
                write!(f, "Homotopy({from:?} -> {to:?}, t={t})")
            }
            SurfaceMap::Sampled(t) => write!(f, "Sampled(level {})", t.mesh.level()),
            SurfaceMap::Negated(inner) => write!(f, "Negated({inner:?})"),
            SurfaceMap::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// Values on icosphere vertices with spherical barycentric interpolation.
#[derive(Clone, Debug)]
pub struct SampledSurfaceMap {
    mesh: SphereMesh,
    values: Vec<Vec3>,
    centroids: Vec<Vec3>,
    /// Cosine of the largest centroid-to-vertex angle, with slack.
    cos_radius: f64,
}

impl SampledSurfaceMap {
    pub fn new(level: u32, values: Vec<Vec3>) -> Result<Self> {
        let mesh = icosphere(level)?;
        if values.len() != mesh.vertices().len() {
            return Err(Error::Input(format!(
                "level {level} mesh has {} vertices, got {} samples",
                mesh.vertices().len(),
                values.len()
            )));
        }
        for (k, v) in values.iter().enumerate() {
            let n = norm3(v);
            if (n - 1.0).abs() > 1e-9 {
                return Err(Error::Input(format!("sample {k} has norm {n}, expected 1")));
            }
        }
        let centroids: Vec<Vec3> = (0..mesh.faces().len()).map(|f| mesh.centroid(f)).collect();
        let cos_radius = (0..mesh.faces().len())
            .flat_map(|f| mesh.face_vertices(f).into_iter().map(move |v| (f, v)))
            .map(|(f, v)| dot3(&centroids[f], &v))
            .fold(1.0, f64::min)
            - 1e-12;
        Ok(Self {
            mesh,
            values,
            centroids,
            cos_radius,
        })
    }

    pub fn from_map(map: &SurfaceMap, level: u32) -> Result<Self> {
        let mesh = icosphere(level)?;
        let values = mesh
            .vertices()
            .iter()
            .map(|v| map.eval(v))
            .collect::<Result<_>>()?;
        Self::new(level, values)
    }

    pub fn level(&self) -> u32 {
        self.mesh.level()
    }

    pub fn values(&self) -> &[Vec3] {
        &self.values
    }

    fn interpolate(&self, s: &Vec3) -> Vec3 {
        let mut best: Option<(f64, [f64; 3], usize)> = None;
        for (f, c) in self.centroids.iter().enumerate() {
            if dot3(c, s) < self.cos_radius {
                continue;
            }
            let [a, b, cc] = self.mesh.face_vertices(f);
            let d = det3(&a, &b, &cc);
            let w = [
                det3(s, &b, &cc) / d,
                det3(&a, s, &cc) / d,
                det3(&a, &b, s) / d,
            ];
            let worst = w[0].min(w[1]).min(w[2]);
            if best.as_ref().is_none_or(|(bw, _, _)| worst > *bw) {
                best = Some((worst, w, f));
            }
            if worst >= 0.0 {
                break;
            }
        }
        let (_, w, f) = best.expect("every point lies near some face");
        let [i, j, k] = self.mesh.faces()[f];
        let total = w[0] + w[1] + w[2];
        let mut out = [0.0; 3];
        for (weight, idx) in w.iter().zip([i, j, k]) {
            let v = &self.values[idx];
            for d in 0..3 {
                out[d] += weight / total * v[d];
            }
        }
        out
    }
}

fn split_spec(spec: &str) -> (&str, Vec<(&str, &str)>) {
    let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let params = rest
        .split(',')
        .filter(|p| !p.is_empty())
        .map(|p| p.split_once('=').unwrap_or((p, "")))
        .collect();
    (name.trim(), params)
}

fn param<'a>(params: &[(&str, &'a str)], key: &str) -> Result<&'a str> {
    params
        .iter()
        .find(|(k, _)| k.trim() == key)
        .map(|(_, v)| v.trim())
        .ok_or_else(|| Error::Input(format!("missing parameter `{key}`")))
}

fn param_i32(params: &[(&str, &str)], key: &str) -> Result<i32> {
    let v = param(params, key)?;
    v.parse()
        .map_err(|e| Error::Input(format!("parameter `{key}={v}`: {e}")))
}

fn param_f64(params: &[(&str, &str)], key: &str) -> Result<f64> {
    let v = param(params, key)?;
    v.parse()
        .map_err(|e| Error::Input(format!("parameter `{key}={v}`: {e}")))
}
