//! Antipodally symmetric discretizations of S¹ and S².
//!
//! The icosphere keeps an explicit antipode table built alongside the
//! subdivision: the base icosahedron is centrally symmetric and the midpoint
//! of edge `(a, b)` is the negation of the midpoint of `(anti a, anti b)`,
//! bit for bit, because IEEE negation is exact.

use std::collections::HashMap;
use std::io::{self, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::{add3, det3, dot3, norm3, normalize3, sub3, Vec3};

pub const MAX_LEVEL: u32 = 8;

/// Finite point sets on a sphere with an exact antipodal involution.
pub trait AntipodalSamples {
    /// Dimension of the ambient space (2 for S¹, 3 for S²).
    fn ambient_dim(&self) -> usize;
    fn len(&self) -> usize;
    fn point(&self, i: usize) -> &[f64];
    fn antipode(&self, i: usize) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// One representative per antipodal pair, lowest index first.
    fn representatives(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| i < self.antipode(i)).collect()
    }
}

/// Unit vector in R³.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpherePoint(Vec3);

impl SpherePoint {
    pub fn new(coords: Vec3) -> Result<Self> {
        let n = norm3(&coords);
        if !n.is_finite() || (n - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!(
                "|{coords:?}| = {n} is not a unit vector"
            )));
        }
        Ok(Self(coords))
    }

    /// Projects a nonzero vector onto the sphere.
    pub fn from_direction(v: Vec3) -> Result<Self> {
        normalize3(&v)
            .map(Self)
            .ok_or_else(|| Error::Parameter("zero vector has no direction".into()))
    }

    pub fn coords(&self) -> Vec3 {
        self.0
    }

    pub fn antipode(&self) -> Self {
        Self([-self.0[0], -self.0[1], -self.0[2]])
    }
}

#[derive(Clone, Debug)]
pub struct SphereMesh {
    level: u32,
    vertices: Vec<Vec3>,
    faces: Vec<[usize; 3]>,
    antipode: Vec<usize>,
    areas: Vec<f64>,
}

impl SphereMesh {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn antipode_of(&self, i: usize) -> usize {
        self.antipode[i]
    }

    pub fn face_vertices(&self, f: usize) -> [Vec3; 3] {
        let [a, b, c] = self.faces[f];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Centroid of face `f` pushed back onto the sphere.
    pub fn centroid(&self, f: usize) -> Vec3 {
        let [a, b, c] = self.face_vertices(f);
        normalize3(&add3(&add3(&a, &b), &c)).expect("face centroid is never the origin")
    }

    /// Longest chord of face `f`.
    pub fn edge_length(&self, f: usize) -> f64 {
        let [a, b, c] = self.face_vertices(f);
        norm3(&sub3(&a, &b))
            .max(norm3(&sub3(&b, &c)))
            .max(norm3(&sub3(&c, &a)))
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    /// Largest `|v_i + v_anti(i)|` over all vertices.
    pub fn antipodal_defect(&self) -> f64 {
        self.vertices
            .iter()
            .enumerate()
            .map(|(i, v)| norm3(&add3(v, &self.vertices[self.antipode[i]])))
            .fold(0.0, f64::max)
    }

    /// Writes the mesh in OFF format.
    pub fn write_off<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "OFF")?;
        writeln!(out, "{} {} 0", self.vertices.len(), self.faces.len())?;
        for v in &self.vertices {
            writeln!(out, "{:.17} {:.17} {:.17}", v[0], v[1], v[2])?;
        }
        for f in &self.faces {
            writeln!(out, "3 {} {} {}", f[0], f[1], f[2])?;
        }
        Ok(())
    }
}

impl AntipodalSamples for SphereMesh {
    fn ambient_dim(&self) -> usize {
        3
    }

    fn len(&self) -> usize {
        self.vertices.len()
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.vertices[i]
    }

    fn antipode(&self, i: usize) -> usize {
        self.antipode[i]
    }
}

/// Spherical excess of the geodesic triangle `abc` (unit vertices).
pub fn spherical_triangle_area(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let num = det3(a, b, c).abs();
    let den = 1.0 + dot3(a, b) + dot3(b, c) + dot3(c, a);
    2.0 * num.atan2(den)
}

fn base_icosahedron() -> (Vec<Vec3>, Vec<[usize; 3]>, Vec<usize>) {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let s = 1.0 / (1.0 + phi * phi).sqrt();
    let (one, big) = (s, phi * s);
    let mut vertices = Vec::with_capacity(12);
    for &p in &[one, -one] {
        for &q in &[big, -big] {
            vertices.push([0.0, p, q]);
            vertices.push([p, q, 0.0]);
            vertices.push([q, 0.0, p]);
        }
    }
    let antipode: Vec<usize> = vertices
        .iter()
        .map(|v| {
            vertices
                .iter()
                .position(|w| w[0] == -v[0] && w[1] == -v[1] && w[2] == -v[2])
                .expect("icosahedron is centrally symmetric")
        })
        .collect();

    // Adjacent vertices sit at chord 2s; everything else is farther.
    let edge = 2.0 * one;
    let adjacent =
        |i: usize, j: usize| (norm3(&sub3(&vertices[i], &vertices[j])) - edge).abs() < 1e-9;
    let mut faces = Vec::with_capacity(20);
    for i in 0..12 {
        for j in i + 1..12 {
            for k in j + 1..12 {
                if adjacent(i, j) && adjacent(j, k) && adjacent(i, k) {
                    if det3(&vertices[i], &vertices[j], &vertices[k]) > 0.0 {
                        faces.push([i, j, k]);
                    } else {
                        faces.push([i, k, j]);
                    }
                }
            }
        }
    }
    (vertices, faces, antipode)
}

/// Level-times subdivided icosahedron projected onto the unit sphere.
pub fn icosphere(level: u32) -> Result<SphereMesh> {
    if level > MAX_LEVEL {
        return Err(Error::Parameter(format!(
            "mesh level {level} outside 0..={MAX_LEVEL}"
        )));
    }
    let (mut vertices, mut faces, mut antipode) = base_icosahedron();
    for _ in 0..level {
        let mut midpoints: HashMap<(usize, usize), usize> =
            HashMap::with_capacity(faces.len() * 3 / 2);
        let mut next_faces = Vec::with_capacity(faces.len() * 4);
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Vec3>| -> usize {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                let m = normalize3(&add3(&vertices[key.0], &vertices[key.1]))
                    .expect("adjacent vertices");
                vertices.push(m);
                vertices.len() - 1
            })
        };
        for &[a, b, c] in &faces {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next_faces.extend_from_slice(&[[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        }
        let mut next_antipode = antipode.clone();
        next_antipode.resize(vertices.len(), usize::MAX);
        for (&(a, b), &m) in &midpoints {
            let (pa, pb) = (antipode[a], antipode[b]);
            next_antipode[m] = midpoints[&(pa.min(pb), pa.max(pb))];
        }
        antipode = next_antipode;
        faces = next_faces;
    }
    let areas = faces
        .iter()
        .map(|&[a, b, c]| spherical_triangle_area(&vertices[a], &vertices[b], &vertices[c]))
        .collect();
    Ok(SphereMesh {
        level,
        vertices,
        faces,
        antipode,
        areas,
    })
}

/// `sum_f f(centroid_f) * area_f`, reduced in face order.
pub fn surface_integral<F>(mesh: &SphereMesh, f: F) -> f64
where
    F: Fn(&Vec3) -> f64 + Sync,
{
    let values: Vec<f64> = (0..mesh.faces.len())
        .into_par_iter()
        .map(|i| f(&mesh.centroid(i)) * mesh.areas[i])
        .collect();
    values.iter().sum()
}

/// `m` equispaced points on S¹ where point `k + m/2` is the exact negation of point `k`.
#[derive(Clone, Debug)]
pub struct CircleGrid {
    points: Vec<[f64; 2]>,
}

impl CircleGrid {
    pub fn new(m: usize) -> Result<Self> {
        if m < 8 || !m.is_multiple_of(2) {
            return Err(Error::Parameter(format!(
                "circle grid needs even m >= 8, got {m}"
            )));
        }
        let half = m / 2;
        let mut points = Vec::with_capacity(m);
        for k in 0..half {
            let t = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
            points.push([t.cos(), t.sin()]);
        }
        for k in 0..half {
            let p = points[k];
            points.push([-p[0], -p[1]]);
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    /// Parameter angle of point `k`.
    pub fn angle(&self, k: usize) -> f64 {
        2.0 * std::f64::consts::PI * k as f64 / self.points.len() as f64
    }
}

impl AntipodalSamples for CircleGrid {
    fn ambient_dim(&self) -> usize {
        2
    }

    fn len(&self) -> usize {
        self.points.len()
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    fn antipode(&self, i: usize) -> usize {
        (i + self.points.len() / 2) % self.points.len()
    }
}

pub fn circle_grid(m: usize) -> Result<CircleGrid> {
    CircleGrid::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn icosahedron_counts() {
        let m = icosphere(0).unwrap();
        assert_eq!((m.vertices().len(), m.faces().len()), (12, 20));
        let m = icosphere(1).unwrap();
        assert_eq!((m.vertices().len(), m.faces().len()), (42, 80));
        let m = icosphere(3).unwrap();
        assert_eq!((m.vertices().len(), m.faces().len()), (642, 1280));
    }

    #[test]
    fn level_out_of_range() {
        assert!(matches!(icosphere(9), Err(Error::Parameter(_))));
    }

    #[test]
    fn antipode_is_exact_involution() {
        for level in 0..=4 {
            let m = icosphere(level).unwrap();
            assert_eq!(m.antipodal_defect(), 0.0);
            for i in 0..m.vertices().len() {
                assert_eq!(m.antipode_of(m.antipode_of(i)), i);
                assert_ne!(m.antipode_of(i), i);
            }
        }
    }

    #[test]
    fn faces_are_outward_with_positive_area() {
        let m = icosphere(3).unwrap();
        for (f, &area) in m.areas().iter().enumerate() {
            let [a, b, c] = m.face_vertices(f);
            assert!(det3(&a, &b, &c) > 0.0);
            assert!(area > 0.0);
        }
    }

    #[test]
    fn total_area_is_four_pi() {
        for level in [0, 2, 4] {
            let m = icosphere(level).unwrap();
            assert!((m.total_area() - 4.0 * PI).abs() < 1e-6, "level {level}");
        }
    }

    #[test]
    fn integral_examples() {
        let m = icosphere(4).unwrap();
        assert!((surface_integral(&m, |_| 1.0) - 4.0 * PI).abs() < 1e-6);
        assert!((surface_integral(&m, |s| s[2] * s[2]) - 4.0 * PI / 3.0).abs() < 1e-3);
        assert!(surface_integral(&m, |s| s[2]).abs() < 1e-9);
    }

    #[test]
    fn odd_integrands_vanish_at_every_level() {
        for level in 0..=5 {
            let m = icosphere(level).unwrap();
            let v = surface_integral(&m, |s| s[0] * s[1] * s[2] + s[0].powi(3) - 2.0 * s[1]);
            assert!(v.abs() < 1e-9, "level {level}: {v}");
        }
    }

    #[test]
    fn circle_grid_examples() {
        let g = circle_grid(8).unwrap();
        assert_eq!(g.points()[0], [1.0, 0.0]);
        assert_eq!(g.points()[4], [-1.0, -0.0]);
        let g = circle_grid(12).unwrap();
        let gap = g.points()[1][1].atan2(g.points()[1][0]);
        assert!((gap - PI / 6.0).abs() < 1e-15);
        for m in [8, 10, 64, 1000] {
            let g = circle_grid(m).unwrap();
            for k in 0..m {
                let (p, q) = (g.points()[k], g.points()[g.antipode(k)]);
                assert_eq!(p[0], -q[0]);
                assert_eq!(p[1], -q[1]);
            }
        }
    }

    #[test]
    fn circle_grid_rejects_bad_sizes() {
        assert!(circle_grid(7).is_err());
        assert!(circle_grid(6).is_err());
        assert!(circle_grid(9).is_err());
    }

    #[test]
    fn off_export() {
        let m = icosphere(0).unwrap();
        let mut buf = Vec::new();
        m.write_off(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("OFF"));
        assert_eq!(lines.next(), Some("12 20 0"));
        assert_eq!(text.lines().count(), 2 + 12 + 20);
    }

    #[test]
    fn sphere_point_validation() {
        assert!(SpherePoint::new([1.0, 0.0, 0.0]).is_ok());
        assert!(SpherePoint::new([1.0, 1.0, 0.0]).is_err());
        let p = SpherePoint::from_direction([0.0, 3.0, 4.0]).unwrap();
        assert!((p.coords()[1] - 0.6).abs() < 1e-15);
        let q = p.antipode().coords();
        assert_eq!(q, [-p.coords()[0], -p.coords()[1], -p.coords()[2]]);
    }
}
