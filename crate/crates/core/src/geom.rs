//! Three-vector helpers on plain `[f64; 3]` arrays.

pub type Vec3 = [f64; 3];

#[inline]
pub fn dot3(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn add3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale3(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn neg3(a: &Vec3) -> Vec3 {
    [-a[0], -a[1], -a[2]]
}

#[inline]
pub fn norm3(a: &Vec3) -> f64 {
    dot3(a, a).sqrt()
}

/// Triple product `det[a b c]`.
#[inline]
pub fn det3(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    dot3(a, &cross(b, c))
}

pub fn normalize3(a: &Vec3) -> Option<Vec3> {
    let n = norm3(a);
    (n > 0.0).then(|| scale3(a, 1.0 / n))
}

/// Orthonormal tangent pair `(e1, e2)` at unit `p` with `e1 x e2 = p`.
pub fn tangent_frame(p: &Vec3) -> (Vec3, Vec3) {
    let axis = if p[0].abs() <= p[1].abs() && p[0].abs() <= p[2].abs() {
        [1.0, 0.0, 0.0]
    } else if p[1].abs() <= p[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let e1 = normalize3(&sub3(&axis, &scale3(p, dot3(&axis, p)))).expect("axis chosen off p");
    let e2 = cross(p, &e1);
    (e1, e2)
}

/// Point `normalize(p + u e1 + v e2)` of the chart centred at `p`.
pub fn retract(p: &Vec3, frame: &(Vec3, Vec3), u: f64, v: f64) -> Vec3 {
    let q = add3(p, &add3(&scale3(&frame.0, u), &scale3(&frame.1, v)));
    normalize3(&q).expect("chart point is never the origin near p")
}
