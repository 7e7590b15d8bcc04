use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::Vec2;
use crate::error::{Error, Result};

/// Which side of its flat apex a power-profile body occupies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Body extends toward +x₁ from the apex.
    Right,
    /// Body extends toward −x₁ from the apex.
    Left,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Right => 1.0,
            Side::Left => -1.0,
        }
    }
}

/// A smooth closed convex curve.
///
/// Every shape is parameterized counterclockwise by `t ∈ [0, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeSpec {
    Disk {
        center: Vec2,
        radius: f64,
    },
    Ellipse {
        center: Vec2,
        semi_axes: [f64; 2],
        #[serde(default)]
        rotation: f64,
    },
    /// Body whose face near `apex` is the graph `|x₁ − apex₁| = scale·|x₂ − apex₂|^(2·power)`
    /// for `|x₂ − apex₂| ≤ half_width`, closed by a tangent circular arc.
    /// `t = 0` is the apex.
    PowerPairProfile {
        apex: Vec2,
        side: Side,
        power: u32,
        scale: f64,
        #[serde(default = "default_half_width")]
        half_width: f64,
    },
}

fn default_half_width() -> f64 {
    0.8
}

/// Derived quantities of a power profile in its local frame (apex at the
/// origin, body toward +X).
#[derive(Clone, Copy, Debug)]
struct PowerGeom {
    scale: f64,
    two_l: i32,
    w: f64,
    /// X of the face endpoints.
    xp: f64,
    /// Arc center on the X axis.
    c: f64,
    r: f64,
    /// Half opening angle of the arc.
    alpha: f64,
    /// Parameter fraction spent on the face.
    tau: f64,
}

impl PowerGeom {
    fn new(scale: f64, power: u32, w: f64) -> Self {
        let two_l = 2 * power as i32;
        let xp = scale * w.powi(two_l);
        let slope = two_l as f64 * scale * w.powi(two_l - 1);
        let t = w / slope;
        let c = xp + t;
        let r = t * (1.0 + slope * slope).sqrt();
        let alpha = w.atan2(xp - c);
        // face arc length by composite Simpson
        let n = 400;
        let h = 2.0 * w / n as f64;
        let speed = |y: f64| {
            let dx = two_l as f64 * scale * y.abs().powi(two_l - 1);
            (1.0 + dx * dx).sqrt()
        };
        let mut face_len = speed(-w) + speed(w);
        for k in 1..n {
            let y = -w + k as f64 * h;
            face_len += if k % 2 == 1 { 4.0 } else { 2.0 } * speed(y);
        }
        face_len *= h / 3.0;
        let arc_len = 2.0 * alpha * r;
        PowerGeom {
            scale,
            two_l,
            w,
            xp,
            c,
            r,
            alpha,
            tau: face_len / (face_len + arc_len),
        }
    }

    fn face_x(&self, y: f64) -> (f64, f64, f64) {
        let l = self.two_l;
        let lf = l as f64;
        let a = y.abs();
        let x = self.scale * a.powi(l);
        let dx = lf * self.scale * a.powi(l - 1) * y.signum();
        let ddx = lf * (lf - 1.0) * self.scale * a.powi(l - 2);
        (x, dx, ddx)
    }

    /// Local point, first and second derivative for `u ∈ [0, 1)`.
    fn eval(&self, u: f64) -> (Vec2, Vec2, Vec2) {
        let half = 0.5 * self.tau;
        let dy = -self.w / half;
        if u < half || u >= 1.0 - half {
            let y = if u < half {
                dy * u
            } else {
                self.w + dy * (u - (1.0 - half))
            };
            let (x, dx, ddx) = self.face_x(y);
            (
                Vec2::new(x, y),
                Vec2::new(dx * dy, dy),
                Vec2::new(ddx * dy * dy, 0.0),
            )
        } else {
            let rate = 2.0 * self.alpha / (1.0 - self.tau);
            let phi = -self.alpha + (u - half) * rate;
            let (s, c) = phi.sin_cos();
            (
                Vec2::new(self.c + self.r * c, self.r * s),
                Vec2::new(-self.r * s * rate, self.r * c * rate),
                Vec2::new(-self.r * c * rate * rate, -self.r * s * rate * rate),
            )
        }
    }

    fn contains(&self, p: Vec2) -> bool {
        if p.x < self.xp {
            p.y.abs() < self.w && p.x > self.face_x(p.y).0
        } else {
            (p - Vec2::new(self.c, 0.0)).norm() < self.r
        }
    }

    /// Closest point on the face graph: returns (distance, y).
    fn face_closest(&self, p: Vec2) -> (f64, f64) {
        let d2 = |y: f64| {
            let x = self.face_x(y).0;
            (x - p.x).powi(2) + (y - p.y).powi(2)
        };
        let n = 128;
        let h = 2.0 * self.w / n as f64;
        let mut best = (f64::INFINITY, 0usize);
        for k in 0..=n {
            let v = d2(-self.w + k as f64 * h);
            if v < best.0 {
                best = (v, k);
            }
        }
        let mut lo = (-self.w + (best.1 as f64 - 1.0) * h).max(-self.w);
        let mut hi = (-self.w + (best.1 as f64 + 1.0) * h).min(self.w);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut a = hi - g * (hi - lo);
        let mut b = lo + g * (hi - lo);
        let (mut fa, mut fb) = (d2(a), d2(b));
        for _ in 0..90 {
            if fa < fb {
                hi = b;
                b = a;
                fb = fa;
                a = hi - g * (hi - lo);
                fa = d2(a);
            } else {
                lo = a;
                a = b;
                fa = fb;
                b = lo + g * (hi - lo);
                fb = d2(b);
            }
        }
        let y = 0.5 * (lo + hi);
        (d2(y).sqrt(), y)
    }

    /// Closest point on the arc: returns (distance, clamped angle).
    fn arc_closest(&self, p: Vec2) -> (f64, f64) {
        let q = p - Vec2::new(self.c, 0.0);
        let theta = q.y.atan2(q.x).clamp(-self.alpha, self.alpha);
        let foot = Vec2::new(self.c, 0.0) + Vec2::from_polar(self.r, theta);
        (foot.dist(p), theta)
    }

    /// Closest point in local coordinates: (distance, local parameter).
    fn closest(&self, p: Vec2) -> (f64, f64) {
        let (df, y) = self.face_closest(p);
        let (da, theta) = self.arc_closest(p);
        let half = 0.5 * self.tau;
        if df <= da {
            let u = if y <= 0.0 {
                -y / self.w * half
            } else {
                1.0 - y / self.w * half
            };
            (df, u.rem_euclid(1.0))
        } else {
            let u = half + (theta + self.alpha) / (2.0 * self.alpha) * (1.0 - self.tau);
            (da, u)
        }
    }
}

/// Closest point on the ellipse `(x/e0)² + (y/e1)² = 1`, `e0 ≥ e1`, for a
/// query in the closed first quadrant.
fn ellipse_closest_quadrant(e0: f64, e1: f64, y0: f64, y1: f64) -> (f64, f64) {
    if y1 > 0.0 {
        if y0 > 0.0 {
            let z0 = y0 / e0;
            let z1 = y1 / e1;
            let g = z0 * z0 + z1 * z1 - 1.0;
            if g != 0.0 {
                let r0 = (e0 / e1).powi(2);
                let s = ellipse_root(r0, z0, z1, g);
                (r0 * y0 / (s + r0), y1 / (s + 1.0))
            } else {
                (y0, y1)
            }
        } else {
            (0.0, e1)
        }
    } else {
        let numer = e0 * y0;
        let denom = e0 * e0 - e1 * e1;
        if numer < denom {
            let xde = numer / denom;
            (e0 * xde, e1 * (1.0 - xde * xde).max(0.0).sqrt())
        } else {
            (e0, 0.0)
        }
    }
}

fn ellipse_root(r0: f64, z0: f64, z1: f64, g: f64) -> f64 {
    let n0 = r0 * z0;
    let mut s0 = z1 - 1.0;
    let mut s1 = if g < 0.0 { 0.0 } else { n0.hypot(z1) - 1.0 };
    let mut s = 0.0;
    for _ in 0..1100 {
        s = 0.5 * (s0 + s1);
        if s == s0 || s == s1 {
            break;
        }
        let ratio0 = n0 / (s + r0);
        let ratio1 = z1 / (s + 1.0);
        let gs = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
        if gs > 0.0 {
            s0 = s;
        } else if gs < 0.0 {
            s1 = s;
        } else {
            break;
        }
    }
    s
}

impl ShapeSpec {
    pub fn disk(center: Vec2, radius: f64) -> Self {
        ShapeSpec::Disk { center, radius }
    }

    pub fn ellipse(center: Vec2, a: f64, b: f64, rotation: f64) -> Self {
        ShapeSpec::Ellipse {
            center,
            semi_axes: [a, b],
            rotation,
        }
    }

    pub fn power_profile(apex: Vec2, side: Side, power: u32, scale: f64) -> Self {
        ShapeSpec::PowerPairProfile {
            apex,
            side,
            power,
            scale,
            half_width: default_half_width(),
        }
    }

    /// Checks the parameter invariants of the shape itself.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Inadmissible(msg));
        match *self {
            ShapeSpec::Disk { radius, .. } if !(radius > 0.0) => {
                bad(format!("disk radius must be positive, got {radius}"))
            }
            ShapeSpec::Ellipse { semi_axes, .. } if !(semi_axes[0] > 0.0 && semi_axes[1] > 0.0) => {
                bad(format!("ellipse semi-axes must be positive, got {semi_axes:?}"))
            }
            ShapeSpec::PowerPairProfile {
                power,
                scale,
                half_width,
                ..
            } => {
                if power < 1 {
                    return bad("power profile exponent must be at least 1".into());
                }
                if !(scale > 0.0 && half_width > 0.0) {
                    return bad(format!(
                        "power profile needs positive scale and half width, got {scale}, {half_width}"
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn power_geom(&self) -> Option<(PowerGeom, Vec2, f64)> {
        match *self {
            ShapeSpec::PowerPairProfile {
                apex,
                side,
                power,
                scale,
                half_width,
            } => Some((PowerGeom::new(scale, power, half_width), apex, side.sign())),
            _ => None,
        }
    }

    /// Point, first and second derivative with respect to `t`.
    pub fn eval(&self, t: f64) -> (Vec2, Vec2, Vec2) {
        let t = t.rem_euclid(1.0);
        match *self {
            ShapeSpec::Disk { center, radius } => {
                let th = TAU * t;
                let (s, c) = th.sin_cos();
                (
                    center + Vec2::new(radius * c, radius * s),
                    Vec2::new(-radius * s * TAU, radius * c * TAU),
                    Vec2::new(-radius * c * TAU * TAU, -radius * s * TAU * TAU),
                )
            }
            ShapeSpec::Ellipse {
                center,
                semi_axes: [a, b],
                rotation,
            } => {
                let th = TAU * t;
                let (s, c) = th.sin_cos();
                let p = Vec2::new(a * c, b * s).rotate(rotation);
                let d = Vec2::new(-a * s * TAU, b * c * TAU).rotate(rotation);
                let dd = Vec2::new(-a * c * TAU * TAU, -b * s * TAU * TAU).rotate(rotation);
                (center + p, d, dd)
            }
            ShapeSpec::PowerPairProfile { .. } => {
                let (g, apex, sign) = self.power_geom().unwrap();
                if sign > 0.0 {
                    let (p, d, dd) = g.eval(t);
                    (apex + p, d, dd)
                } else {
                    let (p, d, dd) = g.eval((1.0 - t).rem_euclid(1.0));
                    (
                        apex + Vec2::new(-p.x, p.y),
                        Vec2::new(d.x, -d.y),
                        Vec2::new(-dd.x, dd.y),
                    )
                }
            }
        }
    }

    pub fn point(&self, t: f64) -> Vec2 {
        self.eval(t).0
    }

    /// Signed curvature at parameter `t` (positive for a convex counterclockwise curve).
    pub fn curvature_at(&self, t: f64) -> f64 {
        let (_, d, dd) = self.eval(t);
        d.cross(dd) / d.norm().powi(3)
    }

    /// `n` equally spaced parameter samples of the boundary.
    pub fn sample(&self, n: usize) -> Vec<Vec2> {
        (0..n).map(|k| self.point(k as f64 / n as f64)).collect()
    }

    /// True for points in the open region bounded by the curve.
    pub fn contains(&self, p: Vec2) -> bool {
        match *self {
            ShapeSpec::Disk { center, radius } => (p - center).norm() < radius,
            ShapeSpec::Ellipse {
                center,
                semi_axes: [a, b],
                rotation,
            } => {
                let q = (p - center).rotate(-rotation);
                (q.x / a).powi(2) + (q.y / b).powi(2) < 1.0
            }
            ShapeSpec::PowerPairProfile { .. } => {
                let (g, apex, sign) = self.power_geom().unwrap();
                let q = p - apex;
                g.contains(Vec2::new(sign * q.x, q.y))
            }
        }
    }

    /// Closest boundary point to `p` and its parameter.
    pub fn closest_point(&self, p: Vec2) -> (Vec2, f64) {
        match *self {
            ShapeSpec::Disk { center, radius } => {
                let q = p - center;
                let th = if q.norm() == 0.0 { 0.0 } else { q.y.atan2(q.x) };
                let t = (th / TAU).rem_euclid(1.0);
                (center + Vec2::from_polar(radius, th), t)
            }
            ShapeSpec::Ellipse {
                center,
                semi_axes: [a, b],
                rotation,
            } => {
                let q = (p - center).rotate(-rotation);
                let (sx, sy) = (q.x.signum(), q.y.signum());
                let (x, y) = if a >= b {
                    ellipse_closest_quadrant(a, b, q.x.abs(), q.y.abs())
                } else {
                    let (y, x) = ellipse_closest_quadrant(b, a, q.y.abs(), q.x.abs());
                    (x, y)
                };
                let local = Vec2::new(sx * x, sy * y);
                let t = ((local.y / b).atan2(local.x / a) / TAU).rem_euclid(1.0);
                (center + local.rotate(rotation), t)
            }
            ShapeSpec::PowerPairProfile { .. } => {
                let (g, apex, sign) = self.power_geom().unwrap();
                let q = p - apex;
                let (_, u) = g.closest(Vec2::new(sign * q.x, q.y));
                let t = if sign > 0.0 {
                    u
                } else {
                    (1.0 - u).rem_euclid(1.0)
                };
                (self.point(t), t)
            }
        }
    }

    /// Unsigned distance from `p` to the boundary curve.
    pub fn boundary_distance(&self, p: Vec2) -> f64 {
        match *self {
            ShapeSpec::Disk { center, radius } => ((p - center).norm() - radius).abs(),
            _ => self.closest_point(p).0.dist(p),
        }
    }

    /// Distance from an outside point to the closed region (0 inside).
    pub fn distance_to_region(&self, p: Vec2) -> f64 {
        if self.contains(p) {
            0.0
        } else {
            self.boundary_distance(p)
        }
    }

    pub fn diameter(&self) -> f64 {
        match *self {
            ShapeSpec::Disk { radius, .. } => 2.0 * radius,
            ShapeSpec::Ellipse { semi_axes, .. } => 2.0 * semi_axes[0].max(semi_axes[1]),
            ShapeSpec::PowerPairProfile { .. } => {
                let pts = self.sample(512);
                let mut d: f64 = 0.0;
                for (i, a) in pts.iter().enumerate() {
                    for b in &pts[i + 1..] {
                        d = d.max(a.dist(*b));
                    }
                }
                d
            }
        }
    }

    /// Whether the curvature lower bound applies to this shape.
    pub fn is_strictly_convex(&self) -> bool {
        !matches!(self, ShapeSpec::PowerPairProfile { .. })
    }

    /// A point well inside the region.
    pub fn interior_point(&self) -> Vec2 {
        match *self {
            ShapeSpec::Disk { center, .. } | ShapeSpec::Ellipse { center, .. } => center,
            ShapeSpec::PowerPairProfile { .. } => {
                let (g, apex, sign) = self.power_geom().unwrap();
                apex + Vec2::new(sign * g.c, 0.0)
            }
        }
    }

    /// Approximate perimeter from a dense polyline.
    pub fn perimeter(&self) -> f64 {
        match *self {
            ShapeSpec::Disk { radius, .. } => TAU * radius,
            _ => {
                let pts = self.sample(4096);
                pts.iter()
                    .zip(pts.iter().cycle().skip(1))
                    .map(|(a, b)| a.dist(*b))
                    .sum()
            }
        }
    }
}

/// Curvature at `samples` equally spaced parameters.
pub fn curvature_profile(shape: &ShapeSpec, samples: usize) -> Result<Vec<f64>> {
    if samples < 8 {
        return Err(Error::Config(format!(
            "curvature profile needs at least 8 samples, got {samples}"
        )));
    }
    Ok((0..samples)
        .map(|k| shape.curvature_at(k as f64 / samples as f64))
        .collect())
}

#[allow(dead_code)]
pub(crate) fn wrap_angle(a: f64) -> f64 {
    (a + PI).rem_euclid(TAU) - PI
}
