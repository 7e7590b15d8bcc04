use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::geometry::Vec2;

const INV_2PI: f64 = 0.5 / PI;

/// Integrals of the fundamental solution `G = −ln|x − y| / 2π` and of its
/// normal derivative `∂G/∂ν_y` over one straight panel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PanelIntegrals {
    pub single: f64,
    pub double: f64,
}

/// Closed-form panel integrals for the target `x` and the panel `a → b` with
/// unit normal `nu`. `on_panel` selects the principal-value self term.
pub fn panel_integrals(x: Vec2, a: Vec2, b: Vec2, nu: Vec2, on_panel: bool) -> PanelIntegrals {
    let d = b - a;
    let len = d.norm();
    if on_panel {
        return PanelIntegrals {
            single: -INV_2PI * len * ((0.5 * len).ln() - 1.0),
            double: 0.0,
        };
    }
    let t = d * (1.0 / len);
    let r = x - a;
    let xi = r.dot(t);
    let eta = r.dot(nu);
    let w0 = -xi;
    let w1 = len - xi;
    let theta = (eta * (w1 - w0)).atan2(eta * eta + w0 * w1);
    let wlog = |w: f64| {
        if w == 0.0 {
            0.0
        } else {
            w * (w * w + eta * eta).ln()
        }
    };
    let log_int = 0.5 * (wlog(w1) - wlog(w0)) - len + eta * theta;
    PanelIntegrals {
        single: -INV_2PI * log_int,
        double: INV_2PI * theta,
    }
}

/// Fundamental solution and its gradient in `x`.
#[inline]
pub(crate) fn green(r: Vec2) -> (f64, Vec2) {
    let r2 = r.norm_sq();
    (-INV_2PI * 0.5 * r2.ln(), r * (-INV_2PI / r2))
}

/// `∂G/∂ν_y` for `r = x − y` and its gradient in `x`.
#[inline]
pub(crate) fn green_normal(r: Vec2, n: Vec2) -> (f64, Vec2) {
    let r2 = r.norm_sq();
    let rn = r.dot(n);
    let k = INV_2PI * rn / r2;
    let grad = (n * (1.0 / r2) - r * (2.0 * rn / (r2 * r2))) * INV_2PI;
    (k, grad)
}

/// Nodes and weights of the 16-point Gauss–Legendre rule on `[−1, 1]`.
pub fn gauss_legendre_16() -> &'static ([f64; 16], [f64; 16]) {
    static RULE: OnceLock<([f64; 16], [f64; 16])> = OnceLock::new();
    RULE.get_or_init(gauss_legendre::<16>)
}

fn gauss_legendre<const N: usize>() -> ([f64; N], [f64; N]) {
    let mut x = [0.0; N];
    let mut w = [0.0; N];
    let n = N as f64;
    for i in 0..N {
        let mut z = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=N {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Linear densities on a straight segment, for the representation formula.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Segment {
    pub p0: Vec2,
    pub p1: Vec2,
    /// Domain-outward unit normal.
    pub n: Vec2,
    pub u0: f64,
    pub u1: f64,
    /// Domain-outward flux at the two ends.
    pub q0: f64,
    pub q1: f64,
}

/// `(u, ∂₁u, ∂₂u)` contribution of one segment.
pub(crate) type Contribution = [f64; 3];

impl Segment {
    fn rule(&self, x: Vec2, s0: f64, s1: f64) -> Contribution {
        let (nodes, weights) = gauss_legendre_16();
        let d = self.p1 - self.p0;
        let len = d.norm();
        let half = 0.5 * (s1 - s0);
        let mid = 0.5 * (s0 + s1);
        let mut acc = [0.0; 3];
        for (z, w) in nodes.iter().zip(weights) {
            let s = mid + half * z;
            let y = self.p0 + d * s;
            let u = self.u0 + (self.u1 - self.u0) * s;
            let q = self.q0 + (self.q1 - self.q0) * s;
            let r = x - y;
            let (g, dg) = green(r);
            let (k, dk) = green_normal(r, self.n);
            let wt = w * half * len;
            acc[0] += wt * (g * q - k * u);
            acc[1] += wt * (dg.x * q - dk.x * u);
            acc[2] += wt * (dg.y * q - dk.y * u);
        }
        acc
    }

    /// Adaptive bisection until the 16-point rule on a piece agrees with the
    /// sum over its halves.
    pub fn integrate(&self, x: Vec2, tol: f64) -> Contribution {
        let whole = self.rule(x, 0.0, 1.0);
        self.refine(x, 0.0, 1.0, whole, tol, 0)
    }

    fn refine(&self, x: Vec2, s0: f64, s1: f64, whole: Contribution, tol: f64, depth: u32) -> Contribution {
        let len = (s1 - s0) * self.p0.dist(self.p1);
        let mid_pt = self.p0.lerp(self.p1, 0.5 * (s0 + s1));
        // far from the target the rule is accurate to machine precision
        if mid_pt.dist(x) > 2.0 * len || depth >= 48 {
            return whole;
        }
        let m = 0.5 * (s0 + s1);
        let left = self.rule(x, s0, m);
        let right = self.rule(x, m, s1);
        let sum = [left[0] + right[0], left[1] + right[1], left[2] + right[2]];
        let err = (0..3).map(|k| (sum[k] - whole[k]).abs()).fold(0.0, f64::max);
        let mag = sum.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if err <= tol * (1e-2 + mag) {
            return sum;
        }
        let l = self.refine(x, s0, m, left, tol, depth + 1);
        let r = self.refine(x, m, s1, right, tol, depth + 1);
        [l[0] + r[0], l[1] + r[1], l[2] + r[2]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_rule_integrates_degree_31_exactly() {
        let (x, w) = gauss_legendre_16();
        assert_relative_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
        let i30: f64 = x.iter().zip(w).map(|(x, w)| w * x.powi(30)).sum();
        assert_relative_eq!(i30, 2.0 / 31.0, epsilon = 1e-14);
        for k in 0..8 {
            assert!(x[k] < x[k + 1]);
            assert_relative_eq!(x[k], -x[15 - k], epsilon = 1e-15);
        }
    }

    fn brute(x: Vec2, a: Vec2, b: Vec2, nu: Vec2) -> (f64, f64) {
        // composite midpoint rule, fine enough away from the panel
        let n = 200_000;
        let len = a.dist(b);
        let (mut g, mut h) = (0.0, 0.0);
        for k in 0..n {
            let y = a.lerp(b, (k as f64 + 0.5) / n as f64);
            let r = x - y;
            g += green(r).0;
            h += green_normal(r, nu).0;
        }
        (g * len / n as f64, h * len / n as f64)
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let a = Vec2::new(0.2, -0.1);
        let b = Vec2::new(1.1, 0.4);
        let t = (b - a).unit();
        let nu = Vec2::new(t.y, -t.x);
        for x in [
            Vec2::new(0.5, 0.9),
            Vec2::new(-0.4, 0.0),
            Vec2::new(2.0, -1.0),
            Vec2::new(0.7, 0.1),
        ] {
            let cf = panel_integrals(x, a, b, nu, false);
            let (g, h) = brute(x, a, b, nu);
            assert_relative_eq!(cf.single, g, epsilon = 1e-8, max_relative = 1e-8);
            assert_relative_eq!(cf.double, h, epsilon = 1e-8, max_relative = 1e-8);
        }
    }

    #[test]
    fn self_panel_is_the_limit_of_nearby_targets() {
        let a = Vec2::new(0.0, 0.0);
        let b = Vec2::new(0.3, 0.0);
        let nu = Vec2::new(0.0, -1.0);
        let on = panel_integrals(Vec2::new(0.15, 0.0), a, b, nu, true);
        let near = panel_integrals(Vec2::new(0.15, 1e-12), a, b, nu, false);
        assert_relative_eq!(on.single, near.single, epsilon = 1e-10);
        // the double layer jumps by ±1/2 across the panel
        assert_relative_eq!(near.double.abs(), 0.5, epsilon = 1e-10);
    }

    #[test]
    fn adaptive_segment_matches_closed_form_near_the_panel() {
        let seg = Segment {
            p0: Vec2::new(0.0, 0.0),
            p1: Vec2::new(1.0, 0.0),
            n: Vec2::new(0.0, -1.0),
            u0: 1.0,
            u1: 1.0,
            q0: 1.0,
            q1: 1.0,
        };
        for h in [1e-1, 1e-2, 1e-3] {
            let x = Vec2::new(0.37, h);
            let v = seg.integrate(x, 1e-10);
            let cf = panel_integrals(x, seg.p0, seg.p1, seg.n, false);
            assert_relative_eq!(v[0], cf.single - cf.double, epsilon = 1e-9);
        }
    }
}
