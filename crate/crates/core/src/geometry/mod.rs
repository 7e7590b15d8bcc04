//! Shape catalog, admissibility checks and gap metrics.

mod shape;
mod vec2;

pub use shape::{curvature_profile, ShapeSpec, Side};
pub use vec2::Vec2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest neighborhood radius ever reported.
pub const DELTA_CAP: f64 = 0.25;
/// Quantization grid of the neighborhood radius.
pub const DELTA_GRID: f64 = 1e-3;

/// Outer boundary, inclusions and the admissibility constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub outer: ShapeSpec,
    #[serde(default)]
    pub inclusions: Vec<ShapeSpec>,
    /// Curvature lower bound for the strictly convex inclusions.
    #[serde(default = "default_kappa0")]
    pub kappa0: f64,
    /// Clearance between the inclusions and the outer boundary.
    #[serde(default = "default_r0")]
    pub r0: f64,
}

fn default_kappa0() -> f64 {
    0.05
}

fn default_r0() -> f64 {
    0.05
}

/// Closest pair between two inclusions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapInfo {
    pub i: usize,
    pub j: usize,
    pub eps: f64,
    pub xi: Vec2,
    pub xj: Vec2,
    pub x0: Vec2,
    /// Neighborhood radius; only known in the context of a full configuration.
    pub delta: Option<f64>,
}

impl GeometryConfig {
    /// Builds and validates a configuration with the default constants.
    pub fn new(outer: ShapeSpec, inclusions: Vec<ShapeSpec>) -> Result<Self> {
        let g = GeometryConfig {
            outer,
            inclusions,
            kappa0: default_kappa0(),
            r0: default_r0(),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn m(&self) -> usize {
        self.inclusions.len()
    }

    /// Checks every admissibility condition on the configuration.
    pub fn validate(&self) -> Result<()> {
        self.outer.validate()?;
        if matches!(self.outer, ShapeSpec::PowerPairProfile { .. }) {
            return Err(Error::Inadmissible(
                "outer boundary must be a disk or an ellipse".into(),
            ));
        }
        if !(self.r0 > 0.0) || !(self.kappa0 > 0.0) {
            return Err(Error::Inadmissible(format!(
                "kappa0 and r0 must be positive, got {} and {}",
                self.kappa0, self.r0
            )));
        }
        let diam = self.outer.diameter();
        if diam >= 1.0 / self.r0 {
            return Err(Error::Inadmissible(format!(
                "outer diameter {diam} must be below 1/r0 = {}",
                1.0 / self.r0
            )));
        }
        for (k, s) in self.inclusions.iter().enumerate() {
            s.validate()?;
            if s.is_strictly_convex() {
                let kmin = curvature_profile(s, 256)?
                    .into_iter()
                    .fold(f64::INFINITY, f64::min);
                if kmin < self.kappa0 {
                    return Err(Error::Inadmissible(format!(
                        "inclusion {k} has curvature {kmin} below kappa0 = {}",
                        self.kappa0
                    )));
                }
            }
            let pts = s.sample(1024);
            let clearance = pts
                .iter()
                .map(|p| {
                    if self.outer.contains(*p) {
                        self.outer.boundary_distance(*p)
                    } else {
                        -1.0
                    }
                })
                .fold(f64::INFINITY, f64::min);
            if clearance <= self.r0 {
                return Err(Error::Inadmissible(format!(
                    "inclusion {k} is not inside the outer boundary with clearance r0 = {} (got {clearance})",
                    self.r0
                )));
            }
        }
        for i in 0..self.m() {
            for j in i + 1..self.m() {
                pair_distance(&self.inclusions[i], &self.inclusions[j], i, j)?;
            }
        }
        Ok(())
    }

    /// Gap data for the pair `(i, j)`, including the neighborhood radius.
    pub fn gap(&self, i: usize, j: usize) -> Result<GapInfo> {
        self.check_pair(i, j)?;
        let mut info = pair_distance(&self.inclusions[i], &self.inclusions[j], i, j)?;
        info.delta = Some(neighborhood_delta(self, i, j)?);
        Ok(info)
    }

    /// Gap data for all pairs `i < j`.
    pub fn gaps(&self) -> Result<Vec<GapInfo>> {
        let mut out = Vec::new();
        for i in 0..self.m() {
            for j in i + 1..self.m() {
                out.push(self.gap(i, j)?);
            }
        }
        Ok(out)
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        if i == j {
            return Err(Error::InvalidIndex(format!(
                "gap needs two distinct inclusions, got ({i}, {j})"
            )));
        }
        let m = self.m();
        if i >= m || j >= m {
            return Err(Error::InvalidIndex(format!(
                "inclusion pair ({i}, {j}) out of range for {m} inclusions"
            )));
        }
        Ok(())
    }

    /// Whether `p` lies in the open perforated domain.
    pub fn in_domain(&self, p: Vec2) -> bool {
        self.outer.contains(p) && self.inclusions.iter().all(|s| !s.contains(p))
    }

    /// Distance from `p` to the nearest boundary curve.
    pub fn boundary_distance(&self, p: Vec2) -> f64 {
        self.inclusions
            .iter()
            .map(|s| s.boundary_distance(p))
            .fold(self.outer.boundary_distance(p), f64::min)
    }
}

/// Closest pair between two disjoint convex curves.
pub fn min_distance(a: &ShapeSpec, b: &ShapeSpec) -> Result<GapInfo> {
    pair_distance(a, b, 0, 1)
}

fn gap_from(i: usize, j: usize, xi: Vec2, xj: Vec2) -> GapInfo {
    GapInfo {
        i,
        j,
        eps: xi.dist(xj),
        xi,
        xj,
        x0: (xi + xj) * 0.5,
        delta: None,
    }
}

fn pair_distance(a: &ShapeSpec, b: &ShapeSpec, i: usize, j: usize) -> Result<GapInfo> {
    if let (
        ShapeSpec::Disk {
            center: c1,
            radius: r1,
        },
        ShapeSpec::Disk {
            center: c2,
            radius: r2,
        },
    ) = (a, b)
    {
        let d = c1.dist(*c2);
        if d - r1 - r2 <= 0.0 {
            return Err(Error::InclusionsIntersect(i, j));
        }
        let u = (*c2 - *c1) * (1.0 / d);
        let mut info = gap_from(i, j, *c1 + u * *r1, *c2 - u * *r2);
        info.eps = d - r1 - r2;
        return Ok(info);
    }
    if let Some(info) = facing_power_pair(a, b, i, j) {
        return Ok(info);
    }
    let n = 512;
    let pa = a.sample(n);
    let pb = b.sample(n);
    if pa.iter().any(|p| b.contains(*p))
        || pb.iter().any(|p| a.contains(*p))
        || a.contains(b.interior_point())
        || b.contains(a.interior_point())
    {
        return Err(Error::InclusionsIntersect(i, j));
    }
    let mut best = (f64::INFINITY, 0, 0);
    for (s, p) in pa.iter().enumerate() {
        for (t, q) in pb.iter().enumerate() {
            let d = p.dist(*q);
            if d < best.0 {
                best = (d, s, t);
            }
        }
    }
    let mut s = best.1 as f64 / n as f64;
    let mut t = best.2 as f64 / n as f64;
    // alternating projection
    for _ in 0..40 {
        let (_, tn) = b.closest_point(a.point(s));
        let (_, sn) = a.closest_point(b.point(tn));
        let moved = wrap(sn - s).abs() + wrap(tn - t).abs();
        s = sn;
        t = tn;
        if moved < 1e-14 {
            break;
        }
    }
    // Newton polish on F(s, t) = |a(s) − b(t)|² / 2
    let f = |s: f64, t: f64| (a.point(s) - b.point(t)).norm_sq();
    for _ in 0..60 {
        let (p, da, dda) = a.eval(s);
        let (q, db, ddb) = b.eval(t);
        let r = p - q;
        let gs = r.dot(da);
        let gt = -r.dot(db);
        let hss = da.dot(da) + r.dot(dda);
        let htt = db.dot(db) - r.dot(ddb);
        let hst = -da.dot(db);
        let det = hss * htt - hst * hst;
        if !(det > 0.0) || !(hss > 0.0) {
            break;
        }
        let ds = -(htt * gs - hst * gt) / det;
        let dt = -(hss * gt - hst * gs) / det;
        let f0 = r.norm_sq();
        let mut step = 1.0;
        let mut accepted = false;
        while step > 1e-6 {
            if f(s + step * ds, t + step * dt) <= f0 {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        s = (s + step * ds).rem_euclid(1.0);
        t = (t + step * dt).rem_euclid(1.0);
        if (step * ds).abs() + (step * dt).abs() < 1e-15 {
            break;
        }
    }
    let info = gap_from(i, j, a.point(s), b.point(t));
    if info.eps <= 0.0 {
        return Err(Error::InclusionsIntersect(i, j));
    }
    Ok(info)
}

/// Exact closest pair for two power profiles facing each other across a
/// horizontal gap: every point of a left-opening body lies at or left of its
/// apex, so the apexes realize the distance.
fn facing_power_pair(a: &ShapeSpec, b: &ShapeSpec, i: usize, j: usize) -> Option<GapInfo> {
    match (a, b) {
        (
            ShapeSpec::PowerPairProfile {
                apex: pa, side: sa, ..
            },
            ShapeSpec::PowerPairProfile {
                apex: pb, side: sb, ..
            },
        ) if pa.y == pb.y && sa != sb => {
            let (left, right) = if *sa == Side::Left { (pa, pb) } else { (pb, pa) };
            (right.x > left.x).then(|| gap_from(i, j, *pa, *pb))
        }
        _ => None,
    }
}

fn wrap(d: f64) -> f64 {
    d - d.round()
}

/// Largest quantized `δ ≤ 1/4` such that the open ball `B(x0, 2δ)` around the
/// gap midpoint avoids the outer boundary and every other inclusion.
pub fn neighborhood_delta(g: &GeometryConfig, i: usize, j: usize) -> Result<f64> {
    g.check_pair(i, j)?;
    let info = pair_distance(&g.inclusions[i], &g.inclusions[j], i, j)?;
    let x0 = info.x0;
    let mut d = if g.outer.contains(x0) {
        g.outer.boundary_distance(x0)
    } else {
        0.0
    };
    for (k, s) in g.inclusions.iter().enumerate() {
        if k != i && k != j {
            d = d.min(s.distance_to_region(x0));
        }
    }
    let raw = (0.5 * d).min(DELTA_CAP);
    let delta = (raw / DELTA_GRID + 1e-9).floor() * DELTA_GRID;
    if delta <= 0.0 {
        return Err(Error::NoAdmissibleDelta(i, j));
    }
    Ok(delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(eps: f64) -> Vec<ShapeSpec> {
        vec![
            ShapeSpec::disk(Vec2::new(-1.0 - eps / 2.0, 0.0), 1.0),
            ShapeSpec::disk(Vec2::new(1.0 + eps / 2.0, 0.0), 1.0),
        ]
    }

    #[test]
    fn collinear_disks() {
        let d = pair(0.01);
        let info = min_distance(&d[1], &d[0]).unwrap();
        assert!((info.eps - 0.01).abs() < 1e-12);
        assert!(info.xi.dist(Vec2::new(0.005, 0.0)) < 1e-12);
        assert!(info.xj.dist(Vec2::new(-0.005, 0.0)) < 1e-12);
        assert!(info.x0.norm() < 1e-12);
    }

    #[test]
    fn separated_disks() {
        let a = ShapeSpec::disk(Vec2::ZERO, 1.0);
        let b = ShapeSpec::disk(Vec2::new(3.0, 0.0), 1.0);
        let info = min_distance(&a, &b).unwrap();
        assert_eq!(info.eps, 1.0);
        assert_eq!(info.x0, Vec2::new(1.5, 0.0));
    }

    #[test]
    fn ellipse_vs_disk_matches_dense_sampling() {
        let a = ShapeSpec::ellipse(Vec2::ZERO, 2.0, 1.0, 0.0);
        let b = ShapeSpec::disk(Vec2::new(3.5, 0.0), 1.0);
        let info = min_distance(&a, &b).unwrap();
        assert!((info.eps - 0.5).abs() < 1e-10);
        assert!(info.xi.dist(Vec2::new(2.0, 0.0)) < 1e-6);
        // independent oracle: distance from the dense ellipse polyline to the disk
        let n = 1_000_000;
        let brute = (0..n)
            .map(|k| {
                let th = std::f64::consts::TAU * k as f64 / n as f64;
                let p = Vec2::new(2.0 * th.cos(), th.sin());
                p.dist(Vec2::new(3.5, 0.0)) - 1.0
            })
            .fold(f64::INFINITY, f64::min);
        assert!((info.eps - brute).abs() < 1e-10);
    }

    #[test]
    fn overlap_is_rejected() {
        let a = ShapeSpec::ellipse(Vec2::ZERO, 2.0, 1.0, 0.0);
        let b = ShapeSpec::disk(Vec2::new(2.5, 0.0), 1.0);
        let err = min_distance(&a, &b).unwrap_err();
        assert!(err.to_string().contains("inclusions intersect"));
        let c = ShapeSpec::disk(Vec2::new(1.5, 0.0), 1.0);
        assert!(min_distance(&ShapeSpec::disk(Vec2::ZERO, 1.0), &c).is_err());
    }

    #[test]
    fn delta_examples() {
        let outer = ShapeSpec::disk(Vec2::ZERO, 4.0);
        let g = GeometryConfig::new(outer.clone(), pair(0.01)).unwrap();
        assert_eq!(neighborhood_delta(&g, 0, 1).unwrap(), 0.25);

        // a unit disk centered at (0, 1.6) would overlap the pair
        let mut three = pair(0.01);
        three.push(ShapeSpec::disk(Vec2::new(0.0, 1.6), 1.0));
        assert!(GeometryConfig::new(outer.clone(), three).is_err());

        let mut three = pair(0.01);
        let c3 = Vec2::new(0.0, 2.8);
        three.push(ShapeSpec::disk(c3, 1.0));
        let g = GeometryConfig::new(outer, three).unwrap();
        let d3 = c3.norm() - 1.0;
        let expect = (d3 / 2.0).min(0.25);
        assert!((neighborhood_delta(&g, 0, 1).unwrap() - expect).abs() < 1e-3 + 1e-12);
        assert!(neighborhood_delta(&g, 1, 1).is_err());
        assert!(neighborhood_delta(&g, 0, 7).is_err());
    }

    #[test]
    fn delta_governed_by_third_inclusion() {
        // a small third disk wedged above the gap: dist(x0, D3) = 0.3
        let outer = ShapeSpec::disk(Vec2::ZERO, 4.0);
        let mut incl = pair(0.01);
        incl.push(ShapeSpec::disk(Vec2::new(0.0, 0.35), 0.05));
        let g = GeometryConfig::new(outer, incl).unwrap();
        assert_eq!(neighborhood_delta(&g, 0, 1).unwrap(), 0.15);
    }

    #[test]
    fn facing_power_profiles_use_apexes() {
        let a = ShapeSpec::power_profile(Vec2::new(-0.005, 0.0), Side::Left, 3, 1.0);
        let b = ShapeSpec::power_profile(Vec2::new(0.005, 0.0), Side::Right, 3, 1.0);
        let info = min_distance(&a, &b).unwrap();
        assert!((info.eps - 0.01).abs() < 1e-15);
        assert_eq!(info.x0, Vec2::ZERO);
    }

    #[test]
    fn outer_clearance_and_diameter_checked() {
        let outer = ShapeSpec::disk(Vec2::ZERO, 2.0);
        assert!(GeometryConfig::new(outer.clone(), vec![ShapeSpec::disk(Vec2::new(1.0, 0.0), 1.0)]).is_err());
        assert!(GeometryConfig::new(ShapeSpec::disk(Vec2::ZERO, 20.0), vec![]).is_err());
        let g = GeometryConfig::new(outer, vec![ShapeSpec::disk(Vec2::ZERO, 1.0)]).unwrap();
        assert!(g.in_domain(Vec2::new(1.5, 0.0)));
        assert!(!g.in_domain(Vec2::new(0.5, 0.0)));
    }
}
