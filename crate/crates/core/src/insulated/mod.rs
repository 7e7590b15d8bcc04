//! Insulated inclusions: zero conormal flux on every inclusion, the
//! pointwise gap bound `|∇u₀| ≲ ‖u₀‖ / √(ε + |x′|²)` and the gap
//! flattening transforms.

mod transform;

pub use transform::*;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bem::{BCSpec, BoundaryMesh, PotentialField};
use crate::data::BoundaryData;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{GeometryConfig, Vec2};
use crate::lab::numerics::{admissible_probe, Numerics};
use crate::lab::report::{Criterion, SweepReport};
use crate::lab::GapFamily;

/// Solution with Dirichlet data on the outer boundary and zero flux on
/// every inclusion.
#[derive(Clone, Debug)]
pub struct InsulatedSolution {
    pub field: PotentialField,
    pub geometry: GeometryConfig,
}

impl InsulatedSolution {
    pub fn mesh(&self) -> &Arc<BoundaryMesh> {
        self.field.mesh()
    }
}

/// Solves the insulated problem on an existing mesh of `g`.
pub fn solve_insulated_on(
    mesh: &Arc<BoundaryMesh>,
    g: &GeometryConfig,
    phi: &BoundaryData,
    exec: Execution,
) -> Result<InsulatedSolution> {
    let mut bc = BCSpec::dirichlet(mesh, |_| 0.0);
    bc.set_dirichlet(mesh, 0, |p| phi.eval(p))?;
    for i in 0..g.m() {
        bc.set_neumann(mesh, mesh.inclusion_contour(i)?, |_, _| 0.0)?;
    }
    let field = crate::bem::solve_bvp(mesh, &bc, exec)?;
    Ok(InsulatedSolution {
        field,
        geometry: g.clone(),
    })
}

/// Discretizes `g` and solves the insulated problem.
pub fn solve_insulated(g: &GeometryConfig, phi: &BoundaryData, num: &Numerics, exec: Execution) -> Result<InsulatedSolution> {
    let mesh = Arc::new(BoundaryMesh::discretize(g, num.mesh_params())?);
    solve_insulated_on(&mesh, g, phi, exec)
}

/// Height of one side of the gap above the apex, as a function of the
/// lateral coordinate `x′`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GapProfile {
    /// `R − √(R² − x′²)`: a disk of radius `R`.
    Circle { radius: f64 },
    /// `scale·|x′|^(2·power)`.
    Power { scale: f64, power: u32 },
}

impl GapProfile {
    /// The paraboloid `|x′|²/2`.
    pub fn quadratic() -> Self {
        GapProfile::Power { scale: 0.5, power: 1 }
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            GapProfile::Circle { radius } => {
                let t2 = t * t;
                // R − √(R²−t²) without cancellation
                t2 / (radius + (radius * radius - t2).max(0.0).sqrt())
            }
            GapProfile::Power { scale, power } => scale * t.abs().powi(2 * power as i32),
        }
    }

    pub fn slope(&self, t: f64) -> f64 {
        match *self {
            GapProfile::Circle { radius } => t / (radius * radius - t * t).max(0.0).sqrt(),
            GapProfile::Power { scale, power } => {
                let k = 2 * power as i32;
                scale * k as f64 * t.abs().powi(k - 1) * t.signum()
            }
        }
    }

    /// Largest `r` with `|slope| ≤ 1` on `|x′| < r`.
    pub fn unit_slope_radius(&self) -> f64 {
        match *self {
            GapProfile::Circle { radius } => radius / 2f64.sqrt(),
            GapProfile::Power { scale, power } => {
                let k = 2.0 * power as f64;
                (1.0 / (k * scale)).powf(1.0 / (k - 1.0))
            }
        }
    }
}

/// The narrow region `𝒪(r) = {−g(x′) − ε/2 < x₁ < f(x′) + ε/2, |x′| < r}`
/// between two inclusions, in a local frame centered at the gap midpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRegion {
    /// Upper face profile `f` (the inclusion on the `+x₁` side).
    pub upper: GapProfile,
    /// Lower face profile `g`.
    pub lower: GapProfile,
    pub eps: f64,
    /// Lateral radius `r`.
    pub r: f64,
    /// Gap midpoint in world coordinates.
    pub center: Vec2,
    /// Unit vector of the `x₁` axis in world coordinates.
    pub axis: Vec2,
}

impl GapRegion {
    /// Region with the default lateral radius: the largest `r` on which
    /// both profiles have slope at most one.
    pub fn new(upper: GapProfile, lower: GapProfile, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::GapOutOfRange(eps));
        }
        Ok(GapRegion {
            upper,
            lower,
            eps,
            r: upper.unit_slope_radius().min(lower.unit_slope_radius()),
            center: Vec2::ZERO,
            axis: Vec2::new(1.0, 0.0),
        })
    }

    pub fn with_r(mut self, r: f64) -> Self {
        self.r = r;
        self
    }

    /// The gap between inclusions 0 and 1 of a family member.
    pub fn from_family(family: &GapFamily, eps: f64) -> Result<Self> {
        match family {
            GapFamily::TwoDisks { radius, .. } => {
                let p = GapProfile::Circle { radius: *radius };
                GapRegion::new(p, p, eps)
            }
            GapFamily::PowerPair {
                power,
                scale,
                half_width,
                ..
            } => {
                let p = GapProfile::Power {
                    scale: *scale,
                    power: *power,
                };
                let g = GapRegion::new(p, p, eps)?;
                let r = g.r.min(*half_width);
                Ok(g.with_r(r))
            }
        }
    }

    pub fn f(&self, t: f64) -> f64 {
        self.upper.value(t)
    }

    pub fn g(&self, t: f64) -> f64 {
        self.lower.value(t)
    }

    /// Local gap width `f + g + ε` at lateral offset `t`.
    pub fn width(&self, t: f64) -> f64 {
        self.f(t) + self.g(t) + self.eps
    }

    /// `(f(0), g(0), f′(0), g′(0))`, all zero for a well-posed apex.
    pub fn apex_conditions(&self) -> [f64; 4] {
        [self.f(0.0), self.g(0.0), self.upper.slope(0.0), self.lower.slope(0.0)]
    }

    pub fn contains(&self, x1: f64, xp: f64, r: f64) -> bool {
        xp.abs() < r && x1 > -self.g(xp) - 0.5 * self.eps && x1 < self.f(xp) + 0.5 * self.eps
    }

    pub fn to_world(&self, x1: f64, xp: f64) -> Vec2 {
        self.center + self.axis * x1 + self.axis.perp() * xp
    }

    /// Lattice `(x′, x₁)` over `𝒪(radius)`: lateral columns on a uniform
    /// grid refined geometrically near `x′ = 0`, and points strictly
    /// inside the gap at fractions `0.15…0.85` of the local width.
    pub fn lattice(&self, radius: f64, lateral: usize, across: usize) -> Vec<(f64, f64)> {
        let mut cols = vec![0.0];
        let n = lateral.max(2);
        for k in 0..n {
            let t = -radius + 2.0 * radius * (k as f64 + 0.5) / n as f64;
            cols.push(t);
        }
        let mut s = self.eps.sqrt() / 8.0;
        while s < radius {
            cols.push(s);
            cols.push(-s);
            s *= 2.0;
        }
        cols.sort_by(f64::total_cmp);
        cols.dedup();
        let m = across.max(2);
        let mut out = Vec::with_capacity(cols.len() * m);
        for &xp in &cols {
            let lo = -self.g(xp) - 0.5 * self.eps;
            let w = self.width(xp);
            for k in 0..m {
                let frac = 0.15 + 0.7 * k as f64 / (m - 1) as f64;
                out.push((xp, lo + frac * w));
            }
        }
        out
    }
}

/// One probe of the pointwise bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub xprime: f64,
    pub x1: f64,
    pub grad_norm: f64,
    pub normalized_n: f64,
}

/// Normalized gradient profile over `𝒪(r/2)` at one gap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundProfile {
    pub eps: f64,
    pub rows: Vec<ProfileRow>,
    pub max_n: f64,
    pub max_grad: f64,
    /// Probe estimate of `‖u₀‖_{L∞(𝒪(r))}`.
    pub u_norm: f64,
    /// Lattice points dropped for lying within `ε/10` of a contour.
    pub excluded: usize,
}

/// Evaluates `N(x) = |∇u₀(x)|·√(ε + |x′|²) / ‖u₀‖_{L∞(𝒪(r))}` on the gap
/// lattice; the norm is the probe maximum over `𝒪(r)`.
pub fn pointwise_bound_profile(sol: &InsulatedSolution, gap: &GapRegion, num: &Numerics) -> Result<BoundProfile> {
    if sol.geometry.m() < 2 {
        return Err(Error::InvalidIndex("the gap profile needs two inclusions".into()));
    }
    let collar = gap.eps / 10.0;
    let mesh = sol.mesh();
    let lattice = gap.lattice(gap.r, 2 * num.lateral_probes, num.normal_probes);
    let total = lattice.len();
    let kept: Vec<(f64, f64, Vec2)> = lattice
        .into_iter()
        .map(|(xp, x1)| (xp, x1, gap.to_world(x1, xp)))
        .filter(|(_, _, p)| admissible_probe(&sol.geometry, mesh, *p, collar))
        .collect();
    let excluded = total - kept.len();
    let points: Vec<Vec2> = kept.iter().map(|k| k.2).collect();
    let values = sol.field.evaluate(&points)?;
    let u_norm = values.iter().map(|v| v.u.abs()).fold(0.0, f64::max);
    let mut rows = Vec::new();
    for ((xp, x1, _), v) in kept.iter().zip(&values) {
        if xp.abs() >= 0.5 * gap.r {
            continue;
        }
        let grad_norm = v.grad.norm();
        let normalized_n = if u_norm > 0.0 {
            grad_norm * (gap.eps + xp * xp).sqrt() / u_norm
        } else {
            0.0
        };
        rows.push(ProfileRow {
            xprime: *xp,
            x1: *x1,
            grad_norm,
            normalized_n,
        });
    }
    let max_n = rows.iter().map(|r| r.normalized_n).fold(0.0, f64::max);
    let max_grad = rows.iter().map(|r| r.grad_norm).fold(0.0, f64::max);
    Ok(BoundProfile {
        eps: gap.eps,
        rows,
        max_n,
        max_grad,
        u_norm,
        excluded,
    })
}

/// Insulated solve and bound profile for every gap of a family.
pub fn insulated_sweep(
    family: &GapFamily,
    phi: &BoundaryData,
    eps_list: &[f64],
    num: &Numerics,
    exec: Execution,
) -> Result<Vec<BoundProfile>> {
    if eps_list.len() < 3 {
        return Err(Error::InsufficientPoints(eps_list.len()));
    }
    let mut eps = eps_list.to_vec();
    eps.sort_by(f64::total_cmp);
    exec.map_slice(&eps, |&e| {
        let g = family.geometry(e)?;
        let sol = solve_insulated(&g, &phi.normalized(&g.outer), num, exec)?;
        pointwise_bound_profile(&sol, &GapRegion::from_family(family, e)?, num)
    })
    .into_iter()
    .collect()
}

/// Sweep summary: slope of `max|∇u₀|` and the spread of `max N`.
pub fn insulated_report(profiles: &[BoundProfile], num: &Numerics) -> Result<SweepReport> {
    let mut r = SweepReport::new(
        "insulated_bound",
        &["epsilon", "max_grad", "max_N", "u_norm", "excluded"],
        num.stamp(0),
    );
    r.rows = profiles
        .iter()
        .map(|p| vec![p.eps, p.max_grad, p.max_n, p.u_norm, p.excluded as f64])
        .collect();
    r.sort_rows();
    let s = r.fit("epsilon", "max_grad")?;
    let ratio = crate::perfect::spread(profiles.iter().map(|p| p.max_n));
    r.push_criterion(Criterion::new(
        "max N bounded across the sweep",
        ratio.is_finite() && ratio <= 3.0,
        format!("max/min of max N = {ratio:.4} <= 3"),
    ));
    r.push_criterion(Criterion::new(
        "slope(max|grad u0|) no worse than -0.6",
        s.slope >= -0.6,
        format!("{:.4} >= -0.6", s.slope),
    ));
    Ok(r)
}

/// Per-probe rows `epsilon, xprime, grad_norm, normalized_N`.
pub fn profile_report(profiles: &[BoundProfile], num: &Numerics) -> SweepReport {
    let mut r = SweepReport::new(
        "insulated_profile",
        &["epsilon", "xprime", "grad_norm", "normalized_N"],
        num.stamp(0),
    );
    for p in profiles {
        for row in &p.rows {
            r.rows.push(vec![p.eps, row.xprime, row.grad_norm, row.normalized_n]);
        }
    }
    r.sort_rows();
    r
}
