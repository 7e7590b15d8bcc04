use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::bem::{BoundaryMesh, MeshParams};
use crate::geometry::{GapInfo, GeometryConfig, Vec2};
use crate::lab::report::Stamp;

/// Discretization and probing parameters shared by all studies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Numerics {
    pub coarse_n: usize,
    pub grading_constant: f64,
    pub aspect: f64,
    pub quad_tol: f64,
    /// Probes on the closest-point segment.
    pub segment_probes: usize,
    /// Radii of the polar probe grid around the gap midpoint.
    pub radial_probes: usize,
    /// Angles of the polar probe grid.
    pub angular_probes: usize,
    /// Lateral columns of the insulated gap lattice.
    pub lateral_probes: usize,
    /// Points across the gap per lattice column.
    pub normal_probes: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        let m = MeshParams::default();
        Numerics {
            coarse_n: m.coarse_n,
            grading_constant: m.grading_constant,
            aspect: m.aspect,
            quad_tol: 1e-8,
            segment_probes: 64,
            radial_probes: 12,
            angular_probes: 32,
            lateral_probes: 48,
            normal_probes: 9,
        }
    }
}

impl Numerics {
    pub fn mesh_params(&self) -> MeshParams {
        MeshParams {
            coarse_n: self.coarse_n,
            grading_constant: self.grading_constant,
            aspect: self.aspect,
        }
    }

    pub fn stamp(&self, seed: u64) -> Stamp {
        Stamp {
            seed,
            coarse_n: self.coarse_n,
            grading_constant: self.grading_constant,
            aspect: self.aspect,
            quad_tol: self.quad_tol,
        }
    }
}

/// Whether `p` is a usable probe: inside both the exact and the polygonal
/// domain and at least `collar` away from every contour.
pub fn admissible_probe(g: &GeometryConfig, mesh: &BoundaryMesh, p: Vec2, collar: f64) -> bool {
    let slack = collar * (1.0 - 1e-9);
    g.in_domain(p)
        && g.boundary_distance(p) >= slack
        && mesh.polygon_contains(p)
        && mesh.panel_distance(p) >= slack
}

/// Probe set near a gap: points on the closest-point segment and a polar
/// grid in `B(x0, δ)`, all at least `ε/10` from the contours.
pub fn gap_probes(g: &GeometryConfig, mesh: &BoundaryMesh, gap: &GapInfo, num: &Numerics) -> Vec<Vec2> {
    let eps = gap.eps;
    let delta = gap.delta.unwrap_or(0.25);
    let collar = eps / 10.0;
    let mut pts = Vec::new();
    let ns = num.segment_probes.max(2);
    for k in 0..ns {
        let s = 0.1 + 0.8 * k as f64 / (ns - 1) as f64;
        pts.push(gap.xi.lerp(gap.xj, s));
    }
    let nr = num.radial_probes.max(2);
    let r0 = 0.5 * eps;
    for a in 0..nr {
        let r = r0 * (delta / r0).powf(a as f64 / (nr - 1) as f64);
        for b in 0..num.angular_probes {
            let th = TAU * (b as f64 + 0.5) / num.angular_probes as f64;
            pts.push(gap.x0 + Vec2::from_polar(r, th));
        }
    }
    pts.retain(|p| admissible_probe(g, mesh, *p, collar));
    pts
}
