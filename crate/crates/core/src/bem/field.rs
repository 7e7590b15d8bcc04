use std::sync::Arc;

use super::kernels::Segment;
use super::mesh::BoundaryMesh;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::Vec2;

/// Default tolerance of the adaptive near-boundary quadrature.
pub const QUAD_TOL: f64 = 1e-8;

/// Potential and gradient at one interior point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointValue {
    pub u: f64,
    pub grad: Vec2,
}

/// Solved boundary data: per-panel trace `u`, flux `∂u/∂ν` along the stored
/// normal, the floating potentials and the auxiliary constant.
#[derive(Clone, Debug)]
pub struct PotentialField {
    mesh: Arc<BoundaryMesh>,
    pub u: Vec<f64>,
    pub flux: Vec<f64>,
    pub gamma: f64,
    pub floating: Vec<f64>,
    /// Normwise relative residual of the discrete system.
    pub residual: f64,
    exec: Execution,
    quad_tol: f64,
}

impl PotentialField {
    pub(crate) fn new(
        mesh: Arc<BoundaryMesh>,
        u: Vec<f64>,
        flux: Vec<f64>,
        gamma: f64,
        floating: Vec<f64>,
        residual: f64,
        exec: Execution,
    ) -> Self {
        PotentialField {
            mesh,
            u,
            flux,
            gamma,
            floating,
            residual,
            exec,
            quad_tol: QUAD_TOL,
        }
    }

    /// Field from externally computed boundary data (used by coupled solvers).
    pub fn from_parts(mesh: Arc<BoundaryMesh>, u: Vec<f64>, flux: Vec<f64>, gamma: f64, exec: Execution) -> Result<Self> {
        if u.len() != mesh.len() || flux.len() != mesh.len() {
            return Err(Error::Dimension(format!(
                "boundary data of length {}/{} for {} panels",
                u.len(),
                flux.len(),
                mesh.len()
            )));
        }
        Ok(PotentialField::new(mesh, u, flux, gamma, Vec::new(), 0.0, exec))
    }

    pub fn mesh(&self) -> &Arc<BoundaryMesh> {
        &self.mesh
    }

    pub fn execution(&self) -> Execution {
        self.exec
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_quad_tol(mut self, tol: f64) -> Self {
        self.quad_tol = tol;
        self
    }

    /// `Σ flux · length` over one contour, along the stored normal.
    pub fn contour_flux(&self, c: usize) -> Result<f64> {
        let k = self.mesh.contour(c)?;
        Ok((k.start..k.end)
            .map(|j| self.flux[j] * self.mesh.panels()[j].length)
            .sum())
    }

    /// Net flux out of the computational domain (outer minus inclusions).
    pub fn net_flux(&self) -> f64 {
        (0..self.mesh.contours().len())
            .map(|c| self.mesh.contours()[c].sigma() * self.contour_flux(c).unwrap_or(0.0))
            .sum()
    }

    /// Linear combination `Σ c_k f_k` of fields on the same mesh.
    pub fn combine(terms: &[(f64, &PotentialField)]) -> Result<PotentialField> {
        let first = terms
            .first()
            .ok_or_else(|| Error::Dimension("empty combination".into()))?
            .1;
        let n = first.mesh.len();
        let mut out = PotentialField {
            u: vec![0.0; n],
            flux: vec![0.0; n],
            gamma: 0.0,
            floating: Vec::new(),
            residual: 0.0,
            ..first.clone()
        };
        for (c, f) in terms {
            if !Arc::ptr_eq(&f.mesh, &first.mesh) && *f.mesh != *first.mesh {
                return Err(Error::Dimension("fields live on different meshes".into()));
            }
            for j in 0..n {
                out.u[j] += c * f.u[j];
                out.flux[j] += c * f.flux[j];
            }
            out.gamma += c * f.gamma;
            out.residual = out.residual.max(f.residual);
        }
        Ok(out)
    }

    /// Half-panel segments carrying the continuous piecewise-linear
    /// interpolants of trace and flux between panel midpoints.
    fn segments(&self) -> Vec<Segment> {
        let panels = self.mesh.panels();
        let mut segs = Vec::with_capacity(2 * panels.len());
        for c in self.mesh.contours() {
            let s = c.sigma();
            let n = c.len();
            let idx = |k: usize| c.start + k % n;
            let vertex = |v: &[f64], k: usize| {
                let (p, q) = (idx(k + n - 1), idx(k));
                let (lp, lq) = (panels[p].length, panels[q].length);
                (v[p] * lq + v[q] * lp) / (lp + lq)
            };
            for k in 0..n {
                let j = idx(k);
                let p = &panels[j];
                let (ua, ub) = (vertex(&self.u, k), vertex(&self.u, k + 1));
                let (qa, qb) = (vertex(&self.flux, k), vertex(&self.flux, k + 1));
                let nrm = p.normal * s;
                segs.push(Segment {
                    p0: p.a,
                    p1: p.mid,
                    n: nrm,
                    u0: ua,
                    u1: self.u[j],
                    q0: s * qa,
                    q1: s * self.flux[j],
                });
                segs.push(Segment {
                    p0: p.mid,
                    p1: p.b,
                    n: nrm,
                    u0: self.u[j],
                    u1: ub,
                    q0: s * self.flux[j],
                    q1: s * qb,
                });
            }
        }
        segs
    }

    fn check_point(&self, index: usize, p: Vec2) -> Result<()> {
        let d = self.mesh.panel_distance(p);
        if !self.mesh.polygon_contains(p) || !(d > 0.0) {
            return Err(Error::PointOutside { index, distance: d });
        }
        Ok(())
    }

    fn eval_one(&self, segs: &[Segment], x: Vec2) -> PointValue {
        let mut acc = [0.0; 3];
        for s in segs {
            let c = s.integrate(x, self.quad_tol);
            acc[0] += c[0];
            acc[1] += c[1];
            acc[2] += c[2];
        }
        PointValue {
            u: acc[0] + self.gamma,
            grad: Vec2::new(acc[1], acc[2]),
        }
    }

    /// `u` and `∇u` at interior points; one result per point.
    pub fn evaluate_each(&self, points: &[Vec2]) -> Vec<Result<PointValue>> {
        let segs = self.segments();
        self.exec.map_range(points.len(), |k| {
            self.check_point(k, points[k])?;
            Ok(self.eval_one(&segs, points[k]))
        })
    }

    /// `u` and `∇u` at interior points; fails on the first point outside.
    pub fn evaluate(&self, points: &[Vec2]) -> Result<Vec<PointValue>> {
        self.evaluate_each(points).into_iter().collect()
    }

    /// Boundary gradient on one panel: the tangential derivative from a
    /// three-point difference of the trace plus the stored normal flux.
    pub fn boundary_gradient(&self, j: usize) -> Vec2 {
        let panels = self.mesh.panels();
        let c = &self.mesh.contours()[panels[j].contour];
        let n = c.len();
        let k = j - c.start;
        let prev = c.start + (k + n - 1) % n;
        let next = c.start + (k + 1) % n;
        let h1 = 0.5 * (panels[prev].length + panels[j].length);
        let h2 = 0.5 * (panels[j].length + panels[next].length);
        let du = (h1 * h1 * (self.u[next] - self.u[j]) + h2 * h2 * (self.u[j] - self.u[prev]))
            / (h1 * h2 * (h1 + h2));
        panels[j].tangent() * du + panels[j].normal * self.flux[j]
    }

    /// Largest boundary gradient norm over one contour.
    pub fn max_boundary_gradient(&self, c: usize) -> Result<f64> {
        let k = self.mesh.contour(c)?;
        Ok((k.start..k.end)
            .map(|j| self.boundary_gradient(j).norm())
            .fold(0.0, f64::max))
    }

    /// `½∫|∇u|²` over the domain, from `½∮ u ∂u/∂n`.
    pub fn dirichlet_energy(&self) -> f64 {
        let panels = self.mesh.panels();
        0.5 * (0..panels.len())
            .map(|j| self.mesh.panel_sigma(j) * self.u[j] * self.flux[j] * panels[j].length)
            .sum::<f64>()
    }

    /// Trace values of one contour.
    pub fn contour_trace(&self, c: usize) -> Result<&[f64]> {
        let k = self.mesh.contour(c)?;
        Ok(&self.u[k.start..k.end])
    }
}
