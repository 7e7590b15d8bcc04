use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Dyn, LU};

use super::field::PotentialField;
use super::kernels::panel_integrals;
use super::mesh::BoundaryMesh;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::Vec2;

/// Smallest admissible ratio of the smallest to the largest LU pivot.
pub(crate) const PIVOT_RATIO: f64 = 1e-13;

/// Boundary condition on one contour, sampled at panel midpoints.
#[derive(Clone, Debug, PartialEq)]
pub enum ContourCondition {
    /// Prescribed trace.
    Dirichlet(Vec<f64>),
    /// Prescribed flux `∂u/∂ν` along the stored panel normal.
    Neumann(Vec<f64>),
    /// Unknown constant trace shared by the group, zero net flux per group.
    Floating { group: usize },
}

/// The structural part of a condition: what the system matrix depends on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConditionKind {
    Dirichlet,
    Neumann,
    Floating(usize),
}

impl ContourCondition {
    pub fn kind(&self) -> ConditionKind {
        match self {
            ContourCondition::Dirichlet(_) => ConditionKind::Dirichlet,
            ContourCondition::Neumann(_) => ConditionKind::Neumann,
            ContourCondition::Floating { group } => ConditionKind::Floating(*group),
        }
    }
}

/// One condition per contour.
#[derive(Clone, Debug, PartialEq)]
pub struct BCSpec {
    pub conditions: Vec<ContourCondition>,
}

impl BCSpec {
    /// Dirichlet data `f` on every contour.
    pub fn dirichlet(mesh: &BoundaryMesh, f: impl Fn(Vec2) -> f64) -> Self {
        let conditions = mesh
            .contours()
            .iter()
            .map(|c| ContourCondition::Dirichlet(mesh.panels()[c.start..c.end].iter().map(|p| f(p.mid)).collect()))
            .collect();
        BCSpec { conditions }
    }

    pub fn set_dirichlet(&mut self, mesh: &BoundaryMesh, c: usize, f: impl Fn(Vec2) -> f64) -> Result<&mut Self> {
        let vals = mesh.contour_panels(c)?.iter().map(|p| f(p.mid)).collect();
        self.conditions[c] = ContourCondition::Dirichlet(vals);
        Ok(self)
    }

    pub fn set_constant(&mut self, mesh: &BoundaryMesh, c: usize, value: f64) -> Result<&mut Self> {
        self.set_dirichlet(mesh, c, |_| value)
    }

    /// Prescribed flux; `f` receives the panel midpoint and stored normal.
    pub fn set_neumann(&mut self, mesh: &BoundaryMesh, c: usize, f: impl Fn(Vec2, Vec2) -> f64) -> Result<&mut Self> {
        let vals = mesh.contour_panels(c)?.iter().map(|p| f(p.mid, p.normal)).collect();
        self.conditions[c] = ContourCondition::Neumann(vals);
        Ok(self)
    }

    pub fn set_floating(&mut self, mesh: &BoundaryMesh, c: usize, group: usize) -> Result<&mut Self> {
        mesh.contour(c)?;
        self.conditions[c] = ContourCondition::Floating { group };
        Ok(self)
    }

    pub fn kinds(&self) -> Vec<ConditionKind> {
        self.conditions.iter().map(|c| c.kind()).collect()
    }

    fn validate(&self, mesh: &BoundaryMesh) -> Result<usize> {
        if self.conditions.len() != mesh.contours().len() {
            return Err(Error::Dimension(format!(
                "{} boundary conditions for {} contours",
                self.conditions.len(),
                mesh.contours().len()
            )));
        }
        for (c, (cond, contour)) in self.conditions.iter().zip(mesh.contours()).enumerate() {
            if let ContourCondition::Dirichlet(v) | ContourCondition::Neumann(v) = cond {
                if v.len() != contour.len() {
                    return Err(Error::Dimension(format!(
                        "contour {c}: {} values for {} panels",
                        v.len(),
                        contour.len()
                    )));
                }
            }
        }
        validate_kinds(&self.kinds())
    }
}

/// Checks well-posedness of the condition structure; returns the group count.
fn validate_kinds(kinds: &[ConditionKind]) -> Result<usize> {
    if !kinds.contains(&ConditionKind::Dirichlet) {
        return Err(Error::IllPosed(
            "at least one contour needs a prescribed trace".into(),
        ));
    }
    let groups = kinds
        .iter()
        .filter_map(|k| match k {
            ConditionKind::Floating(g) => Some(*g + 1),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    for g in 0..groups {
        if !kinds.contains(&ConditionKind::Floating(g)) {
            return Err(Error::IllPosed(format!("floating group {g} has no contour")));
        }
    }
    Ok(groups)
}

/// Assembled and factored collocation system for a fixed condition
/// structure; solves any number of data sets on the same mesh.
pub struct BvpOperator {
    mesh: Arc<BoundaryMesh>,
    kinds: Vec<ConditionKind>,
    groups: usize,
    /// `½δ_ij + σ_j ∫_j ∂G/∂ν`, row-major.
    hmat: Vec<f64>,
    /// `σ_j ∫_j G`, row-major.
    gmat: Vec<f64>,
    system: DMatrix<f64>,
    lu: LU<f64, Dyn, Dyn>,
    exec: Execution,
}

impl BvpOperator {
    pub fn assemble(mesh: &Arc<BoundaryMesh>, kinds: &[ConditionKind], exec: Execution) -> Result<Self> {
        if kinds.len() != mesh.contours().len() {
            return Err(Error::Dimension(format!(
                "{} condition kinds for {} contours",
                kinds.len(),
                mesh.contours().len()
            )));
        }
        let groups = validate_kinds(kinds)?;
        let (hmat, gmat) = influence_matrices(mesh, exec);
        let n = mesh.len();
        let dim = n + groups + 1;
        let panels = mesh.panels();
        let kind_of = |j: usize| kinds[panels[j].contour];
        let mut a = DMatrix::<f64>::zeros(dim, dim);
        for i in 0..n {
            for j in 0..n {
                let (h, g) = (hmat[i * n + j], gmat[i * n + j]);
                match kind_of(j) {
                    ConditionKind::Dirichlet => a[(i, j)] = -g,
                    ConditionKind::Neumann => a[(i, j)] = h,
                    ConditionKind::Floating(k) => {
                        a[(i, j)] = -g;
                        a[(i, n + k)] += h;
                    }
                }
            }
            a[(i, dim - 1)] = -1.0;
        }
        for (j, p) in panels.iter().enumerate() {
            match kind_of(j) {
                ConditionKind::Neumann => {}
                ConditionKind::Dirichlet => a[(dim - 1, j)] = mesh.panel_sigma(j) * p.length,
                ConditionKind::Floating(k) => {
                    a[(dim - 1, j)] = mesh.panel_sigma(j) * p.length;
                    a[(n + k, j)] = p.length;
                }
            }
        }
        let lu = a.clone().lu();
        let u = lu.u();
        let diag = u.diagonal();
        let max = diag.amax();
        let min = diag.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        if !(max > 0.0) || min < PIVOT_RATIO * max {
            return Err(Error::IllPosed(format!(
                "collocation system is singular (pivot ratio {:e})",
                if max > 0.0 { min / max } else { 0.0 }
            )));
        }
        Ok(BvpOperator {
            mesh: mesh.clone(),
            kinds: kinds.to_vec(),
            groups,
            hmat,
            gmat,
            system: a,
            lu,
            exec,
        })
    }

    pub fn mesh(&self) -> &Arc<BoundaryMesh> {
        &self.mesh
    }

    pub fn kinds(&self) -> &[ConditionKind] {
        &self.kinds
    }

    /// Single- and double-layer influence matrices (with the contour signs).
    pub fn influence(&self) -> (&[f64], &[f64]) {
        (&self.gmat, &self.hmat)
    }

    pub fn solve(&self, bc: &BCSpec) -> Result<PotentialField> {
        bc.validate(&self.mesh)?;
        if bc.kinds() != self.kinds {
            return Err(Error::Dimension(
                "boundary condition structure differs from the assembled operator".into(),
            ));
        }
        let mesh = &self.mesh;
        let n = mesh.len();
        let dim = n + self.groups + 1;
        // known per-panel values (trace for Dirichlet, flux for Neumann)
        let mut known = vec![0.0; n];
        for (cond, c) in bc.conditions.iter().zip(mesh.contours()) {
            if let ContourCondition::Dirichlet(v) | ContourCondition::Neumann(v) = cond {
                known[c.start..c.end].copy_from_slice(v);
            }
        }
        let panels = mesh.panels();
        let kind_of = |j: usize| self.kinds[panels[j].contour];
        let mut rhs = DVector::<f64>::zeros(dim);
        for i in 0..n {
            let mut s = 0.0;
            for (j, kj) in known.iter().enumerate() {
                match kind_of(j) {
                    ConditionKind::Dirichlet => s -= self.hmat[i * n + j] * kj,
                    ConditionKind::Neumann => s += self.gmat[i * n + j] * kj,
                    ConditionKind::Floating(_) => {}
                }
            }
            rhs[i] = s;
        }
        for (j, p) in panels.iter().enumerate() {
            if kind_of(j) == ConditionKind::Neumann {
                rhs[dim - 1] -= mesh.panel_sigma(j) * p.length * known[j];
            }
        }
        let mut x = self.lu.solve(&rhs).ok_or(Error::IllPosed("singular factorization".into()))?;
        // one step of iterative refinement
        let r = &rhs - &self.system * &x;
        if let Some(dx) = self.lu.solve(&r) {
            x += dx;
        }
        let r = &rhs - &self.system * &x;
        let scale = self.system.amax() * x.amax() + rhs.amax();
        let residual = if scale > 0.0 { r.amax() / scale } else { 0.0 };

        let floating: Vec<f64> = (0..self.groups).map(|g| x[n + g]).collect();
        let mut u = vec![0.0; n];
        let mut flux = vec![0.0; n];
        for j in 0..n {
            match kind_of(j) {
                ConditionKind::Dirichlet => {
                    u[j] = known[j];
                    flux[j] = x[j];
                }
                ConditionKind::Neumann => {
                    u[j] = x[j];
                    flux[j] = known[j];
                }
                ConditionKind::Floating(g) => {
                    u[j] = floating[g];
                    flux[j] = x[j];
                }
            }
        }
        Ok(PotentialField::new(
            mesh.clone(),
            u,
            flux,
            x[dim - 1],
            floating,
            residual,
            self.exec,
        ))
    }
}

/// Row-parallel assembly of the double- and single-layer matrices.
pub(crate) fn influence_matrices(mesh: &BoundaryMesh, exec: Execution) -> (Vec<f64>, Vec<f64>) {
    let n = mesh.len();
    let panels = mesh.panels();
    let sigma: Vec<f64> = (0..n).map(|j| mesh.panel_sigma(j)).collect();
    let mut both = vec![0.0; 2 * n * n];
    exec.fill_rows(&mut both, 2 * n, |i, row| {
        let x = panels[i].mid;
        let (hrow, grow) = row.split_at_mut(n);
        for (j, p) in panels.iter().enumerate() {
            let k = panel_integrals(x, p.a, p.b, p.normal, i == j);
            hrow[j] = sigma[j] * k.double + if i == j { 0.5 } else { 0.0 };
            grow[j] = sigma[j] * k.single;
        }
    });
    let mut h = Vec::with_capacity(n * n);
    let mut g = Vec::with_capacity(n * n);
    for row in both.chunks(2 * n) {
        h.extend_from_slice(&row[..n]);
        g.extend_from_slice(&row[n..]);
    }
    (h, g)
}

/// Assembles, factors and solves in one call.
pub fn solve_bvp(mesh: &Arc<BoundaryMesh>, bc: &BCSpec, exec: Execution) -> Result<PotentialField> {
    bc.validate(mesh)?;
    BvpOperator::assemble(mesh, &bc.kinds(), exec)?.solve(bc)
}
