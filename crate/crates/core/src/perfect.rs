//! Perfect conductivity: floating potentials on the inclusions, obtained
//! either from the capacity-matrix decomposition or from one direct solve
//! with floating conductors, plus the gap-asymptotics studies.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bem::{BCSpec, BoundaryMesh, BvpOperator, ConditionKind, PotentialField};
use crate::data::BoundaryData;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{GeometryConfig, ShapeSpec, Vec2};
use crate::lab::numerics::{gap_probes, Numerics};
use crate::lab::report::{Criterion, SweepReport};
use crate::lab::GapFamily;
use crate::matrix::{difference_bound, DominanceProfile, SymMatrix};

/// Capacity matrix `a_ij = ∮_{∂D_j} ∂v_i/∂ν`, right-hand side
/// `b_i = −∮_{∂D_i} ∂v_0/∂ν` and the floating potentials.
#[derive(Clone, Debug)]
pub struct CapacitySystem {
    pub a: DMatrix<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    /// Dominance profile of `−A` (symmetrized storage).
    pub profile: DominanceProfile,
    /// Largest `|a_ij − a_ji| / max(|a_ij|, |a_ji|)`.
    pub symmetry_defect: f64,
}

impl CapacitySystem {
    pub fn m(&self) -> usize {
        self.b.len()
    }

    /// `−A` with each off-diagonal pair averaged.
    pub fn neg_sym(&self) -> SymMatrix {
        SymMatrix::symmetrized(&(-&self.a)).0
    }

    /// Negative diagonal, positive off-diagonal, negative row sums.
    pub fn structure_ok(&self) -> bool {
        let m = self.m();
        (0..m).all(|i| {
            self.a[(i, i)] < 0.0
                && (0..m).all(|j| i == j || self.a[(i, j)] > 0.0)
                && self.a.row(i).sum() < 0.0
        })
    }

    pub fn check_structure(&self) -> Result<()> {
        if self.structure_ok() {
            Ok(())
        } else {
            Err(Error::CapacityStructure(format!("A = {:?}", self.a.as_slice())))
        }
    }

    /// Difference bound for `(−A)C = −b` on the pair `(i, j)`.
    pub fn difference_bound(&self, i: usize, j: usize) -> Result<f64> {
        let beta: Vec<f64> = self.b.iter().map(|v| -v).collect();
        difference_bound(&self.neg_sym(), &beta, i, j)
    }
}

/// The harmonic basis: `v₀` carries the outer data with zero traces on the
/// inclusions, `v_i` is one on inclusion `i` and zero elsewhere.
#[derive(Clone, Debug)]
pub struct DecompositionBundle {
    pub v0: PotentialField,
    pub v: Vec<PotentialField>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMode {
    Decomposed,
    Direct,
}

#[derive(Clone, Debug)]
pub struct PerfectSolution {
    pub field: PotentialField,
    pub c: Vec<f64>,
    pub mode: SolveMode,
}

/// Graded mesh for a configuration with the given numerics.
pub fn discretize(g: &GeometryConfig, num: &Numerics) -> Result<Arc<BoundaryMesh>> {
    Ok(Arc::new(BoundaryMesh::discretize(g, num.mesh_params())?))
}

fn outer_data(mesh: &BoundaryMesh, phi: &BoundaryData) -> BCSpec {
    let mut bc = BCSpec::dirichlet(mesh, |_| 0.0);
    bc.set_dirichlet(mesh, 0, |p| phi.eval(p))
        .expect("contour 0 always exists");
    bc
}

/// `m + 1` Dirichlet solves sharing one factorization, the capacity system
/// and the superposed solution.
pub fn solve_decomposed(
    mesh: &Arc<BoundaryMesh>,
    phi: &BoundaryData,
    exec: Execution,
) -> Result<(PerfectSolution, CapacitySystem, DecompositionBundle)> {
    let m = mesh.contours().len() - 1;
    if m == 0 {
        return Err(Error::Config("the decomposition needs at least one inclusion".into()));
    }
    let kinds = vec![ConditionKind::Dirichlet; m + 1];
    let op = BvpOperator::assemble(mesh, &kinds, exec)?;
    let v0 = op.solve(&outer_data(mesh, phi))?;
    let mut v = Vec::with_capacity(m);
    for i in 0..m {
        let mut bc = BCSpec::dirichlet(mesh, |_| 0.0);
        bc.set_constant(mesh, mesh.inclusion_contour(i)?, 1.0)?;
        v.push(op.solve(&bc)?);
    }
    let contour = |i: usize| mesh.inclusion_contour(i);
    let mut a = DMatrix::zeros(m, m);
    let mut b = vec![0.0; m];
    for i in 0..m {
        b[i] = -v0.contour_flux(contour(i)?)?;
        for j in 0..m {
            a[(i, j)] = v[i].contour_flux(contour(j)?)?;
        }
    }
    // zero net flux through ∂D_i: Σ_j C_j a_ji = b_i
    let c: Vec<f64> = a
        .transpose()
        .lu()
        .solve(&DVector::from_column_slice(&b))
        .ok_or(Error::Singular(0.0))?
        .iter()
        .cloned()
        .collect();
    let (neg, symmetry_defect) = SymMatrix::symmetrized(&(-&a));
    let sys = CapacitySystem {
        profile: DominanceProfile::of(&neg),
        a,
        b,
        c: c.clone(),
        symmetry_defect,
    };
    let mut terms = vec![(1.0, &v0)];
    terms.extend(c.iter().zip(&v).map(|(ci, vi)| (*ci, vi)));
    let mut field = PotentialField::combine(&terms)?;
    field.floating = c.clone();
    let sol = PerfectSolution {
        field,
        c,
        mode: SolveMode::Decomposed,
    };
    Ok((sol, sys, DecompositionBundle { v0, v }))
}

/// One solve with every inclusion a floating conductor.
pub fn solve_direct(mesh: &Arc<BoundaryMesh>, phi: &BoundaryData, exec: Execution) -> Result<PerfectSolution> {
    let mut bc = outer_data(mesh, phi);
    let m = mesh.contours().len() - 1;
    for i in 0..m {
        bc.set_floating(mesh, mesh.inclusion_contour(i)?, i)?;
    }
    let kinds = bc.kinds();
    let field = BvpOperator::assemble(mesh, &kinds, exec)?.solve(&bc)?;
    Ok(PerfectSolution {
        c: field.floating.clone(),
        field,
        mode: SolveMode::Direct,
    })
}

/// Random admissible configuration with `m` disks and ellipses inside an
/// outer disk of radius 4, all gaps at least 0.02.
pub fn random_admissible(seed: u64, m: usize) -> GeometryConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut incl = Vec::with_capacity(m);
        for _ in 0..m {
            let center = Vec2::from_polar(rng.gen_range(0.0..2.0), rng.gen_range(0.0..std::f64::consts::TAU));
            let s = if rng.gen_bool(0.5) {
                ShapeSpec::disk(center, rng.gen_range(0.3..1.0))
            } else {
                let a = rng.gen_range(0.4..1.0);
                let b = rng.gen_range(0.3..=a);
                ShapeSpec::ellipse(center, a, b, rng.gen_range(0.0..std::f64::consts::PI))
            };
            incl.push(s);
        }
        let Ok(g) = GeometryConfig::new(ShapeSpec::disk(Vec2::ZERO, 4.0), incl) else {
            continue;
        };
        if g.gaps().map(|gs| gs.iter().all(|x| x.eps >= 0.02)).unwrap_or(false) {
            return g;
        }
    }
}

/// All measurements of one gap value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerfectPoint {
    pub epsilon: f64,
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub row_sum_min: f64,
    pub row_sum_max: f64,
    pub symmetry_defect: f64,
    pub structure_ok: bool,
    pub c1: f64,
    pub c2: f64,
    pub c_diff: f64,
    pub max_grad: f64,
    pub max_grad_v0: f64,
    pub max_grad_v1: f64,
    pub max_grad_v1v2: f64,
    pub diff_bound: f64,
    pub panels: usize,
    pub probes: usize,
}

/// Solves one member of a family and measures every gap quantity.
pub fn perfect_point(family: &GapFamily, eps: f64, phi: &BoundaryData, num: &Numerics, exec: Execution) -> Result<PerfectPoint> {
    let g = family.geometry(eps)?;
    let phi = phi.normalized(&g.outer);
    let mesh = discretize(&g, num)?;
    let (sol, sys, basis) = solve_decomposed(&mesh, &phi, exec)?;
    let gap = g.gap(0, 1)?;
    let probes = gap_probes(&g, &mesh, &gap, num);
    let tol = num.quad_tol;
    let eval = |f: &PotentialField| -> Result<Vec<Vec2>> {
        Ok(f.clone()
            .with_quad_tol(tol)
            .evaluate(&probes)?
            .into_iter()
            .map(|p| p.grad)
            .collect())
    };
    let g0 = eval(&basis.v0)?;
    let gv: Vec<Vec<Vec2>> = basis.v.iter().map(eval).collect::<Result<_>>()?;
    let mut max_grad: f64 = 0.0;
    let mut max_v1: f64 = 0.0;
    let mut max_v12: f64 = 0.0;
    let mut max_v0: f64 = 0.0;
    for k in 0..probes.len() {
        let mut du = g0[k];
        for (ci, gi) in sol.c.iter().zip(&gv) {
            du += gi[k] * *ci;
        }
        max_grad = max_grad.max(du.norm());
        max_v0 = max_v0.max(g0[k].norm());
        max_v1 = max_v1.max(gv[0][k].norm());
        max_v12 = max_v12.max((gv[0][k] + gv[1][k]).norm());
    }
    let m = sys.m();
    let row_sums: Vec<f64> = (0..m).map(|i| sys.a.row(i).sum()).collect();
    Ok(PerfectPoint {
        epsilon: eps,
        a11: sys.a[(0, 0)],
        a12: sys.a[(0, 1)],
        a21: sys.a[(1, 0)],
        row_sum_min: row_sums.iter().cloned().fold(f64::INFINITY, f64::min),
        row_sum_max: row_sums.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        symmetry_defect: sys.symmetry_defect,
        structure_ok: sys.structure_ok(),
        c1: sol.c[0],
        c2: sol.c[1],
        c_diff: (sol.c[0] - sol.c[1]).abs(),
        max_grad,
        max_grad_v0: max_v0,
        max_grad_v1: max_v1,
        max_grad_v1v2: max_v12,
        diff_bound: sys.difference_bound(0, 1).unwrap_or(f64::NAN),
        panels: mesh.len(),
        probes: probes.len(),
    })
}

/// Runs a family over a list of gaps; results are ordered by ascending `ε`.
pub fn perfect_sweep(family: &GapFamily, phi: &BoundaryData, eps_list: &[f64], num: &Numerics, exec: Execution) -> Result<Vec<PerfectPoint>> {
    if eps_list.len() < 3 {
        return Err(Error::InsufficientPoints(eps_list.len()));
    }
    let mut eps: Vec<f64> = eps_list.to_vec();
    eps.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    exec.map_slice(&eps, |&e| perfect_point(family, e, phi, num, exec))
        .into_iter()
        .collect()
}

pub const PERFECT_COLUMNS: [&str; 11] = [
    "epsilon",
    "a11",
    "a12",
    "row_sum_min",
    "c1",
    "c2",
    "c_diff",
    "max_grad",
    "max_grad_v1",
    "max_grad_v1v2",
    "diff_bound",
];

/// Report with the canonical perfect-case columns.
pub fn perfect_report(name: &str, points: &[PerfectPoint], num: &Numerics) -> SweepReport {
    let mut r = SweepReport::new(name, &PERFECT_COLUMNS, num.stamp(0));
    r.rows = points
        .iter()
        .map(|p| {
            vec![
                p.epsilon,
                p.a11,
                p.a12,
                p.row_sum_min,
                p.c1,
                p.c2,
                p.c_diff,
                p.max_grad,
                p.max_grad_v1,
                p.max_grad_v1v2,
                p.diff_bound,
            ]
        })
        .collect();
    r.sort_rows();
    r
}

/// Sign, row-sum and symmetry structure of every assembled capacity matrix.
pub fn structure_criterion(points: &[PerfectPoint], symmetry_tol: f64) -> Criterion {
    let worst = points.iter().map(|p| p.symmetry_defect).fold(0.0, f64::max);
    let signs = points.iter().all(|p| p.structure_ok && p.row_sum_max < 0.0);
    Criterion::new(
        "capacity structure (signs, negative row sums, symmetry)",
        signs && worst <= symmetry_tol,
        format!("signs/row sums ok: {signs}; max symmetry defect {worst:.2e} <= {symmetry_tol:e}"),
    )
}

/// Slope of `a₁₂` (and `|a₁₁|`) against `ε` and the capacity structure.
pub fn capacity_asymptotics(points: &[PerfectPoint], num: &Numerics) -> Result<SweepReport> {
    let mut r = perfect_report("capacity_asymptotics", points, num);
    let s12 = r.fit("epsilon", "a12")?;
    let s11 = r.fit("epsilon", "a11")?;
    r.push_criterion(Criterion::window("slope(a12)", s12.slope, -0.6, -0.4));
    r.push_criterion(Criterion::window("slope(|a11|)", s11.slope, -0.6, -0.4));
    r.push_criterion(structure_criterion(points, 1e-6));
    Ok(r)
}

/// Slope of `|C₁ − C₂|` and domination by the difference bound.
pub fn potential_gap_bound(points: &[PerfectPoint], num: &Numerics) -> Result<SweepReport> {
    let mut r = perfect_report("potential_gap_bound", points, num);
    let s = r.fit("epsilon", "c_diff")?;
    r.push_criterion(Criterion::window("slope(|C1-C2|)", s.slope, 0.4, 0.6));
    let ok = points.iter().all(|p| p.c_diff <= p.diff_bound);
    let margin = points
        .iter()
        .map(|p| p.diff_bound - p.c_diff)
        .fold(f64::INFINITY, f64::min);
    r.push_criterion(Criterion::new(
        "difference bound dominates |C1-C2|",
        ok,
        format!("min(bound - |C1-C2|) = {margin:.4e}"),
    ));
    Ok(r)
}

/// Ratio `max/min` of a positive series.
pub fn spread(values: impl IntoIterator<Item = f64>) -> f64 {
    let (lo, hi) = values
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    hi / lo
}

/// Slope of the maximal gap gradient and the basis-field diagnostics.
pub fn gradient_blowup(points: &[PerfectPoint], num: &Numerics) -> Result<SweepReport> {
    let mut r = perfect_report("gradient_blowup", points, num);
    let s = r.fit("epsilon", "max_grad")?;
    r.push_criterion(Criterion::window("slope(max|grad u|)", s.slope, -0.6, -0.4));
    let ratio = spread(points.iter().map(|p| p.epsilon * p.max_grad_v1));
    r.push_criterion(Criterion::new(
        "eps*max|grad v1| bounded",
        ratio <= 3.0,
        format!("max/min ratio {ratio:.3} <= 3"),
    ));
    let v12 = points.iter().map(|p| p.max_grad_v1v2).fold(0.0, f64::max);
    let v0 = points.iter().map(|p| p.max_grad_v0).fold(0.0, f64::max);
    let v1 = points.iter().map(|p| p.max_grad_v1).fold(0.0, f64::max);
    r.push_criterion(Criterion::new(
        "max|grad(v1+v2)| and max|grad v0| stay bounded",
        v12 < 0.1 * v1 && v0 < 0.1 * v1,
        format!("max|grad(v1+v2)| = {v12:.4}, max|grad v0| = {v0:.4}, max|grad v1| = {v1:.2}"),
    ));
    Ok(r)
}

/// Target slope window for a gap flat to order `2l`.
pub fn flat_gap_window(l: u32) -> (f64, f64) {
    match l {
        1 => (-0.6, -0.4),
        2 => (-0.35, -0.15),
        3 => (-0.27, -0.07),
        _ => {
            let t = -1.0 / (2.0 * l as f64);
            (t - 0.1, t + 0.1)
        }
    }
}

/// Slope of the maximal gap gradient for a power-profile family.
pub fn flat_gap_blowup(points: &[PerfectPoint], l: u32, num: &Numerics) -> Result<SweepReport> {
    let mut r = perfect_report(&format!("flat_gap_blowup_l{l}"), points, num);
    let s = r.fit("epsilon", "max_grad")?;
    let (lo, hi) = flat_gap_window(l);
    r.push_criterion(Criterion::window(format!("slope(max|grad u|), l={l}"), s.slope, lo, hi));
    Ok(r)
}
