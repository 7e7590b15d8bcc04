//! Finite conductivity `k` inside the inclusions: the coupled interface
//! problem, its energy, the `k → 0` convergence toward the insulated
//! solution and the `k → ∞` limit toward the perfect conductor.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bem::{influence_matrices, solve_bvp, BCSpec, BoundaryMesh, ContourCondition, PotentialField, PIVOT_RATIO};
use crate::data::BoundaryData;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{GeometryConfig, Vec2};
use crate::insulated::{solve_insulated_on, InsulatedSolution};
use crate::lab::numerics::{admissible_probe, Numerics};
use crate::lab::report::{Criterion, SweepReport};
use crate::perfect::solve_direct;

/// Slack of the energy comparisons.
pub const ENERGY_SLACK: f64 = 1e-6;

/// Solution of `Δu = 0` in `Ω∖ω̄` and in `ω`, `u = φ` on `∂Ω`, with
/// continuous traces and `∂u/∂ν|₊ = k ∂u/∂ν|₋` on every interface.
#[derive(Clone, Debug)]
pub struct TransmissionSolution {
    pub k: f64,
    /// Field in `Ω∖ω̄`: outer data, shared interface traces and exterior fluxes.
    pub exterior: PotentialField,
    /// Field in each component `ωₛ`, on a mesh sharing the interface panels.
    pub interiors: Vec<PotentialField>,
    /// Largest `|q₊ − k q₋|` relative to the largest interface flux.
    pub flux_jump_residual: f64,
    /// Normwise residual of the coupled linear system.
    pub residual: f64,
    /// Whole-domain field when `k = 1` short-circuits the interfaces.
    pub plain: Option<PotentialField>,
}

fn outer_spec(mesh: &BoundaryMesh, phi: &BoundaryData) -> Vec<f64> {
    let c = &mesh.contours()[0];
    mesh.panels()[c.start..c.end].iter().map(|p| phi.eval(p.mid)).collect()
}

fn interior_meshes(mesh: &BoundaryMesh) -> Result<Vec<Arc<BoundaryMesh>>> {
    (1..mesh.contours().len()).map(|c| mesh.interior_of(c).map(Arc::new)).collect()
}

/// Coupled interface solve, also at `k = 1`.
pub fn solve_coupled(mesh: &Arc<BoundaryMesh>, phi: &BoundaryData, k: f64, exec: Execution) -> Result<TransmissionSolution> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::NonPositiveConductivity(k));
    }
    let n = mesh.len();
    let n0 = mesh.contours()[0].len();
    let ni = n - n0;
    let s_count = mesh.contours().len() - 1;
    let (h, g) = influence_matrices(mesh, exec);
    let panels = mesh.panels();
    let phi_out = outer_spec(mesh, phi);
    // unknowns: q on ∂Ω | u on interfaces | q₊ on interfaces | γ | kγₛ
    let dim = n + ni + 1 + s_count;
    let col_qp = |j: usize| n + (j - n0);
    let row_gamma = n + ni;
    let scale = k.min(1.0);
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    let mut rhs = DVector::<f64>::zeros(dim);
    for i in 0..n {
        for j in 0..n {
            let (hij, gij) = (h[i * n + j], g[i * n + j]);
            if j < n0 {
                a[(i, j)] = -gij;
                rhs[i] -= hij * phi_out[j];
            } else {
                a[(i, j)] = hij;
                a[(i, col_qp(j))] = -gij;
            }
        }
        a[(i, n + ni)] = -1.0;
    }
    for s in 0..s_count {
        let c = &mesh.contours()[s + 1];
        for i in c.start..c.end {
            let r = col_qp(i);
            for j in c.start..c.end {
                let half = if i == j { 0.5 } else { 0.0 };
                let (hij, gij) = (h[i * n + j], g[i * n + j]);
                // interior double layer is −(H − ½δ), single layer is −G
                a[(r, j)] = scale * (half - (hij - half));
                a[(r, col_qp(j))] = scale / k * gij;
            }
            a[(r, n + ni + 1 + s)] = -1.0;
        }
    }
    for (j, p) in panels.iter().enumerate() {
        if j < n0 {
            a[(row_gamma, j)] = p.length;
        } else {
            a[(row_gamma, col_qp(j))] = -p.length;
            a[(row_gamma + 1 + (p.contour - 1), col_qp(j))] = p.length;
        }
    }
    let lu = a.clone().lu();
    let diag = lu.u().diagonal();
    let max = diag.amax();
    let min = diag.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if !(max > 0.0) || min < PIVOT_RATIO * max {
        return Err(Error::IllPosed("coupled interface system is singular".into()));
    }
    let mut x = lu.solve(&rhs).ok_or_else(|| Error::IllPosed("singular factorization".into()))?;
    let r = &rhs - &a * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    let r = &rhs - &a * &x;
    let denom = a.amax() * x.amax() + rhs.amax();
    let residual = if denom > 0.0 { r.amax() / denom } else { 0.0 };

    let mut u = vec![0.0; n];
    let mut q = vec![0.0; n];
    for j in 0..n {
        if j < n0 {
            u[j] = phi_out[j];
            q[j] = x[j];
        } else {
            u[j] = x[j];
            q[j] = x[col_qp(j)];
        }
    }
    let exterior = PotentialField::from_parts(mesh.clone(), u.clone(), q.clone(), x[n + ni], exec)?;
    let mut interiors = Vec::with_capacity(s_count);
    let mut jump: f64 = 0.0;
    let qmax = q[n0..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (s, im) in interior_meshes(mesh)?.into_iter().enumerate() {
        let c = &mesh.contours()[s + 1];
        let qm: Vec<f64> = q[c.start..c.end].iter().map(|v| v / k).collect();
        for (qp, qm) in q[c.start..c.end].iter().zip(&qm) {
            jump = jump.max((qp - k * qm).abs());
        }
        let gamma = x[n + ni + 1 + s] / scale;
        interiors.push(PotentialField::from_parts(im, u[c.start..c.end].to_vec(), qm, gamma, exec)?);
    }
    Ok(TransmissionSolution {
        k,
        exterior,
        interiors,
        flux_jump_residual: if qmax > 0.0 { jump / qmax } else { jump },
        residual,
        plain: None,
    })
}

/// Transmission solve; `k = 1` is a plain Dirichlet solve on `Ω` whose
/// traces and fluxes on the interfaces are read off the whole-domain field.
pub fn solve_transmission(mesh: &Arc<BoundaryMesh>, phi: &BoundaryData, k: f64, exec: Execution) -> Result<TransmissionSolution> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::NonPositiveConductivity(k));
    }
    if k != 1.0 {
        return solve_coupled(mesh, phi, k, exec);
    }
    let outer = Arc::new(mesh.interior_of(0)?);
    let bc = BCSpec::dirichlet(&outer, |p| phi.eval(p));
    let plain = solve_bvp(&outer, &bc, exec)?;
    let mids: Vec<Vec2> = mesh.panels().iter().map(|p| p.mid).collect();
    let n0 = mesh.contours()[0].len();
    let values = plain.evaluate(&mids[n0..])?;
    let mut u = outer_spec(mesh, phi);
    let mut q = plain.flux.clone();
    for (v, p) in values.iter().zip(&mesh.panels()[n0..]) {
        u.push(v.u);
        q.push(v.grad.dot(p.normal));
    }
    let exterior = PotentialField::from_parts(mesh.clone(), u.clone(), q.clone(), plain.gamma, exec)?;
    let mut interiors = Vec::new();
    for (s, im) in interior_meshes(mesh)?.into_iter().enumerate() {
        let c = &mesh.contours()[s + 1];
        interiors.push(PotentialField::from_parts(
            im,
            u[c.start..c.end].to_vec(),
            q[c.start..c.end].to_vec(),
            0.0,
            exec,
        )?);
    }
    Ok(TransmissionSolution {
        k,
        exterior,
        interiors,
        flux_jump_residual: 0.0,
        residual: plain.residual,
        plain: Some(plain),
    })
}

impl TransmissionSolution {
    /// Value and gradient at interior points of `Ω`, using the phase that
    /// contains each point.
    pub fn evaluate(&self, points: &[Vec2]) -> Result<Vec<crate::bem::PointValue>> {
        if let Some(p) = &self.plain {
            return p.evaluate(points);
        }
        points
            .iter()
            .map(|&x| {
                let field = self
                    .interiors
                    .iter()
                    .find(|f| f.mesh().polygon_contains(x))
                    .unwrap_or(&self.exterior);
                Ok(field.evaluate(&[x])?[0])
            })
            .collect()
    }

    /// Interface trace of component `s`.
    pub fn trace(&self, s: usize) -> Result<&[f64]> {
        self.exterior.contour_trace(s + 1)
    }

    /// `max − min` of the trace on component `s`.
    pub fn trace_oscillation(&self, s: usize) -> Result<f64> {
        let t = self.trace(s)?;
        let (lo, hi) = t.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
        Ok(hi - lo)
    }

    /// Length-weighted mean of the trace on component `s`.
    pub fn trace_mean(&self, s: usize) -> Result<f64> {
        let t = self.trace(s)?;
        let mesh = self.exterior.mesh();
        let c = mesh.contour(s + 1)?;
        let panels = &mesh.panels()[c.start..c.end];
        let len: f64 = panels.iter().map(|p| p.length).sum();
        Ok(t.iter().zip(panels).map(|(v, p)| v * p.length).sum::<f64>() / len)
    }
}

/// Dirichlet-type energy of a solved field.
pub trait Energy {
    fn energy(&self) -> f64;
}

impl Energy for TransmissionSolution {
    /// `(k/2)∫_ω |∇u|² + (1/2)∫_{Ω∖ω̄} |∇u|²` from per-phase boundary integrals.
    fn energy(&self) -> f64 {
        if let Some(p) = &self.plain {
            return p.dirichlet_energy();
        }
        self.exterior.dirichlet_energy() + self.k * self.interiors.iter().map(|f| f.dirichlet_energy()).sum::<f64>()
    }
}

impl Energy for InsulatedSolution {
    /// `(1/2)∫_{Ω∖ω̄} |∇u₀|²`.
    fn energy(&self) -> f64 {
        self.field.dirichlet_energy()
    }
}

/// `∫_ω |∇v|²` of the harmonic extension `v` of the insulated trace into
/// every inclusion: the smallest Dirichlet integral of any extension.
pub fn extension_dirichlet_integral(sol: &InsulatedSolution, exec: Execution) -> Result<f64> {
    let mesh = sol.mesh();
    let mut total = 0.0;
    for c in 1..mesh.contours().len() {
        let im = Arc::new(mesh.interior_of(c)?);
        let bc = BCSpec {
            conditions: vec![ContourCondition::Dirichlet(sol.field.contour_trace(c)?.to_vec())],
        };
        total += 2.0 * solve_bvp(&im, &bc, exec)?.dirichlet_energy();
    }
    Ok(total)
}

/// `I_k`, `I₀` and the upper gap `(k/2)‖∇u₀‖²_{L²(ω)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyPair {
    pub i_k: f64,
    pub i_0: f64,
    pub gap_bound: f64,
}

impl EnergyPair {
    /// `I₀ ≤ I_k ≤ I₀ + gap_bound`, up to [`ENERGY_SLACK`].
    pub fn sandwich_ok(&self) -> bool {
        self.i_0 <= self.i_k + ENERGY_SLACK && self.i_k <= self.i_0 + self.gap_bound + ENERGY_SLACK
    }
}

/// One conductivity of the convergence study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub k: f64,
    pub energy: EnergyPair,
    pub trace_osc_max: f64,
    /// RMS of `u_k − u₀` over probes in `Ω∖ω̄`.
    pub l2_drift: f64,
}

/// Probe lattice in `Ω∖ω̄`, `spacing` apart and `collar` away from contours.
pub fn domain_probes(g: &GeometryConfig, mesh: &BoundaryMesh, spacing: f64, collar: f64) -> Vec<Vec2> {
    let (c, r) = (g.outer.interior_point(), 0.5 * g.outer.diameter());
    let n = (2.0 * r / spacing).ceil() as i64;
    let mut v = Vec::new();
    for i in -n..=n {
        for j in -n..=n {
            let p = c + Vec2::new(i as f64 * spacing, j as f64 * spacing);
            if admissible_probe(g, mesh, p, collar) {
                v.push(p);
            }
        }
    }
    v
}

/// Energies and drifts of `u_k` as `k` decreases toward zero.
#[derive(Clone, Debug)]
pub struct ConvergenceStudy {
    pub rows: Vec<EnergyRow>,
    pub i_0: f64,
    /// `∫_ω |∇u₀|²` of the harmonic extension.
    pub extension_integral: f64,
}

fn max_osc(sol: &TransmissionSolution) -> Result<f64> {
    (0..sol.interiors.len()).map(|s| sol.trace_oscillation(s)).try_fold(0.0, |m, v| Ok(f64::max(m, v?)))
}

/// Transmission solves for `k_list ⊂ (0, 1)`, compared with the insulated
/// solution on the same mesh.
pub fn convergence_study(
    g: &GeometryConfig,
    phi: &BoundaryData,
    k_list: &[f64],
    num: &Numerics,
    exec: Execution,
) -> Result<ConvergenceStudy> {
    if k_list.len() < 3 {
        return Err(Error::InsufficientPoints(k_list.len()));
    }
    if let Some(k) = k_list.iter().find(|k| !(**k > 0.0 && **k < 1.0)) {
        return Err(Error::Config(format!("conductivity {k} outside (0, 1)")));
    }
    let mesh = Arc::new(BoundaryMesh::discretize(g, num.mesh_params())?);
    let ins = solve_insulated_on(&mesh, g, phi, exec)?;
    let i_0 = ins.energy();
    let ext = extension_dirichlet_integral(&ins, exec)?;
    let probes = domain_probes(g, &mesh, 0.5 * g.outer.diameter() / 12.0, 0.05);
    let u0: Vec<f64> = ins.field.evaluate(&probes)?.iter().map(|v| v.u).collect();
    let rows = exec
        .map_slice(k_list, |&k| -> Result<EnergyRow> {
            let sol = solve_transmission(&mesh, phi, k, exec)?;
            let energy = EnergyPair {
                i_k: sol.energy(),
                i_0,
                gap_bound: 0.5 * k * ext,
            };
            if !energy.sandwich_ok() {
                return Err(Error::EnergySandwich {
                    k,
                    detail: format!("I_0 = {}, I_k = {}, I_0 + bound = {}", i_0, energy.i_k, i_0 + energy.gap_bound),
                });
            }
            let uk = sol.evaluate(&probes)?;
            let drift = if probes.is_empty() {
                0.0
            } else {
                (uk.iter().zip(&u0).map(|(a, b)| (a.u - b).powi(2)).sum::<f64>() / probes.len() as f64).sqrt()
            };
            Ok(EnergyRow {
                k,
                energy,
                trace_osc_max: max_osc(&sol)?,
                l2_drift: drift,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceStudy {
        rows,
        i_0,
        extension_integral: ext,
    })
}

fn fmt_series(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4e}")).collect();
    format!("[{}]", parts.join(", "))
}

/// Whether a series is non-increasing up to `tol`.
pub fn non_increasing(v: &[f64], tol: f64) -> bool {
    v.windows(2).all(|w| w[1] <= w[0] + tol)
}

pub const TRANSMISSION_COLUMNS: [&str; 7] = ["k", "I_k", "I_0", "gap_bound", "sandwich_ok", "trace_osc_max", "l2_drift"];

/// Report of a convergence study; `closed_form_i0` adds an oracle check
/// on `I₀` at 1% relative tolerance.
pub fn convergence_report(study: &ConvergenceStudy, closed_form_i0: Option<f64>, num: &Numerics) -> SweepReport {
    let mut r = SweepReport::new("transmission_convergence", &TRANSMISSION_COLUMNS, num.stamp(0));
    r.rows = study
        .rows
        .iter()
        .map(|row| {
            vec![
                row.k,
                row.energy.i_k,
                row.energy.i_0,
                row.energy.gap_bound,
                if row.energy.sandwich_ok() { 1.0 } else { 0.0 },
                row.trace_osc_max,
                row.l2_drift,
            ]
        })
        .collect();
    let sandwich = study.rows.iter().all(|r| r.energy.sandwich_ok());
    r.push_criterion(Criterion::new(
        "energy sandwich I0 <= Ik <= I0 + (k/2)|grad u0|^2_L2(w)",
        sandwich,
        format!("{} of {} conductivities", study.rows.iter().filter(|r| r.energy.sandwich_ok()).count(), study.rows.len()),
    ));
    let gaps: Vec<f64> = study.rows.iter().map(|r| r.energy.i_k - r.energy.i_0).collect();
    let positive = gaps.iter().all(|g| *g > -ENERGY_SLACK);
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    r.push_criterion(Criterion::new(
        "Ik - I0 positive and decreasing as k decreases",
        positive && decreasing,
        fmt_series(&gaps),
    ));
    let drifts: Vec<f64> = study.rows.iter().map(|r| r.l2_drift).collect();
    r.push_criterion(Criterion::new(
        "probe drift of uk from u0 decreasing",
        non_increasing(&drifts, 1e-12),
        fmt_series(&drifts),
    ));
    if let Some(exact) = closed_form_i0 {
        let rel = ((study.i_0 - exact) / exact).abs();
        r.push_criterion(Criterion::new(
            "I0 matches the closed form within 1%",
            rel <= 0.01,
            format!("I0 = {:.6}, closed form {:.6}, relative error {rel:.2e}", study.i_0, exact),
        ));
    }
    r
}

/// Trace statistics of `u_k` on every inclusion for `k ≫ 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StiffRow {
    pub k: f64,
    pub oscillation: Vec<f64>,
    pub mean: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct StiffStudy {
    pub rows: Vec<StiffRow>,
    /// Floating potentials of the perfect conductor on the same mesh.
    pub perfect: Vec<f64>,
}

/// Transmission solves for `k_list ⊂ (1, ∞)`, compared with the perfect
/// conductor.
pub fn stiff_limit_study(
    g: &GeometryConfig,
    phi: &BoundaryData,
    k_list: &[f64],
    num: &Numerics,
    exec: Execution,
) -> Result<StiffStudy> {
    if k_list.is_empty() {
        return Err(Error::InsufficientPoints(0));
    }
    if let Some(k) = k_list.iter().find(|k| !(**k > 1.0 && k.is_finite())) {
        return Err(Error::Config(format!("conductivity {k} outside (1, inf)")));
    }
    let mesh = Arc::new(BoundaryMesh::discretize(g, num.mesh_params())?);
    let perfect = solve_direct(&mesh, phi, exec)?.c;
    let rows = exec
        .map_slice(k_list, |&k| -> Result<StiffRow> {
            let sol = solve_transmission(&mesh, phi, k, exec)?;
            let m = sol.interiors.len();
            Ok(StiffRow {
                k,
                oscillation: (0..m).map(|s| sol.trace_oscillation(s)).collect::<Result<_>>()?,
                mean: (0..m).map(|s| sol.trace_mean(s)).collect::<Result<_>>()?,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(StiffStudy { rows, perfect })
}

/// Relative distance of a trace mean from the perfect potential; absolute
/// when the potential vanishes.
pub fn relative_to(mean: f64, c: f64) -> f64 {
    if c.abs() > 1e-12 {
        ((mean - c) / c).abs()
    } else {
        (mean - c).abs()
    }
}

/// Report of a stiff-limit study: oscillation non-increasing on every
/// inclusion and trace means within 5% of the perfect potentials at the
/// largest `k`.
pub fn stiff_report(study: &StiffStudy, num: &Numerics) -> SweepReport {
    let mut r = SweepReport::new(
        "transmission_stiff_limit",
        &["k", "trace_osc_max", "trace_mean_1", "c_1", "max_rel_err"],
        num.stamp(0),
    );
    let c1 = study.perfect.first().cloned().unwrap_or(f64::NAN);
    for row in &study.rows {
        let err = row
            .mean
            .iter()
            .zip(&study.perfect)
            .map(|(m, c)| relative_to(*m, *c))
            .fold(0.0, f64::max);
        r.rows.push(vec![
            row.k,
            row.oscillation.iter().cloned().fold(0.0, f64::max),
            row.mean.first().cloned().unwrap_or(f64::NAN),
            c1,
            err,
        ]);
    }
    r.sort_rows();
    let m = study.perfect.len();
    let monotone = (0..m).all(|s| {
        let mut osc: Vec<(f64, f64)> = study.rows.iter().map(|row| (row.k, row.oscillation[s])).collect();
        osc.sort_by(|a, b| a.0.total_cmp(&b.0));
        non_increasing(&osc.iter().map(|x| x.1).collect::<Vec<_>>(), 1e-12)
    });
    r.push_criterion(Criterion::new(
        "trace oscillation non-increasing in k on every inclusion",
        monotone,
        fmt_series(&r.rows.iter().map(|x| x[1]).collect::<Vec<_>>()),
    ));
    if let Some(last) = r.rows.last() {
        let (k, err) = (last[0], last[4]);
        r.push_criterion(Criterion::new(
            format!("trace mean within 5% of the perfect potential at k = {k}"),
            err <= 0.05,
            format!("max relative error {err:.3e}"),
        ));
    }
    r
}

/// Closed-form exterior coefficients `(a, b)` of `u = (ar + b/r)cosθ` for
/// the annulus `1 < r < 2` with `φ = 2cosθ` and conductivity `k` in `r < 1`.
pub fn annulus_coefficients(k: f64) -> (f64, f64) {
    let t = (1.0 - k) / (1.0 + k);
    let a = 1.0 / (1.0 + 0.25 * t);
    (a, a * t)
}

/// Closed-form `I_k = 2π(a − b/4)` for the same annulus.
pub fn annulus_energy(k: f64) -> f64 {
    let (a, b) = annulus_coefficients(k);
    2.0 * std::f64::consts::PI * (a - 0.25 * b)
}
