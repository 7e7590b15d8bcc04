//! Dispatch of a [`LabConfig`] to the studies and artifact emission.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::bem::BoundaryMesh;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::insulated::{
    insulated_report, insulated_sweep, pointwise_bound_profile, profile_report, solve_insulated_on, transform_self_test,
    GapRegion,
};
use crate::lab::config::{LabConfig, Mode, Study};
use crate::lab::report::{Criterion, SweepReport};
use crate::lab::studies::{bem_certification, cross_check, insulated_oracle};
use crate::lab::svg::loglog_svg;
use crate::matrix::{format_suite, run_property_suite};
use crate::perfect::{
    capacity_asymptotics, flat_gap_blowup, gradient_blowup, perfect_sweep, potential_gap_bound, solve_decomposed,
    solve_direct,
};
use crate::transmission::{convergence_report, convergence_study, stiff_limit_study, stiff_report};

/// Reports and text tables of one run.
#[derive(Clone, Debug, Default)]
pub struct RunOutcome {
    pub run_id: String,
    pub reports: Vec<SweepReport>,
    pub tables: Vec<(String, String)>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed())
    }

    pub fn criteria(&self) -> impl Iterator<Item = &Criterion> {
        self.reports.iter().flat_map(|r| r.criteria.iter())
    }

    pub fn summary(&self) -> String {
        let mut s = format!("run: {}\n\n", self.run_id);
        for r in &self.reports {
            s.push_str(&r.summary());
            s.push('\n');
        }
        for (name, t) in &self.tables {
            let _ = writeln!(s, "table: {name}\n{t}");
        }
        let _ = writeln!(s, "result: {}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }
}

/// Executes a configuration.
pub fn run(cfg: &LabConfig, exec: Execution) -> Result<RunOutcome> {
    let num = &cfg.numerics;
    let seed = cfg.sweep.seed;
    let mut out = RunOutcome {
        run_id: cfg.run_id(),
        ..RunOutcome::default()
    };
    match cfg.mode {
        Mode::MatrixCheck => {
            let results = run_property_suite(seed, cfg.sweep.sizes, exec);
            let mut r = SweepReport::new("matrix_check", &["family", "cases", "failures", "worst", "tolerance"], num.stamp(seed));
            for (i, p) in results.iter().enumerate() {
                r.rows.push(vec![i as f64, p.cases as f64, p.failures as f64, p.worst, p.tolerance]);
                r.push_criterion(Criterion::new(
                    p.name.clone(),
                    p.passed(),
                    format!("{} cases, {} failures, worst {:.3e}", p.cases, p.failures, p.worst),
                ));
            }
            out.tables.push(("matrix_check".into(), format_suite(&results)));
            out.reports.push(r);
        }
        Mode::Perfect => {
            let g = cfg.geometry.resolve()?;
            let phi = cfg.data_or_err()?.normalized(&g.outer);
            let mesh = Arc::new(BoundaryMesh::discretize(&g, num.mesh_params())?);
            let (d, sys, _) = solve_decomposed(&mesh, &phi, exec)?;
            let x = solve_direct(&mesh, &phi, exec)?;
            let mut r = SweepReport::new(
                "perfect",
                &["inclusion", "c_decomposed", "c_direct", "rel_diff", "a_diag", "a_row_sum"],
                num.stamp(seed),
            );
            let mut worst: f64 = 0.0;
            for i in 0..sys.m() {
                let rel = (d.c[i] - x.c[i]).abs() / d.c[i].abs().max(x.c[i].abs()).max(f64::MIN_POSITIVE);
                worst = worst.max(rel);
                r.rows.push(vec![i as f64, d.c[i], x.c[i], rel, sys.a[(i, i)], sys.a.row(i).sum()]);
            }
            r.push_criterion(Criterion::new(
                "capacity signs and negative row sums",
                sys.structure_ok(),
                format!("symmetry defect {:.2e}", sys.symmetry_defect),
            ));
            r.push_criterion(Criterion::new(
                "decomposed and direct potentials agree",
                worst <= 1e-8,
                format!("worst relative difference {worst:.3e} <= 1e-8"),
            ));
            out.reports.push(r);
        }
        Mode::Insulated => {
            let g = cfg.geometry.resolve()?;
            let data = cfg.data_or_err()?;
            let phi = data.normalized(&g.outer);
            let mesh = Arc::new(BoundaryMesh::discretize(&g, num.mesh_params())?);
            let sol = solve_insulated_on(&mesh, &g, &phi, exec)?;
            let zero = (1..mesh.contours().len()).all(|c| {
                let k = &mesh.contours()[c];
                sol.field.flux[k.start..k.end].iter().all(|q| *q == 0.0)
            });
            let (lo, hi) = phi.range(&g.outer);
            let probes = crate::transmission::domain_probes(&g, &mesh, 0.5 * g.outer.diameter() / 16.0, 0.05);
            let vals = sol.field.evaluate(&probes)?;
            let inside = vals.iter().all(|v| v.u >= lo - 1e-9 && v.u <= hi + 1e-9);
            let mut r = if let (Some(f), Some(eps), true) = (&cfg.geometry.family, cfg.geometry.eps, g.m() >= 2) {
                let prof = pointwise_bound_profile(&sol, &GapRegion::from_family(f, eps)?, num)?;
                let mut r = profile_report(std::slice::from_ref(&prof), num);
                r.push_criterion(Criterion::new("normalized gradient finite", prof.max_n.is_finite(), format!("max N = {:.4}", prof.max_n)));
                r
            } else {
                let mut r = SweepReport::new("insulated", &["x", "y", "u", "grad_norm"], num.stamp(seed));
                r.rows = probes.iter().zip(&vals).map(|(p, v)| vec![p.x, p.y, v.u, v.grad.norm()]).collect();
                r
            };
            r.push_criterion(Criterion::new("inclusion fluxes exactly zero", zero, "prescribed panel-wise"));
            r.push_criterion(Criterion::new(
                "maximum principle at probes",
                inside,
                format!("{} probes within [{lo:.4}, {hi:.4}]", probes.len()),
            ));
            out.reports.push(r);
        }
        Mode::Transmission => {
            // Energies are compared with closed forms of the data as given,
            // so transmission runs do not rescale the boundary data.
            let g = cfg.geometry.resolve()?;
            let phi = cfg.data_or_err()?.clone();
            let ks = &cfg.sweep.k_list;
            if !ks.is_empty() && ks.iter().all(|k| *k > 0.0 && *k < 1.0) {
                let study = convergence_study(&g, &phi, ks, num, exec)?;
                out.reports.push(convergence_report(&study, cfg.sweep.reference, num));
            } else if !ks.is_empty() && ks.iter().all(|k| *k > 1.0) {
                let study = stiff_limit_study(&g, &phi, ks, num, exec)?;
                out.reports.push(stiff_report(&study, num));
            } else {
                return Err(Error::Config("sweep.k_list must lie entirely in (0, 1) or entirely in (1, inf)".into()));
            }
        }
        Mode::Sweep => {
            let study = cfg
                .sweep
                .study
                .ok_or_else(|| Error::Config("sweep.study is required in sweep mode".into()))?;
            let eps = &cfg.sweep.eps_list;
            match study {
                Study::GradientBlowup | Study::PotentialGapBound | Study::CapacityAsymptotics | Study::FlatGapBlowup => {
                    let fam = cfg.geometry.family_or_err()?;
                    let pts = perfect_sweep(fam, cfg.data_or_err()?, eps, num, exec)?;
                    let r = match study {
                        Study::GradientBlowup => gradient_blowup(&pts, num)?,
                        Study::PotentialGapBound => potential_gap_bound(&pts, num)?,
                        Study::CapacityAsymptotics => capacity_asymptotics(&pts, num)?,
                        _ => flat_gap_blowup(&pts, fam.power(), num)?,
                    };
                    out.reports.push(r);
                }
                Study::CrossCheck => {
                    out.reports.push(cross_check(seed, cfg.sweep.configs, cfg.data_or_err()?, num, exec)?);
                }
                Study::InsulatedBound => {
                    let fam = cfg.geometry.family_or_err()?;
                    let prof = insulated_sweep(fam, cfg.data_or_err()?, eps, num, exec)?;
                    out.reports.push(insulated_report(&prof, num)?);
                    out.reports.push(profile_report(&prof, num));
                }
                Study::InsulatedOracle => {
                    let g = cfg.geometry.resolve()?;
                    out.reports.push(insulated_oracle(&g, cfg.data_or_err()?, num, exec)?);
                }
                Study::TransformSelfTest => {
                    let fam = cfg.geometry.family_or_err()?;
                    let gap = GapRegion::from_family(fam, cfg.geometry.eps.unwrap_or(0.01))?;
                    let t = transform_self_test(&gap, cfg.sweep.flip_delta, seed)?;
                    let mut r = SweepReport::new("transforms", &["check", "value", "passed"], num.stamp(seed));
                    for (i, (c, v)) in t.criteria.iter().zip(&t.values).enumerate() {
                        r.rows.push(vec![i as f64, *v, if c.passed { 1.0 } else { 0.0 }]);
                    }
                    r.criteria = t.criteria.clone();
                    out.tables.push(("transforms".into(), t.table));
                    out.reports.push(r);
                }
                Study::BemCertification => {
                    let g = cfg.geometry.resolve()?;
                    out.reports.push(bem_certification(&g, num, exec)?);
                }
            }
        }
    }
    for r in &mut out.reports {
        r.stamp.seed = seed;
    }
    Ok(out)
}

/// Writes `report.csv` (first report), `<name>.csv` for further reports,
/// `summary.txt` and one log-log chart per report with fitted slopes.
pub fn write_artifacts(out: &RunOutcome, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (i, r) in out.reports.iter().enumerate() {
        let name = if i == 0 { "report.csv".to_string() } else { format!("{}.csv", r.name) };
        let p = dir.join(name);
        std::fs::write(&p, r.to_csv())?;
        written.push(p);
        if !r.slopes.is_empty() && r.rows.len() >= 2 {
            let xs = r.column(&r.columns[0])?;
            let series = r
                .slopes
                .iter()
                .map(|s| {
                    let ys = r.column(&s.quantity)?;
                    Ok((
                        format!("{} (slope {:.3})", s.quantity, s.fit.slope),
                        xs.iter().cloned().zip(ys.into_iter().map(f64::abs)).collect(),
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            let p = dir.join(format!("{}.svg", r.name));
            std::fs::write(&p, loglog_svg(&r.name, &r.columns[0], &series))?;
            written.push(p);
        }
    }
    let p = dir.join("summary.txt");
    std::fs::write(&p, out.summary())?;
    written.push(p);
    Ok(written)
}
