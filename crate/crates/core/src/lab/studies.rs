//! Stand-alone certification studies: engine accuracy, the insulated
//! annulus oracle and the decomposed/direct cross-check.

use std::f64::consts::{LN_2, PI, TAU};
use std::sync::Arc;

use crate::bem::{gauss_legendre_16, solve_bvp, BCSpec, BoundaryMesh};
use crate::data::BoundaryData;
use crate::error::Result;
use crate::exec::Execution;
use crate::geometry::{GeometryConfig, Vec2};
use crate::insulated::solve_insulated;
use crate::lab::numerics::Numerics;
use crate::lab::report::{Criterion, SweepReport};
use crate::perfect::{discretize, random_admissible, solve_decomposed, solve_direct};

/// Panel counts of the engine certification.
pub const CERTIFICATION_PANELS: [usize; 3] = [128, 256, 512];

/// Annulus `1 < r < 2` with `u = 0` inside and `u = 1` outside; the exact
/// flux through the inner circle is `2π/ln 2`.
pub fn bem_certification(g: &GeometryConfig, num: &Numerics, exec: Execution) -> Result<SweepReport> {
    let exact = TAU / LN_2;
    let mut r = SweepReport::new("bem_certification", &["panels", "flux", "rel_err", "net_flux"], num.stamp(0));
    for n in CERTIFICATION_PANELS {
        let p = Numerics { coarse_n: n, ..*num };
        let mesh = discretize(g, &p)?;
        let mut bc = BCSpec::dirichlet(&mesh, |_| 1.0);
        bc.set_constant(&mesh, 1, 0.0)?;
        let f = solve_bvp(&mesh, &bc, exec)?;
        let flux = f.contour_flux(1)?;
        r.rows.push(vec![mesh.contour(0)?.len() as f64, flux, ((flux - exact) / exact).abs(), f.net_flux()]);
    }
    let errs = r.column("rel_err")?;
    let last = *errs.last().expect("three rows");
    r.push_criterion(Criterion::new(
        "annulus flux 2pi/ln2 within 0.1% at 512 panels",
        last <= 1e-3,
        format!("relative error {last:.3e}"),
    ));
    let ratio = errs[errs.len() - 2] / last;
    r.push_criterion(Criterion::new(
        "refinement at least halves the error",
        ratio >= 2.0,
        format!("error ratio 256 -> 512 panels: {ratio:.3}"),
    ));
    let worst = r.column("net_flux")?.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    r.push_criterion(Criterion::new("global flux balance", worst <= 1e-7, format!("max |net flux| {worst:.3e} <= 1e-7")));
    r.fit("panels", "rel_err")?;
    Ok(r)
}

/// Insulated annulus with `φ = 2cosθ`: `u = (4/5)(r + 1/r)cosθ`, so the
/// largest inner-circle gradient is `8/5` and `(1/2)∫|∇u|² = 6π/5`.
pub fn insulated_oracle(g: &GeometryConfig, phi: &BoundaryData, num: &Numerics, exec: Execution) -> Result<SweepReport> {
    let sol = solve_insulated(g, phi, num, exec)?;
    let max_grad = sol.field.max_boundary_gradient(1)?;
    let boundary = sol.field.dirichlet_energy();
    let (x, w) = gauss_legendre_16();
    let nt = 64;
    let mut pts = Vec::new();
    let mut wts = Vec::new();
    for (xi, wi) in x.iter().zip(w.iter()) {
        let r = 1.5 + 0.5 * xi;
        for k in 0..nt {
            pts.push(Vec2::from_polar(r, TAU * k as f64 / nt as f64));
            wts.push(0.5 * wi * r * TAU / nt as f64);
        }
    }
    let vals = sol.field.evaluate(&pts)?;
    let interior = 0.5 * vals.iter().zip(&wts).map(|(v, w)| w * v.grad.norm_sq()).sum::<f64>();
    let mut r = SweepReport::new(
        "insulated_oracle",
        &["panels", "max_inner_grad", "energy_boundary", "energy_interior"],
        num.stamp(0),
    );
    r.rows.push(vec![sol.mesh().contour(1)?.len() as f64, max_grad, boundary, interior]);
    r.push_criterion(Criterion::new(
        "max inner-circle |grad u| = 1.6",
        (max_grad - 1.6).abs() <= 1e-3,
        format!("{max_grad:.6} (error {:.2e} <= 1e-3)", (max_grad - 1.6).abs()),
    ));
    let rel = ((boundary - interior) / interior).abs();
    r.push_criterion(Criterion::new(
        "boundary energy matches interior quadrature",
        rel <= 0.01,
        format!("{boundary:.6} vs {interior:.6} (relative {rel:.2e} <= 1e-2; closed form {:.6})", 1.2 * PI),
    ));
    Ok(r)
}

/// Decomposed and direct perfect solves on random 2–3 inclusion
/// configurations; floating potentials must agree to `1e−8` relative.
pub fn cross_check(seed: u64, configs: usize, phi: &BoundaryData, num: &Numerics, exec: Execution) -> Result<SweepReport> {
    let mut r = SweepReport::new(
        "cross_check",
        &["config", "inclusions", "panels", "max_rel_diff", "c_min", "c_max"],
        num.stamp(seed),
    );
    for i in 0..configs {
        let m = 2 + i % 2;
        let g = random_admissible(seed.wrapping_mul(1_000_003).wrapping_add(i as u64), m);
        let mesh: Arc<BoundaryMesh> = discretize(&g, num)?;
        let (d, _, _) = solve_decomposed(&mesh, phi, exec)?;
        let x = solve_direct(&mesh, phi, exec)?;
        let rel = d
            .c
            .iter()
            .zip(&x.c)
            .map(|(a, b)| {
                let s = a.abs().max(b.abs());
                if s > 0.0 {
                    (a - b).abs() / s
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max);
        let (lo, hi) = d.c.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), c| (a.min(*c), b.max(*c)));
        r.rows.push(vec![i as f64, m as f64, mesh.len() as f64, rel, lo, hi]);
    }
    let worst = r.column("max_rel_diff")?.into_iter().fold(0.0, f64::max);
    r.push_criterion(Criterion::new(
        "decomposed and direct floating potentials agree",
        worst <= 1e-8 && configs > 0,
        format!("{configs} configurations, worst relative difference {worst:.3e} <= 1e-8"),
    ));
    Ok(r)
}
