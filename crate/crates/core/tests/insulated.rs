use std::f64::consts::PI;
use std::sync::Arc;

use gaplab::data::BoundaryData;
use gaplab::geometry::{GeometryConfig, ShapeSpec, Vec2};
use gaplab::insulated::*;
use gaplab::lab::{GapFamily, Numerics};
use gaplab::{Error, Execution};
use nalgebra::Matrix2;

fn annulus() -> GeometryConfig {
    GeometryConfig::new(ShapeSpec::disk(Vec2::ZERO, 2.0), vec![ShapeSpec::disk(Vec2::ZERO, 1.0)]).unwrap()
}

fn fine() -> Numerics {
    Numerics { coarse_n: 512, ..Numerics::default() }
}

#[test]
fn annulus_oracle_inner_gradient() {
    // u = (4/5)(r + 1/r)cosθ; on r = 1, |∇u| = (8/5)|sinθ|
    let sol = solve_insulated(&annulus(), &BoundaryData::linear(0.0, 1.0, 0.0), &fine(), Execution::Parallel).unwrap();
    let m = sol.field.max_boundary_gradient(1).unwrap();
    assert!((m - 1.6).abs() < 1e-3, "max |grad u| = {m}");
    let p = Vec2::from_polar(1.5, 0.7);
    let v = sol.field.evaluate(&[p]).unwrap()[0];
    let exact = 0.8 * (1.5 + 1.0 / 1.5) * 0.7f64.cos();
    assert!((v.u - exact).abs() < 1e-4, "{} vs {exact}", v.u);
}

#[test]
fn inclusion_fluxes_are_exactly_zero() {
    let g = GapFamily::two_disks().geometry(0.05).unwrap();
    let sol = solve_insulated(&g, &BoundaryData::linear(0.0, 0.0, 0.25), &Numerics::default(), Execution::Parallel).unwrap();
    let mesh = sol.mesh().clone();
    for c in 1..mesh.contours().len() {
        for j in mesh.contour(c).unwrap().start..mesh.contour(c).unwrap().end {
            assert_eq!(sol.field.flux[j], 0.0);
        }
    }
}

#[test]
fn constant_data_gives_constant_solution() {
    let g = GapFamily::two_disks().geometry(0.02).unwrap();
    let sol = solve_insulated(&g, &BoundaryData::constant(0.7), &Numerics::default(), Execution::Parallel).unwrap();
    let pts = [Vec2::new(0.0, 0.0), Vec2::new(0.0, 2.5), Vec2::new(-3.0, 0.5)];
    for v in sol.field.evaluate(&pts).unwrap() {
        assert!((v.u - 0.7).abs() < 1e-9);
        assert!(v.grad.norm() < 1e-8);
    }
    let gap = GapRegion::from_family(&GapFamily::two_disks(), 0.02).unwrap();
    let prof = pointwise_bound_profile(&sol, &gap, &Numerics::default()).unwrap();
    assert!(prof.rows.iter().all(|r| r.normalized_n < 1e-7));
}

#[test]
fn odd_data_gives_odd_solution() {
    let g = GapFamily::two_disks().geometry(0.05).unwrap();
    let sol = solve_insulated(&g, &BoundaryData::linear(0.0, 0.25, 0.0), &Numerics::default(), Execution::Parallel).unwrap();
    let pts: Vec<Vec2> = (0..12).map(|k| Vec2::from_polar(2.2 + 0.1 * k as f64, 0.3 * k as f64)).collect();
    let mirrored: Vec<Vec2> = pts.iter().map(|p| Vec2::new(-p.x, p.y)).collect();
    let a = sol.field.evaluate(&pts).unwrap();
    let b = sol.field.evaluate(&mirrored).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x.u + y.u).abs() < 1e-6);
    }
}

#[test]
fn probes_obey_the_maximum_principle() {
    let fam = GapFamily::two_disks();
    let g = fam.geometry(0.01).unwrap();
    let phi = BoundaryData::linear(0.0, 0.0, 0.25);
    let sol = solve_insulated(&g, &phi, &Numerics::default(), Execution::Parallel).unwrap();
    let (lo, hi) = phi.range(&g.outer);
    let gap = GapRegion::from_family(&fam, 0.01).unwrap();
    let pts: Vec<Vec2> = gap.lattice(gap.r, 20, 5).into_iter().map(|(xp, x1)| gap.to_world(x1, xp)).collect();
    for v in sol.field.evaluate_each(&pts).into_iter().flatten() {
        assert!(v.u >= lo - 1e-9 && v.u <= hi + 1e-9);
    }
}

#[test]
fn energy_from_boundary_matches_interior_quadrature() {
    let sol = solve_insulated(&annulus(), &BoundaryData::linear(0.0, 1.0, 0.0), &fine(), Execution::Parallel).unwrap();
    let boundary = sol.field.dirichlet_energy();
    assert!((boundary - 1.2 * PI).abs() < 1e-3 * 1.2 * PI);
    // Gauss–Legendre in r, trapezoid in θ
    let gl = gaplab::bem::gauss_legendre_16();
    let nt = 64;
    let mut pts = Vec::new();
    let mut w = Vec::new();
    for (x, wx) in gl.0.iter().zip(gl.1.iter()) {
        let r = 1.5 + 0.5 * x;
        for k in 0..nt {
            pts.push(Vec2::from_polar(r, 2.0 * PI * k as f64 / nt as f64));
            w.push(0.5 * wx * r * 2.0 * PI / nt as f64);
        }
    }
    let vals = sol.field.evaluate(&pts).unwrap();
    let interior: f64 = 0.5 * vals.iter().zip(&w).map(|(v, w)| w * v.grad.norm_sq()).sum::<f64>();
    assert!(((interior - boundary) / boundary).abs() < 0.01, "{interior} vs {boundary}");
}

#[test]
fn gap_region_apex_and_default_radius() {
    let disk = GapRegion::from_family(&GapFamily::two_disks(), 0.01).unwrap();
    assert_eq!(disk.apex_conditions(), [0.0; 4]);
    assert!((disk.r - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    assert!((disk.upper.slope(disk.r) - 1.0).abs() < 1e-12);
    let pow = GapRegion::from_family(&GapFamily::power_pair(2), 0.01).unwrap();
    assert_eq!(pow.apex_conditions(), [0.0; 4]);
    assert!(pow.r <= 0.8);
    assert!((pow.upper.slope(pow.r) - 1.0).abs() < 1e-12);
    assert!(GapRegion::new(GapProfile::quadratic(), GapProfile::quadratic(), 0.0).is_err());
    for (xp, x1) in disk.lattice(disk.r, 10, 5) {
        assert!(disk.contains(x1, xp, disk.r));
    }
}

#[test]
fn profile_rejects_single_inclusion() {
    let sol = solve_insulated(&annulus(), &BoundaryData::linear(0.0, 1.0, 0.0), &Numerics::default(), Execution::Parallel).unwrap();
    let gap = GapRegion::new(GapProfile::quadratic(), GapProfile::quadratic(), 0.01).unwrap();
    assert!(matches!(pointwise_bound_profile(&sol, &gap, &Numerics::default()), Err(Error::InvalidIndex(_))));
}

#[test]
fn insulated_sweep_bound() {
    let num = Numerics::default();
    let fam = GapFamily::two_disks();
    let phi = BoundaryData::linear(0.0, 0.0, 0.25);
    let prof = insulated_sweep(&fam, &phi, &[0.1, 0.05, 0.02, 0.01, 0.005], &num, Execution::Parallel).unwrap();
    let r = insulated_report(&prof, &num).unwrap();
    assert!(r.passed(), "{}", r.summary());
    assert!(prof.iter().all(|p| p.max_n.is_finite() && p.max_n > 0.0));
    let rows = profile_report(&prof, &num);
    assert_eq!(rows.columns, ["epsilon", "xprime", "grad_norm", "normalized_N"]);
    assert_eq!(rows.rows.len(), prof.iter().map(|p| p.rows.len()).sum::<usize>());
}

fn quad_gap(eps: f64) -> GapRegion {
    GapRegion::new(GapProfile::quadratic(), GapProfile::quadratic(), eps).unwrap()
}

#[test]
fn rescale_examples() {
    let g = quad_gap(0.01);
    assert!((rescale_map(&g, 0.0).unwrap().delta - 0.1).abs() < 1e-15);
    let m = rescale_map(&g, 0.1).unwrap();
    assert!((m.delta - 0.02f64.sqrt()).abs() < 1e-15);
    assert!(m.comparable(0.01, 10.0));
    assert!(matches!(rescale_map(&g, 0.5 * g.r), Err(Error::OffsetOutOfRange(..))));
    let mut s = 7u64;
    for _ in 0..100 {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let x = Vec2::new((s >> 11) as f64 / (1u64 << 53) as f64 - 0.5, (s % 1000) as f64 / 1000.0 - 0.5);
        assert!(m.inverse(m.forward(x)).dist(x) < 1e-12);
    }
}

#[test]
fn flatten_examples() {
    let g = quad_gap(0.01);
    let rs = rescale_map(&g, 0.0).unwrap();
    let fl = flatten_map(&g, &rs, DEFAULT_RTILDE).unwrap();
    assert!((fl.normal_stretch(Vec2::ZERO) - 2.0).abs() < 1e-12);
    assert!((fl.jacobian(Vec2::ZERO)[(0, 0)] - 2.0).abs() < 1e-12);
    for yp in [-0.5, -0.1, 0.0, 0.3] {
        let (lo, hi) = fl.faces(yp);
        assert_eq!(fl.forward(Vec2::new(lo, yp)).x, -rs.delta);
        assert!((fl.forward(Vec2::new(hi, yp)).x - rs.delta).abs() < 1e-15);
    }
    let off = rescale_map(&g, 0.2).unwrap();
    let fo = flatten_map(&g, &off, DEFAULT_RTILDE).unwrap();
    for k in 0..50 {
        let z = Vec2::new(off.delta * ((k as f64 * 0.37).sin()), (k as f64 * 0.61).cos());
        assert!(fo.forward(fo.inverse(z)).dist(z) < 1e-10);
        // Jacobian against finite differences
        let y = fo.inverse(z);
        let j = fo.jacobian(y);
        let h = 1e-6;
        let d1 = (fo.forward(y + Vec2::new(h, 0.0)) - fo.forward(y - Vec2::new(h, 0.0))) * (0.5 / h);
        let d2 = (fo.forward(y + Vec2::new(0.0, h)) - fo.forward(y - Vec2::new(0.0, h))) * (0.5 / h);
        assert!((j[(0, 0)] - d1.x).abs() < 1e-6 && (j[(0, 1)] - d2.x).abs() < 1e-6);
        assert!(d1.y.abs() < 1e-9 && (j[(1, 1)] - d2.y).abs() < 1e-6);
    }
    let degenerate = FlattenMap { rtilde: f64::INFINITY, ..fl };
    assert!(flatten_map(&degenerate.gap, &degenerate.rescale, f64::INFINITY).is_err());
}

#[test]
fn pushforward_examples() {
    let id = pushforward_coefficients(constant_coefficient(Matrix2::identity()), Arc::new(IdentityMap { delta: 0.2 }), 20).unwrap();
    assert_eq!(id.eval(Vec2::new(0.1, 0.3)), Matrix2::identity());
    assert_eq!((id.lambda, id.big_lambda), (1.0, 1.0));

    // a = diag(2, 1), z = (y₁, y′/r̃): J = diag(1, 1/r̃), |det J| = 1/r̃ → b = diag(2r̃, 1/r̃)
    let rt = 0.5;
    let b = pushforward_coefficients(
        constant_coefficient(Matrix2::new(2.0, 0.0, 0.0, 1.0)),
        Arc::new(ScalingMap { delta: 0.3, rtilde: rt }),
        20,
    )
    .unwrap();
    let v = b.eval(Vec2::new(0.1, -0.4));
    assert!((v[(0, 0)] - 2.0 * rt).abs() < 1e-15 && (v[(1, 1)] - 1.0 / rt).abs() < 1e-15 && v[(0, 1)] == 0.0);

    let g = GapRegion::from_family(&GapFamily::two_disks(), 0.01).unwrap();
    let rs = rescale_map(&g, 0.0).unwrap();
    let fl = flatten_map(&g, &rs, DEFAULT_RTILDE).unwrap();
    let b = pushforward_coefficients(constant_coefficient(Matrix2::identity()), Arc::new(fl), 50).unwrap();
    assert!(b.lambda > 0.05, "lambda = {}", b.lambda);
    for z in strip_grid(b.delta, 17) {
        let m = b.eval(z);
        assert_eq!(m[(0, 1)].to_bits(), m[(1, 0)].to_bits());
        assert!(sym_eigen(&m).0 > 0.0);
    }

    let skew: Coefficient = Arc::new(|_| Matrix2::new(1.0, 0.2, 0.1, 1.0));
    assert!(matches!(
        pushforward_coefficients(skew, Arc::new(IdentityMap { delta: 0.2 }), 5),
        Err(Error::NonSymmetric(..))
    ));
    let indefinite = constant_coefficient(Matrix2::new(1.0, 2.0, 2.0, 1.0));
    assert!(matches!(
        pushforward_coefficients(indefinite, Arc::new(IdentityMap { delta: 0.2 }), 5),
        Err(Error::NotElliptic(_))
    ));
}

fn identity_strip(delta: f64) -> StripCoefficients {
    pushforward_coefficients(constant_coefficient(Matrix2::identity()), Arc::new(IdentityMap { delta }), 5).unwrap()
}

#[test]
fn flip_of_even_and_odd_profiles() {
    let d = 0.2;
    let sq = flip_extend(Arc::new(|z: Vec2| z.x * z.x), &identity_strip(d));
    let (a, b) = sq.interface_traces(0, 0.3);
    assert_eq!(a, d * d);
    assert_eq!(a.to_bits(), b.to_bits());
    for k in 0..40 {
        let z1 = -1.0 + 2.0 * k as f64 / 39.0;
        let z = Vec2::new(z1, 0.1);
        let period = Vec2::new(z1 + 2.0 * d, 0.1);
        if period.x <= 1.0 {
            assert!((sq.w_tilde(z) - sq.w_tilde(period)).abs() < 1e-12);
        }
    }
    let lin = flip_extend(Arc::new(|z: Vec2| z.x), &identity_strip(d));
    let just_above = Vec2::new(d * (1.0 + 1e-12), 0.0);
    assert!((lin.w_tilde(just_above) - d).abs() < 1e-12);
    assert!(lin.w_tilde(Vec2::new(2.0 * d, 0.0)).abs() < 1e-15);
}

#[test]
fn flip_restricts_to_w_and_is_even_about_interfaces() {
    let d = 0.3;
    let b = pushforward_coefficients(constant_coefficient(Matrix2::new(2.0, 0.6, 0.6, 1.0)), Arc::new(IdentityMap { delta: d }), 10).unwrap();
    let w: ScalarField = Arc::new(|z: Vec2| (3.0 * z.x).sin() + z.y * z.x);
    let ext = flip_extend(w.clone(), &b);
    // clipped end tiles
    assert_eq!(ext.tiles.first().unwrap().lo, -1.0);
    assert_eq!(ext.tiles.last().unwrap().hi, 1.0);
    for k in 0..21 {
        let z = Vec2::new(-d + 2.0 * d * k as f64 / 20.0, 0.37);
        assert_eq!(ext.w_in_tile(z, 0), w(z));
        assert_eq!(ext.b_in_tile(z, 0), b.eval(z));
    }
    for l in ext.interfaces() {
        let plane = (2 * l + 1) as f64 * d;
        for h in [0.01, 0.05, 0.1] {
            for zp in [-0.8, 0.0, 0.5] {
                let up = ext.w_tilde(Vec2::new(plane + h, zp));
                let dn = ext.w_tilde(Vec2::new(plane - h, zp));
                assert!((up - dn).abs() < 1e-12);
            }
        }
        let odd = ext.b_in_tile(Vec2::new((2 * l + 1) as f64 * d + 0.01, 0.0), l + 1);
        let even = ext.b_in_tile(Vec2::new((2 * l + 1) as f64 * d - 0.01, 0.0), l);
        assert_eq!(odd[(0, 1)], -even[(0, 1)]);
        assert_eq!(odd[(0, 0)], even[(0, 0)]);
    }
}

#[test]
fn strip_solution_is_a_solution() {
    let b = Matrix2::new(2.0, 0.6, 0.6, 1.0);
    let d = 0.25;
    let w = strip_solution(b, d);
    let h = 1e-4;
    for k in 0..20 {
        let z = Vec2::new(d * (k as f64 * 0.7).sin() * 0.9, (k as f64 * 1.3).cos() * 0.9);
        let f = |dx: f64, dy: f64| w(z + Vec2::new(dx, dy));
        let wxx = (f(h, 0.0) - 2.0 * f(0.0, 0.0) + f(-h, 0.0)) / (h * h);
        let wyy = (f(0.0, h) - 2.0 * f(0.0, 0.0) + f(0.0, -h)) / (h * h);
        let wxy = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
        let lap = b[(0, 0)] * wxx + 2.0 * b[(0, 1)] * wxy + b[(1, 1)] * wyy;
        assert!(lap.abs() < 1e-3 * (wxx.abs() + wyy.abs() + 1.0), "{lap}");
    }
    for zp in [-0.9, 0.0, 0.4] {
        for s in [-1.0, 1.0] {
            let g = numeric_grad(&w, Vec2::new(s * d, zp));
            assert!((b[(0, 0)] * g.x + b[(0, 1)] * g.y).abs() < 1e-6);
        }
    }
}

#[test]
fn flip_weak_residual_and_negative_control() {
    let aniso = Matrix2::new(2.0, 0.6, 0.6, 1.0);
    let d = 0.3;
    let b = pushforward_coefficients(constant_coefficient(aniso), Arc::new(IdentityMap { delta: d }), 10).unwrap();
    let ext = flip_extend(strip_solution(aniso, d), &b);
    let (res, base) = flip_residuals(&ext, 11, 200, true);
    assert!(res <= 5.0 * base, "{res} vs {base}");
    let (wrong, _) = flip_residuals(&ext, 11, 200, false);
    assert!(wrong > 20.0 * base, "{wrong} vs {base}");
}

#[test]
fn transform_self_test_passes_on_catalog_gaps() {
    for fam in [GapFamily::two_disks(), GapFamily::power_pair(2)] {
        let g = GapRegion::from_family(&fam, 0.01).unwrap();
        let t = transform_self_test(&g, 0.3, 5).unwrap();
        assert!(t.passed(), "{}", t.table);
        assert_eq!(t.table.lines().count(), t.criteria.len() + 1);
    }
}
