//! Geometric invariants over randomized configurations.

use gaplab::geometry::{curvature_profile, min_distance, neighborhood_delta, GeometryConfig, ShapeSpec, Vec2};
use proptest::prelude::*;

fn disk(x: f64, y: f64, r: f64) -> ShapeSpec {
    ShapeSpec::disk(Vec2::new(x, y), r)
}

/// Minimum distance between densely sampled boundary points.
fn sampled_distance(a: &ShapeSpec, b: &ShapeSpec, n: usize) -> f64 {
    let pa = a.sample(n);
    let pb = b.sample(n);
    pa.iter()
        .flat_map(|p| pb.iter().map(move |q| p.dist(*q)))
        .fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn disk_gaps_match_closed_form(
        r1 in 0.2f64..2.0, r2 in 0.2f64..2.0, gap in 1e-4f64..1.0,
        angle in 0.0f64..std::f64::consts::TAU, cx in -3.0f64..3.0, cy in -3.0f64..3.0,
    ) {
        let c1 = Vec2::new(cx, cy);
        let c2 = c1 + Vec2::from_polar(r1 + r2 + gap, angle);
        let info = min_distance(&ShapeSpec::disk(c1, r1), &ShapeSpec::disk(c2, r2)).unwrap();
        let exact = c1.dist(c2) - r1 - r2;
        prop_assert!((info.eps - exact).abs() <= 1e-12);
        prop_assert!((info.xi.dist(info.xj) - info.eps).abs() <= 1e-10);
        let mid = info.xi.lerp(info.xj, 0.5);
        prop_assert!(info.x0.dist(mid) <= 1e-12);
        // x0 lies on the segment between the centers.
        let d = c2 - c1;
        prop_assert!((info.x0 - c1).cross(d).abs() <= 1e-9 * d.norm());
    }

    #[test]
    fn ellipse_gaps_match_dense_sampling(
        a in 0.5f64..2.0, ratio in 0.4f64..1.0, rot in 0.0f64..std::f64::consts::PI,
        angle in 0.0f64..std::f64::consts::TAU, gap in 0.05f64..1.0, r in 0.3f64..1.5,
    ) {
        let e = ShapeSpec::ellipse(Vec2::ZERO, a, a * ratio, rot);
        let c = Vec2::from_polar(a + r + gap, angle);
        let d = disk(c.x, c.y, r);
        let info = min_distance(&e, &d).unwrap();
        prop_assert!((info.xi.dist(info.xj) - info.eps).abs() <= 1e-10);
        let sampled = sampled_distance(&e, &d, 2000);
        prop_assert!(info.eps <= sampled + 1e-12);
        prop_assert!(sampled - info.eps <= 5e-3 * (a + r), "{} vs {}", info.eps, sampled);
    }

    #[test]
    fn delta_ball_avoids_other_contours(
        eps in 0.005f64..0.2, x3 in -1.5f64..1.5, y3 in 1.3f64..2.2, r3 in 0.1f64..0.6,
    ) {
        let h = 1.0 + eps / 2.0;
        let third = disk(x3, y3, r3);
        let inclusions = vec![disk(-h, 0.0, 1.0), disk(h, 0.0, 1.0), third.clone()];
        let Ok(g) = GeometryConfig::new(disk(0.0, 0.0, 4.0), inclusions) else {
            return Ok(());
        };
        let delta = neighborhood_delta(&g, 0, 1).unwrap();
        prop_assert!(delta > 0.0 && delta <= 0.25);
        let x0 = g.gap(0, 1).unwrap().x0;
        for shape in [&g.outer, &third] {
            let closest = shape.sample(4000).iter().map(|p| p.dist(x0)).fold(f64::INFINITY, f64::min);
            prop_assert!(closest > 2.0 * delta, "{closest} vs 2*{delta}");
        }
    }

    #[test]
    fn disk_curvature_constant_and_ellipse_bounded(r in 0.1f64..5.0, a in 0.5f64..3.0, ratio in 0.3f64..1.0) {
        let k = curvature_profile(&ShapeSpec::disk(Vec2::new(1.0, -2.0), r), 64).unwrap();
        prop_assert!(k.iter().all(|v| (v - 1.0 / r).abs() <= 1e-12 / r));
        let b = a * ratio;
        let k = curvature_profile(&ShapeSpec::ellipse(Vec2::ZERO, a, b, 0.3), 256).unwrap();
        let lower = b / (a * a);
        prop_assert!(k.iter().all(|v| *v >= lower * (1.0 - 1e-12)));
    }
}

#[test]
fn curvature_profile_needs_eight_samples() {
    assert!(curvature_profile(&disk(0.0, 0.0, 1.0), 7).is_err());
}

#[test]
fn inclusion_touching_outer_boundary_is_rejected() {
    assert!(GeometryConfig::new(disk(0.0, 0.0, 2.0), vec![disk(1.0, 0.0, 0.99)]).is_err());
    assert!(GeometryConfig::new(disk(0.0, 0.0, 2.0), vec![disk(0.0, 0.0, 1.0)]).is_ok());
}
