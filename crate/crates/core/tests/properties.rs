use std::f64::consts::TAU;

use proptest::prelude::*;

use slitspiral::boundary::{
    grading_map, parameterize, spline_basis, spline_basis_derivative, BoundaryCurve, DiscretizedBoundary, Orientation,
    Segment,
};
use slitspiral::geometry::{count_intersections, signed_area, Point, Region};
use slitspiral::isoparam::{spacing_control, IdentityMap, IsoMap, SpacingOptions};
use slitspiral::metrics::{coverage_fraction, str_ratio};
use slitspiral::slitmap::{assemble_kernels, solve_mapping, MapKind, SlitArc, SolveOptions};
use slitspiral::spiral::{build_ladder, interpolate_ladder, scan_theta0, slit_intersections, Polar};

fn star_controls(radii: &[f64], center: Point, ccw: bool) -> Vec<Point> {
    let n = radii.len();
    (0..n)
        .map(|i| {
            let a = TAU * i as f64 / n as f64;
            center + Point::from_polar(radii[i], if ccw { a } else { -a })
        })
        .collect()
}

fn circle(center: Point, r: f64, o: Orientation, n: usize) -> slitspiral::boundary::BoundarySamples {
    parameterize(&BoundaryCurve::smooth(Segment::circle(center, r, o)).unwrap(), 3, n).unwrap()
}

proptest! {
    #[test]
    fn basis_partition_of_unity(u in 0.0f64..=1.0) {
        let b = spline_basis(u);
        let d = spline_basis_derivative(u);
        prop_assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(d.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn grading_is_monotone(p in 2u32..=6, a in 0.0f64..TAU, b in 0.0f64..TAU) {
        prop_assume!((a - b).abs() > 1e-9);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(grading_map(lo, p).unwrap() < grading_map(hi, p).unwrap());
    }

    #[test]
    fn closed_spline_is_periodic(radii in prop::collection::vec(0.7f64..1.3, 6..16)) {
        let seg = Segment::closed_spline(star_controls(&radii, Point::new(0.0, 0.0), true));
        let (z0, d0, _) = seg.jet(0.0);
        let (z1, d1, _) = seg.jet(seg.param_len());
        prop_assert!((z0 - z1).norm() < 1e-9);
        prop_assert!((d0 - d1).norm() < 1e-9);
    }

    #[test]
    fn orientation_follows_role(radii in prop::collection::vec(0.7f64..1.3, 6..12), n in (16usize..64).prop_map(|k| 2 * k)) {
        let outer = BoundaryCurve::smooth(Segment::closed_spline(star_controls(&radii, Point::new(0.0, 0.0), true))).unwrap();
        let hole = outer.reversed();
        prop_assert!(signed_area(&parameterize(&outer, 3, n).unwrap().z) > 0.0);
        prop_assert!(signed_area(&parameterize(&hole, 3, n).unwrap().z) < 0.0);
    }

    #[test]
    fn derivative_matches_central_difference(
        corners in prop::collection::vec((0.5f64..1.5, -0.2f64..0.2), 3..7),
    ) {
        // convex-ish polygon with jittered vertices
        let m = corners.len();
        let verts: Vec<Point> = corners
            .iter()
            .enumerate()
            .map(|(i, (r, j))| Point::from_polar(*r, TAU * i as f64 / m as f64 + j))
            .collect();
        prop_assume!(signed_area(&verts) > 0.0);
        let curve = BoundaryCurve::polygon(&verts).unwrap();
        let err = |n: usize| {
            let s = parameterize(&curve, 3, n).unwrap();
            let h = TAU / n as f64;
            // mid-segment samples only, away from the graded corners
            (0..m)
                .map(|c| {
                    let k = c * n / m + n / (2 * m);
                    let fd = (s.z[(k + 1) % n] - s.z[(k + n - 1) % n]) / (2.0 * h);
                    (fd - s.dz[k]).norm()
                })
                .fold(0.0, f64::max)
        };
        let (coarse, fine) = (err(256), err(512));
        prop_assert!(fine <= coarse / 3.0 || fine < 1e-10, "coarse {} fine {}", coarse, fine);
    }

    #[test]
    fn unit_circle_kernel_is_constant(k in 8usize..80) {
        let n = 2 * k;
        let db = DiscretizedBoundary {
            n,
            origin: Point::new(0.0, 0.0),
            boundaries: vec![circle(Point::new(0.0, 0.0), 1.0, Orientation::Ccw, n)],
        };
        let kp = assemble_kernels(&db).unwrap();
        prop_assert!(kp.n_matrix.iter().all(|v| (v + 1.0 / TAU).abs() < 1e-12));
    }

    #[test]
    fn str_is_inverse_in_time(k in 1usize..40, t in 1.0f64..1000.0) {
        let a = str_ratio(2, 1024, 1000, k, 0.01, t).unwrap();
        let b = str_ratio(2, 1024, 1000, k, 0.01, 2.0 * t).unwrap();
        prop_assert!((a - 2.0 * b).abs() <= 1e-9 * a);
    }

    #[test]
    fn coverage_is_monotone(
        pts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3..30),
        cut in 2usize..30,
    ) {
        let square = vec![Point::new(-1.0, -1.0), Point::new(1.0, -1.0), Point::new(1.0, 1.0), Point::new(-1.0, 1.0)];
        let region = Region::new(square, vec![]);
        let path: Vec<Point> = pts.iter().map(|(x, y)| Point::new(*x, *y)).collect();
        let head = &path[..cut.min(path.len())];
        let part = coverage_fraction(head, &region, 0.2, 0.02).unwrap();
        let full = coverage_fraction(&path, &region, 0.2, 0.02).unwrap();
        prop_assert!(part <= full);
        prop_assert!((0.0..=1.0).contains(&full));
    }

    #[test]
    fn ladder_steps_are_full_turns(
        theta0 in -3.14f64..3.14,
        mut radii in prop::collection::vec(0.05f64..0.99, 1..10),
    ) {
        radii.sort_by(|a, b| b.total_cmp(a));
        radii.dedup();
        radii.insert(0, 1.0);
        let l = build_ladder(&radii, 0.0, theta0).unwrap();
        prop_assert_eq!(l.points.len(), radii.len() + 3);
        for w in l.points[1..l.points.len() - 1].windows(2) {
            prop_assert!((w[1].theta - w[0].theta - TAU).abs() < 1e-9);
        }
        let sc = interpolate_ladder(&l, 64).unwrap();
        prop_assert_eq!(sc[0], Polar::new(theta0, 1.0));
        for w in sc.windows(2) {
            prop_assert!(w[1].theta >= w[0].theta - 1e-9);
            prop_assert!(w[1].rho <= w[0].rho + 1e-9);
        }
    }

    #[test]
    fn accepted_start_angle_misses_slits(
        slits in prop::collection::vec((0.15f64..0.95, -3.0f64..3.0, 0.05f64..1.5), 1..4),
    ) {
        let slits: Vec<SlitArc> = slits
            .iter()
            .enumerate()
            .map(|(j, (r, s, e))| SlitArc { boundary: j + 1, radius: *r, start: *s, extent: *e })
            .collect();
        let radii = [1.0, 0.8, 0.6, 0.4, 0.2];
        let base = interpolate_ladder(&build_ladder(&radii, 0.0, std::f64::consts::PI).unwrap().shifted(-std::f64::consts::PI), 128).unwrap();
        let ranked = scan_theta0(&base, &slits, 360).unwrap();
        let best = ranked[0];
        if best.intersections == 0 {
            let sc = interpolate_ladder(&build_ladder(&radii, 0.0, best.theta0).unwrap(), 128).unwrap();
            prop_assert_eq!(slit_intersections(&sc, &slits), 0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn identity_family_is_spaced(r_down in 0.05f64..0.6, c in 0.04f64..0.3) {
        let map = IdentityMap::new(r_down);
        let opts = SpacingOptions::default();
        let fam = spacing_control(&map, c, &opts).unwrap();
        for w in fam.radii.windows(2) {
            prop_assert!(w[1] < w[0]);
        }
        for (i, g) in fam.gaps.iter().enumerate() {
            let target = if i == 0 { c / 2.0 } else { c };
            prop_assert!((g.radius - target).abs() < opts.epsilon * target);
        }
        let next = if fam.gaps.is_empty() { c / 2.0 } else { c };
        prop_assert!(fam.residual.radius < next);
        // concentric preimages never meet
        for w in fam.radii.windows(2).skip(1) {
            let a = map.preimage(w[0], 256);
            let b = map.preimage(w[1], 256);
            prop_assert_eq!(count_intersections(&a, &b), 0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn disc_map_normalization(cx in -0.4f64..0.4, cy in -0.4f64..0.4, r in 0.1f64..0.3) {
        let n = 256;
        let o = Point::new(-cx, -cy) * 0.5;
        let hole = Point::new(cx, cy);
        prop_assume!((o - hole).norm() > r + 0.1 && hole.norm() + r < 0.9);
        let db = DiscretizedBoundary {
            n,
            origin: o,
            boundaries: vec![circle(Point::new(0.0, 0.0), 1.0, Orientation::Ccw, n), circle(hole, r, Orientation::Cw, n)],
        };
        let sol = solve_mapping(&db, MapKind::Disc, &SolveOptions::default()).unwrap();
        let w0 = sol.forward_eval(o).unwrap();
        prop_assert!(w0.norm() < 1e-8);
        let w = sol.forward_eval(o + Point::new(1e-4, 0.0)).unwrap();
        prop_assert!(w.arg().abs() < 1e-3, "arg {}", w.arg());
        prop_assert!(sol.radii[1] > 0.0 && sol.radii[1] < 1.0);
    }

    #[test]
    fn annular_inner_radius_is_smallest(dx in -0.3f64..0.3, r1 in 0.15f64..0.3, ang in 0.0f64..TAU) {
        let n = 256;
        let c1 = Point::new(dx, 0.0);
        let c2 = Point::from_polar(0.7, ang);
        prop_assume!((c1 - c2).norm() > r1 + 0.12 + 0.05 && c1.norm() + r1 < 0.9);
        let origin = (c1 + c2) * 0.5 + Point::new(0.0, 0.0);
        prop_assume!((origin - c1).norm() > r1 + 0.02 && (origin - c2).norm() > 0.14);
        let db = DiscretizedBoundary {
            n,
            origin,
            boundaries: vec![
                circle(Point::new(0.0, 0.0), 1.0, Orientation::Ccw, n),
                circle(c1, r1, Orientation::Cw, n),
                circle(c2, 0.12, Orientation::Cw, n),
            ],
        };
        let sol = solve_mapping(&db, MapKind::Annular { z1: c1 }, &SolveOptions::default()).unwrap();
        prop_assert!(sol.radii[1] < 1.0);
        prop_assert!(sol.radii[2..].iter().all(|r| *r > sol.radii[1]));
    }
}
