mod common;

use common::{brute_force_center, oracle_bodies_2d, oracle_bodies_3d, p, rotation, smooth_bodies};
use proptest::prelude::*;
use rhombs::median::MedianEvaluator;
use rhombs::solver::{
    fixed_point_solve, inscribe_rhomb, miranda_root, search_box, verify_rhomb, MedianField, Method, SignField,
    SolverConfig,
};
use rhombs::sweep::random_frame;
use rhombs::{ConvexBody, Frame};

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

#[test]
fn center_matches_brute_force_oracle() {
    let cases: Vec<(String, ConvexBody, Frame)> = oracle_bodies_2d()
        .into_iter()
        .map(|(n, b)| (n, b, Frame::identity(2).givens(&[0.35]).unwrap()))
        .chain(oracle_bodies_3d().into_iter().map(|(n, b)| (n, b, random_frame(3, 21).unwrap())))
        .collect();
    for (name, body, frame) in cases {
        let (rhomb, _) = inscribe_rhomb(&body, &frame, &cfg()).unwrap();
        let oracle = frame.point(&brute_force_center(&body, &frame));
        let err = (&rhomb.center - &oracle).norm();
        assert!(err <= 1e-5, "{name}: solver {} oracle {} (error {err:e})", rhomb.center, oracle);
    }
}

#[test]
fn centers_are_interior_and_fixed_point_is_consistent() {
    for d in 2..=5 {
        let mut bodies = smooth_bodies(d);
        if d == 2 {
            bodies.extend(oracle_bodies_2d());
        }
        if d == 3 {
            bodies.extend(oracle_bodies_3d());
        }
        for (k, (name, body)) in bodies.into_iter().enumerate() {
            let frame = random_frame(d, 40 + k as u64).unwrap();
            let (rhomb, _) = inscribe_rhomb(&body, &frame, &cfg()).unwrap();
            assert!(body.gauge(&rhomb.center).unwrap() < 1.0 - 1e-6, "{name}");
            assert!(verify_rhomb(&body, &rhomb, 1e-6).unwrap().passed, "{name}");

            let (x, report) = fixed_point_solve(&body, &frame, body.interior_point(), &cfg()).unwrap();
            if report.converged {
                for i in 0..d {
                    let m = MedianEvaluator::new(&body, &frame, i).unwrap();
                    let off = m.median_offset(&x).unwrap().abs();
                    assert!(off <= 10.0 * cfg().root_tol, "{name} axis {i}: {off:e}");
                }
            }
        }
    }
}

#[test]
fn miranda_on_median_fields_is_sound() {
    for d in 2..=5 {
        for (k, (name, body)) in smooth_bodies(d).into_iter().enumerate() {
            let frame = random_frame(d, 60 + k as u64).unwrap();
            let medians: Vec<MedianEvaluator> = (0..d).map(|i| MedianEvaluator::new(&body, &frame, i).unwrap()).collect();
            let fields: Vec<MedianField> = medians.into_iter().map(MedianField::new).collect();
            let refs: Vec<&dyn SignField> = fields.iter().map(|f| f as &dyn SignField).collect();
            let bx = search_box(&body, &frame).unwrap();
            let (c, report) = miranda_root(&refs, &bx, &cfg()).unwrap();
            assert!(report.converged, "{name}");
            for f in &refs {
                let v = f.eval(c.as_slice()).unwrap().abs();
                assert!(v <= 10.0 * cfg().root_tol, "{name}: residual {v:e}");
            }
        }
    }
}

#[test]
fn bisection_takes_over_when_iteration_is_disabled() {
    let forced = SolverConfig { max_iters: 0, ..cfg() };
    let mut bisected = 0;
    for (name, body) in oracle_bodies_2d().into_iter().chain(oracle_bodies_3d()) {
        let d = body.dim();
        let frame = random_frame(d, 77).unwrap();
        let (a, ra) = inscribe_rhomb(&body, &frame, &cfg()).unwrap();
        let (b, rb) = inscribe_rhomb(&body, &frame, &forced).unwrap();
        assert_eq!(ra.method, Method::FixedPoint, "{name}");
        assert!(rb.converged, "{name}");
        match rb.method {
            Method::Hybrid => {
                assert!(rb.boxes_explored > 0, "{name}");
                bisected += 1;
            }
            // A centrally symmetric body whose interior point is already the root.
            _ => assert_eq!(rb.iterations, 0, "{name}"),
        }
        assert!((&a.center - &b.center).norm() <= 1e-7, "{name}");
    }
    assert!(bisected >= 3, "only {bisected} bodies went through the bisection");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rigid_motion_moves_center_and_keeps_diagonals(
        seed in 0u64..10_000,
        shift in prop::collection::vec(-3.0f64..3.0, 3),
        which in 0usize..4,
    ) {
        let (_, body) = smooth_bodies(3).swap_remove(which);
        let frame = random_frame(3, seed + 1).unwrap();
        let r = rotation(3, seed);
        let c = p(&shift);
        let (r0, _) = inscribe_rhomb(&body, &frame, &cfg()).unwrap();
        let moved = body.transformed(&r, &c).unwrap();
        let (r1, _) = inscribe_rhomb(&moved, &frame.rotated(&r).unwrap(), &cfg()).unwrap();
        prop_assert!((&r1.center - (&r * &r0.center + &c)).norm() <= 1e-7);
        for (a, b) in r0.half_diagonals.iter().zip(&r1.half_diagonals) {
            prop_assert!((a - b).abs() <= 1e-7);
        }
    }

    #[test]
    fn uniform_scaling_scales_everything(s in 0.2f64..5.0, which in 0usize..3, seed in 0u64..1000) {
        let (_, body) = oracle_bodies_2d().swap_remove(which);
        let frame = random_frame(2, seed).unwrap();
        let (r0, _) = inscribe_rhomb(&body, &frame, &cfg()).unwrap();
        let (r1, _) = inscribe_rhomb(&body.scaled(s).unwrap(), &frame, &cfg()).unwrap();
        prop_assert!((&r1.center - &r0.center * s).norm() <= 1e-8 * s.max(1.0));
        for (a, b) in r0.half_diagonals.iter().zip(&r1.half_diagonals) {
            prop_assert!((b - a * s).abs() <= 1e-8 * s.max(1.0));
        }
    }
}
