use degpv::laxpair::{build_a_chart1, vector_field};
use degpv::monodromy::{
    cubic_gradient, cubic_residual, cubic_singular_points, expected_s, isomonodromy_drift, loop_monodromy,
    monodromy_invariants, monodromy_matrices, rplus_fiber, rplus_residuals, transport,
};
use degpv::ode::Tolerances;
use degpv::painleve::{chart_to_qp, integrate_flow, integrate_moduli_with, qp_to_chart};
use degpv::{
    Chart1Point, Complex64, Contour, ContourConfig, CubicPoint, Error, Mat2, ModuliRate, PState, RPlusPoint, TPath,
    Theta, Trajectory,
};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn complex(center: Complex64, r: f64) -> impl Strategy<Value = Complex64> {
    (-r..r, -r..r).prop_map(move |(a, b)| center + c(a, b))
}

/// Moduli points of moderate size, so that the connection is not stiff on
/// the default contours.
fn moduli_point() -> impl Strategy<Value = (Chart1Point, Theta)> {
    (
        complex(c(0.5, 0.3), 0.3),
        complex(c(0.0, 0.0), 0.3),
        complex(c(1.0, 0.0), 0.3),
        complex(c(0.5, 0.0), 0.4),
        complex(c(0.5, 0.0), 0.4),
    )
        .prop_map(|(q, p, t, th0, th1)| {
            let th = Theta::new(th0, th1);
            (qp_to_chart(&PState { q, p, t, theta: th }).unwrap(), th)
        })
}

/// Classical fixed-step RK4 for `Y' = -A(z) Y` along a segment.
fn rk4_transport(a: &degpv::RatMat2, from: Complex64, to: Complex64, n: usize) -> Mat2 {
    let h = (to - from) / n as f64;
    let f = |z: Complex64, y: Mat2| (a.eval(z) * y).scale(-h);
    let mut y = Mat2::IDENTITY;
    for k in 0..n {
        let z = from + h * k as f64;
        let k1 = f(z, y);
        let k2 = f(z + h * 0.5, y + k1.scale(c(0.5, 0.0)));
        let k3 = f(z + h * 0.5, y + k2.scale(c(0.5, 0.0)));
        let k4 = f(z + h, y + k3);
        y = y + (k1 + k2.scale(c(2.0, 0.0)) + k3.scale(c(2.0, 0.0)) + k4).scale(c(1.0 / 6.0, 0.0));
    }
    y
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn transport_is_unimodular((p, th) in moduli_point()) {
        let a = build_a_chart1(&p, &th).unwrap();
        let y = transport(&a, &[c(0.5, 0.75), c(-0.4, 0.3), c(-0.5, -0.6), c(2.0, -0.5)], 1e-11).unwrap();
        prop_assert!((y.det() - 1.0).norm() < 1e-8);
    }

    #[test]
    fn transport_matches_fixed_step_reference((p, th) in moduli_point()) {
        let a = build_a_chart1(&p, &th).unwrap();
        let (from, to) = (c(0.5, 0.75), c(1.8, -0.4));
        let y = transport(&a, &[from, to], 1e-12).unwrap();
        let reference = rk4_transport(&a.matrix, from, to, 4000);
        prop_assert!((y - reference).max_abs() < 1e-8 * (1.0 + y.max_abs()));
    }

    #[test]
    fn local_monodromy_traces((p, th) in moduli_point()) {
        let inv = monodromy_invariants(&p, &th, &ContourConfig::default(), 1e-11).unwrap();
        let (s0, s1) = expected_s(&th);
        prop_assert!((inv.tr_m0 - s0).norm() < 1e-7, "{} vs {}", inv.tr_m0, s0);
        prop_assert!((inv.tr_m1 - s1).norm() < 1e-7, "{} vs {}", inv.tr_m1, s1);
    }

    #[test]
    fn invariants_do_not_depend_on_contour((p, th) in moduli_point()) {
        let a = monodromy_invariants(&p, &th, &ContourConfig::default(), 1e-11).unwrap();
        let moved = ContourConfig { base: c(0.4, -0.9), radius0: 0.45, radius1: 0.2 };
        let b = monodromy_invariants(&p, &th, &moved, 1e-11).unwrap();
        prop_assert!((a.tr_m0m1 - b.tr_m0m1).norm() < 1e-6 * (1.0 + a.tr_m0m1.norm()));
        prop_assert!((a.tr_m0 - b.tr_m0).norm() < 1e-6);
    }

    #[test]
    fn local_monodromies_are_unimodular((p, th) in moduli_point()) {
        let (m0, m1) = monodromy_matrices(&p, &th, &ContourConfig::default(), 1e-11).unwrap();
        prop_assert!((m0.det() - 1.0).norm() < 1e-8);
        prop_assert!((m1.det() - 1.0).norm() < 1e-8);
    }

    #[test]
    fn singular_points_are_critical(s in complex(c(0.0, 0.0), 3.0), sign0 in prop::bool::ANY, sign1 in prop::bool::ANY) {
        let two = |plus: bool| if plus { c(2.0, 0.0) } else { c(-2.0, 0.0) };
        for (s0, s1) in [(s, two(sign1)), (two(sign0), s), (two(sign0), two(sign1))] {
            let pts = cubic_singular_points(s0, s1);
            prop_assert!(!pts.is_empty());
            for pt in pts {
                prop_assert_eq!(cubic_residual(&pt, s0, s1), c(0.0, 0.0));
                prop_assert_eq!(cubic_gradient(&pt, s0, s1), [c(0.0, 0.0); 3]);
            }
        }
    }

    #[test]
    fn eliminated_chart_points_satisfy_relations(
        x1 in complex(c(0.0, 0.0), 2.0),
        x2 in complex(c(0.0, 0.0), 2.0),
        s0 in complex(c(0.0, 0.0), 2.0),
    ) {
        prop_assume!(x1.norm() > 0.2 && x2.norm() > 0.2);
        let y1 = -(x2 + 1.0) / x1;
        let x3 = ((1.0 + x2) * y1 - x1 - s0) / x2;
        let (r0, r1, r2) = rplus_residuals(&RPlusPoint { x1, x2, x3, y1 }, s0);
        let scale = (1.0 + x3.norm()) * (1.0 + x1.norm() + x2.norm()).powi(2);
        prop_assert!(r0.norm() < 1e-13 * scale && r1.norm() < 1e-13 * scale && r2.norm() < 1e-13 * scale);
    }

    #[test]
    fn exceptional_fiber_lies_over_singular_point(s0 in complex(c(0.0, 0.0), 1.9), n in 1usize..12) {
        let fiber = rplus_fiber(s0, n).unwrap();
        prop_assert_eq!(fiber.len(), n);
        for pt in &fiber {
            prop_assert_eq!(rplus_residuals(pt, s0), (c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)));
            prop_assert_eq!(pt.cubic_point(), CubicPoint::new(c(0.0, 0.0), c(-1.0, 0.0), s0));
        }
    }
}

#[test]
fn contractible_loop_is_trivial() {
    let th = Theta::real(0.3, 0.7);
    let p = qp_to_chart(&PState { q: c(0.5, 0.3), p: c(0.1, 0.0), t: c(1.0, 0.0), theta: th }).unwrap();
    let a = build_a_chart1(&p, &th).unwrap();
    let contour = Contour::new(c(0.5, 0.75), c(2.0, 1.0), 0.4, 1).unwrap();
    let m = loop_monodromy(&a, &contour, 1e-12).unwrap();
    assert!((m - Mat2::IDENTITY).max_abs() < 1e-9);
}

#[test]
fn opposite_orientation_inverts_monodromy() {
    let th = Theta::real(0.3, 0.7);
    let p = qp_to_chart(&PState { q: c(0.5, 0.3), p: c(0.1, 0.0), t: c(1.0, 0.0), theta: th }).unwrap();
    let a = build_a_chart1(&p, &th).unwrap();
    let ccw = loop_monodromy(&a, &Contour::new(c(0.5, 0.75), c(0.0, 0.0), 0.3, 1).unwrap(), 1e-12).unwrap();
    let cw = loop_monodromy(&a, &Contour::new(c(0.5, 0.75), c(0.0, 0.0), 0.3, -1).unwrap(), 1e-12).unwrap();
    assert!((ccw * cw - Mat2::IDENTITY).max_abs() < 1e-9);
}

#[test]
fn bad_contours_are_rejected() {
    assert!(matches!(Contour::new(c(0.5, 0.75), c(0.0, 0.0), 0.0, 1), Err(Error::InvalidPath(_))));
    assert!(matches!(Contour::new(c(0.5, 0.75), c(0.0, 0.0), 0.3, 0), Err(Error::InvalidPath(_))));
    assert!(matches!(Contour::new(c(0.1, 0.0), c(0.0, 0.0), 0.3, 1), Err(Error::InvalidPath(_))));
    // the circle around 0 passes right next to 1
    assert!(matches!(Contour::new(c(0.0, 2.0), c(0.0, 0.0), 0.99, 1), Err(Error::PathTooClose { .. })));
}

#[test]
fn parameter_edges_of_fiber() {
    assert!(rplus_fiber(c(2.0, 0.0), 3).is_err());
    assert!(rplus_fiber(c(-2.0, 0.0), 3).is_err());
    assert_eq!(rplus_fiber(c(0.5, 0.0), 1).unwrap()[0].y1, c(0.0, 0.0));
}

fn reference_trajectory() -> (Trajectory, Theta) {
    let th = Theta::real(0.35, 0.6);
    let s = PState { q: c(0.55, 0.25), p: c(0.05, -0.1), t: c(1.0, 0.0), theta: th };
    (integrate_flow(&s, &TPath::linear(c(1.0, 0.0), c(1.6, 0.2), 30).unwrap(), 1e-11).unwrap(), th)
}

#[test]
fn isomonodromic_flow_keeps_invariants() {
    let (traj, _) = reference_trajectory();
    let drift = isomonodromy_drift(&traj, 5, &ContourConfig::default(), 1e-11).unwrap();
    assert!(drift < 1e-5, "drift {drift}");
}

#[test]
fn wrong_flow_changes_invariants() {
    let (traj, th) = reference_trajectory();
    let bad = |p: &Chart1Point, th: &Theta| -> degpv::Result<ModuliRate> {
        let r = vector_field(p, th)?;
        Ok(ModuliRate { dc1: -r.dc1, ..r })
    };
    let p0 = qp_to_chart(&traj.first().unwrap()).unwrap();
    let tol = Tolerances::from_tol(1e-11);
    let (pts, stats) = integrate_moduli_with(bad, &p0, &th, &traj.t_path, tol).unwrap();
    // project to (q, p); the lift recomputes c1 so the invariants see the damage through q and p
    let samples = pts
        .iter()
        .map(|p| {
            let s = chart_to_qp(p, &th);
            degpv::Sample { t: s.t, q: s.q, p: s.p }
        })
        .collect();
    let wrong = Trajectory { samples, theta: th, t_path: traj.t_path.clone(), stats };
    let drift = isomonodromy_drift(&wrong, 5, &ContourConfig::default(), 1e-11).unwrap();
    assert!(drift > 1e-3, "drift {drift}");
}

#[test]
fn single_check_has_no_drift() {
    let (traj, _) = reference_trajectory();
    assert_eq!(isomonodromy_drift(&traj, 1, &ContourConfig::default(), 1e-11).unwrap(), 0.0);
}

#[test]
fn integer_theta_gives_unipotent_traces() {
    let th = Theta::real(1.0, 2.0);
    let p = qp_to_chart(&PState { q: c(0.5, 0.3), p: c(0.1, 0.0), t: c(1.0, 0.0), theta: th }).unwrap();
    let inv = monodromy_invariants(&p, &th, &ContourConfig::default(), 1e-11).unwrap();
    assert!((inv.tr_m0 + 2.0).norm() < 1e-7);
    assert!((inv.tr_m1 - 2.0).norm() < 1e-7);
}
