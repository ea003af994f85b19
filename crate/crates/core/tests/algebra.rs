use degpv::algebra::{commutator, matmul, poly_eval};
use degpv::{Complex64, Mat2, PolyZ, RatMat2};
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| Complex64::new(a, b))
}

fn poly(max_len: usize) -> impl Strategy<Value = PolyZ> {
    prop::collection::vec(complex(), 0..max_len).prop_map(PolyZ::new)
}

fn ratmat() -> impl Strategy<Value = RatMat2> {
    (poly(4), poly(4), poly(4), poly(4), prop::sample::select(vec![0usize, 1, 2])).prop_map(|(a, b, c, d, den)| {
        let den = match den {
            0 => PolyZ::one(),
            1 => PolyZ::from_real(&[0.0, -1.0, 1.0]),
            _ => PolyZ::from_real(&[0.0, 2.0]),
        };
        RatMat2::new([[a, b], [c, d]], den)
    })
}

/// Points well away from 0 and 1, the only possible poles above.
fn off_pole() -> impl Strategy<Value = Complex64> {
    (0.3..1.5f64, 0.0..std::f64::consts::TAU).prop_map(|(r, a)| Complex64::new(0.5, 0.0) + Complex64::from_polar(r, a))
        .prop_filter("away from poles", |z| z.norm() > 0.2 && (z - 1.0).norm() > 0.2)
}

fn close(a: Complex64, b: Complex64, scale: f64) -> bool {
    (a - b).norm() <= 1e-11 * (1.0 + scale)
}

proptest! {
    #[test]
    fn eval_is_a_ring_homomorphism(p in poly(6), q in poly(6), z in complex()) {
        let scale = p.max_abs_coeff() * q.max_abs_coeff() * (1.0 + z.norm()).powi(12);
        prop_assert!(close(poly_eval(&(&p * &q), z), poly_eval(&p, z) * poly_eval(&q, z), scale));
        prop_assert!(close(poly_eval(&(&p + &q), z), poly_eval(&p, z) + poly_eval(&q, z), scale));
    }

    #[test]
    fn canonical_form_is_idempotent(m in ratmat(), s in complex()) {
        prop_assume!(s.norm() > 0.1);
        // rescale numerator and denominator by the same factor
        let scaled = RatMat2::new(
            m.numerator().clone().map(|row| row.map(|e| e.scale(s))),
            m.denominator().scale(s),
        );
        prop_assert_eq!(scaled.canonical(), scaled.clone());
        prop_assert!((scaled.denominator().leading() - 1.0).norm() < 1e-15);
        let diff = scaled.sub(&m);
        prop_assert!(diff.max_abs_coeff() < 1e-12 * (1.0 + m.max_abs_coeff()));
    }

    #[test]
    fn commutator_is_trace_free(a in ratmat(), b in ratmat()) {
        let c = commutator(&a, &b);
        let scale = a.max_abs_coeff() * b.max_abs_coeff();
        prop_assert!(c.trace_numerator().max_abs_coeff() <= 1e-12 * (1.0 + scale));
    }

    #[test]
    fn matmul_agrees_with_pointwise_product(a in ratmat(), b in ratmat(), zs in prop::collection::vec(off_pole(), 20)) {
        let ab = matmul(&a, &b);
        for z in zs {
            let direct = a.eval(z) * b.eval(z);
            let scale = direct.max_abs();
            prop_assert!((ab.eval(z) - direct).max_abs() <= 1e-11 * (1.0 + scale));
        }
    }

    #[test]
    fn identity_is_neutral(m in ratmat()) {
        prop_assert_eq!(matmul(&RatMat2::identity(), &m), m.clone());
        prop_assert_eq!(matmul(&m, &RatMat2::identity()), m);
    }
}

#[test]
fn constant_matrix_times_inverse() {
    let m = Mat2::new(
        Complex64::new(1.0, 0.5),
        Complex64::new(-0.3, 0.0),
        Complex64::new(2.0, -1.0),
        Complex64::new(0.7, 0.2),
    );
    let p = matmul(&RatMat2::constant(m), &RatMat2::constant(m.inverse().unwrap()));
    assert!(p.sub(&RatMat2::identity()).max_abs_coeff() < 1e-15);
}

#[test]
fn complex_point_evaluation() {
    // -1 + 2i + i^2
    let p = PolyZ::from_real(&[-1.0, 2.0, 1.0]);
    assert_eq!(poly_eval(&p, Complex64::i()), Complex64::new(-2.0, 2.0));
}
