//! Identity suites run by `degpv verify`. Each suite evaluates one exact
//! identity at seeded random inputs and reports the largest residual.

use std::f64::consts::PI;

use degpv::laxpair::{build_a_chart1, build_a_chart2, constraint_drift, zero_curvature_residual};
use degpv::moduli::{
    certify_equivalence, chart1_residual, gauge_1to2, invariant_line_defect, invariant_line_series, transition_1to2,
    transition_2to1,
};
use degpv::monodromy::{cubic_gradient, cubic_residual, cubic_singular_points, rplus_fiber, rplus_residuals};
use degpv::painleve::{classical_y_residual, degpv_residual, even_lift, even_q_rhs, y_jet_from_q};
use degpv::{Chart1Point, Complex64, Jet, PolyZ, Theta};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::json::{num, object};

/// Every suite passes when its largest residual is below this.
pub const PASS_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub n_cases: usize,
    pub max_residual: f64,
    pub pass: bool,
}

impl SuiteReport {
    fn new(suite: &'static str, n_cases: usize, max_residual: f64) -> Self {
        let pass = max_residual < PASS_THRESHOLD;
        SuiteReport { suite, n_cases, max_residual, pass }
    }

    pub fn to_json(&self) -> Value {
        object([
            ("suite", Value::from(self.suite)),
            ("n_cases", Value::from(self.n_cases)),
            ("max_residual", num(self.max_residual)),
            ("pass", Value::from(self.pass)),
        ])
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

struct Sampler(ChaCha8Rng);

impl Sampler {
    fn polar(&mut self, rmin: f64, rmax: f64) -> Complex64 {
        Complex64::from_polar(self.0.random_range(rmin..rmax), self.0.random_range(0.0..2.0 * PI))
    }

    fn cbox(&mut self, center: Complex64, half: f64) -> Complex64 {
        center + c(self.0.random_range(-half..half), self.0.random_range(-half..half))
    }

    fn theta(&mut self) -> Theta {
        Theta::new(self.polar(0.0, 3.0), self.polar(0.0, 3.0))
    }

    /// On-variety chart-1 point; the defining equation is affine in `c1`.
    fn chart1(&mut self, th: &Theta) -> Chart1Point {
        let t = self.polar(0.5, 2.0);
        loop {
            let a0 = self.cbox(c(0.0, 0.0), 1.0);
            let b0 = self.cbox(c(0.0, 0.0), 1.5);
            let at = |c1: Complex64| chart1_residual(&Chart1Point { a0, b0, c1, t }, th);
            let (r0, r1) = (at(c(0.0, 0.0)), at(c(1.0, 0.0)));
            if (r1 - r0).norm() < 0.1 || b0.norm() < 0.2 {
                continue;
            }
            return Chart1Point { a0, b0, c1: -r0 / (r1 - r0), t };
        }
    }
}

fn zero_curvature(rng: &mut Sampler, n: usize) -> SuiteReport {
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let th = rng.theta();
        let p = rng.chart1(&th);
        worst = worst.max(zero_curvature_residual(&p, &th).map_or(f64::INFINITY, |r| r.max_abs_coeff()));
    }
    SuiteReport::new("zero_curvature", n, worst)
}

fn constraint(rng: &mut Sampler, n: usize) -> SuiteReport {
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let th = rng.theta();
        let p = rng.chart1(&th);
        worst = worst.max(constraint_drift(&p, &th).map_or(f64::INFINITY, |d| d.norm()));
    }
    SuiteReport::new("constraint_drift", n, worst)
}

/// Zero-residual jets of the even-reduced equation, lifted to `q(t)` and
/// substituted into the classical equation.
fn even_reduction(rng: &mut Sampler, n: usize) -> [SuiteReport; 2] {
    let (mut lift, mut classical) = (0.0_f64, 0.0_f64);
    for _ in 0..n {
        let th = Theta::new(rng.polar(0.0, 2.0), rng.polar(0.0, 2.0));
        let q = rng.cbox(c(0.5, 0.3), 1.5);
        let dq = rng.cbox(c(0.0, 0.0), 1.0);
        let t = rng.polar(0.5, 2.0);
        let s = t * t;
        let Ok(d2) = even_q_rhs(q, dq, s, &th) else {
            lift = f64::INFINITY;
            continue;
        };
        let qj = Jet::new(q, dq, d2, s);
        lift = lift.max(degpv_residual(&even_lift(&qj, t), &th).map_or(f64::INFINITY, |r| r.norm()));
        let y = y_jet_from_q(&qj).and_then(|yj| classical_y_residual(&yj, &th));
        classical = classical.max(y.map_or(f64::INFINITY, |r| r.norm()));
    }
    [SuiteReport::new("even_lift", n, lift), SuiteReport::new("classical_substitution", n, classical)]
}

fn cubic(rng: &mut Sampler, n: usize) -> SuiteReport {
    let two = c(2.0, 0.0);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for _ in 0..n {
        let s = rng.polar(0.0, 3.0);
        for (s0, s1) in [(s, two), (s, -two), (two, s), (-two, s), (two, two), (-two, -two)] {
            for pt in cubic_singular_points(s0, s1) {
                cases += 1;
                worst = worst.max(cubic_residual(&pt, s0, s1).norm());
                for g in cubic_gradient(&pt, s0, s1) {
                    worst = worst.max(g.norm());
                }
            }
        }
        if let Ok(fiber) = rplus_fiber(s, 5) {
            for pt in fiber {
                cases += 1;
                let (a, b, d) = rplus_residuals(&pt, s);
                worst = worst.max(a.norm()).max(b.norm()).max(d.norm());
            }
        }
    }
    SuiteReport::new("cubic_singular_points", cases, worst)
}

fn chart_transition(rng: &mut Sampler, n: usize) -> SuiteReport {
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let th = rng.theta();
        let p = rng.chart1(&th);
        let check = || -> degpv::Result<f64> {
            let q = transition_1to2(&p)?;
            let a1 = build_a_chart1(&p, &th)?.matrix;
            let a2 = build_a_chart2(&q, &th)?.matrix;
            let cert = certify_equivalence(&a1, &a2, &gauge_1to2(&p)?, 16);
            let back = transition_2to1(&q)?;
            let trip = (back.a0 - p.a0).norm().max((back.b0 - p.b0).norm()).max((back.c1 - p.c1).norm());
            Ok(cert.max(trip))
        };
        worst = worst.max(check().unwrap_or(f64::INFINITY));
    }
    SuiteReport::new("chart_transition", n, worst)
}

fn invariant_line(rng: &mut Sampler, n: usize) -> SuiteReport {
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let alpha = rng.cbox(c(0.0, 0.0), 1.0);
        let beta = alpha + rng.cbox(c(0.5, 0.0), 0.4);
        let mut poly = |deg: usize| {
            let mut v = vec![c(0.0, 0.0)];
            v.extend((0..deg).map(|_| rng.cbox(c(0.0, 0.0), 0.5)));
            PolyZ::new(v)
        };
        let (b, cc) = (poly(5), poly(4));
        let Ok(x) = invariant_line_series(alpha, beta, &b, &cc, 12) else {
            worst = f64::INFINITY;
            continue;
        };
        let defect = invariant_line_defect(alpha, beta, &b, &cc, &x);
        for k in 0..=12 {
            worst = worst.max(defect.coeff(k).norm());
        }
    }
    SuiteReport::new("invariant_line", n, worst)
}

/// Runs every suite with `n` cases each from the given seed.
pub fn run_all(seed: u64, n: usize) -> Vec<SuiteReport> {
    let mut rng = Sampler(ChaCha8Rng::seed_from_u64(seed));
    let mut out = vec![zero_curvature(&mut rng, n), constraint(&mut rng, n)];
    out.extend(even_reduction(&mut rng, n));
    out.push(cubic(&mut rng, n));
    out.push(chart_transition(&mut rng, n));
    out.push(invariant_line(&mut rng, n));
    out
}
