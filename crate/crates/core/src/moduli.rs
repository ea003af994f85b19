//! The two affine charts of the moduli space of connections with fixed local
//! exponents, the gauge action that glues them, and the power-series
//! recursion for the invariant line at a regular singular point.
//!
//! Chart 1 (`b0 != 0` part normalized to `z + b0`) has coordinates
//! `(a0, b0, c1, t)`; chart 2 (`b1 != 0`, lower-left `1 + b1 z`) has
//! `(a2, b1, c1, t)`. In both charts `t` is the deformation parameter.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{Mat2, PolyZ, RatMat2};
use crate::error::{Error, Result};

/// Tolerance for the "lies on the variety" check.
pub const ON_VARIETY_TOL: f64 = 1e-9;

/// Local exponent parameters at `z = 0` and `z = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theta {
    pub theta0: Complex64,
    pub theta1: Complex64,
}

impl Theta {
    pub fn new(theta0: Complex64, theta1: Complex64) -> Self {
        Theta { theta0, theta1 }
    }

    pub fn real(theta0: f64, theta1: f64) -> Self {
        Self::new(Complex64::new(theta0, 0.0), Complex64::new(theta1, 0.0))
    }

    /// `theta0^2 / 4`
    pub fn w0(&self) -> Complex64 {
        self.theta0 * self.theta0 / 4.0
    }

    /// `theta1^2 / 4`
    pub fn w1(&self) -> Complex64 {
        self.theta1 * self.theta1 / 4.0
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.theta1, self.theta0)
    }
}

fn require_t(t: Complex64) -> Result<()> {
    if t == Complex64::new(0.0, 0.0) {
        return Err(Error::DegenerateInput("t must be nonzero".into()));
    }
    Ok(())
}

/// A point of chart 1. `c0` is eliminated through [`chart1_c0`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chart1Point {
    pub a0: Complex64,
    pub b0: Complex64,
    pub c1: Complex64,
    pub t: Complex64,
}

impl Chart1Point {
    pub fn new(a0: Complex64, b0: Complex64, c1: Complex64, t: Complex64) -> Result<Self> {
        require_t(t)?;
        Ok(Chart1Point { a0, b0, c1, t })
    }

    /// Like [`Chart1Point::new`] but also rejects points off the variety.
    pub fn on_variety(a0: Complex64, b0: Complex64, c1: Complex64, t: Complex64, th: &Theta) -> Result<Self> {
        let p = Self::new(a0, b0, c1, t)?;
        let r = chart1_residual(&p, th).norm();
        if r > ON_VARIETY_TOL {
            return Err(Error::OffVariety(r));
        }
        Ok(p)
    }

    pub fn is_on_variety(&self, th: &Theta) -> bool {
        chart1_residual(self, th).norm() <= ON_VARIETY_TOL
    }
}

/// A point of chart 2. `c0 = theta0^2/4`, `c2`, `c3` are eliminated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chart2Point {
    pub a2: Complex64,
    pub b1: Complex64,
    pub c1: Complex64,
    pub t: Complex64,
}

impl Chart2Point {
    pub fn new(a2: Complex64, b1: Complex64, c1: Complex64, t: Complex64) -> Result<Self> {
        require_t(t)?;
        Ok(Chart2Point { a2, b1, c1, t })
    }

    pub fn on_variety(a2: Complex64, b1: Complex64, c1: Complex64, t: Complex64, th: &Theta) -> Result<Self> {
        let p = Self::new(a2, b1, c1, t)?;
        let r = chart2_residual(&p, th).norm();
        if r > ON_VARIETY_TOL {
            return Err(Error::OffVariety(r));
        }
        Ok(p)
    }

    pub fn is_on_variety(&self, th: &Theta) -> bool {
        chart2_residual(self, th).norm() <= ON_VARIETY_TOL
    }
}

/// A point tagged with its chart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "chart", rename_all = "lowercase")]
pub enum ChartPoint {
    Chart1(Chart1Point),
    Chart2(Chart2Point),
}

pub fn chart1_c0(p: &Chart1Point, th: &Theta) -> Complex64 {
    let t2 = p.t * p.t;
    -th.w0() + th.w1() - p.c1 - t2 - p.b0 * p.c1 - p.b0 * t2
}

/// Defining equation of chart 1; zero exactly on the variety.
pub fn chart1_residual(p: &Chart1Point, th: &Theta) -> Complex64 {
    p.a0 * p.a0 + p.b0 * chart1_c0(p, th) - th.w0()
}

/// The eliminated coefficients `(c2, c3)` of chart 2.
pub fn chart2_c2_c3(p: &Chart2Point, th: &Theta) -> (Complex64, Complex64) {
    let t2 = p.t * p.t;
    let c2 = -(p.c1 + t2 + p.b1 * th.w0() + p.b1 * p.c1 - p.a2 + th.w0() - th.w1());
    let c3 = t2 - p.b1 * c2 - p.a2;
    (c2, c3)
}

pub fn chart2_residual(p: &Chart2Point, th: &Theta) -> Complex64 {
    let (c2, _) = chart2_c2_c3(p, th);
    p.a2 * p.a2 + p.b1 * (-p.a2 - p.b1 * c2 + p.t * p.t)
}

/// Singular points of both charts. Zero tests on theta are exact.
pub fn singular_locus(th: &Theta, t: Complex64) -> Result<Vec<ChartPoint>> {
    require_t(t)?;
    let zero = Complex64::new(0.0, 0.0);
    let t2 = t * t;
    let z0 = th.theta0 == zero;
    let z1 = th.theta1 == zero;
    let mut out = Vec::new();
    let c1pt = |b0: f64, c1: Complex64| ChartPoint::Chart1(Chart1Point { a0: zero, b0: b0.into(), c1, t });
    if z0 && z1 {
        out.push(c1pt(0.0, -t2));
        out.push(c1pt(-1.0, -t2));
    } else if z0 {
        out.push(c1pt(0.0, -t2 + th.w1()));
    } else if z1 {
        out.push(c1pt(-1.0, -t2 + th.w0()));
    }
    if z1 {
        out.push(ChartPoint::Chart2(Chart2Point {
            a2: zero,
            b1: (-1.0).into(),
            c1: t2 - th.w0(),
            t,
        }));
    }
    Ok(out)
}

/// Basis change `e1 -> lambda e1`, `e2 -> e2 + (x0 + x1 z) e1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeTransform {
    pub lambda: Complex64,
    pub x0: Complex64,
    pub x1: Complex64,
}

impl GaugeTransform {
    pub fn new(lambda: Complex64, x0: Complex64, x1: Complex64) -> Result<Self> {
        if lambda == Complex64::new(0.0, 0.0) {
            return Err(Error::DegenerateInput("gauge scaling lambda must be nonzero".into()));
        }
        Ok(GaugeTransform { lambda, x0, x1 })
    }

    pub fn identity() -> Self {
        GaugeTransform {
            lambda: 1.0.into(),
            x0: 0.0.into(),
            x1: 0.0.into(),
        }
    }

    /// The basis-change matrix `V`, whose columns are the new basis vectors.
    pub fn matrix(&self) -> RatMat2 {
        RatMat2::polynomial([
            [PolyZ::constant(self.lambda), PolyZ::new(vec![self.x0, self.x1])],
            [PolyZ::zero(), PolyZ::one()],
        ])
    }

    pub fn inverse_matrix(&self) -> RatMat2 {
        let inv = 1.0 / self.lambda;
        RatMat2::polynomial([
            [PolyZ::constant(inv), PolyZ::new(vec![-self.x0 * inv, -self.x1 * inv])],
            [PolyZ::zero(), PolyZ::one()],
        ])
    }
}

/// Rewrites the matrix of `d/dz + A` in the new basis: `V^-1 A V + V^-1 V'`.
pub fn apply_gauge(g: &GaugeTransform, a: &RatMat2) -> RatMat2 {
    let v = g.matrix();
    let vinv = g.inverse_matrix();
    vinv.matmul(a).matmul(&v).add(&vinv.matmul(&v.derivative()))
}

/// Gauge sending a chart-1 connection to chart-2 normal form.
pub fn gauge_1to2(p: &Chart1Point) -> Result<GaugeTransform> {
    if p.b0 == Complex64::new(0.0, 0.0) {
        return Err(Error::NotInOverlap("b0 = 0".into()));
    }
    let inv = 1.0 / p.b0;
    GaugeTransform::new(inv, p.a0 * inv, -p.a0 * inv * inv)
}

/// Gauge sending a chart-2 connection to chart-1 normal form.
pub fn gauge_2to1(p: &Chart2Point) -> Result<GaugeTransform> {
    if p.b1 == Complex64::new(0.0, 0.0) {
        return Err(Error::NotInOverlap("b1 = 0".into()));
    }
    let inv = 1.0 / p.b1;
    GaugeTransform::new(inv, -p.a2 * inv * inv, p.a2 * inv)
}

pub fn transition_1to2(p: &Chart1Point) -> Result<Chart2Point> {
    if p.b0 == Complex64::new(0.0, 0.0) {
        return Err(Error::NotInOverlap("b0 = 0".into()));
    }
    let inv = 1.0 / p.b0;
    Ok(Chart2Point {
        a2: p.a0 * inv * inv,
        b1: inv,
        c1: p.b0 * p.c1 + (p.a0 - p.a0 * p.a0) * inv,
        t: p.t,
    })
}

pub fn transition_2to1(p: &Chart2Point) -> Result<Chart1Point> {
    if p.b1 == Complex64::new(0.0, 0.0) {
        return Err(Error::NotInOverlap("b1 = 0".into()));
    }
    let inv = 1.0 / p.b1;
    Ok(Chart1Point {
        a0: p.a2 * inv * inv,
        b0: inv,
        c1: p.b1 * p.c1 + p.a2 * p.a2 * inv * inv - p.a2,
        t: p.t,
    })
}

/// Largest entrywise deviation of `apply_gauge(g, a1)` from `a2`, sampled at
/// `samples` pseudo-random points away from the poles. Sampling is seeded, so
/// the result is reproducible.
pub fn certify_equivalence(a1: &RatMat2, a2: &RatMat2, g: &GaugeTransform, samples: usize) -> f64 {
    const MIN_DEN: f64 = 1e-2;
    let transformed = apply_gauge(g, a1);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut worst: f64 = 0.0;
    let mut taken = 0;
    while taken < samples {
        let z = Complex64::new(rng.random_range(-2.0..3.0), rng.random_range(-2.0..2.0));
        if transformed.denominator().eval(z).norm() < MIN_DEN || a2.denominator().eval(z).norm() < MIN_DEN {
            continue;
        }
        let diff: Mat2 = transformed.eval(z) - a2.eval(z);
        worst = worst.max(diff.max_abs());
        taken += 1;
    }
    worst
}

/// `true` when `d` is a negative integer up to `1e-12`.
fn is_negative_integer(d: Complex64) -> bool {
    d.im.abs() <= 1e-12 && d.re <= -1.0 + 1e-12 && (d.re - d.re.round()).abs() <= 1e-12
}

/// Coefficients `a_1 .. a_{n_terms}` of the unique series `x = sum a_n z^n`
/// solving `z x' + (beta - alpha) x + b - c x^2 = 0`.
pub fn invariant_line_series(
    alpha: Complex64,
    beta: Complex64,
    b: &PolyZ,
    c: &PolyZ,
    n_terms: usize,
) -> Result<PolyZ> {
    let d = beta - alpha;
    if is_negative_integer(d) {
        return Err(Error::ResonantExponents(d));
    }
    if b.coeff(0) != Complex64::new(0.0, 0.0) || c.coeff(0) != Complex64::new(0.0, 0.0) {
        return Err(Error::DegenerateInput("b and c must vanish at z = 0".into()));
    }
    let mut a = vec![Complex64::new(0.0, 0.0); n_terms + 1];
    for n in 1..=n_terms {
        // [c x^2]_n only involves a_i with i <= n - 2.
        let mut cx2 = Complex64::new(0.0, 0.0);
        for k in 1..n {
            let ck = c.coeff(k);
            if ck == Complex64::new(0.0, 0.0) {
                continue;
            }
            for i in 1..(n - k) {
                cx2 += ck * a[i] * a[n - k - i];
            }
        }
        a[n] = (cx2 - b.coeff(n)) / (n as f64 + d);
    }
    Ok(PolyZ::new(a))
}

/// `z x' + (beta - alpha) x + b - c x^2` as a polynomial.
pub fn invariant_line_defect(alpha: Complex64, beta: Complex64, b: &PolyZ, c: &PolyZ, x: &PolyZ) -> PolyZ {
    let zx = &PolyZ::monomial(1.0.into(), 1) * &x.derivative();
    let lin = x.scale(beta - alpha);
    let quad = &(c * x) * x;
    &(&(&zx + &lin) + b) - &quad
}
