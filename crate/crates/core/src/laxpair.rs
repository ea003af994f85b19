//! The Lax pair on chart 1: the connection `A(z, t)`, the deformation matrix
//! `B(z, t)`, the isomonodromic vector field on `(a0, b0, c1)` and the
//! zero-curvature identity `dA/dt = dB/dz + [A, B]`, checked coefficient by
//! coefficient in `z`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{PolyZ, RatMat2};
use crate::error::{Error, Result};
use crate::moduli::{chart1_c0, chart2_c2_c3, Chart1Point, Chart2Point, ChartPoint, Theta};

/// `z(z - 1)`, the shared denominator of every connection matrix.
pub fn pole_denominator() -> PolyZ {
    PolyZ::from_real(&[0.0, -1.0, 1.0])
}

fn require_t(t: Complex64) -> Result<()> {
    if t == Complex64::new(0.0, 0.0) {
        return Err(Error::DegenerateInput("t must be nonzero".into()));
    }
    Ok(())
}

/// The matrix of `d/dz + A` together with the chart point it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionA {
    pub matrix: RatMat2,
    pub source: ChartPoint,
    pub theta: Theta,
}

impl ConnectionA {
    pub fn t(&self) -> Complex64 {
        match self.source {
            ChartPoint::Chart1(p) => p.t,
            ChartPoint::Chart2(p) => p.t,
        }
    }
}

pub fn build_a_chart1(p: &Chart1Point, th: &Theta) -> Result<ConnectionA> {
    require_t(p.t)?;
    let c0 = chart1_c0(p, th);
    let num = [
        [PolyZ::constant(p.a0), PolyZ::new(vec![c0, p.c1, p.t * p.t])],
        [PolyZ::new(vec![p.b0, 1.0.into()]), PolyZ::constant(-p.a0)],
    ];
    Ok(ConnectionA {
        matrix: RatMat2::new(num, pole_denominator()),
        source: ChartPoint::Chart1(*p),
        theta: *th,
    })
}

pub fn build_a_chart2(p: &Chart2Point, th: &Theta) -> Result<ConnectionA> {
    require_t(p.t)?;
    let (c2, c3) = chart2_c2_c3(p, th);
    let zero = Complex64::new(0.0, 0.0);
    let num = [
        [PolyZ::monomial(p.a2, 2), PolyZ::new(vec![th.w0(), p.c1, c2, c3])],
        [PolyZ::new(vec![1.0.into(), p.b1]), PolyZ::new(vec![zero, zero, -p.a2])],
    ];
    Ok(ConnectionA {
        matrix: RatMat2::new(num, pole_denominator()),
        source: ChartPoint::Chart2(*p),
        theta: *th,
    })
}

/// Coefficients of `B = bh(z) H + b1(z) E1 + b2(z) E2`, each linear in `z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeformationB {
    pub bh0: Complex64,
    pub bh1: Complex64,
    pub b10: Complex64,
    pub b11: Complex64,
    pub b20: Complex64,
    pub b21: Complex64,
}

impl DeformationB {
    pub fn matrix(&self) -> RatMat2 {
        let h = PolyZ::new(vec![self.bh0, self.bh1]);
        RatMat2::polynomial([
            [h.clone(), PolyZ::new(vec![self.b10, self.b11])],
            [PolyZ::new(vec![self.b20, self.b21]), -&h],
        ])
    }
}

pub fn build_b(p: &Chart1Point) -> Result<DeformationB> {
    require_t(p.t)?;
    let zero = Complex64::new(0.0, 0.0);
    Ok(DeformationB {
        bh0: zero,
        bh1: zero,
        b10: 2.0 * p.c1 / p.t - 2.0 * p.t * p.b0,
        b11: 2.0 * p.t,
        b20: 2.0 / p.t,
        b21: zero,
    })
}

/// `t`-derivatives of the chart-1 coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuliRate {
    pub da0: Complex64,
    pub db0: Complex64,
    pub dc1: Complex64,
}

pub fn vector_field(p: &Chart1Point, th: &Theta) -> Result<ModuliRate> {
    require_t(p.t)?;
    let t = p.t;
    let c0 = chart1_c0(p, th);
    Ok(ModuliRate {
        da0: 2.0 * c0 / t - p.b0 * (2.0 * p.c1 / t - 2.0 * t * p.b0),
        db0: -4.0 * p.a0 / t,
        dc1: -2.0 * t + 4.0 * p.a0 * t,
    })
}

/// Total `t`-derivative of the eliminated `c0` along `rate`.
fn c0_rate(p: &Chart1Point, rate: &ModuliRate) -> Complex64 {
    let t = p.t;
    (-p.c1 - t * t) * rate.db0 + (-1.0 - p.b0) * rate.dc1 - 2.0 * t - 2.0 * p.b0 * t
}

/// `dA/dt - dB/dz - [A, B]` with `dA/dt` taken along the vector field.
/// The result has denominator `z(z - 1)`, so its numerator is the residual
/// multiplied by `z(z - 1)`.
pub fn zero_curvature_residual(p: &Chart1Point, th: &Theta) -> Result<RatMat2> {
    let rate = vector_field(p, th)?;
    zero_curvature_residual_along(p, th, &rate)
}

/// As [`zero_curvature_residual`] but with an arbitrary rate for `(a0, b0, c1)`.
pub fn zero_curvature_residual_along(p: &Chart1Point, th: &Theta, rate: &ModuliRate) -> Result<RatMat2> {
    let a = build_a_chart1(p, th)?;
    let b = build_b(p)?.matrix();
    let den = pole_denominator();
    let n = RatMat2::polynomial(a.matrix.numerator().clone());
    let dn = RatMat2::polynomial([
        [PolyZ::constant(rate.da0), PolyZ::new(vec![c0_rate(p, rate), rate.dc1, 2.0 * p.t])],
        [PolyZ::constant(rate.db0), PolyZ::constant(-rate.da0)],
    ]);
    let d_bz = b.derivative().mul_poly(&den);
    let r = dn.sub(&d_bz).sub(&n.commutator(&b));
    Ok(RatMat2::new(r.numerator().clone(), den))
}

/// Decomposes a trace-free matrix numerator as `h H + e1 E1 + e2 E2`;
/// the fourth component is the trace numerator, zero for sl2 matrices.
pub fn sl2_components(m: &RatMat2) -> (PolyZ, PolyZ, PolyZ, PolyZ) {
    let n = m.numerator();
    let h = (&n[0][0] - &n[1][1]).scale(0.5.into());
    (h, n[0][1].clone(), n[1][0].clone(), m.trace_numerator())
}

/// `d/dt` of the chart-1 defining equation along the vector field.
pub fn constraint_drift(p: &Chart1Point, th: &Theta) -> Result<Complex64> {
    let rate = vector_field(p, th)?;
    let c0 = chart1_c0(p, th);
    Ok(2.0 * p.a0 * rate.da0 + rate.db0 * c0 + p.b0 * c0_rate(p, &rate))
}
