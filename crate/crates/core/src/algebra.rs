//! Univariate complex polynomials in `z`, 2x2 matrices of rational functions
//! sharing one denominator, and plain numeric 2x2 complex matrices.
//!
//! Coefficients are double-precision complex numbers. "Exact" here means
//! symbolic in `z`: products, commutators and derivatives are carried out on
//! coefficient lists, so identities such as the zero-curvature equation can be
//! checked coefficient by coefficient instead of at sample points.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative magnitude below which trailing coefficients are dropped.
pub const STRIP_REL_TOL: f64 = 1e-13;

/// Polynomial in `z`, lowest degree first. Trailing coefficients that are
/// negligible relative to the largest one are stripped, so the zero
/// polynomial has no coefficients at all.
#[derive(Clone, PartialEq, Default)]
pub struct PolyZ {
    coeffs: Vec<Complex64>,
}

impl PolyZ {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = PolyZ { coeffs };
        p.strip();
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        PolyZ { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(ONE)
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// `c * z^degree`
    pub fn monomial(c: Complex64, degree: usize) -> Self {
        let mut coeffs = vec![ZERO; degree + 1];
        coeffs[degree] = c;
        Self::new(coeffs)
    }

    /// The polynomial `z - root`.
    pub fn linear_factor(root: Complex64) -> Self {
        Self::new(vec![-root, ONE])
    }

    fn strip(&mut self) {
        let max = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            self.coeffs.clear();
            return;
        }
        let cutoff = STRIP_REL_TOL * max;
        while let Some(last) = self.coeffs.last() {
            if last.norm() < cutoff {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^n`, zero beyond the degree.
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or(ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or(ZERO)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Keeps the coefficients of `z^0 .. z^(n-1)`.
    pub fn truncate(&self, n: usize) -> Self {
        Self::new(self.coeffs.iter().take(n).copied().collect())
    }

    /// Largest coefficient magnitude (zero for the zero polynomial).
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Synthetic division by `z - root`: returns `(quotient, remainder)`.
    pub fn deflate(&self, root: Complex64) -> (PolyZ, Complex64) {
        if self.coeffs.is_empty() {
            return (PolyZ::zero(), ZERO);
        }
        let n = self.coeffs.len();
        let mut quotient = vec![ZERO; n - 1];
        let mut acc = ZERO;
        for k in (0..n).rev() {
            acc = acc * root + self.coeffs[k];
            if k > 0 {
                quotient[k - 1] = acc;
            }
        }
        (PolyZ::new(quotient), acc)
    }

    /// Multiplicity of `root` as a zero, using `tol` relative to the
    /// coefficient scale of each successive quotient.
    pub fn root_multiplicity(&self, root: Complex64, tol: f64) -> (usize, PolyZ) {
        let mut current = self.clone();
        let mut mult = 0;
        while !current.is_zero() {
            let scale = current.max_abs_coeff() * (1.0 + root.norm()).powi(current.coeffs.len() as i32);
            let (q, r) = current.deflate(root);
            if r.norm() <= tol * scale {
                mult += 1;
                current = q;
            } else {
                break;
            }
        }
        (mult, current)
    }
}

impl fmt::Debug for PolyZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() != 0.0)
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})z"),
                _ => format!("({c})z^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl Index<usize> for PolyZ {
    type Output = Complex64;
    fn index(&self, n: usize) -> &Complex64 {
        &self.coeffs[n]
    }
}

impl Add for &PolyZ {
    type Output = PolyZ;
    fn add(self, rhs: &PolyZ) -> PolyZ {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        PolyZ::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &PolyZ {
    type Output = PolyZ;
    fn sub(self, rhs: &PolyZ) -> PolyZ {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        PolyZ::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &PolyZ {
    type Output = PolyZ;
    fn mul(self, rhs: &PolyZ) -> PolyZ {
        if self.is_zero() || rhs.is_zero() {
            return PolyZ::zero();
        }
        let mut out = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PolyZ::new(out)
    }
}

impl Neg for &PolyZ {
    type Output = PolyZ;
    fn neg(self) -> PolyZ {
        self.scale(-ONE)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for PolyZ {
            type Output = PolyZ;
            fn $m(self, rhs: PolyZ) -> PolyZ {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Free-function form of [`PolyZ::eval`].
pub fn poly_eval(p: &PolyZ, z: Complex64) -> Complex64 {
    p.eval(z)
}

/// Numeric 2x2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[ZERO, ZERO], [ZERO, ZERO]]);
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);

    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[i][j]
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d.norm() == 0.0 {
            return None;
        }
        let [[a, b], [c, e]] = self.0;
        Some(Mat2([[e / d, -b / d], [-c / d, a / d]]))
    }

    pub fn scale(&self, s: Complex64) -> Mat2 {
        Mat2(self.0.map(|row| row.map(|x| x * s)))
    }

    /// Both eigenvalues, from the characteristic polynomial.
    pub fn eigenvalues(&self) -> (Complex64, Complex64) {
        let half_tr = self.trace() * 0.5;
        let disc = (half_tr * half_tr - self.det()).sqrt();
        (half_tr + disc, half_tr - disc)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let mut out = Mat2::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = self.0[i][0] * rhs.0[0][j] + self.0[i][1] * rhs.0[1][j];
            }
        }
        out
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        self + rhs.scale(-ONE)
    }
}

/// 2x2 matrix of rational functions `numerator[i][j] / denominator`.
#[derive(Clone, Debug, PartialEq)]
pub struct RatMat2 {
    num: [[PolyZ; 2]; 2],
    den: PolyZ,
}

impl RatMat2 {
    /// Builds and canonicalizes. Panics on a zero denominator.
    pub fn new(num: [[PolyZ; 2]; 2], den: PolyZ) -> Self {
        assert!(!den.is_zero(), "RatMat2 denominator must be nonzero");
        let mut m = RatMat2 { num, den };
        m.canonicalize();
        m
    }

    pub fn polynomial(num: [[PolyZ; 2]; 2]) -> Self {
        Self::new(num, PolyZ::one())
    }

    pub fn constant(m: Mat2) -> Self {
        Self::polynomial(m.0.map(|row| row.map(PolyZ::constant)))
    }

    pub fn identity() -> Self {
        Self::constant(Mat2::IDENTITY)
    }

    pub fn zero() -> Self {
        Self::constant(Mat2::ZERO)
    }

    /// Divides numerator and denominator by the leading coefficient of the
    /// denominator.
    fn canonicalize(&mut self) {
        let lead = self.den.leading();
        if lead != ONE {
            let inv = ONE / lead;
            self.den = self.den.scale(inv);
            for row in self.num.iter_mut() {
                for e in row.iter_mut() {
                    *e = e.scale(inv);
                }
            }
            // pin the leading coefficient so canonicalization is idempotent
            if let Some(last) = self.den.coeffs.last_mut() {
                *last = ONE;
            }
        }
    }

    pub fn canonical(&self) -> Self {
        Self::new(self.num.clone(), self.den.clone())
    }

    pub fn numerator(&self) -> &[[PolyZ; 2]; 2] {
        &self.num
    }

    pub fn entry(&self, i: usize, j: usize) -> &PolyZ {
        &self.num[i][j]
    }

    pub fn denominator(&self) -> &PolyZ {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().flatten().all(PolyZ::is_zero)
    }

    /// Largest numerator coefficient magnitude over all four entries.
    pub fn max_abs_coeff(&self) -> f64 {
        self.num.iter().flatten().map(PolyZ::max_abs_coeff).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Mat2 {
        let d = self.den.eval(z);
        let e = |i: usize, j: usize| self.num[i][j].eval(z) / d;
        Mat2([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.num.clone().map(|row| row.map(|p| p.scale(s))), self.den.clone())
    }

    /// Multiplies every numerator entry by a polynomial.
    pub fn mul_poly(&self, p: &PolyZ) -> Self {
        Self::new(self.num.clone().map(|row| row.map(|e| &e * p)), self.den.clone())
    }

    /// Numerator of the trace over the shared denominator.
    pub fn trace_numerator(&self) -> PolyZ {
        &self.num[0][0] + &self.num[1][1]
    }

    pub fn matmul(&self, rhs: &RatMat2) -> RatMat2 {
        let a = &self.num;
        let b = &rhs.num;
        let entry = |i: usize, j: usize| &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j]);
        RatMat2::new(
            [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]],
            &self.den * &rhs.den,
        )
    }

    fn combine(&self, rhs: &RatMat2, sign: f64) -> RatMat2 {
        let s = Complex64::new(sign, 0.0);
        if self.den == rhs.den {
            let mut num = self.num.clone();
            for i in 0..2 {
                for j in 0..2 {
                    num[i][j] = &num[i][j] + &rhs.num[i][j].scale(s);
                }
            }
            return RatMat2::new(num, self.den.clone());
        }
        let mut num = self.num.clone();
        for i in 0..2 {
            for j in 0..2 {
                num[i][j] = &(&self.num[i][j] * &rhs.den) + &(&rhs.num[i][j] * &self.den).scale(s);
            }
        }
        RatMat2::new(num, &self.den * &rhs.den)
    }

    pub fn add(&self, rhs: &RatMat2) -> RatMat2 {
        self.combine(rhs, 1.0)
    }

    pub fn sub(&self, rhs: &RatMat2) -> RatMat2 {
        self.combine(rhs, -1.0)
    }

    /// Entrywise `d/dz` by the quotient rule.
    pub fn derivative(&self) -> RatMat2 {
        let dd = self.den.derivative();
        let num = self
            .num
            .clone()
            .map(|row| row.map(|n| &(&n.derivative() * &self.den) - &(&n * &dd)));
        RatMat2::new(num, &self.den * &self.den)
    }

    /// `ab - ba`.
    pub fn commutator(&self, rhs: &RatMat2) -> RatMat2 {
        self.matmul(rhs).sub(&rhs.matmul(self))
    }

    /// Entrywise residue at a simple pole. Entries that are regular at `pole`
    /// contribute zero.
    pub fn residue_at(&self, pole: Complex64) -> Result<Mat2> {
        const ROOT_TOL: f64 = 1e-12;
        let (den_mult, den_rest) = self.den.root_multiplicity(pole, ROOT_TOL);
        let mut out = Mat2::ZERO;
        if den_mult == 0 {
            return Ok(out);
        }
        for i in 0..2 {
            for j in 0..2 {
                let n = &self.num[i][j];
                if n.is_zero() {
                    continue;
                }
                let (num_mult, num_rest) = n.root_multiplicity(pole, ROOT_TOL);
                let order = den_mult.saturating_sub(num_mult);
                match order {
                    0 => {}
                    1 => out.0[i][j] = num_rest.eval(pole) / den_rest.eval(pole),
                    _ => return Err(Error::HigherOrderPole { pole, order }),
                }
            }
        }
        Ok(out)
    }
}

/// Free-function form of [`RatMat2::matmul`].
pub fn matmul(a: &RatMat2, b: &RatMat2) -> RatMat2 {
    a.matmul(b)
}

/// Free-function form of [`RatMat2::commutator`].
pub fn commutator(a: &RatMat2, b: &RatMat2) -> RatMat2 {
    a.commutator(b)
}

/// Free-function form of [`RatMat2::residue_at`].
pub fn residue_at(m: &RatMat2, pole: Complex64) -> Result<Mat2> {
    m.residue_at(pole)
}

/// The sl2 basis `H = diag(1,-1)`, `E1 = e_{12}`, `E2 = e_{21}`.
pub mod sl2 {
    use super::*;

    pub fn h() -> RatMat2 {
        RatMat2::constant(Mat2::new(ONE, ZERO, ZERO, -ONE))
    }

    pub fn e1() -> RatMat2 {
        RatMat2::constant(Mat2::new(ZERO, ONE, ZERO, ZERO))
    }

    pub fn e2() -> RatMat2 {
        RatMat2::constant(Mat2::new(ZERO, ZERO, ONE, ZERO))
    }
}
