//! Adaptive Dormand–Prince 5(4) integration of holomorphic ODEs along
//! parametrized paths in the complex plane.
//!
//! A path piece `z(s)`, `s in [0, 1]`, turns `dy/dz = f(z, y)` into the
//! ordinary ODE `dy/ds = f(z(s), y) z'(s)`. Step sizes are chosen on `s`;
//! underflow is judged on the step length in `z`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Error tolerances for one integration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rtol: 1e-10, atol: 1e-12 }
    }
}

impl Tolerances {
    /// Relative tolerance `tol`, absolute `tol / 100`.
    pub fn from_tol(tol: f64) -> Self {
        Tolerances { rtol: tol, atol: tol * 1e-2 }
    }
}

/// Smallest admissible step, relative to `|z|` (or 1 near the origin).
pub const MIN_STEP_REL: f64 = 1e-12;
const MAX_STEPS: usize = 2_000_000;

/// A straight segment or a circular arc.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Piece {
    Line { from: Complex64, to: Complex64 },
    /// `center + radius * exp(i (start + sweep * s))`
    Arc { center: Complex64, radius: f64, start: f64, sweep: f64 },
}

impl Piece {
    pub fn point(&self, s: f64) -> Complex64 {
        match *self {
            Piece::Line { from, to } => from + (to - from) * s,
            Piece::Arc { center, radius, start, sweep } => {
                center + Complex64::from_polar(radius, start + sweep * s)
            }
        }
    }

    pub fn velocity(&self, s: f64) -> Complex64 {
        match *self {
            Piece::Line { from, to } => to - from,
            Piece::Arc { radius, start, sweep, .. } => {
                Complex64::new(0.0, sweep) * Complex64::from_polar(radius, start + sweep * s)
            }
        }
    }

    pub fn start(&self) -> Complex64 {
        self.point(0.0)
    }

    pub fn end(&self) -> Complex64 {
        self.point(1.0)
    }

    pub fn length(&self) -> f64 {
        match *self {
            Piece::Line { from, to } => (to - from).norm(),
            Piece::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    /// Shortest distance from `p` to the piece.
    pub fn distance_to(&self, p: Complex64) -> f64 {
        match *self {
            Piece::Line { from, to } => {
                let d = to - from;
                let len2 = d.norm_sqr();
                if len2 == 0.0 {
                    return (p - from).norm();
                }
                let s = ((p - from) * d.conj()).re / len2;
                (p - self.point(s.clamp(0.0, 1.0))).norm()
            }
            Piece::Arc { center, radius, start, sweep } => {
                let rel = p - center;
                let ends = (p - self.start()).norm().min((p - self.end()).norm());
                if sweep.abs() >= std::f64::consts::TAU {
                    return (rel.norm() - radius).abs();
                }
                let phi = rel.arg();
                let (lo, span) = if sweep >= 0.0 { (start, sweep) } else { (start + sweep, -sweep) };
                let off = (phi - lo).rem_euclid(std::f64::consts::TAU);
                if off <= span {
                    (rel.norm() - radius).abs()
                } else {
                    ends
                }
            }
        }
    }
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Counters reported after an integration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

fn combine<const N: usize>(y: &[Complex64; N], h: f64, terms: &[(f64, &[Complex64; N])]) -> [Complex64; N] {
    let mut out = *y;
    for &(w, k) in terms {
        if w == 0.0 {
            continue;
        }
        for i in 0..N {
            out[i] += k[i] * (h * w);
        }
    }
    out
}

/// Integrates `dy/dz = f(z, y)` along one piece from `s = 0` to `s = 1`.
/// `f` may fail (e.g. at a fixed singularity); the error is passed through.
pub fn integrate_piece<const N: usize, F>(
    f: &mut F,
    piece: &Piece,
    y0: [Complex64; N],
    tol: Tolerances,
    stats: &mut StepStats,
) -> Result<[Complex64; N]>
where
    F: FnMut(Complex64, &[Complex64; N]) -> Result<[Complex64; N]>,
{
    if piece.length() == 0.0 {
        return Ok(y0);
    }
    let mut g = |s: f64, y: &[Complex64; N]| -> Result<[Complex64; N]> {
        let v = piece.velocity(s);
        let mut d = f(piece.point(s), y)?;
        for x in d.iter_mut() {
            *x *= v;
        }
        Ok(d)
    };

    let mut s = 0.0_f64;
    let mut y = y0;
    let mut k1 = g(s, &y)?;
    let mut h = initial_step(&y, &k1, tol);
    let mut steps = 0;
    while s < 1.0 {
        steps += 1;
        let z = piece.point(s);
        let scale = piece.velocity(s).norm().max(f64::MIN_POSITIVE);
        let floor = MIN_STEP_REL * z.norm().max(1.0);
        if h * scale < floor || steps > MAX_STEPS {
            return Err(Error::StepFailure { t: z, h: h * scale, state: y.to_vec() });
        }
        let last = s + h >= 1.0;
        let h_try = if last { 1.0 - s } else { h };

        let k2 = g(s + C2 * h_try, &combine(&y, h_try, &[(A21, &k1)]))?;
        let k3 = g(s + C3 * h_try, &combine(&y, h_try, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = g(s + C4 * h_try, &combine(&y, h_try, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = g(
            s + C5 * h_try,
            &combine(&y, h_try, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        )?;
        let k6 = g(
            s + h_try,
            &combine(&y, h_try, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        )?;
        let y_new = combine(&y, h_try, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let s_new = if last { 1.0 } else { s + h_try };
        let k7 = g(s_new, &y_new)?;

        let mut err2 = 0.0;
        for i in 0..N {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h_try;
            let sc = tol.atol + tol.rtol * y[i].norm().max(y_new[i].norm());
            err2 += (e.norm() / sc).powi(2);
        }
        let err = (err2 / N as f64).sqrt();
        if !err.is_finite() {
            stats.rejected += 1;
            h = h_try * 0.2;
            continue;
        }
        if err <= 1.0 {
            stats.accepted += 1;
            s = s_new;
            y = y_new;
            k1 = k7;
            let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = h_try * grow;
        } else {
            stats.rejected += 1;
            h = h_try * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
    }
    Ok(y)
}

fn initial_step<const N: usize>(y: &[Complex64; N], dy: &[Complex64; N], tol: Tolerances) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..N {
        let sc = tol.atol + tol.rtol * y[i].norm();
        d0 += (y[i].norm() / sc).powi(2);
        d1 += (dy[i].norm() / sc).powi(2);
    }
    let (d0, d1) = ((d0 / N as f64).sqrt(), (d1 / N as f64).sqrt());
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-3 } else { 0.01 * d0 / d1 };
    h.clamp(1e-8, 0.1)
}

/// Integrates along consecutive pieces and records the state at the end of
/// each piece (plus the initial state).
pub fn integrate_path<const N: usize, F>(
    mut f: F,
    pieces: &[Piece],
    y0: [Complex64; N],
    tol: Tolerances,
) -> Result<(Vec<[Complex64; N]>, StepStats)>
where
    F: FnMut(Complex64, &[Complex64; N]) -> Result<[Complex64; N]>,
{
    let mut stats = StepStats::default();
    let mut out = Vec::with_capacity(pieces.len() + 1);
    out.push(y0);
    let mut y = y0;
    for piece in pieces {
        y = integrate_piece(&mut f, piece, y, tol, &mut stats)?;
        out.push(y);
    }
    Ok((out, stats))
}
