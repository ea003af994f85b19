//! Numerical monodromy of `d/dz + A` by contour transport, its conjugation
//! invariants, and the cubic surface they live on together with the chart of
//! its resolution over `s1 = 2`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::Mat2;
use crate::error::{Error, Result};
use crate::laxpair::{build_a_chart1, ConnectionA};
use crate::moduli::{Chart1Point, Theta};
use crate::ode::{integrate_path, Piece, Tolerances};
use crate::painleve::{qp_to_chart, Trajectory};

/// Transport paths must keep at least this distance from `z = 0, 1`.
pub const MIN_POLE_DISTANCE: f64 = 0.05;

/// Conjugation invariants of the monodromy representation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonodromyInvariants {
    pub tr_m0: Complex64,
    pub tr_m1: Complex64,
    pub tr_m0m1: Complex64,
}

impl MonodromyInvariants {
    fn as_array(&self) -> [Complex64; 3] {
        [self.tr_m0, self.tr_m1, self.tr_m0m1]
    }
}

/// A loop based at `base` that runs to the circle around `center`, once
/// around it, and back.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub base: Complex64,
    pub center: Complex64,
    pub radius: f64,
    /// `+1` counterclockwise, `-1` clockwise.
    pub orientation: i8,
}

impl Contour {
    pub fn new(base: Complex64, center: Complex64, radius: f64, orientation: i8) -> Result<Self> {
        let c = Contour { base, center, radius, orientation };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) || !matches!(self.orientation, 1 | -1) {
            return Err(Error::InvalidPath(format!(
                "contour needs radius > 0 and orientation +-1, got {} / {}",
                self.radius, self.orientation
            )));
        }
        if (self.base - self.center).norm() <= self.radius {
            return Err(Error::InvalidPath("base point lies inside the contour circle".into()));
        }
        let margin = 0.1 * self.radius;
        for pole in [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)] {
            for piece in self.pieces() {
                let d = piece.distance_to(pole);
                if d < margin {
                    return Err(Error::PathTooClose { pole, distance: d });
                }
            }
        }
        Ok(())
    }

    pub fn pieces(&self) -> [Piece; 3] {
        let dir = self.base - self.center;
        let start = dir.arg();
        let touch = self.center + Complex64::from_polar(self.radius, start);
        [
            Piece::Line { from: self.base, to: touch },
            Piece::Arc { center: self.center, radius: self.radius, start, sweep: TAU * self.orientation as f64 },
            Piece::Line { from: touch, to: self.base },
        ]
    }
}

/// Base point and radii of the loops around 0 and 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourConfig {
    pub base: Complex64,
    pub radius0: f64,
    pub radius1: f64,
}

impl Default for ContourConfig {
    fn default() -> Self {
        ContourConfig { base: Complex64::new(0.5, 0.75), radius0: 0.3, radius1: 0.3 }
    }
}

impl ContourConfig {
    pub fn loops(&self) -> Result<(Contour, Contour)> {
        Ok((
            Contour::new(self.base, Complex64::new(0.0, 0.0), self.radius0, 1)?,
            Contour::new(self.base, Complex64::new(1.0, 0.0), self.radius1, 1)?,
        ))
    }
}

fn to_array(m: &Mat2) -> [Complex64; 4] {
    [m.0[0][0], m.0[0][1], m.0[1][0], m.0[1][1]]
}

fn from_array(y: &[Complex64; 4]) -> Mat2 {
    Mat2::new(y[0], y[1], y[2], y[3])
}

/// Fundamental matrix of `Y' = -A(z) Y` along `pieces`, starting from the
/// identity.
pub fn transport_pieces(a: &ConnectionA, pieces: &[Piece], tol: Tolerances) -> Result<Mat2> {
    let den = a.matrix.denominator();
    for pole in [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)] {
        if den.eval(pole).norm() > 1e-14 {
            continue;
        }
        for piece in pieces {
            let d = piece.distance_to(pole);
            if d < MIN_POLE_DISTANCE {
                return Err(Error::PathTooClose { pole, distance: d });
            }
        }
    }
    let m = &a.matrix;
    let rhs = |z: Complex64, y: &[Complex64; 4]| {
        let az = m.eval(z);
        Ok(to_array(&(az * from_array(y)).scale((-1.0).into())))
    };
    let (ys, _) = integrate_path(rhs, pieces, to_array(&Mat2::IDENTITY), tol)?;
    Ok(from_array(ys.last().expect("at least the initial state")))
}

/// Transport along a piecewise-linear path through `path`.
pub fn transport(a: &ConnectionA, path: &[Complex64], tol: f64) -> Result<Mat2> {
    let pieces: Vec<Piece> = path.windows(2).map(|w| Piece::Line { from: w[0], to: w[1] }).collect();
    transport_pieces(a, &pieces, Tolerances::from_tol(tol))
}

/// Monodromy around one based loop.
pub fn loop_monodromy(a: &ConnectionA, contour: &Contour, tol: f64) -> Result<Mat2> {
    transport_pieces(a, &contour.pieces(), Tolerances::from_tol(tol))
}

/// `(M0, M1)` for the configured loops.
pub fn monodromy_matrices(p: &Chart1Point, th: &Theta, cfg: &ContourConfig, tol: f64) -> Result<(Mat2, Mat2)> {
    let a = build_a_chart1(p, th)?;
    let (l0, l1) = cfg.loops()?;
    let (m0, m1) = rayon::join(|| loop_monodromy(&a, &l0, tol), || loop_monodromy(&a, &l1, tol));
    Ok((m0?, m1?))
}

pub fn monodromy_invariants(p: &Chart1Point, th: &Theta, cfg: &ContourConfig, tol: f64) -> Result<MonodromyInvariants> {
    let (m0, m1) = monodromy_matrices(p, th, cfg, tol)?;
    Ok(MonodromyInvariants { tr_m0: m0.trace(), tr_m1: m1.trace(), tr_m0m1: (m0 * m1).trace() })
}

/// `(s0, s1) = (2 cos(pi theta0), 2 cos(pi theta1))`, valid for complex theta.
pub fn expected_s(th: &Theta) -> (Complex64, Complex64) {
    let s = |x: Complex64| {
        let e = (Complex64::new(0.0, PI) * x).exp();
        e + 1.0 / e
    };
    (s(th.theta0), s(th.theta1))
}

/// Largest pairwise deviation of the invariants at `n_checks` samples
/// spread evenly along the trajectory.
pub fn isomonodromy_drift(traj: &Trajectory, n_checks: usize, cfg: &ContourConfig, tol: f64) -> Result<f64> {
    let n = traj.samples.len();
    if n_checks == 0 || n == 0 {
        return Ok(0.0);
    }
    let k = n_checks.min(n);
    let idx: Vec<usize> = if k == 1 {
        vec![0]
    } else {
        (0..k).map(|i| i * (n - 1) / (k - 1)).collect()
    };
    let mut invs = Vec::with_capacity(k);
    for i in idx {
        let chart = qp_to_chart(&traj.samples[i].state(traj.theta))?;
        invs.push(monodromy_invariants(&chart, &traj.theta, cfg, tol)?.as_array());
    }
    let mut worst: f64 = 0.0;
    for a in &invs {
        for b in &invs {
            for j in 0..3 {
                worst = worst.max((a[j] - b[j]).norm());
            }
        }
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubicPoint {
    pub x1: Complex64,
    pub x2: Complex64,
    pub x3: Complex64,
}

impl CubicPoint {
    pub fn new(x1: Complex64, x2: Complex64, x3: Complex64) -> Self {
        CubicPoint { x1, x2, x3 }
    }
}

/// `x1 x2 x3 + x1^2 + x2^2 + s0 x1 + s1 x2 + 1`
pub fn cubic_residual(pt: &CubicPoint, s0: Complex64, s1: Complex64) -> Complex64 {
    let CubicPoint { x1, x2, x3 } = *pt;
    x1 * x2 * x3 + x1 * x1 + x2 * x2 + s0 * x1 + s1 * x2 + 1.0
}

pub fn cubic_gradient(pt: &CubicPoint, s0: Complex64, s1: Complex64) -> [Complex64; 3] {
    let CubicPoint { x1, x2, x3 } = *pt;
    [x2 * x3 + 2.0 * x1 + s0, x1 * x3 + 2.0 * x2 + s1, x1 * x2]
}

/// The singular points, one family per parameter equal to `+-2`.
pub fn cubic_singular_points(s0: Complex64, s1: Complex64) -> Vec<CubicPoint> {
    let two = Complex64::new(2.0, 0.0);
    let (zero, one) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    let mut out = Vec::new();
    if s1 == two {
        out.push(CubicPoint::new(zero, -one, s0));
    }
    if s1 == -two {
        out.push(CubicPoint::new(zero, one, -s0));
    }
    if s0 == two {
        out.push(CubicPoint::new(-one, zero, s1));
    }
    if s0 == -two {
        out.push(CubicPoint::new(one, zero, -s1));
    }
    out
}

/// A point of the affine chart `y0 = 1` of the resolution over `s1 = 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RPlusPoint {
    pub x1: Complex64,
    pub x2: Complex64,
    pub x3: Complex64,
    pub y1: Complex64,
}

impl RPlusPoint {
    pub fn cubic_point(&self) -> CubicPoint {
        CubicPoint::new(self.x1, self.x2, self.x3)
    }
}

/// The three defining relations of the chart.
pub fn rplus_residuals(pt: &RPlusPoint, s0: Complex64) -> (Complex64, Complex64, Complex64) {
    let two = Complex64::new(2.0, 0.0);
    let RPlusPoint { x1, x2, x3, y1 } = *pt;
    (
        cubic_residual(&pt.cubic_point(), s0, two),
        (x2 + 1.0) + x1 * y1,
        (1.0 + x2) * y1 - x2 * x3 - x1 - s0,
    )
}

/// `samples` points of the exceptional line over `(0, -1, s0)`, with `y1`
/// on the grid `-2, ..., 2` (a single sample sits at `y1 = 0`).
pub fn rplus_fiber(s0: Complex64, samples: usize) -> Result<Vec<RPlusPoint>> {
    if s0 == Complex64::new(2.0, 0.0) || s0 == Complex64::new(-2.0, 0.0) {
        return Err(Error::DegenerateInput("s0 = +-2 is not covered by this chart".into()));
    }
    let grid = |k: usize| if samples == 1 { 0.0 } else { -2.0 + 4.0 * k as f64 / (samples - 1) as f64 };
    Ok((0..samples)
        .map(|k| RPlusPoint {
            x1: 0.0.into(),
            x2: (-1.0).into(),
            x3: s0,
            y1: grid(k).into(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn expected_s_examples() {
        assert_eq!(expected_s(&Theta::real(0.0, 1.0)), (c(2.0), c(-2.0)));
        assert!(expected_s(&Theta::real(0.5, 0.0)).0.norm() < 1e-15);
    }

    #[test]
    fn cubic_examples() {
        assert_eq!(cubic_residual(&CubicPoint::new(c(0.0), c(-1.0), c(0.7)), c(0.7), c(2.0)), c(0.0));
        assert_eq!(cubic_residual(&CubicPoint::new(c(-1.0), c(0.0), c(-0.4)), c(2.0), c(-0.4)), c(0.0));
        assert_eq!(cubic_residual(&CubicPoint::new(c(-1.0), c(1.0), c(3.0)), c(3.0), c(3.0)), c(0.0));
    }

    #[test]
    fn singular_point_lists() {
        assert!(cubic_singular_points(c(0.0), c(0.0)).is_empty());
        assert_eq!(cubic_singular_points(c(3.0), c(2.0)), vec![CubicPoint::new(c(0.0), c(-1.0), c(3.0))]);
        assert_eq!(
            cubic_singular_points(c(2.0), c(2.0)),
            vec![CubicPoint::new(c(0.0), c(-1.0), c(2.0)), CubicPoint::new(c(-1.0), c(0.0), c(2.0))]
        );
    }

    #[test]
    fn fiber() {
        let pts = rplus_fiber(c(3.0), 5).unwrap();
        assert_eq!(pts.len(), 5);
        for p in &pts {
            assert_eq!(rplus_residuals(p, c(3.0)), (c(0.0), c(0.0), c(0.0)));
            assert_eq!(p.cubic_point(), CubicPoint::new(c(0.0), c(-1.0), c(3.0)));
        }
        assert!(rplus_fiber(c(3.0), 0).unwrap().is_empty());
        assert!(matches!(rplus_fiber(c(2.0), 3), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn rplus_off_fiber_point() {
        // pick x1, x2 and solve the third relation and the cubic for x3, y1
        let (s0, x1, x2) = (c(0.3), c(0.7), c(-0.2));
        let y1 = -(x2 + 1.0) / x1;
        // third relation is linear in x3
        let x3 = ((1.0 + x2) * y1 - x1 - s0) / x2;
        let pt = RPlusPoint { x1, x2, x3, y1 };
        let (r1, r2, r3) = rplus_residuals(&pt, s0);
        assert!(r1.norm() < 1e-14 && r2.norm() < 1e-14 && r3.norm() < 1e-14, "{r1} {r2} {r3}");
    }

    #[test]
    fn trivial_connection_transport_is_identity() {
        let th = Theta::real(0.0, 0.0);
        let mut a = build_a_chart1(&Chart1Point::new(c(0.0), c(0.0), c(0.0), c(1.0)).unwrap(), &th).unwrap();
        a.matrix = crate::algebra::RatMat2::zero();
        let m = transport(&a, &[c(0.5), Complex64::new(0.5, 1.0), c(2.0)], 1e-10).unwrap();
        assert!((m - Mat2::IDENTITY).max_abs() < 1e-15);
    }

    #[test]
    fn too_close_to_pole() {
        let th = Theta::real(0.3, 0.4);
        let a = build_a_chart1(&Chart1Point::new(c(0.1), c(0.2), c(0.3), c(1.0)).unwrap(), &th).unwrap();
        let r = transport(&a, &[Complex64::new(-1.0, 0.01), Complex64::new(1.0, 0.01)], 1e-10);
        assert!(matches!(r, Err(Error::PathTooClose { .. })));
    }
}
