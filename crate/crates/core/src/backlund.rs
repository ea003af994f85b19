//! Bäcklund transformations: maps between solutions of the equation for
//! possibly different parameters, at the level of jets, phase points and
//! whole trajectories.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moduli::Theta;
use crate::ode::Tolerances;
use crate::painleve::{
    degpv_residual, integrate_flow_with, state_jet, Flow, Jet, PState, Sample, Trajectory,
};

/// Guard band around `q = 0, 1` for the shift.
pub const SHIFT_GUARD: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BTKind {
    /// `q(t) -> q(-t)`
    NegateT,
    /// `theta0 -> -theta0`, solutions unchanged
    FlipTheta0,
    /// `theta1 -> -theta1`, solutions unchanged
    FlipTheta1,
    /// `q(t) -> 1 - q(i t)`, `(theta0, theta1) -> (theta1, theta0)`
    Swap,
    /// `theta0 -> theta0 + 1`
    Shift,
}

/// Action on the parameters.
pub fn theta_map(kind: BTKind, th: &Theta) -> Theta {
    match kind {
        BTKind::NegateT => *th,
        BTKind::FlipTheta0 => Theta::new(-th.theta0, th.theta1),
        BTKind::FlipTheta1 => Theta::new(th.theta0, -th.theta1),
        BTKind::Swap => th.swapped(),
        BTKind::Shift => Theta::new(th.theta0 + 1.0, th.theta1),
    }
}

/// `(t, q, p) -> (-t, q, p)`. Both `t` and `q'` change sign, so `p = t q' / 4`
/// is preserved.
pub fn bt_negate_t(traj: &Trajectory) -> Trajectory {
    Trajectory {
        samples: traj.samples.iter().map(|s| Sample { t: -s.t, q: s.q, p: s.p }).collect(),
        theta: traj.theta,
        t_path: traj.t_path.map(|t| -t),
        stats: traj.stats,
    }
}

/// Flips the sign of `theta0` (`which = 0`) or `theta1` (`which = 1`).
pub fn bt_theta_flip(traj: &Trajectory, which: u8) -> Result<Trajectory> {
    let kind = match which {
        0 => BTKind::FlipTheta0,
        1 => BTKind::FlipTheta1,
        _ => return Err(Error::DegenerateInput(format!("theta index must be 0 or 1, got {which}"))),
    };
    let mut out = traj.clone();
    out.theta = theta_map(kind, &traj.theta);
    Ok(out)
}

/// Jet of `q~(s) = 1 - q(i s)` at `s = -i t`, from the jet of `q` at `t`.
pub fn bt_swap_jet(q: Complex64, dq: Complex64, d2q: Complex64, t: Complex64) -> (Complex64, Complex64, Complex64, Complex64) {
    let i = Complex64::i();
    (1.0 - q, -i * dq, d2q, -i * t)
}

/// `(t, q, p) -> (-i t, 1 - q, -p)`.
pub fn bt_swap_state(s: &PState) -> PState {
    PState { q: 1.0 - s.q, p: -s.p, t: -Complex64::i() * s.t, theta: s.theta.swapped() }
}

pub fn bt_swap(traj: &Trajectory) -> Trajectory {
    let i = Complex64::i();
    Trajectory {
        samples: traj.samples.iter().map(|s| Sample { t: -i * s.t, q: 1.0 - s.q, p: -s.p }).collect(),
        theta: traj.theta.swapped(),
        t_path: traj.t_path.map(|t| -i * t),
        stats: traj.stats,
    }
}

/// The shift `theta0 -> theta0 + 1` on a phase point.
///
/// `q~ = 1 - (2p - theta0 (q - 1))^2 / (4 q^2 t^2 (q - 1)) + theta1^2 / (4 t^2 (q - 1))`
/// and `p~ = (t / 4) dq~/dt` along the flow, expanded in closed form.
pub fn bt_shift_point(s: &PState) -> Result<PState> {
    let (q, a, t) = (s.q, s.p, s.t);
    if t == Complex64::new(0.0, 0.0) || q.norm() < SHIFT_GUARD || (q - 1.0).norm() < SHIFT_GUARD {
        return Err(Error::FixedSingularity { t, q });
    }
    let (th0, th1) = (s.theta.theta0, s.theta.theta1);
    let qm = q - 1.0;
    let t2 = t * t;
    let q2 = q * q;
    let u = 2.0 * a - th0 * qm;
    let q_new = 1.0 - u * u / (4.0 * q2 * t2 * qm) + th1 * th1 / (4.0 * t2 * qm);

    let th0_2 = th0 * th0;
    let th1_2 = th1 * th1;
    let num = 8.0 * a * a * a - 8.0 * a * a * q * th0 + 4.0 * a * a * q + 12.0 * a * a * th0
        - 8.0 * a * q2 * q * t2
        + 8.0 * a * q2 * t2
        + 2.0 * a * q2 * th0_2
        - 4.0 * a * q2 * th0
        - 2.0 * a * q2 * th1_2
        - 8.0 * a * q * th0_2
        + 4.0 * a * q * th0
        + 6.0 * a * th0_2
        + 4.0 * q2 * q2 * t2 * th0
        - 8.0 * q2 * q * t2 * th0
        + q2 * q * th0_2
        - q2 * q * th1_2
        + 4.0 * q2 * t2 * th0
        + q2 * th0_2 * th0
        - 2.0 * q2 * th0_2
        - q2 * th0 * th1_2
        - 2.0 * q * th0_2 * th0
        + q * th0_2
        + th0_2 * th0;
    let p_new = num / (8.0 * q2 * q * t2 * qm);
    Ok(PState { q: q_new, p: p_new, t, theta: theta_map(BTKind::Shift, &s.theta) })
}

pub fn bt_shift(traj: &Trajectory) -> Result<Trajectory> {
    let samples = traj
        .samples
        .iter()
        .map(|s| {
            let out = bt_shift_point(&s.state(traj.theta))?;
            Ok(Sample { t: out.t, q: out.q, p: out.p })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        samples,
        theta: theta_map(BTKind::Shift, &traj.theta),
        t_path: traj.t_path.clone(),
        stats: traj.stats,
    })
}

/// Applies `kind` to the whole trajectory.
pub fn apply(traj: &Trajectory, kind: BTKind) -> Result<Trajectory> {
    match kind {
        BTKind::NegateT => Ok(bt_negate_t(traj)),
        BTKind::FlipTheta0 => bt_theta_flip(traj, 0),
        BTKind::FlipTheta1 => bt_theta_flip(traj, 1),
        BTKind::Swap => Ok(bt_swap(traj)),
        BTKind::Shift => bt_shift(traj),
    }
}

/// Largest residual of the image of `traj` against the target equation.
///
/// Jet-level maps are checked sample by sample: the `q`-jet at each sample
/// (from the Hamiltonian system) is transformed and substituted. The shift
/// is checked by integrating the target system from the first transformed
/// sample with tolerance `tol` and comparing with the transformed samples.
pub fn verify_bt(traj: &Trajectory, kind: BTKind, tol: f64) -> Result<f64> {
    if traj.samples.len() < 5 {
        return Err(Error::DegenerateInput(format!(
            "need at least 5 samples, got {}",
            traj.samples.len()
        )));
    }
    let target = theta_map(kind, &traj.theta);
    let mut worst: f64 = 0.0;
    match kind {
        BTKind::Shift => {
            let image = bt_shift(traj)?;
            let start = image.first().expect("nonempty");
            let reference = integrate_flow_with(Flow::Hamiltonian, &start, &image.t_path, Tolerances::from_tol(tol))?;
            for (a, b) in image.samples.iter().zip(&reference.samples) {
                worst = worst.max((a.q - b.q).norm()).max((a.p - b.p).norm());
            }
        }
        _ => {
            let per_sample = traj
                .samples
                .par_iter()
                .map(|s| {
                    let j = state_jet(&s.state(traj.theta))?;
                    let image = match kind {
                        BTKind::NegateT => Jet::new(j.value, -j.d1, j.d2, -j.at),
                        BTKind::Swap => {
                            let (q, dq, d2q, t) = bt_swap_jet(j.value, j.d1, j.d2, j.at);
                            Jet::new(q, dq, d2q, t)
                        }
                        _ => j,
                    };
                    Ok(degpv_residual(&image, &target)?.norm())
                })
                .collect::<Result<Vec<f64>>>()?;
            worst = per_sample.into_iter().fold(worst, f64::max);
        }
    }
    Ok(worst)
}
