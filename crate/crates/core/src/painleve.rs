//! The degenerate fifth Painlevé equation in three equivalent forms (scalar
//! second-order ODE, twisted Hamiltonian system, isomonodromic field on
//! chart 1), the dictionary between them, numerical integration along
//! complex `t`-paths, and the even-solution reduction.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laxpair::{vector_field, ModuliRate};
use crate::moduli::{Chart1Point, Theta};
use crate::ode::{integrate_path, Piece, StepStats, Tolerances};

/// `|q|` or `|q - 1|` below this counts as hitting a fixed singularity.
pub const FIXED_SINGULARITY_GUARD: f64 = 1e-10;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn check_admissible(q: Complex64, t: Complex64) -> Result<()> {
    if t == zero() || q.norm() < FIXED_SINGULARITY_GUARD || (q - 1.0).norm() < FIXED_SINGULARITY_GUARD {
        return Err(Error::FixedSingularity { t, q });
    }
    Ok(())
}

/// A phase point `(q, p)` at time `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PState {
    pub q: Complex64,
    pub p: Complex64,
    pub t: Complex64,
    pub theta: Theta,
}

impl PState {
    pub fn new(q: Complex64, p: Complex64, t: Complex64, theta: Theta) -> Result<Self> {
        if t == zero() {
            return Err(Error::DegenerateInput("t must be nonzero".into()));
        }
        Ok(PState { q, p, t, theta })
    }
}

/// `q''` from `(q, q', t)`.
pub fn degpv_rhs(q: Complex64, dq: Complex64, t: Complex64, th: &Theta) -> Result<Complex64> {
    check_admissible(q, t)?;
    let t2 = t * t;
    let qm = q - 1.0;
    Ok(0.5 * (1.0 / q + 1.0 / qm) * dq * dq - dq / t
        + 2.0 * qm * th.theta0 * th.theta0 / (q * t2)
        - 2.0 * q * th.theta1 * th.theta1 / (qm * t2)
        + 8.0 * q * qm)
}

pub fn hamiltonian(s: &PState) -> Result<Complex64> {
    check_admissible(s.q, s.t)?;
    let (q, p, t, th) = (s.q, s.p, s.t, &s.theta);
    let p2 = p * p;
    Ok(2.0 * (p2 - th.w0()) / (t * q) - 2.0 * (p2 - th.w1()) / (t * (q - 1.0)) + 2.0 * q * t)
}

/// `(dH/dq, dH/dp)` in closed form.
pub fn hamiltonian_partials(s: &PState) -> Result<(Complex64, Complex64)> {
    check_admissible(s.q, s.t)?;
    let (q, p, t, th) = (s.q, s.p, s.t, &s.theta);
    let qm = q - 1.0;
    let p2 = p * p;
    let hq = -2.0 * (p2 - th.w0()) / (t * q * q) + 2.0 * (p2 - th.w1()) / (t * qm * qm) + 2.0 * t;
    let hp = 4.0 * p / (t * q) - 4.0 * p / (t * qm);
    Ok((hq, hp))
}

/// `(q', p') = (q(1-q) dH/dp, -q(1-q) dH/dq)`.
pub fn twisted_hamilton_rhs(s: &PState) -> Result<(Complex64, Complex64)> {
    let (hq, hp) = hamiltonian_partials(s)?;
    let w = s.q * (1.0 - s.q);
    Ok((w * hp, -w * hq))
}

/// Value and first two derivatives of a function at a point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    pub value: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub at: Complex64,
}

/// Jets of even-reduced and classical variables share the same shape.
pub type EvenJet = Jet;

impl Jet {
    pub fn new(value: Complex64, d1: Complex64, d2: Complex64, at: Complex64) -> Self {
        Jet { value, d1, d2, at }
    }
}

/// `q''` minus the right-hand side of the scalar equation.
pub fn degpv_residual(j: &Jet, th: &Theta) -> Result<Complex64> {
    Ok(j.d2 - degpv_rhs(j.value, j.d1, j.at, th)?)
}

/// The second-order jet of `q` at a phase point, using the Hamiltonian system.
pub fn state_jet(s: &PState) -> Result<Jet> {
    let (_, dp) = twisted_hamilton_rhs(s)?;
    let dq = 4.0 * s.p / s.t;
    let d2 = 4.0 * dp / s.t - 4.0 * s.p / (s.t * s.t);
    Ok(Jet::new(s.q, dq, d2, s.t))
}

pub fn chart_to_qp(p: &Chart1Point, th: &Theta) -> PState {
    PState { q: -p.b0, p: p.a0, t: p.t, theta: *th }
}

/// Lifts `(q, p)` to the unique chart-1 point on the variety with `b0 = -q`.
pub fn qp_to_chart(s: &PState) -> Result<Chart1Point> {
    check_admissible(s.q, s.t)?;
    let th = &s.theta;
    let (a0, b0, t) = (s.p, -s.q, s.t);
    let t2 = t * t;
    let c1 = (a0 * a0 + b0 * (-th.w0() + th.w1()) - b0 * t2 * (1.0 + b0) - th.w0()) / (b0 * (1.0 + b0));
    Ok(Chart1Point { a0, b0, c1, t })
}

/// Right-hand side of the equation for `Q(s)` with `q(t) = Q(t^2)`.
pub fn even_q_rhs(q: Complex64, dq: Complex64, s: Complex64, th: &Theta) -> Result<Complex64> {
    check_admissible(q, s)?;
    let s2 = s * s;
    let qm = q - 1.0;
    Ok(0.5 * (1.0 / q + 1.0 / qm) * dq * dq - dq / s
        + qm * (th.theta0 * th.theta0 / 2.0) / (q * s2)
        - q * (th.theta1 * th.theta1 / 2.0) / (qm * s2)
        + 2.0 * q * qm / s)
}

pub fn even_q_residual(qj: &Jet, th: &Theta) -> Result<Complex64> {
    Ok(qj.d2 - even_q_rhs(qj.value, qj.d1, qj.at, th)?)
}

/// The `q`-jet at `t` induced by a `Q`-jet taken at `s = t^2`.
pub fn even_lift(qj: &Jet, t: Complex64) -> Jet {
    Jet::new(qj.value, 2.0 * t * qj.d1, 2.0 * qj.d1 + 4.0 * t * t * qj.d2, t)
}

/// Right-hand side of the classical equation for `y(s)`.
pub fn classical_y_rhs(y: Complex64, dy: Complex64, s: Complex64, th: &Theta) -> Result<Complex64> {
    check_admissible(y, s)?;
    let s2 = s * s;
    let ym = y - 1.0;
    Ok(0.5 * (3.0 * y - 1.0) / (y * ym) * dy * dy - dy / s + y * ym * ym * th.theta1 * th.theta1 / (2.0 * s2)
        - ym * ym * th.theta0 * th.theta0 / (2.0 * s2 * y)
        - 2.0 * y / s)
}

pub fn classical_y_residual(yj: &Jet, th: &Theta) -> Result<Complex64> {
    Ok(yj.d2 - classical_y_rhs(yj.value, yj.d1, yj.at, th)?)
}

/// The `y`-jet with `Q = y / (y - 1)`, i.e. `y = Q / (Q - 1)`.
pub fn y_jet_from_q(qj: &Jet) -> Result<Jet> {
    let m = qj.value - 1.0;
    if m.norm() < FIXED_SINGULARITY_GUARD {
        return Err(Error::FixedSingularity { t: qj.at, q: qj.value });
    }
    let y = qj.value / m;
    let dy = -qj.d1 / (m * m);
    let d2y = -qj.d2 / (m * m) + 2.0 * qj.d1 * qj.d1 / (m * m * m);
    Ok(Jet::new(y, dy, d2y, qj.at))
}

/// Vertices of a piecewise-linear path in `t`, refined so that each step is
/// shorter than the distance of its start from `t = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TPath {
    vertices: Vec<Complex64>,
}

impl TPath {
    pub fn new(vertices: Vec<Complex64>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidPath("empty path".into()));
        }
        let mut refined = vec![vertices[0]];
        if vertices[0] == zero() {
            return Err(Error::InvalidPath("path starts at t = 0".into()));
        }
        for w in vertices.windows(2) {
            let (a, b) = (w[0], w[1]);
            let seg = Piece::Line { from: a, to: b };
            if seg.distance_to(zero()) <= 1e-12 * a.norm().max(b.norm()) {
                return Err(Error::InvalidPath(format!("segment {a} -> {b} passes through t = 0")));
            }
            let mut cur = a;
            while (b - cur).norm() >= cur.norm() {
                // halve the remaining distance to the closest point to 0 on the segment
                let step = (b - cur) * (0.5 * cur.norm() / (b - cur).norm());
                cur += step;
                refined.push(cur);
            }
            refined.push(b);
        }
        Ok(TPath { vertices: refined })
    }

    /// `n + 1` equally spaced vertices from `a` to `b`.
    pub fn linear(a: Complex64, b: Complex64, n: usize) -> Result<Self> {
        let n = n.max(1);
        if a == b {
            return Self::new(vec![a]);
        }
        Self::new((0..=n).map(|k| a + (b - a) * (k as f64 / n as f64)).collect())
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn pieces(&self) -> Vec<Piece> {
        self.vertices
            .windows(2)
            .map(|w| Piece::Line { from: w[0], to: w[1] })
            .collect()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        TPath { vertices: self.vertices.iter().map(|&t| f(t)).collect() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: Complex64,
    pub q: Complex64,
    pub p: Complex64,
}

impl Sample {
    pub fn state(&self, theta: Theta) -> PState {
        PState { q: self.q, p: self.p, t: self.t, theta }
    }
}

/// Samples at the vertices of a `t`-path. The path records which branch of
/// the universal cover of `t != 0` the solution lives on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub theta: Theta,
    pub t_path: TPath,
    pub stats: StepStats,
}

/// Which formulation of the equation to integrate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Flow {
    /// `(q, p)` under the twisted bracket.
    Hamiltonian,
    /// `(q, q')` under the scalar equation.
    Scalar,
    /// `(a0, b0, c1)` under the isomonodromic field.
    Moduli,
}

/// Integrates the Hamiltonian system with tolerance `tol`.
pub fn integrate_flow(s0: &PState, t_path: &TPath, tol: f64) -> Result<Trajectory> {
    integrate_flow_with(Flow::Hamiltonian, s0, t_path, Tolerances::from_tol(tol))
}

pub fn integrate_flow_with(flow: Flow, s0: &PState, t_path: &TPath, tol: Tolerances) -> Result<Trajectory> {
    if t_path.vertices()[0] != s0.t {
        return Err(Error::InvalidPath(format!(
            "path starts at {} but the initial state is at {}",
            t_path.vertices()[0],
            s0.t
        )));
    }
    let th = s0.theta;
    let pieces = t_path.pieces();
    let verts = t_path.vertices();
    let (samples, stats) = match flow {
        Flow::Hamiltonian => {
            check_admissible(s0.q, s0.t)?;
            let rhs = |t: Complex64, y: &[Complex64; 2]| {
                let (dq, dp) = twisted_hamilton_rhs(&PState { q: y[0], p: y[1], t, theta: th })?;
                Ok([dq, dp])
            };
            let (ys, stats) = integrate_path(rhs, &pieces, [s0.q, s0.p], tol)?;
            let samples = ys.iter().zip(verts).map(|(y, &t)| Sample { t, q: y[0], p: y[1] }).collect();
            (samples, stats)
        }
        Flow::Scalar => {
            check_admissible(s0.q, s0.t)?;
            let rhs = |t: Complex64, y: &[Complex64; 2]| Ok([y[1], degpv_rhs(y[0], y[1], t, &th)?]);
            let (ys, stats) = integrate_path(rhs, &pieces, [s0.q, 4.0 * s0.p / s0.t], tol)?;
            let samples = ys
                .iter()
                .zip(verts)
                .map(|(y, &t)| Sample { t, q: y[0], p: t * y[1] / 4.0 })
                .collect();
            (samples, stats)
        }
        Flow::Moduli => {
            let p0 = qp_to_chart(s0)?;
            let (pts, stats) = integrate_moduli(&p0, &th, t_path, tol)?;
            let samples = pts
                .iter()
                .map(|p| {
                    let s = chart_to_qp(p, &th);
                    Sample { t: s.t, q: s.q, p: s.p }
                })
                .collect();
            (samples, stats)
        }
    };
    Ok(Trajectory { samples, theta: th, t_path: t_path.clone(), stats })
}

/// Integrates the isomonodromic field on chart 1.
pub fn integrate_moduli(
    p0: &Chart1Point,
    th: &Theta,
    t_path: &TPath,
    tol: Tolerances,
) -> Result<(Vec<Chart1Point>, StepStats)> {
    integrate_moduli_with(vector_field, p0, th, t_path, tol)
}

/// As [`integrate_moduli`] with a caller-supplied field.
pub fn integrate_moduli_with<F>(
    field: F,
    p0: &Chart1Point,
    th: &Theta,
    t_path: &TPath,
    tol: Tolerances,
) -> Result<(Vec<Chart1Point>, StepStats)>
where
    F: Fn(&Chart1Point, &Theta) -> Result<ModuliRate>,
{
    let rhs = |t: Complex64, y: &[Complex64; 3]| {
        let r = field(&Chart1Point { a0: y[0], b0: y[1], c1: y[2], t }, th)?;
        Ok([r.da0, r.db0, r.dc1])
    };
    let (ys, stats) = integrate_path(rhs, &t_path.pieces(), [p0.a0, p0.b0, p0.c1], tol)?;
    let pts = ys
        .iter()
        .zip(t_path.vertices())
        .map(|(y, &t)| Chart1Point { a0: y[0], b0: y[1], c1: y[2], t })
        .collect();
    Ok((pts, stats))
}

pub const CSV_HEADER: [&str; 9] = ["t_re", "t_im", "q_re", "q_im", "p_re", "p_im", "H_re", "H_im", "residual"];

/// Formats a float with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

impl Trajectory {
    pub fn first(&self) -> Option<PState> {
        self.samples.first().map(|s| s.state(self.theta))
    }

    pub fn last(&self) -> Option<PState> {
        self.samples.last().map(|s| s.state(self.theta))
    }

    /// Largest scalar-equation residual over the samples, using the jet
    /// implied by the Hamiltonian system at each sample.
    pub fn max_jet_residual(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for s in &self.samples {
            let j = state_jet(&s.state(self.theta))?;
            worst = worst.max(degpv_residual(&j, &self.theta)?.norm());
        }
        Ok(worst)
    }

    /// CSV with columns [`CSV_HEADER`]; `H` and the residual are left empty
    /// at fixed singularities.
    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CSV_HEADER)?;
        for s in &self.samples {
            let st = s.state(self.theta);
            let h = hamiltonian(&st).ok();
            let r = state_jet(&st).and_then(|j| degpv_residual(&j, &self.theta)).ok();
            let mut row = vec![
                fmt17(s.t.re),
                fmt17(s.t.im),
                fmt17(s.q.re),
                fmt17(s.q.im),
                fmt17(s.p.re),
                fmt17(s.p.im),
            ];
            match h {
                Some(h) => row.extend([fmt17(h.re), fmt17(h.im)]),
                None => row.extend([String::new(), String::new()]),
            }
            row.push(r.map(|r| fmt17(r.norm())).unwrap_or_default());
            out.write_record(&row)?;
        }
        out.flush()
    }

    /// Reads the `t`, `q`, `p` columns of a trajectory CSV.
    pub fn read_csv<R: Read>(r: R, theta: Theta) -> Result<Trajectory> {
        let mut rdr = csv::Reader::from_reader(r);
        let headers = rdr
            .headers()
            .map_err(|e| Error::DegenerateInput(format!("csv: {e}")))?
            .clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::DegenerateInput(format!("csv: missing column {name}")))
        };
        let idx = [col("t_re")?, col("t_im")?, col("q_re")?, col("q_im")?, col("p_re")?, col("p_im")?];
        let mut samples = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::DegenerateInput(format!("csv: {e}")))?;
            let mut v = [0.0; 6];
            for (k, &i) in idx.iter().enumerate() {
                let field = rec.get(i).unwrap_or("");
                v[k] = field
                    .trim()
                    .parse()
                    .map_err(|_| Error::DegenerateInput(format!("csv: bad number {field:?}")))?;
            }
            samples.push(Sample {
                t: Complex64::new(v[0], v[1]),
                q: Complex64::new(v[2], v[3]),
                p: Complex64::new(v[4], v[5]),
            });
        }
        if samples.is_empty() {
            return Err(Error::DegenerateInput("csv: no samples".into()));
        }
        let t_path = TPath::new(samples.iter().map(|s| s.t).collect())?;
        if t_path.vertices().len() != samples.len() {
            return Err(Error::InvalidPath("sample times are too far apart relative to |t|".into()));
        }
        Ok(Trajectory { samples, theta, t_path, stats: StepStats::default() })
    }
}
