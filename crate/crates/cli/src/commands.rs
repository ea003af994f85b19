//! Subcommand implementations. Each returns whether its checks passed;
//! errors carry the exit code they map to.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use degpv::backlund::{apply, verify_bt};
use degpv::moduli::{chart1_residual, singular_locus};
use degpv::monodromy::{
    cubic_residual, cubic_singular_points, expected_s, isomonodromy_drift, monodromy_invariants, rplus_fiber,
};
use degpv::painleve::{integrate_flow_with, integrate_moduli, qp_to_chart};
use degpv::{BTKind, ChartPoint, Complex64, Flow, Theta, Tolerances, Trajectory};
use log::{info, warn};
use rayon::prelude::*;
use serde_json::Value;

use crate::config::RunConfig;
use crate::json::{self, complex, num, object};
use crate::verify;

/// `tr M0`, `tr M1` must match the local exponents to this accuracy.
pub const TRACE_TOL: f64 = 1e-6;
/// Largest acceptable pairwise change of the invariants along a solution.
pub const DRIFT_TOL: f64 = 1e-5;

#[derive(Debug)]
pub enum Failure {
    /// Bad input or configuration, exit code 2.
    Usage(anyhow::Error),
    /// Numerical failure, exit code 1.
    Numeric(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numeric(_) => 1,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Usage(e) | Failure::Numeric(e) => e,
        }
    }
}

impl From<degpv::Error> for Failure {
    fn from(e: degpv::Error) -> Self {
        Failure::Numeric(e.into())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Numeric(anyhow::Error::new(e).context("writing output"))
    }
}

pub type CmdResult = Result<bool, Failure>;

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display())).map_err(Failure::Usage)?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_json(path: Option<&Path>, v: &Value) -> Result<(), Failure> {
    let mut out = sink(path)?;
    writeln!(out, "{}", json::to_string(v))?;
    out.flush()?;
    Ok(())
}

fn theta_json(th: &Theta) -> Value {
    Value::Array(vec![complex(th.theta0), complex(th.theta1)])
}

fn fmt_c(z: Complex64) -> String {
    format!("{:.16e}{:+.16e}i", z.re, z.im)
}

pub fn cmd_verify(cfg: &RunConfig) -> CmdResult {
    let reports = verify::run_all(cfg.seed, cfg.cases);
    for r in &reports {
        info!("suite {} max residual {:e} pass {}", r.suite, r.max_residual, r.pass);
    }
    let pass = reports.iter().all(|r| r.pass);
    emit_json(cfg.output.as_deref(), &Value::Array(reports.iter().map(|r| r.to_json()).collect()))?;
    Ok(pass)
}

/// Integrates from the configured initial state; `Err` carries the last
/// good time in its message.
fn solve(cfg: &RunConfig, flow: Flow) -> Result<Trajectory, Failure> {
    let s0 = cfg.initial_state().map_err(|e| Failure::Usage(e.into()))?;
    let path = cfg.t_path().map_err(|e| Failure::Usage(e.into()))?;
    integrate_flow_with(flow, &s0, &path, Tolerances::from_tol(cfg.tol)).map_err(Failure::from)
}

pub fn cmd_integrate(cfg: &RunConfig, flow: Flow) -> CmdResult {
    let traj = solve(cfg, flow)?;
    let residual = traj.max_jet_residual()?;
    // the defining equation along the isomonodromic field from the same start
    let s0 = cfg.initial_state().map_err(|e| Failure::Usage(e.into()))?;
    let (pts, _) = integrate_moduli(&qp_to_chart(&s0)?, &cfg.theta, &traj.t_path, Tolerances::from_tol(cfg.tol))?;
    let drift = pts.iter().map(|p| chart1_residual(p, &cfg.theta).norm()).fold(0.0, f64::max);

    let mut out = sink(cfg.output.as_deref())?;
    traj.write_csv(&mut out)?;
    out.flush()?;

    let last = traj.last().expect("trajectory has its initial sample");
    eprintln!(
        "steps {} accepted, {} rejected; final t = {}, q = {}, p = {}; max residual {:.16e}; constraint drift {:.16e}",
        traj.stats.accepted,
        traj.stats.rejected,
        fmt_c(last.t),
        fmt_c(last.q),
        fmt_c(last.p),
        residual,
        drift
    );
    Ok(true)
}

pub fn cmd_monodromy(cfg: &RunConfig, checks: usize) -> CmdResult {
    let s0 = cfg.initial_state().map_err(|e| Failure::Usage(e.into()))?;
    let chart = qp_to_chart(&s0)?;
    let inv = monodromy_invariants(&chart, &cfg.theta, &cfg.contour, cfg.tol)?;
    let (s0_expected, s1_expected) = expected_s(&cfg.theta);
    let drift = if cfg.t_start == cfg.t_end {
        0.0
    } else {
        let traj = solve(cfg, Flow::Hamiltonian)?;
        isomonodromy_drift(&traj, checks, &cfg.contour, cfg.tol)?
    };
    let trace_err = (inv.tr_m0 - s0_expected).norm().max((inv.tr_m1 - s1_expected).norm());
    info!("local trace error {trace_err:e}, drift {drift:e}");
    let report = object([
        ("theta", theta_json(&cfg.theta)),
        ("t", complex(cfg.t_start)),
        (
            "invariants",
            object([
                ("tr_m0", complex(inv.tr_m0)),
                ("tr_m1", complex(inv.tr_m1)),
                ("tr_m0m1", complex(inv.tr_m0m1)),
            ]),
        ),
        ("expected", object([("s0", complex(s0_expected)), ("s1", complex(s1_expected))])),
        ("drift", num(drift)),
    ]);
    emit_json(cfg.output.as_deref(), &report)?;
    if trace_err >= TRACE_TOL {
        warn!("local traces deviate from the exponents by {trace_err:e}");
    }
    if drift >= DRIFT_TOL {
        warn!("invariants drift by {drift:e} along the solution");
    }
    Ok(trace_err < TRACE_TOL && drift < DRIFT_TOL)
}

/// Acceptance bound of [`verify_bt`] for each kind.
fn backlund_bound(kind: BTKind) -> f64 {
    match kind {
        BTKind::Shift => 1e-6,
        _ => 1e-8,
    }
}

pub fn cmd_backlund(cfg: &RunConfig, kind: BTKind, input: Option<&PathBuf>) -> CmdResult {
    let traj = match input {
        Some(path) => {
            let file = File::open(path)
                .with_context(|| format!("opening {}", path.display()))
                .map_err(Failure::Usage)?;
            Trajectory::read_csv(file, cfg.theta)
                .with_context(|| format!("reading trajectory {}", path.display()))
                .map_err(Failure::Usage)?
        }
        None => solve(cfg, Flow::Hamiltonian)?,
    };
    let image = apply(&traj, kind)?;
    let mut out = sink(cfg.output.as_deref())?;
    image.write_csv(&mut out)?;
    out.flush()?;

    if traj.samples.len() < 5 {
        warn!("only {} samples, skipping verification", traj.samples.len());
        return Ok(true);
    }
    let residual = verify_bt(&traj, kind, cfg.tol)?;
    let bound = backlund_bound(kind);
    eprintln!(
        "{kind:?}: theta ({}, {}) -> ({}, {}); image residual {residual:.16e} (bound {bound:e})",
        fmt_c(traj.theta.theta0),
        fmt_c(traj.theta.theta1),
        fmt_c(image.theta.theta0),
        fmt_c(image.theta.theta1),
    );
    Ok(residual < bound)
}

fn chart_point_json(p: &ChartPoint) -> Value {
    match p {
        ChartPoint::Chart1(p) => object([
            ("chart", Value::from("chart1")),
            ("a0", complex(p.a0)),
            ("b0", complex(p.b0)),
            ("c1", complex(p.c1)),
            ("t", complex(p.t)),
        ]),
        ChartPoint::Chart2(p) => object([
            ("chart", Value::from("chart2")),
            ("a2", complex(p.a2)),
            ("b1", complex(p.b1)),
            ("c1", complex(p.c1)),
            ("t", complex(p.t)),
        ]),
    }
}

pub fn cmd_surface(cfg: &RunConfig, s0: Complex64, s1: Complex64, fiber_samples: usize) -> CmdResult {
    let singular = cubic_singular_points(s0, s1);
    let mut worst: f64 = 0.0;
    let points: Vec<Value> = singular
        .iter()
        .map(|p| {
            worst = worst.max(cubic_residual(p, s0, s1).norm());
            object([("x1", complex(p.x1)), ("x2", complex(p.x2)), ("x3", complex(p.x3))])
        })
        .collect();
    // the exceptional line exists over s1 = 2 away from s0 = +-2
    let fiber = if s1 == Complex64::new(2.0, 0.0) {
        match rplus_fiber(s0, fiber_samples) {
            Ok(pts) => Value::Array(
                pts.iter()
                    .map(|p| {
                        object([
                            ("x1", complex(p.x1)),
                            ("x2", complex(p.x2)),
                            ("x3", complex(p.x3)),
                            ("y1", complex(p.y1)),
                        ])
                    })
                    .collect(),
            ),
            Err(e) => {
                warn!("no exceptional fiber: {e}");
                Value::Null
            }
        }
    } else {
        Value::Null
    };
    let moduli = singular_locus(&cfg.theta, cfg.t_start)?;
    let report = object([
        ("s0", complex(s0)),
        ("s1", complex(s1)),
        ("singular_points", Value::Array(points)),
        ("fiber", fiber),
        ("max_residual", num(worst)),
        ("theta", theta_json(&cfg.theta)),
        ("t", complex(cfg.t_start)),
        ("moduli_singular_points", Value::Array(moduli.iter().map(chart_point_json).collect())),
    ]);
    emit_json(cfg.output.as_deref(), &report)?;
    Ok(worst == 0.0)
}

fn linspace(range: [f64; 2], n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![range[0]];
    }
    (0..n).map(|k| range[0] + (range[1] - range[0]) * k as f64 / (n - 1) as f64).collect()
}

struct SweepRow {
    theta: Theta,
    outcome: Result<(usize, f64, f64), String>,
}

fn sweep_point(cfg: &RunConfig, theta: Theta) -> SweepRow {
    let point = RunConfig { theta, ..cfg.clone() };
    let outcome = (|| -> Result<(usize, f64, f64), Failure> {
        let traj = solve(&point, Flow::Hamiltonian)?;
        let residual = traj.max_jet_residual()?;
        let drift = isomonodromy_drift(&traj, cfg.sweep.checks, &cfg.contour, cfg.tol)?;
        Ok((traj.stats.accepted, residual, drift))
    })()
    .map_err(|f| format!("{:#}", f.error()));
    SweepRow { theta, outcome }
}

pub fn cmd_sweep(cfg: &RunConfig) -> CmdResult {
    let grid: Vec<Theta> = linspace(cfg.sweep.theta0_range, cfg.sweep.n0)
        .into_iter()
        .flat_map(|a| linspace(cfg.sweep.theta1_range, cfg.sweep.n1).into_iter().map(move |b| Theta::real(a, b)))
        .collect();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cfg.sweep.jobs {
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build().map_err(|e| Failure::Usage(anyhow!("thread pool: {e}")))?;
    // collect keeps grid order whatever the completion order
    let rows: Vec<SweepRow> = pool.install(|| grid.par_iter().map(|&th| sweep_point(cfg, th)).collect());

    let mut out = sink(cfg.output.as_deref())?;
    writeln!(out, "index,theta0_re,theta0_im,theta1_re,theta1_im,steps,max_residual,drift,status")?;
    let mut pass = true;
    for (i, row) in rows.iter().enumerate() {
        let th = [row.theta.theta0.re, row.theta.theta0.im, row.theta.theta1.re, row.theta.theta1.im]
            .map(|x| format!("{x:.16e}"))
            .join(",");
        match &row.outcome {
            Ok((steps, residual, drift)) => writeln!(out, "{i},{th},{steps},{residual:.16e},{drift:.16e},ok")?,
            Err(msg) => {
                pass = false;
                warn!("grid point {i} failed: {msg}");
                let msg = msg.replace('"', "'");
                writeln!(out, "{i},{th},,,,\"error: {msg}\"")?
            }
        }
    }
    out.flush()?;
    Ok(pass)
}
