//! Run configuration: a TOML file merged with command-line overrides.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use degpv::{Complex64, ContourConfig, PState, TPath, Theta};
use serde::Deserialize;

/// Complex numbers are written as `[re, im]` in the file.
pub type Pair = [f64; 2];

pub fn complex(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

/// Parses `re,im` (or a bare real number) from the command line.
pub fn parse_pair(s: &str) -> Result<Pair, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |x: &str| x.parse::<f64>().map_err(|_| format!("not a number: {x:?}"));
    match parts.as_slice() {
        [re] => Ok([num(re)?, 0.0]),
        [re, im] => Ok([num(re)?, num(im)?]),
        _ => Err(format!("expected re,im but got {s:?}")),
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContourFile {
    pub base: Option<Pair>,
    pub radius0: Option<f64>,
    pub radius1: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepFile {
    pub theta0_range: Option<[f64; 2]>,
    pub theta1_range: Option<[f64; 2]>,
    pub n0: Option<usize>,
    pub n1: Option<usize>,
    pub checks: Option<usize>,
    pub jobs: Option<usize>,
}

/// Every field is optional; missing values fall back to the defaults of
/// [`RunConfig`].
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub theta0: Option<Pair>,
    pub theta1: Option<Pair>,
    pub t_start: Option<Pair>,
    pub t_end: Option<Pair>,
    pub initial_q: Option<Pair>,
    pub initial_p: Option<Pair>,
    pub tol: Option<f64>,
    pub steps: Option<usize>,
    pub seed: Option<u64>,
    pub cases: Option<usize>,
    pub output: Option<PathBuf>,
    pub contour: ContourFile,
    pub sweep: SweepFile,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config file {}", path.display()))
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        // the toml error message carries the line and column
        toml::from_str(text).map_err(|e| anyhow::anyhow!("{e}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub theta0_range: [f64; 2],
    pub theta1_range: [f64; 2],
    pub n0: usize,
    pub n1: usize,
    pub checks: usize,
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub theta: Theta,
    pub t_start: Complex64,
    pub t_end: Complex64,
    pub initial_q: Complex64,
    pub initial_p: Complex64,
    pub tol: f64,
    pub steps: usize,
    pub seed: u64,
    pub cases: usize,
    pub output: Option<PathBuf>,
    pub contour: ContourConfig,
    pub sweep: SweepConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            theta: Theta::real(1.0, 1.0),
            t_start: Complex64::new(1.0, 0.0),
            t_end: Complex64::new(2.0, 0.0),
            initial_q: Complex64::new(0.5, 0.3),
            initial_p: Complex64::new(0.1, 0.0),
            tol: 1e-10,
            steps: 100,
            seed: 0,
            cases: 100,
            output: None,
            contour: ContourConfig::default(),
            sweep: SweepConfig {
                theta0_range: [0.2, 0.8],
                theta1_range: [0.2, 0.8],
                n0: 3,
                n1: 3,
                checks: 3,
                jobs: None,
            },
        }
    }
}

impl RunConfig {
    /// Applies the file values over the defaults, then `overrides` on top.
    pub fn resolve(file: FileConfig, overrides: FileConfig) -> anyhow::Result<Self> {
        let mut cfg = RunConfig::default();
        for layer in [file, overrides] {
            cfg.apply(layer);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, f: FileConfig) {
        if let Some(v) = f.theta0 {
            self.theta.theta0 = complex(v);
        }
        if let Some(v) = f.theta1 {
            self.theta.theta1 = complex(v);
        }
        let set = |slot: &mut Complex64, v: Option<Pair>| {
            if let Some(v) = v {
                *slot = complex(v);
            }
        };
        set(&mut self.t_start, f.t_start);
        set(&mut self.t_end, f.t_end);
        set(&mut self.initial_q, f.initial_q);
        set(&mut self.initial_p, f.initial_p);
        set(&mut self.contour.base, f.contour.base);
        self.tol = f.tol.unwrap_or(self.tol);
        self.steps = f.steps.unwrap_or(self.steps);
        self.seed = f.seed.unwrap_or(self.seed);
        self.cases = f.cases.unwrap_or(self.cases);
        self.output = f.output.or(self.output.take());
        self.contour.radius0 = f.contour.radius0.unwrap_or(self.contour.radius0);
        self.contour.radius1 = f.contour.radius1.unwrap_or(self.contour.radius1);
        let s = &mut self.sweep;
        s.theta0_range = f.sweep.theta0_range.unwrap_or(s.theta0_range);
        s.theta1_range = f.sweep.theta1_range.unwrap_or(s.theta1_range);
        s.n0 = f.sweep.n0.unwrap_or(s.n0);
        s.n1 = f.sweep.n1.unwrap_or(s.n1);
        s.checks = f.sweep.checks.unwrap_or(s.checks);
        s.jobs = f.sweep.jobs.or(s.jobs);
    }

    /// `steps` equal segments from `t_start` to `t_end`, refined near 0.
    pub fn t_path(&self) -> degpv::Result<TPath> {
        TPath::linear(self.t_start, self.t_end, self.steps)
    }

    pub fn initial_state(&self) -> degpv::Result<PState> {
        PState::new(self.initial_q, self.initial_p, self.t_start, self.theta)
    }

    fn validate(&self) -> anyhow::Result<()> {
        if !(self.tol > 0.0 && self.tol <= 1e-2) {
            bail!("tol must lie in (0, 1e-2], got {}", self.tol);
        }
        if self.t_start == Complex64::new(0.0, 0.0) || self.t_end == Complex64::new(0.0, 0.0) {
            bail!("the t path must avoid t = 0");
        }
        if self.steps == 0 {
            bail!("steps must be positive");
        }
        self.t_path().context("t path")?;
        if self.sweep.n0 == 0 || self.sweep.n1 == 0 {
            bail!("sweep grid must have at least one point per axis");
        }
        if self.sweep.jobs == Some(0) {
            bail!("sweep jobs must be positive");
        }
        self.contour.loops().context("contour configuration")?;
        Ok(())
    }
}
