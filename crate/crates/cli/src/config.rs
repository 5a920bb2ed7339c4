//! Flat `key = value` run configuration.
//!
//! Blank lines and `#` comments are ignored. Every key may appear at most
//! once; unknown keys are rejected. Lists are comma separated; exponent
//! tuples are `s, alpha, s1, s2, b'` groups separated by `;`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use monopole_core::algebra::{Algebra, AlgebraKind};
use monopole_core::evolution::{Integrator, SolverConfig};
use monopole_core::nullform::{ExponentTuple, ProbeFamily};
use monopole_core::projections::Sign;
use monopole_core::spectral::GridSpec;

use crate::error::CliError;

/// Upper limits on run sizes; exceeding one is a budget error.
pub mod caps {
    pub const MAX_N: usize = 512;
    pub const MAX_STEPS: usize = 1_000_000;
    pub const MAX_PROBE_SAMPLES: usize = 100_000;
    pub const MAX_VERIFY_SAMPLES: usize = 10_000_000;
    pub const MAX_LEVELS: usize = 8;
    pub const MAX_AMPLITUDES: usize = 100;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Simulate,
    Verify,
    Probe,
    Norms,
    Convergence,
    Scaling,
    ExistenceTime,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Simulate => "simulate",
            Experiment::Verify => "verify",
            Experiment::Probe => "probe",
            Experiment::Norms => "norms",
            Experiment::Convergence => "convergence",
            Experiment::Scaling => "scaling",
            Experiment::ExistenceTime => "existence-time",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialData {
    Zero,
    Smooth,
    Rough,
}

impl InitialData {
    fn name(&self) -> &'static str {
        match self {
            InitialData::Zero => "zero",
            InitialData::Smooth => "smooth",
            InitialData::Rough => "rough",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignChoice {
    Plus,
    Minus,
    Both,
}

impl SignChoice {
    pub fn signs(&self) -> Vec<Sign> {
        match self {
            SignChoice::Plus => vec![Sign::Plus],
            SignChoice::Minus => vec![Sign::Minus],
            SignChoice::Both => vec![Sign::Plus, Sign::Minus],
        }
    }

    fn name(&self) -> &'static str {
        match self {
            SignChoice::Plus => "plus",
            SignChoice::Minus => "minus",
            SignChoice::Both => "both",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub length: f64,
    pub dt: f64,
    pub horizon: f64,
    pub dealias: bool,
    pub integrator: Integrator,
    pub algebra: Algebra,
    /// Snapshot every this many steps; 0 writes none.
    pub snapshot_stride: usize,
    pub blowup_factor: f64,
    pub blowup_norm_s: f64,

    pub initial: InitialData,
    pub data_s: f64,
    pub amplitude: f64,
    pub width: f64,
    pub seed: u64,
    pub out: PathBuf,
    pub norm_s: Vec<f64>,

    pub samples: usize,
    pub s: f64,
    pub b: f64,
    pub eps: f64,
    pub sign: SignChoice,
    pub family: ProbeFamily,
    pub band: i64,
    pub probe_nt: usize,
    pub probe_n: usize,
    pub probe_period: f64,
    pub refine: bool,

    pub verify_samples: usize,
    pub modulation_samples: usize,
    pub exponents: Vec<ExponentTuple>,

    pub levels: usize,
    pub lambda: usize,
    pub amplitudes: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 64,
            length: 2.0 * PI,
            dt: 0.01,
            horizon: 0.5,
            dealias: true,
            integrator: Integrator::Rk4InteractionPicture,
            algebra: Algebra::SU2,
            snapshot_stride: 0,
            blowup_factor: 2.0,
            blowup_norm_s: 0.0,
            initial: InitialData::Smooth,
            data_s: 0.3,
            amplitude: 1.0,
            width: 2.0,
            seed: 0,
            out: PathBuf::from("out"),
            norm_s: vec![0.0, 0.26, 0.3, 0.5, 1.0],
            samples: 1000,
            s: 0.3,
            b: 0.76,
            eps: 0.04,
            sign: SignChoice::Both,
            family: ProbeFamily::Mixed,
            band: 3,
            probe_nt: 32,
            probe_n: 16,
            probe_period: 2.0 * PI,
            refine: true,
            verify_samples: 100_000,
            modulation_samples: 1_000_000,
            exponents: Vec::new(),
            levels: 3,
            lambda: 2,
            amplitudes: vec![0.5, 1.0, 2.0, 4.0],
        }
    }
}

pub const KEYS: &[&str] = &[
    "n",
    "length",
    "dt",
    "horizon",
    "dealias",
    "integrator",
    "algebra",
    "algebra_dim",
    "snapshot_stride",
    "blowup_factor",
    "blowup_norm_s",
    "initial",
    "data_s",
    "amplitude",
    "width",
    "seed",
    "out",
    "norm_s",
    "samples",
    "s",
    "b",
    "eps",
    "sign",
    "family",
    "band",
    "probe_nt",
    "probe_n",
    "probe_period",
    "refine",
    "verify_samples",
    "modulation_samples",
    "exponents",
    "levels",
    "lambda",
    "amplitudes",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("invalid value {value:?} for key {key}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(CliError::Config(format!("invalid boolean {value:?} for key {key}"))),
    }
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    value.split(',').map(|v| parse(key, v.trim())).collect()
}

fn parse_exponents(value: &str) -> Result<Vec<ExponentTuple>, CliError> {
    value
        .split(';')
        .filter(|g| !g.trim().is_empty())
        .map(|group| {
            let v = parse_list("exponents", group)?;
            if v.len() != 5 {
                return Err(CliError::Config(format!(
                    "exponent tuple {group:?} needs five values s, alpha, s1, s2, b'"
                )));
            }
            Ok(ExponentTuple { s: v[0], alpha: v[1], s1: v[2], s2: v[3], b_prime: v[4] })
        })
        .collect()
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        text.parse()
    }

    fn set(&mut self, key: &str, value: &str, algebra: &mut (Option<AlgebraKind>, Option<usize>)) -> Result<(), CliError> {
        match key {
            "n" => self.n = parse(key, value)?,
            "length" => self.length = parse(key, value)?,
            "dt" => self.dt = parse(key, value)?,
            "horizon" => self.horizon = parse(key, value)?,
            "dealias" => self.dealias = parse_bool(key, value)?,
            "integrator" => {
                self.integrator = match value {
                    "rk4-interaction-picture" | "rk4" => Integrator::Rk4InteractionPicture,
                    "strang" => Integrator::Strang,
                    _ => return Err(CliError::Config(format!("unknown integrator {value:?}"))),
                }
            }
            "algebra" => {
                algebra.0 = Some(match value {
                    "su" | "su2" => AlgebraKind::Su,
                    "abelian" => AlgebraKind::Abelian,
                    _ => return Err(CliError::Config(format!("unknown algebra {value:?}"))),
                })
            }
            "algebra_dim" => algebra.1 = Some(parse(key, value)?),
            "snapshot_stride" => self.snapshot_stride = parse(key, value)?,
            "blowup_factor" => self.blowup_factor = parse(key, value)?,
            "blowup_norm_s" => self.blowup_norm_s = parse(key, value)?,
            "initial" => {
                self.initial = match value {
                    "zero" => InitialData::Zero,
                    "smooth" => InitialData::Smooth,
                    "rough" => InitialData::Rough,
                    _ => return Err(CliError::Config(format!("unknown initial data {value:?}"))),
                }
            }
            "data_s" => self.data_s = parse(key, value)?,
            "amplitude" => self.amplitude = parse(key, value)?,
            "width" => self.width = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "norm_s" => self.norm_s = parse_list(key, value)?,
            "samples" => self.samples = parse(key, value)?,
            "s" => self.s = parse(key, value)?,
            "b" => self.b = parse(key, value)?,
            "eps" => self.eps = parse(key, value)?,
            "sign" => {
                self.sign = match value {
                    "plus" | "+" => SignChoice::Plus,
                    "minus" | "-" => SignChoice::Minus,
                    "both" => SignChoice::Both,
                    _ => return Err(CliError::Config(format!("unknown sign {value:?}"))),
                }
            }
            "family" => {
                self.family = ProbeFamily::parse(value)
                    .ok_or_else(|| CliError::Config(format!("unknown probe family {value:?}")))?
            }
            "band" => self.band = parse(key, value)?,
            "probe_nt" => self.probe_nt = parse(key, value)?,
            "probe_n" => self.probe_n = parse(key, value)?,
            "probe_period" => self.probe_period = parse(key, value)?,
            "refine" => self.refine = parse_bool(key, value)?,
            "verify_samples" => self.verify_samples = parse(key, value)?,
            "modulation_samples" => self.modulation_samples = parse(key, value)?,
            "exponents" => self.exponents = parse_exponents(value)?,
            "levels" => self.levels = parse(key, value)?,
            "lambda" => self.lambda = parse(key, value)?,
            "amplitudes" => self.amplitudes = parse_list(key, value)?,
            _ => return Err(CliError::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Checks value ranges (config errors) and size caps (budget errors).
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.n < 8 || self.n % 2 != 0 {
            return bad(format!("n must be even and at least 8, got {}", self.n));
        }
        for (name, v) in [("length", self.length), ("dt", self.dt), ("probe_period", self.probe_period)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !self.horizon.is_finite() {
            return bad("horizon must be finite".into());
        }
        if !(self.blowup_factor > 1.0) {
            return bad(format!("blowup_factor must exceed 1, got {}", self.blowup_factor));
        }
        if !(self.amplitude >= 0.0) || !(self.width > 0.0) {
            return bad("amplitude must be nonnegative and width positive".into());
        }
        if self.amplitudes.iter().any(|a| !(*a >= 0.0)) {
            return bad("amplitudes must be nonnegative".into());
        }
        if self.band < 1 {
            return bad(format!("band must be at least 1, got {}", self.band));
        }
        if self.probe_nt < 2 || self.probe_nt % 2 != 0 || self.probe_n < 8 || self.probe_n % 2 != 0 {
            return bad("probe_nt must be even and >= 2, probe_n even and >= 8".into());
        }
        if 2 * self.band >= self.probe_n as i64 {
            return bad(format!("band {} does not fit on probe_n = {}", self.band, self.probe_n));
        }
        if self.levels < 3 {
            return bad(format!("levels must be at least 3, got {}", self.levels));
        }
        if self.lambda < 1 || self.n % self.lambda != 0 {
            return bad(format!("lambda must divide n, got {}", self.lambda));
        }
        self.solver_config()?;

        let over = |msg: String| Err(CliError::Budget(msg));
        if self.n > caps::MAX_N {
            return over(format!("n = {} exceeds the cap {}", self.n, caps::MAX_N));
        }
        let steps = (self.horizon.abs() / self.dt).round() as usize;
        if steps > caps::MAX_STEPS {
            return over(format!("{steps} steps exceed the cap {}", caps::MAX_STEPS));
        }
        if self.samples > caps::MAX_PROBE_SAMPLES {
            return over(format!("samples = {} exceeds the cap {}", self.samples, caps::MAX_PROBE_SAMPLES));
        }
        if self.verify_samples > caps::MAX_VERIFY_SAMPLES || self.modulation_samples > caps::MAX_VERIFY_SAMPLES {
            return over(format!("verification samples exceed the cap {}", caps::MAX_VERIFY_SAMPLES));
        }
        if self.levels > caps::MAX_LEVELS {
            return over(format!("levels = {} exceeds the cap {}", self.levels, caps::MAX_LEVELS));
        }
        if self.amplitudes.len() > caps::MAX_AMPLITUDES {
            return over(format!("{} amplitudes exceed the cap {}", self.amplitudes.len(), caps::MAX_AMPLITUDES));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<GridSpec, CliError> {
        GridSpec::new(self.n, self.length).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn solver_config(&self) -> Result<SolverConfig, CliError> {
        let mut cfg = SolverConfig::new(self.grid()?, self.dt, self.horizon);
        cfg.dealias = self.dealias;
        cfg.integrator = self.integrator;
        cfg.algebra = self.algebra;
        cfg.snapshot_stride = self.snapshot_stride.max(1);
        cfg.blowup_factor = self.blowup_factor;
        cfg.blowup_norm_s = self.blowup_norm_s;
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    /// Resolved configuration, one entry per key, for echoing into outputs.
    pub fn echo(&self) -> BTreeMap<&'static str, String> {
        let list = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let algebra_kind = if self.algebra.is_abelian() { "abelian" } else { "su" };
        let exps = self
            .exponents
            .iter()
            .map(|e| format!("{},{},{},{},{}", e.s, e.alpha, e.s1, e.s2, e.b_prime))
            .collect::<Vec<_>>()
            .join(";");
        let entries: [(&'static str, String); 35] = [
            ("n", self.n.to_string()),
            ("length", self.length.to_string()),
            ("dt", self.dt.to_string()),
            ("horizon", self.horizon.to_string()),
            ("dealias", self.dealias.to_string()),
            ("integrator", self.integrator.name().to_string()),
            ("algebra", algebra_kind.to_string()),
            ("algebra_dim", self.algebra.dim.to_string()),
            ("snapshot_stride", self.snapshot_stride.to_string()),
            ("blowup_factor", self.blowup_factor.to_string()),
            ("blowup_norm_s", self.blowup_norm_s.to_string()),
            ("initial", self.initial.name().to_string()),
            ("data_s", self.data_s.to_string()),
            ("amplitude", self.amplitude.to_string()),
            ("width", self.width.to_string()),
            ("seed", self.seed.to_string()),
            ("out", self.out.display().to_string()),
            ("norm_s", list(&self.norm_s)),
            ("samples", self.samples.to_string()),
            ("s", self.s.to_string()),
            ("b", self.b.to_string()),
            ("eps", self.eps.to_string()),
            ("sign", self.sign.name().to_string()),
            ("family", self.family.name().to_string()),
            ("band", self.band.to_string()),
            ("probe_nt", self.probe_nt.to_string()),
            ("probe_n", self.probe_n.to_string()),
            ("probe_period", self.probe_period.to_string()),
            ("refine", self.refine.to_string()),
            ("verify_samples", self.verify_samples.to_string()),
            ("modulation_samples", self.modulation_samples.to_string()),
            ("exponents", exps),
            ("levels", self.levels.to_string()),
            ("lambda", self.lambda.to_string()),
            ("amplitudes", list(&self.amplitudes)),
        ];
        entries.into_iter().collect()
    }
}

impl FromStr for RunConfig {
    type Err = CliError;

    fn from_str(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        let mut seen = std::collections::BTreeSet::new();
        let mut algebra = (None, None);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value, got {raw:?}", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(CliError::Config(format!("line {}: unknown key {key:?}", lineno + 1)));
            }
            if !seen.insert(key.to_string()) {
                return Err(CliError::Config(format!("line {}: duplicate key {key:?}", lineno + 1)));
            }
            cfg.set(key, value, &mut algebra)
                .map_err(|e| CliError::Config(format!("line {}: {}", lineno + 1, e.message())))?;
        }
        let kind = algebra.0.unwrap_or(if cfg.algebra.is_abelian() { AlgebraKind::Abelian } else { AlgebraKind::Su });
        let dim = algebra.1.unwrap_or(2);
        cfg.algebra = Algebra::new(kind, dim).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.echo() {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}
