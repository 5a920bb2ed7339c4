//! Experiment runners. Each writes `summary.json` plus CSV tables into the
//! configured output directory and returns the process exit status.

mod probe;
mod verify;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use monopole_core::evolution::{
    existence_time_study, rough_uv, DiagonalState, RunStatus, RunSummary, Solver, SolverConfig,
};
use monopole_core::monopole::{from_uv, monopole_residuals, scaling_map, MonopoleState};
use monopole_core::spectral::{make_smooth_data, sobolev_norm, Field, PairField, Repr};

use crate::config::{caps, Experiment, InitialData, RunConfig};
use crate::error::CliError;
use crate::snapshot::Snapshot;

/// Exit status for a run stopped by the blow-up detector.
pub const EXIT_BLOWUP: i32 = 3;
/// Exit status for a failed identity check.
pub const EXIT_VERIFY_FAILED: i32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub summary: PathBuf,
}

/// CSV and JSON writer rooted at the output directory.
pub(crate) struct Output {
    dir: PathBuf,
}

impl Output {
    fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    pub(crate) fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub(crate) fn csv<T: Serialize>(&self, name: &str, rows: &[T]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(self.path(name))?;
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    fn json(&self, name: &str, value: &Value) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }
}

/// Runs `experiment` under `config`. Configuration, budget and I/O problems
/// are errors; blow-up and failed checks still write a summary and are
/// reported through the exit code.
pub fn run(experiment: Experiment, config: &RunConfig) -> Result<Outcome, CliError> {
    config.validate()?;
    let start = Instant::now();
    let out = Output::create(&config.out)?;
    let (results, exit_code) = match experiment {
        Experiment::Simulate => simulate(config, &out)?,
        Experiment::Verify => verify::run(config, &out)?,
        Experiment::Probe => probe::probe(config, &out)?,
        Experiment::Norms => probe::norms(config, &out)?,
        Experiment::Convergence => convergence(config, &out)?,
        Experiment::Scaling => scaling(config, &out)?,
        Experiment::ExistenceTime => existence(config, &out)?,
    };
    let summary = json!({
        "experiment": experiment.name(),
        "config": config.echo(),
        "exit_code": exit_code,
        "results": results,
        "wall_time_seconds": start.elapsed().as_secs_f64(),
    });
    let summary = out.json("summary.json", &summary)?;
    Ok(Outcome { exit_code, summary })
}

/// Initial `(u, v)`; the pair has size `amplitude` (`L^2` for smooth data,
/// `H^{data_s}` for rough data).
pub(crate) fn initial_uv(config: &RunConfig, solver: &SolverConfig) -> Result<(PairField, PairField), CliError> {
    let (grid, algebra) = (solver.grid, solver.algebra);
    let each = config.amplitude / 2f64.sqrt();
    Ok(match config.initial {
        InitialData::Zero => (
            PairField::zeros(grid, algebra, Repr::Fourier),
            PairField::zeros(grid, algebra, Repr::Fourier),
        ),
        InitialData::Smooth => (
            make_smooth_data(config.width, config.seed, each, grid, algebra)?,
            make_smooth_data(config.width, config.seed.wrapping_add(1), each, grid, algebra)?,
        ),
        InitialData::Rough => rough_uv(config.data_s, config.seed, config.amplitude, solver)?,
    })
}

fn status_exit(status: &RunStatus) -> i32 {
    match status {
        RunStatus::Completed => 0,
        RunStatus::BlowUp { .. } => EXIT_BLOWUP,
    }
}

fn diff_norm<F: Field>(a: &F, b: &F, s: f64) -> Result<f64, CliError> {
    let mut d = a.clone();
    d.axpy(Complex64::new(-1.0, 0.0), b)?;
    Ok(sobolev_norm(&d, s))
}

#[derive(Serialize)]
struct NormRow {
    step: usize,
    t: f64,
    norm: f64,
    l2: f64,
    invariance_defect: f64,
    algebra_defect: f64,
}

#[derive(Serialize)]
struct ResidualRow {
    step: usize,
    t: f64,
    res_phi: f64,
    res_lorenz: f64,
    res_a1: f64,
    res_a2: f64,
}

/// Per-step bookkeeping shared by `simulate` and `convergence`.
#[derive(Default)]
struct Monitor {
    prev: Option<MonopoleState>,
    norms: Vec<NormRow>,
    residuals: Vec<ResidualRow>,
    max_residual: [f64; 4],
    max_invariance: f64,
    max_algebra: f64,
}

impl Monitor {
    fn observe(&mut self, n: usize, state: &DiagonalState, norm_s: f64) -> monopole_core::Result<MonopoleState> {
        let m = state.to_monopole();
        let inv = state.invariance_defect();
        let alg = m.max_algebra_defect()?;
        self.max_invariance = self.max_invariance.max(inv);
        self.max_algebra = self.max_algebra.max(alg);
        self.norms.push(NormRow {
            step: n,
            t: state.t,
            norm: state.uv_norm(norm_s),
            l2: state.uv_norm(0.0),
            invariance_defect: inv,
            algebra_defect: alg,
        });
        if let Some(prev) = &self.prev {
            let r = monopole_residuals(prev, &m)?;
            for (worst, v) in self.max_residual.iter_mut().zip(r) {
                *worst = worst.max(v);
            }
            self.residuals.push(ResidualRow {
                step: n,
                t: state.t,
                res_phi: r[0],
                res_lorenz: r[1],
                res_a1: r[2],
                res_a2: r[3],
            });
        }
        self.prev = Some(m.clone());
        Ok(m)
    }

    fn residual_json(&self) -> Value {
        let r = self.max_residual;
        json!({ "phi": r[0], "lorenz": r[1], "a1": r[2], "a2": r[3] })
    }
}

fn simulate(config: &RunConfig, out: &Output) -> Result<(Value, i32), CliError> {
    let scfg = config.solver_config()?;
    let solver = Solver::new(scfg.clone())?;
    let (u, v) = initial_uv(config, &scfg)?;
    let initial = DiagonalState::from_uv(&u, &v, 0.0)?;
    let stride = config.snapshot_stride;
    let snap_dir = out.path("snapshots");
    if stride > 0 {
        fs::create_dir_all(&snap_dir)?;
    }
    let mut monitor = Monitor::default();
    let mut write_err: Option<CliError> = None;
    let summary = solver.run(&initial, |n, state| {
        let m = monitor.observe(n, state, scfg.blowup_norm_s)?;
        if stride > 0 && n % stride == 0 && write_err.is_none() {
            let path = snap_dir.join(format!("step_{n:06}.mnpl"));
            if let Err(e) = Snapshot::from_monopole(&m).write(&path) {
                write_err = Some(e.into());
            }
        }
        Ok(())
    })?;
    if let Some(e) = write_err {
        return Err(e);
    }
    if stride > 0 {
        Snapshot::from_monopole(&summary.last.to_monopole()).write(&snap_dir.join("final.mnpl"))?;
    }
    out.csv("norms.csv", &monitor.norms)?;
    out.csv("residuals.csv", &monitor.residuals)?;
    let RunSummary { last, norms, steps_taken, status } = summary;
    let results = json!({
        "run": status,
        "steps_taken": steps_taken,
        "final_time": last.t,
        "initial_norm": norms.first().map(|x| x.1),
        "final_norm": norms.last().map(|x| x.1),
        "norm_s": scfg.blowup_norm_s,
        "max_residuals": monitor.residual_json(),
        "max_invariance_defect": monitor.max_invariance,
        "max_algebra_defect": monitor.max_algebra,
    });
    Ok((results, status_exit(&status)))
}

#[derive(Serialize)]
struct ConvergenceRow {
    level: usize,
    dt: f64,
    steps: usize,
    diff_to_next: Option<f64>,
    order: Option<f64>,
    res_phi: f64,
    res_lorenz: f64,
    res_a1: f64,
    res_a2: f64,
    res_order: Option<f64>,
}

fn order(coarse: f64, fine: f64) -> Option<f64> {
    (coarse > 0.0 && fine > 0.0).then(|| (coarse / fine).log2())
}

/// Successive halvings of `dt`: solution differences between neighbouring
/// levels (in `L^2`) and the largest equation residual at each level.
fn convergence(config: &RunConfig, out: &Output) -> Result<(Value, i32), CliError> {
    let base = config.solver_config()?;
    let (steps0, _) = base.schedule();
    let finest = steps0.saturating_mul(1 << (config.levels - 1));
    if finest > caps::MAX_STEPS {
        return Err(CliError::Budget(format!(
            "finest level needs {finest} steps, cap is {}",
            caps::MAX_STEPS
        )));
    }
    let (u, v) = initial_uv(config, &base)?;
    let initial = DiagonalState::from_uv(&u, &v, 0.0)?;
    let mut finals = Vec::new();
    let mut residuals = Vec::new();
    let mut exit = 0;
    let mut statuses = Vec::new();
    for level in 0..config.levels {
        let mut scfg = base.clone();
        scfg.dt = base.dt / (1u64 << level) as f64;
        let solver = Solver::new(scfg.clone())?;
        let mut monitor = Monitor::default();
        let summary = solver.run(&initial, |n, state| monitor.observe(n, state, scfg.blowup_norm_s).map(|_| ()))?;
        exit = exit.max(status_exit(&summary.status));
        statuses.push(summary.status.clone());
        residuals.push((scfg.dt, summary.steps_taken, monitor.max_residual));
        finals.push(summary.last);
    }
    let mut rows = Vec::new();
    for (level, (dt, steps, res)) in residuals.iter().enumerate() {
        let diff = |i: usize| -> Result<Option<f64>, CliError> {
            match (finals.get(i), finals.get(i + 1)) {
                (Some(a), Some(b)) => Ok(Some(diff_norm(a, b, 0.0)?)),
                _ => Ok(None),
            }
        };
        let d = diff(level)?;
        let d_next = diff(level + 1)?;
        let worst = res.iter().cloned().fold(0.0, f64::max);
        let res_order = residuals
            .get(level + 1)
            .and_then(|(_, _, r)| order(worst, r.iter().cloned().fold(0.0, f64::max)));
        rows.push(ConvergenceRow {
            level,
            dt: *dt,
            steps: *steps,
            diff_to_next: d,
            order: d.zip(d_next).and_then(|(a, b)| order(a, b)),
            res_phi: res[0],
            res_lorenz: res[1],
            res_a1: res[2],
            res_a2: res[3],
            res_order,
        });
    }
    out.csv("convergence.csv", &rows)?;
    let orders: Vec<_> = rows.iter().filter_map(|r| r.order).collect();
    let res_orders: Vec<_> = rows.iter().filter_map(|r| r.res_order).collect();
    let results = json!({
        "levels": config.levels,
        "integrator": base.integrator.name(),
        "solution_orders": orders,
        "residual_orders": res_orders,
        "runs": statuses,
    });
    Ok((results, exit))
}

#[derive(Serialize)]
struct ScalingRow {
    lambda: usize,
    horizon: f64,
    mismatch: f64,
    relative_mismatch: f64,
    time_mismatch: f64,
}

/// Compares `evolve(scale(data), T)` with `scale(evolve(data, lambda T))`;
/// the unscaled run uses step `lambda dt` so both take the same steps.
fn scaling(config: &RunConfig, out: &Output) -> Result<(Value, i32), CliError> {
    let scfg = config.solver_config()?;
    let lambda = config.lambda;
    let (u, v) = initial_uv(config, &scfg)?;
    let data = from_uv(&u, &v, 0.0)?;

    let small = Solver::new(scfg.clone())?;
    let lhs = small.run(&DiagonalState::from_monopole(&scaling_map(&data, lambda)?)?, |_, _| Ok(()))?;
    let mut big_cfg = scfg.clone();
    big_cfg.dt *= lambda as f64;
    big_cfg.horizon *= lambda as f64;
    let big = Solver::new(big_cfg)?;
    let rhs = big.run(&DiagonalState::from_monopole(&data)?, |_, _| Ok(()))?;

    let exit = status_exit(&lhs.status).max(status_exit(&rhs.status));
    let a = lhs.last.to_monopole();
    let b = scaling_map(&rhs.last.to_monopole(), lambda)?;
    let mismatch = diff_norm(&a, &b, 0.0)?;
    let size = sobolev_norm(&a, 0.0);
    let row = ScalingRow {
        lambda,
        horizon: scfg.horizon,
        mismatch,
        relative_mismatch: if size > 0.0 { mismatch / size } else { 0.0 },
        time_mismatch: (a.t - b.t).abs(),
    };
    out.csv("scaling.csv", std::slice::from_ref(&row))?;
    let results = json!({
        "lambda": lambda,
        "mismatch": row.mismatch,
        "relative_mismatch": row.relative_mismatch,
        "time_mismatch": row.time_mismatch,
        "runs": [lhs.status, rhs.status],
    });
    Ok((results, exit))
}

/// Existence time against data size. Blow-up here is the measurement, so
/// it does not change the exit status.
fn existence(config: &RunConfig, out: &Output) -> Result<(Value, i32), CliError> {
    let scfg = config.solver_config()?;
    let rows = existence_time_study(&config.amplitudes, config.data_s, &scfg, config.seed)?;
    out.csv("existence.csv", &rows)?;
    let results = json!({
        "data_s": config.data_s,
        "horizon": scfg.horizon,
        "rows": rows,
    });
    Ok((results, 0))
}
