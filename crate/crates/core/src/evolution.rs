//! Time integration of the diagonalized system
//!
//! ```text
//! d_t u_+- -+ i|grad| u_+- = M_+- N(u, v)
//! d_t v_+- -+ i|grad| v_+- = M_-+ N(v, u)
//! ```
//!
//! with `u_+- = M_+- u`, `v_+- = M_-+ v`. The default integrator is the
//! classical four-stage Runge-Kutta scheme applied in the interaction picture
//! (`w_+- = e^{-+it|grad|} u_+-`), so the free flow is exact for any step size
//! and only the nonlinearity is discretized. Strang splitting is kept as a
//! second-order cross-check.

use std::cell::RefCell;

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::monopole::{from_uv, nonlinearity_field, MonopoleState};
use crate::projections::{project, Sign};
use crate::spectral::{
    dealias_in_place, sobolev_norm, to_repr, transform_in_place, Direction, Field, GridSpec, PairField, Repr,
    ScalarField,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    Rk4InteractionPicture,
    Strang,
}

impl Integrator {
    pub fn name(&self) -> &'static str {
        match self {
            Integrator::Rk4InteractionPicture => "rk4-interaction-picture",
            Integrator::Strang => "strang",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub grid: GridSpec,
    pub dt: f64,
    /// Final time; negative values run the flow backwards.
    pub horizon: f64,
    pub dealias: bool,
    pub integrator: Integrator,
    pub algebra: Algebra,
    pub snapshot_stride: usize,
    /// The run stops once `||(u, v)||_{H^s}` exceeds this multiple of its
    /// initial value. `f64::INFINITY` disables the check.
    pub blowup_factor: f64,
    /// Regularity `s` of the norm policed by `blowup_factor`.
    pub blowup_norm_s: f64,
}

impl SolverConfig {
    pub fn new(grid: GridSpec, dt: f64, horizon: f64) -> Self {
        Self {
            grid,
            dt,
            horizon,
            dealias: true,
            integrator: Integrator::Rk4InteractionPicture,
            algebra: Algebra::SU2,
            snapshot_stride: 1,
            blowup_factor: 2.0,
            blowup_norm_s: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("time step must be positive, got {}", self.dt)));
        }
        if !self.horizon.is_finite() {
            return Err(Error::InvalidArgument("horizon must be finite".into()));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::InvalidArgument("snapshot stride must be at least 1".into()));
        }
        if !(self.blowup_factor > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "blow-up factor must exceed 1, got {}",
                self.blowup_factor
            )));
        }
        Ok(())
    }

    /// Number of steps and the signed step actually used to land on the
    /// horizon.
    pub fn schedule(&self) -> (usize, f64) {
        let steps = (self.horizon.abs() / self.dt).round() as usize;
        if steps == 0 {
            if self.horizon == 0.0 {
                return (0, 0.0);
            }
            return (1, self.horizon);
        }
        (steps, self.horizon / steps as f64)
    }
}

/// The four diagonal components in Fourier representation.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalState {
    pub u_plus: PairField,
    pub u_minus: PairField,
    pub v_plus: PairField,
    pub v_minus: PairField,
    pub t: f64,
}

impl Field for DiagonalState {
    fn components(&self) -> Vec<&ScalarField> {
        [&self.u_plus, &self.u_minus, &self.v_plus, &self.v_minus]
            .into_iter()
            .flat_map(|p| p.components())
            .collect()
    }

    fn components_mut(&mut self) -> Vec<&mut ScalarField> {
        [&mut self.u_plus, &mut self.u_minus, &mut self.v_plus, &mut self.v_minus]
            .into_iter()
            .flat_map(|p| p.components_mut())
            .collect()
    }
}

impl DiagonalState {
    pub fn from_uv(u: &PairField, v: &PairField, t: f64) -> Result<Self> {
        u.check_compatible(v)?;
        let u = to_repr(u, Repr::Fourier)?;
        let v = to_repr(v, Repr::Fourier)?;
        Ok(Self {
            u_plus: project(&u, Sign::Plus)?,
            u_minus: project(&u, Sign::Minus)?,
            v_plus: project(&v, Sign::Minus)?,
            v_minus: project(&v, Sign::Plus)?,
            t,
        })
    }

    pub fn from_monopole(state: &MonopoleState) -> Result<Self> {
        let (u, v) = crate::monopole::to_uv(state);
        Self::from_uv(&u, &v, state.t)
    }

    pub fn zeros(grid: GridSpec, algebra: Algebra) -> Self {
        let z = PairField::zeros(grid, algebra, Repr::Fourier);
        Self {
            u_plus: z.clone(),
            u_minus: z.clone(),
            v_plus: z.clone(),
            v_minus: z,
            t: 0.0,
        }
    }

    pub fn algebra(&self) -> Algebra {
        self.u_plus.algebra()
    }

    /// `u = u_+ + u_-`, `v = v_+ + v_-` (Fourier representation).
    pub fn to_uv(&self) -> (PairField, PairField) {
        let one = Complex64::new(1.0, 0.0);
        let mut u = self.u_plus.clone();
        u.axpy(one, &self.u_minus).expect("components share a grid");
        let mut v = self.v_plus.clone();
        v.axpy(one, &self.v_minus).expect("components share a grid");
        (u, v)
    }

    pub fn to_monopole(&self) -> MonopoleState {
        let (u, v) = self.to_uv();
        from_uv(&u, &v, self.t).expect("components share a grid")
    }

    /// `sqrt(||u||_{H^s}^2 + ||v||_{H^s}^2)`.
    pub fn uv_norm(&self, s: f64) -> f64 {
        let (u, v) = self.to_uv();
        sobolev_norm(&u, s).hypot(sobolev_norm(&v, s))
    }

    /// Largest `||M_-+ w||_{L^2}` over the components `w = u_+-`, `v_-+`,
    /// ignoring the zero mode where the projections are `I/2`.
    pub fn invariance_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let checks = [
            (&self.u_plus, Sign::Minus),
            (&self.u_minus, Sign::Plus),
            (&self.v_plus, Sign::Plus),
            (&self.v_minus, Sign::Minus),
        ];
        for (field, other) in checks {
            let mut leak = project(field, other).expect("fourier state");
            for c in leak.components_mut() {
                c.data_mut()[0] = Complex64::new(0.0, 0.0);
            }
            worst = worst.max(sobolev_norm(&leak, 0.0));
        }
        worst
    }
}

/// `e^{+i tau |xi|}` on `u_+`, `v_+` and `e^{-i tau |xi|}` on `u_-`, `v_-`.
pub fn linear_propagate(state: &DiagonalState, tau: f64) -> DiagonalState {
    let grid = state.u_plus.grid();
    let phases = propagator_phases(grid, tau);
    apply_phases(state, &phases, tau)
}

fn propagator_phases(grid: GridSpec, tau: f64) -> Vec<Complex64> {
    (0..grid.points())
        .map(|i| {
            let xi = grid.freq(i);
            Complex64::from_polar(1.0, tau * xi[0].hypot(xi[1]))
        })
        .collect()
}

fn apply_phases(state: &DiagonalState, phases: &[Complex64], tau: f64) -> DiagonalState {
    let mut out = state.clone();
    for c in out.u_plus.components_mut().into_iter().chain(out.v_plus.components_mut()) {
        for (z, p) in c.data_mut().iter_mut().zip(phases) {
            *z *= p;
        }
    }
    for c in out.u_minus.components_mut().into_iter().chain(out.v_minus.components_mut()) {
        for (z, p) in c.data_mut().iter_mut().zip(phases) {
            *z *= p.conj();
        }
    }
    out.t = state.t + tau;
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum RunStatus {
    Completed,
    BlowUp { last_good_time: f64, reason: String },
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Snapshots at `t = 0`, every `snapshot_stride` steps, and the last good
    /// state.
    pub snapshots: Vec<DiagonalState>,
    /// `(t, ||(u, v)||_{H^s})` after every step, `s = blowup_norm_s`.
    pub norms: Vec<(f64, f64)>,
    pub steps_taken: usize,
    pub status: RunStatus,
}

impl Trajectory {
    pub fn last(&self) -> &DiagonalState {
        self.snapshots.last().expect("trajectory holds the initial state")
    }

    pub fn final_time(&self) -> f64 {
        self.last().t
    }

    pub fn monopole_states(&self) -> Vec<MonopoleState> {
        self.snapshots.iter().map(DiagonalState::to_monopole).collect()
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub last: DiagonalState,
    /// `(t, ||(u, v)||_{H^s})` for the initial state and every accepted step.
    pub norms: Vec<(f64, f64)>,
    pub steps_taken: usize,
    pub status: RunStatus,
}

/// Stepper owning the configuration and per-step caches.
pub struct Solver {
    config: SolverConfig,
    phase_cache: RefCell<Vec<(u64, Vec<Complex64>)>>,
}

impl Solver {
    pub fn new(config: SolverConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            phase_cache: RefCell::new(Vec::new()),
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    fn check_state(&self, state: &DiagonalState) -> Result<()> {
        if state.u_plus.grid() != self.config.grid {
            return Err(Error::GridMismatch("state does not live on the solver grid".into()));
        }
        if state.algebra() != self.config.algebra {
            return Err(Error::DimensionMismatch(format!(
                "state algebra {} differs from solver algebra {}",
                state.algebra(),
                self.config.algebra
            )));
        }
        if state.u_plus.repr() != Repr::Fourier {
            return Err(Error::Representation {
                expected: "fourier",
                found: state.u_plus.repr().name(),
            });
        }
        Ok(())
    }

    /// Free propagation with cached phase tables.
    pub fn propagate(&self, state: &DiagonalState, tau: f64) -> DiagonalState {
        if tau == 0.0 {
            return state.clone();
        }
        let key = tau.to_bits();
        let mut cache = self.phase_cache.borrow_mut();
        if let Some((_, phases)) = cache.iter().find(|(k, _)| *k == key) {
            return apply_phases(state, phases, tau);
        }
        let phases = propagator_phases(self.config.grid, tau);
        let out = apply_phases(state, &phases, tau);
        if cache.len() >= 8 {
            cache.remove(0);
        }
        cache.push((key, phases));
        out
    }

    /// Nonlinear part of the right-hand side: `(M_+ N(u,v), M_- N(u,v),
    /// M_- N(v,u), M_+ N(v,u))`.
    pub fn rhs(&self, state: &DiagonalState) -> Result<DiagonalState> {
        self.check_state(state)?;
        let grid = self.config.grid;
        let mut out = DiagonalState::zeros(grid, self.config.algebra);
        out.t = state.t;
        if self.config.algebra.is_abelian() {
            return Ok(out);
        }
        let (mut u, mut v) = state.to_uv();
        transform_in_place(&mut u, Direction::Inverse)?;
        transform_in_place(&mut v, Direction::Inverse)?;
        let mut nuv = nonlinearity_field(&u, &v)?;
        let mut nvu = nonlinearity_field(&v, &u)?;
        if !(nuv.is_finite() && nvu.is_finite()) {
            return Err(Error::NonFinite(format!("nonlinearity at t = {}", state.t)));
        }
        transform_in_place(&mut nuv, Direction::Forward)?;
        transform_in_place(&mut nvu, Direction::Forward)?;
        if self.config.dealias {
            dealias_in_place(&mut nuv)?;
            dealias_in_place(&mut nvu)?;
        }
        out.u_plus = project(&nuv, Sign::Plus)?;
        out.u_minus = project(&nuv, Sign::Minus)?;
        out.v_plus = project(&nvu, Sign::Minus)?;
        out.v_minus = project(&nvu, Sign::Plus)?;
        Ok(out)
    }

    /// One step of size `h` (may be negative).
    pub fn step(&self, state: &DiagonalState, h: f64) -> Result<DiagonalState> {
        self.check_state(state)?;
        let out = match self.config.integrator {
            Integrator::Rk4InteractionPicture => self.lawson_rk4(state, h)?,
            Integrator::Strang => {
                let half = self.propagate(state, 0.5 * h);
                let mid = self.nonlinear_rk4(&half, h)?;
                self.propagate(&mid, 0.5 * h)
            }
        };
        if !out.is_finite() {
            return Err(Error::NonFinite(format!("state after step to t = {}", state.t + h)));
        }
        Ok(out)
    }

    fn lawson_rk4(&self, y: &DiagonalState, h: f64) -> Result<DiagonalState> {
        let c = |x: f64| Complex64::new(x, 0.0);
        let k1 = self.rhs(y)?;

        let mut y2 = y.clone();
        y2.axpy(c(0.5 * h), &k1)?;
        let y2 = self.propagate(&y2, 0.5 * h);
        let k2 = self.rhs(&y2)?;

        let ey_half = self.propagate(y, 0.5 * h);
        let mut y3 = ey_half.clone();
        y3.axpy(c(0.5 * h), &k2)?;
        let k3 = self.rhs(&y3)?;

        let ey = self.propagate(y, h);
        let mut y4 = ey.clone();
        y4.axpy(c(h), &self.propagate(&k3, 0.5 * h))?;
        let k4 = self.rhs(&y4)?;

        let mut mid = k2;
        mid.axpy(c(1.0), &k3)?;
        let mut out = ey;
        out.axpy(c(h / 6.0), &self.propagate(&k1, h))?;
        out.axpy(c(h / 3.0), &self.propagate(&mid, 0.5 * h))?;
        out.axpy(c(h / 6.0), &k4)?;
        out.t = y.t + h;
        Ok(out)
    }

    /// Classical RK4 for the nonlinear part alone (Strang substep).
    fn nonlinear_rk4(&self, y: &DiagonalState, h: f64) -> Result<DiagonalState> {
        let c = |x: f64| Complex64::new(x, 0.0);
        let k1 = self.rhs(y)?;
        let mut y2 = y.clone();
        y2.axpy(c(0.5 * h), &k1)?;
        let k2 = self.rhs(&y2)?;
        let mut y3 = y.clone();
        y3.axpy(c(0.5 * h), &k2)?;
        let k3 = self.rhs(&y3)?;
        let mut y4 = y.clone();
        y4.axpy(c(h), &k3)?;
        let k4 = self.rhs(&y4)?;
        let mut out = y.clone();
        out.axpy(c(h / 6.0), &k1)?;
        out.axpy(c(h / 3.0), &k2)?;
        out.axpy(c(h / 3.0), &k3)?;
        out.axpy(c(h / 6.0), &k4)?;
        Ok(out)
    }

    /// Runs to the configured horizon, calling `observer(step, state)` on the
    /// initial state (step 0) and after every accepted step. Blow-up
    /// (non-finite values or norm growth past `blowup_factor`) ends the run
    /// early; the returned summary holds the last good state.
    pub fn run<F>(&self, initial: &DiagonalState, mut observer: F) -> Result<RunSummary>
    where
        F: FnMut(usize, &DiagonalState) -> Result<()>,
    {
        self.check_state(initial)?;
        let (steps, h) = self.config.schedule();
        let s = self.config.blowup_norm_s;
        let norm0 = initial.uv_norm(s);
        let mut state = initial.clone();
        let mut norms = vec![(initial.t, norm0)];
        let mut status = RunStatus::Completed;
        let mut taken = 0;
        observer(0, &state)?;
        for n in 1..=steps {
            let next = match self.step(&state, h) {
                Ok(next) => next,
                Err(Error::NonFinite(reason)) => {
                    status = RunStatus::BlowUp {
                        last_good_time: state.t,
                        reason: format!("non-finite values: {reason}"),
                    };
                    break;
                }
                Err(e) => return Err(e),
            };
            let norm = next.uv_norm(s);
            if norm0 > 0.0 && norm > self.config.blowup_factor * norm0 {
                status = RunStatus::BlowUp {
                    last_good_time: state.t,
                    reason: format!("H^{s} norm grew from {norm0:.6e} to {norm:.6e} at t = {:.6}", next.t),
                };
                break;
            }
            state = next;
            taken = n;
            norms.push((state.t, norm));
            observer(n, &state)?;
        }
        Ok(RunSummary {
            last: state,
            norms,
            steps_taken: taken,
            status,
        })
    }

    /// Runs to the configured horizon and keeps snapshots every
    /// `snapshot_stride` steps plus the last good state.
    pub fn evolve(&self, initial: &DiagonalState) -> Result<Trajectory> {
        let (steps, _) = self.config.schedule();
        let stride = self.config.snapshot_stride;
        let mut snapshots = Vec::new();
        let summary = self.run(initial, |n, state| {
            if n % stride == 0 || n == steps {
                snapshots.push(state.clone());
            }
            Ok(())
        })?;
        if snapshots.last().map(|s| s.t) != Some(summary.last.t) {
            snapshots.push(summary.last);
        }
        Ok(Trajectory {
            snapshots,
            norms: summary.norms,
            steps_taken: summary.steps_taken,
            status: summary.status,
        })
    }
}

/// Evolves `(u0, v0)` under `config`.
pub fn evolve(u0: &PairField, v0: &PairField, config: &SolverConfig) -> Result<Trajectory> {
    let solver = Solver::new(config.clone())?;
    solver.evolve(&DiagonalState::from_uv(u0, v0, 0.0)?)
}

/// Evolves physical data `(phi, A)` under `config`.
pub fn evolve_monopole(state: &MonopoleState, config: &SolverConfig) -> Result<Trajectory> {
    let solver = Solver::new(config.clone())?;
    solver.evolve(&DiagonalState::from_monopole(state)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExistenceRow {
    pub amplitude: f64,
    pub t_max: f64,
    pub reached_horizon: bool,
    pub reason: Option<String>,
}

/// For each amplitude, evolves rough data of regularity `s` (seeded) until the
/// horizon or the blow-up signal, and records the largest time reached.
pub fn existence_time_study(amplitudes: &[f64], s: f64, config: &SolverConfig, seed: u64) -> Result<Vec<ExistenceRow>> {
    let solver = Solver::new(config.clone())?;
    amplitudes
        .iter()
        .map(|&amplitude| {
            if !(amplitude >= 0.0) {
                return Err(Error::InvalidArgument(format!("amplitude must be nonnegative, got {amplitude}")));
            }
            let (u, v) = rough_uv(s, seed, amplitude, config)?;
            let traj = solver.evolve(&DiagonalState::from_uv(&u, &v, 0.0)?)?;
            let (t_max, reason) = match &traj.status {
                RunStatus::Completed => (traj.final_time(), None),
                RunStatus::BlowUp { last_good_time, reason } => (*last_good_time, Some(reason.clone())),
            };
            Ok(ExistenceRow {
                amplitude,
                t_max,
                reached_horizon: reason.is_none(),
                reason,
            })
        })
        .collect()
}

/// Rough `(u, v)` data, each of `H^s` size `amplitude / sqrt(2)`, so that
/// the pair has size `amplitude`.
pub fn rough_uv(s: f64, seed: u64, amplitude: f64, config: &SolverConfig) -> Result<(PairField, PairField)> {
    let each = amplitude / 2f64.sqrt();
    let u = crate::spectral::make_rough_data(s, seed, each, config.grid, config.algebra)?;
    let v = crate::spectral::make_rough_data(s, seed.wrapping_add(0x9e37_79b9), each, config.grid, config.algebra)?;
    Ok((u, v))
}
