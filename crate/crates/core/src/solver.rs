//! Simulation orchestration: configuration, initialization, the per-step
//! phase sequence and run control with convergence and blow-up monitoring.
//!
//! Phase order per step: density gradient (when the full corrections are
//! on), in-place collision at every node, boundary closures plus
//! streaming into the next buffer, buffer swap, hydrodynamic update.
//! Per-node work never reduces across nodes, so parallel runs are
//! bitwise identical to single-threaded ones.

use crate::central_moments::FrameVelocity;
use crate::collision::{
    collide_node, CollisionVariant, CorrectionMode, NodeState, RelaxationSchedule,
};
use crate::domain::{
    apply_halfway_bounce_back, apply_moving_wall, density_gradient, stream, update_hydrodynamics,
    BoundarySpec, ForceField, HydroFieldSet, PopulationField,
};
use crate::error::Error;
use crate::lattice::{
    build_lattice, raw_to_distributions, scale_raw, LatticeSpec, Q,
};
use crate::collision::raw_equilibria;
use crate::Result;
use rayon::prelude::*;
use std::time::{Duration, Instant};

/// Steps between convergence-metric samples; aligned to absolute step
/// numbers so a resumed run stops at the same step as an uninterrupted one.
pub const CONVERGENCE_WINDOW: u64 = 100;

/// Default steady-state tolerance on the windowed velocity change,
/// relative to the maximum velocity magnitude.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Velocity magnitude beyond which a run is declared unstable.
pub const BLOWUP_VELOCITY: f64 = 1.0;

/// Body force driving the flow.
#[derive(Debug, Clone, PartialEq)]
pub enum Forcing {
    None,
    Constant([f64; 3]),
    /// `F(t) = amplitude * cos(2 pi t / period)`.
    Periodic { amplitude: [f64; 3], period: f64 },
}

impl Forcing {
    pub fn at(&self, step: u64) -> [f64; 3] {
        match self {
            Forcing::None => [0.0; 3],
            Forcing::Constant(f) => *f,
            Forcing::Periodic { amplitude, period } => {
                let phase = (2.0 * std::f64::consts::PI * step as f64 / period).cos();
                [amplitude[0] * phase, amplitude[1] * phase, amplitude[2] * phase]
            }
        }
    }
}

/// A relaxation rate given either directly or through the transport
/// coefficient it controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateSpec {
    Omega(f64),
    /// Shear pairs interpret this as `nu`, bulk pairs as `xi`.
    Transport(f64),
}

/// Complete description of a simulation.
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub r: f64,
    pub s: f64,
    /// Squared sound speed; `None` selects `min(r^2, s^2) / 3`.
    pub cs2: Option<f64>,
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub shear: RateSpec,
    /// Bulk rate; `None` reuses the shear rate.
    pub bulk: Option<RateSpec>,
    pub omega_1: f64,
    pub omega_high: f64,
    pub boundary: BoundarySpec,
    pub forcing: Forcing,
    pub variant: CollisionVariant,
    pub corrections: CorrectionMode,
    pub max_steps: u64,
    /// Steady-state tolerance; `None` disables convergence stopping.
    pub convergence_tol: Option<f64>,
    /// Emit outputs every this many steps (consumed by the caller's sink).
    pub output_every: Option<u64>,
}

impl SimulationConfig {
    /// Minimal config: cuboid lattice, central variant, full corrections,
    /// fully periodic box, no forcing.
    pub fn new(r: f64, s: f64, nx: usize, ny: usize, nz: usize) -> Self {
        SimulationConfig {
            r,
            s,
            cs2: None,
            nx,
            ny,
            nz,
            shear: RateSpec::Omega(1.0),
            bulk: None,
            omega_1: 1.0,
            omega_high: 1.0,
            boundary: BoundarySpec::fully_periodic(),
            forcing: Forcing::None,
            variant: CollisionVariant::Central,
            corrections: CorrectionMode::Full,
            max_steps: 1000,
            convergence_tol: None,
            output_every: None,
        }
    }

    pub fn lattice(&self) -> Result<LatticeSpec> {
        build_lattice(self.r, self.s, self.cs2)
    }

    pub fn schedule(&self, cs2: f64) -> Result<RelaxationSchedule> {
        let omega_nu = match self.shear {
            RateSpec::Omega(w) => w,
            RateSpec::Transport(nu) => {
                if !(nu > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "shear viscosity must be positive, got {nu}"
                    )));
                }
                RelaxationSchedule::omega_for_viscosity(nu, cs2, 1.0)
            }
        };
        let omega_xi = match self.bulk {
            None => omega_nu,
            Some(RateSpec::Omega(w)) => w,
            Some(RateSpec::Transport(xi)) => {
                if !(xi > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "bulk viscosity must be positive, got {xi}"
                    )));
                }
                1.0 / (1.5 * xi / cs2 + 0.5)
            }
        };
        let sched = RelaxationSchedule {
            omega_nu,
            omega_xi,
            omega_1: self.omega_1,
            omega_high: self.omega_high,
        };
        sched.validate()?;
        Ok(sched)
    }

    pub fn validate(&self) -> Result<()> {
        let spec = self.lattice()?;
        self.schedule(spec.cs2)?;
        self.boundary.validate()?;
        if self.nx == 0 || self.ny == 0 || self.nz == 0 {
            return Err(Error::Configuration("grid extents must be positive".into()));
        }
        for (axis, extent) in [(0, self.nx), (1, self.ny), (2, self.nz)] {
            if !self.boundary.is_periodic_axis(axis) && extent < 3 {
                return Err(Error::Configuration(format!(
                    "walled axis {axis} needs at least 3 nodes for the one-sided stencils"
                )));
            }
        }
        Ok(())
    }

    /// Bytes of the population buffers plus the derived fields, as
    /// reported in run manifests: `nodes * 27 * 2 * 8` plus the
    /// hydrodynamic arrays.
    pub fn memory_estimate_bytes(&self) -> usize {
        let n = self.nx * self.ny * self.nz;
        n * Q * 2 * 8 + n * 7 * 8
    }
}

/// Velocity snapshot backing the windowed convergence metric.
#[derive(Debug, Clone)]
pub struct ConvergenceSnapshot {
    pub step: u64,
    pub ux: Vec<f64>,
    pub uy: Vec<f64>,
    pub uz: Vec<f64>,
}

/// Wall-clock spent per phase, accumulated over the run.
#[derive(Debug, Clone, Default)]
pub struct PhaseTimings {
    pub gradient: Duration,
    pub collide: Duration,
    pub stream_bc: Duration,
    pub hydro: Duration,
    pub steps: u64,
}

/// Populations, derived fields and bookkeeping of a running simulation.
#[derive(Debug, Clone)]
pub struct SimulationState {
    pub spec: LatticeSpec,
    pub sched: RelaxationSchedule,
    pub field: PopulationField,
    pub hydro: HydroFieldSet,
    pub step: u64,
    pub metric_history: Vec<(u64, f64)>,
    pub snapshot: ConvergenceSnapshot,
    pub timings: PhaseTimings,
    pub max_velocity: f64,
}

impl SimulationState {
    pub fn n_nodes(&self) -> usize {
        self.field.n_nodes()
    }

    /// Allocated bytes of the populations and derived fields.
    pub fn memory_bytes(&self) -> usize {
        self.field.bytes() + self.hydro.bytes()
    }

    /// Overwrites the populations with equilibrium values from the given
    /// per-node density and velocity, and refreshes the hydro fields.
    /// Used to impose initial conditions such as a shear wave.
    pub fn impose_equilibrium<G>(&mut self, state_of: G) -> Result<()>
    where
        G: Fn(usize, usize, usize) -> (f64, FrameVelocity),
    {
        let (nx, ny, nz) = self.field.dims();
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..nx {
                    let idx = self.field.idx(x, y, z);
                    let (rho, u) = state_of(x, y, z);
                    let m = scale_raw(&raw_equilibria(rho, u, self.spec.cs2), &self.spec, false);
                    let f = raw_to_distributions(&m);
                    for a in 0..Q {
                        self.field.dir_mut(a)[idx] = f[a];
                    }
                }
            }
        }
        update_hydrodynamics(&self.field, &self.spec, &mut self.hydro, self.step)?;
        self.refresh_monitor();
        self.snapshot = ConvergenceSnapshot {
            step: self.step,
            ux: self.hydro.ux.clone(),
            uy: self.hydro.uy.clone(),
            uz: self.hydro.uz.clone(),
        };
        Ok(())
    }

    fn refresh_monitor(&mut self) {
        self.max_velocity = max_velocity_magnitude(&self.hydro);
    }
}

fn max_velocity_magnitude(hydro: &HydroFieldSet) -> f64 {
    let n = hydro.ux.len();
    (0..n)
        .into_par_iter()
        .fold(
            || 0.0f64,
            |acc, i| {
                let m = hydro.ux[i]
                    .abs()
                    .max(hydro.uy[i].abs())
                    .max(hydro.uz[i].abs());
                if m.is_nan() {
                    f64::NAN
                } else {
                    acc.max(m)
                }
            },
        )
        .reduce(|| 0.0f64, |a, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) })
}

/// Builds the initial state: equilibrium populations at `rho = 1`,
/// `u = 0` everywhere, hydro fields consistent with them.
pub fn initialize(config: &SimulationConfig) -> Result<SimulationState> {
    config.validate()?;
    let spec = config.lattice()?;
    let sched = config.schedule(spec.cs2)?;
    let mut field = PopulationField::new(config.nx, config.ny, config.nz);
    let n = field.n_nodes();

    // f = P^-1 S^-1 F^-1(0) m_eq: at rest the frame shift is the identity
    let m = scale_raw(
        &raw_equilibria(1.0, FrameVelocity::default(), spec.cs2),
        &spec,
        false,
    );
    let f = raw_to_distributions(&m);
    for a in 0..Q {
        field.dir_mut(a).fill(f[a]);
        field.next_dir_mut(a).fill(f[a]);
    }

    let mut hydro = HydroFieldSet::new(n, ForceField::Uniform(config.forcing.at(0)));
    update_hydrodynamics(&field, &spec, &mut hydro, 0)?;
    let snapshot = ConvergenceSnapshot {
        step: 0,
        ux: hydro.ux.clone(),
        uy: hydro.uy.clone(),
        uz: hydro.uz.clone(),
    };
    let mut state = SimulationState {
        spec,
        sched,
        field,
        hydro,
        step: 0,
        metric_history: Vec::new(),
        snapshot,
        timings: PhaseTimings::default(),
        max_velocity: 0.0,
    };
    state.refresh_monitor();
    Ok(state)
}

/// Rebuilds a state from checkpointed buffers; hydro fields are derived
/// from the populations.
pub fn resume(
    config: &SimulationConfig,
    cur: Vec<f64>,
    next: Vec<f64>,
    step: u64,
    snapshot: ConvergenceSnapshot,
) -> Result<SimulationState> {
    config.validate()?;
    let spec = config.lattice()?;
    let sched = config.schedule(spec.cs2)?;
    let n = config.nx * config.ny * config.nz;
    if cur.len() != Q * n || next.len() != Q * n {
        return Err(Error::Configuration(format!(
            "checkpoint buffers have {} / {} entries, expected {}",
            cur.len(),
            next.len(),
            Q * n
        )));
    }
    let mut field = PopulationField::new(config.nx, config.ny, config.nz);
    field.current_mut().copy_from_slice(&cur);
    field.next_buffer_mut().copy_from_slice(&next);
    let mut hydro = HydroFieldSet::new(n, ForceField::Uniform(config.forcing.at(step)));
    update_hydrodynamics(&field, &spec, &mut hydro, step)?;
    let mut state = SimulationState {
        spec,
        sched,
        field,
        hydro,
        step,
        metric_history: Vec::new(),
        snapshot,
        timings: PhaseTimings::default(),
        max_velocity: 0.0,
    };
    state.refresh_monitor();
    Ok(state)
}

/// In-place parallel collision over the current buffer. Workers own
/// disjoint node ranges, so the strided writes into the 27 direction
/// planes never alias.
fn collide_all(
    field: &mut PopulationField,
    hydro: &HydroFieldSet,
    spec: &LatticeSpec,
    sched: &RelaxationSchedule,
    variant: CollisionVariant,
    mode: CorrectionMode,
) -> Result<()> {
    let n = field.n_nodes();
    let cur = field.current_mut();

    #[derive(Clone, Copy)]
    struct BufPtr(*mut f64);
    unsafe impl Sync for BufPtr {}
    unsafe impl Send for BufPtr {}
    impl BufPtr {
        fn get(&self) -> *mut f64 {
            self.0
        }
    }
    let buf = BufPtr(cur.as_mut_ptr());

    let chunk = 4096.min(n.max(1));
    let n_chunks = n.div_ceil(chunk);
    (0..n_chunks).into_par_iter().try_for_each(move |c| -> Result<()> {
        let lo = c * chunk;
        let hi = ((c + 1) * chunk).min(n);
        let p = buf.get();
        for idx in lo..hi {
            let mut f = [0.0; Q];
            for a in 0..Q {
                // SAFETY: every worker touches only indices a*n + idx with
                // idx inside its own chunk; chunks are disjoint.
                f[a] = unsafe { *p.add(a * n + idx) };
            }
            let node = NodeState {
                rho: hydro.rho[idx],
                u: FrameVelocity::new(hydro.ux[idx], hydro.uy[idx], hydro.uz[idx]),
                grad_rho: [
                    hydro.grad_rho_x[idx],
                    hydro.grad_rho_y[idx],
                    hydro.grad_rho_z[idx],
                ],
                force: hydro.force.at(idx),
            };
            let post = collide_node(&f, &node, sched, spec, variant, mode, 1.0)?;
            for a in 0..Q {
                unsafe { *p.add(a * n + idx) = post[a] };
            }
        }
        Ok(())
    })
}

/// Advances the state by one full step.
pub fn step(state: &mut SimulationState, config: &SimulationConfig) -> Result<()> {
    let t = state.step;

    if matches!(config.corrections, CorrectionMode::Full) {
        let start = Instant::now();
        let (rho, gx, gy, gz) = (
            &state.hydro.rho,
            &mut state.hydro.grad_rho_x,
            &mut state.hydro.grad_rho_y,
            &mut state.hydro.grad_rho_z,
        );
        density_gradient(
            rho,
            state.field.dims(),
            &state.spec,
            &config.boundary,
            gx,
            gy,
            gz,
        );
        state.timings.gradient += start.elapsed();
    }

    let start = Instant::now();
    collide_all(
        &mut state.field,
        &state.hydro,
        &state.spec,
        &state.sched,
        config.variant,
        config.corrections,
    )?;
    state.timings.collide += start.elapsed();

    let start = Instant::now();
    stream(&mut state.field, &config.boundary);
    apply_halfway_bounce_back(&mut state.field, &config.boundary);
    if let Some(u_lid) = config.boundary.has_moving_lid() {
        apply_moving_wall(&mut state.field, &state.hydro.rho, u_lid, &state.spec);
    }
    state.field.swap_buffers();
    state.timings.stream_bc += start.elapsed();

    let start = Instant::now();
    state.hydro.force = ForceField::Uniform(config.forcing.at(t + 1));
    update_hydrodynamics(&state.field, &state.spec, &mut state.hydro, t + 1)?;
    state.step = t + 1;
    state.timings.steps += 1;
    state.refresh_monitor();
    state.timings.hydro += start.elapsed();
    Ok(())
}

/// Why a run ended.
#[derive(Debug, Clone, PartialEq)]
pub enum RunOutcome {
    Converged { step: u64 },
    MaxStepsReached,
    /// Any NaN, non-positive density or velocity magnitude above
    /// [`BLOWUP_VELOCITY`]; reported, not raised.
    BlowUp { step: u64 },
}

/// Final state plus the convergence series and the verdict.
#[derive(Debug)]
pub struct RunReport {
    pub outcome: RunOutcome,
    pub state: SimulationState,
}

impl RunReport {
    pub fn blew_up(&self) -> bool {
        matches!(self.outcome, RunOutcome::BlowUp { .. })
    }
}

/// Runs to completion from a fresh initial state.
pub fn run(config: &SimulationConfig) -> Result<RunReport> {
    let state = initialize(config)?;
    run_state(state, config, |_| {})
}

/// Runs an existing state to completion, invoking `sink` at the output
/// cadence and after the final step.
pub fn run_state<F>(
    mut state: SimulationState,
    config: &SimulationConfig,
    mut sink: F,
) -> Result<RunReport>
where
    F: FnMut(&SimulationState),
{
    let tol = config.convergence_tol;
    loop {
        if state.step >= config.max_steps {
            return Ok(RunReport {
                outcome: RunOutcome::MaxStepsReached,
                state,
            });
        }
        match step(&mut state, config) {
            Ok(()) => {}
            Err(Error::NonPositiveDensity { step, .. }) => {
                return Ok(RunReport {
                    outcome: RunOutcome::BlowUp { step },
                    state,
                });
            }
            Err(e) => return Err(e),
        }

        if state.max_velocity.is_nan() || state.max_velocity > BLOWUP_VELOCITY {
            let at = state.step;
            return Ok(RunReport {
                outcome: RunOutcome::BlowUp { step: at },
                state,
            });
        }

        if state.step % CONVERGENCE_WINDOW == 0 {
            let metric = windowed_change(&state);
            state.metric_history.push((state.step, metric));
            state.snapshot = ConvergenceSnapshot {
                step: state.step,
                ux: state.hydro.ux.clone(),
                uy: state.hydro.uy.clone(),
                uz: state.hydro.uz.clone(),
            };
            if let Some(tol) = tol {
                if metric < tol {
                    let at = state.step;
                    sink(&state);
                    return Ok(RunReport {
                        outcome: RunOutcome::Converged { step: at },
                        state,
                    });
                }
            }
        }

        if let Some(every) = config.output_every {
            if every > 0 && state.step % every == 0 {
                sink(&state);
            }
        }
    }
}

/// Max-norm velocity change since the last window snapshot, relative to
/// the maximum velocity magnitude.
fn windowed_change(state: &SimulationState) -> f64 {
    let snap = &state.snapshot;
    let n = state.hydro.ux.len();
    let change = (0..n)
        .into_par_iter()
        .fold(
            || 0.0f64,
            |acc, i| {
                let d = (state.hydro.ux[i] - snap.ux[i])
                    .abs()
                    .max((state.hydro.uy[i] - snap.uy[i]).abs())
                    .max((state.hydro.uz[i] - snap.uz[i]).abs());
                acc.max(d)
            },
        )
        .reduce(|| 0.0f64, f64::max);
    change / state.max_velocity.max(f64::MIN_POSITIVE)
}
