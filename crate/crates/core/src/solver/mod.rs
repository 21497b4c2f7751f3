//! Method-of-lines integration: implicit time stepping with step-doubling
//! error control, conservation ledger, steady states and polarization sweeps.

mod steady;
mod system;

pub use steady::{PolarizationRow, SteadyResult};
pub use system::{Inventory, InventoryFlows, System};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cell::{CellDefinition, Field, Mesh1D, StateVector};
use crate::error::{Error, Result};
use crate::polarization::VoltageReport;
use crate::transport::Evaluation;

/// Step size and tolerance settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// First step size, s.
    pub dt_init: f64,
    /// Smallest admissible step size, s.
    pub dt_min: f64,
    /// Largest admissible step size, s.
    pub dt_max: f64,
    /// Relative Newton update tolerance.
    pub newton_tol: f64,
    /// Newton iterations per implicit solve.
    pub newton_max_iter: usize,
    /// Relative local time error tolerance.
    pub time_error_tol: f64,
    /// Scaled steady residual tolerance.
    pub steady_residual_tol: f64,
    /// Step budget of one transient run.
    pub max_steps: usize,
    /// Distance kept between the saturation and one.
    pub s_clip: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt_init: 1e-4,
            dt_min: 1e-12,
            dt_max: 1.0,
            newton_tol: 1e-8,
            newton_max_iter: 20,
            time_error_tol: 1e-5,
            steady_residual_tol: 1e-9,
            max_steps: 200_000,
            s_clip: 1e-9,
        }
    }
}

impl SolverConfig {
    /// Checks the step size ordering and tolerance signs.
    pub fn validate(&self) -> Result<()> {
        let ok_dt = self.dt_min > 0.0 && self.dt_min <= self.dt_init && self.dt_init <= self.dt_max;
        if !ok_dt {
            return Err(Error::Validation(
                "solver: 0 < dt_min <= dt_init <= dt_max".to_string(),
            ));
        }
        if !(self.newton_tol > 0.0 && self.time_error_tol > 0.0 && self.steady_residual_tol > 0.0) {
            return Err(Error::Validation("solver tolerances > 0".to_string()));
        }
        if self.newton_max_iter == 0 || self.max_steps == 0 {
            return Err(Error::Validation(
                "solver.newton_max_iter > 0 and solver.max_steps > 0".to_string(),
            ));
        }
        if !(self.s_clip > 0.0 && self.s_clip < 0.5) {
            return Err(Error::Validation("solver.s_clip in (0, 0.5)".to_string()));
        }
        Ok(())
    }
}

/// Piecewise-constant current density, as `(start time s, A·m⁻²)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurrentProfile {
    /// Segments sorted by start time; the first starts at zero.
    pub segments: Vec<(f64, f64)>,
}

impl CurrentProfile {
    /// Constant current density.
    pub fn constant(i_fc: f64) -> Self {
        Self {
            segments: vec![(0.0, i_fc)],
        }
    }

    /// Current `before` until `t_step`, then `after`.
    pub fn step(before: f64, t_step: f64, after: f64) -> Self {
        Self {
            segments: vec![(0.0, before), (t_step, after)],
        }
    }

    /// Checks ordering and signs.
    pub fn validate(&self) -> Result<()> {
        if self.segments.first().map(|s| s.0) != Some(0.0) {
            return Err(Error::Validation(
                "run.profile starts at t = 0".to_string(),
            ));
        }
        if self.segments.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Validation(
                "run.profile start times strictly increasing".to_string(),
            ));
        }
        if self.segments.iter().any(|s| !(s.1 >= 0.0)) {
            return Err(Error::Validation("run.profile currents >= 0".to_string()));
        }
        Ok(())
    }

    /// Current density on `[t, next breakpoint)`.
    pub fn at(&self, t: f64) -> f64 {
        self.segments
            .iter()
            .rev()
            .find(|s| s.0 <= t)
            .map(|s| s.1)
            .unwrap_or(self.segments[0].1)
    }

    /// Start times after zero.
    pub fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.segments.iter().skip(1).map(|s| s.0)
    }
}

/// Cumulative conservation ledger at one output time, mol·m⁻².
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct LedgerRow {
    /// Time, s.
    pub t: f64,
    /// Water entering.
    pub water_in: f64,
    /// Water leaving.
    pub water_out: f64,
    /// Water produced.
    pub water_produced: f64,
    /// Water added by clipping.
    pub water_clipped: f64,
    /// Change of stored water since the start.
    pub water_stored_delta: f64,
    /// Hydrogen entering.
    pub h2_in: f64,
    /// Hydrogen leaving.
    pub h2_out: f64,
    /// Hydrogen consumed.
    pub h2_consumed: f64,
    /// Hydrogen added by clipping.
    pub h2_clipped: f64,
    /// Change of stored hydrogen since the start.
    pub h2_stored_delta: f64,
    /// Oxygen entering.
    pub o2_in: f64,
    /// Oxygen leaving.
    pub o2_out: f64,
    /// Oxygen consumed.
    pub o2_consumed: f64,
    /// Oxygen added by clipping.
    pub o2_clipped: f64,
    /// Change of stored oxygen since the start.
    pub o2_stored_delta: f64,
}

impl LedgerRow {
    /// Water closure error `stored_delta − in + out − produced − clipped`.
    pub fn water_closure(&self) -> f64 {
        self.water_stored_delta - self.water_in + self.water_out - self.water_produced - self.water_clipped
    }

    /// Hydrogen closure error.
    pub fn h2_closure(&self) -> f64 {
        self.h2_stored_delta - self.h2_in + self.h2_out + self.h2_consumed - self.h2_clipped
    }

    /// Oxygen closure error.
    pub fn o2_closure(&self) -> f64 {
        self.o2_stored_delta - self.o2_in + self.o2_out + self.o2_consumed - self.o2_clipped
    }

    /// Water closure relative to the water supplied and produced.
    pub fn water_relative_closure(&self) -> f64 {
        self.water_closure().abs() / (self.water_in + self.water_produced).max(f64::MIN_POSITIVE)
    }

    /// Hydrogen closure relative to the hydrogen supplied.
    pub fn h2_relative_closure(&self) -> f64 {
        self.h2_closure().abs() / self.h2_in.max(f64::MIN_POSITIVE)
    }

    /// Oxygen closure relative to the oxygen supplied.
    pub fn o2_relative_closure(&self) -> f64 {
        self.o2_closure().abs() / self.o2_in.max(f64::MIN_POSITIVE)
    }

    fn accumulate(&mut self, fl: &InventoryFlows, dt: f64) {
        self.water_in += dt * fl.water_in;
        self.water_out += dt * fl.water_out;
        self.water_produced += dt * fl.water_produced;
        self.h2_in += dt * fl.h2_in;
        self.h2_out += dt * fl.h2_out;
        self.h2_consumed += dt * fl.h2_consumed;
        self.o2_in += dt * fl.o2_in;
        self.o2_out += dt * fl.o2_out;
        self.o2_consumed += dt * fl.o2_consumed;
    }
}

/// Counters of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SolverStats {
    /// Accepted steps.
    pub steps: usize,
    /// Rejected steps.
    pub rejected: usize,
    /// Newton iterations.
    pub newton_iterations: usize,
    /// Jacobian evaluations.
    pub jacobians: usize,
}

/// Output of a transient run.
#[derive(Debug, Clone)]
pub struct TransientResult {
    /// Output times, s.
    pub times: Vec<f64>,
    /// Current density applied just before each output time, A·m⁻².
    pub currents: Vec<f64>,
    /// State at each output time.
    pub states: Vec<StateVector>,
    /// Voltage breakdown at each output time.
    pub voltages: Vec<VoltageReport>,
    /// Conservation ledger at each output time.
    pub ledger: Vec<LedgerRow>,
    /// Counters.
    pub stats: SolverStats,
}

/// Outcome of the explicit Euler reference integration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitOutcome {
    /// Steps completed before stopping.
    pub steps: usize,
    /// Time reached, s.
    pub t: f64,
    /// Reason for divergence, if any.
    pub divergence: Option<String>,
}

#[derive(Debug, Default)]
struct JacobianCache {
    jac: Option<DMatrix<f64>>,
    i_fc: f64,
}

/// Implicit integrator bound to one cell and mesh.
#[derive(Debug, Clone)]
pub struct Integrator {
    /// Discretised system.
    pub system: System,
    /// Settings.
    pub config: SolverConfig,
}

struct NewtonOutcome {
    x: Vec<f64>,
    eval: Evaluation,
}

impl Integrator {
    /// Builds the integrator for `cell` on `mesh`.
    pub fn new(cell: &CellDefinition, mesh: &Mesh1D, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            system: System::new(cell, mesh)?,
            config,
        })
    }

    /// Flattens a state.
    pub fn pack(&self, st: &StateVector) -> Result<Vec<f64>> {
        st.pack(self.system.layout())
    }

    /// Rebuilds a state from a flat vector.
    pub fn unpack(&self, x: &[f64]) -> Result<StateVector> {
        StateVector::unpack(x, self.system.layout())
    }

    /// Time derivative of a state at current density `i_fc`.
    pub fn rhs(&self, st: &StateVector, i_fc: f64) -> Result<StateVector> {
        let x = self.pack(st)?;
        let d = self.system.rhs(&x, i_fc)?;
        self.unpack(&d)
    }

    fn scaled_residual(&self, x: &[f64], q_n: &[f64], r: &[f64], dt: f64, weights: &[f64]) -> Vec<f64> {
        let q = self.system.storage(x);
        (0..x.len())
            .map(|i| (q[i] - q_n[i] - dt * r[i]) * weights[i])
            .collect()
    }

    fn refresh_jacobian(&self, cache: &mut JacobianCache, x: &[f64], i_fc: f64, stats: &mut SolverStats) -> Result<()> {
        cache.jac = Some(self.system.rates_jacobian(x, i_fc)?);
        cache.i_fc = i_fc;
        stats.jacobians += 1;
        Ok(())
    }

    /// Row weights `1 / (storage + dt·|∂r_i/∂x_i|)`, which turn residual rows
    /// into approximate state increments whether storage or transport
    /// dominates the row.
    fn row_weights(&self, jac: &DMatrix<f64>, dt: f64) -> Vec<f64> {
        self.system
            .row_scale()
            .iter()
            .enumerate()
            .map(|(i, s)| 1.0 / (s + dt * jac[(i, i)].abs()))
            .collect()
    }

    /// Solves `q(x) − q(x_n) − dt·r(x) = 0` by damped Newton iteration.
    fn newton(
        &self,
        x_n: &[f64],
        i_fc: f64,
        dt: f64,
        cache: &mut JacobianCache,
        stats: &mut SolverStats,
    ) -> Result<NewtonOutcome> {
        let sys = &self.system;
        let n = x_n.len();
        let tol = self.config.newton_tol;
        let q_n = sys.storage(x_n);
        let mut x = x_n.to_vec();
        let (mut r, mut ev) = sys.rates(&x, i_fc)?;
        let mut fresh = false;
        if cache.jac.is_none() || cache.i_fc != i_fc {
            self.refresh_jacobian(cache, &x, i_fc, stats)?;
            fresh = true;
        }
        let mut weights = self.row_weights(cache.jac.as_ref().expect("jacobian present"), dt);
        let mut g = self.scaled_residual(&x, &q_n, &r, dt, &weights);
        let mut g_norm = sys.weighted_norm(&g, &x);
        let mut merit = sys.weighted_rms(&g, &x);
        if g_norm < 1e-2 * tol {
            return Ok(NewtonOutcome { x, eval: ev });
        }
        for _ in 0..self.config.newton_max_iter {
            stats.newton_iterations += 1;
            let jac = cache.jac.as_ref().expect("jacobian present");
            let mut m = sys.storage_jacobian(&x) - jac * dt;
            for i in 0..n {
                let w = weights[i];
                for j in 0..n {
                    m[(i, j)] *= w;
                }
            }
            let rhs = nalgebra::DVector::from_iterator(n, g.iter().map(|v| -v));
            let delta = match m.lu().solve(&rhs) {
                Some(d) => d,
                None => {
                    if fresh {
                        return Err(Error::Numerical("singular Newton matrix".to_string()));
                    }
                    self.refresh_jacobian(cache, &x, i_fc, stats)?;
                    fresh = true;
                    continue;
                }
            };
            let alpha_min = if fresh { 1.0 / 1024.0 } else { 1.0 / 16.0 };
            let mut alpha = 1.0;
            let (x_new, r_new, ev_new, g_new, merit_new, decreased) = loop {
                let x_try: Vec<f64> = (0..n).map(|i| x[i] + alpha * delta[i]).collect();
                match sys.rates(&x_try, i_fc) {
                    Ok((r_try, ev_try)) => {
                        let g_try = self.scaled_residual(&x_try, &q_n, &r_try, dt, &weights);
                        let m = sys.weighted_rms(&g_try, &x_try);
                        let decreased = m <= (1.0 - 1e-4 * alpha) * merit;
                        if decreased || alpha <= alpha_min {
                            break (x_try, r_try, ev_try, g_try, m, decreased);
                        }
                    }
                    Err(e) => {
                        if alpha <= alpha_min {
                            return Err(e);
                        }
                    }
                }
                alpha *= 0.5;
            };
            if !decreased && fresh {
                cache.jac = None;
                return Err(Error::Numerical(format!(
                    "Newton direction does not reduce the residual (scaled residual {g_norm:.3e})"
                )));
            }
            let step_norm = alpha * sys.weighted_norm(delta.as_slice(), &x_new);
            let slow = !decreased || merit_new > 0.5 * merit;
            x = x_new;
            r = r_new;
            ev = ev_new;
            g = g_new;
            g_norm = sys.weighted_norm(&g, &x);
            merit = merit_new;
            log::trace!("Newton dt = {dt:.3e}: alpha = {alpha}, residual = {g_norm:.3e}, step = {step_norm:.3e}");
            if step_norm < tol || g_norm < 1e-2 * tol {
                return Ok(NewtonOutcome { x, eval: ev });
            }
            if slow && !fresh {
                self.refresh_jacobian(cache, &x, i_fc, stats)?;
                fresh = true;
                weights = self.row_weights(cache.jac.as_ref().expect("jacobian present"), dt);
                g = self.scaled_residual(&x, &q_n, &r, dt, &weights);
                g_norm = sys.weighted_norm(&g, &x);
                merit = sys.weighted_rms(&g, &x);
            } else {
                fresh = false;
            }
        }
        cache.jac = None;
        Err(Error::Numerical(format!(
            "Newton iteration did not converge (scaled residual {g_norm:.3e})"
        )))
    }

    /// One implicit Euler step of size `dt` at current density `i_fc`.
    pub fn implicit_euler_step(&self, x: &[f64], i_fc: f64, dt: f64) -> Result<Vec<f64>> {
        let mut cache = JacobianCache::default();
        let mut stats = SolverStats::default();
        Ok(self.newton(x, i_fc, dt, &mut cache, &mut stats)?.x)
    }

    /// Integrates from `state0` under `profile` until `t_end`, recording the
    /// state every `output_interval` seconds and at `t_end`.
    pub fn run_transient(
        &self,
        state0: &StateVector,
        profile: &CurrentProfile,
        t_end: f64,
        output_interval: f64,
    ) -> Result<TransientResult> {
        profile.validate()?;
        if !(t_end > 0.0) || !(output_interval > 0.0) {
            return Err(Error::Validation(
                "run.t_end > 0 and output.interval > 0".to_string(),
            ));
        }
        let cfg = &self.config;
        let sys = &self.system;
        let mut x = self.pack(state0)?;
        let inv0 = sys.inventory(&x);

        let mut outputs = Vec::new();
        let mut k = 1usize;
        while (k as f64) * output_interval < t_end * (1.0 - 1e-12) {
            outputs.push(k as f64 * output_interval);
            k += 1;
        }
        outputs.push(t_end);
        let mut stops: Vec<(f64, bool)> = outputs.iter().map(|&t| (t, true)).collect();
        for b in profile.breakpoints() {
            if b < t_end {
                stops.push((b, false));
            }
        }
        stops.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
        stops.dedup_by(|a, b| {
            if (a.0 - b.0).abs() <= 1e-12 * b.0.abs().max(1.0) {
                b.1 |= a.1;
                true
            } else {
                false
            }
        });

        let mut result = TransientResult {
            times: Vec::new(),
            currents: Vec::new(),
            states: Vec::new(),
            voltages: Vec::new(),
            ledger: Vec::new(),
            stats: SolverStats::default(),
        };
        let mut ledger = LedgerRow::default();
        let mut clipped = Inventory::default();
        let record = |x: &[f64], t: f64, i_fc: f64, ledger: &LedgerRow, clipped: &Inventory, res: &mut TransientResult| -> Result<()> {
            let st = self.unpack(x)?;
            let v = sys.model.voltage(&st, i_fc)?;
            let inv = sys.inventory(x);
            let mut row = *ledger;
            row.t = t;
            row.water_clipped = clipped.water;
            row.h2_clipped = clipped.h2;
            row.o2_clipped = clipped.o2;
            row.water_stored_delta = inv.water - inv0.water;
            row.h2_stored_delta = inv.h2 - inv0.h2;
            row.o2_stored_delta = inv.o2 - inv0.o2;
            res.times.push(t);
            res.currents.push(i_fc);
            res.states.push(st);
            res.voltages.push(v);
            res.ledger.push(row);
            Ok(())
        };
        record(&x, 0.0, profile.at(0.0), &ledger, &clipped, &mut result)?;

        let mut cache = JacobianCache::default();
        let mut stats = SolverStats::default();
        let mut t = 0.0;
        let mut dt = cfg.dt_init;
        for (stop, is_output) in stops {
            let i_fc = profile.at(t);
            while stop - t > 1e-12 * stop.max(1.0) {
                if stats.steps + stats.rejected >= cfg.max_steps {
                    return Err(Error::Numerical(format!(
                        "step budget of {} exhausted at t = {t:.6e} s",
                        cfg.max_steps
                    )));
                }
                let mut h = dt.min(cfg.dt_max);
                let truncated = h >= stop - t;
                if truncated {
                    h = stop - t;
                }
                let attempt = (|| -> Result<(NewtonOutcome, NewtonOutcome, f64)> {
                    let full = self.newton(&x, i_fc, h, &mut cache, &mut stats)?;
                    let half = self.newton(&x, i_fc, 0.5 * h, &mut cache, &mut stats)?;
                    let second = self.newton(&half.x, i_fc, 0.5 * h, &mut cache, &mut stats)?;
                    let diff: Vec<f64> = second.x.iter().zip(&full.x).map(|(a, b)| a - b).collect();
                    let err = sys.weighted_norm(&diff, &second.x) / cfg.time_error_tol;
                    Ok((half, second, err))
                })();
                match attempt {
                    Ok((half, second, err)) if err <= 1.0 || h <= cfg.dt_min => {
                        ledger.accumulate(&sys.inventory_flows(&half.eval), 0.5 * h);
                        ledger.accumulate(&sys.inventory_flows(&second.eval), 0.5 * h);
                        x = second.x;
                        let added = sys.clip(&mut x, cfg.s_clip);
                        clipped.water += added.water;
                        clipped.h2 += added.h2;
                        clipped.o2 += added.o2;
                        t = if truncated { stop } else { t + h };
                        stats.steps += 1;
                        let factor = (0.9 / err.max(1e-10).sqrt()).clamp(0.2, 2.0);
                        let proposal = (h * factor).clamp(cfg.dt_min, cfg.dt_max);
                        dt = if truncated { proposal.max(dt) } else { proposal };
                    }
                    Ok((_, _, err)) => {
                        stats.rejected += 1;
                        let factor = (0.9 / err.sqrt()).clamp(0.2, 0.9);
                        dt = (h * factor).max(cfg.dt_min);
                    }
                    Err(e) => {
                        stats.rejected += 1;
                        cache.jac = None;
                        if h <= cfg.dt_min {
                            return Err(match e {
                                Error::Numerical(m) => Error::Numerical(format!(
                                    "{m}; step size at its minimum at t = {t:.6e} s"
                                )),
                                other => other,
                            });
                        }
                        dt = (0.25 * h).max(cfg.dt_min);
                    }
                }
            }
            if is_output {
                record(&x, stop, i_fc, &ledger, &clipped, &mut result)?;
            } else {
                dt = dt.min(cfg.dt_init.max(cfg.dt_min));
            }
        }
        result.stats = stats;
        Ok(result)
    }

    /// Explicit Euler reference: integrates at fixed `dt` and stops at the
    /// first inadmissible or non-finite state.
    pub fn explicit_euler(&self, state0: &StateVector, i_fc: f64, dt: f64, t_end: f64) -> Result<ExplicitOutcome> {
        let sys = &self.system;
        let l = sys.layout().clone();
        let mut x = self.pack(state0)?;
        let n_steps = (t_end / dt).round() as usize;
        for step in 0..n_steps {
            let d = match sys.rhs(&x, i_fc) {
                Ok(d) => d,
                Err(e) => {
                    return Ok(ExplicitOutcome {
                        steps: step,
                        t: step as f64 * dt,
                        divergence: Some(e.to_string()),
                    })
                }
            };
            for i in 0..x.len() {
                x[i] += dt * d[i];
            }
            let bad = x.iter().enumerate().find_map(|(i, &v)| {
                if !v.is_finite() {
                    Some(format!("non-finite value at {}", l.label(i)))
                } else if v < 0.0 {
                    let kind = if l.field(i) == Field::Saturation {
                        "negative saturation"
                    } else {
                        "negative value"
                    };
                    Some(format!("{kind} at {}", l.label(i)))
                } else {
                    None
                }
            });
            if let Some(reason) = bad {
                return Ok(ExplicitOutcome {
                    steps: step + 1,
                    t: (step + 1) as f64 * dt,
                    divergence: Some(reason),
                });
            }
        }
        Ok(ExplicitOutcome {
            steps: n_steps,
            t: n_steps as f64 * dt,
            divergence: None,
        })
    }
}
