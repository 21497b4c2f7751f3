//! Steady states by Newton iteration with a pseudo-transient fallback, and
//! polarization sweeps built on them.

use serde::Serialize;

use super::{Integrator, JacobianCache, SolverStats};
use crate::cell::StateVector;
use crate::error::{Error, Result};
use crate::polarization::VoltageReport;

/// Converged steady state.
#[derive(Debug, Clone)]
pub struct SteadyResult {
    /// Current density, A·m⁻².
    pub i_fc: f64,
    /// Steady state.
    pub state: StateVector,
    /// Voltage breakdown at the steady state.
    pub voltage: VoltageReport,
    /// Final scaled residual.
    pub residual: f64,
    /// Newton iterations of the final direct phase.
    pub newton_iterations: usize,
    /// Pseudo-time steps taken.
    pub pseudo_steps: usize,
}

/// One row of a polarization sweep.
#[derive(Debug, Clone, Serialize)]
pub struct PolarizationRow {
    /// Current density, A·m⁻².
    pub i_fc: f64,
    /// Voltage breakdown (default values when infeasible).
    pub voltage: VoltageReport,
    /// True when a steady state was found.
    pub feasible: bool,
    /// Final scaled residual.
    pub residual: f64,
    /// Pseudo-time steps taken.
    pub pseudo_steps: usize,
    /// Failure message when infeasible.
    pub message: String,
}

const DIRECT_MAX_ITER: usize = 40;
const DIRECT_STALL_LIMIT: usize = 3;
const PSEUDO_MAX_STEPS: usize = 5000;
const PSEUDO_DT_INIT: f64 = 1e-3;
const PSEUDO_DT_MAX: f64 = 1e6;
const DIRECT_SWITCH: f64 = 1e-3;
const PSEUDO_GROWTH_MIN: f64 = 2.0;
const STARVATION_FLOOR: f64 = 1e-9;

impl Integrator {
    /// Scaled steady residual of a flat state.
    pub fn steady_residual(&self, x: &[f64], i_fc: f64) -> Result<f64> {
        let (r, _) = self.system.rates(x, i_fc)?;
        Ok(self.system.steady_residual(&r, i_fc))
    }

    /// Direct Newton iteration on `r(x) = 0` with a fresh Jacobian at every
    /// iteration. Rows are weighted by the inverse Jacobian diagonal and the
    /// line search works on the weighted root-mean-square residual.
    fn direct_newton(&self, x0: &[f64], i_fc: f64, stats: &mut SolverStats) -> Result<(Vec<f64>, f64, usize)> {
        let sys = &self.system;
        let n = x0.len();
        let tol = self.config.steady_residual_tol;
        let mut x = x0.to_vec();
        let (mut r, _) = sys.rates(&x, i_fc)?;
        let mut res = sys.steady_residual(&r, i_fc);
        let mut iters = 0;
        let mut stalled = 0;
        while res >= tol {
            if iters >= DIRECT_MAX_ITER || stalled >= DIRECT_STALL_LIMIT {
                return Err(Error::Numerical(format!(
                    "steady Newton iteration stalled (residual {res:.3e})"
                )));
            }
            iters += 1;
            stats.newton_iterations += 1;
            stats.jacobians += 1;
            log::debug!("steady Newton {iters}: residual = {res:.3e}");
            let mut jac = sys.rates_jacobian(&x, i_fc)?;
            let weights: Vec<f64> = (0..n).map(|i| 1.0 / jac[(i, i)].abs().max(f64::MIN_POSITIVE)).collect();
            for i in 0..n {
                for j in 0..n {
                    jac[(i, j)] *= weights[i];
                }
            }
            let weighted = |r: &[f64]| -> Vec<f64> { r.iter().zip(&weights).map(|(a, w)| a * w).collect() };
            let g = weighted(&r);
            let merit = sys.weighted_rms(&g, &x);
            let rhs = nalgebra::DVector::from_iterator(n, g.iter().map(|v| -v));
            let delta = jac
                .lu()
                .solve(&rhs)
                .ok_or_else(|| Error::Numerical("singular steady Jacobian".to_string()))?;
            let mut alpha = 1.0;
            loop {
                let mut x_try: Vec<f64> = (0..n).map(|i| x[i] + alpha * delta[i]).collect();
                sys.clip(&mut x_try, self.config.s_clip);
                {
                    if let Ok((r_try, _)) = sys.rates(&x_try, i_fc) {
                        let m = sys.weighted_rms(&weighted(&r_try), &x_try);
                        if m < (1.0 - 1e-4 * alpha) * merit {
                            stalled = if m > 0.9 * merit { stalled + 1 } else { 0 };
                            x = x_try;
                            res = sys.steady_residual(&r_try, i_fc);
                            r = r_try;
                            break;
                        }
                    }
                }
                alpha *= 0.5;
                if alpha < 1e-4 {
                    return Err(Error::Numerical(format!(
                        "steady Newton line search failed (residual {res:.3e})"
                    )));
                }
            }
        }
        Ok((x, res, iters))
    }

    fn check_starvation(&self, x: &[f64]) -> Result<()> {
        let l = self.system.layout();
        let mesh = &self.system.model.mesh;
        let acl = mesh.range(crate::cell::Region::Acl);
        let ccl = mesh.range(crate::cell::Region::Ccl);
        let h2_min = acl.map(|c| x[l.h2(c)]).fold(f64::INFINITY, f64::min);
        let o2_min = ccl.map(|c| x[l.o2(c - l.ccl_start)]).fold(f64::INFINITY, f64::min);
        if h2_min <= STARVATION_FLOOR || o2_min <= STARVATION_FLOOR {
            return Err(Error::Infeasible(format!(
                "catalyst layer starved (min C_H2 = {h2_min:.3e}, min C_O2 = {o2_min:.3e} mol/m3)"
            )));
        }
        Ok(())
    }

    /// Steady state at current density `i_fc` starting from `guess`.
    pub fn solve_steady(&self, guess: &StateVector, i_fc: f64) -> Result<SteadyResult> {
        if !(i_fc >= 0.0) {
            return Err(Error::Validation("steady current density >= 0".to_string()));
        }
        let mut stats = SolverStats::default();
        let x0 = self.pack(guess)?;
        if let Ok((x, res, iters)) = self.direct_newton(&x0, i_fc, &mut stats) {
            self.check_starvation(&x)?;
            return self.finish(x, i_fc, res, iters, 0);
        }

        let sys = &self.system;
        let tol = self.config.steady_residual_tol;
        let mut x = x0;
        let mut cache = JacobianCache::default();
        let mut dt = PSEUDO_DT_INIT;
        let mut res_prev = self.steady_residual(&x, i_fc)?;
        let mut last_err: Option<Error> = None;
        for step in 1..=PSEUDO_MAX_STEPS {
            match self.newton(&x, i_fc, dt, &mut cache, &mut stats) {
                Ok(out) => {
                    x = out.x;
                    sys.clip(&mut x, self.config.s_clip);
                    self.check_starvation(&x)?;
                    let res = self.steady_residual(&x, i_fc)?;
                    log::debug!("pseudo step {step}: dt = {dt:.3e}, residual = {res:.3e}");
                    if res < tol {
                        return self.finish(x, i_fc, res, 0, step);
                    }
                    if res < DIRECT_SWITCH {
                        match self.direct_newton(&x, i_fc, &mut stats) {
                            Ok((xd, res_d, iters)) => {
                                self.check_starvation(&xd)?;
                                return self.finish(xd, i_fc, res_d, iters, step);
                            }
                            Err(e) => log::debug!("direct Newton after pseudo step {step} failed: {e}"),
                        }
                    }
                    let growth = (res_prev / res).clamp(PSEUDO_GROWTH_MIN, 10.0);
                    dt = (dt * growth).min(PSEUDO_DT_MAX);
                    res_prev = res;
                }
                Err(e) => {
                    log::debug!("pseudo step {step} failed at dt = {dt:.3e}: {e}");
                    cache.jac = None;
                    dt *= 0.25;
                    if dt < self.config.dt_min {
                        return Err(match e {
                            Error::Infeasible(_) | Error::State(_) => e,
                            other => {
                                last_err = Some(other);
                                break;
                            }
                        });
                    }
                }
            }
        }
        Err(match last_err {
            Some(Error::Numerical(m)) => Error::Numerical(format!("steady solve failed: {m}")),
            Some(e) => e,
            None => Error::Numerical(format!(
                "steady solve did not converge in {PSEUDO_MAX_STEPS} pseudo-time steps"
            )),
        })
    }

    fn finish(&self, x: Vec<f64>, i_fc: f64, residual: f64, newton_iterations: usize, pseudo_steps: usize) -> Result<SteadyResult> {
        let state = self.unpack(&x)?;
        let voltage = self.system.model.voltage(&state, i_fc)?;
        Ok(SteadyResult {
            i_fc,
            state,
            voltage,
            residual,
            newton_iterations,
            pseudo_steps,
        })
    }

    /// Steady polarization curve over increasing current densities, each
    /// point warm-started from the previous feasible one.
    pub fn polarization_sweep(&self, guess: &StateVector, currents: &[f64]) -> Result<Vec<PolarizationRow>> {
        if currents.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Validation(
                "sweep currents strictly increasing".to_string(),
            ));
        }
        let mut warm = guess.clone();
        let mut rows = Vec::with_capacity(currents.len());
        for &i in currents {
            match self.solve_steady(&warm, i) {
                Ok(s) => {
                    rows.push(PolarizationRow {
                        i_fc: i,
                        voltage: s.voltage,
                        feasible: true,
                        residual: s.residual,
                        pseudo_steps: s.pseudo_steps,
                        message: String::new(),
                    });
                    warm = s.state;
                }
                Err(e) => rows.push(PolarizationRow {
                    i_fc: i,
                    voltage: VoltageReport::default(),
                    feasible: false,
                    residual: f64::NAN,
                    pseudo_steps: 0,
                    message: e.to_string(),
                }),
            }
        }
        Ok(rows)
    }
}
